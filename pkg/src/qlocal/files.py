"""Scenario files and report documents.

Scenario file (JSON)::

    {
      "schema_version": 1,
      "embedding": "tensor",
      "state": {"kind": "pure", "dims": [2, 2], "entries": [[re, im], ...]},
      "alice": [<observable>, <observable>],
      "bob":   [<observable>, <observable>]
    }

An observable is ``{"bloch": [x, y, z]}``, ``{"matrix": [[re, im], ...]}``
(row-major, square) or ``{"povm": [{"label": 1, "entries": [...]},
{"label": -1, "entries": [...]}]}``.  Mixed-state entries are the density
matrix in row-major order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .correlations import CorrelationPoint, CorrelationQuadruple, NoSignalingResult, Scenario
from .errors import QlocalError, ValidationError
from .inequalities import InequalityReport
from .quantum import DichotomicObservable, Povm, QuantumState, bloch_observable

SCHEMA_VERSION = 1
SCENARIO_PACKAGE = "qlocal.scenarios"


def _complex_entries(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("expected a non-empty list of [re, im] pairs", where)
    out = np.empty(len(raw), dtype=complex)
    for k, pair in enumerate(raw):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pair)
        ):
            raise ValidationError("expected a [re, im] pair of numbers", f"{where}[{k}]")
        if not all(math.isfinite(c) for c in pair):
            raise ValidationError("entries must be finite", f"{where}[{k}]")
        out[k] = complex(pair[0], pair[1])
    return out


def _square(entries: np.ndarray, where: str) -> np.ndarray:
    n = math.isqrt(entries.size)
    if n * n != entries.size:
        raise ValidationError(f"{entries.size} entries do not form a square matrix", where)
    return entries.reshape(n, n)


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise ValidationError("expected an object", where)
    if key not in d:
        raise ValidationError(f"missing field {key!r}", where)
    return d[key]


def parse_state(raw, where: str = "state") -> QuantumState:
    kind = _require(raw, "kind", where)
    entries = _complex_entries(_require(raw, "entries", where), f"{where}.entries")
    dim = raw.get("dim")
    if "dims" in raw:
        dims = raw["dims"]
        if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) and d > 0 for d in dims)):
            raise ValidationError("dims must be two positive integers", f"{where}.dims")
        if dim is not None and dim != dims[0] * dims[1]:
            raise ValidationError("dim disagrees with dims", f"{where}.dim")
        dim = dims[0] * dims[1]
    try:
        if kind == "pure":
            state = QuantumState.pure(entries)
        elif kind == "mixed":
            state = QuantumState.mixed(_square(entries, f"{where}.entries"))
        else:
            raise ValidationError(f"kind must be 'pure' or 'mixed', got {kind!r}", f"{where}.kind")
    except ValidationError as exc:
        if exc.field and exc.field.startswith(where):
            raise
        raise ValidationError(str(exc), where) from exc
    if dim is not None and state.dim != dim:
        raise ValidationError(f"declared dimension {dim} but entries give {state.dim}", where)
    return state


def parse_observable(raw, where: str):
    if not isinstance(raw, dict) or len(raw) == 0:
        raise ValidationError("observable must be an object", where)
    kinds = [k for k in ("bloch", "matrix", "povm") if k in raw]
    if len(kinds) != 1:
        raise ValidationError("observable needs exactly one of 'bloch', 'matrix', 'povm'", where)
    kind = kinds[0]
    label = raw.get("label", where)
    try:
        if kind == "bloch":
            vec = raw["bloch"]
            if not (isinstance(vec, list) and len(vec) == 3):
                raise ValidationError("expected three numbers", f"{where}.bloch")
            return bloch_observable(vec, str(label))
        if kind == "matrix":
            m = _square(_complex_entries(raw["matrix"], f"{where}.matrix"), f"{where}.matrix")
            return DichotomicObservable(m, str(label))
        effects = raw["povm"]
        if not isinstance(effects, list):
            raise ValidationError("expected a list of effects", f"{where}.povm")
        parsed = []
        for k, eff in enumerate(effects):
            ew = f"{where}.povm[{k}]"
            lab = _require(eff, "label", ew)
            if not isinstance(lab, int) or isinstance(lab, bool):
                raise ValidationError("label must be an integer", f"{ew}.label")
            parsed.append((lab, _square(_complex_entries(_require(eff, "entries", ew), f"{ew}.entries"), ew)))
        return Povm(tuple(parsed), str(label))
    except ValidationError as exc:
        if exc.field and exc.field.startswith(where):
            raise
        raise ValidationError(str(exc), where) from exc


def parse_scenario(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ValidationError("scenario file must contain a JSON object", "<root>")
    version = _require(doc, "schema_version", "<root>")
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})", "schema_version")
    embedding = doc.get("embedding", "tensor")
    if embedding not in ("tensor", "joint"):
        raise ValidationError(f"must be 'tensor' or 'joint', got {embedding!r}", "embedding")
    state = parse_state(_require(doc, "state", "<root>"))
    wings = {}
    for wing in ("alice", "bob"):
        raw = _require(doc, wing, "<root>")
        if not isinstance(raw, list) or len(raw) != 2:
            raise ValidationError("expected a list of exactly 2 observables", wing)
        wings[wing] = tuple(parse_observable(o, f"{wing}[{k}]") for k, o in enumerate(raw))
    try:
        return Scenario(state, wings["alice"], wings["bob"], embedding)
    except ValidationError as exc:
        raise ValidationError(str(exc), exc.field or "<root>") from exc


def loads_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(doc)


def bundled_scenarios() -> list[str]:
    root = resources.files(SCENARIO_PACKAGE)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def read_scenario_text(path_or_name: str) -> str:
    """Read a scenario file, falling back to a bundled scenario of that name."""
    path = Path(path_or_name)
    if path.is_file():
        try:
            return path.read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc}") from exc
    name = path_or_name[:-5] if path_or_name.endswith(".json") else path_or_name
    if name in bundled_scenarios():
        return resources.files(SCENARIO_PACKAGE).joinpath(f"{name}.json").read_text()
    raise ValidationError(
        f"no such file, and not a bundled scenario (available: {', '.join(bundled_scenarios())})",
        str(path_or_name),
    )


def load_scenario(path_or_name: str) -> Scenario:
    return loads_scenario(read_scenario_text(path_or_name))


def _entries(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a).ravel()]


def scenario_to_dict(s: Scenario) -> dict:
    if s.state.kind == "pure":
        state = {"kind": "pure", "entries": _entries(s.state.vector)}
    else:
        state = {"kind": "mixed", "entries": _entries(s.state.rho)}
    if s.embedding == "tensor":
        state["dims"] = list(s.dims)
    else:
        state["dim"] = s.state.dim

    def obs(o):
        if isinstance(o, DichotomicObservable):
            return {"matrix": _entries(o.matrix)}
        return {"povm": [{"label": lab, "entries": _entries(e)} for lab, e in o.effects]}

    return {
        "schema_version": SCHEMA_VERSION,
        "embedding": s.embedding,
        "state": state,
        "alice": [obs(o) for o in s.alice],
        "bob": [obs(o) for o in s.bob],
    }


# --- reports ----------------------------------------------------------------


@dataclass
class ReportDocument:
    """Machine-readable output of a CLI command."""

    command: str
    quadruple: CorrelationQuadruple | None = None
    point: CorrelationPoint | None = None
    reports: list = field(default_factory=list)
    no_signaling: NoSignalingResult | None = None
    details: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "quadruple": self.quadruple.to_dict() if self.quadruple else None,
            "point": self.point.to_dict() if self.point else None,
            "reports": [r.to_dict() for r in self.reports],
            "no_signaling": (
                {"ok": self.no_signaling.ok, "max_violation": self.no_signaling.max_violation}
                if self.no_signaling
                else None
            ),
            "details": self.details,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        if not isinstance(d, dict):
            raise ValidationError("report document must be a JSON object")
        q = d.get("quadruple")
        p = d.get("point")
        ns = d.get("no_signaling")
        return cls(
            command=d["command"],
            quadruple=CorrelationQuadruple(**q) if q else None,
            point=CorrelationPoint(**p) if p else None,
            reports=[InequalityReport.from_dict(r) for r in d.get("reports", [])],
            no_signaling=NoSignalingResult(ns["ok"], ns["max_violation"]) if ns else None,
            details=d.get("details", {}),
            metadata=d.get("metadata", {}),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        try:
            return cls.from_dict(json.loads(text))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValidationError(f"not a report document: {exc}") from exc
        except QlocalError:
            raise

    def report(self, name: str) -> InequalityReport:
        for r in self.reports:
            if r.name == name:
                return r
        raise KeyError(name)
