"""Bell scenarios, correlators, behavior tables and the no-signaling check.

Setting index 0 is the unprimed observable (A, B) and 1 the primed one
(a, b).  Outcome index 0 is +1 and index 1 is -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import DimensionError, LocalityViolationError, NumericalError, ValidationError
from .quantum import (
    DichotomicObservable,
    Povm,
    QuantumState,
    observable_effects,
    observable_operator,
    wings_commute,
)

OUTCOMES = (1, -1)
SETTINGS = (0, 1)
PAIR_NAMES = {(0, 0): "AB", (0, 1): "Ab", (1, 0): "aB", (1, 1): "ab"}
EMBEDDINGS = ("tensor", "joint")
BOUND_TOL = 1e-9


def _dim(obs) -> int:
    return obs.dim


@dataclass(frozen=True, eq=False)
class Scenario:
    """A state plus two observables per wing.

    With ``embedding="tensor"`` Alice's operators act on the first factor
    and Bob's on the second.  With ``embedding="joint"`` all operators act
    on the full space and cross-wing commutativity is checked on use.
    """

    state: QuantumState
    alice: tuple
    bob: tuple
    embedding: str = "tensor"

    def __post_init__(self):
        if self.embedding not in EMBEDDINGS:
            raise ValidationError(f"embedding must be one of {EMBEDDINGS}", "embedding")
        for wing in ("alice", "bob"):
            obs = tuple(getattr(self, wing))
            if len(obs) != 2:
                raise ValidationError(f"need exactly two observables, got {len(obs)}", wing)
            for k, o in enumerate(obs):
                if not isinstance(o, (DichotomicObservable, Povm)):
                    raise ValidationError(f"unsupported observable type {type(o).__name__}", f"{wing}[{k}]")
                if isinstance(o, Povm) and (len(o.effects) != 2 or not o.is_dichotomic):
                    raise ValidationError("POVM must have two outcomes labelled +1/-1", f"{wing}[{k}]")
            if _dim(obs[0]) != _dim(obs[1]):
                raise DimensionError(f"observables act on dims {_dim(obs[0])} and {_dim(obs[1])}", wing)
            object.__setattr__(self, wing, obs)
        da, db = self.dims
        if self.embedding == "tensor":
            if da * db != self.state.dim:
                raise DimensionError(f"wings act on {da}x{db} but state has dim {self.state.dim}", "state")
            if da * db > linalg.MAX_DIM:
                raise DimensionError(f"joint dimension {da * db} exceeds cap {linalg.MAX_DIM}")
        elif not (da == db == self.state.dim):
            raise DimensionError(
                f"joint embedding needs all operators on dim {self.state.dim}, got {da} and {db}"
            )

    @property
    def dims(self) -> tuple[int, int]:
        return _dim(self.alice[0]), _dim(self.bob[0])

    @property
    def is_sharp(self) -> bool:
        return all(isinstance(o, DichotomicObservable) for o in self.alice + self.bob)

    def lift_alice(self, op: np.ndarray) -> np.ndarray:
        if self.embedding == "joint":
            return np.asarray(op)
        return np.kron(op, np.eye(self.dims[1]))

    def lift_bob(self, op: np.ndarray) -> np.ndarray:
        if self.embedding == "joint":
            return np.asarray(op)
        return np.kron(np.eye(self.dims[0]), op)

    @cached_property
    def commutation(self) -> tuple[bool, float]:
        if self.embedding == "tensor":
            return True, 0.0
        return wings_commute(self.alice, self.bob)

    def require_local(self) -> None:
        ok, resid = self.commutation
        if not ok:
            raise LocalityViolationError(
                "Alice's and Bob's operators do not commute "
                f"(max |[A_i, B_j]| = {resid:.3e}); product observables are not Hermitian"
            )

    @cached_property
    def _lifted_operators(self) -> tuple:
        alice = tuple(self.lift_alice(observable_operator(o)) for o in self.alice)
        bob = tuple(self.lift_bob(observable_operator(o)) for o in self.bob)
        return alice, bob

    @cached_property
    def _lifted_effects(self) -> tuple:
        alice = tuple(tuple(self.lift_alice(e) for e in observable_effects(o)) for o in self.alice)
        bob = tuple(tuple(self.lift_bob(e) for e in observable_effects(o)) for o in self.bob)
        return alice, bob


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > 1e-9:
        raise NumericalError(f"{what} has imaginary part {value.imag:.3e}")
    return float(value.real)


def _pair(which) -> tuple[int, int]:
    if isinstance(which, str):
        for key, name in PAIR_NAMES.items():
            if name == which:
                return key
        raise ValidationError(f"unknown pair selector {which!r}")
    x, y = which
    if x not in SETTINGS or y not in SETTINGS:
        raise ValidationError(f"settings must be 0 or 1, got {which!r}")
    return int(x), int(y)


def expectation(scenario: Scenario, which) -> float:
    """``Tr rho D_A D_B`` for the selected setting pair.

    ``which`` is ``(x, y)`` or one of ``"AB"``, ``"Ab"``, ``"aB"``, ``"ab"``.
    POVM wings enter through their difference operators.
    """
    x, y = _pair(which)
    scenario.require_local()
    alice, bob = scenario._lifted_operators
    value = _real(scenario.state.expect(alice[x] @ bob[y]), f"<{PAIR_NAMES[x, y]}>")
    if abs(value) > 1 + BOUND_TOL:
        raise NumericalError(f"correlator {value} outside [-1, 1]")
    return value


@dataclass(frozen=True)
class CorrelationQuadruple:
    e_AB: float
    e_Ab: float
    e_aB: float
    e_ab: float

    def __post_init__(self):
        for name in ("e_AB", "e_Ab", "e_aB", "e_ab"):
            v = getattr(self, name)
            if not np.isfinite(v) or abs(v) > 1 + BOUND_TOL:
                raise ValidationError(f"correlator {v!r} outside [-1, 1]", name)
            object.__setattr__(self, name, float(v))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.e_AB, self.e_Ab, self.e_aB, self.e_ab)

    def value(self, x: int, y: int) -> float:
        return getattr(self, "e_" + PAIR_NAMES[x, y])

    def to_dict(self) -> dict:
        return dict(zip(("e_AB", "e_Ab", "e_aB", "e_ab"), self.as_tuple()))


@dataclass(frozen=True)
class CorrelationPoint:
    x: float
    y: float

    @property
    def radius(self) -> float:
        return float(np.hypot(self.x, self.y))

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y}


def quadruple(scenario: Scenario) -> CorrelationQuadruple:
    return CorrelationQuadruple(*(expectation(scenario, key) for key in PAIR_NAMES))


def correlation_point(q: CorrelationQuadruple) -> CorrelationPoint:
    return CorrelationPoint(q.e_Ab + q.e_aB, q.e_AB - q.e_ab)


@dataclass(frozen=True)
class OutcomeRow:
    """Joint outcome distribution for one setting pair."""

    pp: float
    pm: float
    mp: float
    mm: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.pp, self.pm], [self.mp, self.mm]])

    @property
    def correlator(self) -> float:
        return self.pp - self.pm - self.mp + self.mm

    def marginal_a(self, i: int) -> float:
        return self.pp + self.pm if i == 1 else self.mp + self.mm

    def marginal_b(self, j: int) -> float:
        return self.pp + self.mp if j == 1 else self.pm + self.mm


def _outcome_index(v: int) -> int:
    if v not in OUTCOMES:
        raise ValidationError(f"outcome must be +1 or -1, got {v!r}")
    return 0 if v == 1 else 1


class BehaviorTable:
    """``p(i, j | x, y)`` for two settings and two outcomes per wing.

    Stored as an array indexed ``[x, y, i_index, j_index]``.
    """

    def __init__(self, probs):
        p = np.array(probs, dtype=float)
        if p.shape != (2, 2, 2, 2):
            raise DimensionError(f"behavior array must have shape (2,2,2,2), got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValidationError("probabilities must be finite")
        if p.min() < -1e-12 or p.max() > 1 + 1e-12:
            raise ValidationError(f"probabilities outside [0, 1]: min {p.min():.3e}, max {p.max():.3e}")
        sums = p.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1)) > 1e-9:
            raise ValidationError(f"rows do not sum to 1 (worst deviation {np.max(np.abs(sums - 1)):.3e})")
        p.setflags(write=False)
        self._p = p

    @classmethod
    def from_rows(cls, rows: dict) -> "BehaviorTable":
        arr = np.zeros((2, 2, 2, 2))
        for (x, y), row in rows.items():
            arr[x, y] = row.as_array() if isinstance(row, OutcomeRow) else np.asarray(row)
        return cls(arr)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "BehaviorTable":
        """Build from ``{(x, y, i, j): p}`` with outcomes given as +1/-1."""
        arr = np.zeros((2, 2, 2, 2))
        for (x, y, i, j), v in mapping.items():
            arr[x, y, _outcome_index(i), _outcome_index(j)] = v
        return cls(arr)

    @property
    def array(self) -> np.ndarray:
        return self._p

    def p(self, x: int, y: int, i: int, j: int) -> float:
        return float(self._p[x, y, _outcome_index(i), _outcome_index(j)])

    def row(self, x: int, y: int) -> OutcomeRow:
        r = self._p[x, y]
        return OutcomeRow(float(r[0, 0]), float(r[0, 1]), float(r[1, 0]), float(r[1, 1]))

    def correlator(self, x: int, y: int) -> float:
        return self.row(x, y).correlator

    def quadruple(self) -> CorrelationQuadruple:
        return CorrelationQuadruple(*(self.correlator(x, y) for x, y in PAIR_NAMES))

    def to_dict(self) -> dict:
        return {
            f"{x}{y}": {"++": r.pp, "+-": r.pm, "-+": r.mp, "--": r.mm}
            for (x, y) in PAIR_NAMES
            for r in [self.row(x, y)]
        }

    def __repr__(self):
        return f"BehaviorTable({self.to_dict()})"


def behavior_from_scenario(scenario: Scenario) -> BehaviorTable:
    scenario.require_local()
    alice, bob = scenario._lifted_effects
    arr = np.zeros((2, 2, 2, 2))
    for x in SETTINGS:
        for y in SETTINGS:
            for i in range(2):
                for j in range(2):
                    val = scenario.state.expect(alice[x][i] @ bob[y][j])
                    arr[x, y, i, j] = _real(val, "joint probability")
    return BehaviorTable(arr)


class NoSignalingResult(NamedTuple):
    ok: bool
    max_violation: float


def check_no_signaling(t: BehaviorTable, tol: float = 1e-9) -> NoSignalingResult:
    """Compare each party's marginals across the other party's settings.

    Marginals are summed in exact rational arithmetic, so tables whose
    entries add up exactly report a violation of exactly 0.
    """
    p = [[[[Fraction(float(t.array[x, y, i, j])) for j in range(2)] for i in range(2)]
          for y in range(2)] for x in range(2)]
    worst = Fraction(0)
    for x in range(2):
        for i in range(2):
            m0 = p[x][0][i][0] + p[x][0][i][1]
            m1 = p[x][1][i][0] + p[x][1][i][1]
            worst = max(worst, abs(m0 - m1))
    for y in range(2):
        for j in range(2):
            m0 = p[0][y][0][j] + p[0][y][1][j]
            m1 = p[1][y][0][j] + p[1][y][1][j]
            worst = max(worst, abs(m0 - m1))
    violation = float(worst)
    return NoSignalingResult(violation <= tol, violation)
