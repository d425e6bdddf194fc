"""Bell-type inequality evaluators and local-hidden-variable membership."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .correlations import CorrelationPoint, CorrelationQuadruple, Scenario, correlation_point
from .errors import NumericalError, UnsupportedInputError, ValidationError
from .quantum import DichotomicObservable, DICHOTOMIC_TOL

TOL_REPORT = 1e-9
SQRT8 = 2 * math.sqrt(2)

BELL_BOUND = 2.0
CIRELSON_BOUND = SQRT8
LOGICAL_BOUND = 4.0
ROTATED_BOUND = 2.0
CIRCLE_RADIUS = 2.0


@dataclass(frozen=True)
class InequalityReport:
    name: str
    value: float
    bound: float
    satisfied: bool
    margin: float

    @classmethod
    def evaluate(cls, name: str, value: float, bound: float) -> "InequalityReport":
        margin = bound - abs(value)
        return cls(name, float(value), float(bound), margin >= -TOL_REPORT, float(margin))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "satisfied": self.satisfied,
            "margin": self.margin,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InequalityReport":
        return cls(d["name"], d["value"], d["bound"], d["satisfied"], d["margin"])


def chsh_value(q: CorrelationQuadruple) -> float:
    return q.e_AB + q.e_Ab + q.e_aB - q.e_ab


def bell_report(q: CorrelationQuadruple) -> InequalityReport:
    return InequalityReport.evaluate("bell", chsh_value(q), BELL_BOUND)


def cirelson_report(q: CorrelationQuadruple) -> InequalityReport:
    return InequalityReport.evaluate("cirelson", chsh_value(q), CIRELSON_BOUND)


def rotated_value(p: CorrelationPoint, phi: float) -> float:
    return abs(p.x * math.sin(phi) + p.y * math.cos(phi))


class PhiSample(NamedTuple):
    phi: float
    value: float
    bound: float


@dataclass(frozen=True)
class PhiSweepResult:
    samples: tuple

    @property
    def max_value(self) -> float:
        return max(s.value for s in self.samples)


def phi_sweep(p: CorrelationPoint, steps: int) -> PhiSweepResult:
    if int(steps) != steps or steps < 4:
        raise ValidationError(f"steps must be an integer >= 4, got {steps!r}", "steps")
    steps = int(steps)
    samples = []
    for k in range(steps):
        phi = 2 * math.pi * k / steps
        samples.append(PhiSample(phi, rotated_value(p, phi), ROTATED_BOUND))
    return PhiSweepResult(tuple(samples))


def circle_report(p: CorrelationPoint) -> InequalityReport:
    return InequalityReport.evaluate("circle", math.hypot(p.x, p.y), CIRCLE_RADIUS)


def all_reports(q: CorrelationQuadruple) -> list[InequalityReport]:
    """Every bound of the family evaluated on one quadruple."""
    p = correlation_point(q)
    return [
        bell_report(q),
        cirelson_report(q),
        InequalityReport.evaluate("logical", chsh_value(q), LOGICAL_BOUND),
        InequalityReport.evaluate("sum_strip", p.x + p.y, SQRT8),
        InequalityReport.evaluate("difference_strip", p.x - p.y, SQRT8),
        InequalityReport.evaluate("x_bound", p.x, 2.0),
        InequalityReport.evaluate("y_bound", p.y, 2.0),
        circle_report(p),
    ]


def landau_identity_residual(scenario: Scenario) -> float:
    """Max-entry residual of ``C^2 - (4 - [A,a][B,b])`` for a sharp scenario."""
    for k, obs in enumerate(scenario.alice + scenario.bob):
        if not isinstance(obs, DichotomicObservable):
            raise UnsupportedInputError(
                "the operator identity needs sharp observables with M^2 = 1", f"observable[{k}]"
            )
        resid = float(np.max(np.abs(obs.matrix @ obs.matrix - np.eye(obs.dim))))
        if resid > DICHOTOMIC_TOL:
            raise UnsupportedInputError(f"M^2 differs from 1 by {resid:.3e}", f"observable[{k}]")
    scenario.require_local()
    big_a, small_a = (scenario.lift_alice(o.matrix) for o in scenario.alice)
    big_b, small_b = (scenario.lift_bob(o.matrix) for o in scenario.bob)
    c = big_a @ big_b + big_a @ small_b + small_a @ big_b - small_a @ small_b
    comm_a = big_a @ small_a - small_a @ big_a
    comm_b = big_b @ small_b - small_b @ big_b
    rhs = 4 * np.eye(c.shape[0]) - comm_a @ comm_b
    return float(np.max(np.abs(c @ c - rhs)))


# --- local hidden variables -------------------------------------------------

# (A, a, B, b) in {+1,-1}^4 -> (AB, Ab, aB, ab)
DETERMINISTIC_ASSIGNMENTS = tuple(itertools.product((1, -1), repeat=4))
DETERMINISTIC_VERTICES = np.array(
    [[A * B, A * b, a * B, a * b] for A, a, B, b in DETERMINISTIC_ASSIGNMENTS], dtype=float
)

_TERMS = ("AB", "Ab", "aB", "ab")


def _chsh_variants() -> list:
    out = []
    for minus in range(4):
        coeffs = np.ones(4)
        coeffs[minus] = -1
        expr = " ".join(
            ("- " if c < 0 else ("" if k == 0 else "+ ")) + t for k, (c, t) in enumerate(zip(coeffs, _TERMS))
        )
        for sign in (1, -1):
            name = f"{'+' if sign > 0 else '-'}({expr}) <= 2"
            out.append((name, sign * coeffs))
    return out


CHSH_VARIANTS = tuple(_chsh_variants())
LHV_TOL = 1e-9


class LhvResult(NamedTuple):
    member: bool
    weights: tuple | None
    violated: str | None


def chsh_variant_values(q: CorrelationQuadruple) -> list[tuple[str, float]]:
    v = np.array(q.as_tuple())
    return [(name, float(coeffs @ v)) for name, coeffs in CHSH_VARIANTS]


def _hull_lp(q: np.ndarray):
    from scipy.optimize import linprog

    n = len(DETERMINISTIC_VERTICES)
    # variables: 16 weights then slack t; minimise t subject to |V^T w - q| <= t
    c = np.zeros(n + 1)
    c[-1] = 1.0
    vt = DETERMINISTIC_VERTICES.T
    a_ub = np.block([[vt, -np.ones((4, 1))], [-vt, -np.ones((4, 1))]])
    b_ub = np.concatenate([q, -q])
    a_eq = np.concatenate([np.ones(n), [0.0]])[None, :]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=[(0, None)] * (n + 1),
                  method="highs")
    if res.status != 0:
        raise NumericalError(f"hull LP failed: {res.message}")
    return res.x[:n], float(res.x[-1])


def _refine_weights(w: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Polish LP weights by an exact solve on their support."""
    support = np.flatnonzero(w > 1e-12)
    m = np.vstack([DETERMINISTIC_VERTICES[support].T, np.ones(len(support))])
    rhs = np.concatenate([q, [1.0]])
    sol, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    if np.all(sol >= 0):
        refined = np.zeros_like(w)
        refined[support] = sol
        return refined
    return np.clip(w, 0, None) / np.clip(w, 0, None).sum()


def lhv_membership_exact(q: CorrelationQuadruple) -> tuple[bool, np.ndarray]:
    """Convex-hull membership over the 16 deterministic strategies by linear programming."""
    target = np.array(q.as_tuple())
    w, slack = _hull_lp(target)
    return slack <= LHV_TOL, w


def lhv_membership(q: CorrelationQuadruple) -> LhvResult:
    """Decide whether ``q`` has a local hidden-variable model.

    The decision uses all eight CHSH sign variants (complete for
    correlators in [-1, 1]).  Members get explicit convex weights over
    ``DETERMINISTIC_ASSIGNMENTS``; non-members get the most violated variant.
    """
    values = chsh_variant_values(q)
    name, worst = max(values, key=lambda nv: nv[1])
    if worst > BELL_BOUND + LHV_TOL:
        return LhvResult(False, None, name)
    target = np.array(q.as_tuple())
    w, _ = _hull_lp(target)
    w = _refine_weights(w, target)
    resid = float(np.max(np.abs(DETERMINISTIC_VERTICES.T @ w - target)))
    if resid > 1e-9 or abs(w.sum() - 1) > 1e-9:
        raise NumericalError(f"LHV weights reproduce the quadruple only to {resid:.3e}")
    return LhvResult(True, tuple(float(x) for x in w), None)
