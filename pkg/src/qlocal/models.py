"""Superquantum PR-box correlations and the setting-dependent measurement protocol."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .correlations import (
    BehaviorTable,
    CorrelationQuadruple,
    OutcomeRow,
    check_no_signaling,
)
from .errors import ValidationError
from .linalg import I2, SIGMA_X
from .quantum import singlet_state

RNG_ALGORITHM = "numpy.random.PCG64"


def pr_correlation(theta: float) -> float:
    """Piecewise-linear correlation: +1 up to pi/4, -1 from 3pi/4, linear in between."""
    if not math.isfinite(theta) or theta < 0 or theta > math.pi:
        raise ValidationError(f"theta must lie in [0, pi], got {theta!r}", "theta")
    if theta <= math.pi / 4:
        return 1.0
    if theta >= 3 * math.pi / 4:
        return -1.0
    return 2 - 4 * theta / math.pi


def fold_angle(t1: float, t2: float) -> float:
    """Angle between two in-plane axes, folded into [0, pi]."""
    d = abs(t1 - t2) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def pr_behavior(theta: float) -> OutcomeRow:
    e = pr_correlation(theta)
    p_same = (e + 1) / 4
    p_diff = 0.5 - p_same
    # makes p_same + p_diff == 1/2 exactly (Sterbenz on the larger of the two)
    p_same = 0.5 - p_diff
    return OutcomeRow(p_same, p_diff, p_diff, p_same)


@dataclass(frozen=True)
class AxisConfiguration:
    alpha: float
    alpha_prime: float
    beta: float
    beta_prime: float

    @classmethod
    def canonical(cls) -> "AxisConfiguration":
        """alpha', beta, alpha, beta' at successive separations of pi/4."""
        return cls(alpha=math.pi / 2, alpha_prime=0.0, beta=math.pi / 4, beta_prime=3 * math.pi / 4)

    def angle(self, x: int, y: int) -> float:
        a = self.alpha if x == 0 else self.alpha_prime
        b = self.beta if y == 0 else self.beta_prime
        return fold_angle(a, b)


def pr_quadruple(axes: AxisConfiguration) -> CorrelationQuadruple:
    return CorrelationQuadruple(
        pr_correlation(axes.angle(0, 0)),
        pr_correlation(axes.angle(0, 1)),
        pr_correlation(axes.angle(1, 0)),
        pr_correlation(axes.angle(1, 1)),
    )


def pr_table(axes: AxisConfiguration) -> BehaviorTable:
    return BehaviorTable.from_rows({(x, y): pr_behavior(axes.angle(x, y)) for x in (0, 1) for y in (0, 1)})


@dataclass(frozen=True)
class PrSample:
    row: OutcomeRow
    counts: tuple
    theta: float
    count: int
    seed: int
    rng_algorithm: str = RNG_ALGORITHM


def pr_sample(theta: float, count: int, seed: int) -> PrSample:
    """Draw ``count`` outcome pairs from the PR-box distribution at angle ``theta``."""
    if int(count) != count or count < 1:
        raise ValidationError(f"count must be a positive integer, got {count!r}", "count")
    exact = pr_behavior(theta)
    rng = np.random.Generator(np.random.PCG64(seed))
    probs = [exact.pp, exact.pm, exact.mp, exact.mm]
    counts = rng.multinomial(int(count), probs)
    freq = counts / count
    return PrSample(
        OutcomeRow(*(float(f) for f in freq)),
        tuple(int(c) for c in counts),
        float(theta),
        int(count),
        int(seed),
    )


class ProtocolResult(NamedTuple):
    quadruple: CorrelationQuadruple
    per_wing_nosignal: bool
    behavior: BehaviorTable


def nonlocal_protocol_quadruple() -> ProtocolResult:
    """Singlet measured with sigma_x on both sides, Bob's sign chosen per setting pair.

    Bob uses -sigma_x except for the primed/primed pair, where he uses
    +sigma_x.  His procedure therefore depends on Alice's choice even though
    every marginal stays at 1/2.
    """
    psi = singlet_state()
    rows = {}
    corr = {}
    proj = {1: (I2 + SIGMA_X) / 2, -1: (I2 - SIGMA_X) / 2}
    for x in (0, 1):
        for y in (0, 1):
            bob_sign = 1 if (x, y) == (1, 1) else -1
            corr[x, y] = psi.expect(np.kron(SIGMA_X, bob_sign * SIGMA_X)).real
            bob_proj = {j: (I2 + j * bob_sign * SIGMA_X) / 2 for j in (1, -1)}
            cells = [psi.expect(np.kron(proj[i], bob_proj[j])).real for i in (1, -1) for j in (1, -1)]
            rows[x, y] = OutcomeRow(*cells)
    q = CorrelationQuadruple(corr[0, 0], corr[0, 1], corr[1, 0], corr[1, 1])
    table = BehaviorTable.from_rows(rows)
    ok, _ = check_no_signaling(table, tol=1e-12)
    marginals_half = all(
        abs(table.row(x, y).marginal_a(s) - 0.5) <= 1e-12 and abs(table.row(x, y).marginal_b(s) - 0.5) <= 1e-12
        for x in (0, 1) for y in (0, 1) for s in (1, -1)
    )
    return ProtocolResult(q, ok and marginals_half, table)
