"""Multi-start downhill-simplex maximisation over qubit measurement settings.

Settings are spherical angles ``(theta, phi)`` for the Bloch vectors of
A, a, B, b.  For a fixed two-qubit state the correlators reduce to
``n . T . m`` with the correlation tensor ``T_ij = Tr rho (s_i x s_j)``,
which keeps each objective evaluation cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .correlations import CorrelationPoint, CorrelationQuadruple, Scenario, correlation_point
from .errors import ValidationError
from .inequalities import CIRELSON_BOUND, ROTATED_BOUND
from .linalg import PAULIS
from .quantum import QuantumState, bloch_observable, singlet_state

N_RESTARTS = 8
SIMPLEX_XATOL = 1e-7
CONVERGENCE_TOL = 1e-4
MIN_BUDGET = 1000
N_ANGLES = 8
N_STATE_PARAMS = 8

# PAULI_PAIRS[i, j] = sigma_i (x) sigma_j
PAULI_PAIRS = np.array([[np.kron(si, sj) for sj in PAULIS] for si in PAULIS])


@dataclass(frozen=True)
class SettingVector:
    angles: tuple
    state_params: tuple | None = None

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        if len(angles) != N_ANGLES or not all(math.isfinite(a) for a in angles):
            raise ValidationError("need eight finite angles", "angles")
        object.__setattr__(self, "angles", angles)
        if self.state_params is not None:
            sp = tuple(float(a) for a in self.state_params)
            if len(sp) != N_STATE_PARAMS or not all(math.isfinite(a) for a in sp):
                raise ValidationError("need eight finite state parameters", "state_params")
            if not any(sp):
                raise ValidationError("state parameters must not all vanish", "state_params")
            object.__setattr__(self, "state_params", sp)

    @classmethod
    def from_array(cls, x: np.ndarray, with_state: bool) -> "SettingVector":
        x = np.asarray(x, dtype=float)
        return cls(tuple(x[:N_ANGLES]), tuple(x[N_ANGLES:]) if with_state else None)

    def as_array(self) -> np.ndarray:
        return np.array(self.angles + (self.state_params or ()))

    def bloch_vectors(self) -> np.ndarray:
        """Rows are the unit vectors for A, a, B, b."""
        return _bloch_rows(np.array(self.angles))

    def state_vector(self) -> np.ndarray | None:
        if self.state_params is None:
            return None
        return _state_from_params(np.array(self.state_params))

    def scenario(self, state: QuantumState | None = None) -> Scenario:
        """Full tensor-embedded scenario for these settings."""
        if state is None:
            v = self.state_vector()
            if v is None:
                raise ValidationError("no state given and settings carry no state parameters")
            state = QuantumState.pure(v)
        obs = [bloch_observable(n) for n in self.bloch_vectors()]
        return Scenario(state, (obs[0], obs[1]), (obs[2], obs[3]))


@dataclass(frozen=True)
class OptimizationResult:
    best_value: float
    best_settings: SettingVector
    evaluations: int
    converged: bool
    quadruple: CorrelationQuadruple

    @property
    def point(self) -> CorrelationPoint:
        return correlation_point(self.quadruple)


def _bloch_rows(angles: np.ndarray) -> np.ndarray:
    theta = angles[0::2]
    phi = angles[1::2]
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=1)


def _state_from_params(p: np.ndarray) -> np.ndarray:
    v = p[0::2] + 1j * p[1::2]
    return v / np.linalg.norm(v)


def correlation_tensor(state) -> np.ndarray:
    """``T_ij = Re Tr rho (sigma_i (x) sigma_j)`` for a two-qubit state."""
    if isinstance(state, QuantumState):
        if state.dim != 4:
            raise ValidationError(f"settings optimisation needs a two-qubit state, got dim {state.dim}", "state")
        rho = state.density
    else:
        v = np.asarray(state)
        rho = np.outer(v, v.conj())
    return np.einsum("ijab,ba->ij", PAULI_PAIRS, rho).real


def correlators(settings: np.ndarray, tensor: np.ndarray) -> np.ndarray:
    """``(E_AB, E_Ab, E_aB, E_ab)`` for the Bloch settings and correlation tensor."""
    n = _bloch_rows(settings[:N_ANGLES])
    big_a, small_a, big_b, small_b = n
    ta, tsa = big_a @ tensor, small_a @ tensor
    return np.array([ta @ big_b, ta @ small_b, tsa @ big_b, tsa @ small_b])


def _quadruple_values(x: np.ndarray, tensor: np.ndarray | None) -> np.ndarray:
    if tensor is None:
        tensor = correlation_tensor(_state_from_params(x[N_ANGLES:]))
    return correlators(x, tensor)


def _chsh_objective(tensor):
    def f(x):
        e = _quadruple_values(x, tensor)
        return e[0] + e[1] + e[2] - e[3]
    return f


def _rotated_objective(tensor, phi):
    s, c = math.sin(phi), math.cos(phi)

    def f(x):
        e = _quadruple_values(x, tensor)
        return (e[1] + e[2]) * s + (e[0] - e[3]) * c
    return f


def _multistart(objective: Callable, n_params: int, with_state: bool, budget: int, seed: int):
    if int(budget) != budget or budget < MIN_BUDGET:
        raise ValidationError(f"budget must be an integer >= {MIN_BUDGET}, got {budget!r}", "budget")
    rng = np.random.default_rng(seed)
    per_restart = int(budget) // N_RESTARTS
    # scipy may overshoot maxfev by up to n+1 evaluations in its last iteration
    maxfev = max(per_restart - (n_params + 2), n_params + 2)
    best_x, best_val = None, -math.inf
    evaluations = 0
    for _ in range(N_RESTARTS):
        x0 = np.empty(n_params)
        x0[0:N_ANGLES:2] = rng.uniform(0, math.pi, N_ANGLES // 2)
        x0[1:N_ANGLES:2] = rng.uniform(0, 2 * math.pi, N_ANGLES // 2)
        if with_state:
            x0[N_ANGLES:] = rng.normal(size=N_STATE_PARAMS)
        res = minimize(
            lambda x: -objective(x),
            x0,
            method="Nelder-Mead",
            options={"maxfev": maxfev, "xatol": SIMPLEX_XATOL, "fatol": math.inf, "adaptive": with_state},
        )
        evaluations += int(res.nfev)
        val = objective(res.x)
        if val > best_val:
            best_x, best_val = np.array(res.x), val
    return best_x, float(best_val), evaluations


def _resolve_state(state):
    if isinstance(state, str):
        if state != "optimize":
            raise ValidationError(f"state must be a QuantumState or 'optimize', got {state!r}", "state")
        return None
    if state is None:
        state = singlet_state()
    return correlation_tensor(state)


def _result(x, value, evaluations, tensor, target) -> OptimizationResult:
    with_state = tensor is None
    settings = SettingVector.from_array(x, with_state)
    e = _quadruple_values(settings.as_array(), tensor)
    q = CorrelationQuadruple(*np.clip(e, -1.0, 1.0))
    return OptimizationResult(value, settings, evaluations, value >= target - CONVERGENCE_TOL, q)


def maximize_chsh(state=None, budget: int = 20000, seed: int = 1) -> OptimizationResult:
    """Maximise ``AB + Ab + aB - ab`` over Bloch settings (and the state if ``state="optimize"``).

    ``state=None`` means the singlet.  ``converged`` is true when the optimum
    is within 1e-4 of the quantum maximum ``2*sqrt(2)``.
    """
    tensor = _resolve_state(state)
    n = N_ANGLES + (N_STATE_PARAMS if tensor is None else 0)
    f = _chsh_objective(tensor)
    x, value, evals = _multistart(f, n, tensor is None, budget, seed)
    return _result(x, value, evals, tensor, CIRELSON_BOUND)


def maximize_rotated(phi: float, state=None, budget: int = 20000, seed: int = 1) -> OptimizationResult:
    """Maximise ``X sin(phi) + Y cos(phi)``; ``converged`` when within 1e-4 of 2."""
    if not math.isfinite(phi):
        raise ValidationError("phi must be finite", "phi")
    tensor = _resolve_state(state)
    n = N_ANGLES + (N_STATE_PARAMS if tensor is None else 0)
    f = _rotated_objective(tensor, phi)
    x, value, evals = _multistart(f, n, tensor is None, budget, seed)
    return _result(x, value, evals, tensor, ROTATED_BOUND)


def evaluate_settings(settings: SettingVector, state=None, target: str = "chsh", phi: float = 0.0) -> float:
    """Re-evaluate the objective at ``settings`` exactly as the optimiser did."""
    tensor = None if settings.state_params is not None else _resolve_state(state)
    x = settings.as_array()
    if target == "chsh":
        return float(_chsh_objective(tensor)(x))
    return float(_rotated_objective(tensor, phi)(x))


@dataclass(frozen=True)
class CirclePoint:
    phi: float
    point: CorrelationPoint
    converged: bool

    @property
    def radius(self) -> float:
        return self.point.radius


def trace_circle(steps: int = 8, budget_per_step: int = 4000, seed: int = 1) -> list[CirclePoint]:
    """Optimise the rotated functional on the singlet for ``steps`` equally spaced phi."""
    if int(steps) != steps or steps < 4:
        raise ValidationError(f"steps must be an integer >= 4, got {steps!r}", "steps")
    out = []
    for k in range(int(steps)):
        phi = 2 * math.pi * k / steps
        res = maximize_rotated(phi, None, budget_per_step, seed + k)
        out.append(CirclePoint(phi, res.point, res.converged))
    return out
