"""States, sharp dichotomic observables and two-outcome POVMs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from . import linalg
from .errors import DimensionError, NumericalError, ValidationError

STATE_TOL = 1e-9
POVM_TOL = 1e-9
DICHOTOMIC_TOL = 1e-8
COMMUTE_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuantumState:
    """A pure vector or a density operator.

    Build through :meth:`pure` or :meth:`mixed`; both validate.
    """

    kind: str
    dim: int
    vector: np.ndarray | None = None
    rho: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "pure":
            v = linalg.as_vector(self.vector, "state.vector")
            if v.size != self.dim:
                raise DimensionError(f"vector has {v.size} entries, dim is {self.dim}", "state")
            norm = float(np.linalg.norm(v))
            if abs(norm - 1.0) > STATE_TOL:
                raise ValidationError(f"pure state not normalized (norm {norm:.12g})", "state")
            object.__setattr__(self, "vector", _frozen(v))
        elif self.kind == "mixed":
            r = linalg.as_matrix(self.rho, "state.rho")
            if r.shape != (self.dim, self.dim):
                raise DimensionError(f"rho has shape {r.shape}, dim is {self.dim}", "state")
            if not linalg.is_hermitian(r):
                raise ValidationError("density operator is not Hermitian", "state")
            tr = np.trace(r)
            if abs(tr - 1.0) > STATE_TOL:
                raise ValidationError(f"density operator has trace {tr.real:.12g}", "state")
            if not linalg.is_positive_semidefinite(r, STATE_TOL):
                raise ValidationError("density operator is not positive semidefinite", "state")
            object.__setattr__(self, "rho", _frozen(r))
        else:
            raise ValidationError(f"unknown state kind {self.kind!r}", "state.kind")

    @classmethod
    def pure(cls, vector) -> "QuantumState":
        v = np.asarray(vector, dtype=complex)
        return cls("pure", int(v.size), vector=v)

    @classmethod
    def mixed(cls, rho) -> "QuantumState":
        r = np.asarray(rho, dtype=complex)
        return cls("mixed", int(r.shape[0]) if r.ndim == 2 else 0, rho=r)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "QuantumState":
        return cls.mixed(np.eye(dim) / dim)

    @property
    def density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.vector, self.vector.conj())
        return np.array(self.rho)

    def expect(self, op: np.ndarray) -> complex:
        """``Tr rho op`` (``<psi|op|psi>`` for pure states)."""
        op = np.asarray(op)
        if op.shape != (self.dim, self.dim):
            raise DimensionError(f"operator shape {op.shape} does not act on dim {self.dim}")
        if self.kind == "pure":
            return complex(np.vdot(self.vector, op @ self.vector))
        return complex(np.trace(self.rho @ op))


@dataclass(frozen=True, eq=False)
class DichotomicObservable:
    """Hermitian operator with spectrum in {-1, +1}."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix, self.label or "observable")
        if not linalg.is_hermitian(m):
            raise ValidationError("observable is not Hermitian", self.label or "observable")
        if m.shape[0] != m.shape[1]:
            raise DimensionError("observable must be square", self.label or "observable")
        resid = float(np.max(np.abs(m @ m - np.eye(m.shape[0]))))
        if resid > DICHOTOMIC_TOL:
            raise ValidationError(
                f"spectrum is not contained in {{-1,+1}} (|M^2 - 1|max = {resid:.3e})",
                self.label or "observable",
            )
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered ``(outcome_label, effect)`` pairs; effects PSD and summing to the identity."""

    effects: tuple
    label: str = ""

    def __post_init__(self):
        name = self.label or "povm"
        if len(self.effects) == 0:
            raise ValidationError("a POVM needs at least one effect", name)
        checked = []
        seen = set()
        dim = None
        for k, (outcome, effect) in enumerate(self.effects):
            where = f"{name}[{k}]"
            if isinstance(outcome, bool) or int(outcome) != outcome:
                raise ValidationError(f"outcome label {outcome!r} is not an integer", where)
            outcome = int(outcome)
            if outcome in seen:
                raise ValidationError(f"duplicate outcome label {outcome}", where)
            seen.add(outcome)
            e = linalg.as_matrix(effect, where)
            if dim is None:
                dim = e.shape[0]
            if e.shape != (dim, dim):
                raise DimensionError(f"effect shape {e.shape}, expected {(dim, dim)}", where)
            if not linalg.is_hermitian(e):
                raise ValidationError("effect is not Hermitian", where)
            if not linalg.is_positive_semidefinite(e, POVM_TOL):
                raise ValidationError("effect is not positive semidefinite", where)
            checked.append((outcome, _frozen(e)))
        total = sum(e for _, e in checked)
        resid = float(np.max(np.abs(total - np.eye(dim))))
        if resid > POVM_TOL:
            raise ValidationError(f"effects sum to identity only within {resid:.3e}", name)
        object.__setattr__(self, "effects", tuple(checked))

    @classmethod
    def two_outcome(cls, plus, minus, label: str = "") -> "Povm":
        return cls(((1, plus), (-1, minus)), label)

    @property
    def dim(self) -> int:
        return self.effects[0][1].shape[0]

    @property
    def labels(self) -> tuple:
        return tuple(o for o, _ in self.effects)

    def effect(self, outcome: int) -> np.ndarray:
        for o, e in self.effects:
            if o == outcome:
                return e
        raise KeyError(outcome)

    @property
    def is_dichotomic(self) -> bool:
        return sorted(self.labels) == [-1, 1]


@dataclass(frozen=True, eq=False)
class MotherPovm:
    """A POVM together with two partitions of its effect indices."""

    povm: Povm
    partition_a: tuple
    partition_b: tuple

    def __post_init__(self):
        n = len(self.povm.effects)
        for name in ("partition_a", "partition_b"):
            cells = tuple(tuple(sorted(int(k) for k in cell)) for cell in getattr(self, name))
            flat = [k for cell in cells for k in cell]
            if any(len(cell) == 0 for cell in cells):
                raise ValidationError("partition has an empty cell", name)
            if sorted(flat) != list(range(n)):
                raise ValidationError(
                    f"cells must be disjoint and cover effect indices 0..{n - 1}", name
                )
            object.__setattr__(self, name, cells)


@dataclass(frozen=True, eq=False)
class DifferenceOperator:
    """``A_{+1} - A_{-1}`` for a two-outcome POVM."""

    matrix: np.ndarray
    source: Povm = field(repr=False)


Observable = Union[DichotomicObservable, Povm]


def bloch_observable(n: Sequence[float], label: str = "") -> DichotomicObservable:
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or not np.all(np.isfinite(n)):
        raise ValidationError("Bloch vector must have three finite components", label or "bloch")
    norm = float(np.linalg.norm(n))
    if abs(norm - 1.0) > 1e-9:
        raise ValidationError(f"Bloch vector is not unit length (norm {norm:.12g})", label or "bloch")
    m = n[0] * linalg.SIGMA_X + n[1] * linalg.SIGMA_Y + n[2] * linalg.SIGMA_Z
    return DichotomicObservable(m, label)


def singlet_state() -> QuantumState:
    """(|01> - |10>)/sqrt(2)."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1 / np.sqrt(2)
    v[2] = -1 / np.sqrt(2)
    return QuantumState.pure(v)


def basis_state(index: int, dim: int) -> QuantumState:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return QuantumState.pure(v)


def sharp_to_povm(obs: DichotomicObservable | np.ndarray) -> Povm:
    """Spectral projectors of a dichotomic observable, labelled +1 and -1."""
    if not isinstance(obs, DichotomicObservable):
        obs = DichotomicObservable(obs)
    lam, vecs = linalg.hermitian_eigensystem(obs.matrix)
    plus = vecs[:, lam > 0]
    minus = vecs[:, lam <= 0]
    p_plus = plus @ plus.conj().T
    p_minus = minus @ minus.conj().T
    return Povm.two_outcome(p_plus, p_minus, obs.label)


def _require_two_outcome(p: Povm) -> None:
    if not isinstance(p, Povm):
        raise ValidationError(f"expected a Povm, got {type(p).__name__}")
    if len(p.effects) != 2 or not p.is_dichotomic:
        raise ValidationError(
            f"need exactly two effects labelled +1 and -1, got labels {list(p.labels)}",
            p.label or "povm",
        )


def difference_operator(p: Povm) -> DifferenceOperator:
    _require_two_outcome(p)
    d = p.effect(1) - p.effect(-1)
    norm = linalg.operator_norm(d)
    if norm > 1 + 1e-9:
        raise NumericalError(f"difference operator has norm {norm:.12g} > 1")
    return DifferenceOperator(_frozen(d), p)


def observable_operator(obs: Observable) -> np.ndarray:
    """The single Hermitian operator that yields expectation values of ``obs``."""
    if isinstance(obs, DichotomicObservable):
        return obs.matrix
    return difference_operator(obs).matrix


def observable_effects(obs: Observable) -> tuple:
    """``(E_plus, E_minus)`` for a sharp observable or a two-outcome POVM."""
    p = sharp_to_povm(obs) if isinstance(obs, DichotomicObservable) else obs
    _require_two_outcome(p)
    return p.effect(1), p.effect(-1)


class NormIdentity(NamedTuple):
    lhs: float
    rhs: float
    inner_product: float


def verify_norm_identity(p: Povm, psi) -> NormIdentity:
    """Evaluate both sides of ``||(A+ - A-)psi||^2 = 1 - 4 <A+ psi|A- psi>``.

    ``lhs`` is the squared norm computed directly; ``rhs`` uses
    ``<psi|A+|psi> - <psi|A+^2|psi>`` for the inner product.  The inner
    product ``<A+ psi|A- psi>`` itself is checked to be real and
    non-negative within 1e-10.
    """
    _require_two_outcome(p)
    if isinstance(psi, QuantumState):
        if psi.kind != "pure":
            raise ValidationError("norm identity needs a pure state")
        v = psi.vector
    else:
        v = linalg.as_vector(psi, "psi")
    if v.size != p.dim:
        raise DimensionError(f"state dim {v.size} vs POVM dim {p.dim}")
    a_plus, a_minus = p.effect(1), p.effect(-1)
    lhs = float(np.linalg.norm((a_plus - a_minus) @ v) ** 2)
    rhs = float(1 - 4 * (np.vdot(v, a_plus @ v) - np.vdot(v, a_plus @ (a_plus @ v))).real)
    inner = complex(np.vdot(a_plus @ v, a_minus @ v))
    if abs(inner.imag) > 1e-10:
        raise NumericalError(f"<A+psi|A-psi> has imaginary part {inner.imag:.3e}")
    if inner.real < -1e-10:
        raise NumericalError(f"<A+psi|A-psi> = {inner.real:.3e} is negative")
    return NormIdentity(lhs, rhs, inner.real)


def _cell_labels(n_cells: int) -> list:
    if n_cells == 2:
        return [1, -1]
    if n_cells == 1:
        return [1]
    return list(range(n_cells))


def coarse_grain(m: MotherPovm) -> tuple[Povm, Povm]:
    """Marginal POVMs obtained by summing the mother effects over each partition.

    Two-cell partitions are labelled +1/-1 (first cell +1); other sizes get
    positional labels.
    """
    out = []
    for name, cells in (("a", m.partition_a), ("b", m.partition_b)):
        labels = _cell_labels(len(cells))
        effects = tuple(
            (lab, sum(m.povm.effects[k][1] for k in cell)) for lab, cell in zip(labels, cells)
        )
        out.append(Povm(effects, f"{m.povm.label or 'mother'}.{name}"))
    return out[0], out[1]


def _wing_operators(obs) -> list:
    if isinstance(obs, DichotomicObservable):
        return [obs.matrix]
    if isinstance(obs, Povm):
        return [e for _, e in obs.effects]
    return [linalg.as_matrix(obs)]


def wings_commute(povms_a: Sequence, povms_b: Sequence, tol: float = COMMUTE_TOL) -> tuple[bool, float]:
    """Check every cross-wing pair of effects commutes.

    Accepts POVMs, dichotomic observables, or bare matrices on each side.
    """
    ops_a = [e for p in povms_a for e in _wing_operators(p)]
    ops_b = [e for p in povms_b for e in _wing_operators(p)]
    worst = 0.0
    for a in ops_a:
        for b in ops_b:
            if a.shape != b.shape:
                raise DimensionError(f"wing operators have shapes {a.shape} and {b.shape}")
            worst = max(worst, float(np.max(np.abs(a @ b - b @ a))))
    return worst <= tol, worst
