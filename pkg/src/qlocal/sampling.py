"""Random states, observables and POVMs for fuzzing.

All generators take a ``numpy.random.Generator`` so callers control seeding.
"""

from __future__ import annotations

import numpy as np

from .quantum import DichotomicObservable, MotherPovm, Povm, QuantumState, bloch_observable


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = ginibre(rng, dim)
    return (g + g.conj().T) / 2


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, dim))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unit_vector(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure_state(rng: np.random.Generator, dim: int) -> QuantumState:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return QuantumState.pure(v / np.linalg.norm(v))


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> QuantumState:
    rank = dim if rank is None else rank
    g = ginibre(rng, dim, rank)
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return QuantumState.mixed(rho / np.trace(rho).real)


def random_state(rng: np.random.Generator, dim: int) -> QuantumState:
    if rng.random() < 0.5:
        return random_pure_state(rng, dim)
    return random_density(rng, dim, rank=int(rng.integers(1, dim + 1)))


def random_bloch_observable(rng: np.random.Generator) -> DichotomicObservable:
    return bloch_observable(random_unit_vector(rng))


def random_dichotomic(rng: np.random.Generator, dim: int) -> DichotomicObservable:
    """``U diag(+-1) U^dagger`` with random signs (at least one of each when dim > 1)."""
    signs = rng.choice([-1.0, 1.0], size=dim)
    if dim > 1 and abs(signs.sum()) == dim:
        signs[int(rng.integers(dim))] *= -1
    u = random_unitary(rng, dim)
    m = (u * signs) @ u.conj().T
    return DichotomicObservable((m + m.conj().T) / 2)


def random_two_outcome_povm(rng: np.random.Generator, dim: int) -> Povm:
    """``A+ = G^dagger G / (||G^dagger G|| + eps)``, ``A- = 1 - A+``, eps in [0.1, 1]."""
    g = ginibre(rng, dim)
    gram = g.conj().T @ g
    gram = (gram + gram.conj().T) / 2
    eps = rng.uniform(0.1, 1.0)
    a_plus = gram / (np.linalg.norm(gram, 2) + eps)
    return Povm.two_outcome(a_plus, np.eye(dim) - a_plus)


def random_wing_observable(rng: np.random.Generator, dim: int):
    if rng.random() < 0.5:
        return random_dichotomic(rng, dim)
    return random_two_outcome_povm(rng, dim)


def random_povm(rng: np.random.Generator, dim: int, n_effects: int) -> Povm:
    """Random ``n_effects``-outcome POVM: ``S^{-1/2} G_k S^{-1/2}`` with ``S = sum G_k``."""
    grams = []
    for _ in range(n_effects):
        g = ginibre(rng, dim)
        grams.append(g.conj().T @ g)
    total = sum(grams)
    lam, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(lam)) @ v.conj().T
    effects = []
    for k, gk in enumerate(grams):
        e = inv_sqrt @ gk @ inv_sqrt
        effects.append((k, (e + e.conj().T) / 2))
    # absorb the residual of the identity sum into the last effect
    resid = np.eye(dim) - sum(e for _, e in effects)
    effects[-1] = (effects[-1][0], effects[-1][1] + resid)
    return Povm(tuple(effects))


def random_mother_povm(rng: np.random.Generator, dim: int, n_effects: int = 4) -> MotherPovm:
    povm = random_povm(rng, dim, n_effects)
    return MotherPovm(povm, _random_bipartition(rng, n_effects), _random_bipartition(rng, n_effects))


def _random_bipartition(rng: np.random.Generator, n: int) -> tuple:
    perm = [int(k) for k in rng.permutation(n)]
    cut = int(rng.integers(1, n))
    return (tuple(perm[:cut]), tuple(perm[cut:]))


def _lift(obs, lift):
    if isinstance(obs, DichotomicObservable):
        return DichotomicObservable(lift(obs.matrix), obs.label)
    return Povm(tuple((lab, lift(e)) for lab, e in obs.effects), obs.label)


def random_scenario(rng: np.random.Generator, min_dim: int = 2, max_dim: int = 4,
                    embedding: str = "tensor", sharp_only: bool = False):
    """Random commuting-wing scenario: per-wing dims in ``[min_dim, max_dim]``.

    ``embedding="joint"`` presents the same tensor-lifted operators on the
    undivided space, so the wings still commute.
    """
    from .correlations import Scenario

    da, db = (int(d) for d in rng.integers(min_dim, max_dim + 1, size=2))
    make = random_dichotomic if sharp_only else random_wing_observable
    alice = (make(rng, da), make(rng, da))
    bob = (make(rng, db), make(rng, db))
    s = Scenario(random_state(rng, da * db), alice, bob)
    if embedding == "tensor":
        return s
    return Scenario(
        s.state,
        tuple(_lift(o, s.lift_alice) for o in alice),
        tuple(_lift(o, s.lift_bob) for o in bob),
        "joint",
    )
