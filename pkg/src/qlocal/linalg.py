"""Dense complex linear algebra for small Hilbert spaces.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
Every public function validates its inputs through :func:`as_matrix` /
:func:`as_vector`, which reject non-finite entries and anything larger
than :data:`MAX_DIM`.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericalError, ValidationError

MAX_DIM = 64

TOL_HERM = 1e-9
TOL_ORTH = 1e-9
TOL_EIG = 1e-9

JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_matrix(m, name="matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {a.shape}", name)
    rows, cols = a.shape
    if rows < 1 or cols < 1:
        raise DimensionError(f"empty matrix of shape {a.shape}", name)
    if rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionError(f"shape {a.shape} exceeds the {MAX_DIM}x{MAX_DIM} cap", name)
    if not np.all(np.isfinite(a)):
        raise ValidationError("entries must be finite", name)
    return a


def as_vector(v, name="vector") -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1 or a.size < 1:
        raise DimensionError(f"expected a non-empty 1-d array, got shape {a.shape}", name)
    if a.size > MAX_DIM:
        raise DimensionError(f"dimension {a.size} exceeds the cap {MAX_DIM}", name)
    if not np.all(np.isfinite(a)):
        raise ValidationError("entries must be finite", name)
    return a


def _require_square(a: np.ndarray, name: str) -> None:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}", name)


def matmul(m1, m2) -> np.ndarray:
    a = as_matrix(m1, "m1")
    b = as_matrix(m2, "m2")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def kron(m1, m2) -> np.ndarray:
    a = as_matrix(m1, "m1")
    b = as_matrix(m2, "m2")
    shape = (a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    if max(shape) > MAX_DIM:
        raise DimensionError(
            f"kron of {a.shape} and {b.shape} gives {shape}, above the cap {MAX_DIM}"
        )
    return np.kron(a, b)


def commutator(m1, m2) -> np.ndarray:
    a = as_matrix(m1, "m1")
    b = as_matrix(m2, "m2")
    _require_square(a, "m1")
    _require_square(b, "m2")
    if a.shape != b.shape:
        raise DimensionError(f"commutator of shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def hermitian_asymmetry(m) -> float:
    """Max-entry norm of ``m - m^dagger``."""
    a = as_matrix(m)
    _require_square(a, "matrix")
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(m, tol: float = TOL_HERM) -> bool:
    return hermitian_asymmetry(m) <= tol


def _require_hermitian(a: np.ndarray, name: str = "matrix") -> None:
    _require_square(a, name)
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > TOL_HERM:
        raise ValidationError(f"not Hermitian: max asymmetry {asym:.3e} > {TOL_HERM:g}", name)


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi sweeps; returns (diagonal, accumulated unitary)."""
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    threshold = JACOBI_OFF_TOL * scale
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(a[off_mask]))
        if off <= threshold:
            return a.diagonal().real.copy(), v
        for p, q in pairs:
            apq = a[p, q]
            r = abs(apq)
            if r < 1e-300:
                continue
            phase = apq / r
            # a[p,p], a[q,q] are real up to round-off
            tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
            t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # unitary block: phase-rotate column q to make a[p,q] real, then real rotation
            rot = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
            idx = [p, q]
            a[:, idx] = a[:, idx] @ rot
            a[idx, :] = rot.conj().T @ a[idx, :]
            a[p, q] = a[q, p] = 0.0
            a[p, p] = a[p, p].real
            a[q, q] = a[q, q].real
            v[:, idx] = v[:, idx] @ rot
    raise NumericalError(f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps")


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : ndarray, orthonormal columns matching ``eigenvalues``

    Raises
    ------
    ValidationError
        If ``m`` is not Hermitian within :data:`TOL_HERM`.
    NumericalError
        If the sweeps do not converge or post-checks fail.
    """
    a = as_matrix(m)
    _require_hermitian(a)
    work = 0.5 * (a + a.conj().T)
    lam, vecs = _jacobi(work)
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    vecs = vecs[:, order]

    n = a.shape[0]
    orth = float(np.max(np.abs(vecs.conj().T @ vecs - np.eye(n))))
    if orth > TOL_ORTH:
        raise NumericalError(f"eigenvectors lost orthonormality ({orth:.3e})")
    recon = float(np.max(np.abs((vecs * lam) @ vecs.conj().T - a)))
    if recon > TOL_EIG * max(1.0, float(np.max(np.abs(a)))):
        raise NumericalError(f"eigen-reconstruction residual {recon:.3e}")
    return lam, vecs


def eigvalsh(m) -> np.ndarray:
    return hermitian_eigensystem(m)[0]


def is_positive_semidefinite(m, tol: float = 1e-9) -> bool:
    return bool(eigvalsh(m)[0] >= -tol)


def operator_norm(m) -> float:
    """Largest singular value, from the spectrum of ``m^dagger m``."""
    a = as_matrix(m)
    _require_square(a, "matrix")
    gram = a.conj().T @ a
    lam_max = eigvalsh(gram)[-1]
    return float(np.sqrt(max(lam_max, 0.0)))


def max_abs(m) -> float:
    return float(np.max(np.abs(np.asarray(m))))
