"""Dense complex linear algebra for small unitary operators.

Everything here is a pure function of its inputs; randomness enters only
through an explicit seed or generator, so values are safe to share across
concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

TWO_PI = 2.0 * np.pi

#: Default tolerance for unitarity and residual checks, configurable per call.
DEFAULT_TOL = 1e-9


def as_complex_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D complex128 array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    return m


def as_state(v, dim: int | None = None) -> np.ndarray:
    """Coerce input to a 1-D complex128 state vector of unit norm.

    Raises if the norm deviates from 1 by more than 1e-8 or, when ``dim`` is
    given, if the length does not match.
    """
    s = np.asarray(v, dtype=np.complex128).ravel()
    if dim is not None and s.size != dim:
        raise ValueError(f"state has dimension {s.size}, expected {dim}")
    norm = np.linalg.norm(s)
    if not np.isfinite(norm) or abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state is not normalized (norm {norm!r})")
    return s / norm


def normalize_state(v) -> np.ndarray:
    """Scale a nonzero vector to unit Euclidean norm."""
    s = np.asarray(v, dtype=np.complex128).ravel()
    norm = np.linalg.norm(s)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return s / norm


def matmul(a, b) -> np.ndarray:
    """Dense matrix product with an explicit dimension check."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_complex_matrix(a).conj().T


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``m`` is square and max-entry |m†m - I| <= tol."""
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"is_unitary requires a square matrix, got {m.shape}")
    gram = m.conj().T @ m
    return bool(np.abs(gram - np.eye(m.shape[0])).max() <= tol)


def operator_norm(a) -> float:
    """Largest singular value; for a normal matrix this is the spectral radius."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"operator_norm requires a square matrix, got {a.shape}")
    return float(np.linalg.norm(a, ord=2))


@dataclass(frozen=True)
class UnitarySpectrum:
    """Eigenphases of a unitary matrix, sorted ascending in [0, 2*pi).

    ``eigenvectors`` holds an orthonormal eigenbasis, column i matching
    ``phases[i]``; ``max_residual`` certifies max_i ||U v_i - e^{i c_i} v_i||.
    """

    phases: np.ndarray
    eigenvectors: np.ndarray
    max_residual: float


def eigenphases(u, tol: float = DEFAULT_TOL) -> UnitarySpectrum:
    """Full eigendecomposition of a unitary matrix as phases on [0, 2*pi).

    A unitary matrix is normal, so its complex Schur form is diagonal up to
    roundoff and the Schur basis is an orthonormal eigenbasis. Computed
    eigenvalues are projected radially onto the unit circle before the phase
    is read off; degenerate eigenvalues stay as repeated phases.

    Raises ``ValueError`` for non-unitary input and ``RuntimeError`` if the
    residual certificate exceeds 100 * tol.
    """
    u = as_complex_matrix(u)
    if not is_unitary(u, tol):
        raise ValueError("eigenphases requires a unitary matrix")
    t, z = scipy.linalg.schur(u, output="complex")
    eigvals = np.diag(t)
    eigvals = eigvals / np.abs(eigvals)
    phases = np.mod(np.angle(eigvals), TWO_PI)
    # 2*pi - eps can round up to 2*pi exactly; fold it back to 0.
    phases[phases >= TWO_PI] = 0.0
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vectors = z[:, order]
    residuals = np.linalg.norm(u @ vectors - vectors * np.exp(1j * phases), axis=0)
    max_residual = float(residuals.max())
    if max_residual > 100.0 * tol:
        raise RuntimeError(
            f"eigensolver residual {max_residual:.3e} exceeds {100.0 * tol:.3e}"
        )
    return UnitarySpectrum(phases=phases, eigenvectors=vectors, max_residual=max_residual)


def unitary_eigenvalues(u) -> np.ndarray:
    """Eigenvalues of a unitary matrix projected onto the unit circle, unsorted.

    Cheaper than :func:`eigenphases` (no eigenvectors, no certificates); meant
    for bulk numeric work where the caller already trusts its input.
    """
    z = np.linalg.eigvals(as_complex_matrix(u))
    return z / np.abs(z)


def haar_random_unitary(n: int, rng_seed=None) -> np.ndarray:
    """Draw an n x n unitary from the Haar distribution.

    QR-orthonormalize a matrix of iid standard complex Gaussians, then fix
    each column's phase so the triangular factor has a real positive
    diagonal; without the phase fix the draw is unitary but not Haar.
    ``rng_seed`` may be an int seed or a ``numpy.random.Generator``.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    rng = np.random.default_rng(rng_seed)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_random_state(n: int, rng_seed=None) -> np.ndarray:
    """Uniformly random unit vector in C^n."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    rng = np.random.default_rng(rng_seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return normalize_state(v)
