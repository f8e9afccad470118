"""Dense complex matrix algebra.

Self-contained numerical substrate for the rest of the package: Hermitian
eigendecomposition via cyclic complex Jacobi rotations, PSD matrix square
roots, operator norms, and block (de)assembly. Matrices are plain
``numpy.ndarray`` values of dtype complex128; the helpers here validate the
contracts (finiteness, hermiticity, positive semi-definiteness) that the
higher-level modules rely on.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, IterationLimitExceeded, NotHermitian, NotPSD

# Hermitian drift beyond this (relative, operator norm) is rejected rather
# than silently symmetrized: it would hide bugs upstream.
HERMITIAN_DRIFT_TOL = 1e-8

# Relative threshold below which negative eigenvalues are treated as roundoff
# and clipped to zero in psd_sqrt.
PSD_TOL = 1e-9

# Jacobi sweep budget and relative off-diagonal Frobenius mass at convergence.
JACOBI_SWEEP_BUDGET = 100
JACOBI_CONV_TOL = 1e-13


class EigenDecomposition(NamedTuple):
    """Eigenvalues (real, descending) and matching orthonormal eigenvectors.

    ``eigenvectors[:, j]`` is the unit-norm eigenvector for ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(entries: object) -> np.ndarray:
    """Validate and normalize a 2-d complex matrix.

    Returns a fresh complex128 array. Raises ``DimensionMismatch`` for
    non-2-d input and ``ValueError`` for non-finite entries.
    """
    M = np.array(entries, dtype=np.complex128)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M.view(np.float64))):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return M


def hermitian_part(M: np.ndarray) -> np.ndarray:
    """(M + M*) / 2."""
    return (M + M.conj().T) / 2


def require_hermitian(M: object, drift_tol: float = HERMITIAN_DRIFT_TOL) -> np.ndarray:
    """Symmetrize ``M`` to (M + M*)/2, rejecting badly non-Hermitian input.

    Raises:
        NotHermitian: if the anti-Hermitian part exceeds ``drift_tol``
            relative to the operator norm of ``M``.
        DimensionMismatch: if ``M`` is not square.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"Hermitian matrix must be square, got {M.shape}")
    scale = operator_norm(M)
    if scale > 0:
        drift = operator_norm(M - M.conj().T)
        if drift > drift_tol * scale:
            raise NotHermitian(
                f"matrix is not Hermitian: relative drift {drift / scale:.3e} "
                f"exceeds {drift_tol:.1e}"
            )
    return hermitian_part(M)


def _jacobi_rotation(app: float, aqq: float, b: complex) -> np.ndarray:
    """2x2 unitary U with (U* A U) diagonal for A = [[app, b], [b*, aqq]]."""
    absb = abs(b)
    phase = b / absb
    tau = (aqq - app) / (2.0 * absb)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # Phase factor first maps the off-diagonal entry to |b|, then the real
    # Givens rotation annihilates it.
    return np.array(
        [[c, s], [-np.conj(phase) * s, np.conj(phase) * c]], dtype=np.complex128
    )


def _offdiag_frobenius_sq(H: np.ndarray) -> float:
    # Summing |entries|^2 and subtracting the diagonal would cancel
    # catastrophically near convergence; zero the diagonal instead.
    sq = np.abs(H) ** 2
    np.fill_diagonal(sq, 0.0)
    return float(np.sum(sq))


def hermitian_eig(
    H: object,
    sweep_budget: int = JACOBI_SWEEP_BUDGET,
    conv_tol: float = JACOBI_CONV_TOL,
) -> EigenDecomposition:
    """Eigendecompose a Hermitian matrix with cyclic complex Jacobi rotations.

    The input is symmetrized exactly to (H + H*)/2 before iteration. Sweeps
    run until the off-diagonal Frobenius mass drops below
    ``conv_tol * ||H||_F``.

    Raises:
        IterationLimitExceeded: no convergence within ``sweep_budget`` sweeps.
    """
    A = hermitian_part(as_matrix(H))
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"eigendecomposition needs a square matrix, got {A.shape}")
    V = np.eye(n, dtype=np.complex128)
    fnorm = float(np.linalg.norm(A))
    if n == 1 or fnorm == 0.0:
        vals = np.diag(A).real.copy()
        order = np.argsort(-vals, kind="stable")
        return EigenDecomposition(vals[order], V[:, order])

    threshold_sq = (conv_tol * fnorm) ** 2
    skip_sq = (1e-20 * fnorm) ** 2
    converged = _offdiag_frobenius_sq(A) <= threshold_sq
    for _ in range(sweep_budget):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                if (b.real * b.real + b.imag * b.imag) <= skip_sq:
                    continue
                U = _jacobi_rotation(A[p, p].real, A[q, q].real, b)
                pq = [p, q]
                A[:, pq] = A[:, pq] @ U
                A[pq, :] = U.conj().T @ A[pq, :]
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, pq] = V[:, pq] @ U
        converged = _offdiag_frobenius_sq(A) <= threshold_sq
    if not converged:
        raise IterationLimitExceeded(
            f"Jacobi eigensolver did not converge within {sweep_budget} sweeps "
            f"(dim {n})"
        )
    vals = np.diag(A).real.copy()
    order = np.argsort(-vals, kind="stable")
    return EigenDecomposition(vals[order], V[:, order])


def operator_norm(M: object) -> float:
    """Largest singular value of ``M`` (spectral norm)."""
    M = as_matrix(M)
    if M.size == 0:
        return 0.0
    # Largest eigenvalue of M*M is the squared top singular value.
    vals, _ = hermitian_eig(M.conj().T @ M)
    return float(np.sqrt(max(float(vals[0]), 0.0)))


def psd_sqrt(
    H: object,
    tol_psd: float = PSD_TOL,
    scale: float | None = None,
) -> np.ndarray:
    """Positive semi-definite square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-tol_psd * scale, 0)`` are treated as roundoff and
    clipped to zero. ``scale`` defaults to the operator norm of ``H``; callers
    working with residuals of larger quantities may pass the larger scale so
    cancellation noise is not misread as indefiniteness.

    Raises:
        NotPSD: if an eigenvalue is below ``-tol_psd * scale``.
    """
    A = require_hermitian(H)
    vals, vecs = hermitian_eig(A)
    top = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale is None:
        scale = top
    floor = -tol_psd * max(scale, 0.0)
    lowest = float(vals[-1]) if vals.size else 0.0
    if lowest < floor:
        raise NotPSD(
            f"matrix has eigenvalue {lowest:.6e} below tolerance {floor:.6e}; "
            "not positive semi-definite"
        )
    root = np.sqrt(np.clip(vals, 0.0, None))
    return hermitian_part((vecs * root) @ vecs.conj().T)


def trace(M: object) -> complex:
    """Matrix trace."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"trace needs a square matrix, got {M.shape}")
    return complex(np.trace(M))


def block_assemble(blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """Assemble an n x n grid of m x m matrices into one (mn x mn) matrix.

    Raises:
        DimensionMismatch: ragged grid or blocks of unequal dimension.
    """
    rows = [list(r) for r in blocks]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise DimensionMismatch("block grid must be square and non-empty")
    grid = [[as_matrix(b) for b in r] for r in rows]
    m = grid[0][0].shape[0]
    for r in grid:
        for b in r:
            if b.shape != (m, m):
                raise DimensionMismatch(
                    f"all blocks must be {m}x{m}, found {b.shape}"
                )
    out = np.empty((n * m, n * m), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i * m : (i + 1) * m, j * m : (j + 1) * m] = grid[i][j]
    return out


def block_extract(M: object, m: int) -> np.ndarray:
    """Inverse of :func:`block_assemble`.

    Returns an array of shape (n, n, m, m) with ``out[i, j]`` the (i, j)
    block; the round trip through ``block_assemble`` is bit-exact.
    """
    M = as_matrix(M)
    if m < 1:
        raise DimensionMismatch(f"block dimension must be >= 1, got {m}")
    if M.shape[0] != M.shape[1] or M.shape[0] % m != 0:
        raise DimensionMismatch(
            f"matrix of shape {M.shape} does not split into {m}x{m} blocks"
        )
    n = M.shape[0] // m
    return M.reshape(n, m, n, m).transpose(0, 2, 1, 3).copy()
