"""Kernel mean embeddings and module-valued inner products.

An :class:`RKHMVector` is a finite combination sum_i phi(x_i) c_i in the
Hilbert module induced by a matrix-valued kernel. Embedding an atomic measure
is exact (the defining integral collapses to the finite sum over atoms), and
every analysis downstream -- inner products, norms, Gram matrices, principal
components -- is computed purely from kernel evaluations between stored
atoms. No explicit feature coordinates exist or are needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, KernelMismatch
from .kernels import MatrixKernel, Points
from .matalg import PSD_TOL, hermitian_part, operator_norm, psd_sqrt
from .measures import AtomicMeasure, dirac


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RKHMVector:
    """A finite combination sum_i phi(x_i) c_i in the module of ``kernel``."""

    kernel: MatrixKernel
    points: Points
    coeffs: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.coeffs, dtype=np.complex128)
        m = self.kernel.m
        if C.ndim != 3 or C.shape[1:] != (m, m):
            raise DimensionMismatch(f"coefficients must be (n, {m}, {m}), got {C.shape}")
        if C.shape[0] != len(self.points):
            raise DimensionMismatch(
                f"{len(self.points)} points but {C.shape[0]} coefficients"
            )
        if len(self.points):
            self.kernel.validate_points(self.points)
        object.__setattr__(self, "coeffs", _readonly(C))

    @property
    def m(self) -> int:
        return self.kernel.m

    def __add__(self, other: "RKHMVector") -> "RKHMVector":
        if self.kernel != other.kernel:
            raise KernelMismatch("cannot add vectors over different kernels")
        if len(other.points) == 0:
            return self
        if len(self.points) == 0:
            return other
        return RKHMVector(
            self.kernel,
            Points.concat([self.points, other.points]),
            np.concatenate([self.coeffs, other.coeffs], axis=0),
        )

    def __neg__(self) -> "RKHMVector":
        return RKHMVector(self.kernel, self.points, -self.coeffs)

    def __sub__(self, other: "RKHMVector") -> "RKHMVector":
        return self + (-other)

    def scaled(self, c: np.ndarray) -> "RKHMVector":
        """Right multiplication u * c (every coefficient right-multiplied)."""
        c = np.asarray(c, dtype=np.complex128)
        if c.shape != (self.m, self.m):
            raise DimensionMismatch(f"scale matrix must be {self.m}x{self.m}, got {c.shape}")
        return RKHMVector(self.kernel, self.points, self.coeffs @ c)


def embed(kernel: MatrixKernel, mu: AtomicMeasure) -> RKHMVector:
    """Kernel mean embedding of an atomic measure (atoms become terms)."""
    if mu.m != kernel.m:
        raise DimensionMismatch(
            f"measure weight dim {mu.m} does not match kernel dim {kernel.m}"
        )
    return RKHMVector(kernel, mu.points, mu.weights)


def inner_product(u: RKHMVector, v: RKHMVector) -> np.ndarray:
    """Module-valued inner product <u, v> = sum_ij ci* k(xi, yj) dj."""
    if u.kernel != v.kernel:
        raise KernelMismatch("inner product needs both vectors over one kernel")
    m = u.m
    if len(u.points) == 0 or len(v.points) == 0:
        return np.zeros((m, m), dtype=np.complex128)
    return u.kernel.quad_form(u.points, u.coeffs, v.points, v.coeffs)


def absolute_value(u: RKHMVector, tol_psd: float = PSD_TOL) -> np.ndarray:
    """|u| = the PSD square root of <u, u>."""
    return psd_sqrt(hermitian_part(inner_product(u, u)), tol_psd=tol_psd)


def norm(u: RKHMVector) -> float:
    """Module norm: the operator norm of |u|."""
    return operator_norm(absolute_value(u))


def evaluate(u: RKHMVector, x: Points) -> np.ndarray:
    """Pointwise value u(x) = sum_i k(x, x_i) c_i (reproducing property)."""
    if len(x) != 1:
        raise DimensionMismatch(f"evaluate needs a single point, got {len(x)}")
    u.kernel.validate_points(x)
    m = u.m
    if len(u.points) == 0:
        return np.zeros((m, m), dtype=np.complex128)
    ident = np.eye(m, dtype=np.complex128)[None, :, :]
    return u.kernel.quad_form(x, ident, u.points, u.coeffs)


def embed_dirac(kernel: MatrixKernel, x: Points) -> RKHMVector:
    """Embedding of the Dirac measure at x, i.e. the feature vector phi(x)."""
    return embed(kernel, dirac(x, kernel.m))


def gram_blocks(kernel: MatrixKernel, measures: Sequence[AtomicMeasure]) -> np.ndarray:
    """Hermitian (mn x mn) block Gram matrix of embedded measures.

    Block (i, j) is <Phi(mu_i), Phi(mu_j)>; only the upper triangle is
    computed and the result is symmetrized exactly.
    """
    n = len(measures)
    if n == 0:
        raise DimensionMismatch("gram_blocks needs at least one measure")
    vecs = [embed(kernel, mu) for mu in measures]
    m = kernel.m
    G = np.zeros((n * m, n * m), dtype=np.complex128)
    for i in range(n):
        for j in range(i, n):
            B = inner_product(vecs[i], vecs[j])
            G[i * m : (i + 1) * m, j * m : (j + 1) * m] = B
            if j > i:
                G[j * m : (j + 1) * m, i * m : (i + 1) * m] = B.conj().T
    return hermitian_part(G)
