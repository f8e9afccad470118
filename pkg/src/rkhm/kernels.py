"""Matrix-valued positive definite kernels and their evaluation points.

The catalog covers four kernel constructions mapping pairs of points to
m x m complex matrices:

* ``DiagonalScalar`` -- diagonal matrix whose (i, i) entry is a scalar kernel
  evaluated on the full points.
* ``Elementwise`` -- points are m-tuples; entry (i, j) is a scalar kernel on
  the i-th component of x and the j-th component of y.
* ``QuantumProjective`` -- points are vectors a, b in C^m; the value is the
  projector product (a a*)(b b*).
* ``ProductScalarTimesIdentity`` -- points are pairs (x1, x2); the value is
  k1(x1, y1) * k2(x2, y2) times the identity.

Every kernel exposes a single evaluation (``eval_one``), a vectorized pair
table (``eval_table``) and the vectorized quadratic form
``sum_ij Ci* k(xi, yj) Dj`` (``quad_form``) that drives all embedding
inner products.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import ConfigError, DimensionMismatch, PointKindMismatch
from .matalg import hermitian_part, hermitian_eig

PointKind = Literal["real", "complex", "pair"]
ScalarFamily = Literal["gaussian", "laplacian", "inverse_multiquadric"]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Points:
    """A batch of kernel evaluation points, all of one kind.

    Shapes by kind: ``real`` -> (n, d) float; ``complex`` -> (n, d) complex;
    ``pair`` -> (n, 2, d) float, a pair of d-vectors per point.
    """

    kind: PointKind
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if self.kind == "real":
            data = data.astype(np.float64, copy=False)
            if data.ndim == 1:
                data = data[:, None]
            if data.ndim != 2:
                raise DimensionMismatch(f"real points need shape (n, d), got {data.shape}")
        elif self.kind == "complex":
            data = data.astype(np.complex128, copy=False)
            if data.ndim != 2:
                raise DimensionMismatch(f"complex points need shape (n, d), got {data.shape}")
        elif self.kind == "pair":
            data = data.astype(np.float64, copy=False)
            if data.ndim != 3 or data.shape[1] != 2:
                raise DimensionMismatch(f"pair points need shape (n, 2, d), got {data.shape}")
        else:
            raise PointKindMismatch(f"unknown point kind {self.kind!r}")
        if data.size and not np.all(np.isfinite(data.view(np.float64))):
            raise ValueError("points must be finite")
        object.__setattr__(self, "data", _readonly(data))

    @classmethod
    def real(cls, arr) -> "Points":
        return cls("real", np.atleast_2d(np.asarray(arr, dtype=np.float64)))

    @classmethod
    def cvec(cls, arr) -> "Points":
        return cls("complex", np.atleast_2d(np.asarray(arr, dtype=np.complex128)))

    @classmethod
    def pairs(cls, first, second) -> "Points":
        a = np.atleast_2d(np.asarray(first, dtype=np.float64))
        b = np.atleast_2d(np.asarray(second, dtype=np.float64))
        if a.shape != b.shape:
            raise DimensionMismatch(f"pair halves differ in shape: {a.shape} vs {b.shape}")
        return cls("pair", np.stack([a, b], axis=1))

    @classmethod
    def empty(cls, kind: PointKind, dim: int) -> "Points":
        if kind == "pair":
            return cls(kind, np.zeros((0, 2, dim)))
        if kind == "complex":
            return cls(kind, np.zeros((0, dim), dtype=np.complex128))
        return cls(kind, np.zeros((0, dim)))

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[-1]

    def take(self, idx) -> "Points":
        return Points(self.kind, self.data[np.asarray(idx)])

    def single(self, i: int) -> "Points":
        return Points(self.kind, self.data[i : i + 1])

    def flat(self) -> np.ndarray:
        """2-d view (n, total_dim) used by scalar kernels; pairs concatenate."""
        if self.kind == "pair":
            return self.data.reshape(len(self), 2 * self.dim)
        return self.data

    def keys(self) -> list[bytes]:
        """Bit-exact identity keys, one per point (for atom merging)."""
        return [self.data[i].tobytes() for i in range(len(self))]

    @staticmethod
    def concat(parts: Sequence["Points"]) -> "Points":
        if not parts:
            raise ValueError("cannot concatenate zero point batches")
        kind = parts[0].kind
        if any(p.kind != kind for p in parts):
            raise PointKindMismatch("cannot concatenate points of different kinds")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise DimensionMismatch(f"cannot concatenate points of dims {sorted(dims)}")
        return Points(kind, np.concatenate([p.data for p in parts], axis=0))


@dataclass(frozen=True)
class ScalarKernel:
    """Scalar positive definite kernel on real or complex vectors.

    gaussian: exp(-gamma ||x - y||^2); laplacian: exp(-gamma ||x - y||_1)
    (componentwise modulus); inverse_multiquadric: (c^2 + ||x - y||^2)^(-beta).
    """

    family: ScalarFamily
    gamma: float = 1.0
    c: float = 1.0
    beta: float = 0.5

    def __post_init__(self):
        if self.family in ("gaussian", "laplacian"):
            if not self.gamma > 0:
                raise ConfigError(f"{self.family} kernel needs gamma > 0, got {self.gamma}")
        elif self.family == "inverse_multiquadric":
            if not (self.c > 0 and self.beta > 0):
                raise ConfigError(
                    f"inverse_multiquadric needs c > 0 and beta > 0, got c={self.c}, beta={self.beta}"
                )
        else:
            raise ConfigError(f"unknown scalar kernel family {self.family!r}")

    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """All-pairs kernel values: X (n, d), Y (l, d) -> (n, l) float."""
        X = np.atleast_2d(np.asarray(X))
        Y = np.atleast_2d(np.asarray(Y))
        if X.shape[1] != Y.shape[1]:
            raise DimensionMismatch(f"point dims differ: {X.shape[1]} vs {Y.shape[1]}")
        diff = X[:, None, :] - Y[None, :, :]
        if self.family == "laplacian":
            dist = np.abs(diff).sum(axis=-1)
            return np.exp(-self.gamma * dist)
        sq = (np.abs(diff) ** 2).sum(axis=-1)
        if self.family == "gaussian":
            return np.exp(-self.gamma * sq)
        return (self.c**2 + sq) ** (-self.beta)

    def __call__(self, x, y) -> float:
        return float(self.pairwise(np.atleast_2d(x), np.atleast_2d(y))[0, 0])


class MatrixKernel(ABC):
    """An A-valued positive definite kernel, A = C^{m x m}."""

    #: point kinds this kernel accepts
    kinds: tuple[PointKind, ...] = ()

    @property
    @abstractmethod
    def m(self) -> int:
        """Output matrix dimension."""

    def validate_points(self, pts: Points) -> None:
        if pts.kind not in self.kinds:
            raise PointKindMismatch(
                f"{type(self).__name__} accepts {self.kinds} points, got {pts.kind!r}"
            )

    @abstractmethod
    def eval_table(self, px: Points, py: Points) -> np.ndarray:
        """All-pairs kernel values, shape (len(px), len(py), m, m)."""

    def eval_one(self, x: Points, y: Points) -> np.ndarray:
        if len(x) != 1 or len(y) != 1:
            raise DimensionMismatch("eval_one expects single points")
        return self.eval_table(x, y)[0, 0]

    @abstractmethod
    def quad_form(self, px: Points, C: np.ndarray, py: Points, D: np.ndarray) -> np.ndarray:
        """sum_ij Ci* k(xi, yj) Dj with coefficient stacks C (n,m,m), D (l,m,m)."""

    def _check_quad(self, px: Points, C: np.ndarray, py: Points, D: np.ndarray) -> None:
        self.validate_points(px)
        self.validate_points(py)
        m = self.m
        if C.shape != (len(px), m, m) or D.shape != (len(py), m, m):
            raise DimensionMismatch(
                f"coefficient stacks must be (n, {m}, {m}); got {C.shape} and {D.shape}"
            )


@dataclass(frozen=True)
class DiagonalScalar(MatrixKernel):
    """diag(k1(x,y), ..., km(x,y)) for m scalar kernels."""

    kernels: tuple[ScalarKernel, ...]

    kinds = ("real", "pair", "complex")

    def __post_init__(self):
        if not self.kernels:
            raise ConfigError("DiagonalScalar needs at least one scalar kernel")
        object.__setattr__(self, "kernels", tuple(self.kernels))

    @classmethod
    def uniform(cls, kernel: ScalarKernel, m: int) -> "DiagonalScalar":
        if m < 1:
            raise ConfigError(f"matrix dimension must be >= 1, got {m}")
        return cls((kernel,) * m)

    @property
    def m(self) -> int:
        return len(self.kernels)

    @property
    def is_uniform(self) -> bool:
        return all(k == self.kernels[0] for k in self.kernels)

    def eval_table(self, px: Points, py: Points) -> np.ndarray:
        self.validate_points(px)
        self.validate_points(py)
        m = self.m
        out = np.zeros((len(px), len(py), m, m), dtype=np.complex128)
        Xf, Yf = px.flat(), py.flat()
        if self.is_uniform:
            K = self.kernels[0].pairwise(Xf, Yf)
            for p in range(m):
                out[:, :, p, p] = K
        else:
            for p, kern in enumerate(self.kernels):
                out[:, :, p, p] = kern.pairwise(Xf, Yf)
        return out

    def quad_form(self, px: Points, C: np.ndarray, py: Points, D: np.ndarray) -> np.ndarray:
        self._check_quad(px, C, py, D)
        m = self.m
        if len(px) == 0 or len(py) == 0:
            return np.zeros((m, m), dtype=np.complex128)
        Xf, Yf = px.flat(), py.flat()
        if self.is_uniform:
            K = self.kernels[0].pairwise(Xf, Yf)
            return np.einsum("ij,ipa,jpb->ab", K, C.conj(), D, optimize=True)
        out = np.zeros((m, m), dtype=np.complex128)
        for p, kern in enumerate(self.kernels):
            K = kern.pairwise(Xf, Yf)
            out += np.einsum("ij,ia,jb->ab", K, C[:, p, :].conj(), D[:, p, :], optimize=True)
        return out


@dataclass(frozen=True)
class Elementwise(MatrixKernel):
    """[k(x, y)]_{ij} = scalar(x_i, y_j) on m-tuples x, y."""

    kernel: ScalarKernel
    m_dim: int

    kinds = ("real", "complex")

    def __post_init__(self):
        if self.m_dim < 1:
            raise ConfigError(f"matrix dimension must be >= 1, got {self.m_dim}")

    @property
    def m(self) -> int:
        return self.m_dim

    def validate_points(self, pts: Points) -> None:
        super().validate_points(pts)
        if pts.dim != self.m_dim:
            raise DimensionMismatch(
                f"Elementwise kernel of dimension {self.m_dim} got {pts.dim}-tuples"
            )

    def _component_table(self, px: Points, py: Points) -> np.ndarray:
        # (n, m, l, m): scalar kernel between every component pair.
        n, l, m = len(px), len(py), self.m_dim
        KK = self.kernel.pairwise(
            px.data.reshape(n * m, 1), py.data.reshape(l * m, 1)
        )
        return KK.reshape(n, m, l, m)

    def eval_table(self, px: Points, py: Points) -> np.ndarray:
        self.validate_points(px)
        self.validate_points(py)
        return self._component_table(px, py).transpose(0, 2, 1, 3).astype(np.complex128)

    def quad_form(self, px: Points, C: np.ndarray, py: Points, D: np.ndarray) -> np.ndarray:
        self._check_quad(px, C, py, D)
        if len(px) == 0 or len(py) == 0:
            return np.zeros((self.m, self.m), dtype=np.complex128)
        KK = self._component_table(px, py)
        return np.einsum("ipjq,ipa,jqb->ab", KK, C.conj(), D, optimize=True)


@dataclass(frozen=True)
class QuantumProjective(MatrixKernel):
    """k(a, b) = (a a*)(b b*) = <a, b> a b* on vectors in C^m."""

    m_dim: int

    kinds = ("complex",)

    def __post_init__(self):
        if self.m_dim < 1:
            raise ConfigError(f"matrix dimension must be >= 1, got {self.m_dim}")

    @property
    def m(self) -> int:
        return self.m_dim

    def validate_points(self, pts: Points) -> None:
        super().validate_points(pts)
        if pts.dim != self.m_dim:
            raise DimensionMismatch(
                f"QuantumProjective kernel of dimension {self.m_dim} got {pts.dim}-vectors"
            )

    def eval_table(self, px: Points, py: Points) -> np.ndarray:
        self.validate_points(px)
        self.validate_points(py)
        X, Y = px.data, py.data
        S = X.conj() @ Y.T  # S[i, j] = <x_i, y_j>
        return np.einsum("ij,ia,jb->ijab", S, X, Y.conj())

    def quad_form(self, px: Points, C: np.ndarray, py: Points, D: np.ndarray) -> np.ndarray:
        self._check_quad(px, C, py, D)
        if len(px) == 0 or len(py) == 0:
            return np.zeros((self.m, self.m), dtype=np.complex128)
        X, Y = px.data, py.data
        S = X.conj() @ Y.T
        A = np.einsum("ipa,ip->ia", C.conj(), X)  # Ci* xi
        B = np.einsum("jq,jqb->jb", Y.conj(), D)  # yj* Dj
        return np.einsum("ij,ia,jb->ab", S, A, B, optimize=True)


@dataclass(frozen=True)
class ProductScalarTimesIdentity(MatrixKernel):
    """k((x1,x2),(y1,y2)) = k1(x1,y1) k2(x2,y2) I_m on pairs of vectors."""

    k1: ScalarKernel
    k2: ScalarKernel
    m_dim: int

    kinds = ("pair",)

    def __post_init__(self):
        if self.m_dim < 1:
            raise ConfigError(f"matrix dimension must be >= 1, got {self.m_dim}")

    @property
    def m(self) -> int:
        return self.m_dim

    def _scalar_table(self, px: Points, py: Points) -> np.ndarray:
        K1 = self.k1.pairwise(px.data[:, 0, :], py.data[:, 0, :])
        K2 = self.k2.pairwise(px.data[:, 1, :], py.data[:, 1, :])
        return K1 * K2

    def eval_table(self, px: Points, py: Points) -> np.ndarray:
        self.validate_points(px)
        self.validate_points(py)
        K = self._scalar_table(px, py)
        eye = np.eye(self.m, dtype=np.complex128)
        return K[:, :, None, None] * eye[None, None, :, :]

    def quad_form(self, px: Points, C: np.ndarray, py: Points, D: np.ndarray) -> np.ndarray:
        self._check_quad(px, C, py, D)
        if len(px) == 0 or len(py) == 0:
            return np.zeros((self.m, self.m), dtype=np.complex128)
        K = self._scalar_table(px, py)
        return np.einsum("ij,ipa,jpb->ab", K, C.conj(), D, optimize=True)


KernelSpec = MatrixKernel


def eval_kernel(spec: MatrixKernel, x: Points, y: Points) -> np.ndarray:
    """Evaluate k(x, y) for single points; Hermitian-symmetric in its args."""
    spec.validate_points(x)
    spec.validate_points(y)
    return spec.eval_one(x, y)


def check_positive_definite(
    spec: MatrixKernel,
    points: Points,
    coeffs: Sequence[np.ndarray],
    tol: float = 1e-9,
) -> bool:
    """Empirically check sum_ij ci* k(xi, xj) cj >= 0 at the given sites.

    Works with any object exposing ``m`` and ``eval_one``; the sum is
    assembled point by point from single kernel evaluations.
    """
    n = len(points)
    coeffs = [np.asarray(c, dtype=np.complex128) for c in coeffs]
    if n == 0 or len(coeffs) != n:
        raise DimensionMismatch(
            f"need one coefficient per point, got {len(coeffs)} for {n} points"
        )
    m = spec.m
    S = np.zeros((m, m), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            kij = spec.eval_one(points.single(i), points.single(j))
            S += coeffs[i].conj().T @ kij @ coeffs[j]
    S = hermitian_part(S)
    vals, _ = hermitian_eig(S)
    top = float(np.max(np.abs(vals))) if vals.size else 0.0
    return bool(vals[-1] >= -tol * top)


# ---------------------------------------------------------------------------
# JSON configuration


def scalar_kernel_from_config(cfg: dict) -> ScalarKernel:
    known = {"family", "gamma", "c", "beta"}
    extra = set(cfg) - known
    if extra:
        raise ConfigError(f"unknown scalar kernel fields: {sorted(extra)}")
    if "family" not in cfg:
        raise ConfigError("scalar kernel config needs a 'family'")
    return ScalarKernel(
        family=cfg["family"],
        gamma=float(cfg.get("gamma", 1.0)),
        c=float(cfg.get("c", 1.0)),
        beta=float(cfg.get("beta", 0.5)),
    )


def scalar_kernel_to_config(k: ScalarKernel) -> dict:
    out: dict = {"family": k.family}
    if k.family in ("gaussian", "laplacian"):
        out["gamma"] = k.gamma
    else:
        out["c"] = k.c
        out["beta"] = k.beta
    return out


def kernel_from_config(cfg: dict) -> MatrixKernel:
    """Build a kernel from its JSON description.

    Example configs::

        {"variant": "diagonal_scalar", "m": 3, "family": "gaussian", "gamma": 1.0}
        {"variant": "diagonal_scalar", "kernels": [{...}, {...}]}
        {"variant": "elementwise", "m": 4, "family": "gaussian", "gamma": 1.0}
        {"variant": "quantum_projective", "m": 4}
        {"variant": "product_scalar_identity", "m": 3, "k1": {...}, "k2": {...}}
    """
    if not isinstance(cfg, dict):
        raise ConfigError(f"kernel config must be an object, got {type(cfg).__name__}")
    variant = cfg.get("variant")
    try:
        if variant == "diagonal_scalar":
            if "kernels" in cfg:
                kerns = tuple(scalar_kernel_from_config(k) for k in cfg["kernels"])
                if "m" in cfg and int(cfg["m"]) != len(kerns):
                    raise ConfigError(
                        f"m={cfg['m']} disagrees with {len(kerns)} scalar kernels"
                    )
                return DiagonalScalar(kerns)
            base = {k: v for k, v in cfg.items() if k not in ("variant", "m")}
            return DiagonalScalar.uniform(scalar_kernel_from_config(base), int(cfg.get("m", 1)))
        if variant == "elementwise":
            base = {k: v for k, v in cfg.items() if k not in ("variant", "m")}
            return Elementwise(scalar_kernel_from_config(base), int(cfg["m"]))
        if variant == "quantum_projective":
            return QuantumProjective(int(cfg["m"]))
        if variant == "product_scalar_identity":
            return ProductScalarTimesIdentity(
                scalar_kernel_from_config(cfg["k1"]),
                scalar_kernel_from_config(cfg["k2"]),
                int(cfg["m"]),
            )
    except KeyError as exc:
        raise ConfigError(f"kernel config missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad kernel config: {exc}") from exc
    raise ConfigError(f"unknown kernel variant {variant!r}")


def kernel_to_config(spec: MatrixKernel) -> dict:
    if isinstance(spec, DiagonalScalar):
        if spec.is_uniform:
            return {
                "variant": "diagonal_scalar",
                "m": spec.m,
                **scalar_kernel_to_config(spec.kernels[0]),
            }
        return {
            "variant": "diagonal_scalar",
            "kernels": [scalar_kernel_to_config(k) for k in spec.kernels],
        }
    if isinstance(spec, Elementwise):
        return {"variant": "elementwise", "m": spec.m, **scalar_kernel_to_config(spec.kernel)}
    if isinstance(spec, QuantumProjective):
        return {"variant": "quantum_projective", "m": spec.m}
    if isinstance(spec, ProductScalarTimesIdentity):
        return {
            "variant": "product_scalar_identity",
            "m": spec.m,
            "k1": scalar_kernel_to_config(spec.k1),
            "k2": scalar_kernel_to_config(spec.k2),
        }
    raise ConfigError(f"cannot serialize kernel of type {type(spec).__name__}")
