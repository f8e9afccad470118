"""Finitely supported matrix-weighted measures.

An :class:`AtomicMeasure` is a finite list of (point, m x m weight) atoms and
is the common currency of the package: empirical samples, cross-covariance
measures built from multivariate data, and projective state measures built
from quantum density matrices all land here before being embedded.

File ingestion (CSV sample tables, JSON density-matrix lists) lives here too
so the CLI and service share one set of validated parsers.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, DimensionMismatch, EmptySample, InvalidDimension
from .kernels import Points
from .matalg import hermitian_eig, require_hermitian


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AtomicMeasure:
    """A finitely supported measure: sum_i delta_{x_i} c_i.

    ``weights`` has shape (n_atoms, m, m); atom i carries the matrix weight
    ``weights[i]`` at ``points.single(i)``.
    """

    points: Points
    weights: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.weights, dtype=np.complex128)
        if W.ndim != 3 or W.shape[1] != W.shape[2]:
            raise DimensionMismatch(f"weights must have shape (n, m, m), got {W.shape}")
        if W.shape[0] != len(self.points):
            raise DimensionMismatch(
                f"{len(self.points)} points but {W.shape[0]} weights"
            )
        if W.size and not np.all(np.isfinite(W.view(np.float64))):
            raise ValueError("atom weights must be finite")
        object.__setattr__(self, "weights", _readonly(W))

    @property
    def m(self) -> int:
        return self.weights.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.weights.shape[0]

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        if self.m != other.m:
            raise DimensionMismatch(f"weight dims differ: {self.m} vs {other.m}")
        return AtomicMeasure(
            Points.concat([self.points, other.points]),
            np.concatenate([self.weights, other.weights], axis=0),
        )

    def merged(self) -> "AtomicMeasure":
        """Merge atoms at bit-identical points (weights added) and drop atoms
        whose merged weight is exactly zero. First-occurrence order is kept."""
        index: dict[bytes, int] = {}
        order: list[int] = []
        sums: list[np.ndarray] = []
        keys = self.points.keys()
        for i, key in enumerate(keys):
            j = index.get(key)
            if j is None:
                index[key] = len(sums)
                order.append(i)
                sums.append(self.weights[i].copy())
            else:
                sums[j] += self.weights[i]
        keep = [t for t, w in enumerate(sums) if np.any(w != 0)]
        if not keep:
            return AtomicMeasure(
                Points.empty(self.points.kind, self.points.dim),
                np.zeros((0, self.m, self.m)),
            )
        pts = self.points.take([order[t] for t in keep])
        return AtomicMeasure(pts, np.stack([sums[t] for t in keep]))


def dirac(x: Points, m: int) -> AtomicMeasure:
    """Dirac measure at ``x`` with identity weight."""
    if len(x) != 1:
        raise DimensionMismatch(f"dirac needs a single point, got {len(x)}")
    if m < 1:
        raise InvalidDimension(f"matrix dimension must be >= 1, got {m}")
    return AtomicMeasure(x, np.eye(m, dtype=np.complex128)[None, :, :])


def scale_measure(mu: AtomicMeasure, c: np.ndarray) -> AtomicMeasure:
    """Right-multiply every atom weight by ``c`` (the measure mu * c)."""
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (mu.m, mu.m):
        raise DimensionMismatch(f"scale matrix must be {mu.m}x{mu.m}, got {c.shape}")
    return AtomicMeasure(mu.points, mu.weights @ c)


def empirical_measure(samples: np.ndarray, m: int | None = None) -> AtomicMeasure:
    """Plain empirical measure: one atom per row with weight I/n."""
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n == 0:
        raise EmptySample("empirical measure needs at least one sample row")
    m = 1 if m is None else m
    W = np.broadcast_to(np.eye(m, dtype=np.complex128) / n, (n, m, m)).copy()
    return AtomicMeasure(Points.real(X), W)


def cross_covariance_measure(samples: np.ndarray, centered: bool = False) -> AtomicMeasure:
    """Plug-in cross-covariance measure of an (n, m) sample table.

    The uncentered measure places, for each sample t and variable pair
    (i, j), an atom at the pair point (x_t[i], x_t[j]) with weight e_ij / n
    (the (i, j) matrix unit). The centered variant subtracts the product
    measure: for every (t, s, i, j) an atom at (x_t[i], x_s[j]) with weight
    -e_ij / n^2. Atoms at bit-identical points are merged.
    """
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"samples must be a 2-d table, got shape {X.shape}")
    n, m = X.shape
    if n == 0:
        raise EmptySample("cross-covariance measure needs at least one sample row")
    if not np.all(np.isfinite(X)):
        raise ValueError("samples must be finite")

    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()  # m^2 variable pairs

    # joint part: points (x_t[i], x_t[j]), weights e_ij / n
    first = X[:, ii].reshape(-1)
    second = X[:, jj].reshape(-1)
    k = n * m * m
    W = np.zeros((k, m, m), dtype=np.complex128)
    rows = np.arange(k)
    W[rows, np.tile(ii, n), np.tile(jj, n)] = 1.0 / n
    mu = AtomicMeasure(Points.pairs(first[:, None], second[:, None]), W)

    if centered:
        # product part: points (x_t[i], x_s[j]), weights -e_ij / n^2
        t_idx, s_idx = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        t_idx, s_idx = t_idx.ravel(), s_idx.ravel()
        firstc = X[t_idx][:, ii].reshape(-1)
        secondc = X[s_idx][:, jj].reshape(-1)
        kc = n * n * m * m
        Wc = np.zeros((kc, m, m), dtype=np.complex128)
        rows = np.arange(kc)
        Wc[rows, np.tile(ii, n * n), np.tile(jj, n * n)] = -1.0 / (n * n)
        mu = mu + AtomicMeasure(Points.pairs(firstc[:, None], secondc[:, None]), Wc)

    return mu.merged()


# ---------------------------------------------------------------------------
# Quantum states

PSD_STATE_TOL = 1e-9
TRACE_TOL = 1e-10
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """A PSD, unit-trace Hermitian matrix describing a quantum state."""

    matrix: np.ndarray

    def __post_init__(self):
        M = require_hermitian(self.matrix)
        vals, _ = hermitian_eig(M)
        top = float(np.max(np.abs(vals))) if vals.size else 0.0
        if vals.size and float(vals[-1]) < -PSD_STATE_TOL * max(top, 1.0):
            raise ValueError(
                f"density matrix has negative eigenvalue {float(vals[-1]):.3e}"
            )
        tr = float(np.trace(M).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix must have unit trace, got {tr!r}")
        object.__setattr__(self, "matrix", _readonly(M))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, vec: np.ndarray) -> "DensityMatrix":
        v = np.asarray(vec, dtype=np.complex128).reshape(-1)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("cannot build a state from the zero vector")
        v = v / nrm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, m: int) -> "DensityMatrix":
        if m < 1:
            raise InvalidDimension(f"dimension must be >= 1, got {m}")
        return cls(np.eye(m, dtype=np.complex128) / m)


@dataclass(frozen=True)
class MeasurementBasis:
    """An orthonormal basis of C^m; ``vectors[i]`` is the i-th basis vector."""

    vectors: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=np.complex128)
        if V.ndim != 2 or V.shape[0] != V.shape[1]:
            raise DimensionMismatch(
                f"a basis of C^m needs m vectors of dim m, got shape {V.shape}"
            )
        G = V.conj() @ V.T
        if np.abs(G - np.eye(V.shape[0])).max() > ORTHO_TOL:
            raise ValueError("basis vectors are not orthonormal")
        object.__setattr__(self, "vectors", _readonly(V))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def computational(cls, m: int) -> "MeasurementBasis":
        if m < 1:
            raise InvalidDimension(f"dimension must be >= 1, got {m}")
        return cls(np.eye(m, dtype=np.complex128))

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "MeasurementBasis":
        """Haar-ish random orthonormal basis (QR of a complex Gaussian)."""
        if m < 1:
            raise InvalidDimension(f"dimension must be >= 1, got {m}")
        A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        Q, R = np.linalg.qr(A)
        Q = Q * (np.diag(R) / np.abs(np.diag(R)))[None, :]
        return cls(Q.T)


def povm_state_measure(basis: MeasurementBasis, rho: DensityMatrix) -> AtomicMeasure:
    """Projective measurement-outcome measure of a state.

    Atom i sits at the basis vector |psi_i> and carries the weight
    |psi_i><psi_i| rho.
    """
    if basis.dim != rho.dim:
        raise DimensionMismatch(
            f"basis dim {basis.dim} does not match state dim {rho.dim}"
        )
    V = basis.vectors
    projectors = V[:, :, None] * V.conj()[:, None, :]  # (m, m, m): |psi_i><psi_i|
    weights = projectors @ rho.matrix
    return AtomicMeasure(Points("complex", V), weights)


def projective_state_measure(vectors: np.ndarray, rho: DensityMatrix) -> AtomicMeasure:
    """Like :func:`povm_state_measure` for an arbitrary family of unit vectors.

    The family need not be orthonormal (e.g. an overcomplete tomography set);
    atom i is (|v_i>, |v_i><v_i| rho).
    """
    V = np.asarray(vectors, dtype=np.complex128)
    if V.ndim != 2 or V.shape[1] != rho.dim:
        raise DimensionMismatch(
            f"vectors must have shape (k, {rho.dim}), got {V.shape}"
        )
    norms = np.linalg.norm(V, axis=1)
    if np.abs(norms - 1.0).max() > 1e-8:
        raise ValueError("state-measure vectors must be unit norm")
    projectors = V[:, :, None] * V.conj()[:, None, :]
    weights = projectors @ rho.matrix
    return AtomicMeasure(Points("complex", V), weights)


def two_qubit_product_states() -> np.ndarray:
    """The 16 two-qubit product states used by the anomaly pipeline.

    Single-qubit alphabet: |h>, |v>, and the two balanced superpositions with
    relative phases exp(2*pi*i/3) and exp(4*pi*i/3); the 16 states are all
    tensor products of two alphabet letters. Returns shape (16, 4).
    """
    h = np.array([1.0, 0.0], dtype=np.complex128)
    v = np.array([0.0, 1.0], dtype=np.complex128)
    w1 = (h + np.exp(2j * np.pi / 3) * v) / np.sqrt(2)
    w2 = (h + np.exp(4j * np.pi / 3) * v) / np.sqrt(2)
    alphabet = [h, v, w1, w2]
    return np.stack([np.kron(a, b) for a in alphabet for b in alphabet])


# ---------------------------------------------------------------------------
# File ingestion


def parse_samples_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Parse a CSV sample table: header row of variable names, float rows.

    Returns (variable names, (n, m) array). Raises :class:`DataError` with a
    row location on malformed input.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("CSV file is empty") from None
    names = [h.strip() for h in header]
    if not names or any(not n for n in names):
        raise DataError("CSV header must name every column", where="row 1")
    m = len(names)
    rows: list[list[float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # ignore blank lines
        if len(row) != m:
            raise DataError(
                f"expected {m} columns, found {len(row)}", where=f"row {lineno}"
            )
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                val = float(cell)
            except ValueError:
                raise DataError(
                    f"cannot parse {cell!r} as a number",
                    where=f"row {lineno}, column {col}",
                ) from None
            if not np.isfinite(val):
                raise DataError(
                    f"non-finite value {cell!r}", where=f"row {lineno}, column {col}"
                )
            parsed.append(val)
        rows.append(parsed)
    if not rows:
        raise DataError("CSV file holds no data rows")
    return names, np.array(rows, dtype=np.float64)


def load_samples_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return parse_samples_csv(text)


def _complex_entry(cell, where: str) -> complex:
    if (
        not isinstance(cell, (list, tuple))
        or len(cell) != 2
        or not all(isinstance(x, (int, float)) for x in cell)
    ):
        raise DataError("matrix entries must be [re, im] pairs", where=where)
    val = complex(cell[0], cell[1])
    if not (np.isfinite(val.real) and np.isfinite(val.imag)):
        raise DataError("non-finite matrix entry", where=where)
    return val


def parse_state_matrix(obj, where: str) -> np.ndarray:
    """Parse one row-major [re, im] matrix from decoded JSON."""
    if not isinstance(obj, list) or not obj:
        raise DataError("each state must be a non-empty list of rows", where=where)
    m = len(obj)
    M = np.zeros((m, m), dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != m:
            raise DataError(
                f"state must be square ({m}x{m})", where=f"{where}, row {i + 1}"
            )
        for j, cell in enumerate(row):
            M[i, j] = _complex_entry(cell, f"{where}, row {i + 1}, column {j + 1}")
    return M


def parse_density_matrices(obj) -> list[DensityMatrix]:
    """Validate a decoded JSON list of states into density matrices."""
    if not isinstance(obj, list):
        raise DataError("state file must hold a JSON list of matrices")
    if not obj:
        raise DataError("state file holds no states")
    out = []
    for idx, mat in enumerate(obj):
        where = f"state {idx + 1}"
        M = parse_state_matrix(mat, where)
        try:
            out.append(DensityMatrix(M))
        except (ValueError, DimensionMismatch) as exc:
            raise DataError(str(exc), where=where) from exc
    return out


def load_density_matrices_json(path: str | Path) -> list[DensityMatrix]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON in {path}: {exc}") from exc
    return parse_density_matrices(obj)


def density_matrix_to_json(rho: DensityMatrix | np.ndarray) -> list:
    """Serialize a matrix to the row-major [re, im] JSON schema."""
    M = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]
