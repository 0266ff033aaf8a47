"""Concrete operator spaces ``X = span(B_1, ..., B_k)`` inside ``M_d`` and
elements of ``M_n(X)`` stored as coefficient grids of shape ``(n, n, k)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ShapeMismatch, SpaceMismatch
from .linalg import (as_matrix, complex_from_json, complex_to_json, matrix_from_json,
                     matrix_to_json, operator_norm, random_complex)
from .radius import DEFAULT_TOL, EPS, NormEstimate, numerical_radius, zero_estimate

INDEPENDENCE_THRESHOLD = 1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ConcreteOperatorSpace:
    """A k-dimensional subspace of ``M_d`` given by a basis of shape ``(k, d, d)``."""

    basis: np.ndarray
    name: str = ""

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=np.complex128)
        if B.ndim == 2:
            B = B[None]
        if B.ndim != 3 or B.shape[0] < 1 or B.shape[1] != B.shape[2] or B.shape[1] < 1:
            raise ShapeMismatch(f"basis must have shape (k, d, d) with k >= 1, got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise ValueError("basis entries must be finite")
        k, d, _ = B.shape
        if k > d * d:
            raise ValueError(f"{k} basis elements cannot be independent in M_{d}")
        smin = np.linalg.svd(B.reshape(k, d * d), compute_uv=False)[-1]
        if smin <= INDEPENDENCE_THRESHOLD:
            raise ValueError(f"basis is not linearly independent (smallest singular value {smin:.3e})")
        object.__setattr__(self, "basis", _readonly(B))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    def same_as(self, other: "ConcreteOperatorSpace") -> bool:
        return self is other or (self.basis.shape == other.basis.shape
                                 and np.array_equal(self.basis, other.basis))

    def dagger(self) -> "ConcreteOperatorSpace":
        """The space ``X^dagger = {x^* : x in X}`` with basis ``B_m^*``."""
        return ConcreteOperatorSpace(self.basis.conj().transpose(0, 2, 1),
                                     f"{self.name}^dagger" if self.name else "")

    def to_json(self) -> dict:
        return {"ambient_dim": self.ambient_dim,
                "basis": [matrix_to_json(b) for b in self.basis]}

    @classmethod
    def from_json(cls, obj, field: str = "space") -> "ConcreteOperatorSpace":
        if not isinstance(obj, dict) or "ambient_dim" not in obj or "basis" not in obj:
            raise FormatError(f"{field}: expected an object with ambient_dim and basis", field)
        d = obj["ambient_dim"]
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise FormatError(f"{field}.ambient_dim: must be a positive integer", f"{field}.ambient_dim")
        basis = obj["basis"]
        if not isinstance(basis, list) or not basis:
            raise FormatError(f"{field}.basis: must be a non-empty list of matrices", f"{field}.basis")
        mats = []
        for i, m in enumerate(basis):
            M = matrix_from_json(m, f"{field}.basis[{i}]")
            if M.shape != (d, d):
                raise FormatError(f"{field}.basis[{i}]: shape {M.shape} does not match ambient_dim {d}",
                                  f"{field}.basis[{i}]")
            mats.append(M)
        try:
            return cls(np.stack(mats))
        except ValueError as exc:
            raise FormatError(f"{field}.basis: {exc}", f"{field}.basis") from exc


def scalar_space() -> ConcreteOperatorSpace:
    """The one-dimensional space ``C = M_1``."""
    return ConcreteOperatorSpace(np.ones((1, 1, 1)), "C")


def full_matrix_space(d: int) -> ConcreteOperatorSpace:
    """``M_d`` with its matrix-unit basis ``E_ij`` (row-major)."""
    return ConcreteOperatorSpace(np.eye(d * d).reshape(d * d, d, d), f"M_{d}")


def random_space(d: int, k: int, rng: np.random.Generator) -> ConcreteOperatorSpace:
    """A random k-dimensional subspace of ``M_d`` with a Gaussian basis."""
    return ConcreteOperatorSpace(random_complex((k, d, d), rng), f"random({k} in M_{d})")


@dataclass(frozen=True, eq=False)
class MatrixOverX:
    """An element of ``M_{p,q}(X)``: ``coeffs[i, j, m]`` is the m-th coordinate of entry (i, j)."""

    coeffs: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.coeffs, dtype=np.complex128)
        if C.ndim != 3 or min(C.shape) < 1:
            raise ShapeMismatch(f"coefficient grid must have shape (p, q, k), got {C.shape}")
        if not np.all(np.isfinite(C)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", _readonly(C))

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[:2]

    @property
    def level(self) -> int:
        p, q = self.shape
        if p != q:
            raise ShapeMismatch(f"rectangular element {p}x{q} has no level")
        return p

    @property
    def k(self) -> int:
        return self.coeffs.shape[2]

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __add__(self, other: "MatrixOverX") -> "MatrixOverX":
        if self.coeffs.shape != other.coeffs.shape:
            raise ShapeMismatch(f"cannot add grids {self.coeffs.shape} and {other.coeffs.shape}")
        return MatrixOverX(self.coeffs + other.coeffs)

    def __sub__(self, other: "MatrixOverX") -> "MatrixOverX":
        return self + (-1.0) * other

    def __mul__(self, c) -> "MatrixOverX":
        return MatrixOverX(complex(c) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> "MatrixOverX":
        return MatrixOverX(-self.coeffs)

    def to_json(self) -> dict:
        p, q = self.shape
        return {"level": p,
                "coeffs": [[[complex_to_json(z) for z in self.coeffs[i, j]] for j in range(q)]
                           for i in range(p)]}

    @classmethod
    def from_json(cls, obj, k: int | None = None, field: str = "element") -> "MatrixOverX":
        if not isinstance(obj, dict) or "coeffs" not in obj:
            raise FormatError(f"{field}: expected an object with level and coeffs", field)
        C = grid_from_json(obj["coeffs"], k, f"{field}.coeffs")
        if "level" in obj:
            n = obj["level"]
            if not isinstance(n, int) or isinstance(n, bool) or C.shape[:2] != (n, n):
                raise FormatError(f"{field}.level: grid shape {C.shape[:2]} does not match level {n!r}",
                                  f"{field}.level")
        return cls(C)


def grid_from_json(rows, k: int | None, field: str) -> np.ndarray:
    """Parse a p x q grid of length-k coefficient vectors."""
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) and r for r in rows):
        raise FormatError(f"{field}: expected a non-empty grid of coefficient vectors", field)
    q = len(rows[0])
    out = []
    for i, row in enumerate(rows):
        if len(row) != q:
            raise FormatError(f"{field}[{i}]: row has {len(row)} entries, expected {q}", f"{field}[{i}]")
        vecs = []
        for j, vec in enumerate(row):
            f = f"{field}[{i}][{j}]"
            if not isinstance(vec, list):
                raise FormatError(f"{f}: expected a coefficient vector", f)
            if k is not None and len(vec) != k:
                raise FormatError(f"{f}: has {len(vec)} coefficients, space dimension is {k}", f)
            vecs.append([complex_from_json(z, f"{f}[{m}]") for m, z in enumerate(vec)])
        out.append(vecs)
    lens = {len(v) for row in out for v in row}
    if len(lens) != 1 or 0 in lens:
        raise FormatError(f"{field}: coefficient vectors have inconsistent lengths {sorted(lens)}", field)
    return np.array(out, dtype=np.complex128)


def _check_member(space: ConcreteOperatorSpace, x: MatrixOverX) -> None:
    if x.k != space.dim:
        raise ShapeMismatch(f"element has {x.k} coefficients per entry, space has dimension {space.dim}")


def from_coeffs(coeffs) -> MatrixOverX:
    return MatrixOverX(np.asarray(coeffs, dtype=np.complex128))


def scalar_element(alpha) -> MatrixOverX:
    """``alpha in M_n(C)`` as an element over the scalar space."""
    a = as_matrix(alpha, "alpha")
    return MatrixOverX(a[:, :, None])


def zero_element(n: int, k: int) -> MatrixOverX:
    return MatrixOverX(np.zeros((n, n, k), dtype=np.complex128))


def random_element(space: ConcreteOperatorSpace, n: int, rng: np.random.Generator,
                   dist: str = "gaussian", normalize: bool = False) -> MatrixOverX:
    C = random_complex((n, n, space.dim), rng, dist)
    if normalize:
        C = C / np.linalg.norm(C)
    return MatrixOverX(C)


def realize(space: ConcreteOperatorSpace, x: MatrixOverX) -> np.ndarray:
    """The ``pd x qd`` matrix with (i, j) block ``sum_m coeffs[i, j, m] B_m``."""
    _check_member(space, x)
    p, q = x.shape
    d = space.ambient_dim
    return np.einsum("ijm,mab->iajb", x.coeffs, space.basis).reshape(p * d, q * d)


def o_norm(space: ConcreteOperatorSpace, x: MatrixOverX) -> NormEstimate:
    """Operator norm of the realization."""
    R = realize(space, x)
    if not np.any(R):
        return zero_estimate()
    v = operator_norm(R)
    pad = 8.0 * max(R.shape) * EPS * float(np.linalg.norm(R))
    return NormEstimate(v, max(v - pad, 0.0), v + pad, "operator norm of realization (LAPACK), rounding pad")


def w_norm(space: ConcreteOperatorSpace, x: MatrixOverX, tol: float = DEFAULT_TOL) -> NormEstimate:
    """Amplified numerical radius ``w_n`` of the realization."""
    return numerical_radius(realize(space, x), tol)


def scalar_compress(alpha, x: MatrixOverX, beta) -> MatrixOverX:
    """``alpha x beta`` computed on coefficient vectors."""
    a = as_matrix(alpha, "alpha")
    b = as_matrix(beta, "beta")
    p, q = x.shape
    if a.shape[1] != p or b.shape[0] != q:
        raise ShapeMismatch(f"cannot form alpha{a.shape} x{x.shape} beta{b.shape}")
    return MatrixOverX(np.einsum("ik,klm,lj->ijm", a, x.coeffs, b))


def direct_sum(x: MatrixOverX, y: MatrixOverX) -> MatrixOverX:
    """Block-diagonal ``diag(x, y)`` at level ``m + n``."""
    if x.k != y.k:
        raise SpaceMismatch(f"direct sum of elements over spaces of dimension {x.k} and {y.k}")
    m, n = x.level, y.level
    C = np.zeros((m + n, m + n, x.k), dtype=np.complex128)
    C[:m, :m] = x.coeffs
    C[m:, m:] = y.coeffs
    return MatrixOverX(C)


def off_corner(x: MatrixOverX) -> MatrixOverX:
    """``[[0, x], [0, 0]]`` at level ``2n``."""
    n = x.level
    C = np.zeros((2 * n, 2 * n, x.k), dtype=np.complex128)
    C[:n, n:] = x.coeffs
    return MatrixOverX(C)

