"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex128 arrays; :func:`as_matrix` is the
single validation gate (2-D, finite).  The Hermitian eigensolver is a cyclic
Jacobi iteration with an explicit off-diagonal residual.  The operator norm
goes through LAPACK (``eigvalsh`` of ``A*A``) because it sits inside every
optimizer loop.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FormatError, NoConvergence, NotHermitian, ShapeMismatch

HERMITIAN_DEFECT = 1e-12
JACOBI_TOL = 1e-13
JACOBI_SWEEPS = 100


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array (always a fresh copy)."""
    M = np.array(A, dtype=np.complex128, copy=True)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ShapeMismatch(f"{name}: expected a non-empty 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name}: entries must be finite")
    return M


def _require_square(A: np.ndarray, name: str = "matrix") -> None:
    if A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"{name}: expected a square matrix, got shape {A.shape}")


def dagger(A) -> np.ndarray:
    return as_matrix(A).conj().T


@dataclass(frozen=True)
class HermitianSpectrum:
    eigenvalues: np.ndarray  # ascending
    residual: float  # off-diagonal Frobenius defect relative to ||A||_F
    sweeps: int = 0

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be a nondecreasing 1-D sequence")
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")


def symmetrize(A, defect: float = HERMITIAN_DEFECT) -> np.ndarray:
    """Return (A + A*)/2, or raise NotHermitian if A is not Hermitian within ``defect``."""
    A = as_matrix(A)
    _require_square(A)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return A
    if np.linalg.norm(A - A.conj().T) > defect * scale:
        raise NotHermitian(f"relative Hermitian defect exceeds {defect:g}")
    return 0.5 * (A + A.conj().T)


def _offdiag_norm(A: np.ndarray) -> float:
    # computed on the off-diagonal entries directly; subtracting the diagonal
    # from the full Frobenius norm cancels catastrophically near convergence
    mask = ~np.eye(A.shape[0], dtype=bool)
    return float(np.linalg.norm(A[mask]))


def jacobi_eigenvalues(A, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_SWEEPS) -> HermitianSpectrum:
    """Cyclic complex Jacobi on a Hermitian matrix.

    Each (p, q) rotation first removes the phase of ``a_pq`` with a diagonal
    unitary, then applies the real symmetric rotation.  Sweeps stop once the
    off-diagonal Frobenius norm is below ``tol * ||A||_F``.
    """
    A = symmetrize(A)
    n = A.shape[0]
    scale = np.linalg.norm(A)
    if scale == 0.0 or n == 1:
        return HermitianSpectrum(np.sort(np.real(np.diag(A))), 0.0, 0)
    thresh = tol * scale
    sweeps = 0
    off = _offdiag_norm(A)
    while off > thresh:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (residual {off / scale:.3e})")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                absb = abs(b)
                if absb <= thresh * 1e-3 / n:
                    continue
                phase = b / absb
                app, aqq = A[p, p].real, A[q, q].real
                tau = (aqq - app) / (2.0 * absb)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                G = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
        off = _offdiag_norm(A)
    return HermitianSpectrum(np.sort(np.real(np.diag(A))), off / scale, sweeps)


def hermitian_eigenvalues(A, tol: float = JACOBI_TOL, method: str = "jacobi") -> HermitianSpectrum:
    """Ascending eigenvalues of a Hermitian matrix.

    ``method="lapack"`` uses ``numpy.linalg.eigvalsh`` and reports the
    residual of a Rayleigh-Ritz check instead of the Jacobi defect.
    """
    if method == "jacobi":
        return jacobi_eigenvalues(A, tol=tol)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    H = symmetrize(A)
    try:
        vals, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    scale = np.linalg.norm(H) or 1.0
    res = np.linalg.norm(vecs.conj().T @ H @ vecs - np.diag(vals)) / scale
    return HermitianSpectrum(vals, float(res), 0)


def lambda_max(H: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix (no validation, LAPACK)."""
    try:
        return float(np.linalg.eigvalsh(H)[-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc


def operator_norm(A) -> float:
    """Largest singular value, as sqrt of lambda_max(A*A) on the smaller side."""
    A = np.asarray(A, dtype=np.complex128)
    if A.size == 0:
        return 0.0
    if A.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got shape {A.shape}")
    if A.shape[0] < A.shape[1]:
        M = A @ A.conj().T
    else:
        M = A.conj().T @ A
    return math.sqrt(max(lambda_max(M), 0.0))


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def assemble_block(blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    """Assemble an n x n grid of d x d blocks into one nd x nd matrix."""
    n = len(blocks)
    if n == 0 or any(len(row) != n for row in blocks):
        raise ShapeMismatch("blocks must form a non-empty square grid")
    mats = [[as_matrix(b, f"block[{i}][{j}]") for j, b in enumerate(row)] for i, row in enumerate(blocks)]
    d = mats[0][0].shape
    if d[0] != d[1]:
        raise ShapeMismatch("blocks must be square")
    for i, row in enumerate(mats):
        for j, b in enumerate(row):
            if b.shape != d:
                raise ShapeMismatch(f"block[{i}][{j}] has shape {b.shape}, expected {d}")
    return np.block(mats)


def block_diag(*mats) -> np.ndarray:
    mats = [as_matrix(m) for m in mats]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_complex(shape, rng: np.random.Generator, dist: str = "gaussian") -> np.ndarray:
    """I.i.d. complex samples with unit expected modulus squared."""
    if dist == "gaussian":
        return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / math.sqrt(2.0)
    if dist == "cauchy":
        return rng.standard_cauchy(size=shape) + 1j * rng.standard_cauchy(size=shape)
    raise ValueError(f"unknown distribution {dist!r}")


# -- JSON matrix format: {"rows": n, "cols": m, "data": [[re, im], ...]} ----

def complex_to_json(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_json(v, field: str = "value") -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if not (isinstance(v, (list, tuple)) and len(v) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        raise FormatError(f"{field}: complex scalar must be a [re, im] pair, got {v!r}", field)
    z = complex(v[0], v[1])
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise FormatError(f"{field}: entries must be finite", field)
    return z


def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"rows": A.shape[0], "cols": A.shape[1],
            "data": [complex_to_json(z) for z in A.reshape(-1)]}


def matrix_from_json(obj, field: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise FormatError(f"{field}: expected an object with rows/cols/data", field)
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise FormatError(f"{field}: missing key {key!r}", f"{field}.{key}")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    for key, v in (("rows", rows), ("cols", cols)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise FormatError(f"{field}.{key}: must be a positive integer", f"{field}.{key}")
    if not isinstance(data, list) or len(data) != rows * cols:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise FormatError(f"{field}.data: expected {rows * cols} entries, got {got}", f"{field}.data")
    vals = [complex_from_json(v, f"{field}.data[{i}]") for i, v in enumerate(data)]
    return np.array(vals, dtype=np.complex128).reshape(rows, cols)
