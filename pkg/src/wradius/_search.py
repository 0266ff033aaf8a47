"""Shared pieces of the factorization searches: configuration, Hermitian
parameter maps, seeded restarts and a Nelder-Mead driver."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import FormatError

# eigenvalue clamp for exp/logistic parameterizations; keeps conditioning near 1e10
LOG_CLAMP = 23.0


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 20
    iters: int = 500
    seed: int = 0
    tol: float = 1e-8

    def __post_init__(self):
        if not (isinstance(self.restarts, int) and self.restarts >= 1):
            raise ValueError("restarts must be a positive integer")
        if not (isinstance(self.iters, int) and self.iters >= 1):
            raise ValueError("iters must be a positive integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj, field: str = "config") -> "SearchConfig":
        if not isinstance(obj, dict):
            raise FormatError(f"{field}: expected an object", field)
        unknown = set(obj) - {"restarts", "iters", "seed", "tol"}
        if unknown:
            raise FormatError(f"{field}: unknown keys {sorted(unknown)}", field)
        try:
            return cls(**{k: (float(v) if k == "tol" else v) for k, v in obj.items()})
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{field}: {exc}", field) from exc


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per restart, so results do not depend on scheduling."""
    return np.random.default_rng([seed, index])


def herm_from_params(p: np.ndarray, n: int) -> np.ndarray:
    """n^2 real parameters -> n x n Hermitian matrix."""
    H = np.zeros((n, n), dtype=np.complex128)
    H[np.diag_indices(n)] = p[:n]
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    H[iu] = (p[n:n + m] + 1j * p[n + m:n + 2 * m]) / np.sqrt(2.0)
    H = H + np.triu(H, 1).conj().T
    return H


def params_from_herm(H: np.ndarray) -> np.ndarray:
    n = H.shape[0]
    iu = np.triu_indices(n, 1)
    off = H[iu] * np.sqrt(2.0)
    return np.concatenate([np.real(np.diag(H)), off.real, off.imag])


def herm_function(H: np.ndarray, fn) -> np.ndarray:
    """``fn`` applied to the (clamped) spectrum of a Hermitian matrix."""
    mu, V = np.linalg.eigh(H)
    mu = np.clip(mu, -LOG_CLAMP, LOG_CLAMP)
    return (V * fn(mu)) @ V.conj().T


def nelder_mead(fun, x0: np.ndarray, iters: int, step: float = 0.3, xatol: float = 1e-9,
                frtol: float = 1e-13):
    """Adaptive Nelder-Mead from an axis-aligned simplex of size ``step``; returns (x, f).

    ``frtol`` is relative to the starting value.
    """
    x0 = np.asarray(x0, dtype=float)
    f0 = float(fun(x0))
    if x0.size == 0:
        return x0, f0
    fatol = frtol * abs(f0) if np.isfinite(f0) and f0 != 0 else frtol
    simplex = np.vstack([x0, x0 + step * np.eye(len(x0))])
    res = minimize(fun, x0, method="Nelder-Mead",
                   options={"maxiter": iters, "adaptive": True,
                            "xatol": xatol, "fatol": fatol, "initial_simplex": simplex})
    if not np.isfinite(res.fun) or res.fun > f0:
        return x0, f0
    return np.asarray(res.x), float(res.fun)


def traceless_reduce(p: np.ndarray, n: int) -> np.ndarray:
    """Drop the trace direction of Hermitian parameters (n^2 -> n^2 - 1)."""
    d = p[:n] - np.mean(p[:n])
    return np.concatenate([d[:n - 1], p[n:]])


def traceless_expand(q: np.ndarray, n: int) -> np.ndarray:
    d = q[:n - 1]
    return np.concatenate([d, [-np.sum(d)], q[n - 1:]])
