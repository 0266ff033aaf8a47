"""Haagerup-type tensor norms on ``M_n(X (x) Y)``.

A :class:`TensorRep` stores ``u = x . y`` with ``x`` an ``n x r`` grid over
``X`` and ``y`` an ``r x n`` grid over ``Y``.  Every search runs over the
positive matrix ``G = S S*`` of an inner change of coordinates
``(x, y) -> (x S, S^{-1} y)``: with realizations ``Xr`` and ``Yr``,

* ``||x S||^2 = lambda_max(Xr (G (x) I) Xr*)``
* ``||S^{-1} y||^2 = lambda_max(Yr* (G^{-1} (x) I) Yr)``

and ``||S^{-1} a S^{-*}||``, ``w(S^{-1} a S^{-*})`` depend on ``G`` only up to
unitary equivalence.  ``G = exp(H)`` for Hermitian ``H``; the witness is
``S = G^{1/2}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._search import (SearchConfig, herm_from_params, herm_function, nelder_mead,
                      params_from_herm, restart_rng, traceless_expand, traceless_reduce)
from .errors import FormatError, SearchFailure, ShapeMismatch
from .linalg import as_matrix, matrix_from_json, matrix_to_json, operator_norm, random_complex
from .opspace import ConcreteOperatorSpace, grid_from_json
from .radius import EPS, NormEstimate, numerical_radius, numerical_radius_fast, zero_estimate


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def _grid_to_json(C: np.ndarray) -> list:
    return [[[[float(z.real), float(z.imag)] for z in C[i, j]] for j in range(C.shape[1])]
            for i in range(C.shape[0])]


@dataclass(frozen=True, eq=False)
class TensorRep:
    """``u = x . y``: ``left`` has shape (n, r, k1) over X, ``right`` (r, n, k2) over Y."""

    left_space: ConcreteOperatorSpace
    right_space: ConcreteOperatorSpace
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.left, dtype=np.complex128)
        R = np.asarray(self.right, dtype=np.complex128)
        if L.ndim != 3 or R.ndim != 3:
            raise ShapeMismatch("left and right must be 3-D coefficient grids")
        n, r, k1 = L.shape
        if R.shape[:2] != (r, n):
            raise ShapeMismatch(f"left grid {L.shape[:2]} and right grid {R.shape[:2]} are not conformal")
        if k1 != self.left_space.dim or R.shape[2] != self.right_space.dim:
            raise ShapeMismatch("coefficient lengths do not match the space dimensions")
        if min(n, r) < 1:
            raise ShapeMismatch("level and inner rank must be at least 1")
        if not (np.all(np.isfinite(L)) and np.all(np.isfinite(R))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "left", _readonly(L))
        object.__setattr__(self, "right", _readonly(R))

    @property
    def level(self) -> int:
        return self.left.shape[0]

    @property
    def rank(self) -> int:
        return self.left.shape[1]

    def left_matrix(self) -> np.ndarray:
        """Realization of x: an (n d1) x (r d1) matrix."""
        n, r, _ = self.left.shape
        d = self.left_space.ambient_dim
        return np.einsum("ikm,mab->iakb", self.left, self.left_space.basis).reshape(n * d, r * d)

    def right_matrix(self) -> np.ndarray:
        r, n, _ = self.right.shape
        d = self.right_space.ambient_dim
        return np.einsum("kjm,mab->kajb", self.right, self.right_space.basis).reshape(r * d, n * d)

    def transformed(self, S) -> "TensorRep":
        """``(x S, S^{-1} y)``; realizes the same tensor."""
        S = as_matrix(S, "S")
        if S.shape != (self.rank, self.rank):
            raise ShapeMismatch(f"S must be {self.rank}x{self.rank}")
        Si = np.linalg.inv(S)
        return TensorRep(self.left_space, self.right_space,
                         np.einsum("ikm,kl->ilm", self.left, S),
                         np.einsum("kl,ljm->kjm", Si, self.right))

    def padded(self, z: int) -> "TensorRep":
        """Append ``z`` zero columns to x and zero rows to y."""
        if z <= 0:
            return self
        n, r, k1 = self.left.shape
        L = np.concatenate([self.left, np.zeros((n, z, k1))], axis=1)
        R = np.concatenate([self.right, np.zeros((z, n, self.right.shape[2]))], axis=0)
        return TensorRep(self.left_space, self.right_space, L, R)

    def to_json(self) -> dict:
        return {"left_space": self.left_space.to_json(), "right_space": self.right_space.to_json(),
                "left": _grid_to_json(self.left), "right": _grid_to_json(self.right)}

    @classmethod
    def from_json(cls, obj, field: str = "tensor") -> "TensorRep":
        if not isinstance(obj, dict):
            raise FormatError(f"{field}: expected an object", field)
        for key in ("left_space", "right_space", "left", "right"):
            if key not in obj:
                raise FormatError(f"{field}: missing key {key!r}", f"{field}.{key}")
        X = ConcreteOperatorSpace.from_json(obj["left_space"], f"{field}.left_space")
        Y = ConcreteOperatorSpace.from_json(obj["right_space"], f"{field}.right_space")
        L = grid_from_json(obj["left"], X.dim, f"{field}.left")
        R = grid_from_json(obj["right"], Y.dim, f"{field}.right")
        try:
            return cls(X, Y, L, R)
        except ShapeMismatch as exc:
            raise FormatError(f"{field}.right: {exc}", f"{field}.right") from exc


@dataclass(frozen=True, eq=False)
class SymmetricRep:
    """``u = (x a) . x^dagger`` with ``x`` of shape (n, r, k) and ``a`` r x r."""

    space: ConcreteOperatorSpace
    x: np.ndarray
    middle: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.complex128)
        a = as_matrix(self.middle, "middle")
        if x.ndim != 3 or x.shape[2] != self.space.dim or min(x.shape[:2]) < 1:
            raise ShapeMismatch(f"x must have shape (n, r, {self.space.dim}), got {x.shape}")
        if a.shape != (x.shape[1], x.shape[1]):
            raise ShapeMismatch(f"middle must be {x.shape[1]}x{x.shape[1]}, got {a.shape}")
        object.__setattr__(self, "x", _readonly(x))
        object.__setattr__(self, "middle", _readonly(a))

    @property
    def level(self) -> int:
        return self.x.shape[0]

    @property
    def rank(self) -> int:
        return self.x.shape[1]

    def dagger_grid(self) -> np.ndarray:
        """Coefficients of ``x^dagger`` over ``X^dagger``: ``y[k, j, m] = conj(x[j, k, m])``."""
        return self.x.conj().transpose(1, 0, 2)

    def x_matrix(self) -> np.ndarray:
        n, r, _ = self.x.shape
        d = self.space.ambient_dim
        return np.einsum("ikm,mab->iakb", self.x, self.space.basis).reshape(n * d, r * d)

    def to_tensor(self) -> TensorRep:
        """The induced representation ``(x a, x^dagger)`` over ``X (x) X^dagger``."""
        return TensorRep(self.space, self.space.dagger(),
                         np.einsum("ikm,kl->ilm", self.x, self.middle), self.dagger_grid())

    def to_json(self) -> dict:
        return {"left_space": self.space.to_json(), "left": _grid_to_json(self.x),
                "middle": matrix_to_json(self.middle)}

    @classmethod
    def from_json(cls, obj, field: str = "symmetric") -> "SymmetricRep":
        if not isinstance(obj, dict):
            raise FormatError(f"{field}: expected an object", field)
        for key in ("left_space", "left", "middle"):
            if key not in obj:
                raise FormatError(f"{field}: missing key {key!r}", f"{field}.{key}")
        X = ConcreteOperatorSpace.from_json(obj["left_space"], f"{field}.left_space")
        x = grid_from_json(obj["left"], X.dim, f"{field}.left")
        a = matrix_from_json(obj["middle"], f"{field}.middle")
        try:
            return cls(X, x, a)
        except ShapeMismatch as exc:
            raise FormatError(f"{field}.middle: {exc}", f"{field}.middle") from exc


def realize_tensor(rep: TensorRep) -> np.ndarray:
    """The ``n d1 d2`` square matrix with (i, j) block ``sum_k x_ik (x) y_kj``."""
    n, r, _ = rep.left.shape
    d1, d2 = rep.left_space.ambient_dim, rep.right_space.ambient_dim
    XB = np.einsum("ikm,mab->ikab", rep.left, rep.left_space.basis)
    YB = np.einsum("kjm,mce->kjce", rep.right, rep.right_space.basis)
    U = np.einsum("ikab,kjce->iacjbe", XB, YB)
    return U.reshape(n * d1 * d2, n * d1 * d2)


def product_realization(rep: TensorRep) -> np.ndarray:
    """``Xr Yr`` in ``M_n(B(H))``; requires equal ambient dimensions."""
    _same_ambient(rep)
    return rep.left_matrix() @ rep.right_matrix()


def _same_ambient(rep: TensorRep) -> None:
    if rep.left_space.ambient_dim != rep.right_space.ambient_dim:
        raise ShapeMismatch("this norm needs X and Y inside the same matrix algebra "
                            f"(ambient dims {rep.left_space.ambient_dim} and {rep.right_space.ambient_dim})")


# --- search machinery -------------------------------------------------------

def _gram_factors(Xr: np.ndarray, Yr: np.ndarray, r: int):
    """Return callables G -> Xr (G (x) I) Xr* and G -> Yr* (G^-1 (x) I) Yr.

    Xr is (n d1) x (r d1), Yr is (r d2) x (n d2) (Yr may be None)."""
    d1 = Xr.shape[1] // r
    X3 = Xr.reshape(Xr.shape[0], r, d1)

    def left(G):
        return np.einsum("akc,kl,blc->ab", X3, G, X3.conj())

    if Yr is None:
        return left, None
    d2 = Yr.shape[0] // r
    Y3 = Yr.reshape(r, d2, Yr.shape[1])

    def right(Gi):
        return np.einsum("kca,kl,lcb->ab", Y3.conj(), Gi, Y3)

    return left, right


def _lmax(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[-1])


def _exp_parts(p, r):
    mu, V = np.linalg.eigh(herm_from_params(p, r))
    mu = np.clip(mu, -23.0, 23.0)
    G = (V * np.exp(mu)) @ V.conj().T
    Gi = (V * np.exp(-mu)) @ V.conj().T
    Gmh = (V * np.exp(-0.5 * mu)) @ V.conj().T
    return G, Gi, Gmh


def _random_start(r: int, seed: int, idx: int) -> np.ndarray:
    if idx == 0:
        return np.zeros(r * r)
    rng = restart_rng(seed, idx)
    S = np.eye(r) + 0.3 * random_complex((r, r), rng)
    G = S @ S.conj().T
    return params_from_herm(herm_function(0.5 * (G + G.conj().T), np.log))


def _params_from_S(S: np.ndarray) -> np.ndarray:
    G = S @ S.conj().T
    return params_from_herm(herm_function(0.5 * (G + G.conj().T), lambda m: np.log(np.maximum(m, 1e-300))))


def _search(obj, r: int, cfg: SearchConfig, seeds: Iterable[np.ndarray] = (),
            scale_free: bool = False):
    """Minimize over H; returns (best full params, best value, label).

    Scale-free objectives (invariant under G -> cG) are searched over
    traceless H, which removes the flat direction.
    """
    if scale_free:
        def f(q):
            return obj(traceless_expand(q, r))

        def reduce(p):
            return traceless_reduce(p, r)

        def expand(q):
            return traceless_expand(q, r)
    else:
        f = obj

        def reduce(p):
            return p

        expand = reduce
    starts = [(f"restart {i}", _random_start(r, cfg.seed, i)) for i in range(cfg.restarts)]
    starts += [(f"warm start {i}", np.asarray(p, dtype=float)) for i, p in enumerate(seeds)]
    best_q, best_f, label = None, math.inf, ""
    for name, p0 in starts:
        q, val = nelder_mead(f, reduce(p0), cfg.iters)
        if math.isfinite(val) and val < best_f:
            best_q, best_f, label = q, val, name
    if best_q is None:
        raise SearchFailure("no finite objective value encountered")
    q, val = nelder_mead(f, best_q, cfg.iters, step=0.05)
    if val < best_f:
        best_q, best_f = q, val
    return expand(best_q), best_f, label


def _sqrtm_from_params(p, r) -> np.ndarray:
    return herm_function(herm_from_params(p, r), lambda m: np.exp(0.5 * m))


@dataclass(frozen=True, eq=False)
class TensorWitness:
    S: np.ndarray
    params: np.ndarray  # log-parameters of G = S S*, reusable as a warm start


def _pad_rel(*mats) -> float:
    size = max(max(m.shape) for m in mats)
    return 64.0 * EPS * size


def _resolve(config) -> SearchConfig:
    return config or SearchConfig()


def haagerup_norm(rep: TensorRep, config: SearchConfig | None = None, pad: int = 0,
                  warm_start: Iterable[np.ndarray] = ()) -> NormEstimate:
    """``||u||_h``: lower ``max(||realize_tensor||, ||Xr Yr||)``, upper best ``||x S|| ||S^{-1} y||``."""
    cfg = _resolve(config)
    rep = rep.padded(pad)
    U = realize_tensor(rep)
    if not np.any(U):
        return zero_estimate("zero tensor")
    Xr, Yr = rep.left_matrix(), rep.right_matrix()
    lower = operator_norm(U)
    if rep.left_space.ambient_dim == rep.right_space.ambient_dim:
        lower = max(lower, operator_norm(Xr @ Yr))
    lower *= 1.0 - _pad_rel(U)
    r = rep.rank
    left, right = _gram_factors(Xr, Yr, r)

    def obj(p):
        G, Gi, _ = _exp_parts(p, r)
        return math.sqrt(max(_lmax(left(G)), 0.0) * max(_lmax(right(Gi)), 0.0))

    try:
        best_p, best_f, label = _search(obj, r, cfg, warm_start, scale_free=True)
    except SearchFailure:
        best_p, label = np.zeros(r * r), "fallback S = I"
    S = _sqrtm_from_params(best_p, r)
    t = rep.transformed(S)
    nx, ny = operator_norm(t.left_matrix()), operator_norm(t.right_matrix())
    # balance the scale so that ||x S|| = ||S^{-1} y||
    c = math.sqrt(ny / nx) if nx > 0 and ny > 0 else 1.0
    S = c * S
    upper = nx * ny * (1.0 + _pad_rel(Xr, Yr))
    upper = max(upper, lower)
    cert = (f"lower spatial norm max(||u||, ||x y||); upper explicit S ({label}), "
            f"||xS||=||S^-1 y||={math.sqrt(nx * ny):.6g}; search_gap {upper - lower:.3e}")
    return NormEstimate(upper, lower, upper, cert,
                        witness=TensorWitness(S, _params_from_S(S)))


def wh_norm(rep: TensorRep, config: SearchConfig | None = None, pad: int = 0,
            warm_start: Iterable[np.ndarray] = (), h_estimate: NormEstimate | None = None) -> NormEstimate:
    """``||u||_wh``: upper best ``1/2 ||(xS)(xS)* + (S^-1 y)*(S^-1 y)||``, seeded by the h optimum.

    Lower bracket ``max(w(Xr Yr), h.lower / 2)``.
    """
    cfg = _resolve(config)
    _same_ambient(rep)
    rep = rep.padded(pad)
    if not np.any(realize_tensor(rep)):
        return zero_estimate("zero tensor")
    h = h_estimate or haagerup_norm(rep, cfg)
    Xr, Yr = rep.left_matrix(), rep.right_matrix()
    r = rep.rank
    left, right = _gram_factors(Xr, Yr, r)
    wl = numerical_radius(Xr @ Yr).lower
    lower = max(wl, 0.5 * h.lower)

    def obj(p):
        G, Gi, _ = _exp_parts(p, r)
        return 0.5 * _lmax(left(G) + right(Gi))

    seeds = list(warm_start)
    if h.witness is not None:
        seeds.append(h.witness.params)
    best_p, best_f, label = _search(obj, r, cfg, seeds)
    S = _sqrtm_from_params(best_p, r)
    t = rep.transformed(S)
    A, B = t.left_matrix(), t.right_matrix()
    upper = 0.5 * operator_norm(A @ A.conj().T + B.conj().T @ B) * (1.0 + _pad_rel(A, B))
    if upper > h.upper:  # a balanced h witness always achieves ||xS|| ||S^-1 y||
        hS = h.witness.S
        t = rep.transformed(hS)
        A, B = t.left_matrix(), t.right_matrix()
        upper = 0.5 * operator_norm(A @ A.conj().T + B.conj().T @ B) * (1.0 + _pad_rel(A, B))
        S, label = hS, "balanced h witness"
    upper = max(upper, lower)
    cert = (f"lower max(w(x y), h.lower/2); upper explicit S ({label}); "
            f"search_gap {upper - lower:.3e}")
    return NormEstimate(upper, lower, upper, cert, witness=TensorWitness(S, _params_from_S(S)))


def _symmetric_parts(rep: SymmetricRep):
    Xr = rep.x_matrix()
    r = rep.rank
    left, _ = _gram_factors(Xr, None, r)
    return Xr, left


def _similar(Gmh: np.ndarray, a: np.ndarray) -> np.ndarray:
    return Gmh @ a @ Gmh


def wcb_norm(rep: SymmetricRep, config: SearchConfig | None = None,
             warm_start: Iterable[np.ndarray] = (), h_estimate: NormEstimate | None = None) -> NormEstimate:
    """``||u||_wcb``: upper best ``1/2 ||S^-1 a S^-*|| ||x S||^2``, lower ``h.lower / 2``."""
    cfg = _resolve(config)
    a = rep.middle
    tr = rep.to_tensor()
    if not np.any(realize_tensor(tr)):
        return zero_estimate("zero tensor")
    h = h_estimate or haagerup_norm(tr, cfg)
    lower = 0.5 * h.lower
    Xr, left = _symmetric_parts(rep)
    r = rep.rank

    def obj(p):
        G, _, Gmh = _exp_parts(p, r)
        return 0.5 * operator_norm(_similar(Gmh, a)) * max(_lmax(left(G)), 0.0)

    best_p, best_f, label = _search(obj, r, cfg, warm_start, scale_free=True)
    S = _sqrtm_from_params(best_p, r)
    upper = _wcb_value(rep, S) * (1.0 + _pad_rel(Xr))
    upper = max(upper, lower)
    cert = f"lower h.lower/2; upper explicit S ({label}); search_gap {upper - lower:.3e}"
    return NormEstimate(upper, lower, upper, cert, witness=TensorWitness(S, _params_from_S(S)))


def _wcb_value(rep: SymmetricRep, S: np.ndarray) -> float:
    Si = np.linalg.inv(S)
    xs = np.einsum("ikm,kl->ilm", rep.x, S)
    sx = SymmetricRep(rep.space, xs, Si @ rep.middle @ Si.conj().T)
    return 0.5 * operator_norm(sx.middle) * operator_norm(sx.x_matrix()) ** 2


def wh_alt_norm(rep: SymmetricRep, config: SearchConfig | None = None,
                warm_start: Iterable[np.ndarray] = (), h_estimate: NormEstimate | None = None) -> NormEstimate:
    """``||u||_wh`` in the form ``inf w(S^-1 a S^-*) ||x S||^2``.

    Lower bracket ``max(w(Xr a Xr*), h.lower / 2)``; the upper bracket uses a
    certified numerical radius at the final S.
    """
    cfg = _resolve(config)
    a = rep.middle
    tr = rep.to_tensor()
    if not np.any(realize_tensor(tr)):
        return zero_estimate("zero tensor")
    h = h_estimate or haagerup_norm(tr, cfg)
    Xr, left = _symmetric_parts(rep)
    r = rep.rank
    P = Xr @ np.kron(a, np.eye(rep.space.ambient_dim)) @ Xr.conj().T
    lower = max(numerical_radius(P).lower, 0.5 * h.lower)

    def obj(p):
        G, _, Gmh = _exp_parts(p, r)
        return numerical_radius_fast(_similar(Gmh, a)) * max(_lmax(left(G)), 0.0)

    best_p, best_f, label = _search(obj, r, cfg, warm_start, scale_free=True)
    S = _sqrtm_from_params(best_p, r)
    Si = np.linalg.inv(S)
    wa = numerical_radius(Si @ a @ Si.conj().T).upper
    nx = operator_norm(_x_matrix(rep, S))
    upper = max(wa * nx ** 2 * (1.0 + _pad_rel(Xr)), lower)
    cert = (f"lower max(w(x a x*), h.lower/2); upper certified w at explicit S ({label}); "
            f"search_gap {upper - lower:.3e}")
    return NormEstimate(upper, lower, upper, cert, witness=TensorWitness(S, _params_from_S(S)))


def _x_matrix(rep: SymmetricRep, S: np.ndarray) -> np.ndarray:
    xs = np.einsum("ikm,kl->ilm", rep.x, S)
    return SymmetricRep(rep.space, xs, rep.middle).x_matrix()


def tensor_chain(rep: SymmetricRep, config: SearchConfig | None = None) -> dict:
    """h, wh, wcb and wh_alt with shared seeding, so the chain holds by construction on uppers."""
    cfg = _resolve(config)
    tr = rep.to_tensor()
    h = haagerup_norm(tr, cfg)
    wh = wh_norm(tr, cfg, h_estimate=h)
    seeds = [e.witness.params for e in (h, wh) if e.witness is not None]
    alt = wh_alt_norm(rep, cfg, warm_start=seeds, h_estimate=h)
    seeds_cb = seeds + ([alt.witness.params] if alt.witness is not None else [])
    cb = wcb_norm(rep, cfg, warm_start=seeds_cb, h_estimate=h)
    return {"h": h, "wh": wh, "wh_alt": alt, "wcb": cb}
