"""Randomized checks of the matricial norm axioms and cb-norm estimates.

Exact oracles (eigenvalue-based norms) are compared through their certified
brackets: a violation is recorded only when the brackets are separated by
more than the tolerance.  Searched oracles (``W_max``) are checked through
one-sided bracket inequalities with an allowance, so a search gap is never
reported as a counterexample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ._search import SearchConfig
from .affiliated import w_max, w_min, w_t_norm
from .errors import DegenerateInput, ShapeMismatch
from .linalg import operator_norm, random_complex, random_unitary
from .opspace import (ConcreteOperatorSpace, MatrixOverX, direct_sum, o_norm, off_corner,
                      realize, scalar_compress, w_norm)
from .radius import DEFAULT_TOL, EPS, NormEstimate, _polygon_vertices, numerical_radius_fast

BRACKET_ALLOWANCE = 1e-3


@dataclass(frozen=True)
class Violation:
    description: str
    lhs: float
    rhs: float
    margin: float

    def to_json(self) -> dict:
        return {"input": self.description, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin}


@dataclass
class CheckReport:
    check_name: str
    trials: int
    seed: int
    tolerance: float
    violations: List[Violation] = field(default_factory=list)
    max_margin: float = 0.0  # largest certified margin, violating or not
    max_discrepancy: float = 0.0  # largest point-estimate defect |lhs - rhs| (or lhs - rhs)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"check": self.check_name, "seed": self.seed, "trials": self.trials,
                "tolerance": self.tolerance, "max_margin": self.max_margin,
                "max_discrepancy": self.max_discrepancy,
                "violations": [v.to_json() for v in self.violations]}

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL ({len(self.violations)} violations)"
        return (f"{self.check_name}: {status}; {self.trials} trials, seed {self.seed}, "
                f"tol {self.tolerance:g}, max margin {self.max_margin:.3e}, "
                f"max discrepancy {self.max_discrepancy:.3e}")


@dataclass(frozen=True)
class NormOracle:
    """A level-wise norm ``(space, x) -> NormEstimate``; ``exact`` marks eigenvalue-based norms."""

    name: str
    fn: Callable[[ConcreteOperatorSpace, MatrixOverX], NormEstimate]
    exact: bool = True

    def __call__(self, space, x) -> NormEstimate:
        return self.fn(space, x)


def w_oracle(tol: float = DEFAULT_TOL) -> NormOracle:
    return NormOracle("w", lambda s, x: w_norm(s, x, tol))


def o_oracle() -> NormOracle:
    return NormOracle("O", o_norm)


def w_min_oracle() -> NormOracle:
    return NormOracle("W_min", w_min)


def w_t_oracle(gen, tol: float = DEFAULT_TOL) -> NormOracle:
    return NormOracle("W_t", lambda s, x: w_t_norm(s, x, gen, tol))


def w_max_oracle(config: SearchConfig | None = None) -> NormOracle:
    return NormOracle("W_max", lambda s, x: w_max(s, x, config), exact=False)


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _element(space, n, rng, dist) -> MatrixOverX:
    return MatrixOverX(random_complex((n, n, space.dim), rng, dist))


def _separation(a: NormEstimate, b_lower: float, b_upper: float) -> float:
    """Distance between [a.lower, a.upper] and [b_lower, b_upper] (0 if they meet)."""
    return max(0.0, a.lower - b_upper, b_lower - a.upper)


def _shrink(build, margin_of, tol: float, steps: int = 20):
    """Bisect a scale factor in (0, 1] toward the smallest still-violating witness."""
    lo, hi = 0.0, 1.0
    best = (1.0, margin_of(build(1.0)))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        m = margin_of(build(mid))
        if m[0] > tol:
            hi, best = mid, (mid, m)
        else:
            lo = mid
    return best


def _record(report: CheckReport, desc: str, margin: float, lhs: float, rhs: float,
            build=None, margin_of=None, equality: bool = False) -> None:
    report.max_margin = max(report.max_margin, margin)
    defect = abs(lhs - rhs) if equality else max(0.0, lhs - rhs)
    report.max_discrepancy = max(report.max_discrepancy, float(defect))
    if margin <= report.tolerance:
        return
    if build is not None:
        s, (m, l2, r2) = _shrink(build, margin_of, report.tolerance)
        if s < 1.0:
            desc, margin, lhs, rhs = f"{desc}, shrunk by factor {s:.6g}", m, l2, r2
    report.violations.append(Violation(desc, float(lhs), float(rhs), float(margin)))


def check_wi(oracle: NormOracle, space: ConcreteOperatorSpace, trials: int = 100, seed: int = 0,
             tol: float = 1e-8, max_level: int = 3, dist: str = "gaussian") -> CheckReport:
    """``W(x (+) y) = max(W(x), W(y))``; with ``oracle = o_oracle()`` this is axiom OI."""
    rep = CheckReport(f"{'OI' if oracle.name == 'O' else 'WI'}[{oracle.name}]", trials, seed, tol)
    for t in range(trials):
        rng = _trial_rng(seed, t)
        m, n = (int(v) for v in rng.integers(1, max_level + 1, size=2))
        x = _element(space, m, rng, dist)
        y = _element(space, n, rng, dist)
        if t % 10 == 0:
            y = 0.0 * y
        elif t % 10 == 1:
            y = x
        desc = f"trial {t}: levels ({m},{n}), rng seed [{seed},{t}]"

        def margin_of(pair):
            xx, yy = pair
            s = oracle(space, direct_sum(xx, yy))
            ex, ey = oracle(space, xx), oracle(space, yy)
            lo, up = max(ex.lower, ey.lower), max(ex.upper, ey.upper)
            if oracle.exact:
                mg = _separation(s, lo, up)
            else:
                # one-sided: W(x+y) >= max lower and W(x+y).lower <= max upper
                mg = max(0.0, lo - s.upper, s.lower - up)
            return mg, s.value, max(ex.value, ey.value)

        mg, l, r = margin_of((x, y))
        _record(rep, desc, mg, l, r, lambda s, x=x, y=y: (s * x, s * y), margin_of,
                equality=oracle.exact)
    return rep


def _alpha(rng, n, m, t) -> np.ndarray:
    if t % 10 == 0:
        return np.zeros((n, m), dtype=np.complex128)
    if t % 10 == 1:
        return random_unitary(m, rng)
    if t % 10 == 2:
        return 2.0 * np.eye(m, dtype=np.complex128)
    return random_complex((n, m), rng)


def check_wii(oracle: NormOracle, space: ConcreteOperatorSpace, trials: int = 100, seed: int = 0,
              tol: float = 1e-8, max_level: int = 3, dist: str = "gaussian",
              allowance: float = BRACKET_ALLOWANCE) -> CheckReport:
    """``W(alpha x alpha*) <= ||alpha||^2 W(x)``.

    Searched oracles are checked as ``upper(alpha x alpha*) <= ||alpha||^2 upper(x) + allowance``.
    """
    rep = CheckReport(f"WII[{oracle.name}]", trials, seed, tol if oracle.exact else allowance)
    for t in range(trials):
        rng = _trial_rng(seed, t)
        m, n = (int(v) for v in rng.integers(1, max_level + 1, size=2))
        x = _element(space, m, rng, dist)
        a = _alpha(rng, n, m, t)
        desc = f"trial {t}: alpha {a.shape[0]}x{a.shape[1]}, level {m}, rng seed [{seed},{t}]"
        an2 = operator_norm(a) ** 2 * (1.0 + 8 * EPS * max(a.shape))

        def margin_of(xx, a=a, an2=an2):
            lhs = oracle(space, scalar_compress(a, xx, a.conj().T))
            rhs = oracle(space, xx)
            if oracle.exact:
                mg = max(0.0, lhs.lower - an2 * rhs.upper)
            else:
                mg = max(0.0, lhs.upper - an2 * rhs.upper)
            return mg, lhs.value, an2 * rhs.value

        mg, l, r = margin_of(x)
        _record(rep, desc, mg, l, r, lambda s, x=x: s * x, margin_of)
    return rep


def check_oi(space: ConcreteOperatorSpace, trials: int = 100, seed: int = 0, tol: float = 1e-8,
             max_level: int = 3, dist: str = "gaussian") -> CheckReport:
    return check_wi(o_oracle(), space, trials, seed, tol, max_level, dist)


def check_oii(space: ConcreteOperatorSpace, trials: int = 100, seed: int = 0, tol: float = 1e-8,
              max_level: int = 3, dist: str = "gaussian") -> CheckReport:
    """``O(alpha x beta) <= ||alpha|| O(x) ||beta||``."""
    rep = CheckReport("OII[O]", trials, seed, tol)
    for t in range(trials):
        rng = _trial_rng(seed, t)
        m, n, q = (int(v) for v in rng.integers(1, max_level + 1, size=3))
        x = _element(space, m, rng, dist)
        if t % 10 == 0:
            a, b = np.eye(m), np.eye(m)
        elif t % 10 == 1:
            a, b = random_complex((n, m), rng), np.zeros((m, n))
        else:
            a, b = random_complex((n, m), rng), random_complex((m, n), rng)
        desc = f"trial {t}: alpha {a.shape}, beta {b.shape}, level {m}, rng seed [{seed},{t}]"
        k = operator_norm(a) * operator_norm(b) * (1.0 + 16 * EPS * max(n, m))

        def margin_of(xx, a=a, b=b, k=k):
            lhs = o_norm(space, scalar_compress(a, xx, b))
            rhs = o_norm(space, xx)
            return max(0.0, lhs.lower - k * rhs.upper), lhs.value, k * rhs.value

        mg, l, r = margin_of(x)
        _record(rep, desc, mg, l, r, lambda s, x=x: s * x, margin_of)
    return rep


def check_ow(space: ConcreteOperatorSpace, trials: int = 100, seed: int = 0, tol: float = 1e-8,
             max_level: int = 3, dist: str = "gaussian", oracle: Optional[NormOracle] = None) -> CheckReport:
    """``W_2n([[0, x], [0, 0]]) = O_n(x) / 2``."""
    oracle = oracle or w_oracle()
    rep = CheckReport(f"OW[{oracle.name}]", trials, seed, tol)
    for t in range(trials):
        rng = _trial_rng(seed, t)
        n = int(rng.integers(1, max_level + 1))
        x = _element(space, n, rng, dist)
        if t % 10 == 0:
            x = 0.0 * x
        desc = f"trial {t}: level {n}, rng seed [{seed},{t}]"

        def margin_of(xx):
            lhs = oracle(space, off_corner(xx))
            o = o_norm(space, xx)
            return _separation(lhs, 0.5 * o.lower, 0.5 * o.upper), lhs.value, 0.5 * o.value

        mg, l, r = margin_of(x)
        _record(rep, desc, mg, l, r, lambda s, x=x: s * x, margin_of, equality=True)
    return rep


# --- linear maps and cb norms ------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearMap:
    """``phi(B_m) = sum_l images[m, l] C_l`` from ``domain`` (basis B) to ``target`` (basis C)."""

    domain: ConcreteOperatorSpace
    images: np.ndarray
    target: ConcreteOperatorSpace

    def __post_init__(self):
        M = np.asarray(self.images, dtype=np.complex128)
        if M.shape != (self.domain.dim, self.target.dim):
            raise ShapeMismatch(f"images must have shape ({self.domain.dim}, {self.target.dim}), got {M.shape}")
        M = M.copy()
        M.setflags(write=False)
        object.__setattr__(self, "images", M)

    def apply(self, x: MatrixOverX) -> MatrixOverX:
        """The amplification ``phi_n([x_ij]) = [phi(x_ij)]``."""
        return MatrixOverX(x.coeffs @ self.images)

    def target_full_size(self) -> Optional[int]:
        """k if the target is all of M_k, else None."""
        d = self.target.ambient_dim
        return d if self.target.dim == d * d else None


@dataclass(frozen=True)
class CbLevel:
    level: int
    estimate: float  # best certified sampled ratio at this level
    cumulative: float  # max over levels <= this one
    redundant: bool


def _realizations(space: ConcreteOperatorSpace, C: np.ndarray) -> np.ndarray:
    s, n, _, _ = C.shape
    d = space.ambient_dim
    return np.einsum("sijm,mab->siajb", C, space.basis).reshape(s, n * d, n * d)


def _screen_bounds(kind: str, Rx: np.ndarray, Ry: np.ndarray, angles: int = 32):
    """Cheap per-sample bounds ``lo <= N(phi x) / N(x) <= hi`` for a batch.

    For w: the grid maximum of the support function is a lower bound and the
    support polygon an upper bound, on numerator and denominator alike.
    """
    if kind in ("O", "W_min"):
        num = np.linalg.norm(Ry, 2, axis=(1, 2))
        den = np.linalg.norm(Rx, 2, axis=(1, 2))
        slack = 1e-12
        return num * (1 - slack) / (den * (1 + slack)), num * (1 + slack) / (den * (1 - slack))
    th = np.linspace(0.0, 2 * np.pi, angles, endpoint=False)
    c = np.cos(th)[None, :, None, None]
    s = np.sin(th)[None, :, None, None]

    def bounds(R):
        Hr = 0.5 * (R + R.conj().transpose(0, 2, 1))
        Hi = 0.5j * (R - R.conj().transpose(0, 2, 1))
        f = np.linalg.eigvalsh(c * Hr[:, None] + s * Hi[:, None])[..., -1]
        lo = np.clip(f.max(axis=1), 0.0, None)
        hi = np.array([_polygon_vertices(th, fk).max() for fk in f])
        pad = 1e-12 * (np.linalg.norm(R, axis=(1, 2)) + 1e-300)
        return np.clip(lo - pad, 0.0, None), hi + pad

    nlo, nhi = bounds(Ry)
    dlo, dhi = bounds(Rx)
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(dhi > 0, nlo / dhi, 0.0)
        hi = np.where(dlo > 0, nhi / dlo, np.inf)
    return lo, hi


def _certified_ratio(kind, fmap: LinearMap, x: MatrixOverX, tol: float) -> float:
    X, Y = fmap.domain, fmap.target
    y = fmap.apply(x)
    if kind == "W":
        num, den = w_norm(Y, y, tol), w_norm(X, x, tol)
    elif kind == "O":
        num, den = o_norm(Y, y), o_norm(X, x)
    elif kind == "W_min":
        num, den = w_min(Y, y), w_min(X, x)
    else:
        raise ValueError(f"unknown norm kind {kind!r}")
    if den.upper < 1e-12:
        raise DegenerateInput("sampled element has norm below 1e-12")
    return num.lower / den.upper


def _fast_ratio(kind, fmap, n):
    X, Y = fmap.domain, fmap.target
    k = X.dim

    def coeffs(p):
        h = p.size // 2
        return (p[:h] + 1j * p[h:]).reshape(n, n, k)

    def ratio(p):
        x = MatrixOverX(coeffs(p))
        Rx, Ry = realize(X, x), realize(Y, fmap.apply(x))
        if kind == "W":
            den = numerical_radius_fast(Rx)
            return -numerical_radius_fast(Ry) / den if den > 1e-12 else 0.0
        den = operator_norm(Rx)
        return -operator_norm(Ry) / den if den > 1e-12 else 0.0

    return ratio, coeffs


def sample_elements(space: ConcreteOperatorSpace, n: int, samples: int, seed: int) -> np.ndarray:
    """Prefix-consistent draws: the first s samples do not depend on ``samples``."""
    rng = np.random.default_rng([seed, n])
    Z = rng.normal(size=(samples, n, n, space.dim, 2)) / math.sqrt(2.0)
    return Z[..., 0] + 1j * Z[..., 1]


def _level_estimate(fmap, kind, n, samples, seed, tol):
    """``max_i`` of the certified sample ratios, by branch and bound on cheap brackets."""
    X = fmap.domain
    C = sample_elements(X, n, samples, seed)
    Rx = _realizations(X, C)
    ok = np.linalg.norm(Rx, axis=(1, 2)) >= 1e-12  # degenerate draws are skipped
    C, Rx = C[ok], Rx[ok]
    if len(C) == 0:
        raise DegenerateInput("every sampled element is degenerate")
    Ry = _realizations(fmap.target, C @ fmap.images)
    lo, hi = _screen_bounds(kind, Rx, Ry)
    best, best_i, certified = -1.0, -1, 0
    for i in np.argsort(-hi, kind="stable"):
        if hi[i] <= best:
            break
        r = _certified_ratio(kind, fmap, MatrixOverX(C[i]), tol)
        certified += 1
        if r > best:
            best, best_i = r, int(i)
    return max(best, 0.0), C[best_i], certified


def cb_norm_estimate(fmap: LinearMap, norm_kind: str = "W", max_level: int = 2, samples: int = 200,
                     seed: int = 0, ascent_iters: int = 0, tol: float = DEFAULT_TOL) -> NormEstimate:
    """Sampled lower bound for the cb norm ``sup_n N(phi_n)`` truncated at ``max_level``.

    The level-n estimate is ``max_i N(phi_n x_i) / N(x_i)`` over ``samples``
    random elements, each ratio certified as ``lower(num) / upper(den)``; a
    cheap batched bracket prunes samples that cannot win.  The reported value
    is cumulative over levels, hence monotone in ``max_level`` and (draws being
    prefix-consistent) in ``samples``.  ``ascent_iters > 0`` adds a
    Nelder-Mead ascent from the best sample, which can only raise a level but
    breaks the exact monotonicity in ``samples``.  The witness is the list of
    :class:`CbLevel` rows; levels above ``k`` are flagged redundant when the
    target is all of ``M_k`` (level-collapse lemma).
    """
    from ._search import nelder_mead

    if max_level < 1:
        raise ValueError("max_level must be at least 1")
    if norm_kind not in ("W", "O", "W_min"):
        raise ValueError(f"unknown norm kind {norm_kind!r}")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    full = fmap.target_full_size()
    rows: List[CbLevel] = []
    cum = 0.0
    for n in range(1, max_level + 1):
        est, xbest, _ = _level_estimate(fmap, norm_kind, n, samples, seed, tol)
        if ascent_iters > 0 and est > 0:
            ratio, coeffs = _fast_ratio(norm_kind, fmap, n)
            p0 = np.concatenate([xbest.real.ravel(), xbest.imag.ravel()])
            p, _ = nelder_mead(ratio, p0, ascent_iters, step=0.2 * float(np.abs(p0).mean() + 1e-3))
            try:
                est = max(est, _certified_ratio(norm_kind, fmap, MatrixOverX(coeffs(p)), tol))
            except DegenerateInput:
                pass
        cum = max(cum, est)
        rows.append(CbLevel(n, est, cum, bool(full and n > full)))
    cert = (f"sampled lower bound, {samples} samples/level, levels 1..{max_level}, seed {seed}"
            f"{', with ascent' if ascent_iters > 0 else ''}; upper not certified")
    if full and max_level > full:
        cert += f"; levels > {full} redundant for a map into M_{full}"
    return NormEstimate(cum, cum, math.inf, cert, upper_certified=False, witness=rows)


def check_wmin_functor(fmap: LinearMap, max_level: int = 2, samples: int = 200, seed: int = 0,
                       tol: float = 1e-12) -> CheckReport:
    """Per sample, ``W_min(phi x) / W_min(x) = O(phi x) / O(x)``."""
    rep = CheckReport("Wmin-functor", samples * max_level, seed, tol)
    X, Y = fmap.domain, fmap.target
    for n in range(1, max_level + 1):
        rng = np.random.default_rng([seed, n])
        for s in range(samples):
            x = MatrixOverX(random_complex((n, n, X.dim), rng))
            y = fmap.apply(x)
            ox = o_norm(X, x).value
            if ox < 1e-12:
                continue
            r_o = o_norm(Y, y).value / ox
            r_w = w_min(Y, y).value / w_min(X, x).value
            _record(rep, f"level {n}, sample {s}", abs(r_w - r_o), r_w, r_o, equality=True)
    return rep


def random_map(domain: ConcreteOperatorSpace, target: ConcreteOperatorSpace,
               rng: np.random.Generator) -> LinearMap:
    return LinearMap(domain, random_complex((domain.dim, target.dim), rng), target)
