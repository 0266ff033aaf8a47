"""Exit criteria of the package, shared by ``wradius selftest`` and the test suite.

Each criterion is a function ``(AcceptanceConfig) -> CriterionResult``.
Results carry only deterministic data (counts, worst defects); wall-clock
times are kept apart so that two runs with the same seed serialize to
identical bytes.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ._search import SearchConfig
from .affiliated import shift_generator, w_max, w_min, w_t_norm
from .axioms import (cb_norm_estimate, check_oi, check_oii, check_ow, check_wi, check_wii,
                     check_wmin_functor, random_map, w_oracle)
from .linalg import operator_norm, random_complex
from .opspace import (MatrixOverX, full_matrix_space, o_norm, random_space, scalar_element,
                      scalar_space)
from .radius import numerical_radius
from .tensor import SymmetricRep, TensorRep, haagerup_norm, tensor_chain


@dataclass(frozen=True)
class AcceptanceConfig:
    seed: int = 0
    radius_tol: float = 1e-8  # tolerance handed to the radius solver
    scale: float = 1.0  # multiplies every trial count (the determinism probe uses < 1)
    tensor_search: SearchConfig = SearchConfig(restarts=5, iters=400)
    wmax_search: SearchConfig = SearchConfig(restarts=20, iters=500)

    def count(self, n: int) -> int:
        return max(1, int(round(n * self.scale)))

    def rng(self, number: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, number])

    def faulty(self) -> "AcceptanceConfig":
        """Negative control: a radius tolerance far too loose for the criteria."""
        return replace(self, radius_tol=1e-2)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    metrics: Dict[str, object] = field(default_factory=dict)
    runtime: float = 0.0
    budget: Optional[float] = None

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.runtime < self.budget

    @property
    def ok(self) -> bool:
        return self.passed and self.within_budget

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "detail": self.detail, "metrics": self.metrics}

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        b = f" / budget {self.budget:.0f}s" if self.budget is not None else ""
        over = "" if self.within_budget else " (over budget)"
        return f"[{status}] {self.number:2d}. {self.name}: {self.detail} [{self.runtime:.1f}s{b}{over}]"


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    budget: Optional[float]
    fn: Callable[[AcceptanceConfig], tuple]


def _f(x: float) -> float:
    """Round-trip-stable float for reports."""
    return float(f"{float(x):.12e}")


# --- criteria ----------------------------------------------------------------

def corner_identity(cfg: AcceptanceConfig):
    """Default path (graded shortcut) on every corner, certified bracket checked;
    forced angular sweep on every fifth corner, value checked, bracket width reported."""
    rng = cfg.rng(1)
    graded = sweep = sweep_width = 0.0
    trials = cfg.count(200)
    nsweep = 0
    for t in range(trials):
        d = 1 + t % 5
        A = random_complex((d, d), rng)
        C = np.zeros((2 * d, 2 * d), dtype=np.complex128)
        C[:d, d:] = A
        half = 0.5 * operator_norm(A)
        est = numerical_radius(C, cfg.radius_tol)
        graded = max(graded, abs(est.lower - half), abs(est.upper - half))
        if t % 5 == 0:
            est = numerical_radius(C, cfg.radius_tol, use_grading=False)
            sweep = max(sweep, abs(est.value - half))
            sweep_width = max(sweep_width, est.gap)
            nsweep += 1
    ok = graded <= 1e-8 and sweep <= 1e-8
    return ok, (f"{trials} corners, worst certified |w - ||A||/2| {graded:.2e}; forced sweep on "
                f"{nsweep}: worst |value - ||A||/2| {sweep:.2e}, widest bracket {sweep_width:.2e} "
                f"(tol 1e-8)"), \
        {"graded": _f(graded), "sweep": _f(sweep), "sweep_width": _f(sweep_width)}


def jordan_radius(cfg: AcceptanceConfig):
    worst = {"graded": 0.0, "sweep": 0.0}
    for n in range(2, 9):
        J = np.diag(np.ones(n - 1), 1).astype(np.complex128)
        c = math.cos(math.pi / (n + 1))
        for key, grading in (("graded", True), ("sweep", False)):
            est = numerical_radius(J, cfg.radius_tol, use_grading=grading)
            worst[key] = max(worst[key], abs(est.lower - c), abs(est.upper - c))
    ok = max(worst.values()) <= 1e-8
    return ok, (f"J_2..J_8, worst certified |w - cos(pi/(n+1))| graded {worst['graded']:.2e}, "
                f"sweep {worst['sweep']:.2e} (tol 1e-8)"), {k: _f(v) for k, v in worst.items()}


def radius_bounds(cfg: AcceptanceConfig):
    rng = cfg.rng(3)
    worst_low = worst_high = 0.0
    trials = cfg.count(500)
    for t in range(trials):
        d = 1 + t % 8
        A = random_complex((d, d), rng)
        w = numerical_radius(A, cfg.radius_tol).value
        nA = operator_norm(A)
        worst_low = max(worst_low, 0.5 * nA - w)
        worst_high = max(worst_high, w - nA)
    ok = max(worst_low, worst_high) <= 1e-9
    return ok, (f"{trials} matrices, worst excess ||A||/2 - w {worst_low:.2e}, "
                f"w - ||A|| {worst_high:.2e} (tol 1e-9)"), {"low": _f(worst_low), "high": _f(worst_high)}


def axiom_campaigns(cfg: AcceptanceConfig):
    spaces = {"C": scalar_space(), "X2inM3": random_space(3, 2, cfg.rng(4))}
    trials = cfg.count(500)
    reports = []
    for label, X in spaces.items():
        s = cfg.seed
        reports += [(label, check_wi(w_oracle(cfg.radius_tol), X, trials, s, 1e-8, 3)),
                    (label, check_wii(w_oracle(cfg.radius_tol), X, trials, s, 1e-8, 3)),
                    (label, check_oi(X, trials, s, 1e-8, 3)),
                    (label, check_oii(X, trials, s, 1e-8, 3)),
                    (label, check_ow(X, trials, s, 1e-8, 3, oracle=w_oracle(cfg.radius_tol)))]
    nviol = sum(len(r.violations) for _, r in reports)
    metrics = {f"{label}:{r.check_name}": {"violations": len(r.violations),
                                           "max_margin": _f(r.max_margin)}
               for label, r in reports}
    worst = max(r.max_margin for _, r in reports)
    ok = nviol == 0
    return ok, (f"{len(reports)} campaigns x {trials} trials, {nviol} violations, "
                f"worst certified margin {worst:.2e} (tol 1e-8)"), metrics


def wmax_oracle(cfg: AcceptanceConfig):
    rng = cfg.rng(5)
    C = scalar_space()
    trials = cfg.count(50)
    worst = 0.0
    bracket_ok = True
    for t in range(trials):
        n = 1 + t % 3
        a = random_complex((n, n), rng)
        w = numerical_radius(a, cfg.radius_tol).value
        est = w_max(C, scalar_element(a), cfg.wmax_search)
        worst = max(worst, abs(est.upper - w))
        bracket_ok &= est.lower <= w <= est.upper
    ok = worst <= 1e-3 and bracket_ok
    return ok, (f"{trials} scalar elements, worst |upper - w| {worst:.2e} (tol 1e-3), "
                f"brackets {'enclose' if bracket_ok else 'MISS'} w"), {"worst": _f(worst),
                                                                     "brackets": bracket_ok}


def level_one_collapse(cfg: AcceptanceConfig):
    rng = cfg.rng(6)
    X = random_space(3, 2, rng)
    trials = cfg.count(20)
    worst = 0.0
    for _ in range(trials):
        x = MatrixOverX(random_complex((1, 1, X.dim), rng))
        est = w_max(X, x, cfg.wmax_search)
        worst = max(worst, abs(est.upper - o_norm(X, x).value))
    ok = worst <= 1e-6
    return ok, f"{trials} level-1 elements, worst |upper - O(x)| {worst:.2e} (tol 1e-6)", {"worst": _f(worst)}


T_GRID = tuple(i / 10 for i in range(11))


def _family_table(cfg: AcceptanceConfig):
    """W_t brackets on the t grid for the 30 sandwich samples (shared by criteria 7 and 8)."""
    rng = cfg.rng(7)
    C = scalar_space()
    gens = [shift_generator(3, t) for t in T_GRID]
    rows = []
    for s in range(cfg.count(30)):
        n = 1 + s % 3
        a = random_complex((n, n), rng)
        x = scalar_element(a)
        wt = [w_t_norm(C, x, g, cfg.radius_tol) for g in gens]
        rows.append((numerical_radius(a, cfg.radius_tol), w_min(C, x), o_norm(C, x).value, wt))
    return rows


def sandwich_family(cfg: AcceptanceConfig):
    """Point values with the stated slacks; the slack-free side W_min <= W_t uses brackets."""
    rows = _family_table(cfg)
    c = math.cos(math.pi / 4)
    d = {"lower_sandwich": 0.0, "upper_sandwich": 0.0, "w0": 0.0, "w1": 0.0, "twice_min": 0.0}
    for w, wmin, _, wt in rows:
        d["lower_sandwich"] = max(d["lower_sandwich"], max(wmin.lower - e.upper for e in wt))
        d["upper_sandwich"] = max(d["upper_sandwich"], max(e.value - w.value for e in wt) - 1e-8)
        d["w0"] = max(d["w0"], abs(wt[0].value - wmin.value))
        d["w1"] = max(d["w1"], c * w.value - 1e-8 - wt[-1].value)
        d["twice_min"] = max(d["twice_min"], w.value - 2 * wmin.value - 1e-8)
    ok = (d["lower_sandwich"] <= 0.0 and d["upper_sandwich"] <= 0.0 and d["w0"] <= 1e-8
          and d["w1"] <= 0.0 and d["twice_min"] <= 0.0)
    return ok, (f"{len(rows)} samples x {len(T_GRID)} t values, worst defects: W_min <= W_t "
                f"{d['lower_sandwich']:.1e}, W_t <= w + 1e-8 {d['upper_sandwich']:.1e}, "
                f"|W_0 - W_min| {d['w0']:.1e} (1e-8), W_1 bound {d['w1']:.1e}, "
                f"2 W_min bound {d['twice_min']:.1e}"), {k: _f(v) for k, v in d.items()}


def t_lipschitz(cfg: AcceptanceConfig):
    rows = _family_table(cfg)
    worst = -math.inf
    for _, _, o, wt in rows:
        v = [e.value for e in wt]
        for i, t in enumerate(T_GRID):
            for j in range(i + 1, len(T_GRID)):
                worst = max(worst, abs(v[i] - v[j]) - o * abs(t - T_GRID[j]))
    ok = worst <= 1e-9
    return ok, (f"{len(rows)} samples, all t/s pairs, worst |W_t - W_s| - O|t - s| "
                f"{worst:.2e} (tol 1e-9)"), {"worst": _f(worst)}


def _random_symmetric(X, n, r, rng) -> SymmetricRep:
    return SymmetricRep(X, random_complex((n, r, X.dim), rng), random_complex((r, r), rng))


def tensor_chain_criterion(cfg: AcceptanceConfig):
    rng = cfg.rng(9)
    tc = cfg.tensor_search
    C = scalar_space()
    scal = {"h": 0.0, "wh": 0.0, "wcb": 0.0}
    ns = cfg.count(20)
    for _ in range(ns):
        rep = _random_symmetric(C, 1, 1, rng)
        u = abs(complex(rep.x[0, 0, 0] * rep.middle[0, 0] * np.conj(rep.x[0, 0, 0])))
        ch = tensor_chain(rep, tc)
        for key, target in (("h", u), ("wh", u), ("wcb", 0.5 * u)):
            e = ch[key]
            scal[key] = max(scal[key], abs(e.lower - target), abs(e.upper - target))
    M2 = full_matrix_space(2)
    h_el = 0.0
    for _ in range(cfg.count(20)):
        x, y = random_complex((2, 2), rng), random_complex((2, 2), rng)
        rep = TensorRep(M2, M2, x.reshape(1, 1, 4), y.reshape(1, 1, 4))
        e = haagerup_norm(rep, tc)
        target = operator_norm(x) * operator_norm(y)
        h_el = max(h_el, abs(e.lower - target), abs(e.upper - target))
    X = random_space(2, 2, rng)
    chain_defect = 0.0
    nsym = cfg.count(20)
    for s in range(nsym):
        ch = tensor_chain(_random_symmetric(X, 2, 1 + s % 2, rng), tc)
        h, wh, alt, cb = ch["h"], ch["wh"], ch["wh_alt"], ch["wcb"]
        scale = h.upper
        checks = [0.5 * h.lower - cb.upper,  # 1/2 h <= wcb
                  cb.lower - min(wh.upper, alt.upper),  # wcb <= wh
                  max(wh.lower, alt.lower) - h.upper,  # wh <= h
                  cb.upper - alt.upper,  # seeded uppers are ordered
                  wh.upper - h.upper]
        chain_defect = max(chain_defect, max(checks) / scale)
    ok = (scal["h"] <= 1e-9 and scal["wh"] <= 1e-6 and scal["wcb"] <= 1e-6 and h_el <= 1e-9
          and chain_defect <= 1e-9)
    return ok, (f"scalar brackets h {scal['h']:.1e} (1e-9), wh {scal['wh']:.1e} (1e-6), "
                f"wcb {scal['wcb']:.1e} (1e-6); elementary h {h_el:.1e} (1e-9); "
                f"{nsym} symmetric chains, worst relative defect {chain_defect:.1e}"), \
        {**{f"scalar_{k}": _f(v) for k, v in scal.items()}, "elementary_h": _f(h_el),
         "chain": _f(chain_defect)}


def smith_collapse(cfg: AcceptanceConfig):
    rng = cfg.rng(10)
    X = random_space(3, 2, rng)
    M2 = full_matrix_space(2)
    samples = cfg.count(2000)
    nmaps = cfg.count(10)
    worst_level = worst_cum = -math.inf
    for _ in range(nmaps):
        phi = random_map(X, M2, rng)
        est = cb_norm_estimate(phi, "W", max_level=4, samples=samples, seed=cfg.seed,
                               tol=cfg.radius_tol)
        rows = est.witness
        lvl2 = rows[1]
        worst_level = max(worst_level, max(r.estimate for r in rows[2:]) - lvl2.estimate)
        worst_cum = max(worst_cum, rows[-1].cumulative - lvl2.cumulative)
    ok = worst_level <= 1e-6 and worst_cum <= 1e-6
    return ok, (f"{nmaps} maps into M_2, {samples} samples/level, worst excess over level 2: "
                f"per level {worst_level:.2e}, cumulative {worst_cum:.2e} (tol 1e-6)"), \
        {"per_level": _f(worst_level), "cumulative": _f(worst_cum)}


def functor_identity(cfg: AcceptanceConfig):
    rng = cfg.rng(11)
    X, Y = random_space(3, 2, rng), random_space(2, 3, rng)
    rep = check_wmin_functor(random_map(X, Y, rng), max_level=2, samples=cfg.count(200),
                             seed=cfg.seed, tol=1e-12)
    ok = rep.passed and rep.max_discrepancy <= 1e-12
    return ok, (f"{rep.trials} samples, max ratio discrepancy {rep.max_discrepancy:.2e} "
                f"(tol 1e-12)"), {"max_discrepancy": _f(rep.max_discrepancy)}


def determinism(cfg: AcceptanceConfig):
    """Two reduced-size runs of criteria 1 to 11 must serialize to the same bytes."""
    probe = replace(cfg, scale=0.1, tensor_search=SearchConfig(restarts=2, iters=150),
                    wmax_search=SearchConfig(restarts=2, iters=150))
    nums = [c.number for c in CRITERIA if c.number != 12]
    a = report_bytes(run(probe, nums, timed=False), probe)
    b = report_bytes(run(probe, nums, timed=False), probe)
    ok = a == b
    return ok, (f"two probe runs of criteria 1-11 (scale 0.1): "
                f"{'byte-identical' if ok else 'DIFFER'} ({len(a)} bytes)"), {"identical": ok}


CRITERIA: List[Criterion] = [
    Criterion(1, "corner identity", 30, corner_identity),
    Criterion(2, "Jordan block radius", 5, jordan_radius),
    Criterion(3, "radius bounds", 60, radius_bounds),
    Criterion(4, "axiom campaigns", 180, axiom_campaigns),
    Criterion(5, "W_max scalar oracle", 120, wmax_oracle),
    Criterion(6, "level-1 collapse", 20, level_one_collapse),
    Criterion(7, "sandwich and W_t family", 120, sandwich_family),
    Criterion(8, "t-Lipschitz continuity", None, t_lipschitz),
    Criterion(9, "tensor chain", 120, tensor_chain_criterion),
    Criterion(10, "level collapse of sampled cb norms", 120, smith_collapse),
    Criterion(11, "W_min functor identity", None, functor_identity),
    Criterion(12, "determinism", None, determinism),
]


def criterion(number: int) -> Criterion:
    for c in CRITERIA:
        if c.number == number:
            return c
    raise KeyError(f"no acceptance criterion {number}")


def run_one(number: int, cfg: AcceptanceConfig | None = None, timed: bool = True) -> CriterionResult:
    cfg = cfg or AcceptanceConfig()
    c = criterion(number)
    t0 = time.perf_counter()
    ok, detail, metrics = c.fn(cfg)
    dt = time.perf_counter() - t0
    return CriterionResult(c.number, c.name, bool(ok), detail, metrics, dt,
                           c.budget if (timed and cfg.scale == 1.0) else None)


def run(cfg: AcceptanceConfig | None = None, numbers: Sequence[int] | None = None,
        timed: bool = True, on_result: Callable[[CriterionResult], None] | None = None
        ) -> List[CriterionResult]:
    cfg = cfg or AcceptanceConfig()
    out = []
    for n in (numbers or [c.number for c in CRITERIA]):
        r = run_one(n, cfg, timed)
        out.append(r)
        if on_result:
            on_result(r)
    return out


def report(results: Sequence[CriterionResult], cfg: AcceptanceConfig) -> dict:
    return {"seed": cfg.seed, "radius_tol": cfg.radius_tol, "scale": cfg.scale,
            "criteria": [r.to_json() for r in results],
            "passed": all(r.passed for r in results)}


def report_bytes(results: Sequence[CriterionResult], cfg: AcceptanceConfig) -> bytes:
    return json.dumps(report(results, cfg), sort_keys=True, indent=2).encode()
