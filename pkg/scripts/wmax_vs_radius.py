"""Compare the searched W_max bracket with the certified numerical radius on scalar matrices.

On the scalar space the two agree, so the bracket gap and the upper-minus-w
excess measure how well the factorization search converges.
"""
import time
from dataclasses import asdict, dataclass

import numpy as np

from _common import dump, parse_config
from wradius import SearchConfig, numerical_radius, scalar_element, scalar_space, w_max
from wradius.linalg import random_complex


@dataclass
class Config:
    samples: int = 20
    max_dim: int = 3
    restarts: int = 20
    iters: int = 500
    seed: int = 0


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    search = SearchConfig(restarts=cfg.restarts, iters=cfg.iters, seed=cfg.seed)
    rows = []
    print(f"{'n':>2} {'w':>14} {'W_max upper':>14} {'excess':>10} {'gap':>10} {'sec':>6}")
    for _ in range(cfg.samples):
        n = int(rng.integers(1, cfg.max_dim + 1))
        a = random_complex((n, n), rng)
        w = numerical_radius(a).value
        t0 = time.perf_counter()
        est = w_max(scalar_space(), scalar_element(a), search)
        dt = time.perf_counter() - t0
        rows.append({"n": n, "w": w, "upper": est.upper, "lower": est.lower, "seconds": dt})
        print(f"{n:2d} {w:14.10f} {est.upper:14.10f} {est.upper - w:10.2e} {est.gap:10.2e} {dt:6.2f}")
    worst = max(r["upper"] - r["w"] for r in rows)
    print(f"worst excess {worst:.3e}")
    return {"config": asdict(cfg), "rows": rows, "worst_excess": worst}


if __name__ == "__main__":
    cfg, out = parse_config(Config, __doc__.splitlines()[0])
    dump(out, main(cfg))
