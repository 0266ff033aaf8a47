"""Sampled W-cb estimates level by level for random maps into M_k.

For a map into M_k the estimates should stop growing after level k; the table
shows the per-level estimate and how far levels above k exceed level k.
"""
from dataclasses import asdict, dataclass

import numpy as np

from _common import dump, parse_config
from wradius import cb_norm_estimate, full_matrix_space, random_map, random_space


@dataclass
class Config:
    maps: int = 5
    target: int = 2
    domain_dim: int = 3
    domain_ambient: int = 3
    max_level: int = 4
    samples: int = 500
    seed: int = 0


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    X = random_space(cfg.domain_ambient, cfg.domain_dim, rng)
    M = full_matrix_space(cfg.target)
    rows = []
    for i in range(cfg.maps):
        est = cb_norm_estimate(random_map(X, M, rng), "W", cfg.max_level, cfg.samples, cfg.seed)
        levels = [r.estimate for r in est.witness]
        k = min(cfg.target, cfg.max_level)
        excess = max((v - levels[k - 1] for v in levels[k:]), default=0.0)
        rows.append({"map": i, "levels": levels, "excess": excess})
        print(f"map {i}: " + "  ".join(f"L{n + 1} {v:.6f}" for n, v in enumerate(levels))
              + f"  excess over L{k} {excess:.2e}")
    return {"config": asdict(cfg), "rows": rows}


if __name__ == "__main__":
    cfg, out = parse_config(Config, __doc__.splitlines()[0])
    dump(out, main(cfg))
