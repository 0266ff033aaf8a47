"""Profile t -> W_t(alpha) for random scalar matrices alpha, against W_min and w.

Prints one row per t: the mean of W_t / w over the samples and the worst slack of
the sandwich W_min <= W_t <= w.
"""
from dataclasses import asdict, dataclass

import numpy as np

from _common import dump, parse_config
from wradius import (numerical_radius, scalar_element, scalar_space, shift_generator, w_min,
                     w_t_norm)
from wradius.linalg import random_complex


@dataclass
class Config:
    samples: int = 30
    dim: int = 3
    block_size: int = 3
    steps: int = 11
    seed: int = 0


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    C = scalar_space()
    alphas = [random_complex((cfg.dim, cfg.dim), rng) for _ in range(cfg.samples)]
    ws = [numerical_radius(a).value for a in alphas]
    wmins = [w_min(C, scalar_element(a)).value for a in alphas]
    rows = []
    print(f"{'t':>5} {'mean W_t/w':>11} {'min W_t-W_min':>14} {'min w-W_t':>11}")
    for t in np.linspace(0.0, 1.0, cfg.steps):
        gen = shift_generator(cfg.block_size, float(t))
        wt = [w_t_norm(C, scalar_element(a), gen).value for a in alphas]
        row = {"t": float(t), "mean_ratio": float(np.mean(np.divide(wt, ws))),
               "min_above_wmin": float(np.min(np.subtract(wt, wmins))),
               "min_below_w": float(np.min(np.subtract(ws, wt)))}
        rows.append(row)
        print(f"{t:5.2f} {row['mean_ratio']:11.6f} {row['min_above_wmin']:14.3e} "
              f"{row['min_below_w']:11.3e}")
    return {"config": asdict(cfg), "rows": rows}


if __name__ == "__main__":
    cfg, out = parse_config(Config, __doc__.splitlines()[0])
    dump(out, main(cfg))
