"""Compare the compiled kernels against the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Each kernel is
fed identical inputs on both backends; outputs are checked for agreement
before timings are reported.
"""
import argparse
import timeit

import numpy as np

from pass_swipt import kernels
from pass_swipt.position import _Problem
from pass_swipt.power import sic_split
from pass_swipt.system import decoding_order, reference_scenario, uniform_layout


def _setup():
    sc = reference_scenario()
    order = decoding_order(sc, uniform_layout(sc))
    prob = _Problem(sc, sic_split(sc, order), order)
    rng = np.random.default_rng(0)
    grid = np.linspace(0.0, sc.waveguide_length, 4096)[:, None]
    swarm = rng.uniform(0.0, sc.waveguide_length, (10, sc.num_antennas))
    kernels.fallback.repair_spacing(swarm, None, sc.min_spacing, sc.waveguide_length)
    draws = rng.random((300, 2 + 2 * swarm.size))
    crowded = rng.uniform(4.99, 5.01, (1000, sc.num_antennas))
    return sc, prob, grid, swarm, draws, crowded


def _cases(mod, sc, prob, grid, swarm, draws, crowded):
    gains = kernels.fallback.aggregate_gains(grid, prob.rx, *prob.geometry)

    def pso():
        x = swarm.copy()
        return mod.pso_loop(x, np.zeros_like(x), draws, prob.rx, prob.n_er, *prob.geometry,
                            prob.power, prob.noise, sc.sinr_floor, sc.energy_floor,
                            0.9, 0.4, 2.0, 2.0, 2.0, sc.waveguide_length, sc.min_spacing)

    def repair():
        x = crowded.copy()
        mod.repair_spacing(x, None, sc.min_spacing, sc.waveguide_length)
        return x

    return {
        "aggregate_gains (4096 x 1 antenna)": lambda: mod.aggregate_gains(grid, prob.rx, *prob.geometry),
        "score_gains (4096 rows)": lambda: mod.score_gains(gains, prob.n_er, prob.power, prob.noise,
                                                          sc.sinr_floor, sc.energy_floor),
        "repair_spacing (1000 crowded rows)": repair,
        "pso_loop (P=10, M=4, 300 iters)": pso,
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=0.0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled is None:
        print("compiled extension not built; only the fallback is available")
        return 1
    data = _setup()
    fast = _cases(kernels.compiled, *data)
    slow = _cases(kernels.fallback, *data)
    print(f"{'kernel':<38}{'cython ms':>12}{'python ms':>12}{'speedup':>10}")
    for name in fast:
        if not _same(fast[name](), slow[name]()):
            raise SystemExit(f"{name}: backends disagree")
        t_fast = min(timeit.repeat(fast[name], number=1, repeat=args.repeat)) * 1e3
        t_slow = min(timeit.repeat(slow[name], number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<38}{t_fast:>12.3f}{t_slow:>12.3f}{t_slow / t_fast:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
