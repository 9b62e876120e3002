"""Time one collapsed Gibbs sweep on each available backend.

    python3 benchmarks/bench_kernels.py [--sizes 100 200 400] [--sweeps 20]
"""
import argparse
import time

import numpy as np

from digraphon import core
from digraphon._kernels import BACKENDS
from digraphon.dirm import DirmHyperParams, sample_crp
from digraphon.inference import gibbs_sweep, init_state


def time_backend(backend, g, h, sweeps, seed):
    rng = np.random.default_rng(seed)
    state = init_state(g, sample_crp(len(g), h.alpha, rng).z, h)
    gibbs_sweep(state, g, h, rng, backend=backend)  # warm up
    t0 = time.perf_counter()
    for _ in range(sweeps):
        state = gibbs_sweep(state, g, h, rng, backend=backend)
    return (time.perf_counter() - t0) / sweeps, state.z


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--sweeps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    h = DirmHyperParams()
    names = sorted(BACKENDS)
    print("n\t" + "\t".join(f"{b}_ms" for b in names) + ("\tspeedup\tsame_z" if len(names) > 1 else ""))
    for n in args.sizes:
        g = core.sample_digraph(core.half_digraphon(), n, args.seed).graph
        res = {b: time_backend(b, g, h, args.sweeps, args.seed) for b in names}
        row = [str(n)] + [f"{res[b][0] * 1e3:.2f}" for b in names]
        if len(names) > 1:
            row.append(f"{res['python'][0] / res['cython'][0]:.1f}x")
            row.append(str(np.array_equal(res["python"][1], res["cython"][1])))
        print("\t".join(row))


if __name__ == "__main__":
    main()
