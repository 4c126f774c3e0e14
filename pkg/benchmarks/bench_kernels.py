"""Time the hot kernels with numba and with the pure-Python fallback.

    python benchmarks/bench_kernels.py            # both backends, side by side
    python benchmarks/bench_kernels.py --worker   # one backend, per RS_CANCEL_NUMBA
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workloads():
    import numpy as np

    from rscancel import _kernels
    from rscancel.coefficients import gen_power_coefficients
    from rscancel.genericity import PatternQuery, SubdivisionModel, mc_graphical, mc_presentation
    from rscancel.graph import gamma_syllable
    from rscancel.pieces import max_piece_syllable
    from rscancel.rsgraph import build_gamma, label_underlying
    from rscancel.underlying import projective_underlying

    phi = projective_underlying(7)
    table = gen_power_coefficients(phi.n)

    def girth():
        phi._girth.clear()
        return phi.girth

    def pieces_and_gamma():
        g = build_gamma(label_underlying(phi, table), table, phi).graph
        return max_piece_syllable(g), gamma_syllable(g)

    def few_relator():
        return mc_presentation(PatternQuery(12, 1, 20000, 1)).hits

    def graphical():
        return mc_graphical(SubdivisionModel.cycle(6, 3, 12), 300, 1).hits

    def fold():
        rng = np.random.default_rng(0)
        nv = 4000
        src = rng.integers(0, nv, 8000)
        dst = rng.integers(0, nv, 8000)
        lab = rng.integers(0, 2, 8000)
        rep, _, _ = _kernels.fold_generator_graph(nv, src, dst, lab)
        return int((rep == np.arange(nv)).sum())

    return {"girth": girth, "pieces_and_gamma": pieces_and_gamma, "few_relator_mc": few_relator,
            "graphical_mc": graphical, "fold": fold}


def run_worker(repeat):
    from rscancel import _kernels
    out = {"backend": _kernels.BACKEND, "times": {}, "results": {}}
    for name, fn in workloads().items():
        res = fn()  # warm-up, includes compilation
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["times"][name] = best
        out["results"][name] = str(res)
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--worker", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if args.worker:
        run_worker(args.repeat)
        return
    runs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, RS_CANCEL_NUMBA=flag)
        res = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(args.repeat)],
                             env=env, capture_output=True, text=True, check=True)
        runs[flag] = json.loads(res.stdout.strip().splitlines()[-1])
    fast, slow = runs["1"], runs["0"]
    print(f"{'kernel':<18} {fast['backend']:>10} {slow['backend']:>10} {'speedup':>8}  same result")
    for name in fast["times"]:
        a, b = fast["times"][name], slow["times"][name]
        same = fast["results"][name] == slow["results"][name]
        print(f"{name:<18} {a:>9.4f}s {b:>9.4f}s {b / a:>7.1f}x  {same}")


if __name__ == "__main__":
    main()
