"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs under both backends; outputs are
checked for equality before timings are reported.
"""

import argparse
import os
import timeit

import numpy as np

from chaoscipher import _pykernels, julia
from chaoscipher.primitives import drbg_generate, drbg_instantiate

try:
    from chaoscipher import _ckernels
except ImportError:
    _ckernels = None


def workloads():
    buf = drbg_generate(drbg_instantiate(b"bench", b"", b""), 60000)
    xs, ys = julia.pixel_axes(julia.DEFAULT_WINDOW, (96, 96))
    omega = julia.realize_omega(julia.OmegaSpec(b"bench", 0.5, 128))
    om_re = np.array([c.real for c in omega])
    om_im = np.array([c.imag for c in omega])
    r2 = julia.escape_radius("cubic", 0.5) ** 2
    rng = np.random.default_rng(0)
    lc_bits = rng.integers(0, 2, 500, dtype=np.uint8)
    matrix = rng.integers(0, 2, (32, 32), dtype=np.uint8)

    def orbit(k):
        return k.run_orbit(buf, 0, 0.3, 0.4, 3.5, 3000)

    def escape(k):
        out = np.zeros((96, 96), dtype=np.int32)
        k.escape_rows(xs, ys, om_re, om_im, True, 128, r2, out, 0, 96)
        return out.tobytes()

    return {
        "orbit (3000 steps, delta=3.5)": orbit,
        "escape_rows (96x96, 128 iter)": escape,
        "berlekamp_massey (M=500)": lambda k: k.linear_complexity(lc_bits),
        "gf2_rank (32x32)": lambda k: k.gf2_rank(matrix),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':<32} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for name, fn in workloads().items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:<32} {t_py:12.3f} {'-':>12} {'-':>8}")
            continue
        same = fn(_pykernels) == fn(_ckernels)
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        flag = "" if same else "  OUTPUTS DIFFER"
        print(f"{name:<32} {t_py:12.3f} {t_c:12.3f} {t_py / t_c:7.1f}x{flag}")
    print(f"(cpu count {os.cpu_count()}, best of {args.repeat})")


if __name__ == "__main__":
    main()
