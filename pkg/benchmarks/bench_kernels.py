"""Compiled vs numpy pair sums for the twist kernel.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3] [--sizes 500 1000 2000]
"""
import argparse
import time

from entroscope import _backend, geometry, twist


def _best_of(fn, repeat):
    best, value = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    args = ap.parse_args()
    have = ["python"] + (["cython"] if _backend.BACKEND == "cython" else [])
    if len(have) == 1:
        print("compiled kernels not built; only the numpy backend is timed")
    cfg = twist.TwistKernelConfig(dim=2)
    print(f"{'case':<22}{'panels':>8}" + "".join(f"{b + ' [s]':>14}" for b in have) + f"{'speedup':>10}")
    for n in args.sizes:
        cases = [
            ("circle self", lambda b, m=geometry.discretize_boundary(geometry.Circle(1.0), n, 2):
                twist.self_entropy_integral(m, 0.09, cfg, backend=b)),
            ("segments cross", lambda b, a=geometry.discretize_boundary(
                    geometry.Segment((0.0, 0.0), (0.0, 1.0)), n, 2),
                c=geometry.discretize_boundary(geometry.Segment((1.0, 1.0), (1.0, 0.0)), n, 2):
                twist.cross_mutual_information(a, c, cfg, backend=b)),
        ]
        for name, run in cases:
            times, values = [], []
            for b in have:
                t, v = _best_of(lambda: run(b), args.repeat)
                times.append(t)
                values.append(v)
            speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else f"{'-':>10}"
            print(f"{name:<22}{n:>8}" + "".join(f"{t:>14.4f}" for t in times) + speed)
            if len(values) > 1 and abs(values[0] - values[1]) > 1e-11 * abs(values[0]):
                print(f"  warning: backends disagree: {values[0]!r} vs {values[1]!r}")


if __name__ == "__main__":
    main()
