"""Closed form vs. Schur-expansion oracle over presets, y choices and (g, n)."""
import argparse
import time

from hurwitz_npoint.closed_form import TaskSpec, compute_H, make_cache
from hurwitz_npoint.oracle import model_F, oracle_npoint
from hurwitz_npoint.presets import make_spec

CASES = [(0, 1), (0, 2), (1, 1), (0, 3), (1, 2), (2, 1), (0, 4)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=6, help="z-degree for n >= 3")
    ap.add_argument("--order-small", type=int, default=8, help="z-degree for n <= 2")
    ap.add_argument("--presets", nargs="+", default=["usual", "monotone", "strictly_monotone"])
    args = ap.parse_args()
    top = max(args.order, args.order_small)
    failures = 0
    for preset in args.presets:
        for y in (None, [1, 1]):
            spec = make_spec(preset, order=top, y=y, g=2, n=4)
            for g, n in CASES:
                N = args.order_small if n <= 2 else args.order
                t0 = time.perf_counter()
                task = TaskSpec(g, n, N)
                H = compute_H(task, make_cache(spec, task))
                O = oracle_npoint(g, n, model_F(spec, N, n, g), spec, N)
                ok = H == O
                failures += not ok
                ylab = "z" if y is None else "z+z^2"
                print(f"{preset:18s} y={ylab:6s} (g,n)=({g},{n}) order {N}: "
                      f"{'MATCH' if ok else 'MISMATCH'}  {time.perf_counter() - t0:.2f}s", flush=True)
    print("all match" if not failures else f"{failures} mismatches")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
