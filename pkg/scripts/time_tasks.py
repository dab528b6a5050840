"""Wall time of compute_H for a spread of (g, n) at a fixed order."""
import argparse
import time

from hurwitz_npoint.closed_form import TaskSpec, compute_H, make_cache
from hurwitz_npoint.presets import make_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=6)
    ap.add_argument("--preset", default="monotone")
    args = ap.parse_args()
    spec = make_spec(args.preset, order=args.order, g=3, n=5)
    for g, n in [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (0, 3), (1, 3), (2, 3), (0, 4), (1, 4), (0, 5)]:
        t0 = time.perf_counter()
        task = TaskSpec(g, n, args.order)
        H = compute_H(task, make_cache(spec, task))
        print(f"(g,n)=({g},{n})  {len(H.terms):4d} terms  {time.perf_counter() - t0:7.2f}s", flush=True)


if __name__ == "__main__":
    main()
