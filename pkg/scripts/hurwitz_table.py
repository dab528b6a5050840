"""Print h_{g,mu} for a preset, straight from the partition function."""
import argparse

from hurwitz_npoint.oracle import hurwitz_number, model_F, partitions_up_to
from hurwitz_npoint.presets import make_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="usual")
    ap.add_argument("--weight", type=int, default=4, help="largest |mu|")
    ap.add_argument("--gmax", type=int, default=1)
    ap.add_argument("--nmax", type=int, default=3)
    args = ap.parse_args()
    spec = make_spec(args.preset, order=args.weight, g=args.gmax, n=args.nmax)
    F = model_F(spec, args.weight, args.nmax, args.gmax)
    print(f"# {spec.name}")
    for g in range(args.gmax + 1):
        for lam in partitions_up_to(args.weight):
            if 0 < len(lam) <= args.nmax:
                print(f"g={g}  mu={lam.parts}  h={hurwitz_number(g, lam.parts, F)}")


if __name__ == "__main__":
    main()
