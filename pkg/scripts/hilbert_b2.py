"""Ranks of the braided symmetrizer for a rank-two root system, degree by degree."""

import argparse
import sys

import sympy

from ellfk.nichols import hilbert_series

EXPECTED = {"B2": (1 + sympy.Symbol("t")) ** 4 * (1 + sympy.Symbol("t") ** 2) ** 2}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--type", default="B2", choices=["A2", "B2", "G2"])
    ap.add_argument("--max-degree", type=int, default=5)
    args = ap.parse_args(argv)

    t = sympy.Symbol("t")
    ref = sympy.Poly(EXPECTED[args.type], t).all_coeffs()[::-1] if args.type in EXPECTED else None
    ok = True
    for row in hilbert_series(args.type, args.max_degree):
        want = ref[row["d"]] if ref and row["d"] < len(ref) else None
        mark = "" if want is None else ("  ok" if want == row["rank"] else f"  expected {want}")
        ok &= want is None or want == row["rank"]
        print(f"d={row['d']}  rank={row['rank']:>3}  ({row['method']}){mark}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
