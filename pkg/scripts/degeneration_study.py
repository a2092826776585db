"""How the elliptic Pieri residual shrinks as the coupling degenerates.

With K = kappa delta^2 and lambda = delta Lambda, the multiparameter identity
holds in the elliptic algebra up to O(delta^2).  Prints the ideal residual and
the error of the spectral constants for a range of delta.
"""

import argparse
import sys

import numpy as np

from ellfk import dunkl as dk


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    I = tuple(range(1, min(args.n, 3) + 1))
    print(f"E_{args.k}{I} in rank {args.n}")
    print(f"{'delta':>9} {'residual':>11} {'ratio':>7} {'p rel err':>10} {'Richardson':>11}")
    for delta in np.geomspace(1e-1, 1e-4, 7):
        v = dk.degeneration_coherence(args.n, args.k, I, delta=delta, seed=args.seed)
        e = v.extra
        print(f"{delta:9.2e} {e['residual_delta']:11.3e} {e['ratio']:7.3f} "
              f"{e['p_rel_error']:10.2e} {e['p_richardson_rel_error']:11.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
