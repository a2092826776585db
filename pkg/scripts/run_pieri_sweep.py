"""Sweep the Pieri formula over every index set for n <= N and both readings of phi.

Writes one JSON line per instance with the winning readings and residuals.
"""

import argparse
import json
import sys
import time

from ellfk import dunkl as dk
from ellfk.scalars import SamplePlan


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--max-k", type=int, default=3)
    ap.add_argument("--kind", default="elliptic", choices=["elliptic", "trig", "rational"])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output", "-o", default="-")
    args = ap.parse_args(argv)

    plan = SamplePlan(rng_seed=args.seed)
    out = sys.stdout if args.output == "-" else open(args.output, "w")
    t0 = time.perf_counter()
    suite = dk.pieri_suite(range(2, args.max_n + 1), args.max_k,
                           lambda n: dk.Setting(n, args.kind, plan=plan, operator_check=False))
    for v in suite["verdicts"]:
        cert = v.certificate.to_json() if v.certificate else {}
        out.write(json.dumps({"identity": v.identity, "n": v.setting["relations"]["n"],
                              "readings": v.extra["conventions"], "max_residual": cert.get("max_residual")}) + "\n")
    print(f"{len(suite['verdicts'])} instances, winning reading: {suite['convention']}, "
          f"all pass: {suite['passed']}, {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0 if suite["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
