"""Check the worked rank-5 E_3 formula under each reading of its pair coefficients."""

import sys

from ellfk import dunkl as dk


def main():
    st = dk.Setting(5, "elliptic", operator_check=False)
    for style in ("phi_x", "phi_lambda", "psi", "psi_A0"):
        v = dk.e3_example_check(st, style)
        res = v.certificate.to_json()["max_residual"]
        print(f"{style:<11} {'holds' if v.passed else 'fails':<6} residual {res:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
