"""Odd-order certificate against the exhaustive norm on random sign tensors (p=3)."""

from sweep_common import parser, run


def main():
    ap = parser(__doc__, trials=50, out="odd_certifier.csv")
    args = ap.parse_args()
    run({"task": "certify-odd", "grid": {"n": [6, 8, 10], "p": [3], "ell": [2]}}, args)


if __name__ == "__main__":
    main()
