"""Odd-p Kikuchi recovery against tensor unfolding and the power method (p=3)."""

from sweep_common import parser, run


def main():
    ap = parser(__doc__, trials=20, out="baseline_compare.csv")
    ap.add_argument("--n", type=int, default=16)
    args = ap.parse_args()
    lams = [round(f * args.n ** -0.75, 6) for f in (1.0, 1.5, 2.0, 3.0)]
    run({"task": "baseline-compare", "grid": {"n": [args.n], "p": [3], "ell": [1, 2], "lam": lams}}, args)


if __name__ == "__main__":
    main()
