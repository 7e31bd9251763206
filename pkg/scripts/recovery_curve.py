"""Recovery correlation against lam for even p (n=24, p=4, l in {2, 3})."""

import math

from kikuchi.combinat import d_ell
from sweep_common import parser, run


def main():
    ap = parser(__doc__, trials=20, out="recovery_curve.csv")
    ap.add_argument("--n", type=int, default=24)
    args = ap.parse_args()
    base = math.sqrt(math.log(args.n) / d_ell(args.n, 2, 4))
    lams = [round(base * f, 6) for f in (1, 2, 4, 6, 8, 10)]
    run({"task": "recover", "grid": {"n": [args.n], "p": [4], "ell": [2, 3], "lam": lams}}, args)


if __name__ == "__main__":
    main()
