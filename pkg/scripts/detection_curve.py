"""Detection success against lam / lam_c at n=24, p=4, l=2.

lam_c is the detection scale sqrt(8 (l log n + 5) / d_l); the success rate
should rise from about 0 to 1 across the sweep.
"""

import numpy as np

from kikuchi.harness import detection_lambda
from sweep_common import parser, run


def main():
    ap = parser(__doc__, trials=50, out="detection_curve.csv")
    ap.add_argument("--n", type=int, default=24)
    ap.add_argument("--ell", type=int, default=2)
    args = ap.parse_args()
    lam_c = detection_lambda(args.n, args.ell, 4)
    lams = [float(lam_c * f) for f in np.geomspace(0.05, 1.2, 12)]
    run({"task": "detect", "grid": {"n": [args.n], "p": [4], "ell": [args.ell], "lam": lams}}, args)


if __name__ == "__main__":
    main()
