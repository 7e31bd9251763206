"""One power step from a guess at correlation tau (p=3, n=16, lam=5/sqrt(n))."""

import argparse
import csv
import math

import numpy as np

from kikuchi import rng
from kikuchi.tensor_model import boost, correlation, generate


def seeded_guess(spike, tau, gen):
    x = spike / np.linalg.norm(spike)
    w = gen.standard_normal(x.size)
    w -= (w @ x) * x
    return tau * x + math.sqrt(1 - tau**2) * w / np.linalg.norm(w)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="boosting.csv")
    args = ap.parse_args()
    lam = 5 / math.sqrt(args.n)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau", "trial", "seed", "corr_before", "corr_after"])
        for tau in (0.1, 0.2, 0.3, 0.5, 0.7):
            after = []
            for t in range(args.trials):
                seed = rng.derive_seed(args.seed, "boost", t)
                inst = generate(args.n, 3, lam, seed=seed, dense=True)
                u = seeded_guess(inst.spike, tau, np.random.default_rng(seed))
                after.append(correlation(boost(inst, u), inst.spike))
                w.writerow([tau, t, seed, repr(correlation(u, inst.spike)), repr(after[-1])])
            print(f"tau={tau}: mean corr after one step {np.mean(after):.4f}, "
                  f"improved in {np.mean(np.array(after) > tau):.0%} of trials")


if __name__ == "__main__":
    main()
