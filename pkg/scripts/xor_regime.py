"""k-XOR refutation: certified bound relative to m/2 as m grows past the regime value."""

from kikuchi.xor_refute import refutation_regime_m
from sweep_common import parser, run


def main():
    ap = parser(__doc__, trials=40, out="xor_regime.csv")
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--beta", type=float, default=0.5)
    args = ap.parse_args()
    m_star = refutation_regime_m(args.n, 2, 1, args.beta)
    ms = sorted({max(1, m_star // 16), m_star // 4, m_star, 2 * m_star})
    run({"task": "refute-xor", "grid": {"n": [args.n], "k": [2], "ell": [1], "m": ms, "beta": [args.beta]}}, args)


if __name__ == "__main__":
    main()
