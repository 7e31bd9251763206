"""``kikuchi`` command line.

Exit status: 0 on success, 2 for invalid parameters or configs, 3 when a
capacity limit is hit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import io, johnson
from .detect_recover import detect, recover
from .errors import CapabilityError, CapacityError, ParameterError
from .harness import ExperimentConfig, run_sweep, summarize
from .odd_certifier import brute_force_rademacher_norm, certify_rademacher_norm, random_sign_tensor
from .spectral import EigOptions
from .tensor_model import SpikePrior, generate
from .xor_refute import random_formula, refute

EXIT_OK, EXIT_INVALID, EXIT_CAPACITY = 0, 2, 3


def _eig_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--method", choices=("lanczos", "power"), default="lanczos")
    p.add_argument("--seed", type=int, default=0, help="seed for the eigensolver start vector")


def _eig(args) -> EigOptions:
    return EigOptions(tol=args.tol, max_iters=args.max_iters, seed=args.seed, method=args.method)


def _emit(obj: dict) -> None:
    print(json.dumps(obj, separators=(",", ":")))


def cmd_generate(args) -> int:
    if args.out is None:
        raise ParameterError("--out is required")
    if args.kind == "instance":
        inst = generate(args.n, args.p, args.lam, prior=SpikePrior(args.prior), seed=args.seed)
        io.write_instance(inst, args.out, include_spike=not args.no_spike)
        _emit({"kind": "instance", "n": args.n, "p": args.p, "lam": args.lam, "seed": args.seed, "out": args.out})
    elif args.kind == "formula":
        formula = random_formula(args.n, args.k, args.m, seed=args.seed)
        io.write_formula(formula, args.out)
        _emit({"kind": "formula", "n": args.n, "k": args.k, "m": args.m, "seed": args.seed, "out": args.out})
    else:
        io.write_dense(random_sign_tensor(args.n, args.p, seed=args.seed), args.out)
        _emit({"kind": "sign-tensor", "n": args.n, "p": args.p, "seed": args.seed, "out": args.out})
    return EXIT_OK


def cmd_detect(args) -> int:
    inst = io.read_instance(args.instance)
    lam = args.lam if args.lam is not None else inst.lam
    rep = detect(inst.tensor, args.ell, lam, _eig(args))
    _emit(rep.as_dict())
    return EXIT_OK


def cmd_recover(args) -> int:
    inst = io.read_instance(args.instance)
    spike = inst.spike if io.has_spike(inst) else None
    rep = recover(inst.tensor, args.ell, _eig(args), spike=spike)
    _emit(rep.as_dict())
    return EXIT_OK


def cmd_refute(args) -> int:
    formula = io.read_formula(args.formula)
    cert = refute(formula, args.ell, _eig(args))
    out = {"m": cert.m, "bound": cert.bound, "ratio": cert.ratio if cert.m else None,
           "converged": cert.converged}
    if args.beta is not None:
        out["strong"] = cert.bound <= cert.m / 2 * (1 + args.beta)
    _emit(out)
    return EXIT_OK


def cmd_certify(args) -> int:
    y = io.read_dense(args.tensor)
    cert = certify_rademacher_norm(y, args.ell, _eig(args))
    out = {"n": cert.n, "p": cert.p, "ell": cert.ell, "bound": cert.bound, "norm": cert.norm_upper,
           "converged": cert.converged}
    if args.brute_force:
        out["brute_force"] = brute_force_rademacher_norm(y)
    _emit(out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    spect = johnson.spectrum(args.n, args.ell, args.p)
    print("m,mu,dim")
    for m, mu, dim in spect.rows():
        print(f"{m},{mu},{dim}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig.from_json(args.config).with_overrides(seed=args.seed, out=args.out)
    records = run_sweep(cfg)
    for cell in summarize(records):
        _emit(cell.as_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kikuchi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance, formula or sign tensor")
    g.add_argument("--kind", choices=("instance", "formula", "sign-tensor"), default="instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, default=4)
    g.add_argument("--lam", type=float, default=0.0)
    g.add_argument("--prior", choices=("rademacher", "sphere"), default="rademacher")
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--no-spike", action="store_true", help="omit the planted vector from the file")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("detect", help="threshold the top eigenvalue")
    d.add_argument("instance")
    d.add_argument("--ell", type=int, required=True)
    d.add_argument("--lam", type=float, default=None, help="tested SNR (default: the file's)")
    _eig_args(d)
    d.set_defaults(func=cmd_detect)

    r = sub.add_parser("recover", help="estimate the planted vector")
    r.add_argument("instance")
    r.add_argument("--ell", type=int, required=True)
    _eig_args(r)
    r.set_defaults(func=cmd_recover)

    x = sub.add_parser("refute-xor", help="bound the satisfiable fraction of a k-XOR formula")
    x.add_argument("formula")
    x.add_argument("--ell", type=int, required=True)
    x.add_argument("--beta", type=float, default=None)
    _eig_args(x)
    x.set_defaults(func=cmd_refute)

    c = sub.add_parser("certify-odd", help="bound the hypercube injective norm of a dense tensor")
    c.add_argument("tensor")
    c.add_argument("--ell", type=int, required=True)
    c.add_argument("--brute-force", action="store_true")
    _eig_args(c)
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("spectrum", help="print the exact Johnson spectrum as CSV")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--ell", type=int, required=True)
    s.set_defaults(func=cmd_spectrum)

    w = sub.add_parser("sweep", help="run a JSON-configured experiment sweep")
    w.add_argument("--config", required=True)
    w.add_argument("--seed", type=int, default=None, help="override the master seed")
    w.add_argument("--out", default=None, help="override the CSV path")
    w.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"kikuchi: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ParameterError, CapabilityError, OSError) as exc:
        print(f"kikuchi: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
