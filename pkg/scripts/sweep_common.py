"""Shared argument handling and summary printing for the sweep scripts."""

import argparse
import json

from kikuchi.harness import ExperimentConfig, run_sweep, summarize


def parser(description: str, trials: int, out: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--trials", type=int, default=trials)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=out)
    return ap


def run(raw: dict, args) -> list:
    raw = {**raw, "trials": args.trials, "seed": args.seed, "workers": args.workers}
    cfg = ExperimentConfig.from_dict(raw)
    records = run_sweep(cfg, args.out)
    for s in summarize(records):
        row = {**s.params, "trials": s.trials, "errors": s.errors, "success_rate": s.success_rate}
        if s.mean_corr is not None:
            row["mean_corr"] = round(s.mean_corr, 4)
        if s.ratio_quantiles is not None:
            row["ratio_median"] = round(s.ratio_quantiles[1], 4)
        print(json.dumps(row))
    print(f"wrote {len(records)} rows to {args.out} (config hash {cfg.config_hash()})")
    return records
