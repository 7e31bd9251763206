"""Seeded parameter sweeps written to CSV, and per-cell aggregation.

A config is JSON::

    {"schema": 1, "task": "detect", "grid": {"n": [24], "p": [4], "ell": [2],
     "lam": [0.5, 1.0]}, "trials": 50, "seed": 7,
     "eig": {"tol": 1e-8}, "options": {}, "workers": 4, "out": "runs/detect.csv"}

Cells are the cartesian product of the grid lists, in the key order of
``GRID_KEYS``. Each trial draws everything from ``derive_seed(seed, "trial",
cell, trial)``, so any row can be reproduced on its own. Every column except
``wall_time`` is a pure function of the config without ``out`` (and
``workers``). Trials of one cell run on a thread pool; results are written in
(cell, trial) order.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import math
import time
from functools import partial
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import johnson, rng
from .combinat import binom, d_ell
from .detect_recover import detect, recover, recover_odd
from .errors import ConfigError, ParameterError
from .kikuchi_matrix import ell_range
from .odd_certifier import DIM_CAP, brute_force_rademacher_norm, certify_rademacher_norm, random_sign_tensor
from .spectral import EigOptions
from .tensor_model import SpikePrior, correlation, generate, tensor_power_method, tensor_unfold
from .xor_refute import brute_force_max_satisfied, random_formula, refutation_regime_m, refute

SCHEMA = 1
TASKS = ("detect", "recover", "refute-xor", "certify-odd", "spectrum", "baseline-compare")
GRID_KEYS = ("n", "p", "k", "ell", "lam", "m", "beta")
REQUIRED = {
    "detect": ("n", "p", "ell", "lam"),
    "recover": ("n", "p", "ell", "lam"),
    "refute-xor": ("n", "k", "ell"),
    "certify-odd": ("n", "p", "ell"),
    "spectrum": ("n", "p", "ell"),
    "baseline-compare": ("n", "p", "ell", "lam"),
}
ALLOWED = {
    "detect": REQUIRED["detect"],
    "recover": REQUIRED["recover"],
    "refute-xor": ("n", "k", "ell", "m", "beta"),
    "certify-odd": REQUIRED["certify-odd"],
    "spectrum": REQUIRED["spectrum"],
    "baseline-compare": REQUIRED["baseline-compare"],
}
OPTION_DEFAULTS = {
    "detect": {"test_lam": None, "noise_scale": 1.0},
    "recover": {"corr_threshold": 0.9, "noise_scale": 1.0, "prior": "rademacher"},
    "refute-xor": {"brute_force_max_n": 16},
    "certify-odd": {"brute_force_max_n": 16},
    "spectrum": {"tol": 1e-8},
    "baseline-compare": {"power_iters": 100, "noise_scale": 1.0},
}
SPECTRUM_DENSE_CAP = johnson.DENSE_CAP

COLUMNS = (
    "task", "cell", "n", "p", "ell", "lam", "k", "m", "beta", "trial", "seed",
    "success", "verdict_planted", "verdict_null", "lambda_max", "threshold",
    "corr", "corr_unfold", "corr_power", "bound", "ratio", "brute_force", "sound",
    "residual", "converged", "error", "wall_time",
)
TIMING_COLUMNS = ("wall_time",)


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    grid: dict
    trials: int = 1
    seed: int = 0
    eig: EigOptions = field(default_factory=EigOptions)
    options: dict = field(default_factory=dict)
    workers: int = 1
    out: str | None = None
    schema: int = SCHEMA

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        known = {"schema", "task", "grid", "trials", "seed", "eig", "options", "workers", "out"}
        extra = set(raw) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if raw.get("schema", SCHEMA) != SCHEMA:
            raise ConfigError(f"unsupported schema {raw.get('schema')!r}, expected {SCHEMA}")
        try:
            eig = EigOptions(**raw.get("eig", {}))
        except TypeError as exc:
            raise ConfigError(f"bad eig options: {exc}") from exc
        except ParameterError as exc:
            raise ConfigError(f"bad eig options: {exc}") from exc
        cfg = cls(
            task=raw.get("task"),
            grid={k: list(v) if isinstance(v, (list, tuple)) else [v]
                  for k, v in dict(raw.get("grid", {})).items()},
            trials=raw.get("trials", 1),
            seed=raw.get("seed", 0),
            eig=eig,
            options=dict(raw.get("options", {})),
            workers=raw.get("workers", 1),
            out=raw.get("out"),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def with_overrides(self, seed: int | None = None, out: str | None = None) -> "ExperimentConfig":
        raw = self.to_dict()
        if seed is not None:
            raw["seed"] = seed
        if out is not None:
            raw["out"] = out
        return ExperimentConfig.from_dict(raw)

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "task": self.task,
            "grid": {k: list(v) for k, v in self.grid.items()},
            "trials": self.trials,
            "seed": self.seed,
            "eig": asdict(self.eig),
            "options": dict(self.options),
            "workers": self.workers,
            "out": self.out,
        }

    def resolved_options(self) -> dict:
        opts = dict(OPTION_DEFAULTS[self.task])
        opts.update(self.options)
        return opts

    def config_hash(self) -> str:
        """Hash of everything that determines the outcome columns."""
        raw = self.to_dict()
        raw.pop("out")
        raw.pop("workers")
        raw["options"] = self.resolved_options()
        text = json.dumps(raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def cells(self) -> list[dict]:
        keys = [k for k in GRID_KEYS if k in self.grid]
        return [dict(zip(keys, values)) for values in itertools.product(*(self.grid[k] for k in keys))]

    def validate(self) -> None:
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if not isinstance(self.trials, int) or isinstance(self.trials, bool) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        unknown_opts = set(self.options) - set(OPTION_DEFAULTS[self.task])
        if unknown_opts:
            raise ConfigError(f"unknown options for {self.task}: {sorted(unknown_opts)}")
        missing = [k for k in REQUIRED[self.task] if k not in self.grid]
        if missing:
            raise ConfigError(f"grid for {self.task} is missing {missing}")
        extra = set(self.grid) - set(ALLOWED[self.task])
        if extra:
            raise ConfigError(f"grid keys {sorted(extra)} do not apply to {self.task}")
        for key, values in self.grid.items():
            if not values:
                raise ConfigError(f"grid list {key!r} is empty")
        if self.task == "refute-xor" and "m" not in self.grid and "beta" not in self.grid:
            raise ConfigError("refute-xor needs m or beta in the grid")
        for cell in self.cells():
            try:
                _validate_cell(self.task, cell, self.resolved_options())
            except (ParameterError, TypeError, ValueError) as exc:
                raise ConfigError(f"invalid cell {cell}: {exc}") from exc


def _int(cell: dict, key: str) -> int:
    v = cell[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParameterError(f"{key} must be an integer, got {v!r}")
    return v


def _validate_cell(task: str, cell: dict, options: dict) -> None:
    n = _int(cell, "n")
    if task == "refute-xor":
        k, ell = _int(cell, "k"), _int(cell, "ell")
        if k < 2 or k % 2 or k > n:
            raise ParameterError(f"need even 2 <= k <= n, got k={k}")
        lo, hi = ell_range(n, k)
        if not (lo <= ell <= hi):
            raise ParameterError(f"level l={ell} outside [{lo}, {hi}]")
        if "m" in cell and _int(cell, "m") < 0:
            raise ParameterError("m must be non-negative")
        if "beta" in cell and not float(cell["beta"]) > 0:
            raise ParameterError("beta must be positive")
        return
    p, ell = _int(cell, "p"), _int(cell, "ell")
    if n < p or p < 2:
        raise ParameterError(f"need n >= p >= 2, got n={n}, p={p}")
    if task in ("detect", "spectrum") and p % 2:
        raise ParameterError(f"{task} needs even p")
    if task in ("certify-odd", "baseline-compare") and p % 2 == 0:
        raise ParameterError(f"{task} needs odd p")
    if task == "baseline-compare" and p != 3:
        raise ParameterError("the unfolding baseline is defined for p = 3")
    if task == "certify-odd":
        if ell < p - 1:
            raise ParameterError(f"need l >= p - 1, got l={ell}")
        if n**ell > DIM_CAP:
            raise ParameterError(f"n^l = {n**ell} exceeds the dimension cap {DIM_CAP}")
        return
    lo, hi = ell_range(n, p)
    if not (lo <= ell <= hi):
        raise ParameterError(f"level l={ell} outside [{lo}, {hi}]")
    if task == "spectrum":
        if binom(n, ell) > SPECTRUM_DENSE_CAP:
            raise ParameterError(f"C(n, l) exceeds the dense cap {SPECTRUM_DENSE_CAP}")
        return
    lam = float(cell["lam"])
    if not math.isfinite(lam) or lam < 0:
        raise ParameterError(f"lam must be finite and non-negative, got {lam}")
    if task == "detect":
        test = options.get("test_lam")
        if test is None and lam <= 0:
            raise ParameterError("lam = 0 needs options.test_lam for the detection threshold")
        if test is not None and not float(test) > 0:
            raise ParameterError("options.test_lam must be positive")


@dataclass
class TrialRecord:
    task: str
    cell: int
    n: int
    p: int | None = None
    ell: int | None = None
    lam: float | None = None
    k: int | None = None
    m: int | None = None
    beta: float | None = None
    trial: int = 0
    seed: int = 0
    success: bool | None = None
    verdict_planted: str | None = None
    verdict_null: str | None = None
    lambda_max: float | None = None
    threshold: float | None = None
    corr: float | None = None
    corr_unfold: float | None = None
    corr_power: float | None = None
    bound: float | None = None
    ratio: float | None = None
    brute_force: float | None = None
    sound: bool | None = None
    residual: float | None = None
    converged: bool | None = None
    error: str | None = None
    wall_time: float | None = None

    def to_row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in COLUMNS]

    def outcome(self) -> tuple:
        return tuple(getattr(self, c) for c in COLUMNS if c not in TIMING_COLUMNS)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


_INT_COLS = {"cell", "n", "p", "ell", "k", "m", "trial", "seed"}
_BOOL_COLS = {"success", "sound", "converged"}
_STR_COLS = {"task", "verdict_planted", "verdict_null", "error"}


def _parse(col: str, text: str):
    if text == "":
        return None
    if col in _INT_COLS:
        return int(text)
    if col in _BOOL_COLS:
        return text == "true"
    if col in _STR_COLS:
        return text
    return float(text)


def _eig_for(opts: EigOptions, seed: int) -> EigOptions:
    return EigOptions(opts.tol, opts.max_iters, seed, opts.want, opts.method, opts.krylov_dim)


def _run_trial(cfg: ExperimentConfig, options: dict, cell_idx: int, cell: dict, trial: int) -> TrialRecord:
    seed = rng.derive_seed(cfg.seed, "trial", cell_idx, trial)
    rec = TrialRecord(task=cfg.task, cell=cell_idx, n=cell["n"], p=cell.get("p"), ell=cell.get("ell"),
                      lam=None if "lam" not in cell else float(cell["lam"]), k=cell.get("k"),
                      m=cell.get("m"), beta=None if "beta" not in cell else float(cell["beta"]),
                      trial=trial, seed=seed)
    eig = _eig_for(cfg.eig, rng.derive_seed(seed, "eig"))
    start = time.perf_counter()
    try:
        _TASK_RUNNERS[cfg.task](rec, cell, options, eig, seed)
    except Exception as exc:  # recorded in the row, never aborts the sweep
        rec.error = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        rec.success = False
    rec.wall_time = time.perf_counter() - start
    return rec


def _detect(rec, cell, options, eig, seed):
    n, p, ell, lam = cell["n"], cell["p"], cell["ell"], float(cell["lam"])
    test_lam = float(options["test_lam"]) if options["test_lam"] is not None else lam
    planted = generate(n, p, lam, seed=rng.derive_seed(seed, "planted"),
                       noise_scale=options["noise_scale"])
    null = generate(n, p, 0.0, seed=rng.derive_seed(seed, "null"), noise_scale=options["noise_scale"])
    a = detect(planted.tensor, ell, test_lam, eig)
    b = detect(null.tensor, ell, test_lam, eig)
    rec.verdict_planted, rec.verdict_null = a.verdict, b.verdict
    rec.lambda_max, rec.threshold = a.lambda_max, a.threshold
    rec.residual = max(a.residual, b.residual)
    rec.converged = a.converged and b.converged
    rec.success = a.verdict == "planted" and b.verdict == "null"


def _prior(name: str) -> SpikePrior:
    if name not in ("rademacher", "sphere"):
        raise ParameterError(f"prior must be rademacher or sphere, got {name!r}")
    return SpikePrior(name)


def _recover(rec, cell, options, eig, seed):
    inst = generate(cell["n"], cell["p"], float(cell["lam"]), prior=_prior(options["prior"]),
                    seed=rng.derive_seed(seed, "instance"), noise_scale=options["noise_scale"])
    rep = recover(inst.tensor, cell["ell"], eig, spike=inst.spike)
    rec.corr, rec.lambda_max, rec.residual, rec.converged = rep.corr, rep.top_value, rep.residual, rep.converged
    rec.threshold = float(options["corr_threshold"])
    rec.success = rep.corr >= rec.threshold


def _refute(rec, cell, options, eig, seed):
    n, k, ell = cell["n"], cell["k"], cell["ell"]
    beta = rec.beta
    m = cell["m"] if "m" in cell else refutation_regime_m(n, k, ell, beta)
    rec.m = m
    formula = random_formula(n, k, m, seed=rng.derive_seed(seed, "formula"))
    cert = refute(formula, ell, eig)
    rec.bound, rec.ratio = cert.bound, (cert.ratio if m else None)
    rec.lambda_max, rec.residual, rec.converged = cert.norm_estimate, cert.residual, cert.converged
    if beta is not None:
        rec.threshold = m / 2 * (1 + beta)
        rec.success = cert.bound <= rec.threshold
    if n <= options["brute_force_max_n"]:
        rec.brute_force = float(brute_force_max_satisfied(formula))
        rec.sound = cert.bound >= rec.brute_force
        if beta is None:
            rec.success = rec.sound


def _certify(rec, cell, options, eig, seed):
    y = random_sign_tensor(cell["n"], cell["p"], seed=rng.derive_seed(seed, "tensor"))
    cert = certify_rademacher_norm(y, cell["ell"], eig)
    rec.bound, rec.lambda_max, rec.residual, rec.converged = cert.bound, cert.norm_estimate, cert.residual, cert.converged
    if cell["n"] <= options["brute_force_max_n"]:
        rec.brute_force = brute_force_rademacher_norm(y)
        rec.sound = cert.bound >= rec.brute_force
        rec.ratio = cert.bound / rec.brute_force if rec.brute_force else None
        rec.success = rec.sound


def _spectrum(rec, cell, options, eig, seed):
    n, p, ell = cell["n"], cell["p"], cell["ell"]
    analytic = johnson.spectrum(n, ell, p).multiset()
    dense = np.linalg.eigvalsh(johnson.adjacency(n, ell, p).to_dense())
    rec.residual = float(np.max(np.abs(np.sort(dense) - analytic)))
    rec.lambda_max = float(analytic[-1])
    rec.threshold = float(options["tol"])
    rec.success = rec.residual <= rec.threshold


def _baseline(rec, cell, options, eig, seed):
    inst = generate(cell["n"], cell["p"], float(cell["lam"]), seed=rng.derive_seed(seed, "instance"),
                    dense=True, noise_scale=options["noise_scale"])
    rep = recover_odd(inst.tensor, cell["ell"], eig, spike=inst.spike)
    rec.corr, rec.lambda_max, rec.residual, rec.converged = rep.corr, rep.top_value, rep.residual, rep.converged
    rec.corr_unfold = correlation(tensor_unfold(inst.dense), inst.spike)
    u0 = rng.standard_normal(rng.stream(seed, "power-start"), cell["n"])
    rec.corr_power = correlation(tensor_power_method(inst.dense, u0, int(options["power_iters"])), inst.spike)
    rec.success = rec.corr >= rec.corr_unfold


_TASK_RUNNERS = {
    "detect": _detect,
    "recover": _recover,
    "refute-xor": _refute,
    "certify-odd": _certify,
    "spectrum": _spectrum,
    "baseline-compare": _baseline,
}


def iter_sweep(cfg: ExperimentConfig):
    """Yield records in (cell, trial) order."""
    options = cfg.resolved_options()
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for cell_idx, cell in enumerate(cfg.cells()):
            yield from pool.map(partial(_run_trial, cfg, options, cell_idx, cell), range(cfg.trials))


def run_sweep(cfg: ExperimentConfig, out=None) -> list[TrialRecord]:
    """Run every (cell, trial) and stream rows to ``out`` (or ``cfg.out``) if set."""
    path = out if out is not None else cfg.out
    records = []
    fh = open(path, "w", newline="") if path else None
    try:
        writer = None
        if fh is not None:
            fh.write(f"# config-hash: {cfg.config_hash()}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
        for rec in iter_sweep(cfg):
            records.append(rec)
            if writer is not None:
                writer.writerow(rec.to_row())
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return records


def read_records(path) -> tuple[str | None, list[TrialRecord]]:
    """Parse a sweep CSV back into ``(config_hash, records)``."""
    with open(path, newline="") as fh:
        first = fh.readline()
        digest = None
        if first.startswith("# config-hash:"):
            digest = first.split(":", 1)[1].strip()
        else:
            fh.seek(0)
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ParameterError(f"{path}: unexpected columns")
        records = [TrialRecord(**{c: _parse(c, v) for c, v in zip(COLUMNS, row)}) for row in reader]
    return digest, records


def outcome_bytes(path) -> bytes:
    """The CSV without timing columns, for byte-level reproducibility checks."""
    drop = [COLUMNS.index(c) for c in TIMING_COLUMNS]
    lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                lines.append(line)
                continue
            parts = next(csv.reader([line]))
            lines.append(",".join(v for i, v in enumerate(parts) if i not in drop) + "\n")
    return "".join(lines).encode()


@dataclass(frozen=True)
class CellSummary:
    cell: int
    params: dict
    trials: int
    errors: int
    success_rate: float | None
    mean_corr: float | None
    corr_quantiles: tuple | None
    ratio_quantiles: tuple | None
    converged_rate: float | None

    def as_dict(self) -> dict:
        return asdict(self)


QUANTILES = (0.1, 0.5, 0.9)
_PARAM_COLS = ("task", "n", "p", "ell", "lam", "k", "m", "beta")


def _quantiles(values: Sequence[float]):
    if not values:
        return None
    return tuple(float(v) for v in np.quantile(np.asarray(values, dtype=float), QUANTILES))


def summarize(records: Iterable[TrialRecord]) -> list[CellSummary]:
    """Per-cell success rate, mean correlation and quantiles, in cell order.

    Rows with an error count as failures in the success rate.
    """
    records = list(records)
    if not records:
        raise ParameterError("cannot summarize an empty record set")
    by_cell: dict[int, list[TrialRecord]] = {}
    for rec in records:
        by_cell.setdefault(rec.cell, []).append(rec)
    out = []
    for cell in sorted(by_cell):
        rows = by_cell[cell]
        graded = [r.success for r in rows if r.success is not None]
        corrs = [r.corr for r in rows if r.corr is not None]
        ratios = [r.ratio for r in rows if r.ratio is not None]
        conv = [r.converged for r in rows if r.converged is not None]
        params = {c: getattr(rows[0], c) for c in _PARAM_COLS if getattr(rows[0], c) is not None}
        out.append(CellSummary(
            cell=cell,
            params=params,
            trials=len(rows),
            errors=sum(r.error is not None for r in rows),
            success_rate=(sum(graded) / len(graded)) if graded else None,
            mean_corr=float(np.mean(corrs)) if corrs else None,
            corr_quantiles=_quantiles(corrs),
            ratio_quantiles=_quantiles(ratios),
            converged_rate=(sum(conv) / len(conv)) if conv else None,
        ))
    return out


def detection_lambda(n: int, ell: int, p: int, extra: float = 5.0) -> float:
    """``sqrt(8 (l log n + extra) / d_l)``, the SNR at which the threshold test is analyzed."""
    return math.sqrt(8 * (ell * math.log(n) + extra) / d_ell(n, ell, p))


__all__ = [
    "COLUMNS", "CellSummary", "ExperimentConfig", "TrialRecord", "detection_lambda",
    "iter_sweep", "outcome_bytes", "read_records", "run_sweep", "summarize",
]
