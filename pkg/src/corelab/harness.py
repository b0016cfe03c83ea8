"""Experiment registry, canonical configs, seeded parallel execution, and
JSONL/CSV persistence.

Configs are flat key=value text with two sections; their canonical key-sorted
rendering is hashed to name the results directory, so reruns land in the same
place and resume instead of recomputing. Records are one JSON object per
line, written in trial order through a reorder buffer: reruns are
byte-identical regardless of thread count. Wall-clock timings go to a
sidecar file so the record stream stays deterministic.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .anticonc import wilson_interval
from .rng import RngStream
from . import pipeline

ENV_RESULTS = "CORELAB_RESULTS"
ENV_THREADS = "CORELAB_THREADS"


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    trials: int
    seed: int
    params: dict[str, str]
    out_root: str = "results"

    def canonical(self) -> str:
        lines = [f"experiment.name={self.name}",
                 f"experiment.seed={self.seed}",
                 f"experiment.trials={self.trials}"]
        for k in sorted(self.params):
            lines.append(f"params.{k}={self.params[k]}")
        return "\n".join(lines) + "\n"

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]


def parse_config(path) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    with open(path) as f:
        cp.read_file(f)
    if "experiment" not in cp:
        raise ValueError("config must have an [experiment] section")
    exp = cp["experiment"]
    params = dict(cp["params"]) if "params" in cp else {}
    return ExperimentConfig(
        name=exp["name"],
        trials=int(exp.get("trials", "0")),
        seed=int(exp.get("seed", "0")),
        params=params,
        out_root=exp.get("results", os.environ.get(ENV_RESULTS, "results")),
    )


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    trial: Callable[[dict, RngStream], dict]
    schema: dict[str, type]
    defaults: dict[str, str]
    summarize: Callable[[list[dict], dict], tuple[list[dict], bool]]


def _rate_rows(records: list[dict], fields: dict[str, float], count_key: str | None = None):
    """Summary rows for 0/1 metrics: Wilson 99% CIs and threshold verdicts.

    fields maps metric name -> minimum passing rate (or None for report-only).
    """
    live = [r for r in records if r.get("empty_core", 0.0) == 0.0]
    rows = []
    ok = True
    n = len(live)
    for name, min_rate in fields.items():
        hits = sum(1 for r in live if r.get(name, 0.0) >= 1.0)
        lo, hi = wilson_interval(hits, n) if n else (0.0, 1.0)
        passed = True if min_rate is None else (n > 0 and hits / n >= min_rate)
        rows.append({"metric": name, "count": n, "mean": hits / n if n else 0.0,
                     "ci_lo": lo, "ci_hi": hi,
                     "threshold": "" if min_rate is None else min_rate,
                     "pass": int(passed)})
        if min_rate is not None:
            ok = ok and passed
    empties = len(records) - n
    rows.append({"metric": "empty_core", "count": len(records),
                 "mean": empties / len(records) if records else 0.0,
                 "ci_lo": "", "ci_hi": "", "threshold": "", "pass": 1})
    return rows, ok


def _mean_rows(records: list[dict], names: list[str]):
    live = [r for r in records if r.get("empty_core", 0.0) == 0.0]
    rows = []
    for name in names:
        vals = [r[name] for r in live if name in r]
        mean = sum(vals) / len(vals) if vals else 0.0
        rows.append({"metric": name, "count": len(vals), "mean": mean,
                     "ci_lo": "", "ci_hi": "", "threshold": "", "pass": 1})
    return rows


def _summarize_degree_law(records, params):
    tv_max = float(params.get("tv_max", 0.02))
    live = [r for r in records if r.get("empty_core", 0.0) == 0.0]
    pass_core = sum(1 for r in live if r["tv_core_rho"] < tv_max)
    pass_bulk = sum(1 for r in live if r["tv_bulk_mu"] < tv_max)
    need = float(params.get("min_pass_frac", 0.96))
    n = len(live)
    ok = n > 0 and pass_core / n >= need and pass_bulk / n >= need
    rows = _mean_rows(records, ["tv_core_rho", "tv_bulk_mu", "dev_delta",
                                "dev_delta_prime", "high_frac_dev", "core_n"])
    for label, hits in (("tv_core_within", pass_core), ("tv_bulk_within", pass_bulk)):
        lo, hi = wilson_interval(hits, n) if n else (0.0, 1.0)
        rows.append({"metric": label, "count": n, "mean": hits / n if n else 0.0,
                     "ci_lo": lo, "ci_hi": hi, "threshold": need, "pass": int(ok)})
    return rows, ok


def _summarize_corank(records, params):
    need = float(params.get("min_rate", 0.95))
    rows, ok = _rate_rows(records, {"rest_within_eighth": need,
                                    "core_within_functional": need,
                                    "rest_within_functional": None,
                                    "exact_rest": None, "exact_core": None})
    rows += _mean_rows(records, ["corank_rest", "corank_core", "high_count"])
    return rows, ok


def _summarize_main_theorem(records, params):
    min_sep = float(params.get("min_separation", 0.5))
    min_whole = float(params.get("min_whole", 0.95))
    n = len(records)
    sing = sum(1 for r in records if r["singular_core"] >= 1.0)
    whole = sum(1 for r in records if r["singular_whole"] >= 1.0)
    lo, hi = wilson_interval(sing, n) if n else (0.0, 1.0)
    wlo, whi = wilson_interval(whole, n) if n else (0.0, 1.0)
    exact = sum(1 for r in records if r.get("exact_core", 0.0) >= 1.0)
    sep = (whole - sing) / n if n else 0.0
    ok = n > 0 and whole / n > min_whole and sep >= min_sep
    rows = [
        {"metric": "singular_core", "count": n, "mean": sing / n if n else 0.0,
         "ci_lo": lo, "ci_hi": hi, "threshold": "", "pass": 1},
        {"metric": "singular_whole", "count": n, "mean": whole / n if n else 0.0,
         "ci_lo": wlo, "ci_hi": whi, "threshold": min_whole, "pass": int(n and whole / n > min_whole)},
        {"metric": "separation", "count": n, "mean": sep,
         "ci_lo": "", "ci_hi": "", "threshold": min_sep, "pass": int(sep >= min_sep)},
        {"metric": "exact_core_verdicts", "count": n, "mean": exact / n if n else 0.0,
         "ci_lo": "", "ci_hi": "", "threshold": "", "pass": 1},
    ]
    return rows, ok


def _summarize_boost(records, params):
    need = float(params.get("min_rate", 0.9))
    live = [r for r in records if r.get("empty_core", 0.0) == 0.0]
    n = len(live)
    hits = sum(1 for r in live
               if r["initial_within_half"] >= 1.0 and r["final_zero"] >= 1.0)
    inc_ok = all(r["increments_ok"] >= 1.0 for r in live)
    lo, hi = wilson_interval(hits, n) if n else (0.0, 1.0)
    ok = n > 0 and hits / n >= need and inc_ok
    rows = [{"metric": "boost_success", "count": n, "mean": hits / n if n else 0.0,
             "ci_lo": lo, "ci_hi": hi, "threshold": need, "pass": int(ok)},
            {"metric": "increments_ok", "count": n, "mean": float(inc_ok),
             "ci_lo": "", "ci_hi": "", "threshold": 1.0, "pass": int(inc_ok)}]
    rows += _mean_rows(records, ["initial_corank", "final_corank", "kept", "high_count"])
    return rows, ok


def _summarize_random_walk(records, params):
    p = float(params["p"])
    total = sum(r["batch"] for r in records)
    nonzero = sum(r["nonzero_end"] for r in records)
    audit = all(r["audit_ok"] >= 1.0 for r in records)
    frac = nonzero / total if total else 0.0
    bound = 1000.0 * p
    ok = frac <= bound and audit
    lo, hi = wilson_interval(int(nonzero), int(total)) if total else (0.0, 1.0)
    rows = [{"metric": "prob_nonzero", "count": int(total), "mean": frac,
             "ci_lo": lo, "ci_hi": hi, "threshold": bound, "pass": int(frac <= bound)},
            {"metric": "drift_audit", "count": len(records), "mean": float(audit),
             "ci_lo": "", "ci_hi": "", "threshold": 1.0, "pass": int(audit)}]
    return rows, ok


def _summarize_ukp(records, params):
    rows, _ = _rate_rows(records, {"passed": None})
    rows += _mean_rows(records, ["corank_gf2", "q_size", "core_n"])
    return rows, True


REGISTRY: dict[str, ExperimentSpec] = {}


def _register(name, trial, schema, defaults, summarize):
    REGISTRY[name] = ExperimentSpec(name, trial, schema, defaults, summarize)


_register("degree_law", pipeline.degree_law_trial,
          {"n": int, "lambda": float, "k": int, "alpha": float, "Delta": int,
           "tv_max": float, "min_pass_frac": float},
          {"tv_max": "0.02", "min_pass_frac": "0.96"},
          _summarize_degree_law)
_register("corank", pipeline.corank_trial,
          {"n": int, "lambda": float, "k": int, "alpha": float, "Delta": int,
           "primes": int, "prime_bits": int, "min_rate": float},
          {"primes": "3", "prime_bits": "30", "min_rate": "0.95"},
          _summarize_corank)
_register("main_theorem", pipeline.singularity_trial,
          {"n": int, "lambda": float, "k": int, "lambda_companion": float,
           "primes": int, "prime_bits": int, "min_separation": float, "min_whole": float},
          {"lambda_companion": "2.0", "primes": "3", "prime_bits": "30",
           "min_separation": "0.5", "min_whole": "0.95"},
          _summarize_main_theorem)
_register("boost", pipeline.boost_trial,
          {"n": int, "lambda": float, "k": int, "alpha": float, "Delta": int,
           "theta": float, "eta": float, "primes": int, "prime_bits": int,
           "check_structure": int, "min_rate": float},
          {"theta": "0.05", "eta": "0.05", "primes": "3", "prime_bits": "30",
           "check_structure": "1", "min_rate": "0.9"},
          _summarize_boost)
_register("random_walk", pipeline.random_walk_trial,
          {"p": float, "steps": int, "x0": int, "batch": int, "process": str},
          {"batch": "10000", "process": "adversarial"},
          _summarize_random_walk)
_register("ukp", pipeline.ukp_trial,
          {"n": int, "lambda": float, "k": int, "eta": float, "ell": int},
          {"eta": "0.05", "ell": "2"},
          _summarize_ukp)


def _cast_params(spec: ExperimentSpec, raw: dict[str, str]) -> dict:
    merged = dict(spec.defaults)
    merged.update(raw)
    out = {}
    for key, val in merged.items():
        if key not in spec.schema:
            raise ValueError(f"unknown parameter '{key}' for experiment {spec.name}")
        caster = spec.schema[key]
        try:
            out[key] = caster(val)
        except ValueError as e:
            raise ValueError(f"parameter '{key}': {e}") from None
    return out


@dataclass
class RunOutcome:
    config: ExperimentConfig
    directory: Path
    rows: list[dict]
    ok: bool
    ran_trials: int


def _record_line(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n"


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> RunOutcome:
    """Run all trials of a configured experiment, resuming where possible.

    Trials are keyed (seed, trial index) -> stream, so scheduling does not
    affect results; the record file is written in trial order and reruns are
    byte-identical. A partial directory with a different canonical config is
    a conflict and raises.
    """
    if cfg.name not in REGISTRY:
        raise ValueError(f"unknown experiment '{cfg.name}'")
    spec = REGISTRY[cfg.name]
    params = _cast_params(spec, cfg.params)
    outdir = Path(os.environ.get(ENV_RESULTS, cfg.out_root)) / cfg.name / cfg.hash
    outdir.mkdir(parents=True, exist_ok=True)
    cfg_file = outdir / "config.txt"
    if cfg_file.exists():
        if cfg_file.read_text() != cfg.canonical():
            raise RuntimeError("results directory holds a different config (hash collision?)")
    else:
        cfg_file.write_text(cfg.canonical())
    records_path = outdir / "records.jsonl"
    done: dict[int, dict] = {}
    if records_path.exists():
        for line in records_path.read_text().splitlines():
            if line.strip():
                rec = json.loads(line)
                done[rec["trial"]] = rec
    todo = [i for i in range(cfg.trials) if i not in done]
    nthreads = threads or int(os.environ.get(ENV_THREADS, "0")) or min(4, os.cpu_count() or 1)

    timings = []

    def run_one(idx: int) -> dict:
        stream = RngStream(cfg.seed, idx)
        t0 = time.monotonic()
        metrics = spec.trial(params, stream)
        timings.append({"trial": idx, "seconds": time.monotonic() - t0})
        return {"experiment": cfg.name, "config": cfg.hash, "trial": idx,
                "stream": idx, "metrics": {k: float(v) for k, v in sorted(metrics.items())}}

    new_records: dict[int, dict] = {}
    if todo:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            for rec in pool.map(run_one, todo):
                new_records[rec["trial"]] = rec
        with open(records_path, "a", newline="\n") as f:
            for idx in sorted(new_records):
                f.write(_record_line(new_records[idx]))
        with open(outdir / "timings.jsonl", "a", newline="\n") as f:
            for t in sorted(timings, key=lambda t: t["trial"]):
                f.write(_record_line(t))
    all_records = dict(done)
    all_records.update(new_records)
    metric_list = [all_records[i]["metrics"] for i in sorted(all_records)]
    rows, ok = spec.summarize(metric_list, params)
    _write_summary(outdir / "summary.csv", rows)
    return RunOutcome(cfg, outdir, rows, ok, len(todo))


def _write_summary(path: Path, rows: list[dict]) -> None:
    cols = ["metric", "count", "mean", "ci_lo", "ci_hi", "threshold", "pass"]
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for r in rows:
        buf.write(",".join(_csv_cell(r.get(c, "")) for c in cols) + "\n")
    path.write_text(buf.getvalue(), newline="\n")


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class ReportTable:
    experiment: str
    config_hash: str
    rows: list[dict]
    skipped_lines: list[int]


def report(results_dir) -> list[ReportTable]:
    """Re-derive plot-ready summary tables from stored records.

    Walks every <experiment>/<hash> directory, re-reads records.jsonl (corrupt
    lines are reported by number and skipped), reruns the experiment's
    summarizer, and writes report.csv next to the records.
    """
    root = Path(results_dir)
    tables = []
    for cfg_file in sorted(root.glob("*/*/config.txt")):
        d = cfg_file.parent
        name = d.parent.name
        if name not in REGISTRY:
            continue
        spec = REGISTRY[name]
        params_raw = {}
        for line in cfg_file.read_text().splitlines():
            if line.startswith("params."):
                k, v = line[len("params."):].split("=", 1)
                params_raw[k] = v
        params = _cast_params(spec, params_raw)
        metrics = []
        skipped = []
        rec_file = d / "records.jsonl"
        if rec_file.exists():
            for i, line in enumerate(rec_file.read_text().splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    metrics.append(json.loads(line)["metrics"])
                except (json.JSONDecodeError, KeyError):
                    skipped.append(i)
        rows, _ = spec.summarize(metrics, params)
        _write_summary(d / "report.csv", rows)
        tables.append(ReportTable(name, d.name, rows, skipped))
    return tables
