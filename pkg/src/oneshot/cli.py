"""Command-line front end.

Subcommands ``sample``, ``bench``, ``check-bounds`` and ``report`` read an
optional YAML config and write their artifacts under ``--out``. Outputs are
staged and only moved into place once the whole run succeeded.

Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 a bound
check failed, 1 anything unexpected.
"""
from __future__ import annotations

import argparse
import csv
import os
import shutil
import sys
import tempfile
from contextlib import contextmanager

import numpy as np

from . import __version__
from . import benchmark as bm
from .config import ConfigError, ExperimentConfig
from .methods import MethodSpecError, generate, parse_method_spec
from .metrics import default_checks
from .seeding import stream

__all__ = ["main", "run", "parse_method_spec", "build_parser", "EXIT_OK", "EXIT_CONFIG",
           "EXIT_NUMERIC", "EXIT_BOUND"]

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_BOUND = 4


class NumericFailure(RuntimeError):
    pass


@contextmanager
def _staged(out_dir):
    """Yield a scratch directory whose files land in ``out_dir`` only on success."""
    created = not os.path.isdir(out_dir)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc.strerror}") from exc
    stage = tempfile.mkdtemp(prefix=".staging-", dir=out_dir)
    try:
        yield stage
    except BaseException:
        shutil.rmtree(stage, ignore_errors=True)
        if created and not os.listdir(out_dir):
            os.rmdir(out_dir)
        raise
    for root, _, files in os.walk(stage):
        rel = os.path.relpath(root, stage)
        dest = os.path.normpath(os.path.join(out_dir, rel))
        os.makedirs(dest, exist_ok=True)
        for name in sorted(files):
            os.replace(os.path.join(root, name), os.path.join(dest, name))
    shutil.rmtree(stage, ignore_errors=True)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _sample(cfg, stage):
    s = cfg.sample
    spec = parse_method_spec(s.method).with_target(s.target)
    pts = generate(spec, s.n, s.d, stream(cfg.seed, "sample", spec.name))
    if not np.all(np.isfinite(pts)):
        raise NumericFailure("sample contains non-finite coordinates")
    _write_csv(os.path.join(stage, "points.csv"), [f"x{j}" for j in range(s.d)],
               ([repr(float(v)) for v in row] for row in pts))
    return [f"points.csv: {s.n} points of {spec.name} in dimension {s.d}"]


def _bench(cfg, stage):
    grid = cfg.effective_grid()
    results = bm.run_grid(cfg.methods, grid.cells(), grid.budgets, grid.functions,
                          cfg.bench_replicas(), cfg.seed, grid.prior, cfg.jobs)
    bm.write_results(results, os.path.join(stage, "results.csv"))
    table = bm.tabulate_wins(results, cfg.method_names())
    with open(os.path.join(stage, "wintable.tsv"), "w", newline="") as fh:
        fh.write(table.to_text())
    _write_csv(os.path.join(stage, "win_frequencies.csv"), bm.FREQUENCY_COLUMNS,
               table.frequency_rows())
    with open(os.path.join(stage, "config.yaml"), "w") as fh:
        fh.write(cfg.dump())
    return results, [f"results.csv: {len(results)} records", "wintable.tsv", "win_frequencies.csv"]


def _check_bounds(cfg, stage):
    reports = default_checks(cfg.replicas, cfg.seed)
    with open(os.path.join(stage, "bounds.jsonl"), "w") as fh:
        for rep in reports:
            fh.write(rep.to_line() + "\n")
    failed = [r.name for r in reports if r.passed is False]
    lines = [f"{r.name}: estimate={r.estimate:.6g} bound={r.bound:.6g} passed={r.passed}"
             for r in reports]
    return failed, lines


def summarize(results, quantiles=(0.1, 0.5, 0.9)):
    """Per (function, d, d_prime, budget, method): replica count, mean, median and quantiles."""
    groups = {}
    for r in results:
        groups.setdefault((r.function, r.d, r.d_prime, r.budget, r.method), []).append(r.regret)
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[3])):
        v = np.array(groups[key])
        qs = np.quantile(v, quantiles)
        rows.append(dict(function=key[0], d=key[1], d_prime=key[2], budget=key[3], method=key[4],
                         replicas=int(v.size), mean=float(v.mean()), median=float(np.median(v)),
                         q_low=float(qs.min()), q_high=float(qs.max()),
                         quantiles=[float(q) for q in qs]))
    return rows


def _report(cfg, stage):
    from .plotting import regret_vs_budget

    notes = []
    if cfg.report.results:
        try:
            results = bm.read_results(cfg.report.results)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot read results {cfg.report.results}: {exc}") from exc
    else:
        results, notes = _bench(cfg, stage)
    qs = tuple(cfg.report.quantiles)
    rows = summarize(results, qs)
    labels = [f"q{round(q * 100):02d}" for q in qs]
    _write_csv(
        os.path.join(stage, "summary.csv"),
        ["function", "d", "d_prime", "budget", "method", "replicas", "mean_regret", "median_regret"]
        + labels,
        ([r["function"], r["d"], r["d_prime"], r["budget"], r["method"], r["replicas"],
          repr(r["mean"]), repr(r["median"])] + [repr(q) for q in r["quantiles"]] for r in rows),
    )
    fig_dir = os.path.join(stage, "figures")
    os.makedirs(fig_dir, exist_ok=True)
    panels = sorted({(r["function"], r["d"], r["d_prime"]) for r in rows})
    for function, d, dp in panels:
        sel = [r for r in rows if (r["function"], r["d"], r["d_prime"]) == (function, d, dp)]
        regret_vs_budget(sel, os.path.join(fig_dir, f"regret_{function}_d{d}_c{dp}.png"),
                         title=f"{function}, d={d} ({dp} critical)")
    return notes + ["summary.csv", f"figures/: {len(panels)} panels"]


def run(config: ExperimentConfig) -> int:
    """Execute ``config``; returns the exit status and leaves artifacts in ``config.out``."""
    config.validate()
    with _staged(config.out) as stage:
        status = EXIT_OK
        if config.kind == "sample":
            lines = _sample(config, stage)
        elif config.kind == "bench":
            _, lines = _bench(config, stage)
        elif config.kind == "check-bounds":
            failed, lines = _check_bounds(config, stage)
            if failed:
                status = EXIT_BOUND
        else:
            lines = _report(config, stage)
    for line in lines:
        print(line)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oneshot", description="One-shot search with reshaped space-filling designs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="kind", required=True, metavar="{sample,bench,check-bounds,report}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config")
    common.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--replicas", type=int, help="replicas per cell")
    common.add_argument("--full-grid", action="store_true", default=None, dest="full_grid",
                        help="paper-scale grid instead of the desk-scale default")
    common.add_argument("--jobs", type=int, help="worker processes")

    s = sub.add_parser("sample", parents=[common], help="write one sample to points.csv")
    s.add_argument("--method", help="method name, e.g. CauchyRctg0.55ScrHammersley")
    s.add_argument("-n", type=int, help="number of points")
    s.add_argument("-d", type=int, help="dimension")
    s.add_argument("--target", choices=["cube", "unbounded"])
    sub.add_parser("bench", parents=[common], help="benchmark methods, write results and win table")
    sub.add_parser("check-bounds", parents=[common], help="Monte-Carlo checks of the dispersion bounds")
    r = sub.add_parser("report", parents=[common], help="regret-vs-budget summary and figures")
    r.add_argument("--results", help="existing results.csv (default: run the benchmark)")
    return p


def _fail(code, kind, msg):
    msg = " ".join(str(msg).split())
    print(f"oneshot: error code={code} kind={kind} msg={msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
        extra = {k: getattr(args, k, None) for k in ("method", "n", "d", "target", "results")}
        cfg = cfg.override(kind=args.kind, seed=args.seed, out=args.out, replicas=args.replicas,
                           full_grid=args.full_grid, jobs=args.jobs, **extra)
    except (ConfigError, MethodSpecError, TypeError) as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    try:
        return run(cfg)
    except (ConfigError, MethodSpecError) as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except (NumericFailure, ArithmeticError, ValueError) as exc:
        return _fail(EXIT_NUMERIC, "numeric", exc)
    except OSError as exc:
        return _fail(EXIT_CONFIG, "io", exc)
    except Exception as exc:  # noqa: BLE001
        return _fail(EXIT_INTERNAL, "internal", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
