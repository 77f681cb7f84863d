"""Command line front end: ``seqmon {bounds,monitor,analyze,simulate}``.

Exit codes: 0 completed (with or without detection), 2 usage error,
3 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .bounds import build_hybrid_schedule
from .detector import MartingaleMonitor, MonitorResult, first_crossing
from .exceptions import ConfigurationError, DataError, SeqmonError
from .io import RunReport, emit_report, ingest
from .pipeline import FeatureKind, build_monitoring_run
from .simlab import (
    PRNG_NAME,
    SCENARIO_DF,
    DetectorConfig,
    GaitModel,
    Scenario,
    generate_stream,
    monte_carlo,
    report_payload,
    synthetic_strides,
)

log = logging.getLogger("seqmon")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


@dataclass
class RunConfig:
    """Resolved monitoring configuration; defaults follow the runner case study."""

    alpha: float = 0.22
    delta: float = 0.1
    p: int = 10
    n1: int = 100
    n2: int = 100
    train: int = 200
    bound: str = "hybrid"
    lil: str = "spec"
    k: float = 0.25
    kappa: float | None = None
    delta_split: str = "full"
    feature: str = "l2"
    pool: str = "none"
    input: str | None = None
    channels: list | None = None
    synthetic: int | None = None
    seed: int | None = None

    def check(self):
        if self.pool != "none" and (not self.channels or len(self.channels) < 2):
            raise ConfigurationError(f"--pool {self.pool} needs at least two --channels")
        if self.pool == "none" and self.channels and len(self.channels) > 1:
            raise ConfigurationError("several --channels given without --pool")
        return self

    def echo(self):
        return {**asdict(self), "version": __version__, "prng": PRNG_NAME}


_RUN_FIELDS = {f.name for f in fields(RunConfig)}


def parse_config(args, config_file=None):
    """Merge defaults, then the JSON ``config_file``, then explicitly given flags."""
    values = {}
    if config_file:
        try:
            with open(config_file, encoding="utf-8") as handle:
                loaded = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config file {config_file}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"config file {config_file} must hold a JSON object")
        unknown = sorted(set(loaded) - _RUN_FIELDS)
        if unknown:
            raise ConfigurationError(f"unknown config keys {unknown}")
        values.update(loaded)
    flags = vars(args) if isinstance(args, argparse.Namespace) else dict(args)
    values.update({k: v for k, v in flags.items() if k in _RUN_FIELDS and v is not None})
    if isinstance(values.get("channels"), str):
        values["channels"] = [c for c in values["channels"].split(",") if c]
    return RunConfig(**values).check()


# ---------------------------------------------------------------------------
# parser


def _add_bound_flags(parser):
    parser.add_argument("--alpha", type=float, help="local level (default 0.22)")
    parser.add_argument("--delta", type=float, help="global level (default 0.1)")
    parser.add_argument("--p", type=int, help="number of linear segments (default 10)")
    parser.add_argument("--lil", choices=["spec", "general"], help="LIL variant (default spec)")
    parser.add_argument("--k", type=float, help="k of the general LIL bound (default 0.25)")
    parser.add_argument("--kappa", type=float, help="kappa of the general LIL bound (default kappa0(alpha))")
    parser.add_argument("--delta-split", dest="delta_split", choices=["full", "half"],
                        help="delta per hybrid phase: full delta each, or delta/2 each")


def _add_monitor_flags(parser):
    _add_bound_flags(parser)
    parser.add_argument("--bound", choices=["lil", "linear", "hybrid"], help="bound family (default hybrid)")
    parser.add_argument("--config", help="JSON file with default values for these flags")
    parser.add_argument("--report", help="write the JSON report (and trajectory CSV) here")


def build_parser():
    parser = argparse.ArgumentParser(prog="seqmon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"seqmon {__version__} (PRNG: {PRNG_NAME})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="tabulate linear, LIL and hybrid bounds as CSV")
    _add_bound_flags(p_bounds)
    p_bounds.add_argument("--t-min", dest="t_min", type=int, default=1)
    p_bounds.add_argument("--t-max", dest="t_max", type=int, default=None, help="default: 3 x LIL start")
    p_bounds.add_argument("--step", type=int, default=1)
    p_bounds.add_argument("--out", help="CSV file (default stdout)")

    p_mon = sub.add_parser("monitor", help="monitor a stream of scalar scores")
    _add_monitor_flags(p_mon)
    p_mon.add_argument("--train", type=int, help="leading values used for the threshold (0: input is 0/1 indicators)")
    src = p_mon.add_mutually_exclusive_group()
    src.add_argument("--input", help="scalar CSV (index,value) or NDJSON")
    src.add_argument("--synthetic", type=int, help="monitor a synthetic chi-square stream of this length")
    p_mon.add_argument("--seed", type=int, help="seed for --synthetic (default 0)")
    p_mon.add_argument("--cp", type=int, help="change index of the synthetic stream (default: no change)")
    p_mon.add_argument("--df-before", dest="df_before", type=int, default=20)
    p_mon.add_argument("--df-after", dest="df_after", type=int, default=25)

    p_an = sub.add_parser("analyze", help="run the stride-curve pipeline and monitor")
    _add_monitor_flags(p_an)
    src = p_an.add_mutually_exclusive_group()
    src.add_argument("--input", help="stride long CSV, scalar CSV or NDJSON")
    src.add_argument("--channels", help="comma separated channel files, e.g. left.csv,right.csv")
    src.add_argument("--synthetic", type=int, help="analyze this many synthetic gait-like strides")
    p_an.add_argument("--seed", type=int, help="seed for --synthetic (default 0)")
    p_an.add_argument("--drift-at", dest="drift_at", type=int, help="first drifting synthetic stride (default: none)")
    p_an.add_argument("--feature", choices=["l2", "l1", "linf", "peak", "passthrough"])
    p_an.add_argument("--pool", choices=["none", "max", "min", "ave"])
    p_an.add_argument("--n1", type=int, help="strides for the reference profile (default 100)")
    p_an.add_argument("--n2", type=int, help="strides for the threshold (default 100)")

    p_sim = sub.add_parser("simulate", help="Monte Carlo evaluation on chi-square scenarios")
    p_sim.add_argument("--scenario", choices=sorted(SCENARIO_DF) + ["custom"], default="j1")
    p_sim.add_argument("--n", type=int, default=30_000)
    p_sim.add_argument("--cp", type=int, help="true change index (default n/2)")
    p_sim.add_argument("--df-before", dest="df_before", type=int)
    p_sim.add_argument("--df-after", dest="df_after", type=int)
    p_sim.add_argument("--alpha", type=float, default=0.25)
    p_sim.add_argument("--delta", type=float, default=0.1)
    p_sim.add_argument("--p", type=int, default=10)
    p_sim.add_argument("--detector", choices=["martingale", "cusum"], default="martingale")
    p_sim.add_argument("--bound", choices=["lil", "linear", "hybrid"], default="lil")
    p_sim.add_argument("--lil", choices=["spec", "general"], default="general")
    p_sim.add_argument("--k", type=float, default=0.25)
    p_sim.add_argument("--kappa", type=float)
    p_sim.add_argument("--delta-split", dest="delta_split", choices=["full", "half"], default="full")
    p_sim.add_argument("--training", choices=["fraction", "count"], default="fraction")
    p_sim.add_argument("--trials", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", help="JSON report path (default stdout)")
    return parser


# ---------------------------------------------------------------------------
# subcommands


def _fmt(value):
    return "" if value is None or not math.isfinite(value) else repr(float(value))


def cmd_bounds(args):
    alpha = 0.22 if args.alpha is None else args.alpha
    delta = 0.1 if args.delta is None else args.delta
    hybrid = build_hybrid_schedule(
        alpha, delta, 10 if args.p is None else args.p,
        lil=args.lil or "spec", k=0.25 if args.k is None else args.k,
        kappa=args.kappa, delta_split=args.delta_split or "full",
    )
    linear, lil = hybrid.linear, hybrid.lil
    t_max = args.t_max or 3 * hybrid.switch_time
    if args.t_min < 1 or t_max < args.t_min or args.step < 1:
        raise ConfigurationError("need 1 <= --t-min <= --t-max and --step >= 1")
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["t", "gamma_linear", "gamma_lil", "gamma_hybrid"])
        for t in range(args.t_min, t_max + 1, args.step):
            g_lin = linear.evaluate(t) if t >= linear.tau0 else None
            g_lil = lil.evaluate(t) if t >= lil.start else None
            g_hyb = hybrid.evaluate(t) if t >= linear.tau0 else None
            writer.writerow([t, _fmt(g_lin), _fmt(g_lil), _fmt(g_hyb)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _monitor_estimator(cfg):
    return MartingaleMonitor(
        alpha=cfg.alpha, delta=cfg.delta, p=cfg.p, bound=cfg.bound,
        lil=cfg.lil, k=cfg.k, kappa=cfg.kappa, delta_split=cfg.delta_split,
    )


def _finish(cfg, result, schedule, report_path, extra):
    report = RunReport.from_result(result, cfg.echo(), schedule, extra)
    if report_path:
        csv_path = emit_report(report, report_path)
        log.info("report written to %s (trajectory %s)", report_path, csv_path)
    if result.detected:
        print(
            f"change detected at t={result.detection_time}: "
            f"M={result.m_at_detection:.4f} > bound={result.bound_at_detection:.4f}"
        )
    else:
        print(f"no change detected over {result.martingale.size} monitored steps")
    return report


def cmd_monitor(args):
    cfg = parse_config(args, args.config)
    extra = {}
    if cfg.synthetic is not None:
        seed = 0 if cfg.seed is None else cfg.seed
        cfg.seed = seed
        cp = args.cp if args.cp is not None else cfg.synthetic
        sc = Scenario(cfg.synthetic, cp, args.df_before, args.df_after, seed)
        scores = generate_stream(sc)
        extra["synthetic"] = asdict(sc)
    elif cfg.input:
        scores = ingest(cfg.input)
        if not isinstance(scores, np.ndarray):
            raise DataError(f"{cfg.input}: monitor expects scalar values, found stride records")
    else:
        raise ConfigurationError("monitor needs --input or --synthetic")
    est = _monitor_estimator(cfg)
    if cfg.train == 0:
        schedule = est._schedule()
        t_hat, m, bound = first_crossing(scores, schedule, cfg.alpha)
        result = MonitorResult(t_hat, m, bound)
    else:
        if scores.size <= cfg.train:
            raise ConfigurationError(f"need more than --train {cfg.train} values, got {scores.size}")
        est.fit(scores[:cfg.train])
        schedule = est.schedule_
        result = est.monitor(scores[cfg.train:])
        extra["threshold"] = est.threshold_
        if result.detected:
            extra["detection_index"] = cfg.train + result.detection_time
    _finish(cfg, result, schedule, args.report, extra)
    return EXIT_OK


def _load_channel(path, kind):
    data = ingest(path)
    if kind is FeatureKind.PASSTHROUGH:
        if not isinstance(data, np.ndarray):
            raise DataError(f"{path}: passthrough needs scalar input")
        return [np.array([v]) for v in data]
    if isinstance(data, np.ndarray):
        raise DataError(f"{path}: feature {kind.value} needs stride curves")
    return data


def cmd_analyze(args):
    cfg = parse_config(args, args.config)
    kind = FeatureKind.parse(cfg.feature)
    extra = {}
    paths = cfg.channels or ([cfg.input] if cfg.input else [])
    if cfg.synthetic is not None:
        cfg.seed = 0 if cfg.seed is None else cfg.seed
        model = GaitModel(cfg.synthetic, drift_start=args.drift_at, seed=cfg.seed)
        channels = [synthetic_strides(model)]
        extra["synthetic"] = asdict(model)
    elif paths:
        channels = [_load_channel(path, kind) for path in paths]
    else:
        raise ConfigurationError("analyze needs --input, --channels or --synthetic")
    pool_mode = None if cfg.pool == "none" else cfg.pool
    run = build_monitoring_run(
        channels if pool_mode else channels[0],
        n1=cfg.n1, n2=cfg.n2, alpha=cfg.alpha, kind=kind, pool_mode=pool_mode,
    )
    est = _monitor_estimator(cfg)
    schedule = est._schedule()
    t_hat, m, bound = first_crossing(run.indicators, schedule, cfg.alpha)
    result = MonitorResult(t_hat, m, bound, threshold=run.test.threshold)
    extra.update(threshold=run.test.threshold, n0=run.n0)
    if t_hat is not None:
        extra["detection_stride"] = run.n0 + t_hat
    _finish(cfg, result, schedule, args.report, extra)
    return EXIT_OK


def cmd_simulate(args):
    if args.scenario == "custom":
        if args.df_before is None or args.df_after is None:
            raise ConfigurationError("--scenario custom needs --df-before and --df-after")
        before, after = args.df_before, args.df_after
    else:
        before, after = SCENARIO_DF[args.scenario]
        before = args.df_before or before
        after = args.df_after or after
    cp = args.n // 2 if args.cp is None else args.cp
    sc = Scenario(args.n, cp, before, after, args.seed)
    cfg = DetectorConfig(
        detector=args.detector, bound=args.bound, alpha=args.alpha, delta=args.delta, p=args.p,
        lil=args.lil, k=args.k, kappa=args.kappa, delta_split=args.delta_split, training=args.training,
    )
    summary = monte_carlo(sc, cfg, args.trials, base_seed=args.seed)
    payload = report_payload(sc, cfg, args.trials, args.seed, summary)
    payload["version"] = __version__
    text = json.dumps(payload, indent=2, allow_nan=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        print(
            f"{args.trials} trials: mean={summary.mean_cp}, std={summary.std_dev}, "
            f"std*={summary.std_dev_star}, fp={summary.fp_count}, no detection={summary.no_detect_count}"
        )
    else:
        print(text)
    return EXIT_OK


COMMANDS = {"bounds": cmd_bounds, "monitor": cmd_monitor, "analyze": cmd_analyze, "simulate": cmd_simulate}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DataError, FileNotFoundError) as exc:
        print(f"seqmon: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SeqmonError, OSError) as exc:
        print(f"seqmon: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
