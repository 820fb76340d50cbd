"""Command-line front end.

Subcommands cover the full experiment surface: `infer` (envelope report),
`reliability` (horizon sweep), `sweep-hyper` (repeat inference over prior
boxes), `sweep-op` (repeat inference over weight vectors), `synth`
(synthetic ground-truth comparison tables), `bench` (scaling sweeps with
power-law fits), and `baseline` (closed-form Beta-Binomial runs).

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .baselines import bb_expected_future_reliability, bb_mean_envelope, bb_update
from .config import ConfigError, RunConfig, parse_config
from .hyperposterior import NumericalError
from .inference import infer
from .model import HyperBox, ReliabilityQuery, ValidationError
from .numerics import DomainError
from .report import emit_csv, emit_json, emit_svg

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _emit_report(report, cfg: RunConfig, out_dir: Path, svg: bool) -> None:
    if cfg.emit_csv:
        emit_csv(report, out_dir)
    if cfg.emit_json:
        emit_json(report, out_dir, config_echo=cfg.raw)
    if cfg.emit_svg or svg:
        emit_svg(report, out_dir)


def _load_run_config(args) -> RunConfig:
    cfg = parse_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.mc = replace(cfg.mc, master_seed=args.seed)
    return cfg


def cmd_infer(args) -> int:
    cfg = _load_run_config(args)
    report = infer(cfg.system, cfg.grid, cfg.mc, cfg.query, threads=args.threads)
    _emit_report(report, cfg, Path(args.out), args.svg)
    return EXIT_OK


def cmd_reliability(args) -> int:
    cfg = _load_run_config(args)
    if args.horizons:
        cfg.query = ReliabilityQuery(horizons=tuple(_int_list(args.horizons)))
    report = infer(cfg.system, cfg.grid, cfg.mc, cfg.query, threads=args.threads)
    _emit_report(report, cfg, Path(args.out), args.svg)
    return EXIT_OK


def _parse_box_doc(doc, path: str) -> HyperBox:
    try:
        return HyperBox(
            a_range=tuple(doc["a"]),
            b_range=tuple(doc["b"]),
            c_range=tuple(doc["c"]),
            d_range=tuple(doc["d"]),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: box needs keys a, b, c, d with [min, max]") from exc


def cmd_sweep_hyper(args) -> int:
    cfg = _load_run_config(args)
    boxes = json.loads(Path(args.boxes).read_text())
    if not isinstance(boxes, list) or not boxes:
        raise ConfigError(f"{args.boxes}: expected a nonempty JSON list of boxes")
    for idx, box_doc in enumerate(boxes):
        box = _parse_box_doc(box_doc, f"{args.boxes}[{idx}]")
        system = replace(
            cfg.system,
            domains=tuple(replace(d, box=box) for d in cfg.system.domains),
        )
        report = infer(system, cfg.grid, cfg.mc, cfg.query, threads=args.threads)
        _emit_report(report, cfg, Path(args.out) / f"box{idx:02d}", args.svg)
    return EXIT_OK


def cmd_sweep_op(args) -> int:
    cfg = _load_run_config(args)
    entries = json.loads(Path(args.weights).read_text())
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{args.weights}: expected a nonempty JSON list")
    for idx, entry in enumerate(entries):
        system = cfg.system
        if "omegas" in entry:
            omegas = entry["omegas"]
            if len(omegas) != len(system.domains):
                raise ConfigError(
                    f"{args.weights}[{idx}].omegas: need one vector per domain"
                )
            system = replace(
                system,
                domains=tuple(
                    replace(d, op_weights=tuple(float(w) for w in om))
                    for d, om in zip(system.domains, omegas)
                ),
            )
        if "weights" in entry:
            system = replace(
                system, domain_weights=tuple(float(w) for w in entry["weights"])
            )
        unknown = set(entry) - {"omegas", "weights"}
        if unknown:
            raise ConfigError(f"{args.weights}[{idx}]: unknown keys {sorted(unknown)}")
        report = infer(system, cfg.grid, cfg.mc, cfg.query, threads=args.threads)
        _emit_report(report, cfg, Path(args.out) / f"op{idx:02d}", args.svg)
    return EXIT_OK


def cmd_synth(args) -> int:
    gt = harness.default_ground_truth()
    regimes = {"small": _int_list(args.small), "large": _int_list(args.large)}
    mc = harness.default_mc()
    if args.configs:
        mc = replace(mc, configs_per_domain=args.configs)
    if args.samples:
        mc = replace(mc, samples_per_config=args.samples)
    rows = harness.run_rq5(gt, regimes, noise=args.noise, seed=args.seed, mc=mc)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "synth_comparison.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "regime", "scenario", "method",
                "median_lo", "median_hi", "error_lo", "error_hi",
                "q05", "q95",
            ]
        )
        for row in rows:
            s = row.summary
            writer.writerow(
                [row.regime, row.scenario, s.method]
                + [f"{v:.9g}" for v in (*s.median, *s.error, *s.interval_90)]
            )
    doc = {
        "seed": args.seed,
        "noise": args.noise,
        "ground_truth": dataclasses.asdict(gt),
        "p_system_gt": gt.p_system,
        "rows": [
            {
                "regime": row.regime,
                "scenario": row.scenario,
                "method": row.summary.method,
                "median": list(row.summary.median),
                "error": list(row.summary.error),
                "interval_90": list(row.summary.interval_90),
            }
            for row in rows
        ],
    }
    (out_dir / "synth_comparison.json").write_text(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    values = _int_list(args.values)
    records = harness.run_scaling_sweep(args.param, values, seed=args.seed)
    c, alpha = harness.fit_power_law(
        [r.value for r in records], [r.seconds for r in records]
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"scaling_{args.param}.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameter", "value", "seconds", "peak_bytes"])
        for r in records:
            writer.writerow([r.parameter, f"{r.value:.9g}", f"{r.seconds:.9g}", r.peak_bytes])
    (out_dir / f"scaling_{args.param}_fit.json").write_text(
        json.dumps(
            {"parameter": args.param, "seed": args.seed, "scale": c, "exponent": alpha},
            indent=2,
        )
        + "\n"
    )
    print(f"fitted time = {c:.4g} * {args.param}^{alpha:.3f}")
    return EXIT_OK


def cmd_baseline(args) -> int:
    post = bb_update(args.correct, args.total, args.prior_alpha, args.prior_beta)
    doc = {
        "posterior": {"alpha": post.alpha, "beta": post.beta},
        "posterior_mean": post.mean,
        "future_reliability": {
            str(n): bb_expected_future_reliability(post, n)
            for n in _int_list(args.horizons)
        },
    }
    if args.alpha_range and args.beta_range:
        lo_hi = bb_mean_envelope(
            args.correct,
            args.total,
            tuple(float(v) for v in args.alpha_range.split(",")),
            tuple(float(v) for v in args.beta_range.split(",")),
        )
        doc["mean_envelope"] = list(lo_hi)
    text = json.dumps(doc, indent=2)
    print(text)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "baseline.json").write_text(text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hipllm",
        description="Reliability envelope inference from per-subdomain success counts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_opts(p):
        p.add_argument("--config", required=True, help="JSON config file path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads (speed only)")
        p.add_argument("--svg", action="store_true", help="also emit SVG bands")

    p = sub.add_parser("infer", help="full CDF envelope report")
    add_run_opts(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("reliability", help="future-reliability horizon sweep")
    add_run_opts(p)
    p.add_argument("--horizons", default="", help="comma-separated n_F values")
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("sweep-hyper", help="repeat inference over prior boxes")
    add_run_opts(p)
    p.add_argument("--boxes", required=True, help="JSON list of box objects")
    p.set_defaults(func=cmd_sweep_hyper)

    p = sub.add_parser("sweep-op", help="repeat inference over weight vectors")
    add_run_opts(p)
    p.add_argument("--weights", required=True, help="JSON list of weight overrides")
    p.set_defaults(func=cmd_sweep_op)

    p = sub.add_parser("synth", help="synthetic ground-truth comparison tables")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--small", default="100,500,1000,300")
    p.add_argument("--large", default="1000,5000,10000,3000")
    p.add_argument("--configs", type=int, default=None, help="configs per domain")
    p.add_argument("--samples", type=int, default=None, help="samples per config")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="scaling sweep with power-law fit")
    p.add_argument("--param", required=True, choices=["m", "n", "K", "S", "G"])
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("baseline", help="closed-form Beta-Binomial run")
    p.add_argument("--prior-alpha", type=float, default=1.0)
    p.add_argument("--prior-beta", type=float, default=1.0)
    p.add_argument("--correct", type=int, required=True)
    p.add_argument("--total", type=int, required=True)
    p.add_argument("--horizons", default="1,10,100")
    p.add_argument("--alpha-range", default=None, help="prior alpha interval lo,hi")
    p.add_argument("--beta-range", default=None, help="prior beta interval lo,hi")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_baseline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
