"""Command-line front end.

Commands:
  simulate   generate a synthetic tape + price path from a preset or scenario file
  score      score a tape's dark fills and emit surprise + evidence lines
  backtest   replay policy-on vs policy-off and emit actions + cohort report
  power      print the minimum-fills detectability bound and an empirical crossing
  report     emit slippage-by-pvalue and signalling-by-min-size plot tables

All randomness flows from --seed; identical inputs and seeds produce
byte-identical outputs. DARKSCOPE_LOG=DEBUG|INFO|... controls verbosity.
Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import evidence, policy, simulator, slippage, surprise, tape

log = logging.getLogger("darkscope.cli")

_USAGE_ERROR = 2
_DATA_ERROR = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darkscope",
        description="Dark-fill signalling detection: simulate, score, decide.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic tape and price path")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=simulator.PRESET_NAMES)
    src.add_argument("--scenario", type=Path, help="flat key=value scenario file")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--output", type=Path, required=True, help="output directory")

    score = sub.add_parser("score", help="score dark fills on a tape")
    score.add_argument("--input", type=Path, required=True, help="tape file")
    score.add_argument("--output", type=Path, required=True, help="output directory")
    score.add_argument("--window-n", type=int, default=surprise.DEFAULT_WINDOW_SIZE)
    score.add_argument("--kmax", type=int, default=evidence.DEFAULT_KMAX)
    score.add_argument("--horizon-mult", type=float, default=surprise.DEFAULT_HORIZON_MULT)

    back = sub.add_parser("backtest", help="policy-on vs policy-off replay")
    back.add_argument("--input", type=Path, required=True, help="tape file")
    back.add_argument("--path", type=Path, required=True, help="price path file")
    back.add_argument("--output", type=Path, required=True, help="output directory")
    back.add_argument("--window-n", type=int, default=surprise.DEFAULT_WINDOW_SIZE)
    back.add_argument("--kmax", type=int, default=evidence.DEFAULT_KMAX)
    back.add_argument("--alpha", type=float, default=0.05)
    back.add_argument("--horizon-mult", type=float, default=surprise.DEFAULT_HORIZON_MULT)

    power = sub.add_parser("power", help="slippage detectability bound")
    power.add_argument("--mu", type=float, required=True, help="mean per-fill slippage, bp")
    power.add_argument("--sigma", type=float, required=True, help="per-fill return std, bp")
    power.add_argument("--seeds", type=int, default=200)
    power.add_argument("--seed", type=int, default=None)
    power.add_argument("--t-target", type=float, default=2.0)

    report = sub.add_parser("report", help="plot-ready bucket and threshold tables")
    report.add_argument("--input", type=Path, required=True, help="tape file")
    report.add_argument("--path", type=Path, required=True, help="price path file")
    report.add_argument("--output", type=Path, required=True, help="output directory")
    report.add_argument("--window-n", type=int, default=surprise.DEFAULT_WINDOW_SIZE)
    report.add_argument("--horizon-mult", type=float, default=surprise.DEFAULT_HORIZON_MULT)
    report.add_argument("--alpha", type=float, default=0.05)
    report.add_argument("--tau", type=float, default=5.0)
    report.add_argument("--buckets", type=int, default=10)
    report.add_argument(
        "--thresholds",
        type=str,
        default="0,5000,10000,15000,20000,25000,30000,35000,40000,45000",
        help="comma-separated minimum-size notionals",
    )
    return parser


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    if os.environ.get("DARKSCOPE_TEST"):
        raise UsageError("--seed is required when DARKSCOPE_TEST is set")
    derived = time.time_ns() & ((1 << 63) - 1)
    log.warning("no --seed given; derived %d from the clock", derived)
    return derived


class UsageError(Exception):
    pass


def _write_lines(path: Path, lines) -> None:
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _read_tape(path: Path) -> tape.Tape:
    with open(path) as fh:
        return tape.parse_tape(fh)


def _read_path(path: Path) -> slippage.PricePath:
    with open(path) as fh:
        return slippage.path_from_lines(fh)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _tsv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.preset:
        scenario = simulator.preset(args.preset, seed=_resolve_seed(args.seed))
    else:
        scenario = simulator.parse_scenario(args.scenario.read_text())
        if args.seed is not None:
            scenario = dataclasses.replace(scenario, seed=args.seed)
    out: Path = args.output
    out.mkdir(parents=True, exist_ok=True)
    tp, path = simulator.simulate_scenario(scenario)
    _write_lines(out / "tape.jsonl", tape.serialize_tape(tp))
    _write_lines(out / "path.jsonl", slippage.path_to_lines(path))
    (out / "scenario.txt").write_text(simulator.format_scenario(scenario))
    n_lit = sum(1 for e in tp.events if e.is_lit())
    log.info("simulated %s: %d lit prints, %d dark fills", scenario.name, n_lit, len(tp) - n_lit)
    print(f"wrote {out / 'tape.jsonl'} ({len(tp)} events) and {out / 'path.jsonl'}")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    tp = _read_tape(args.input)
    out: Path = args.output
    out.mkdir(parents=True, exist_ok=True)
    records = surprise.score_tape(tp, args.window_n, args.horizon_mult)

    lines: list[str] = []
    signalling: dict[str, evidence.EvidenceLedger] = {}
    latent: dict[str, evidence.EvidenceLedger] = {}

    def update(book: dict, name: str, venue: str, ts: int, p: float) -> None:
        ledger = book.get(venue)
        if ledger is None:
            ledger = book[venue] = evidence.EvidenceLedger(venue, args.kmax)
        evidence.ledger_update(ledger, ts, p)
        lines.append(json.dumps(evidence.entry_to_obj(venue, ledger.history[-1], name)))

    for record in records:
        lines.append(json.dumps(surprise.record_to_obj(record)))
        venue = record.fill.venue or ""
        if record.p_fwd is not None:
            update(signalling, "signalling", venue, record.fill.ts, record.p_fwd)
            update(signalling, "signalling", "*", record.fill.ts, record.p_fwd)
        if record.p_bwd is not None:
            update(latent, "latent", venue, record.fill.ts, record.p_bwd)
            update(latent, "latent", "*", record.fill.ts, record.p_bwd)

    _write_lines(out / "scored.jsonl", lines)
    print(f"wrote {out / 'scored.jsonl'}: {len(records)} fills scored")
    return 0


def cmd_backtest(args: argparse.Namespace) -> int:
    tp = _read_tape(args.input)
    path = _read_path(args.path)
    out: Path = args.output
    out.mkdir(parents=True, exist_ok=True)
    cfg = policy.PolicyConfig(
        alpha=args.alpha,
        window_size=args.window_n,
        k_max=args.kmax,
        horizon_mult=args.horizon_mult,
    )
    report = policy.replay(tp, path, cfg)
    _write_lines(out / "actions.jsonl", (json.dumps(policy.action_to_obj(a)) for a in report.actions))
    _tsv(
        out / "cohorts.tsv",
        ["venue", "order", "side", "fills_off", "fills_on", "slip_off_bp", "slip_on_bp"],
        (
            (o.venue, o.order, o.side.value, o.fills_off, o.fills_on, o.slip_off, o.slip_on)
            for o in report.orders
        ),
    )
    _tsv(
        out / "summary.tsv",
        [
            "n_off",
            "n_on",
            "mean_abs_off_bp",
            "mean_abs_on_bp",
            "stderr_abs_off_bp",
            "stderr_abs_on_bp",
            "abs_ratio",
            "decisions",
            "triggers",
            "action_rate",
        ],
        [
            (
                report.n_off,
                report.n_on,
                report.mean_abs_off,
                report.mean_abs_on,
                report.stderr_abs_off,
                report.stderr_abs_on,
                report.abs_ratio,
                report.decisions,
                report.triggers,
                report.action_rate,
            )
        ],
    )
    print(
        f"policy-off |slip| {report.mean_abs_off:.3f} bp over {report.n_off} orders; "
        f"policy-on {report.mean_abs_on:.3f} bp over {report.n_on}; "
        f"ratio {report.abs_ratio:.3f}; {report.triggers} triggers in {report.decisions} decisions"
    )
    return 0


def cmd_power(args: argparse.Namespace) -> int:
    bound = slippage.min_fills_bound(args.mu, args.sigma)
    if bound == float("inf"):
        print("minimum fills (t=1 bound): unbounded (mu = 0)")
        return 0
    print(f"minimum fills (t=1 bound): T = {bound:g}")
    seed = _resolve_seed(args.seed)
    crossing = slippage.empirical_crossing(
        args.mu, args.sigma, seeds=args.seeds, seed=seed, t_target=args.t_target
    )
    print(
        f"empirical t={args.t_target:g} crossing (median of {args.seeds} seeds): "
        f"{crossing} fills (expected about {args.t_target**2 * bound:g})"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    tp = _read_tape(args.input)
    path = _read_path(args.path)
    out: Path = args.output
    out.mkdir(parents=True, exist_ok=True)
    try:
        thresholds = [float(x) for x in args.thresholds.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --thresholds list: {args.thresholds!r}") from None

    records = surprise.score_tape(tp, args.window_n, args.horizon_mult)
    cfg = slippage.SlippageConfig(tau=args.tau)
    fills = [r.fill for r in records]
    values, covered = slippage.slippages(fills, path, cfg)
    slip_pairs = [(r, float(v)) for r, v, ok in zip(records, values, covered) if ok]
    size_pairs = [(r, r.fill.size) for r in records]

    buckets = slippage.bucket_report(slip_pairs, args.buckets)
    shares = slippage.size_threshold_report(size_pairs, thresholds, args.alpha)

    _tsv(
        out / "slippage_by_pvalue.tsv",
        ["p_lo", "p_hi", "mean_bp", "stderr_bp", "n"],
        ((b.p_lo, b.p_hi, b.mean, b.stderr, b.n) for b in buckets),
    )
    _tsv(
        out / "signalling_by_min_size.tsv",
        ["threshold", "share", "n"],
        ((t.threshold, t.share, t.n) for t in shares),
    )
    report_lines = [json.dumps(slippage.bucket_row_to_obj(b)) for b in buckets]
    report_lines += [json.dumps(slippage.threshold_row_to_obj(t)) for t in shares]
    _write_lines(out / "report.jsonl", report_lines)
    print(f"wrote {out / 'slippage_by_pvalue.tsv'} and {out / 'signalling_by_min_size.tsv'}")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "score": cmd_score,
    "backtest": cmd_backtest,
    "power": cmd_power,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("DARKSCOPE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except (tape.TapeFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
