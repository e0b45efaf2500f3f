"""Command-line interface.

Exit codes: 0 success (or watermark found), 1 watermark not found,
2 any operational error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .graph import EdgeListError, edge_flip_attack, edit_distance_percent, load_edge_list, write_edge_list
from .scheme import DEFAULT_N0, EmptyWatermarkError, EmbeddingContext, Key, keygen
from .tuning import (
    KeyLengthPolicy,
    TuneConfig,
    TuningError,
    calibrate_theta,
    choose_key_length,
    tune_sigma,
    tuning_report,
)

EXIT_OK, EXIT_REJECTED, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _n0(text: str):
    if text == "full":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("n0 must be >= 1 or 'full'")
    return value


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(float(x)) for x in text.split(",") if x]


def _check_writable(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise CliError(f"{path} exists; pass --force to overwrite")


def _echo_config(args) -> None:
    items = {k: v for k, v in vars(args).items() if k != "func"}
    print("# config: " + " ".join(f"{k}={v}" for k, v in items.items()), file=sys.stderr)


def cmd_keygen(args) -> int:
    if args.m < 1:
        raise CliError("empty key: --m must be >= 1")
    out = Path(args.out)
    _check_writable(out, args.force)
    key = keygen(args.m, args.sigma, args.seed)
    key.save(out)
    print(f"wrote key {key.fingerprint} (m={key.m}, sigma={key.sigma:g}, seed={key.seed}) to {out}")
    return EXIT_OK


def cmd_embed(args) -> int:
    graph = load_edge_list(args.graph)
    key = Key.load(args.key)
    for p in (args.out, args.receipt):
        _check_writable(Path(p), args.force)
    ctx = EmbeddingContext(graph, args.n0)
    watermarked, receipt = ctx.embed(key)
    if not receipt.succeeded:
        print(
            "embedding failed: the watermarked graph equals the original; "
            "retry with a larger --sigma or --m",
            file=sys.stderr,
        )
        return EXIT_ERROR
    write_edge_list(watermarked, args.out)
    receipt.save(args.receipt)
    print(f"ED {receipt.ed_percent:.3e} %  ({receipt.changed_pairs} pairs changed, n0={receipt.n0_used})")
    return EXIT_OK


def cmd_extract(args) -> int:
    original = load_edge_list(args.original)
    suspect = load_edge_list(args.suspect)
    key = Key.load(args.key)
    if suspect.n != original.n:
        raise CliError(f"vertex counts differ: original {original.n}, suspect {suspect.n}")
    ctx = EmbeddingContext(original, args.n0)
    result = ctx.extract(ctx.watermark(key), suspect, args.theta)
    print(f"score   {result.score:.6g}")
    print(f"norm    {result.norm:.6g}")
    print(f"ratio   {result.normalized:.6g}")
    print(f"theta   {result.theta:g}")
    print(f"verdict {'watermark retrieved' if result.verdict else 'not retrieved'}")
    return EXIT_OK if result.verdict else EXIT_REJECTED


def cmd_attack(args) -> int:
    graph = load_edge_list(args.graph)
    _check_writable(Path(args.out), args.force)
    attacked = edge_flip_attack(graph, args.flip_percent, args.seed)
    write_edge_list(attacked, args.out)
    ed = edit_distance_percent(graph, attacked) if graph.num_edges else 0.0
    print(f"ED {ed:.6g} %")
    return EXIT_OK


def cmd_edit_distance(args) -> int:
    g1, g2 = load_edge_list(args.reference), load_edge_list(args.other)
    print(f"ED {edit_distance_percent(g1, g2):.6e} %")
    return EXIT_OK


def cmd_tune(args) -> int:
    graph = load_edge_list(args.graph)
    report_path = Path(args.report)
    _check_writable(report_path, args.force)
    policy = KeyLengthPolicy.parse(args.m_policy)
    m = choose_key_length(graph, policy)
    cfg = TuneConfig(args.ed_low, args.ed_high, m=m, n0=args.n0, max_iterations=args.max_iterations, trial_seed=args.seed)
    ctx = EmbeddingContext(graph, args.n0)
    try:
        result = tune_sigma(graph, cfg, context=ctx)
    except TuningError as exc:
        (lo, lo_ed), (hi, hi_ed) = exc.bracket if exc.bracket else ((float("nan"),) * 2,) * 2
        print(f"tuning failed: {exc}", file=sys.stderr)
        print(f"closest bracket: sigma={lo:.6g} -> ED {lo_ed:.3g}%, sigma={hi:.6g} -> ED {hi_ed:.3g}%", file=sys.stderr)
        return EXIT_ERROR
    calib = calibrate_theta(
        graph,
        result.key,
        args.flip_percent,
        args.trials,
        args.n0,
        attack_seed=args.attack_seed,
        safety_factor=args.safety_factor,
        context=ctx,
    )

    # replay the chosen parameters end to end
    key = keygen(m, result.sigma, args.seed)
    watermarked, receipt = ctx.embed(key)
    record = ctx.watermark(key)
    attacked = edge_flip_attack(watermarked, args.flip_percent, args.attack_seed + 1)
    check = {
        "ed_percent": receipt.ed_percent,
        "ed_matches": receipt.ed_percent == result.receipt.ed_percent,
        "unattacked_verdict_theta0": ctx.extract(record, watermarked, 0.0).verdict,
        "attacked_verdict": ctx.extract(record, attacked, calib.theta).verdict,
    }
    report = json.loads(tuning_report(graph, policy, cfg, result, calib, check))
    report["cli"] = {k: v for k, v in vars(args).items() if k != "func"}
    report_path.write_text(json.dumps(report, indent=2) + "\n")
    if args.key_out:
        _check_writable(Path(args.key_out), args.force)
        key.save(args.key_out)
    print(
        f"m={m} sigma={result.sigma:g} ED={result.receipt.ed_percent:.3e}% "
        f"theta={calib.theta:.4g} (flips {args.flip_percent:g}%, {args.trials} trials)"
    )
    ok = all(v for k, v in check.items() if k != "ed_percent")
    if not ok:
        print(f"self-check failed: {check}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_ERROR


def cmd_bench(args) -> int:
    out = Path(args.out)
    _check_writable(out, args.force)
    name = args.experiment
    if name == "uniqueness":
        rep = harness.uniqueness_experiment(
            args.model, args.n, args.densities, args.trials, args.seed, m=args.m, n0=args.n0,
            ed_window=(args.ed_low, args.ed_high), jobs=args.jobs,
        )
    elif name == "fp":
        rep = harness.false_positive_experiment(
            args.model, args.n, args.densities[0], args.theta_grid, regenerations=args.regenerations,
            seed=args.seed, base_graphs=args.base_graphs, m=args.m, n0=args.n0,
            ed_window=(args.ed_low, args.ed_high), jobs=args.jobs,
        )
    elif name == "robustness":
        if not (args.graph and args.key and args.theta is not None):
            raise CliError("robustness needs --graph, --key and --theta")
        rep = harness.robustness_experiment(
            load_edge_list(args.graph), Key.load(args.key), args.theta, args.flip_grid, args.trials, args.seed, args.n0
        )
    elif name == "timing":
        rep = harness.timing_benchmark(
            args.model, args.sizes, KeyLengthPolicy.parse(args.m_policy), args.n0, args.timeout, args.seed,
            density_target=args.densities[0],
        )
    elif name == "spearman":
        graph = (
            load_edge_list(args.graph)
            if args.graph
            else harness.generate(args.model, args.n, harness.params_for_density(args.model, args.n, args.densities[0]), args.seed)
        )
        rep = harness.attack_impact_spearman(graph, args.flip_grid, args.k, args.trials, args.seed)
    else:
        raise CliError(f"unknown experiment {name!r}")
    for k, v in vars(args).items():
        if k != "func":
            rep.params.setdefault(f"cli.{k}", v)
    rep.write(out)
    print(f"wrote {len(rep.rows)} rows to {out}")
    return EXIT_OK


EXPERIMENTS = ("uniqueness", "fp", "robustness", "timing", "spearman")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphmark", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("keygen", help="generate a secret key")
    k.add_argument("--m", type=int, required=True, help="key length")
    k.add_argument("--sigma", type=float, required=True, help="standard deviation")
    k.add_argument("--seed", type=int, required=True)
    k.add_argument("--out", required=True)
    k.add_argument("--force", action="store_true")
    k.set_defaults(func=cmd_keygen)

    e = sub.add_parser("embed", help="watermark a graph")
    e.add_argument("--graph", required=True)
    e.add_argument("--key", required=True)
    e.add_argument("--n0", type=_n0, default=DEFAULT_N0, help="reduction size or 'full' (default %(default)s)")
    e.add_argument("--out", required=True, help="watermarked edge list")
    e.add_argument("--receipt", required=True)
    e.add_argument("--force", action="store_true")
    e.set_defaults(func=cmd_embed)

    x = sub.add_parser("extract", help="test a suspect graph for a watermark")
    x.add_argument("--original", required=True)
    x.add_argument("--suspect", required=True)
    x.add_argument("--key", required=True)
    x.add_argument("--theta", type=float, required=True)
    x.add_argument("--n0", type=_n0, default=DEFAULT_N0)
    x.set_defaults(func=cmd_extract)

    a = sub.add_parser("attack", help="flip random vertex pairs")
    a.add_argument("--graph", required=True)
    a.add_argument("--flip-percent", type=float, required=True)
    a.add_argument("--seed", type=int, required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--force", action="store_true")
    a.set_defaults(func=cmd_attack)

    d = sub.add_parser("edit-distance", help="ED of OTHER relative to REFERENCE, in percent")
    d.add_argument("reference")
    d.add_argument("other")
    d.set_defaults(func=cmd_edit_distance)

    t = sub.add_parser("tune", help="choose m, sigma and theta for a graph")
    t.add_argument("--graph", required=True)
    t.add_argument("--m-policy", default="constant:210", help="constant:M | affine:A,B | table:D=M,... | reference")
    t.add_argument("--ed-low", type=float, default=0.0, help="exclusive lower ED bound, percent")
    t.add_argument("--ed-high", type=float, default=0.005, help="exclusive upper ED bound, percent")
    t.add_argument("--flip-percent", type=float, default=10.0, help="attack strength theta must tolerate")
    t.add_argument("--trials", type=int, default=10)
    t.add_argument("--safety-factor", type=float, default=1.0)
    t.add_argument("--max-iterations", type=int, default=60)
    t.add_argument("--seed", type=int, required=True, help="key seed used while tuning")
    t.add_argument("--attack-seed", type=int, required=True)
    t.add_argument("--n0", type=_n0, default=DEFAULT_N0)
    t.add_argument("--report", required=True)
    t.add_argument("--key-out", help="also write the tuned key")
    t.add_argument("--force", action="store_true")
    t.set_defaults(func=cmd_tune)

    b = sub.add_parser("bench", help="run an experiment and write a CSV report")
    b.add_argument("experiment", help="one of: " + ", ".join(EXPERIMENTS))
    b.add_argument("--model", default="ba", choices=harness.MODELS)
    b.add_argument("--n", type=int, default=5000)
    b.add_argument("--densities", type=_floats, default=[5.0])
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--m", type=int, default=210)
    b.add_argument("--m-policy", default="constant:210")
    b.add_argument("--n0", type=_n0, default=1024)
    b.add_argument("--ed-low", type=float, default=0.05)
    b.add_argument("--ed-high", type=float, default=0.5)
    b.add_argument("--theta-grid", type=_floats, default=[0, 1, 2, 5, 10, 20, 50])
    b.add_argument("--regenerations", type=int, default=5)
    b.add_argument("--base-graphs", type=int, default=10)
    b.add_argument("--flip-grid", type=_floats, default=[0, 1, 5, 10])
    b.add_argument("--k", type=int, default=100)
    b.add_argument("--sizes", type=_ints, default=[10_000, 40_000, 160_000])
    b.add_argument("--timeout", type=float, default=25 * 60, help="seconds per timing cell")
    b.add_argument("--graph", help="edge list (robustness, spearman)")
    b.add_argument("--key", help="key file (robustness)")
    b.add_argument("--theta", type=float)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", required=True)
    b.add_argument("--force", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    _echo_config(args)
    try:
        return args.func(args)
    except (CliError, EdgeListError, EmptyWatermarkError, TuningError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
