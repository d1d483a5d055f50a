"""Command-line entry point.

Subcommands:

    run         execute one session from a config file; JSONL records + CSV summary
    sweep       cartesian sweep over phi / V / eta / profile; one CSV row per cell
    analyze     closed-form cheat probabilities, fair phi, prediction tables
    referee     run the physics referee service
    play-alice  play the sender role against a referee
    play-bob    play the receiver role against a referee
    serve       start the HTTP sessions service

Exit codes: 0 success, 2 configuration error, 3 protocol error.  Angles are
degrees on every CLI surface; see README for the config-file grammar.
"""
from __future__ import annotations

import argparse
import math
import secrets
import sys
from pathlib import Path

from . import analysis
from .config import (
    ConfigError,
    FixedCount,
    SessionConfig,
    StrategyProfile,
    AliceKind,
    BobKind,
    parse_config_ini,
    parse_phi,
)
from .engine import run_session
from .rng import derive_seed
from .summary import summary_row, write_records_jsonl, write_summary_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROTOCOL = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_config(args) -> SessionConfig:
    path = Path(args.config)
    if not path.exists():
        raise CliError(f"config file not found: {path}", EXIT_CONFIG)
    seed = args.seed
    if seed is None and getattr(args, "seed_from_entropy", False):
        seed = secrets.randbits(63)
    try:
        return parse_config_ini(path.read_text(), seed_override=seed)
    except ConfigError as exc:
        raise CliError(f"config error: {exc}", EXIT_CONFIG) from exc


def cmd_run(args) -> int:
    config = _load_config(args)
    result = run_session(config)
    if args.records:
        with open(args.records, "w") as out:
            write_records_jsonl(out, result.records)
    with open(args.summary, "w") as out:
        write_summary_csv(out, [summary_row(config, result.snapshot)])
    if not args.quiet:
        s = result.snapshot
        print(
            f"n={s['n']} p0={s['p0']:.4f} p1={s['p1']:.4f} pstar={s['pstar']:.4f}"
            + (f" cheat_success={s['cheat_success']:.4f}" if s["cheat_success"] is not None else "")
            + f" stop={result.stop_reason} seed={config.seed}"
        )
    return EXIT_OK


def _parse_profile_label(label: str) -> StrategyProfile:
    try:
        alice_name, bob_name = label.split("/")
        return StrategyProfile(AliceKind(alice_name.strip()), BobKind(bob_name.strip()))
    except (ValueError, ConfigError) as exc:
        raise CliError(f"bad profile {label!r}: {exc}", EXIT_CONFIG) from exc


def cmd_sweep(args) -> int:
    phis = [parse_phi(tok) for tok in args.phi_deg.split(",")]
    visibilities = [float(tok) for tok in args.v.split(",")]
    etas = [float(tok) for tok in args.eta.split(",")]
    profiles = [_parse_profile_label(tok) for tok in args.profile.split(",")]
    cells = [
        (phi, v, eta, profile)
        for phi in phis
        for v in visibilities
        for eta in etas
        for profile in profiles
    ]
    tasks = [(args.seed, args.count, i, cell) for i, cell in enumerate(cells)]
    try:
        if args.workers > 1:
            from concurrent.futures import ProcessPoolExecutor

            # cells carry derived seeds, so results are order-stable no
            # matter how the pool schedules them
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                rows = list(pool.map(_sweep_cell_entry, tasks))
        else:
            rows = [_sweep_cell_entry(task) for task in tasks]
    except ConfigError as exc:
        raise CliError(f"config error: {exc}", EXIT_CONFIG) from exc
    with open(args.out, "w") as out:
        write_summary_csv(out, rows)
    if not args.quiet:
        print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _sweep_cell_entry(packed):
    master_seed, count, index, (phi, v, eta, profile) = packed
    config = SessionConfig(
        phi=phi,
        profile=profile,
        eta=eta,
        visibility=v,
        seed=derive_seed(master_seed, f"cell:{index}"),
        stop=FixedCount(count),
    )
    return summary_row(config, run_session(config, collect_records=False).snapshot)


def cmd_analyze(args) -> int:
    bb84 = math.pi / 4
    fair = analysis.find_fair_phi()
    print(f"P_A(45°)={analysis.p_alice_opt(bb84):.6f}")
    print(f"P_B(45°)={analysis.p_bob_opt(bb84):.6f}")
    print(f"fair φ={math.degrees(fair):.4f}° ({fair:.7f} rad)")
    print(f"P_A(fair)={analysis.p_alice_opt(fair):.6f}")
    print(f"P_B(fair)={analysis.p_bob_opt(fair):.6f}")
    phis = [parse_phi(tok) for tok in args.phi_deg.split(",")] if args.phi_deg else [bb84, fair]
    visibilities = [float(tok) for tok in args.v.split(",")] if args.v else [1.0]
    rows = analysis.prediction_rows(phis, visibilities)
    header = ",".join(analysis.PREDICTION_CSV_COLUMNS)
    lines = [header]
    for row in rows:
        lines.append(
            f"{row['phi_deg']:.6f},{row['V']:.6f},{row['pA']:.6f},{row['pB']:.6f},"
            f"{row['pstar_honest']:.6f},{row['pstar_cheat_alice']:.6f},{row['pstar_cheat_bob']:.6f}"
        )
    if args.csv:
        Path(args.csv).write_text("\n".join(lines) + "\n")
        print(f"wrote prediction table to {args.csv}")
    else:
        print()
        print("\n".join(lines))
    return EXIT_OK


def _parse_listen(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise CliError(f"bad address {value!r}, expected host:port", EXIT_CONFIG)
    return host, int(port)


def cmd_referee(args) -> int:
    from .referee import RefereeServer

    host, port = _parse_listen(args.listen)
    server = RefereeServer(host, port, timeout=args.timeout)
    print(f"referee listening on {server.address[0]}:{server.address[1]}")
    try:
        server.serve(max_sessions=args.sessions)
    except KeyboardInterrupt:
        server.stop()
    return EXIT_OK


def _cmd_play(args, role: str) -> int:
    from .clients import SessionAborted, connect, play_alice, play_bob
    from .referee import ProtocolViolation

    config = _load_config(args)
    host, port = _parse_listen(args.connect)
    try:
        conn = connect(host, port, timeout=args.timeout)
        result = play_alice(conn, config) if role == "alice" else play_bob(conn, config)
    except (SessionAborted, ProtocolViolation, OSError) as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    stats = result.stats
    print(
        f"played {stats.n} flips: p0={stats.p0:.4f} p1={stats.p1:.4f} pstar={stats.p_star:.4f}"
        + (f" cheat_success={stats.cheat_success:.4f}" if stats.cheat_success is not None else "")
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, port = _parse_listen(args.listen)
    app = create_app(
        report_dir=Path(args.report_dir),
        ui_dir=Path(args.ui) if args.ui else None,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qflip", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one session from a config file")
    run.add_argument("--config", required=True, help="INI config file (see README)")
    run.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    run.add_argument("--seed-from-entropy", action="store_true", help="draw the seed from OS entropy")
    run.add_argument("--records", default=None, help="write per-flip records to this JSONL file")
    run.add_argument("--summary", required=True, help="write the one-row CSV summary here")
    run.add_argument("--quiet", action="store_true")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="cartesian parameter sweep, one CSV row per cell")
    sweep.add_argument("--phi-deg", default="45,fair", help="comma list of degrees or bb84/fair")
    sweep.add_argument("--v", default="1.0", help="comma list of visibilities")
    sweep.add_argument("--eta", default="1.0", help="comma list of transmissions")
    sweep.add_argument(
        "--profile",
        default="honest/honest,cheating/honest,honest/cheating",
        help="comma list of alice/bob profiles",
    )
    sweep.add_argument("--count", type=int, default=10000, help="instances per cell")
    sweep.add_argument("--seed", type=int, required=True, help="master seed; cells derive from it")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--quiet", action="store_true")
    sweep.set_defaults(func=cmd_sweep)

    analyze = sub.add_parser("analyze", help="closed-form table and fair phi")
    analyze.add_argument("--phi-deg", default=None, help="comma list of degrees or bb84/fair")
    analyze.add_argument("--v", default=None, help="comma list of visibilities")
    analyze.add_argument("--csv", default=None, help="write the prediction table to this CSV")
    analyze.set_defaults(func=cmd_analyze)

    referee = sub.add_parser("referee", help="run the physics referee")
    referee.add_argument("--listen", default="127.0.0.1:7707")
    referee.add_argument("--sessions", type=int, default=None, help="stop after this many sessions")
    referee.add_argument("--timeout", type=float, default=30.0)
    referee.set_defaults(func=cmd_referee)

    for role in ("alice", "bob"):
        play = sub.add_parser(f"play-{role}", help=f"play the {role} role against a referee")
        play.add_argument("--connect", default="127.0.0.1:7707")
        play.add_argument("--config", required=True)
        play.add_argument("--seed", type=int, default=None)
        play.add_argument("--seed-from-entropy", action="store_true")
        play.add_argument("--timeout", type=float, default=30.0)
        play.set_defaults(func=lambda args, _role=role: _cmd_play(args, _role))

    serve = sub.add_parser("serve", help="start the HTTP sessions service")
    serve.add_argument("--listen", default="127.0.0.1:8000")
    serve.add_argument("--report-dir", default="session-reports")
    serve.add_argument("--ui", default=None, help="serve this directory of static UI files at /ui")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
