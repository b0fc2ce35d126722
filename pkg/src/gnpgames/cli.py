"""Command-line surface.

Subcommands: ``sample`` (emit a graph), ``play`` (one game, transcript
out), ``trials`` (a seeded batch), ``bias-scan`` (win-rate curve and
empirical critical bias), ``audit`` (G(n,p) property battery over
seeds), ``oracle-check`` (strategy and solver coherence on tiny
boards), ``box`` (box-game experiments).

Options can come from a flat ``key=value`` config file (``--config``);
command-line flags override file values.  Batch commands write a
manifest of the resolved configuration next to their outputs.

Exit codes: 0 success, 2 configuration error, 3 internal error (also
used when oracle-check finds violations).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import traceback
from pathlib import Path

from .audit import AuditKnobs, report_to_text
from .boxgames import (
    BOXMAKER,
    BoxState,
    box_threshold,
    boxmaker_beats_optimal_breaker,
    enforcer_beats_optimal_avoider,
    solve_box_exact,
    solve_rbox_exact,
)
from .engine import play, transcript_to_text
from .graphs import GnpParams, graph_from_text, graph_to_text, sample_gnp
from .harness import (
    ConfigError,
    TrialConfig,
    audit_command,
    estimate_critical_bias,
    manifest_for,
    make_strategy,
    oracle_coherence_check,
    parse_config_file,
    parse_params,
    records_to_csv,
    records_to_jsonl,
    run_trials,
    strategy_names,
)


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_cfg(args) -> dict[str, str]:
    if getattr(args, "config", None):
        return parse_config_file(Path(args.config).read_text())
    return {}

def _opt(args, file_cfg, key, default, cast=str):
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    if key in file_cfg:
        raw = file_cfg[key]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


def _board_from_args(args, file_cfg):
    if getattr(args, "graph", None):
        return graph_from_text(Path(args.graph).read_text())
    n = _opt(args, file_cfg, "n", None, int)
    p = _opt(args, file_cfg, "p", None, float)
    seed = _opt(args, file_cfg, "seed", 0, int)
    if n is None or p is None:
        raise ConfigError("need --graph or both --n and --p")
    return sample_gnp(GnpParams(n, p, seed))


def _trial_config(args, file_cfg, trials_default=100) -> TrialConfig:
    return TrialConfig(
        n=_opt(args, file_cfg, "n", None, int),
        p=_opt(args, file_cfg, "p", None, float),
        trials=_opt(args, file_cfg, "trials", trials_default, int),
        master_seed=_opt(args, file_cfg, "master_seed", 0, int),
        convention=_opt(args, file_cfg, "convention", "maker-breaker"),
        target=_opt(args, file_cfg, "target", "connectivity"),
        target_k=_opt(args, file_cfg, "target_k", None, int),
        target_c=_opt(args, file_cfg, "target_c", None, int),
        ham_budget=_opt(args, file_cfg, "ham_budget", None, int),
        bias_a=_opt(args, file_cfg, "bias_a", 1, int),
        bias_b=_opt(args, file_cfg, "bias_b", 1, int),
        first_player=_opt(args, file_cfg, "first_player", None),
        early_cutoff=_opt(args, file_cfg, "early_cutoff", True, bool),
        strategy_a=_opt(args, file_cfg, "strategy_a", "random"),
        strategy_a_params=parse_params(_opt(args, file_cfg, "params_a", None)),
        strategy_b=_opt(args, file_cfg, "strategy_b", "random"),
        strategy_b_params=parse_params(_opt(args, file_cfg, "params_b", None)),
        workers=_opt(args, file_cfg, "workers", 1, int),
    )


def _cmd_sample(args) -> int:
    cfg = _load_cfg(args)
    n = _opt(args, cfg, "n", None, int)
    p = _opt(args, cfg, "p", None, float)
    if n is None or p is None:
        raise ConfigError("sample needs --n and --p")
    g = sample_gnp(GnpParams(n, p, _opt(args, cfg, "seed", 0, int)))
    _write(args.out, graph_to_text(g))
    return 0


def _cmd_play(args) -> int:
    cfg = _load_cfg(args)
    g = _board_from_args(args, cfg)
    tc = _trial_config(args, cfg, trials_default=1)
    spec = tc.game_spec()
    strat_a, strat_b = tc.strategies()
    res = play(spec, g, strat_a, strat_b, tc.master_seed)
    if args.transcript:
        _write(args.transcript, transcript_to_text(res.final_state))
    print(f"winner={res.winner.value} reason={res.reason} "
          f"moves={res.move_count}")
    return 0


def _ensure_outdir(args) -> Path:
    if not getattr(args, "out", None):
        raise ConfigError("this command needs --out DIR")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_trials(args) -> int:
    cfg = _load_cfg(args)
    tc = _trial_config(args, cfg)
    if tc.n is None or tc.p is None:
        raise ConfigError("trials needs --n and --p")
    out = _ensure_outdir(args)
    records = run_trials(tc)
    (out / "records.jsonl").write_text(
        records_to_jsonl(records, timings=bool(args.timings)))
    (out / "summary.csv").write_text(records_to_csv(records))
    (out / "manifest.json").write_text(
        json.dumps(manifest_for("trials", tc.to_dict()), sort_keys=True,
                   indent=2) + "\n")
    wins = {}
    for r in records:
        wins[r.winner] = wins.get(r.winner, 0) + 1
    print(f"trials={len(records)} " +
          " ".join(f"{k}={v}" for k, v in sorted(wins.items())))
    return 0


def _parse_b_range(text: str) -> list[int]:
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(lo, hi + 1, step))
    return [int(x) for x in text.split(",") if x.strip()]


def _cmd_bias_scan(args) -> int:
    cfg = _load_cfg(args)
    tc = _trial_config(args, cfg)
    if tc.n is None or tc.p is None:
        raise ConfigError("bias-scan needs --n and --p")
    b_range = _parse_b_range(_opt(args, cfg, "b_range", None) or "")
    if not b_range:
        raise ConfigError("bias-scan needs --b-range")
    out = _ensure_outdir(args)
    est = estimate_critical_bias(tc, b_range)
    (out / "curve.csv").write_text(est.curve_csv())
    (out / "estimate.json").write_text(
        json.dumps(est.to_dict(), sort_keys=True, indent=2) + "\n")
    (out / "manifest.json").write_text(
        json.dumps(manifest_for("bias-scan", dict(tc.to_dict(), b_range=b_range)),
                   sort_keys=True, indent=2) + "\n")
    print(f"b_star={est.b_star} censored={est.censored} ratio={est.ratio}")
    return 0


def _cmd_audit(args) -> int:
    cfg = _load_cfg(args)
    n = _opt(args, cfg, "n", None, int)
    p = _opt(args, cfg, "p", None, float)
    if n is None or p is None:
        raise ConfigError("audit needs --n and --p")
    count = _opt(args, cfg, "seeds", 10, int)
    master = _opt(args, cfg, "master_seed", 0, int)
    workers = _opt(args, cfg, "workers", 1, int)
    knobs = AuditKnobs(
        samples_per_bucket=_opt(args, cfg, "samples_per_bucket", 10000, int),
        seed=master)
    out = _ensure_outdir(args)
    seeds = [master + i for i in range(count)]
    results, summary = audit_command(n, p, seeds, knobs, workers=workers)
    reports_dir = out / "reports"
    reports_dir.mkdir(exist_ok=True)
    for seed, rep in results:
        (reports_dir / f"seed_{seed}.txt").write_text(report_to_text(rep))
    (out / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n")
    (out / "manifest.json").write_text(
        json.dumps(manifest_for("audit", {"n": n, "p": p, "seeds": seeds,
                                          "knobs": knobs.__dict__}),
                   sort_keys=True, indent=2) + "\n")
    for name, frac in sorted(summary.items()):
        print(f"{name}\t{frac:.3f}")
    return 0


def _cmd_oracle_check(args) -> int:
    cfg = _load_cfg(args)
    res = oracle_coherence_check(
        boards=_opt(args, cfg, "boards", 50, int),
        max_edges=_opt(args, cfg, "max_edges", 10, int),
        master_seed=_opt(args, cfg, "master_seed", 0, int))
    print(f"boards={res['boards']} playouts={res['playouts']}")
    print(f"first-player-consistency\t"
          f"{'PASS' if res['first_player_violations'] == 0 else 'FAIL'}")
    print(f"strategy-legality\t"
          f"{'PASS' if not res['unexpected_forfeits'] else 'FAIL'}")
    for name, count in sorted(res["forfeits"].items()):
        print(f"expected-forfeits\t{name}\t{count}")
    return 0 if res["passed"] else 3


def _cmd_box(args) -> int:
    cfg = _load_cfg(args)
    if getattr(args, "rbox", None):
        sizes = tuple(int(x) for x in args.rbox.split(",") if x.strip())
        bias = _opt(args, cfg, "avoider_bias", 1, int)
        winner = solve_rbox_exact(sizes, bias)
        greedy = enforcer_beats_optimal_avoider(sizes, bias)
        print(f"rbox sizes={sizes} avoider_bias={bias} optimal={winner} "
              f"greedy_forcer_wins={greedy}")
        return 0
    m = _opt(args, cfg, "m", None, int)
    length = _opt(args, cfg, "l", None, int)
    b = _opt(args, cfg, "b", None, int)
    if None in (m, length, b):
        raise ConfigError("box needs --m --l --b (or --rbox)")
    thr = box_threshold(m, length) if m >= 2 else float("nan")
    exact = solve_box_exact(BoxState.new(m, length, b))
    greedy = boxmaker_beats_optimal_breaker(m, length, b)
    print(f"box m={m} l={length} b={b} threshold={thr:.4f} "
          f"optimal={exact} greedy_claimer_wins={greedy}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gnpgames",
        description="Biased edge-claiming games on random graphs.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, with_game=True):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--n", type=int)
        p.add_argument("--p", type=float)
        p.add_argument("--master-seed", dest="master_seed", type=int)
        if with_game:
            p.add_argument("--convention", choices=[
                "maker-breaker", "avoider-enforcer-monotone"])
            p.add_argument("--target", choices=[
                "connectivity", "perfect-matching", "hamiltonicity",
                "k-connectivity", "min-degree", "isolate-vertex"])
            p.add_argument("--target-k", dest="target_k", type=int)
            p.add_argument("--target-c", dest="target_c", type=int)
            p.add_argument("--ham-budget", dest="ham_budget", type=int)
            p.add_argument("--bias-a", dest="bias_a", type=int)
            p.add_argument("--bias-b", dest="bias_b", type=int)
            p.add_argument("--first-player", dest="first_player", choices=[
                "maker", "breaker", "avoider", "enforcer"])
            p.add_argument("--strategy-a", dest="strategy_a",
                           choices=strategy_names())
            p.add_argument("--strategy-b", dest="strategy_b",
                           choices=strategy_names())
            p.add_argument("--params-a", dest="params_a")
            p.add_argument("--params-b", dest="params_b")
            p.add_argument("--workers", type=int)

    p = sub.add_parser("sample", help="emit one G(n,p) graph")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="-")
    common(p, with_game=False)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("play", help="run one game")
    p.add_argument("--graph", help="board graph file (else sampled)")
    p.add_argument("--seed", type=int)
    p.add_argument("--transcript", help="write the move transcript here")
    common(p)
    p.set_defaults(func=_cmd_play)

    p = sub.add_parser("trials", help="seeded batch of games")
    p.add_argument("--trials", type=int)
    p.add_argument("--out", required=False)
    p.add_argument("--timings", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_trials)

    p = sub.add_parser("bias-scan", help="win-rate curve over biases")
    p.add_argument("--trials", type=int)
    p.add_argument("--b-range", dest="b_range",
                   help="comma list or lo:hi[:step]")
    p.add_argument("--out", required=False)
    common(p)
    p.set_defaults(func=_cmd_bias_scan)

    p = sub.add_parser("audit", help="G(n,p) typicality battery")
    p.add_argument("--seeds", type=int)
    p.add_argument("--samples-per-bucket", dest="samples_per_bucket", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", required=False)
    common(p, with_game=False)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("oracle-check",
                       help="solver and strategy coherence on tiny boards")
    p.add_argument("--boards", type=int)
    p.add_argument("--max-edges", dest="max_edges", type=int)
    common(p, with_game=False)
    p.set_defaults(func=_cmd_oracle_check)

    p = sub.add_parser("box", help="box-game experiments")
    p.add_argument("--m", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--rbox", help="comma-separated box sizes")
    p.add_argument("--avoider-bias", dest="avoider_bias", type=int)
    common(p, with_game=False)
    p.set_defaults(func=_cmd_box)

    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
