"""Monte Carlo experiment driver and persistence.

A batch of trials is fully described by a :class:`TrialConfig`: board
parameters, game convention and target, the two strategies by registry
name, and a master seed.  Trial i derives its graph seed and play seed
from (master_seed, i), so any record can be regenerated from the config
alone and parallel execution emits exactly the serial record stream.

Persistence is line-oriented: one JSON object per trial (schema
versioned, keys sorted, wall time excluded so reruns are byte
identical; pass ``timings=True`` for profiling output), plus a flat CSV
summary and a manifest of the resolved configuration.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional, Sequence

from . import __version__ as _pkg_version
from .audit import AuditKnobs, AuditReport, audit_gnp_properties
from .engine import (
    Connectivity,
    Convention,
    GameSpec,
    Hamiltonicity,
    IsolateVertex,
    KConnectivity,
    MinDegree,
    PerfectMatching,
    Role,
    play,
    roles_of,
)
from .graphs import GnpParams, sample_gnp
from .hypergraphs import AvoiderPotential, BreakerPotential
from .rng import derive_seed
from .strategies import (
    AvoiderIsolator,
    BreakerIsolator,
    EnforcerForcer,
    HamiltonicityPipeline,
    MinDegreeBuilder,
    RandomClaimer,
)

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "TrialConfig",
    "TrialRecord",
    "BiasEstimate",
    "make_target",
    "make_strategy",
    "strategy_names",
    "run_trials",
    "replay_trial",
    "records_to_jsonl",
    "records_from_jsonl",
    "records_to_csv",
    "wilson_interval",
    "estimate_critical_bias",
    "audit_command",
    "manifest_for",
    "parse_config_file",
    "parse_params",
]

SCHEMA_VERSION = "1"


class ConfigError(ValueError):
    pass


# --- registries -------------------------------------------------------------


def make_target(name: str, k: int | None = None, c: int | None = None,
                ham_budget: int | None = None,
                ham_final_budget: int | None = None):
    name = name.lower()
    if name == "connectivity":
        return Connectivity()
    if name == "perfect-matching":
        return PerfectMatching()
    if name == "hamiltonicity":
        return Hamiltonicity(search_budget=ham_budget,
                             final_budget=ham_final_budget)
    if name == "k-connectivity":
        if k is None:
            raise ConfigError("k-connectivity target needs k")
        return KConnectivity(k)
    if name == "min-degree":
        if c is None:
            raise ConfigError("min-degree target needs c")
        return MinDegree(c)
    if name == "isolate-vertex":
        return IsolateVertex()
    raise ConfigError(f"unknown target {name!r}")


_STRATEGY_BUILDERS = {
    "random": lambda p: RandomClaimer(),
    "degree-builder": lambda p: MinDegreeBuilder(
        c=int(p.get("c", 2))),
    "hamiltonian-builder": lambda p: HamiltonicityPipeline(
        stage1_degree=_opt_int(p.get("stage1_degree")),
        r1=_opt_int(p.get("r1")), r2=_opt_int(p.get("r2")),
        exact_limit=int(p.get("exact_limit", 25)),
        booster_exact_limit=int(p.get("booster_exact_limit", 14))),
    "k-connected-builder": lambda p: HamiltonicityPipeline(
        connectivity_k=int(p.get("k", 2)),
        stage1_degree=_opt_int(p.get("stage1_degree")),
        r1=_opt_int(p.get("r1")), r2=_opt_int(p.get("r2"))),
    "star-isolator": lambda p: BreakerIsolator(
        c_size=_opt_int(p.get("c_size")), eps=float(p.get("eps", 0.5))),
    "sparse-set-avoider": lambda p: AvoiderIsolator(
        u_size=_opt_int(p.get("u_size")), retries=int(p.get("retries", 100))),
    "expansion-forcer": lambda p: EnforcerForcer(
        d=int(p.get("d", 1)), k1=int(p.get("k1", 1)), k2=int(p.get("k2", 3))),
    "potential-blocker": lambda p: BreakerPotential(
        a=int(p.get("a", 1)), b=int(p.get("b", 1))),
    "potential-avoider": lambda p: AvoiderPotential(a=int(p.get("a", 1))),
}


def _opt_int(v):
    return None if v in (None, "", "auto") else int(v)


def strategy_names() -> list[str]:
    return sorted(_STRATEGY_BUILDERS)


def make_strategy(name: str, params: dict | None = None):
    try:
        builder = _STRATEGY_BUILDERS[name.lower()]
    except KeyError:
        raise ConfigError(
            f"unknown strategy {name!r}; known: {', '.join(strategy_names())}"
        ) from None
    return builder(params or {})


def parse_params(text: str | None) -> dict:
    """Parse ``k=v,k=v`` parameter strings (ints/floats coerced)."""
    out: dict = {}
    if not text:
        return out
    for tok in text.split(","):
        if not tok.strip():
            continue
        if "=" not in tok:
            raise ConfigError(f"bad parameter token {tok!r}")
        k, v = tok.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# --- trial configuration ------------------------------------------------------


@dataclass(frozen=True)
class TrialConfig:
    n: int
    p: float
    trials: int
    master_seed: int
    convention: str = "maker-breaker"
    target: str = "connectivity"
    target_k: Optional[int] = None
    target_c: Optional[int] = None
    ham_budget: Optional[int] = None
    ham_final_budget: Optional[int] = None
    bias_a: int = 1
    bias_b: int = 1
    first_player: Optional[str] = None
    early_cutoff: bool = True
    strategy_a: str = "random"
    strategy_a_params: dict = field(default_factory=dict)
    strategy_b: str = "random"
    strategy_b_params: dict = field(default_factory=dict)
    workers: int = 1

    def game_spec(self) -> GameSpec:
        conv = Convention(self.convention)
        first = Role(self.first_player) if self.first_player else None
        return GameSpec(conv, make_target(self.target, self.target_k,
                                          self.target_c, self.ham_budget,
                                          self.ham_final_budget),
                        bias_a=self.bias_a, bias_b=self.bias_b,
                        first_player=first, early_cutoff=self.early_cutoff)

    def strategies(self):
        return (make_strategy(self.strategy_a, self.strategy_a_params),
                make_strategy(self.strategy_b, self.strategy_b_params))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrialRecord:
    schema: str
    index: int
    master_seed: int
    n: int
    p: float
    bias_a: int
    bias_b: int
    convention: str
    target: str
    strategy_a: str
    strategy_b: str
    first_player: str
    winner: str
    reason: str
    move_count: int
    wall_time_ms: Optional[float] = None

    def canonical_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        if not timings:
            d.pop("wall_time_ms")
        return d


def _run_one(cfg: TrialConfig, index: int) -> TrialRecord:
    spec = cfg.game_spec()
    strat_a, strat_b = cfg.strategies()
    graph_seed = derive_seed(cfg.master_seed, index, 0)
    play_seed = derive_seed(cfg.master_seed, index, 1)
    g = sample_gnp(GnpParams(cfg.n, cfg.p, graph_seed))
    t0 = time.perf_counter()
    res = play(spec, g, strat_a, strat_b, play_seed)
    ms = (time.perf_counter() - t0) * 1e3
    return TrialRecord(
        schema=SCHEMA_VERSION, index=index, master_seed=cfg.master_seed,
        n=cfg.n, p=cfg.p, bias_a=cfg.bias_a, bias_b=cfg.bias_b,
        convention=cfg.convention, target=cfg.target,
        strategy_a=strat_a.describe(), strategy_b=strat_b.describe(),
        first_player=spec.first_player.value, winner=res.winner.value,
        reason=res.reason, move_count=res.move_count, wall_time_ms=ms)


def _run_one_tuple(args) -> TrialRecord:
    cfg_dict, index = args
    cfg = TrialConfig(**cfg_dict)
    return _run_one(cfg, index)


def run_trials(cfg: TrialConfig) -> list[TrialRecord]:
    """All trial records of the batch, in index order.

    Per-trial failures (strategy forfeits, illegal moves) are regular
    records with reason ``forfeit``; they never abort the batch.
    """
    if cfg.trials < 0:
        raise ConfigError("trials must be >= 0")
    indices = range(cfg.trials)
    if cfg.workers <= 1:
        return [_run_one(cfg, i) for i in indices]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        args = [(cfg.to_dict(), i) for i in indices]
        return list(pool.map(_run_one_tuple, args, chunksize=4))


def replay_trial(cfg: TrialConfig, index: int) -> TrialRecord:
    """Regenerate one record from the config; must match the original
    byte for byte (modulo wall time)."""
    return _run_one(cfg, index)


# --- persistence ---------------------------------------------------------------


def records_to_jsonl(records: Iterable[TrialRecord], timings: bool = False) -> str:
    return "".join(json.dumps(r.canonical_dict(timings), sort_keys=True) + "\n"
                   for r in records)


def records_from_jsonl(text: str) -> list[TrialRecord]:
    out = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        d = json.loads(ln)
        d.setdefault("wall_time_ms", None)
        out.append(TrialRecord(**d))
    return out


_CSV_FIELDS = ["index", "n", "p", "bias_a", "bias_b", "convention", "target",
               "first_player", "winner", "reason", "move_count"]


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for r in records:
        d = asdict(r)
        w.writerow([d[f] for f in _CSV_FIELDS])
    return buf.getvalue()


def manifest_for(command: str, config: dict, extra: dict | None = None) -> dict:
    man = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "package": {"name": "gnpgames", "version": _pkg_version},
    }
    if "master_seed" in config and "trials" in config:
        man["seed_schedule"] = {
            "master_seed": config["master_seed"],
            "trials": config["trials"],
            "derivation": "philox-seedsequence(master, index, {0:graph,1:play})",
        }
    if extra:
        man.update(extra)
    return man


# --- critical-bias estimation ----------------------------------------------------


def wilson_interval(wins: int, total: int, z: float = 1.96) -> tuple[float, float]:
    if total == 0:
        return (0.0, 1.0)
    phat = wins / total
    denom = 1 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class BiasEstimate:
    """Empirical critical bias against a specific strategy pair.

    This is a property of the strategies, not of the games themselves:
    win rates against these opponents only bound the game-theoretic
    breaking point, and the report says so.
    """

    n: int
    p: float
    convention: str
    target: str
    strategy_a: str
    strategy_b: str
    trials_per_b: int
    curve: list[dict]
    b_star: Optional[int]
    censored: Optional[str]
    ratio: Optional[float]

    def to_dict(self) -> dict:
        return {
            "kind": "empirical-critical-bias-vs-strategy-pair",
            "n": self.n, "p": self.p, "convention": self.convention,
            "target": self.target, "strategy_a": self.strategy_a,
            "strategy_b": self.strategy_b, "trials_per_b": self.trials_per_b,
            "curve": self.curve, "b_star": self.b_star,
            "censored": self.censored, "ratio": self.ratio,
        }

    def curve_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["b", "wins_a", "trials", "rate", "wilson_lo", "wilson_hi"])
        for row in self.curve:
            w.writerow([row["b"], row["wins_a"], row["trials"],
                        row["rate"], row["wilson_lo"], row["wilson_hi"]])
        return buf.getvalue()


def estimate_critical_bias(cfg: TrialConfig, b_range: Sequence[int]) -> BiasEstimate:
    """Win-rate curve over the bias range and the pre-registered scan:
    b* is the smallest b whose a-side win rate is below one half with
    the whole Wilson interval below it; censoring is flagged when the
    range never (or immediately) crosses."""
    if not b_range or list(b_range) != sorted(b_range):
        raise ConfigError("b_range must be nonempty ascending")
    a_role, _ = roles_of(Convention(cfg.convention))
    curve = []
    for b in b_range:
        sub = replace(cfg, bias_b=int(b),
                      master_seed=derive_seed(cfg.master_seed, int(b)))
        records = run_trials(sub)
        wins = sum(1 for r in records if r.winner == a_role.value)
        lo, hi = wilson_interval(wins, len(records))
        curve.append({"b": int(b), "wins_a": wins, "trials": len(records),
                      "rate": wins / len(records) if records else 0.0,
                      "wilson_lo": lo, "wilson_hi": hi})
    b_star = None
    for row in curve:
        if row["rate"] < 0.5 and row["wilson_hi"] < 0.5:
            b_star = row["b"]
            break
    censored = None
    if b_star is None:
        censored = "right-censored"
    elif b_star == curve[0]["b"]:
        censored = "left-censored"
    ratio = None
    if b_star is not None and cfg.n >= 2 and cfg.p > 0:
        ratio = b_star * math.log(cfg.n) / (cfg.n * cfg.p)
    strat_a, strat_b = cfg.strategies()
    return BiasEstimate(
        n=cfg.n, p=cfg.p, convention=cfg.convention, target=cfg.target,
        strategy_a=strat_a.describe(), strategy_b=strat_b.describe(),
        trials_per_b=cfg.trials, curve=curve, b_star=b_star,
        censored=censored, ratio=ratio)


# --- audit batches -----------------------------------------------------------------


def _audit_one(args) -> tuple[int, AuditReport]:
    n, p, seed, knobs_dict = args
    g = sample_gnp(GnpParams(n, p, seed))
    rep = audit_gnp_properties(g, p, AuditKnobs(**knobs_dict))
    return seed, rep


def audit_command(n: int, p: float, seeds: Sequence[int],
                  knobs: AuditKnobs | None = None,
                  workers: int = 1) -> tuple[list[tuple[int, AuditReport]], dict]:
    """Audit one G(n,p) sample per seed; returns per-seed reports (in
    seed order) and the fraction of seeds passing each property."""
    knobs = knobs or AuditKnobs()
    args = [(n, p, int(s), asdict(knobs)) for s in seeds]
    if workers <= 1:
        results = [_audit_one(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_audit_one, args))
    summary: dict[str, float] = {}
    if results:
        names = [r.name for r in results[0][1].records]
        for name in names:
            passing = sum(1 for _, rep in results if rep.passed(name))
            summary[name] = passing / len(results)
    return results, summary


# --- engine / oracle coherence ---------------------------------------------------------


def oracle_coherence_check(boards: int, max_edges: int = 10,
                           master_seed: int = 0) -> dict:
    """Random small boards: first-player monotonicity of the exact
    solver, and playout legality for every registered strategy.

    Forfeits are expected (and recorded, not failed) for the strategies
    whose rules can stall on tiny boards: the star isolator, the
    sparse-set avoider, the builders when their targets die.  A forfeit
    by random or potential play is a bug and fails the check.
    """
    from .oracle import solve_exact

    never_forfeit = {"random", "potential-blocker", "potential-avoider"}
    out = {"boards": 0, "first_player_violations": 0,
           "unexpected_forfeits": [], "forfeits": {}, "playouts": 0}
    idx = 0
    while out["boards"] < boards:
        seed = derive_seed(master_seed, idx)
        idx += 1
        n = 4 + (seed % 3)
        g = sample_gnp(GnpParams(n, 0.6, seed))
        if not (1 <= g.num_edges <= max_edges):
            continue
        out["boards"] += 1
        for target in ("connectivity", "min-degree"):
            spec2 = GameSpec(Convention.MAKER_BREAKER,
                             make_target(target, c=1),
                             first_player=Role.BREAKER)
            spec1 = GameSpec(Convention.MAKER_BREAKER,
                             make_target(target, c=1),
                             first_player=Role.MAKER)
            second = solve_exact(spec2, g).winner
            first = solve_exact(spec1, g).winner
            if second is Role.MAKER and first is not Role.MAKER:
                out["first_player_violations"] += 1
        pairs = [
            ("maker-breaker", "min-degree", "degree-builder", "random"),
            ("maker-breaker", "isolate-vertex", "degree-builder", "star-isolator"),
            ("maker-breaker", "hamiltonicity", "hamiltonian-builder", "random"),
            ("avoider-enforcer-monotone", "isolate-vertex",
             "sparse-set-avoider", "random"),
            ("avoider-enforcer-monotone", "min-degree", "random",
             "expansion-forcer"),
        ]
        for conv, target, sa, sb in pairs:
            if target == "hamiltonicity" and g.n < 3:
                continue
            cfg_spec = GameSpec(Convention(conv), make_target(target, c=1))
            strat_a = make_strategy(sa, {"c": 1, "k2": 2})
            strat_b = make_strategy(sb, {"c": 1, "k2": 2})
            res = play(cfg_spec, g, strat_a, strat_b, seed)
            out["playouts"] += 1
            if res.reason == "forfeit":
                loser = (strat_a if res.winner is
                         roles_of(cfg_spec.convention)[1] else strat_b)
                out["forfeits"][loser.name] = out["forfeits"].get(loser.name, 0) + 1
                if loser.name in never_forfeit:
                    out["unexpected_forfeits"].append(
                        (loser.name, conv, target, seed))
    out["passed"] = (out["first_player_violations"] == 0
                     and not out["unexpected_forfeits"])
    return out


# --- config files -------------------------------------------------------------------


def parse_config_file(text: str) -> dict[str, str]:
    """Flat key=value lines; # starts a comment."""
    out: dict[str, str] = {}
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise ConfigError(f"line {lineno}: expected key=value, got {ln!r}")
        k, v = ln.split("=", 1)
        out[k.strip()] = v.strip()
    return out
