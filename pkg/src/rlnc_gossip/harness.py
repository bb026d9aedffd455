"""Scenario configs, seeded parallel trial execution, aggregation,
and the validation suites behind `validate`.

Reproducibility contract: (config, seed) fully determines every
RunRecord. Each trial derives its own counter-based streams from
(seed, trial index), and aggregation is ordered by trial index, so
results do not depend on the worker count.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field, fields, replace

import numpy as np

from . import adversary as adv_mod
from . import analysis, coding, comm, flooding, network, rng as rng_mod
from .tracker import Tracker, default_duals, lemma1_frequency


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        self.field = field_name
        super().__init__("%s: %s" % (field_name, message))


VALID_MODELS = {m.value for m in comm.CommModel}
VALID_INITS = {"single_source", "one_per_node", "spread", "explicit"}
VALID_ADVERSARIES = {"static", "random_gnp", "random_matching",
                     "two_clique_knowledge_split", "directory"}


@dataclass
class ScenarioConfig:
    n: int
    k: int
    q: int = 2
    l: int = 0                      # payload length; 0 = coefficients-only
    comm_model: str = "sync_push"
    adversary: str = "static"
    adversary_p: float = 0.5        # random_gnp edge probability
    adversary_path: str = ""        # directory adversary
    family: str = "complete"
    family_param: int = 0           # e.g. barbell clique size; 0 = default
    graph_file: str = ""            # family = "file"
    induced_model: str = "exchange"  # weighting for async single transfer
    init: str = "single_source"
    init_spread: int = 1            # spread(i)
    init_map: str = ""              # explicit: "msg:node,node;msg:node"
    trials: int = 100
    seed: int = 0
    max_rounds: int = 0             # 0 = auto budget
    delta: float = 0.01
    tracked_duals: str = "none"     # none | e1 | all | default
    pull_sampling: str = "independent"
    time_scale: float = 1.0
    workers: int = 1
    scenario_id: str = "scenario"

    def validate(self):
        if self.k < 1:
            raise ConfigError("k", "must be >= 1")
        if self.n < 1:
            raise ConfigError("n", "must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if self.comm_model not in VALID_MODELS:
            raise ConfigError("comm_model",
                              "unknown model %r" % self.comm_model)
        if self.init not in VALID_INITS:
            raise ConfigError("init", "unknown init %r" % self.init)
        if self.init == "one_per_node" and self.k > self.n:
            raise ConfigError("init", "one_per_node needs k <= n")
        if self.init == "spread" and not 1 <= self.init_spread <= self.n:
            raise ConfigError("init_spread", "need 1 <= i <= n")
        if self.adversary not in VALID_ADVERSARIES:
            raise ConfigError("adversary",
                              "unknown adversary %r" % self.adversary)
        if self.pull_sampling not in ("independent", "shared"):
            raise ConfigError("pull_sampling", "independent or shared")
        if not 0 < self.delta < 1:
            raise ConfigError("delta", "must be in (0, 1)")
        try:
            from .field import make_field
            make_field(self.q)
        except Exception as exc:
            raise ConfigError("q", str(exc))
        return self


def parse_config(path_or_text) -> ScenarioConfig:
    """Flat `key = value` file, keys matching ScenarioConfig fields."""
    if "\n" in path_or_text or "=" in path_or_text:
        text = path_or_text
    else:
        with open(path_or_text) as fh:
            text = fh.read()
    types = {f.name: f.type for f in fields(ScenarioConfig)}
    casts = {"n": int, "k": int, "q": int, "l": int, "family_param": int,
             "init_spread": int, "trials": int, "seed": int,
             "max_rounds": int, "workers": int,
             "adversary_p": float, "delta": float, "time_scale": float}
    kwargs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d" % lineno, "expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in types:
            raise ConfigError(key, "unknown config key")
        try:
            kwargs[key] = casts.get(key, str)(value)
        except ValueError:
            raise ConfigError(key, "cannot parse %r" % value)
    for required in ("n", "k"):
        if required not in kwargs:
            raise ConfigError(required, "missing required key")
    return ScenarioConfig(**kwargs).validate()


def make_base_topology(cfg: ScenarioConfig) -> network.Topology:
    if cfg.family == "file":
        if not cfg.graph_file:
            raise ConfigError("graph_file", "required for family = file")
        return network.parse_graph_file(cfg.graph_file)
    try:
        if cfg.family == "two_cliques" and cfg.family_param:
            return network.two_cliques_bridged(cfg.family_param,
                                               cfg.n - cfg.family_param)
        return network.make_family(cfg.family, cfg.n)
    except (KeyError, ValueError) as exc:
        raise ConfigError("family", str(exc))


def make_trial_topology(cfg: ScenarioConfig) -> network.Topology:
    g = make_base_topology(cfg)
    if cfg.comm_model == "async_single_transfer" and not g.is_weighted:
        g = network.induce_weighted(g, cfg.induced_model)
    return g


def initial_holdings(cfg: ScenarioConfig):
    """Per-node lists of 1-based message indices."""
    holdings = [[] for _ in range(cfg.n)]
    if cfg.init == "single_source":
        holdings[0] = list(range(1, cfg.k + 1))
    elif cfg.init == "one_per_node":
        for m in range(cfg.k):
            holdings[m].append(m + 1)
    elif cfg.init == "spread":
        # message m -> i consecutive nodes starting at m mod n
        for m in range(cfg.k):
            for j in range(cfg.init_spread):
                holdings[(m + j) % cfg.n].append(m + 1)
    elif cfg.init == "explicit":
        for part in cfg.init_map.split(";"):
            part = part.strip()
            if not part:
                continue
            msg_s, _, nodes_s = part.partition(":")
            msg = int(msg_s)
            if not 1 <= msg <= cfg.k:
                raise ConfigError("init_map", "message %d out of range" % msg)
            for node_s in nodes_s.split(","):
                node = int(node_s)
                if not 0 <= node < cfg.n:
                    raise ConfigError("init_map", "node %d out of range" % node)
                holdings[node].append(msg)
        if not any(holdings):
            raise ConfigError("init_map", "empty explicit init")
    return holdings


def make_states(cfg: ScenarioConfig, holdings=None):
    if holdings is None:
        holdings = initial_holdings(cfg)
    payload_mode = cfg.l > 0
    messages = None
    if payload_mode:
        # ground-truth payloads; content is immaterial, only consistency
        messages = [tuple((7 * m + 3 * j + 1) % cfg.q for j in range(cfg.l))
                    for m in range(cfg.k)]
    return [coding.init_node(v, cfg.k, holdings[v], q=cfg.q,
                             payload_mode=payload_mode, messages=messages)
            for v in range(cfg.n)]


def make_adversary(cfg: ScenarioConfig):
    if cfg.adversary == "static":
        return adv_mod.StaticAdversary(make_trial_topology(cfg))
    if cfg.adversary == "random_gnp":
        return adv_mod.RandomGnpAdversary(cfg.n, cfg.adversary_p)
    if cfg.adversary == "random_matching":
        return adv_mod.RandomMatchingAdversary(cfg.n)
    if cfg.adversary == "two_clique_knowledge_split":
        mu = (1,) + (0,) * (cfg.k - 1)
        return adv_mod.TwoCliqueKnowledgeSplitAdversary(cfg.n, mu)
    if cfg.adversary == "directory":
        return adv_mod.DirectoryAdversary(cfg.adversary_path)
    raise ConfigError("adversary", "unknown adversary %r" % cfg.adversary)


def tracked_mus(cfg: ScenarioConfig, rng):
    if cfg.tracked_duals == "none":
        return None
    if cfg.tracked_duals == "e1":
        return [(1,) + (0,) * (cfg.k - 1)]
    if cfg.tracked_duals == "all":
        if cfg.q != 2 or cfg.k > 12:
            raise ConfigError("tracked_duals",
                              "'all' needs q = 2 and k <= 12")
        return default_duals(cfg.k, 2, rng)
    if cfg.tracked_duals == "default":
        return default_duals(cfg.k, cfg.q, rng)
    raise ConfigError("tracked_duals", "unknown mode %r" % cfg.tracked_duals)


@dataclass
class RunRecord:
    trial: int
    seed: int                       # protocol stream key
    stopping_round: int | None
    per_node_decode_round: list
    innovative_counts: list
    wall_time: float
    tracker: object = None

    @property
    def converged(self):
        return self.stopping_round is not None

    @property
    def innovative_total(self):
        return sum(self.innovative_counts)


def default_round_budget(cfg: ScenarioConfig, flood_trials=16):
    """Auto max_rounds: flooding cover-time estimate T-hat feeds the
    pipelined budget with p = 1/q and d = ceil(log2(1/delta))."""
    cdf = flooding.estimate_tail(
        cfg.comm_model, lambda: make_adversary(cfg), cfg.n, {0},
        flood_trials, seed=cfg.seed + 10**6, q=cfg.q,
        max_rounds=200_000, pull_sampling=cfg.pull_sampling)
    finite = cdf.times[np.isfinite(cdf.times)]
    t_hat = int(finite.max()) if len(finite) else 200_000
    d = int(math.ceil(math.log2(1.0 / cfg.delta)))
    return analysis.pipelining_rounds(cfg.k, t_hat, 1.0 / cfg.q, cfg.q, d)


def run_trial(cfg: ScenarioConfig, trial: int, max_rounds: int) -> RunRecord:
    t0 = time.perf_counter()
    proto_rng, _coin, adv_rng = rng_mod.trial_streams(cfg.seed, trial)
    states = make_states(cfg)
    adversary = make_adversary(cfg)
    adversary.bind_rng(adv_rng)
    mus = tracked_mus(cfg, adv_rng)
    tracker = Tracker(mus, cfg.n) if mus else None
    result = comm.run_until(cfg.comm_model, adversary, states, proto_rng,
                            max_rounds, pull_sampling=cfg.pull_sampling,
                            tracker=tracker)
    return RunRecord(
        trial=trial,
        seed=rng_mod.stream_key(cfg.seed, trial, rng_mod.PROTOCOL_STREAM),
        stopping_round=result.stopping_round,
        per_node_decode_round=result.per_node_decode_round,
        innovative_counts=result.innovative_counts,
        wall_time=time.perf_counter() - t0,
        tracker=tracker,
    )


def _trial_worker(args):
    cfg, trial, max_rounds = args
    rec = run_trial(cfg, trial, max_rounds)
    rec.tracker = None  # not picklable cheaply; harness runs don't need it
    return rec


@dataclass
class StoppingStats:
    mean: float
    median: float
    p90: float
    p99: float
    min: float
    max: float
    stderr: float
    trials: int
    convergence_rate: float


def nearest_rank(sorted_values, p):
    if not len(sorted_values):
        return float("nan")
    idx = max(0, int(math.ceil(p * len(sorted_values))) - 1)
    return float(sorted_values[idx])


def aggregate(records, time_scale=1.0) -> StoppingStats:
    done = sorted(r.stopping_round for r in records if r.converged)
    scale = time_scale
    if not done:
        nan = float("nan")
        return StoppingStats(nan, nan, nan, nan, nan, nan, nan,
                             len(records), 0.0)
    arr = np.array(done, dtype=float) * scale
    stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    return StoppingStats(
        mean=float(arr.mean()),
        median=nearest_rank(arr, 0.5),
        p90=nearest_rank(arr, 0.9),
        p99=nearest_rank(arr, 0.99),
        min=float(arr[0]),
        max=float(arr[-1]),
        stderr=stderr,
        trials=len(records),
        convergence_rate=len(done) / len(records),
    )


def run_experiment(cfg: ScenarioConfig):
    """(StoppingStats, list of RunRecord ordered by trial index)."""
    cfg.validate()
    max_rounds = cfg.max_rounds or default_round_budget(cfg)
    jobs = [(cfg, t, max_rounds) for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_trial_worker, jobs, chunksize=1))
    else:
        records = [_trial_worker(j) for j in jobs]
    records.sort(key=lambda r: r.trial)
    return aggregate(records, cfg.time_scale), records


SWEEP_AXES = {"n", "k", "q", "family_param", "trials", "init_spread"}


def sweep(cfg: ScenarioConfig, axis: str, values):
    if axis not in SWEEP_AXES:
        raise ConfigError("axis", "unsupported sweep axis %r" % axis)
    rows = []
    for v in values:
        sub = replace(cfg, **{axis: v},
                      scenario_id="%s_%s%s" % (cfg.scenario_id, axis, v))
        stats, _ = run_experiment(sub)
        rows.append((sub, stats))
    return rows


# ---------------------------------------------------------------------
# CSV / JSON output

RAW_HEADER = "scenario_id,trial,seed,stopping_round,converged,innovative_total"
AGG_HEADER = ("scenario_id,n,k,q,model,mean,median,p90,p99,stderr,"
              "trials,convergence_rate")


def raw_csv_lines(cfg, records):
    yield RAW_HEADER
    for r in records:
        yield "%s,%d,%d,%s,%d,%d" % (
            cfg.scenario_id, r.trial, r.seed,
            "" if r.stopping_round is None else r.stopping_round,
            int(r.converged), r.innovative_total)


def aggregate_csv_lines(rows):
    """rows: iterable of (config, stats)."""
    yield AGG_HEADER
    for cfg, s in rows:
        yield "%s,%d,%d,%d,%s,%.6g,%.6g,%.6g,%.6g,%.6g,%d,%.6g" % (
            cfg.scenario_id, cfg.n, cfg.k, cfg.q, cfg.comm_model,
            s.mean, s.median, s.p90, s.p99, s.stderr, s.trials,
            s.convergence_rate)


def write_lines(lines, path):
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")


def results_json(cfg, stats, records):
    return json.dumps({
        "scenario_id": cfg.scenario_id,
        "rng_algorithm": rng_mod.ALGORITHM,
        "config": {f.name: getattr(cfg, f.name) for f in fields(cfg)},
        "stats": vars(stats),
        "records": [{
            "trial": r.trial, "seed": r.seed,
            "stopping_round": r.stopping_round,
            "converged": r.converged,
            "innovative_total": r.innovative_total,
        } for r in records],
    }, indent=2)


# ---------------------------------------------------------------------
# validation suites

def _validate_lemma1(seed=0):
    checks = []
    for q in (2, 3, 4):
        cfg = ScenarioConfig(n=8, k=4, q=q, comm_model="sync_exchange",
                             trials=60, seed=seed, max_rounds=60,
                             tracked_duals="e1" if q > 2 else "all",
                             scenario_id="lemma1_q%d" % q)
        traces = []
        for t in range(cfg.trials):
            rec = run_trial(cfg, t, cfg.max_rounds)
            traces.extend(rec.tracker.traces)
        rep = lemma1_frequency(traces, q, min_events=1000)
        checks.append({"name": "q=%d transfer rate" % q,
                       "passed": not rep["violation"], **rep})
    return checks


def _validate_theorem1_dominance(seed=0, trials=2000):
    mu = (1, 0, 0, 0)
    cfg = ScenarioConfig(n=16, k=4, q=2, comm_model="sync_push",
                         trials=trials, seed=seed, max_rounds=400,
                         tracked_duals="e1", scenario_id="dominance")
    covers = []
    for t in range(trials):
        rec = run_trial(cfg, t, cfg.max_rounds)
        covers.append(rec.tracker.cover_round(0))
    covers = np.array([c for c in covers if c is not None], dtype=float)
    cdf = flooding.estimate_tail(
        "sync_push", lambda: adv_mod.StaticAdversary(
            network.complete_graph(16)),
        16, {0}, trials, seed=seed, q=2, max_rounds=400)
    se = covers.std(ddof=1) / math.sqrt(len(covers))
    passed = covers.mean() <= cdf.mean() + 2 * se
    return [{"name": "K16 sync_push mu-cover vs flooding",
             "passed": bool(passed), "rlnc_mean": float(covers.mean()),
             "flood_mean": cdf.mean(), "se": float(se), "mu": mu}]


def _validate_lemma9(seed=0, vectors=1000, trials=4000):
    rng = rng_mod.make_stream(seed, 0, 0)
    failures = 0
    for _ in range(vectors):
        dim = int(rng.integers(1, 65))
        w = rng.random(dim) + 1e-9
        p = float(rng.choice([0.1, 0.25, 0.5]))
        est, bound, ok = analysis.weighted_bernoulli_bound_check(
            w, p, trials, rng)
        failures += not ok
    return [{"name": "weighted Bernoulli bound, %d random vectors" % vectors,
             "passed": failures == 0, "failures": failures}]


def _validate_lemma7():
    checks = []
    failures = []
    count = 0
    for p in (0.01, 0.001, 1e-4):
        for k in (4, 8, 16, 32, 64):
            for T in (1, 2, 4, 8, 16, 32):
                t, tail, bound, ok = analysis.tail_budget_check(k, T, p)
                if -math.log(p) < math.log(t):  # side condition
                    continue
                count += 1
                if not ok:
                    failures.append((k, T, p))
    checks.append({"name": "negative-binomial tail grid (%d points)" % count,
                   "passed": not failures, "failures": failures})
    return checks


def _validate_decode_equivalence(seed=0, samples=100, k=8):
    from itertools import product as iproduct
    rng = rng_mod.make_stream(seed, 0, 0)
    duals = [tuple(v) for v in iproduct((0, 1), repeat=k) if any(v)]
    bad = 0
    cfg = ScenarioConfig(n=8, k=k, q=2, comm_model="sync_push",
                         trials=1, seed=seed, max_rounds=1,
                         scenario_id="decode_eq")
    for s in range(samples):
        states = make_states(cfg)
        g = network.complete_graph(8)
        adv = adv_mod.StaticAdversary(g)
        rounds = int(rng.integers(0, 25))
        proto = rng_mod.make_stream(seed, s, 0)
        for rnd in range(1, rounds + 1):
            comm.step(cfg.comm_model, g, states, proto, rnd=rnd)
        for st in states:
            knows_all = all(st.knows(mu) for mu in duals)
            if knows_all != st.can_decode:
                bad += 1
    return [{"name": "can_decode iff knows all %d duals" % len(duals),
             "passed": bad == 0, "mismatches": bad,
             "states_checked": samples * 8}]


VALIDATION_SUITES = {
    "lemma1": _validate_lemma1,
    "theorem1_dominance": _validate_theorem1_dominance,
    "lemma9": _validate_lemma9,
    "lemma7": _validate_lemma7,
    "decode_equivalence": _validate_decode_equivalence,
}


def validate(suite: str):
    if suite not in VALIDATION_SUITES:
        raise ConfigError("suite", "unknown suite %r (choose from %s)"
                          % (suite, sorted(VALIDATION_SUITES)))
    checks = VALIDATION_SUITES[suite]()
    return {"suite": suite,
            "passed": all(c["passed"] for c in checks),
            "checks": checks}
