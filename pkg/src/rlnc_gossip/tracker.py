"""Dual-vector knowledge instrumentation.

A tracker watches an RLNC run and records, for each tracked dual vector
mu, the set of nodes that know mu after every round, plus every
transmission whose sender knew mu at the start of the round. That event
log is the empirical counterpart of the per-transfer success law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from itertools import combinations, product

from .gf2 import Gf2NodeState, pack


class ZeroVectorTracked(ValueError):
    pass


class InsufficientEvents(ValueError):
    pass


@dataclass
class TransferEvent:
    round: int
    sender: int
    receiver: int
    sender_knew: bool
    receiver_knew_after: bool


@dataclass
class KnowledgeTrace:
    mu: tuple
    per_round_knowers: list = dc_field(default_factory=list)  # index = round
    transfer_events: list = dc_field(default_factory=list)


@dataclass
class Tracker:
    mus: list
    n: int
    traces: list = dc_field(init=False)
    _mu_words: list = dc_field(init=False)

    def __post_init__(self):
        self.mus = [tuple(m) for m in self.mus]
        for m in self.mus:
            if not any(m):
                raise ZeroVectorTracked("cannot track the zero vector")
        self.traces = [KnowledgeTrace(m) for m in self.mus]
        self._mu_words = [pack(m) if all(c in (0, 1) for c in m) else None
                          for m in self.mus]

    def _knows(self, state, mi):
        mw = self._mu_words[mi]
        if mw is not None and isinstance(state, Gf2NodeState):
            return state.knows_words(mw)
        return state.knows(self.mus[mi])

    def _knowers(self, states, mi, prev=frozenset()):
        out = set(prev)  # knowledge never reverts; skip known nodes
        for st in states:
            if st.node_id not in out and self._knows(st, mi):
                out.add(st.node_id)
        return frozenset(out)

    def observe_init(self, states):
        for mi, trace in enumerate(self.traces):
            trace.per_round_knowers.append(self._knowers(states, mi))

    def observe_round(self, rnd, states, pairs):
        """pairs: (sender, receiver) per delivered packet this round."""
        for mi, trace in enumerate(self.traces):
            prev = trace.per_round_knowers[-1]
            now = self._knowers(states, mi, prev)
            assert prev <= now, "knower set shrank for %r" % (trace.mu,)
            trace.per_round_knowers.append(now)
            for (s, r) in pairs:
                if s in prev:
                    trace.transfer_events.append(
                        TransferEvent(rnd, s, r, True, r in now))

    def cover_round(self, mi=0):
        for rnd, knowers in enumerate(self.traces[mi].per_round_knowers):
            if len(knowers) == self.n:
                return rnd
        return None

    def all_cover_round(self):
        """Max cover round over all tracked duals, or None."""
        rounds = [self.cover_round(mi) for mi in range(len(self.mus))]
        return None if any(r is None for r in rounds) else max(rounds)


def wilson_interval(successes, n, z=1.959963984540054):
    """95% Wilson score interval, hand-rolled to keep scipy optional."""
    if n == 0:
        raise InsufficientEvents("no events")
    phat = successes / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return center - half, center + half


def lemma1_frequency(traces, q, min_events=1000):
    """Empirical per-transfer success rate over qualifying events
    (sender knew mu). A receiver that already knew counts as success.
    Flags a violation only if the whole interval sits below 1 - 1/q."""
    events = [e for tr in traces for e in tr.transfer_events if e.sender_knew]
    if len(events) < min_events:
        raise InsufficientEvents(
            "%d events, need %d" % (len(events), min_events))
    successes = sum(e.receiver_knew_after for e in events)
    lo, hi = wilson_interval(successes, len(events))
    expected = 1.0 - 1.0 / q
    return {
        "events": len(events),
        "successes": successes,
        "rate": successes / len(events),
        "ci_low": lo,
        "ci_high": hi,
        "expected": expected,
        "violation": hi < expected,
    }


def default_duals(k, q, rng, sample_count=64):
    """Tracked-dual policy: everything for q=2 and k <= 12; otherwise
    all weight-1 and weight-2 vectors (the slow spreaders under sparse
    initial knowledge) plus uniformly random nonzero extras."""
    if q == 2 and k <= 12:
        return [tuple((m >> i) & 1 for i in range(k))
                for m in range(1, 2 ** k)]
    mus = []
    units = list(range(1, q))
    for i in range(k):
        for a in units:
            v = [0] * k
            v[i] = a
            mus.append(tuple(v))
    for i, j in combinations(range(k), 2):
        for a, b in product(units, repeat=2):
            v = [0] * k
            v[i], v[j] = a, b
            mus.append(tuple(v))
    seen = set(mus)
    target = len(mus) + sample_count
    while len(mus) < target:
        v = tuple(int(x) for x in rng.integers(0, q, size=k))
        if any(v) and v not in seen:
            seen.add(v)
            mus.append(v)
    return mus


def traces_to_csv(traces, path):
    with open(path, "w") as fh:
        fh.write("round,mu_id,knower_count\n")
        for mi, tr in enumerate(traces):
            for rnd, knowers in enumerate(tr.per_round_knowers):
                fh.write("%d,%d,%d\n" % (rnd, mi, len(knowers)))


def events_to_csv(traces, path):
    with open(path, "w") as fh:
        fh.write("round,sender,receiver,success\n")
        for tr in traces:
            for e in tr.transfer_events:
                fh.write("%d,%d,%d,%d\n"
                         % (e.round, e.sender, e.receiver,
                            int(e.receiver_knew_after)))
