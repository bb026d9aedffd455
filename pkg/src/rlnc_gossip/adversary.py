"""Topology controllers, from static graphs to fully adaptive adversaries
that inspect complete node states before choosing the round's graph.

The adaptivity boundary: an adversary sees everything up to and including
the start of the current round (states, prior randomness via its own
stream's history), but never the current round's not-yet-drawn protocol
randomness. Random adversaries therefore own a dedicated RNG stream.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field as dc_field

from .network import Topology, parse_graph_file, random_gnp, random_matching


@dataclass
class AdversaryView:
    """Read-only snapshot handed to an adversary before it picks G(t)."""

    round: int
    states: list = None
    informed: frozenset = None      # flooding runs: the informed set
    rng_transcript: list = None     # opt-in; populated only when recording

    @property
    def ranks(self):
        return [st.rank for st in self.states]

    def knowers(self, mu):
        """Nodes currently knowing dual vector mu.

        In a flooding run there is one virtual message and `informed`
        plays the role of its knower set, whatever mu is asked for.
        """
        if self.informed is not None:
            return set(self.informed)
        return {st.node_id for st in self.states if st.knows(mu)}

    @property
    def full_states(self):
        return self.states


class Adversary:
    """Base: a topology per round. Subclasses override next_topology."""

    def next_topology(self, view: AdversaryView) -> Topology:
        raise NotImplementedError

    def bind_rng(self, rng):
        """Attach the trial's adversary RNG stream (no-op if unused)."""


class StaticAdversary(Adversary):
    def __init__(self, g: Topology):
        self.g = g

    def next_topology(self, view):
        return self.g


class PeriodicAdversary(Adversary):
    """Cycles through a fixed list of graphs, one per round."""

    def __init__(self, graphs):
        if not graphs:
            raise ValueError("need at least one graph")
        ns = {g.n for g in graphs}
        if len(ns) != 1:
            raise ValueError("all graphs must share n")
        self.graphs = list(graphs)

    def next_topology(self, view):
        return self.graphs[(view.round - 1) % len(self.graphs)]


class RandomGnpAdversary(Adversary):
    def __init__(self, n, p, rng=None):
        self.n = n
        self.p = p
        self.rng = rng

    def bind_rng(self, rng):
        self.rng = rng

    def next_topology(self, view):
        return random_gnp(self.n, self.p, self.rng)


class RandomMatchingAdversary(Adversary):
    def __init__(self, n, rng=None):
        self.n = n
        self.rng = rng

    def bind_rng(self, rng):
        self.rng = rng

    def next_topology(self, view):
        return random_matching(self.n, self.rng)


def _clique_edges(nodes):
    nodes = sorted(nodes)
    return [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]]


class TwoCliqueKnowledgeSplitAdversary(Adversary):
    """Partition nodes by knowledge of one tracked dual vector, clique
    both sides, bridge the lowest-indexed node of each side. Connected
    with diameter <= 2 whenever both sides are nonempty; a one-sided
    partition degenerates to a single clique."""

    def __init__(self, n, mu):
        if not any(mu):
            raise ValueError("tracked dual vector must be nonzero")
        self.n = n
        self.mu = tuple(mu)

    def next_topology(self, view):
        knowers = sorted(view.knowers(self.mu))
        others = sorted(set(range(self.n)) - set(knowers))
        edges = _clique_edges(knowers) + _clique_edges(others)
        if knowers and others:
            a, b = knowers[0], others[0]
            edges.append((min(a, b), max(a, b)))
        g = Topology(self.n, undirected_edges=edges,
                     family="two_clique_split")
        if knowers and others:
            assert len(g.neighbors(knowers[0])) >= 1  # bridge in place
        return g


class ScriptedAdversary(Adversary):
    """Custom function (view -> Topology), optionally with a per-round
    connectivity contract asserted on every output."""

    def __init__(self, fn, require_connected=False):
        self.fn = fn
        self.require_connected = require_connected

    def next_topology(self, view):
        g = self.fn(view)
        if self.require_connected and not _is_connected(g):
            raise AssertionError(
                "scripted adversary produced a disconnected graph "
                "at round %d" % view.round
            )
        return g


def _is_connected(g: Topology) -> bool:
    if g.n == 0:
        return True
    seen = {0}
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for v in g.neighbors(u):
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return len(seen) == g.n


_ROUND_FILE = re.compile(r"round_(\d+)\.edges$")


class DirectoryAdversary(Adversary):
    """Replays a directory of `round_<t>.edges` files. Rounds past the
    last file reuse the highest-indexed graph."""

    def __init__(self, path):
        rounds = {}
        for name in os.listdir(path):
            m = _ROUND_FILE.match(name)
            if m:
                rounds[int(m.group(1))] = parse_graph_file(
                    os.path.join(path, name))
        if not rounds:
            raise ValueError("no round_<t>.edges files in %s" % path)
        self.rounds = rounds
        self.last = max(rounds)

    def next_topology(self, view):
        t = min(view.round, self.last)
        while t not in self.rounds:
            t -= 1
        return self.rounds[t]


def make_adversary(kind, *, g=None, graphs=None, n=None, p=None, mu=None,
                   path=None, fn=None):
    """Config-string front door used by the harness."""
    kind = kind.lower()
    if kind == "static":
        return StaticAdversary(g)
    if kind == "periodic":
        return PeriodicAdversary(graphs)
    if kind == "random_gnp":
        return RandomGnpAdversary(n, p)
    if kind == "random_matching":
        return RandomMatchingAdversary(n)
    if kind == "two_clique_knowledge_split":
        return TwoCliqueKnowledgeSplitAdversary(n, mu)
    if kind == "scripted":
        return ScriptedAdversary(fn)
    if kind == "directory":
        return DirectoryAdversary(path)
    raise ValueError("unknown adversary kind %r" % kind)
