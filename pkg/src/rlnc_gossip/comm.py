"""Round engines for the synchronous PUSH/PULL/EXCHANGE/BROADCAST models
and the asynchronous single-transfer and broadcast models.

A round is planned as a list of sample slots (sender, slot) plus a list of
deliveries (slot index, receiver). All packets are sampled from
start-of-round states before any delivery is applied, matching the
simultaneous-activation semantics. The same planner drives both the RLNC
engine here and the faulty-flooding oracle, so the two processes see
identical schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np

from .coding import Packet
from .gf2 import Gf2NodeState


class CommModel(Enum):
    SYNC_PUSH = "sync_push"
    SYNC_PULL = "sync_pull"
    SYNC_EXCHANGE = "sync_exchange"
    SYNC_BROADCAST = "sync_broadcast"
    ASYNC_SINGLE_TRANSFER = "async_single_transfer"
    ASYNC_BROADCAST = "async_broadcast"

    @classmethod
    def from_name(cls, name):
        if isinstance(name, cls):
            return name
        return cls(name.lower())


SYNC_MODELS = {
    CommModel.SYNC_PUSH,
    CommModel.SYNC_PULL,
    CommModel.SYNC_EXCHANGE,
    CommModel.SYNC_BROADCAST,
}


class ModelTopologyMismatchError(ValueError):
    pass


@dataclass
class Transmission:
    sender: int
    receiver: int
    packet: Packet
    round: int


@dataclass
class RoundPlan:
    samples: list            # (sender, slot) in sampling order
    deliveries: list         # (sample_index, receiver)


def _check_topology(model, g):
    if model is CommModel.ASYNC_SINGLE_TRANSFER:
        if not g.is_weighted:
            raise ModelTopologyMismatchError(
                "async single transfer needs a weighted topology"
            )
    elif g.is_weighted:
        raise ModelTopologyMismatchError(
            "%s needs an unweighted topology" % model.value
        )


def _weighted_edge_chooser(g):
    """Cumulative-probability lookup over a weighted topology's edges,
    cached on the topology (static graphs are re-planned every round)."""
    cached = getattr(g, "_edge_chooser", None)
    if cached is not None:
        return cached
    edges = g.all_edges()
    kinds = ["d"] * len(g.directed_edges) + ["u"] * len(g.undirected_edges)
    order = sorted(range(len(edges)), key=lambda i: (kinds[i], edges[i]))
    edges = [edges[i] for i in order]
    kinds = [kinds[i] for i in order]
    probs = np.array([float(g.weights[e]) for e in edges])
    cum = np.cumsum(probs)
    g._edge_chooser = (edges, kinds, cum)
    return g._edge_chooser


def plan_round(model, g, rng, pull_sampling="independent",
               async_variant="bernoulli") -> RoundPlan:
    """Draw this round's schedule. Consumes only scheduling randomness."""
    model = CommModel.from_name(model)
    _check_topology(model, g)
    n = g.n
    samples = []
    sample_idx = {}
    deliveries = []

    def slot(sender, s=0):
        key = (sender, s)
        if key not in sample_idx:
            sample_idx[key] = len(samples)
            samples.append(key)
        return sample_idx[key]

    def uniform_choices(adjacency):
        """One uniform neighbor per node, batched into a single draw."""
        degs = np.array([len(adjacency(u)) for u in range(n)])
        picks = rng.integers(0, np.maximum(degs, 1))
        return [adjacency(u)[picks[u]] if degs[u] else None
                for u in range(n)]

    if model is CommModel.SYNC_PUSH:
        for u, v in enumerate(uniform_choices(g.out_neighbors)):
            if v is not None:
                deliveries.append((slot(u), v))
    elif model is CommModel.SYNC_PULL:
        fresh = 0
        for u, v in enumerate(uniform_choices(g.in_neighbors)):
            if v is not None:
                if pull_sampling == "independent":
                    deliveries.append((slot(v, fresh), u))
                    fresh += 1
                else:
                    deliveries.append((slot(v), u))
    elif model is CommModel.SYNC_EXCHANGE:
        for u, v in enumerate(uniform_choices(g.neighbors)):
            if v is not None:
                deliveries.append((slot(u), v))
                deliveries.append((slot(v), u))
    elif model is CommModel.SYNC_BROADCAST:
        for u in range(n):
            nb = g.out_neighbors(u)
            if nb:
                si = slot(u)
                for v in nb:
                    deliveries.append((si, v))
    elif model is CommModel.ASYNC_SINGLE_TRANSFER:
        edges, kinds, cum = _weighted_edge_chooser(g)
        x = rng.random()
        i = int(np.searchsorted(cum, x, side="right"))
        if i < len(edges):
            u, v = edges[i]
            if kinds[i] == "d":
                deliveries.append((slot(u), v))
            else:
                deliveries.append((slot(u), v))
                deliveries.append((slot(v), u))
    elif model is CommModel.ASYNC_BROADCAST:
        if async_variant == "bernoulli":
            coins = rng.random(n) < 1.0 / n
            chosen = [u for u in range(n) if coins[u]]
        elif async_variant == "one_node":
            chosen = [int(rng.integers(n))]
        else:
            raise ValueError("unknown async broadcast variant %r" % async_variant)
        for u in chosen:
            nb = g.out_neighbors(u)
            if nb:
                si = slot(u)
                for v in nb:
                    deliveries.append((si, v))
    else:  # pragma: no cover
        raise AssertionError(model)
    return RoundPlan(samples, deliveries)


def _sample_all(states, plan, rng):
    """Sample one packet per slot, in slot order (deterministic)."""
    packets = []
    for (sender, _slot) in plan.samples:
        st = states[sender]
        if isinstance(st, Gf2NodeState):
            packets.append(st.sample_words(rng))
        else:
            packets.append(st.sample_packet(rng))
    return packets


def _deliver_all(states, plan, packets, rnd, innovative_counts=None):
    pairs = []
    for (si, recv) in plan.deliveries:
        sender = plan.samples[si][0]
        st = states[recv]
        pkt = packets[si]
        if isinstance(st, Gf2NodeState):
            innovative = st.receive_words(pkt.copy(), rnd)
        else:
            innovative = st.receive(pkt, rnd)
        if innovative and innovative_counts is not None:
            innovative_counts[recv] += 1
        pairs.append((sender, recv))
    return pairs


def step(model, g, states, rng, pull_sampling="independent",
         async_variant="bernoulli", rnd=0):
    """One communication round; returns (states, transmissions)."""
    from .gf2 import unpack

    plan = plan_round(model, g, rng, pull_sampling, async_variant)
    packets = _sample_all(states, plan, rng)
    transmissions = []
    for (si, recv) in plan.deliveries:
        sender = plan.samples[si][0]
        pkt = packets[si]
        if isinstance(pkt, np.ndarray):
            packet = Packet(unpack(pkt, states[sender].k))
        else:
            packet = pkt
        transmissions.append(Transmission(sender, recv, packet, rnd))
    _deliver_all(states, plan, packets, rnd)
    return states, transmissions


@dataclass
class SimResult:
    stopping_round: int | None     # None = DidNotConverge
    rounds_run: int
    per_node_decode_round: list
    innovative_counts: list
    converged: bool = dc_field(init=False)

    def __post_init__(self):
        self.converged = self.stopping_round is not None


def all_can_decode(states):
    return all(st.can_decode for st in states)


def run_until(model, adversary, states, rng, max_rounds, stop=None,
              pull_sampling="independent", async_variant="bernoulli",
              tracker=None):
    """Run rounds until the stop predicate holds (default: every node can
    decode) or max_rounds is exhausted (DidNotConverge, not an error)."""
    from .adversary import AdversaryView

    model = CommModel.from_name(model)
    if max_rounds <= 0:
        raise ValueError("max_rounds must be positive")
    if stop is None:
        stop = all_can_decode
    n = len(states)
    innovative_counts = [0] * n
    if tracker is not None:
        tracker.observe_init(states)
    if stop(states):
        return SimResult(0, 0, [st.decode_round for st in states],
                         innovative_counts)
    for rnd in range(1, max_rounds + 1):
        view = AdversaryView(round=rnd, states=states)
        g = adversary.next_topology(view)
        plan = plan_round(model, g, rng, pull_sampling, async_variant)
        packets = _sample_all(states, plan, rng)
        pairs = _deliver_all(states, plan, packets, rnd, innovative_counts)
        if tracker is not None:
            tracker.observe_round(rnd, states, pairs)
        if stop(states):
            return SimResult(rnd, rnd,
                             [st.decode_round for st in states],
                             innovative_counts)
    return SimResult(None, max_rounds,
                     [st.decode_round for st in states], innovative_counts)
