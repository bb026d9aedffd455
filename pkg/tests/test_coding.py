"""Generic-field node state: knowledge predicate, sampling law, decoding."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rlnc_gossip import coding
from rlnc_gossip.coding import NotFullRankError, Packet, init_node
from rlnc_gossip.field import make_field


def make_rng(seed=0):
    return np.random.default_rng(seed)


def test_init_single_source():
    st0 = init_node(0, 3, [1, 2, 3], q=3)
    assert st0.rank == 3 and st0.can_decode
    st1 = init_node(1, 3, [], q=3)
    assert st1.rank == 0 and not st1.can_decode


def test_init_auto_fast_path():
    from rlnc_gossip.gf2 import Gf2NodeState
    assert isinstance(init_node(0, 4, [1], q=2), Gf2NodeState)
    assert not isinstance(init_node(0, 4, [1], q=3), Gf2NodeState)


def test_echelon_knowledge_example():
    # Y = span{(1,0,1), (0,1,1)} over F_2: mu=(1,1,0) is known,
    # mu=(1,1,1) is not (every span element is orthogonal to it)
    node = coding.NodeState(1, make_field(2), 3)
    node.receive(Packet((1, 0, 1)), 1)
    node.receive(Packet((0, 1, 1)), 2)
    assert node.knows((1, 1, 0))
    assert not node.knows((1, 1, 1))
    assert node.knows((1, 0, 1))


def test_knows_is_not_containment():
    # (1,1) spans a line containing itself, yet <(1,1),(1,1)> = 0 over F_2
    node = coding.NodeState(0, make_field(2), 2)
    node.receive(Packet((1, 1)), 1)
    assert node.y.contains((1, 1))
    assert not node.knows((1, 1))
    assert node.knows((1, 0))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_transfer_success_rate(q):
    """A full-rank sender transfers knowledge of a fixed mu with
    probability exactly 1 - 1/q per sampled packet."""
    k = 4
    sender = init_node(0, k, [1, 2, 3, 4], q=q)
    mu = (1, 0, 1, 0)
    rng = make_rng(q)
    trials = 20_000
    hits = 0
    F = make_field(q)
    for _ in range(trials):
        pkt = sender.sample_mu(rng)
        hits += F.dot(pkt, mu) != 0
    expect = 1 - 1 / q
    sigma = math.sqrt(expect * (1 - expect) / trials)
    assert abs(hits / trials - expect) < 4 * sigma


def test_sample_uniform_over_span():
    # chi-square over the 9 elements of a rank-2 subspace of F_3^3
    node = coding.NodeState(0, make_field(3), 3)
    node.receive(Packet((1, 0, 2)), 1)
    node.receive(Packet((0, 1, 1)), 2)
    span = list(node.y.enumerate_span())
    assert len(span) == 9
    rng = make_rng(5)
    counts = dict.fromkeys(span, 0)
    trials = 9000
    for _ in range(trials):
        counts[node.sample_mu(rng)] += 1
    expected = trials / 9
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 26.12  # chi2(8).ppf(0.999)


def test_innovative_detection():
    node = coding.NodeState(0, make_field(5), 3)
    assert node.receive(Packet((1, 2, 3)), 1)
    assert not node.receive(Packet((2, 4, 1)), 2)  # 2x the first row
    assert node.receive(Packet((0, 1, 0)), 3)


def test_decode_returns_messages():
    k, q, l = 3, 4, 5
    F = make_field(q)
    rng = make_rng(11)
    messages = [tuple(int(x) for x in rng.integers(0, q, l)) for _ in range(k)]
    src = init_node(0, k, [1, 2, 3], q=q, payload_mode=True, messages=messages)
    sink = init_node(1, k, [], q=q, payload_mode=True)
    rnd = 0
    while not sink.can_decode:
        rnd += 1
        sink.receive(src.sample_packet(rng), rnd)
    assert sink.decode() == messages


def test_decode_requires_full_rank():
    node = init_node(0, 3, [1], q=3, payload_mode=True,
                     messages=[(1,), (2,), (0,)])
    with pytest.raises(NotFullRankError):
        node.decode()


def test_payload_tracks_coefficients():
    # payload of any received packet equals the coded combination of
    # the original messages given by its coefficient vector
    k, q, l = 4, 3, 3
    F = make_field(q)
    rng = make_rng(13)
    messages = [tuple(int(x) for x in rng.integers(0, q, l)) for _ in range(k)]
    src = init_node(0, k, list(range(1, k + 1)), q=q, payload_mode=True,
                    messages=messages)
    for _ in range(50):
        pkt = src.sample_packet(rng)
        expect = tuple(
            F.dot(pkt.mu, tuple(m[j] for m in messages)) for j in range(l))
        assert pkt.payload == expect


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(2, 5), st.data())
def test_knowledge_monotone_under_receive(q, k, data):
    """Receiving any packet never erases knowledge of any mu."""
    F = make_field(q)
    node = coding.NodeState(0, F, k)
    vec = st.tuples(*[st.integers(0, q - 1)] * k)
    mus = [m for m in (data.draw(vec) for _ in range(4)) if any(m)]
    for rnd in range(4):
        before = [node.knows(m) for m in mus]
        node.receive(Packet(data.draw(vec)), rnd)
        after = [node.knows(m) for m in mus]
        assert all(a >= b for a, b in zip(after, before))


def test_module_level_aliases():
    rng = make_rng(1)
    node = init_node(0, 2, [1, 2], q=2)
    pkt = coding.sample_packet(node, rng)
    other = init_node(1, 2, [], q=2)
    coding.receive(other, pkt, 1)
    assert coding.can_decode(node)
    assert not coding.can_decode(other) or other.rank == 2
