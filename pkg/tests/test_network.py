"""Graph catalog, induced weightings, and the three bottleneck metrics."""

from fractions import Fraction

import numpy as np
import pytest

from rlnc_gossip import network
from rlnc_gossip.network import (
    Topology,
    complete_graph,
    conductance_lambda,
    conductance_lambda_brute,
    explicit_graph,
    hypercube_graph,
    induce_weighted,
    isoperimetric_h,
    isoperimetric_h_brute,
    line_graph,
    min_cut_gamma,
    min_cut_gamma_brute,
    min_cut_gamma_maxflow,
    parse_graph_file,
    ring_graph,
    star_graph,
    two_cliques_bridged,
    union_graph,
    write_graph_file,
)


# -- induced weightings ------------------------------------------------

@pytest.mark.parametrize("model", ["push", "pull", "exchange"])
@pytest.mark.parametrize("family", [complete_graph, ring_graph, star_graph])
def test_induced_mass_is_exactly_one(model, family):
    g = induce_weighted(family(8), model)
    assert g.total_weight() == Fraction(1)


def test_induced_k4_push_gamma():
    g = induce_weighted(complete_graph(4), "push")
    assert min_cut_gamma(g) == pytest.approx(1 / 4, abs=1e-12)


def test_induced_star4_push_gamma():
    # leaf of a 4-node star: single outgoing edge of weight 1/(4*1)... but
    # the binding cut isolates the center side; brute force says 1/12
    g = induce_weighted(star_graph(4), "push")
    assert min_cut_gamma(g) == pytest.approx(1 / 12, abs=1e-12)


def test_single_directed_edge_gamma_zero():
    g = explicit_graph(2, directed_edges=[(0, 1)],
                       weights={(0, 1): Fraction(1)})
    assert min_cut_gamma(g) == 0  # nothing flows back into node 0


@pytest.mark.parametrize("n", range(2, 13))
def test_complete_push_gamma_closed_form(n):
    g = induce_weighted(complete_graph(n), "push")
    assert min_cut_gamma(g) == pytest.approx(1 / n, abs=1e-12)


def test_gamma_brute_vs_maxflow_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(3, 13))
        edges = [(u, v) for u in range(n) for v in range(n)
                 if u != v and rng.random() < 0.4]
        if not edges:
            continue
        w = {e: Fraction(int(rng.integers(1, 50))) for e in edges}
        total = sum(w.values())
        w = {e: x / total for e, x in w.items()}
        g = explicit_graph(n, directed_edges=edges, weights=w)
        a = min_cut_gamma_brute(g)
        b = min_cut_gamma_maxflow(g)
        assert abs(float(a) - b) < 1e-9


# -- isoperimetric number ----------------------------------------------

@pytest.mark.parametrize("n", [2, 5, 9, 16])
def test_complete_h_is_one(n):
    assert isoperimetric_h(complete_graph(n)) == 1


def test_disconnected_h_is_zero():
    g = Topology(6, undirected_edges=[(0, 1), (1, 2), (0, 2),
                                      (3, 4), (4, 5), (3, 5)])
    assert isoperimetric_h_brute(g) == 0


def test_ring8_h():
    assert isoperimetric_h(ring_graph(8)) == Fraction(1, 2)


def test_hypercube_h_values():
    assert isoperimetric_h(hypercube_graph(8)) == Fraction(3, 4)
    assert isoperimetric_h(hypercube_graph(16)) == Fraction(3, 4)
    # closed form beyond the brute-force limit
    assert network.isoperimetric_h_closed("hypercube", 64) == Fraction(5, 8)


@pytest.mark.parametrize("family,n", [
    ("complete", 4), ("complete", 11), ("ring", 6), ("ring", 16),
    ("line", 8), ("star", 8), ("barbell", 8), ("barbell", 16),
    ("two_cliques", 11), ("hypercube", 16),
])
def test_h_closed_forms_match_brute(family, n):
    g = network.make_family(family, n)
    closed = network.isoperimetric_h_closed(family, n, g.family_params)
    assert closed == isoperimetric_h_brute(g)


# -- conductance -------------------------------------------------------

def test_k4_exchange_lambda():
    g = induce_weighted(complete_graph(4), "exchange")
    assert conductance_lambda(g) == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("family,n", [
    ("complete", 4), ("complete", 9), ("complete", 16),
    ("ring", 6), ("ring", 13), ("star", 6), ("star", 16),
])
def test_lambda_closed_forms_match_brute(family, n):
    g = induce_weighted(network.make_family(family, n), "exchange")
    assert network.conductance_lambda_closed(family, n) == conductance_lambda_brute(g)


# -- union graphs ------------------------------------------------------

def test_union_graph_sums_weights():
    w1 = {(0, 1): Fraction(1, 4)}
    w2 = {(0, 1): Fraction(1, 4), (1, 2): Fraction(1, 2)}
    g1 = explicit_graph(3, undirected_edges=[(0, 1)], weights=w1)
    g2 = explicit_graph(3, undirected_edges=[(0, 1), (1, 2)], weights=w2)
    u = union_graph([g1, g2])
    assert u.weights[(0, 1)] == Fraction(1, 2)
    assert u.weights[(1, 2)] == Fraction(1, 2)


def test_union_graph_unweighted_edge_union():
    g1 = ring_graph(4)
    g2 = star_graph(4)
    u = union_graph([g1, g2])
    assert set(u.undirected_edges) == (set(g1.undirected_edges)
                                       | set(g2.undirected_edges))


# -- file format -------------------------------------------------------

def test_graph_file_roundtrip(tmp_path):
    g = induce_weighted(ring_graph(5), "exchange")
    path = tmp_path / "ring5.edges"
    write_graph_file(g, str(path))
    back = parse_graph_file(str(path))
    assert back.n == 5
    assert set(back.undirected_edges) == set(g.undirected_edges)
    for e, w in g.weights.items():
        assert back.weights[e] == w


def test_graph_file_directed_and_fractions(tmp_path):
    path = tmp_path / "d.edges"
    path.write_text("n 3 directed\n0 1 1/3\n1 2 1/3\n2 0 1/3\n")
    g = parse_graph_file(str(path))
    assert set(g.directed_edges) == {(0, 1), (1, 2), (2, 0)}
    assert g.weights[(0, 1)] == Fraction(1, 3)
    assert min_cut_gamma(g) == pytest.approx(1 / 3, abs=1e-12)


def test_graph_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_text("n 3 sideways\n0 1\n")
    with pytest.raises(ValueError):
        parse_graph_file(str(path))


# -- topology basics ---------------------------------------------------

def test_self_loop_rejected():
    with pytest.raises(ValueError):
        Topology(3, undirected_edges=[(1, 1)])


def test_neighbors_of_two_cliques():
    g = two_cliques_bridged(3, 4)
    assert g.neighbors(0) == [1, 2, 3]  # bridge endpoint
    assert g.neighbors(4) == [3, 5, 6]
