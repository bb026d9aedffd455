"""Per-round topologies, induced probability-weighted graphs, and the
three cut/expansion metrics (min-cut gamma, isoperimetric number h,
conductance lambda) with brute-force and max-flow cross-checks.

Weights are kept as exact Fractions internally; metrics convert to float
only at the API boundary.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

import networkx as nx

BRUTE_FORCE_LIMIT = 20


class EmptyGraphError(ValueError):
    pass


class IsolatedVertexError(ValueError):
    pass


class TooLargeForExactError(ValueError):
    pass


class SizeMismatchError(ValueError):
    pass


class Topology:
    """A round's communication graph.

    directed_edges: set of (u, v); undirected_edges: set of (u, v), u < v.
    weights maps edges (same keys) to Fraction probability masses with
    total at most 1. family/family_params tag instances produced by the
    catalog constructors so metrics can use closed forms at large n.
    """

    def __init__(self, n, directed_edges=(), undirected_edges=(),
                 weights=None, family=None, family_params=None,
                 check_mass=True):
        self.n = n
        self.directed_edges = set()
        self.undirected_edges = set()
        for (u, v) in directed_edges:
            self._check(u, v)
            self.directed_edges.add((u, v))
        for (u, v) in undirected_edges:
            self._check(u, v)
            self.undirected_edges.add((min(u, v), max(u, v)))
        self.weights = None
        if weights is not None:
            self.weights = {}
            for e, p in weights.items():
                p = Fraction(p)
                if p <= 0:
                    raise ValueError("edge weight must be positive: %s" % (e,))
                self.weights[e] = p
            total = sum(self.weights.values())
            if check_mass and total > 1:
                raise ValueError("total edge probability %s exceeds 1" % total)
        self.family = family
        self.family_params = family_params or {}
        self._out = None
        self._in = None
        self._nbr = None

    def _check(self, u, v):
        if u == v:
            raise ValueError("self-loop at node %d" % u)
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError("edge (%d,%d) out of range n=%d" % (u, v, self.n))

    @property
    def is_weighted(self):
        return self.weights is not None

    @property
    def is_directed(self):
        return bool(self.directed_edges)

    def total_weight(self):
        return sum(self.weights.values()) if self.weights else None

    def _build_adjacency(self):
        out = [[] for _ in range(self.n)]
        inn = [[] for _ in range(self.n)]
        for (u, v) in sorted(self.directed_edges):
            out[u].append(v)
            inn[v].append(u)
        for (u, v) in sorted(self.undirected_edges):
            out[u].append(v)
            out[v].append(u)
            inn[u].append(v)
            inn[v].append(u)
        self._out = [sorted(set(x)) for x in out]
        self._in = [sorted(set(x)) for x in inn]

    def out_neighbors(self, u):
        if self._out is None:
            self._build_adjacency()
        return self._out[u]

    def in_neighbors(self, u):
        if self._in is None:
            self._build_adjacency()
        return self._in[u]

    def neighbors(self, u):
        """Undirected view: union of in- and out-neighbors."""
        if self._nbr is None:
            self._nbr = [
                sorted(set(self.out_neighbors(v)) | set(self.in_neighbors(v)))
                for v in range(self.n)
            ]
        return self._nbr[u]

    def undirected_degree(self, u):
        return sum(1 for (a, b) in self.undirected_edges if u in (a, b))

    def all_edges(self):
        return sorted(self.directed_edges) + sorted(self.undirected_edges)


# ---------------------------------------------------------------------
# graph family catalog

def complete_graph(n):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Topology(n, undirected_edges=edges, family="complete")


def ring_graph(n):
    edges = [(i, (i + 1) % n) for i in range(n)]
    return Topology(n, undirected_edges=edges, family="ring")


def line_graph(n):
    edges = [(i, i + 1) for i in range(n - 1)]
    return Topology(n, undirected_edges=edges, family="line")


def star_graph(n):
    edges = [(0, i) for i in range(1, n)]
    return Topology(n, undirected_edges=edges, family="star")


def hypercube_graph(n):
    d = n.bit_length() - 1
    if 1 << d != n:
        raise ValueError("hypercube size must be a power of two, got %d" % n)
    edges = [(v, v ^ (1 << b)) for v in range(n) for b in range(d)
             if v < v ^ (1 << b)]
    return Topology(n, undirected_edges=edges, family="hypercube",
                    family_params={"dim": d})


def barbell_graph(clique_size):
    """Two cliques of clique_size nodes joined by a single bridge edge."""
    m = clique_size
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
    edges += [(m + u, m + v) for u in range(m) for v in range(u + 1, m)]
    edges.append((m - 1, m))
    return Topology(2 * m, undirected_edges=edges, family="barbell",
                    family_params={"clique_size": m})


def two_cliques_bridged(n1, n2):
    edges = [(u, v) for u in range(n1) for v in range(u + 1, n1)]
    edges += [(n1 + u, n1 + v) for u in range(n2) for v in range(u + 1, n2)]
    edges.append((0, n1))
    return Topology(n1 + n2, undirected_edges=edges, family="two_cliques",
                    family_params={"n1": n1, "n2": n2})


def explicit_graph(n, directed_edges=(), undirected_edges=(), weights=None):
    return Topology(n, directed_edges, undirected_edges, weights)


def random_gnp(n, p, rng):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    return Topology(n, undirected_edges=edges)


def random_matching(n, rng):
    perm = list(rng.permutation(n))
    edges = [(perm[2 * i], perm[2 * i + 1]) for i in range(n // 2)]
    return Topology(n, undirected_edges=edges)


GRAPH_FAMILIES = {
    "complete": complete_graph,
    "ring": ring_graph,
    "line": line_graph,
    "star": star_graph,
    "hypercube": hypercube_graph,
    "barbell": barbell_graph,
}


def make_family(name, n, **params):
    if name == "barbell":
        if n % 2:
            raise ValueError("barbell needs even n")
        return barbell_graph(n // 2)
    if name == "two_cliques":
        return two_cliques_bridged(n // 2, n - n // 2)
    if name not in GRAPH_FAMILIES:
        raise ValueError("unknown graph family %r" % name)
    return GRAPH_FAMILIES[name](n)


# ---------------------------------------------------------------------
# induced weighted graphs

def induce_weighted(base: Topology, model: str) -> Topology:
    """Replace each undirected edge of an unweighted graph by probability
    weighted edges for the asynchronous single-transfer protocol.

    model: PUSH, PULL or EXCHANGE. Weight of node u's choice of neighbor v
    is 1/(n * deg(u)); PUSH directs it u->v, PULL v->u, EXCHANGE merges
    both choices on the undirected edge. Total mass is exactly 1.
    """
    model = model.upper()
    if base.directed_edges:
        raise ValueError("induce_weighted needs an undirected base graph")
    n = base.n
    deg = [base.undirected_degree(u) for u in range(n)]
    for u in range(n):
        if deg[u] == 0:
            raise IsolatedVertexError("node %d has no neighbors" % u)
    directed, undirected, weights = [], [], {}
    for (u, v) in sorted(base.undirected_edges):
        wu = Fraction(1, n * deg[u])
        wv = Fraction(1, n * deg[v])
        if model == "PUSH":
            directed += [(u, v), (v, u)]
            weights[(u, v)] = wu
            weights[(v, u)] = wv
        elif model == "PULL":
            directed += [(v, u), (u, v)]
            weights[(v, u)] = wu
            weights[(u, v)] = wv
        elif model == "EXCHANGE":
            undirected.append((u, v))
            weights[(u, v)] = wu + wv
        else:
            raise ValueError("model must be PUSH, PULL or EXCHANGE")
    return Topology(n, directed, undirected, weights,
                    family=base.family, family_params=base.family_params)


# ---------------------------------------------------------------------
# metric internals

def _crossing_mass(g: Topology, members):
    """Total probability mass of edges leaving the member set."""
    total = Fraction(0)
    for (u, v) in g.directed_edges:
        if members[u] and not members[v]:
            total += g.weights[(u, v)]
    for (u, v) in g.undirected_edges:
        if members[u] != members[v]:
            total += g.weights[(u, v)]
    return total


def _subset_masks(n):
    return range(1, (1 << n) - 1)


def min_cut_gamma_brute(g: Topology) -> Fraction:
    if g.n > BRUTE_FORCE_LIMIT:
        raise TooLargeForExactError("n=%d exceeds brute-force limit" % g.n)
    best = None
    for mask in _subset_masks(g.n):
        members = [(mask >> u) & 1 for u in range(g.n)]
        m = _crossing_mass(g, members)
        if best is None or m < best:
            best = m
    return best


def min_cut_gamma_maxflow(g: Topology) -> float:
    """Global directed min cut via max-flow: fix node 0, minimize over
    mincut(0->t) and mincut(t->0) for all other t."""
    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.n))
    for (u, v) in g.directed_edges:
        w = float(g.weights[(u, v)])
        dg.add_edge(u, v, capacity=dg.get_edge_data(u, v, {}).get("capacity", 0.0) + w)
    for (u, v) in g.undirected_edges:
        w = float(g.weights[(u, v)])
        for (a, b) in ((u, v), (v, u)):
            dg.add_edge(a, b, capacity=dg.get_edge_data(a, b, {}).get("capacity", 0.0) + w)
    best = math.inf
    for t in range(1, g.n):
        for (s, d) in ((0, t), (t, 0)):
            value = nx.maximum_flow_value(dg, s, d)
            best = min(best, value)
    return best


def min_cut_gamma(g: Topology) -> float:
    """Minimum outgoing probability mass over nonempty proper subsets.

    For n <= 20 both exhaustive enumeration and the max-flow route are
    computed and must agree to 1e-9; beyond that only max-flow runs.
    """
    if g.n == 0 or (not g.directed_edges and not g.undirected_edges):
        raise EmptyGraphError("min_cut_gamma of an empty graph")
    if not g.is_weighted:
        raise ValueError("min_cut_gamma needs a weighted topology")
    flow = min_cut_gamma_maxflow(g)
    if g.n <= BRUTE_FORCE_LIMIT:
        brute = float(min_cut_gamma_brute(g))
        if abs(brute - flow) > 1e-9:
            raise AssertionError(
                "min-cut disagreement: brute=%r maxflow=%r" % (brute, flow)
            )
        return brute
    return flow


# ---------------------------------------------------------------------
# isoperimetric number h

def _out_masks(g: Topology):
    out_mask = [0] * g.n
    for (u, v) in g.directed_edges:
        out_mask[u] |= 1 << v
    for (u, v) in g.undirected_edges:
        out_mask[u] |= 1 << v
        out_mask[v] |= 1 << u
    return out_mask


def isoperimetric_h_brute(g: Topology) -> Fraction:
    if g.n > BRUTE_FORCE_LIMIT:
        raise TooLargeForExactError("n=%d exceeds brute-force limit" % g.n)
    out_mask = _out_masks(g)
    n = g.n
    best = None
    for mask in _subset_masks(n):
        nb = 0
        m = mask
        while m:
            u = (m & -m).bit_length() - 1
            nb |= out_mask[u]
            m &= m - 1
        boundary = bin(nb & ~mask).count("1")
        s = bin(mask).count("1")
        val = Fraction(boundary, min(s, n - s))
        if best is None or val < best:
            best = val
            if best == 0:
                break
    return best


def _harper_boundary(d):
    """Vertex boundary sizes of initial segments of the simplicial order
    on the d-cube; boundary[m] for segment of size m."""
    n = 1 << d
    def support(v):
        return tuple(b for b in range(d) if (v >> b) & 1)

    order = sorted(range(n), key=lambda v: (bin(v).count("1"), support(v)))
    seg = 0
    boundary = [0] * (n + 1)
    for m in range(1, n + 1):
        seg |= 1 << order[m - 1]
        nb = 0
        s = seg
        while s:
            v = (s & -s).bit_length() - 1
            for b in range(d):
                nb |= 1 << (v ^ (1 << b))
            s &= s - 1
        boundary[m] = bin(nb & ~seg).count("1")
    return boundary


def hypercube_h_exact(d) -> Fraction:
    """h of the d-cube from Harper's vertex-isoperimetric theorem:
    initial segments of the simplicial order minimize the boundary, and
    complements of initial segments are isomorphic to initial segments."""
    n = 1 << d
    boundary = _harper_boundary(d)
    return min(
        Fraction(boundary[m], min(m, n - m)) for m in range(1, n)
    )


def isoperimetric_h_closed(family, n, params=None):
    """Closed-form h for catalog families, exact at any size."""
    params = params or {}
    if n < 2:
        raise ValueError("n must be >= 2")
    if family == "complete":
        return Fraction(1)
    if family == "ring":
        if n == 3:
            return Fraction(2)
        return Fraction(2, n // 2)
    if family == "line":
        return Fraction(1, n // 2)
    if family == "star":
        return Fraction(1, n // 2)
    if family == "hypercube":
        return hypercube_h_exact(params.get("dim", n.bit_length() - 1))
    if family == "barbell":
        return Fraction(1, params.get("clique_size", n // 2))
    if family == "two_cliques":
        n1 = params.get("n1", n // 2)
        n2 = params.get("n2", n - n // 2)
        return Fraction(1, min(n1, n2))
    raise ValueError("no closed form for family %r" % family)


def isoperimetric_h(g: Topology, method="auto") -> float:
    """min over subsets S of |directed out-neighborhood of S| divided by
    the smaller side; 0 for disconnected graphs."""
    if g.n < 2:
        raise ValueError("isoperimetric_h needs n >= 2")
    if method == "brute" or (method == "auto" and g.n <= BRUTE_FORCE_LIMIT):
        return float(isoperimetric_h_brute(g))
    if g.family is not None:
        return float(isoperimetric_h_closed(g.family, g.n, g.family_params))
    raise TooLargeForExactError(
        "n=%d too large for exact h and graph is not a catalog family" % g.n
    )


# ---------------------------------------------------------------------
# conductance lambda

def conductance_lambda_brute(g: Topology) -> Fraction:
    if g.n > BRUTE_FORCE_LIMIT:
        raise TooLargeForExactError("n=%d exceeds brute-force limit" % g.n)
    n = g.n
    best = None
    for mask in _subset_masks(n):
        members = [(mask >> u) & 1 for u in range(n)]
        mass = _crossing_mass(g, members)
        s = bin(mask).count("1")
        val = mass / min(s, n - s)
        if best is None or val < best:
            best = val
            if best == 0:
                break
    return best


def conductance_lambda_closed(family, n, model="EXCHANGE"):
    """Closed-form lambda for EXCHANGE-induced catalog families."""
    if model.upper() != "EXCHANGE":
        raise ValueError("closed forms are provided for EXCHANGE only")
    if family == "complete":
        return Fraction(2 * (n - n // 2), n * (n - 1))
    if family == "ring":
        return Fraction(2, n * (n // 2))
    if family == "star":
        return Fraction(1, n - 1)
    raise ValueError("no closed form for family %r" % family)


def conductance_lambda(g: Topology) -> float:
    if not g.is_weighted:
        raise ValueError("conductance_lambda needs a weighted topology")
    if g.n <= BRUTE_FORCE_LIMIT:
        return float(conductance_lambda_brute(g))
    raise TooLargeForExactError("n=%d exceeds exact-computation limit" % g.n)


# ---------------------------------------------------------------------

def union_graph(gs) -> Topology:
    """Edge union of same-size topologies; weights, if any, are summed
    without renormalization (a warning flags total mass above 1)."""
    gs = list(gs)
    if not gs:
        raise SizeMismatchError("union of no graphs")
    n = gs[0].n
    if any(g.n != n for g in gs):
        raise SizeMismatchError("union of graphs with different n")
    directed, undirected = set(), set()
    weights = {} if any(g.is_weighted for g in gs) else None
    for g in gs:
        directed |= g.directed_edges
        undirected |= g.undirected_edges
        if weights is not None and g.weights:
            for e, p in g.weights.items():
                weights[e] = weights.get(e, Fraction(0)) + p
    if weights is not None and sum(weights.values()) > 1:
        # keep the raw sums; the union is meant for connectivity analysis
        warnings.warn("union graph total edge mass exceeds 1", stacklevel=2)
    return Topology(n, directed, undirected, weights, check_mass=False)


# ---------------------------------------------------------------------
# edge-list file format: header "n <count> directed|undirected", then
# one edge per line "u v [p]" with p a decimal or a/b fraction.

def parse_graph_file(path_or_lines) -> Topology:
    if isinstance(path_or_lines, (str,)):
        with open(path_or_lines) as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(path_or_lines)
    lines = [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty graph file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "n":
        raise ValueError("bad header %r; expected 'n <count> directed|undirected'"
                         % lines[0])
    n = int(header[1])
    directed = header[2] == "directed"
    if header[2] not in ("directed", "undirected"):
        raise ValueError("bad edge mode %r" % header[2])
    d_edges, u_edges, weights = [], [], {}
    for ln in lines[1:]:
        parts = ln.split()
        u, v = int(parts[0]), int(parts[1])
        key = (u, v) if directed else (min(u, v), max(u, v))
        if directed:
            d_edges.append(key)
        else:
            u_edges.append(key)
        if len(parts) > 2:
            weights[key] = Fraction(parts[2])
    return Topology(n, d_edges, u_edges, weights or None)


def write_graph_file(g: Topology, path):
    mode = "directed" if g.directed_edges else "undirected"
    edges = sorted(g.directed_edges) if g.directed_edges else sorted(g.undirected_edges)
    with open(path, "w") as fh:
        fh.write("n %d %s\n" % (g.n, mode))
        for e in edges:
            if g.is_weighted:
                fh.write("%d %d %s\n" % (e[0], e[1], g.weights[e]))
            else:
                fh.write("%d %d\n" % e)
