"""RLNC node state: coefficient subspaces, packet sampling, reception
with incremental Gaussian elimination, the knowledge predicate, decoding.

Coefficient vectors are k-tuples of field elements. The generic path works
for any supported field and optionally carries payloads; simulations over
GF(2) without payloads use gf2.Gf2NodeState instead (same surface).
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import FieldSpec, LengthMismatchError, make_field
from .gf2 import Gf2NodeState


class NotFullRankError(ValueError):
    pass


@dataclass
class Packet:
    """A coded packet: coefficient vector and optional payload vector."""

    mu: tuple
    payload: tuple | None = None


class Subspace:
    """Row space over F_q^k in reduced row-echelon form (leftmost pivots).

    Optionally carries one payload row per basis row, updated by identical
    row operations so payload rows always equal the coefficient
    combination of the ground-truth messages.
    """

    def __init__(self, field: FieldSpec, k: int, with_payload=False):
        self.field = field
        self.k = k
        self.rows = []          # list of k-lists, RREF
        self.pivots = []        # sorted pivot columns, aligned with rows
        self.payload_rows = [] if with_payload else None

    @property
    def rank(self):
        return len(self.rows)

    def _reduce(self, vec, payload):
        """Eliminate vec against current rows; returns reduced pair."""
        f = self.field
        vec = list(vec)
        payload = list(payload) if payload is not None else None
        for row, prow, p in zip(
            self.rows, self.payload_rows or self.rows, self.pivots
        ):
            c = vec[p]
            if c:
                for j in range(self.k):
                    vec[j] = f.sub(vec[j], f.mul(c, row[j]))
                if payload is not None:
                    for j in range(len(payload)):
                        payload[j] = f.sub(payload[j], f.mul(c, prow[j]))
        return vec, payload

    def insert(self, vec, payload=None) -> bool:
        """Add vec to the span; True iff the rank increased."""
        if len(vec) != self.k:
            raise LengthMismatchError(
                "expected vector length %d, got %d" % (self.k, len(vec))
            )
        f = self.field
        vec, payload = self._reduce(vec, payload)
        pivot = next((j for j, c in enumerate(vec) if c), None)
        if pivot is None:
            return False
        inv = f.inv(vec[pivot])
        vec = [f.mul(inv, c) for c in vec]
        if payload is not None:
            payload = [f.mul(inv, c) for c in payload]
        # back-substitute the new pivot column out of existing rows
        for i, row in enumerate(self.rows):
            c = row[pivot]
            if c:
                for j in range(self.k):
                    row[j] = f.sub(row[j], f.mul(c, vec[j]))
                if self.payload_rows is not None:
                    prow = self.payload_rows[i]
                    for j in range(len(prow)):
                        prow[j] = f.sub(prow[j], f.mul(c, payload[j]))
        pos = sum(1 for p in self.pivots if p < pivot)
        self.rows.insert(pos, vec)
        self.pivots.insert(pos, pivot)
        if self.payload_rows is not None:
            self.payload_rows.insert(pos, payload)
        return True

    def contains(self, vec):
        reduced, _ = self._reduce(vec, None)
        return all(c == 0 for c in reduced)

    def knows(self, mu):
        """True iff the span is not orthogonal to mu."""
        if len(mu) != self.k:
            raise LengthMismatchError(
                "expected vector length %d, got %d" % (self.k, len(mu))
            )
        return any(self.field.dot(row, mu) != 0 for row in self.rows)

    def uniform_sample(self, rng):
        """Uniform element of the span (zero included), with payload."""
        f = self.field
        vec = [0] * self.k
        payload = (
            [0] * len(self.payload_rows[0])
            if self.payload_rows
            else None
        )
        for i, row in enumerate(self.rows):
            c = int(rng.integers(f.q))
            if c:
                for j in range(self.k):
                    vec[j] = f.add(vec[j], f.mul(c, row[j]))
                if payload is not None:
                    prow = self.payload_rows[i]
                    for j in range(len(payload)):
                        payload[j] = f.add(payload[j], f.mul(c, prow[j]))
        return tuple(vec), tuple(payload) if payload is not None else None

    def enumerate_span(self):
        """All q^rank span elements (small subspaces only)."""
        f = self.field
        out = [tuple([0] * self.k)]
        for row in self.rows:
            new = []
            for c in range(1, f.q):
                scaled = f.vec_scale(c, row)
                new.extend(f.vec_add(v, scaled) for v in out)
            out.extend(new)
        return out


class NodeState:
    """Generic RLNC node state; exclusively owned by one trial."""

    def __init__(self, node_id, field, k, payload_mode=False):
        self.node_id = node_id
        self.field = field
        self.k = k
        self.payload_mode = payload_mode
        self.y = Subspace(field, k, with_payload=payload_mode)
        self.decode_round = None

    @property
    def q(self):
        return self.field.q

    @property
    def rank(self):
        return self.y.rank

    @property
    def can_decode(self):
        return self.y.rank == self.k

    def receive(self, packet, rnd=None) -> bool:
        mu = packet.mu if isinstance(packet, Packet) else packet
        payload = packet.payload if isinstance(packet, Packet) else None
        innovative = self.y.insert(mu, payload if self.payload_mode else None)
        if innovative and self.rank == self.k and self.decode_round is None:
            self.decode_round = rnd
        return innovative

    def sample_packet(self, rng) -> Packet:
        mu, payload = self.y.uniform_sample(rng)
        return Packet(mu, payload)

    def sample_mu(self, rng):
        return self.y.uniform_sample(rng)[0]

    def knows(self, mu):
        return self.y.knows(mu)

    def decode(self):
        """Recover the k messages; requires full rank and payload mode."""
        if self.rank != self.k:
            raise NotFullRankError(
                "rank %d < %d, cannot decode" % (self.rank, self.k)
            )
        if not self.payload_mode:
            raise NotFullRankError("payload mode is off, nothing to decode")
        # full-rank RREF is the identity, so payload rows are the messages
        return [tuple(row) for row in self.y.payload_rows]


def init_node(
    node_id,
    k,
    known_message_indices=(),
    field=None,
    q=2,
    payload_mode=False,
    messages=None,
    fast=None,
):
    """Build a node state holding standard basis vectors e_i for each
    1-based index in known_message_indices (empty set: zero subspace).

    fast=None picks the bit-packed GF(2) state automatically when q == 2
    and payloads are off.
    """
    if field is None:
        field = make_field(q)
    indices = sorted(set(known_message_indices))
    for i in indices:
        if not 1 <= i <= k:
            raise IndexError("message index %d out of range 1..%d" % (i, k))
    if fast is None:
        fast = field.q == 2 and not payload_mode
    if fast:
        state = Gf2NodeState(node_id, k)
        for i in indices:
            state.seed_unit(i - 1)
        if state.rank == k:
            state.decode_round = 0
        return state
    if payload_mode and indices and messages is None:
        raise ValueError("payload_mode requires ground-truth messages")
    state = NodeState(node_id, field, k, payload_mode=payload_mode)
    for i in indices:
        e = [0] * k
        e[i - 1] = 1
        state.y.insert(e, list(messages[i - 1]) if payload_mode else None)
    if state.rank == k:
        state.decode_round = 0
    return state


# Functional aliases over the state methods.

def sample_packet(state, rng) -> Packet:
    if isinstance(state, Gf2NodeState):
        return Packet(state.sample_mu(rng))
    return state.sample_packet(rng)


def receive(state, packet, rnd=None):
    return state, state.receive(packet, rnd)


def knows(state, mu):
    return state.knows(mu)


def can_decode(state):
    return state.can_decode


def decode(state):
    return state.decode()
