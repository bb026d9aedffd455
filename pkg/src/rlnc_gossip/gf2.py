"""Bit-packed GF(2) linear algebra kernels.

Vectors of length k are packed into ceil(k/64) uint64 words, bit j of the
packed form being coordinate j. A node basis is stored slot-per-pivot: the
row whose lowest set bit is column p lives in slot p. Rows are kept in
(forward) echelon form only; fully reduced rows are produced on demand by
rref_rows, which is plenty for tests and inspection while keeping the hot
insert path at one elimination sweep.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_ONE = np.uint64(1)
_MASK6 = np.uint64(63)


def words_for(k):
    return (k + 63) // 64


def pack(vec):
    """Pack a 0/1 sequence into a uint64 word array."""
    k = len(vec)
    out = np.zeros(words_for(k), dtype=np.uint64)
    for j, b in enumerate(vec):
        if b:
            out[j >> 6] |= _ONE << np.uint64(j & 63)
    return out

def unpack(words, k):
    return tuple(int(words[j >> 6] >> np.uint64(j & 63)) & 1 for j in range(k))


@njit(cache=True)
def _trailing_bit(v):
    """Index of the lowest set bit across words, -1 if zero."""
    for j in range(v.shape[0]):
        x = v[j]
        if x != np.uint64(0):
            b = 0
            if x & np.uint64(0xFFFFFFFF) == np.uint64(0):
                b += 32
                x >>= np.uint64(32)
            if x & np.uint64(0xFFFF) == np.uint64(0):
                b += 16
                x >>= np.uint64(16)
            if x & np.uint64(0xFF) == np.uint64(0):
                b += 8
                x >>= np.uint64(8)
            if x & np.uint64(0xF) == np.uint64(0):
                b += 4
                x >>= np.uint64(4)
            if x & np.uint64(0x3) == np.uint64(0):
                b += 2
                x >>= np.uint64(2)
            if x & np.uint64(0x1) == np.uint64(0):
                b += 1
            return j * 64 + b
    return -1


@njit(cache=True)
def insert(basis, occupied, v):
    """Eliminate v against the basis; adopt the remainder if nonzero.

    basis: (k, w) uint64, occupied: (k,) uint8, v: (w,) uint64 (destroyed).
    Returns the new pivot column, or -1 if v reduced to zero.
    """
    while True:
        p = _trailing_bit(v)
        if p < 0:
            return -1
        if occupied[p]:
            row = basis[p]
            for j in range(v.shape[0]):
                v[j] ^= row[j]
        else:
            basis[p, :] = v
            occupied[p] = 1
            return p


@njit(cache=True)
def in_span(basis, occupied, v):
    """True iff v (copied) reduces to zero against the basis."""
    w = v.shape[0]
    tmp = np.empty(w, dtype=np.uint64)
    for j in range(w):
        tmp[j] = v[j]
    while True:
        p = _trailing_bit(tmp)
        if p < 0:
            return True
        if not occupied[p]:
            return False
        row = basis[p]
        for j in range(w):
            tmp[j] ^= row[j]


@njit(cache=True)
def sample_span(basis, occupied, coin_words, out):
    """Uniform random span element: XOR basis rows picked by coin bits."""
    for j in range(out.shape[0]):
        out[j] = np.uint64(0)
    k = occupied.shape[0]
    for p in range(k):
        if occupied[p] and (coin_words[p >> 6] >> np.uint64(p & 63)) & np.uint64(1):
            row = basis[p]
            for j in range(out.shape[0]):
                out[j] ^= row[j]


@njit(cache=True)
def _parity(x):
    x ^= x >> np.uint64(32)
    x ^= x >> np.uint64(16)
    x ^= x >> np.uint64(8)
    x ^= x >> np.uint64(4)
    x ^= x >> np.uint64(2)
    x ^= x >> np.uint64(1)
    return np.int64(x & np.uint64(1))


@njit(cache=True)
def knows(basis, occupied, mu_words):
    """True iff some basis row has odd overlap (nonzero dot) with mu."""
    k = occupied.shape[0]
    w = mu_words.shape[0]
    for p in range(k):
        if occupied[p]:
            acc = np.uint64(0)
            row = basis[p]
            for j in range(w):
                acc ^= row[j] & mu_words[j]
            if _parity(acc):
                return True
    return False


@njit(cache=True)
def dot_parity(a, b):
    acc = np.uint64(0)
    for j in range(a.shape[0]):
        acc ^= a[j] & b[j]
    return _parity(acc)


class Gf2NodeState:
    """RLNC node state over GF(2), coefficients only (no payloads).

    API mirrors coding.NodeState; the packed-word variants of the
    operations (receive_words, sample_words, knows_words) avoid tuple
    conversion in the simulation hot path.
    """

    q = 2

    def __init__(self, node_id, k):
        self.node_id = node_id
        self.k = k
        self.w = words_for(k)
        self.basis = np.zeros((k, self.w), dtype=np.uint64)
        self.occupied = np.zeros(k, dtype=np.uint8)
        self.rank = 0
        self.decode_round = None

    def seed_unit(self, index):
        """Adopt standard basis vector e_index (0-based column)."""
        if not 0 <= index < self.k:
            raise IndexError("message index %d out of range" % index)
        if not self.occupied[index]:
            self.basis[index, index >> 6] = _ONE << np.uint64(index & 63)
            self.occupied[index] = 1
            self.rank += 1

    # -- packed-word fast path ---------------------------------------

    def receive_words(self, words, rnd=None):
        piv = insert(self.basis, self.occupied, words)
        if piv >= 0:
            self.rank += 1
            if self.rank == self.k and self.decode_round is None:
                self.decode_round = rnd
            return True
        return False

    def sample_words(self, rng, out=None):
        coins = rng.integers(0, 2**64, size=self.w, dtype=np.uint64)
        if out is None:
            out = np.empty(self.w, dtype=np.uint64)
        sample_span(self.basis, self.occupied, coins, out)
        return out

    def knows_words(self, mu_words):
        return bool(knows(self.basis, self.occupied, mu_words))

    def contains_words(self, words):
        return bool(in_span(self.basis, self.occupied, words))

    # -- tuple API ----------------------------------------------------

    def receive(self, packet, rnd=None):
        mu = packet.mu if hasattr(packet, "mu") else packet
        if len(mu) != self.k:
            raise LengthMismatch(self.k, len(mu))
        return self.receive_words(pack(mu), rnd)

    def sample_mu(self, rng):
        return unpack(self.sample_words(rng), self.k)

    def knows(self, mu):
        if len(mu) != self.k:
            raise LengthMismatch(self.k, len(mu))
        return self.knows_words(pack(mu))

    @property
    def can_decode(self):
        return self.rank == self.k

    def rref_rows(self):
        """Basis in reduced row-echelon form, as k-tuples, pivot order."""
        pivots = [p for p in range(self.k) if self.occupied[p]]
        rows = {p: self.basis[p].copy() for p in pivots}
        # back-substitute higher pivots out of lower-pivot rows
        for i, p in enumerate(pivots):
            for p2 in pivots[i + 1:]:
                if (rows[p][p2 >> 6] >> np.uint64(p2 & 63)) & _ONE:
                    rows[p] ^= rows[p2]
        return [unpack(rows[p], self.k) for p in pivots]


class LengthMismatch(ValueError):
    def __init__(self, expected, got):
        super().__init__("expected vector length %d, got %d" % (expected, got))
