"""Exact arithmetic in F_q for primes and small prime powers.

Elements are plain ints in canonical form. For prime fields the element is
the residue in [0, q). For extension fields GF(p^d) an element encodes the
polynomial c_0 + c_1 x + ... + c_{d-1} x^{d-1} as the integer
sum(c_i * p**i); for p = 2 this is the usual bit packing. Multiplication
and inversion use log/exp tables over a primitive element, addition is
digit-wise mod p (XOR for p = 2).
"""

from __future__ import annotations

from functools import lru_cache

import sympy

# Canonical representative of a field element; see module docstring.
FieldElement = int

MAX_PRIME = 2**31
MAX_EXTENSION = 2**16


class FieldError(ValueError):
    pass


class NotPrimePowerError(FieldError):
    """q has two distinct prime factors."""


class UnsupportedFieldError(FieldError):
    """q is a prime power but beyond the supported table limits."""


class LengthMismatchError(ValueError):
    pass


def _poly_mul_mod(a, b, mod_poly, p):
    """Multiply coefficient lists a*b modulo mod_poly (monic, degree d)."""
    d = len(mod_poly) - 1
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    # reduce: x^d = -(mod_poly[:-1])
    for i in range(len(res) - 1, d - 1, -1):
        c = res[i]
        if c:
            res[i] = 0
            for j in range(d):
                res[i - d + j] = (res[i - d + j] - c * mod_poly[j]) % p
    res = res[:d]
    while len(res) < d:
        res.append(0)
    return res


def _poly_divmod(a, b, p):
    """Polynomial division of coefficient lists over F_p; returns (q, r)."""
    a = list(a)
    db = len(b) - 1
    while len(b) > 1 and b[-1] == 0:
        b = b[:-1]
        db -= 1
    inv_lead = pow(b[-1], p - 2, p) if p > 2 else 1
    q = [0] * max(len(a) - db, 1)
    for i in range(len(a) - 1, db - 1, -1):
        c = (a[i] * inv_lead) % p
        if c:
            q[i - db] = c
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _is_irreducible(poly, p):
    """Trial division by all monic polynomials of degree <= deg/2."""
    d = len(poly) - 1
    for deg in range(1, d // 2 + 1):
        for m in range(p**deg):
            div = _digits(m, p, deg) + [1]
            _, r = _poly_divmod(poly, div, p)
            if len(r) == 1 and r[0] == 0:
                return False
    return True


def _digits(value, p, width):
    out = []
    for _ in range(width):
        out.append(value % p)
        value //= p
    return out


def _encode(digits, p):
    v = 0
    for c in reversed(digits):
        v = v * p + c
    return v


def smallest_irreducible(p, d):
    """Lexicographically smallest monic irreducible polynomial of degree d.

    Candidates x^d + c are ordered by the integer encoding of the lower
    coefficients (c_0 + c_1 p + ...), so the result is deterministic.
    Returns the full coefficient list [c_0, ..., c_{d-1}, 1].
    """
    for m in range(p**d):
        poly = _digits(m, p, d) + [1]
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldSpec:
    """Immutable description of F_q plus its arithmetic.

    kind is one of "prime", "binary_extension", "prime_power".
    """

    def __init__(self, q, p, degree, irreducible=None):
        self.q = q
        self.p = p
        self.degree = degree
        self.irreducible = tuple(irreducible) if irreducible else None
        if degree == 1:
            self.kind = "prime"
        elif p == 2:
            self.kind = "binary_extension"
        else:
            self.kind = "prime_power"
        self.zero = 0
        self.one = 1
        self._exp = None
        self._log = None
        if degree > 1:
            self._build_tables()

    # -- construction -------------------------------------------------

    def _build_tables(self):
        p, d = self.p, self.degree
        mod = list(self.irreducible)
        group = self.q - 1
        prime_factors = list(sympy.factorint(group))

        def poly_pow(base, e):
            result = [1] + [0] * (d - 1)
            b = list(base)
            while e:
                if e & 1:
                    result = _poly_mul_mod(result, b, mod, p)
                b = _poly_mul_mod(b, b, mod, p)
                e >>= 1
            return result

        gen = None
        for cand in range(2, self.q):
            poly = _digits(cand, p, d)
            if all(
                poly_pow(poly, group // r) != [1] + [0] * (d - 1)
                for r in prime_factors
            ):
                gen = poly
                break
        assert gen is not None
        exp = [0] * group
        log = [0] * self.q
        cur = [1] + [0] * (d - 1)
        for i in range(group):
            enc = _encode(cur, p)
            exp[i] = enc
            log[enc] = i
            cur = _poly_mul_mod(cur, gen, mod, p)
        self._exp = exp
        self._log = log
        self.generator = exp[1]

    # -- arithmetic ---------------------------------------------------

    def add(self, a, b):
        if self.degree == 1:
            return (a + b) % self.q
        if self.p == 2:
            return a ^ b
        p = self.p
        out = 0
        mul = 1
        for _ in range(self.degree):
            out += ((a % p + b % p) % p) * mul
            a //= p
            b //= p
            mul *= p
        return out

    def neg(self, a):
        if self.degree == 1:
            return (-a) % self.q
        if self.p == 2:
            return a
        p = self.p
        out = 0
        mul = 1
        for _ in range(self.degree):
            out += ((-(a % p)) % p) * mul
            a //= p
            mul *= p
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.degree == 1:
            return (a * b) % self.q
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.q)
        if self.degree == 1:
            return pow(a, self.q - 2, self.q)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        result = 1
        base = a
        e = int(e)
        if e < 0:
            base = self.inv(a)
            e = -e
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # -- vectors ------------------------------------------------------

    def dot(self, u, v):
        if len(u) != len(v):
            raise LengthMismatchError(
                "dot of vectors with lengths %d and %d" % (len(u), len(v))
            )
        acc = 0
        for a, b in zip(u, v):
            acc = self.add(acc, self.mul(a, b))
        return acc

    def vec_add(self, u, v):
        if len(u) != len(v):
            raise LengthMismatchError("vector lengths differ")
        return tuple(self.add(a, b) for a, b in zip(u, v))

    def vec_scale(self, c, u):
        return tuple(self.mul(c, a) for a in u)

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return "FieldSpec(q=%d, kind=%s)" % (self.q, self.kind)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self):
        return hash(("FieldSpec", self.q))


@lru_cache(maxsize=None)
def make_field(q):
    """Return the FieldSpec for order q, or raise.

    Supported: primes below 2^31 and prime powers p^d <= 2^16 (table
    arithmetic). Raises NotPrimePowerError / UnsupportedFieldError.
    """
    q = int(q)
    if q < 2:
        raise FieldError("field order must be >= 2, got %d" % q)
    factors = sympy.factorint(q)
    if len(factors) != 1:
        raise NotPrimePowerError("%d is not a prime power" % q)
    (p, d), = factors.items()
    if d == 1:
        if q >= MAX_PRIME:
            raise UnsupportedFieldError("prime %d exceeds 2^31" % q)
        return FieldSpec(q, p, 1)
    if q > MAX_EXTENSION:
        raise UnsupportedFieldError(
            "extension field of order %d exceeds table limit 2^16" % q
        )
    return FieldSpec(q, p, d, smallest_irreducible(p, d))
