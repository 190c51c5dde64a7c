"""Univariate polynomial arithmetic over F_p and its quotient extensions.

A polynomial is a list of ints in [0, p) where index i holds the
coefficient of t^i; the zero polynomial is the empty list and no list has
a trailing zero.  Everything here is exact modular arithmetic: no
floating point, no probabilistic answers.  The equal-degree splitting
step is randomized but runs on an explicit seeded generator, so results
are reproducible; it requires p odd, which every caller guarantees.
"""

from __future__ import annotations

import random
from typing import Sequence


def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a: Sequence[int]) -> int:
    """Degree of a, with the zero polynomial at -1."""
    return len(a) - 1


def is_zero(a: Sequence[int]) -> bool:
    return not a


def add(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return trim(out)


def sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % p
    return trim(out)


def scale(a: Sequence[int], c: int, p: int) -> list[int]:
    c %= p
    if c == 0:
        return []
    return trim([x * c % p for x in a])


def mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim([c % p for c in out])


def divmod_poly(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder of a by b; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [c % p for c in a]
    trim(r)
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], r
    inv_lead = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    while len(r) - 1 >= db and r:
        c = r[-1] * inv_lead % p
        k = len(r) - 1 - db
        q[k] = c
        for i, bc in enumerate(b):
            r[k + i] = (r[k + i] - c * bc) % p
        trim(r)
    return trim(q), r


def rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    return divmod_poly(a, b, p)[1]


def monic(a: Sequence[int], p: int) -> list[int]:
    if not a:
        return []
    return scale(a, pow(a[-1], -1, p), p)


def gcd_poly(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Monic gcd."""
    a, b = list(a), list(b)
    while b:
        a, b = b, rem(a, b, p)
    return monic(a, p)


def powmod(a: Sequence[int], e: int, g: Sequence[int], p: int) -> list[int]:
    """a^e mod g by binary exponentiation."""
    result = [1 % p]
    base = rem(a, g, p)
    while e:
        if e & 1:
            result = rem(mul(result, base, p), g, p)
        base = rem(mul(base, base, p), g, p)
        e >>= 1
    return result


def deriv(a: Sequence[int], p: int) -> list[int]:
    return trim([i * c % p for i, c in enumerate(a)][1:])


def eval_poly(a: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(list(a)):
        acc = (acc * x + c) % p
    return acc


def distinct_root_count(g: Sequence[int], p: int) -> int:
    """Number of roots of g in F_p, i.e. deg gcd(g, t^p - t).

    g must be nonzero; t^p is reduced mod g by repeated squaring so the
    cost is O(log p) small-degree multiplications.
    """
    g = monic(g, p)
    if len(g) - 1 <= 0:
        return 0
    tp = powmod([0, 1], p, g, p)
    return degree(gcd_poly(sub(tp, [0, 1], p), g, p))


def _pth_root(a: Sequence[int], p: int) -> list[int]:
    # a = h(t^p) = h(t)^p over F_p; Frobenius fixes the prime field, so
    # h just takes every p-th coefficient.
    return trim([a[i] for i in range(0, len(a), p)])


def _edf(f: list[int], d: int, p: int, rng: random.Random) -> list[list[int]]:
    # Cantor-Zassenhaus equal-degree splitting; f squarefree with all
    # irreducible factors of degree d, p odd.
    n = degree(f)
    if n == d:
        return [monic(f, p)]
    half = (p ** d - 1) // 2
    while True:
        a = trim([rng.randrange(p) for _ in range(n)])
        if degree(a) < 1:
            continue
        g = gcd_poly(a, f, p)
        if 0 < degree(g) < n:
            break
        b = powmod(a, half, f, p)
        g = gcd_poly(sub(b, [1], p), f, p)
        if 0 < degree(g) < n:
            break
    other = divmod_poly(f, g, p)[0]
    return _edf(g, d, p, rng) + _edf(other, d, p, rng)


def _factor_squarefree(f: list[int], p: int, rng: random.Random) -> list[list[int]]:
    # distinct-degree then equal-degree factorization of squarefree f
    out: list[list[int]] = []
    f = monic(f, p)
    h = [0, 1]
    d = 0
    while degree(f) >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, f, p)
        part = gcd_poly(sub(h, [0, 1], p), f, p)
        if degree(part) > 0:
            out.extend(_edf(part, d, p, rng))
            f = divmod_poly(f, part, p)[0]
            h = rem(h, f, p)
    if degree(f) >= 1:
        out.append(f)
    return out


def distinct_irreducible_factors(g: Sequence[int], p: int, seed: int = 1) -> list[list[int]]:
    """Distinct monic irreducible factors of g over F_p (p odd).

    Multiplicities are dropped.  Repeated-factor layers are peeled with
    gcd(g, g'); a vanishing derivative means g is a p-th power and the
    root is extracted coefficientwise.
    """
    if is_zero(g):
        raise ValueError("cannot factor the zero polynomial")
    if p == 2:
        raise ValueError("factorization requires p odd")
    rng = random.Random(seed)
    g = monic(g, p)
    found: list[list[int]] = []
    while degree(g) >= 1:
        d = deriv(g, p)
        if is_zero(d):
            g = _pth_root(g, p)
            continue
        sf = divmod_poly(g, gcd_poly(g, d, p), p)[0]
        for q in _factor_squarefree(sf, p, rng):
            if q not in found:
                found.append(q)
            while True:
                quo, r = divmod_poly(g, q, p)
                if r:
                    break
                g = quo
    return found


def inv_mod(a: Sequence[int], g: Sequence[int], p: int) -> list[int]:
    """Inverse of a modulo g, when gcd(a, g) = 1."""
    r0, r1 = list(monic(g, p)), rem(a, g, p)
    s0, s1 = [], [1]
    while r1:
        q, r = divmod_poly(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
    if degree(r0) != 0:
        raise ValueError("element not invertible modulo g")
    return scale(s0, pow(r0[0], -1, p), p)


class ExtField:
    """F_p[y]/(q(y)) for monic irreducible q; elements are int tuples of len deg q."""

    def __init__(self, p: int, modulus: Sequence[int]):
        self.p = p
        self.modulus = monic(modulus, p)
        self.deg = degree(self.modulus)
        if self.deg < 1:
            raise ValueError("modulus must be nonconstant")
        self.zero = (0,) * self.deg
        self.one = tuple([1] + [0] * (self.deg - 1))

    def from_poly(self, a: Sequence[int]) -> tuple[int, ...]:
        r = rem(a, self.modulus, self.p)
        return tuple(r + [0] * (self.deg - len(r)))

    def from_int(self, c: int) -> tuple[int, ...]:
        return self.from_poly([c % self.p])

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def mul(self, a, b):
        return self.from_poly(mul(list(a), list(b), self.p))

    def inv(self, a):
        return self.from_poly(inv_mod(list(a), self.modulus, self.p))

    def is_zero(self, a) -> bool:
        return not any(a)


def ext_trim(a: list, K: ExtField) -> list:
    while a and K.is_zero(a[-1]):
        a.pop()
    return a


def ext_rem(a: list, b: list, K: ExtField) -> list:
    r = ext_trim(list(a), K)
    db = len(b) - 1
    inv_lead = K.inv(b[-1])
    while len(r) - 1 >= db:
        c = K.mul(r[-1], inv_lead)
        k = len(r) - 1 - db
        for i, bc in enumerate(b):
            r[k + i] = K.sub(r[k + i], K.mul(c, bc))
        ext_trim(r, K)
    return r


def ext_gcd(a: list, b: list, K: ExtField) -> list:
    """Gcd in K[x] for an extension field K, monic unless zero."""
    a, b = ext_trim(list(a), K), ext_trim(list(b), K)
    while b:
        a, b = b, ext_rem(a, b, K)
    if a:
        inv_lead = K.inv(a[-1])
        a = [K.mul(c, inv_lead) for c in a]
    return a
