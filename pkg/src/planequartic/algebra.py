"""Exact arithmetic substrate shared by the whole package.

Conventions used everywhere:

* Monomials in (x0, x1, x2) are exponent triples (a, b, c).  Degree-l
  monomials are ordered lexicographically descending with x0 > x1 > x2,
  and positions are 0-based.  Consumers resolve entries by exponent
  triple, never by list position.
* Symbolic polynomials in the four variables (v0, v1, v2, m) of total
  degree <= 2 are dense 15-tuples of integer coefficients over the
  fixed basis SYM_MONOMIALS.
* Univariate quadratics in t are triples (c0, c1, c2) meaning
  c0 + c1*t + c2*t**2.
* Matrices are lists of row lists (entries: ints, or the tuples above).
  No floating point anywhere; everything is exact.
"""

from __future__ import annotations

import functools
from fractions import Fraction


class SingularMatrixError(ValueError):
    """Raised when a matrix expected to be invertible mod p is not."""


# ---------------------------------------------------------------------------
# monomial enumeration


@functools.lru_cache(maxsize=None)
def lex_monomials(l):
    """All exponent triples of total degree l, lex descending (x0 > x1 > x2)."""
    if l < 0:
        raise ValueError("degree must be nonnegative")
    out = []
    for a in range(l, -1, -1):
        for b in range(l - a, -1, -1):
            out.append((a, b, l - a - b))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def mono_index(l):
    """Position map for lex_monomials(l): exponent triple -> 0-based index."""
    return {u: i for i, u in enumerate(lex_monomials(l))}


# ---------------------------------------------------------------------------
# symbolic polynomials of degree <= 2 in (v0, v1, v2, m)

_VARS = ("v0", "v1", "v2", "m")

# constant, the four linear terms, then the ten quadratics.
SYM_MONOMIALS = ((0, 0, 0, 0),
                 (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
                 (2, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0), (1, 0, 0, 1),
                 (0, 2, 0, 0), (0, 1, 1, 0), (0, 1, 0, 1),
                 (0, 0, 2, 0), (0, 0, 1, 1),
                 (0, 0, 0, 2))

_SYM_INDEX = {e: i for i, e in enumerate(SYM_MONOMIALS)}
_NSYM = len(SYM_MONOMIALS)

SYM_ZERO = (0,) * _NSYM


def _sym_mul_table():
    table = {}
    for i, ei in enumerate(SYM_MONOMIALS):
        for j, ej in enumerate(SYM_MONOMIALS):
            e = tuple(a + b for a, b in zip(ei, ej))
            if sum(e) <= 2:
                table[i, j] = _SYM_INDEX[e]
    return table


_MUL = _sym_mul_table()


def sym_const(c):
    return (c,) + (0,) * (_NSYM - 1)


def sym_var(name):
    i = _VARS.index(name)
    out = [0] * _NSYM
    out[1 + i] = 1
    return tuple(out)


def sym_add(p, q):
    return tuple(a + b for a, b in zip(p, q))


def sym_sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def sym_scale(c, p):
    return tuple(c * a for a in p)


def sym_mul(p, q):
    """Product of two symbolic polynomials; the result must stay degree <= 2."""
    out = [0] * _NSYM
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if not b:
                continue
            k = _MUL.get((i, j))
            if k is None:
                raise ValueError("symbolic product exceeds degree 2")
            out[k] += a * b
    return tuple(out)


def sym_degree(p):
    deg = -1
    for c, e in zip(p, SYM_MONOMIALS):
        if c:
            deg = max(deg, sum(e))
    return deg


def sym_eval(p, v0, v1, v2, m):
    vals = (v0, v1, v2, m)
    total = 0
    for c, e in zip(p, SYM_MONOMIALS):
        if not c:
            continue
        term = c
        for x, k in zip(vals, e):
            for _ in range(k):
                term *= x
        total += term
    return total


def sym_subst_line(p, base, direction, m_value):
    """Substitute v = base + t*direction, m = m_value; return (c0, c1, c2) in t."""
    lin = [(b, d) for b, d in zip(base, direction)] + [(m_value, 0)]
    out = [0, 0, 0]
    for c, e in zip(p, SYM_MONOMIALS):
        if not c:
            continue
        # product of the (b + d*t) factors named by the exponent vector
        acc = [c, 0, 0]
        for (b, d), k in zip(lin, e):
            for _ in range(k):
                acc = [acc[0] * b,
                       acc[0] * d + acc[1] * b,
                       acc[1] * d + acc[2] * b]
        out[0] += acc[0]
        out[1] += acc[1]
        out[2] += acc[2]
    return tuple(out)


# ---------------------------------------------------------------------------
# symbolic matrices (lists of rows of 15-tuples)


def sym_mat_mul(a, b):
    bc = list(zip(*b))
    out = []
    for row in a:
        orow = []
        for col in bc:
            acc = SYM_ZERO
            for x, y in zip(row, col):
                if x != SYM_ZERO and y != SYM_ZERO:
                    acc = sym_add(acc, sym_mul(x, y))
            orow.append(acc)
        out.append(orow)
    return out


def sym_mat_degree(s):
    return max(sym_degree(e) for row in s for e in row)


def eval_sym(s, assignment, p=None):
    """Evaluate a SymMatrix entrywise at integer values, optionally mod p.

    assignment maps variable names among v0, v1, v2, m to integers; every
    variable appearing in s must be covered.
    """
    used = set()
    for row in s:
        for e in row:
            for c, mono in zip(e, SYM_MONOMIALS):
                if c:
                    for name, k in zip(_VARS, mono):
                        if k:
                            used.add(name)
    missing = used - set(assignment)
    if missing:
        raise ValueError(f"assignment missing variables: {sorted(missing)}")
    v0 = assignment.get("v0", 0)
    v1 = assignment.get("v1", 0)
    v2 = assignment.get("v2", 0)
    m = assignment.get("m", 0)
    out = []
    for row in s:
        vals = [sym_eval(e, v0, v1, v2, m) for e in row]
        out.append([x % p for x in vals] if p is not None else vals)
    return out


def uni_eval(c, t, p=None):
    """Evaluate a matrix of (c0, c1, c2) univariate entries at integer t."""
    out = []
    for row in c:
        vals = [e[0] + e[1] * t + e[2] * t * t for e in row]
        out.append([x % p for x in vals] if p is not None else vals)
    return out


def finite_diff_stream(s, t0, count, p=None):
    """Yield s(t0), s(t0+1), ..., s(t0+count-1) for a univariate matrix s.

    After initializing value, first- and second-difference rows, each step
    costs only additions; entries reduced mod p when p is given.
    """
    cur = uni_eval(s, t0, p)
    # forward difference of c0 + c1 t + c2 t^2 at t is c1 + c2 (2t+1)
    d1 = [[e[1] + e[2] * (2 * t0 + 1) for e in row] for row in s]
    d2 = [[2 * e[2] for e in row] for row in s]
    if p is not None:
        d1 = [[x % p for x in row] for row in d1]
        d2 = [[x % p for x in row] for row in d2]
    for _ in range(count):
        yield [row[:] for row in cur]
        if p is None:
            cur = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(cur, d1)]
            d1 = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(d1, d2)]
        else:
            cur = [[(a + b) % p for a, b in zip(ra, rb)]
                   for ra, rb in zip(cur, d1)]
            d1 = [[(a + b) % p for a, b in zip(ra, rb)]
                  for ra, rb in zip(d1, d2)]


# ---------------------------------------------------------------------------
# plain integer / prime-field matrices


def mat_identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b, p=None):
    bc = list(zip(*b))
    if p is None:
        return [[sum(x * y for x, y in zip(row, col)) for col in bc]
                for row in a]
    return [[sum(x * y for x, y in zip(row, col)) % p for col in bc]
            for row in a]


def mat_vec(a, v, p=None):
    if p is None:
        return [sum(x * y for x, y in zip(row, v)) for row in a]
    return [sum(x * y for x, y in zip(row, v)) % p for row in a]


def mat_scale(c, a, p=None):
    if p is None:
        return [[c * x for x in row] for row in a]
    return [[c * x % p for x in row] for row in a]


def fp_mat_inverse(mat, p):
    """Gauss-Jordan inverse mod p; raises SingularMatrixError if singular."""
    n = len(mat)
    a = [[x % p for x in row] + [1 if i == j else 0 for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            raise SingularMatrixError(f"matrix singular mod {p}")
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], p - 2, p)
        a[col] = [x * inv % p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def fp_mat_rank(mat, p):
    rows = [[x % p for x in row] for row in mat]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], p - 2, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
        rank += 1
        if r == len(rows):
            break
    return rank


# ---------------------------------------------------------------------------
# exact elimination over Z / Q


def bareiss_det(mat):
    """Exact determinant of an integer matrix, fraction-free."""
    a = [list(row) for row in mat]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = None
            for r in range(k + 1, n):
                if a[r][k]:
                    piv = r
                    break
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rref_fraction(mat, ncols=None):
    """Reduced row echelon form over Q.

    mat entries may be ints or Fractions; only the first ncols columns are
    searched for pivots (the remainder rides along, e.g. an augmentation).
    Returns (rows, pivot_columns).
    """
    rows = [[Fraction(x) for x in row] for row in mat]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rref_modp(mat, p, ncols=None):
    """Reduced row echelon form over F_p; returns (rows, pivot_columns)."""
    rows = [[x % p for x in row] for row in mat]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][col], p - 2, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


# ---------------------------------------------------------------------------
# primes

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, valid far beyond 64-bit inputs."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sieve_primes(n):
    """All primes <= n, ascending."""
    import numpy

    if n < 2:
        return []
    flags = numpy.ones(n + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, int(n ** 0.5) + 1):
        if flags[q]:
            flags[q * q:: q] = False
    return [int(x) for x in numpy.nonzero(flags)[0]]
