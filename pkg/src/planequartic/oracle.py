"""Ground-truth oracles: direct expansions, enumerative counts, Newton lift.

Everything here is deliberately independent of the engine modules: no
shared code beyond scalar arithmetic, so agreement between an oracle and
the pipeline is evidence rather than tautology.  Budgets are enforced
(these are small-p tools); exceeding one raises BudgetError.

Homogeneous trivariate polynomials mod p live on 2D integer grids
A[a][b] = coefficient of x0^a x1^b x2^(deg-a-b).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import gmpy2
import numpy as np

from .algebra import lex_monomials
from .curve import CurveModP

BRUTE_FORCE_MAX_P = 256
ENUM_BUDGET = 10 ** 7


class BudgetError(ValueError):
    """Requested oracle computation exceeds the configured budget."""


def _grid(c: CurveModP) -> np.ndarray:
    a = np.zeros((5, 5), dtype=np.int64)
    for e, v in zip(lex_monomials(4), c.coeffs):
        a[e[0], e[1]] = v % c.p
    return a


def _grid_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Sparse iterated product: shift-and-add over the nonzero cells of b."""
    da, db = a.shape[0] - 1, b.shape[0] - 1
    out = np.zeros((da + db + 1, da + db + 1), dtype=np.int64)
    for i, j in zip(*np.nonzero(b)):
        out[i:i + da + 1, j:j + da + 1] += b[i, j] * a
        out %= p
    return out


def power_coeff_bruteforce(c: CurveModP, e: int, v, l: int):
    """Restriction of f^e to D(v, l) by iterated sparse multiplication.

    Returns coefficients over lex_monomials(l) offsets u (value at
    exponent v - u; zero when any coordinate goes negative).
    """
    p = c.p
    if e * 4 > 1200:
        raise BudgetError(f"exponent {e} beyond the iterated-expansion budget")
    f = _grid(c)
    acc = np.zeros((1, 1), dtype=np.int64)
    acc[0, 0] = 1 % p
    for _ in range(e):
        acc = _grid_mul(acc, f, p)
    deg = 4 * e
    out = []
    for u in lex_monomials(l):
        a, b, cc = v[0] - u[0], v[1] - u[1], v[2] - u[2]
        if a < 0 or b < 0 or cc < 0 or a + b + cc != deg:
            out.append(0)
        else:
            out.append(int(acc[a, b]) if a <= deg and b <= deg else 0)
    return out


def _pack_int(a: np.ndarray, stride: int) -> int:
    flat = np.zeros(a.shape[0] * stride, dtype=np.uint64)
    for i in range(a.shape[0]):
        flat[i * stride: i * stride + a.shape[1]] = a[i].astype(np.uint64)
    return int.from_bytes(flat.tobytes(), "little")


def _unpack_int(x: int, rows: int, stride: int, p: int) -> np.ndarray:
    raw = x.to_bytes(rows * stride * 8 + 16, "little")
    flat = np.frombuffer(raw[: rows * stride * 8], dtype=np.uint64)
    out = flat.reshape(rows, stride).astype(np.int64) % p
    return out


def _square_grid(a: np.ndarray, p: int) -> np.ndarray:
    """Square a homogeneous 2D coefficient grid via Kronecker packing."""
    d = a.shape[0] - 1
    stride = 2 * d + 1
    packed = _pack_int(a, stride)
    sq = gmpy2.mpz(packed)
    sq = sq * sq
    return _unpack_int(int(sq), 2 * d + 1, stride, p)[:, :stride]


def expand_power(c: CurveModP, e: int) -> np.ndarray:
    """f^e as a 2D grid, by repeated squaring with Kronecker substitution."""
    if e == 0:
        one = np.zeros((1, 1), dtype=np.int64)
        one[0, 0] = 1 % c.p
        return one
    f = _grid(c)
    result = None
    for bit in bin(e)[2:]:
        if result is not None:
            result = _square_grid(result, c.p)
        if bit == "1":
            result = f if result is None else _grid_mul(result, f, c.p)
    return result


def cartier_manin_bruteforce(c: CurveModP, p: int | None = None):
    """The 3x3 matrix of f^(p-1) coefficients, by direct expansion.

    Expands f^((p-1)/2) by repeated squaring and reads each of the nine
    target coefficients off the final square as a convolution sum, so
    the largest multiplication never materializes.
    """
    p = c.p if p is None else p
    if p != c.p:
        raise ValueError("prime disagrees with the curve's field")
    if p > BRUTE_FORCE_MAX_P:
        raise BudgetError(f"p = {p} beyond brute-force budget {BRUTE_FORCE_MAX_P}")
    targets = [[(p - 1, p - 1), (2 * p - 1, p - 1), (p - 1, 2 * p - 1)],
               [(p - 2, p - 1), (2 * p - 2, p - 1), (p - 2, 2 * p - 1)],
               [(p - 1, p - 2), (2 * p - 1, p - 2), (p - 1, 2 * p - 2)]]
    if p == 2:
        g = _grid(c)
        return [[int(g[a, b]) for (a, b) in row] for row in targets]
    half = expand_power(c, (p - 1) // 2)
    d = half.shape[0] - 1
    out = []
    for row in targets:
        orow = []
        for (ta, tb) in row:
            alo, ahi = max(0, ta - d), min(d, ta)
            blo, bhi = max(0, tb - d), min(d, tb)
            if alo > ahi or blo > bhi:
                orow.append(0)
                continue
            block = half[alo:ahi + 1, blo:bhi + 1]
            flipped = half[ta - ahi: ta - alo + 1, tb - bhi: tb - blo + 1]
            # residues are < 2^17 here, so int64 accumulation cannot overflow
            val = int(np.sum(block * flipped[::-1, ::-1])) % p
            orow.append(val)
        out.append(orow)
    return out


# ---------------------------------------------------------------------------
# extension-field point counts


def _find_irreducible(p: int, r: int):
    """Smallest monic degree-r polynomial with no root in F_p (r <= 3)."""
    if r == 1:
        return [0, 1]
    for tail in range(p ** r):
        coeffs = [(tail // p ** i) % p for i in range(r)] + [1]
        if all(sum(cf * pow(x, i, p) for i, cf in enumerate(coeffs)) % p
               for x in range(p)):
            return coeffs
    raise ArithmeticError("no irreducible found (impossible for prime p)")


@lru_cache(maxsize=8)
def _field_tables(p: int, r: int):
    """Add/mul tables for F_{p^r}; elements are base-p digit encodings."""
    q = p ** r
    digits = np.zeros((q, r), dtype=np.int64)
    for i in range(r):
        digits[:, i] = (np.arange(q) // p ** i) % p
    weights = p ** np.arange(r)
    add = ((digits[:, None, :] + digits[None, :, :]) % p @ weights)
    irr = _find_irreducible(p, r)
    # reduction of y^k (k < 2r-1) to a degree-<r vector
    red = np.zeros((2 * r - 1, r), dtype=np.int64)
    for k in range(r):
        red[k, k] = 1
    for k in range(r, 2 * r - 1):
        # y^k = y * y^(k-1), then reduce the top digit through irr
        carry = np.zeros(r + 1, dtype=np.int64)
        carry[1:] = red[k - 1]
        top = carry[r]
        carry = carry[:r]
        carry = (carry - top * np.array(irr[:r])) % p
        red[k] = carry
    conv = np.einsum("ai,bj->abij", digits, digits)
    prod = np.zeros((q, q, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            prod = (prod + conv[:, :, i, j, None] * red[i + j][None, None, :]) % p
    mul = prod @ weights
    return add.astype(np.int64), mul.astype(np.int64)


def count_points_ext(c: CurveModP, p: int, r: int) -> int:
    """#X(F_{p^r}) by chartwise enumeration over explicit field tables."""
    if r < 1 or r > 3:
        raise ValueError("extension degree must be 1, 2 or 3")
    if p != c.p:
        raise ValueError("prime disagrees with the curve's field")
    q = p ** r
    if q * q > ENUM_BUDGET:
        raise BudgetError(f"q^2 = {q * q} beyond enumeration budget {ENUM_BUDGET}")
    add, mul = _field_tables(p, r)
    consts = [v % p for v in c.coeffs]  # prime-field scalars embed as digits

    def powers(vals):
        out = [np.full(vals.shape, 1, dtype=np.int64), vals.astype(np.int64)]
        for _ in range(3):
            out.append(mul[out[-1], vals])
        return out

    def evaluate(xs, ys, zs):
        # all three argument arrays share a shape; returns f(x,y,z) encoded
        powx, powy, powz = powers(xs), powers(ys), powers(zs)
        acc = np.zeros(xs.shape, dtype=np.int64)
        for (a, b, cc), cf in zip(lex_monomials(4), consts):
            if not cf:
                continue
            term = mul[powx[a], powy[b]]
            term = mul[term, powz[cc]]
            term = mul[term, np.full_like(term, cf)]
            acc = add[acc, term]
        return acc

    total = 0
    ys, zs = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    ones = np.ones_like(ys)
    total += int(np.count_nonzero(evaluate(ones, ys, zs) == 0))
    zs1 = np.arange(q)
    total += int(np.count_nonzero(
        evaluate(np.zeros_like(zs1), np.ones_like(zs1), zs1) == 0))
    point = evaluate(np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64),
                     np.ones(1, dtype=np.int64))
    total += int(point[0] == 0)
    return total


# ---------------------------------------------------------------------------
# L-polynomial from counts


@dataclass(frozen=True)
class ZetaCounts:
    p: int
    n1: int
    n2: int
    n3: int


def lpoly_from_counts(z: ZetaCounts):
    """All 7 coefficients of L_p(T) from exact counts via Newton's identities.

    s_r = p^r + 1 - N_r are the power sums of the inverse roots; the
    elementary symmetric functions give a1, a2, a3 and the functional
    equation fills in the rest.
    """
    p = z.p
    s1 = p + 1 - z.n1
    s2 = p * p + 1 - z.n2
    s3 = p ** 3 + 1 - z.n3
    e1 = s1
    e2, rem = divmod(e1 * s1 - s2, 2)
    if rem:
        raise ArithmeticError("Newton identity parity violated; counts inconsistent")
    e3, rem = divmod(e2 * s1 - e1 * s2 + s3, 3)
    if rem:
        raise ArithmeticError("Newton identity divisibility violated; counts inconsistent")
    a1, a2, a3 = -e1, e2, -e3
    return [1, a1, a2, a3, p * a2, p * p * a1, p ** 3]
