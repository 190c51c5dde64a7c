"""Per-prime Cartier-Manin computation in softly linear time.

For one good prime p the pipeline is: edge power series give the
restriction of f^(p-2) to the three source frames, the product
C_p = M(p-2) ... M(0) of specialized shift operators carries them to the
target frames, and the convolution rows of the projection then read off
the nine coefficients of f^(p-1) that form the matrix.  One product
serves all three columns: the second journey runs the same line
backwards, so it uses the inverse.

Bad or borderline primes take slower routes: a rank-respecting direct
build of the tower over F_p, a randomized change of model, or (p = 2) a
coefficient read-off.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import cached_property
from math import isqrt

import numpy as np

from .algebra import (
    SingularMatrixError,
    eval_sym,
    fp_mat_inverse,
    fp_mat_rank,
    lex_monomials,
    mat_identity,
    mat_mul,
    mat_vec,
    mono_index,
    uni_eval,
)
from .curve import (
    BadPrimeData,
    CurveModP,
    DegenerateCurveError,
    QuarticCurve,
    bad_prime_multiple,
    discriminant_exact,
    naive_count,
    nondegenerate_modp,
    random_good_model,
    reduce_curve,
)
from .transition import (
    ShiftFamily,
    build_family,
    build_Qg,
    specialize_M,
    specialize_tau,
)

# Above this bound the int64 dot products inside the numpy stepping loop
# could overflow; fall back to arbitrary precision integers.
NUMPY_PRIME_BOUND = 1 << 29

# Weil bound 6 sqrt(p) drops below p/2 past this point, making the trace
# lift to a_p unique.
UNIQUE_LIFT_BOUND = 144

_D2 = lex_monomials(2)
_D6 = lex_monomials(6)
_I2 = {m: i for i, m in enumerate(_D2)}
_I6 = mono_index(6)


@dataclass(frozen=True)
class CartierManinResult:
    """One prime's output: the matrix and everything derived from it."""

    p: int
    matrix: tuple          # 3x3 mod p
    trace: int             # canonical residue in [0, p)
    a_p: int | None        # integer Frobenius trace, when determined
    count: int | None      # #X(F_p)
    lpoly: tuple           # det(I - T A) mod p padded to degree 6
    rank: int
    p_rank: int
    route: str             # "compressed", "uncompressed", "direct", "readoff"
    model: CurveModP       # the model actually used (may be transformed)


class AmbiguousTraceError(ValueError):
    """Trace residue does not determine a_p and no count was supplied."""


# ---------------------------------------------------------------------------
# edge power series -> source-frame vectors


def _mat_pow(q, e: int, p: int):
    """Q^e by repeated squaring (e >= 1)."""
    acc, base = None, q
    while e:
        if e & 1:
            acc = base if acc is None else mat_mul(acc, base, p)
        e >>= 1
        if e:
            base = mat_mul(base, base, p)
    return acc


def edge_block_vectors(c: CurveModP):
    """The three 28-long restriction blocks of f^(p-2) at the source frames.

    Each lives on one coordinate edge, so only the seven offsets along
    that edge are nonzero; series coefficients of the reciprocal edge
    square supply them.
    """
    p = c.p
    f040 = c.coeff((0, 4, 0)) % p
    f031 = c.coeff((0, 3, 1)) % p
    f400 = c.coeff((4, 0, 0)) % p
    if f040 == 0 or f400 == 0:
        raise DegenerateCurveError("corner coefficient vanishes mod p")
    q1 = build_Qg(c, "f01t")
    q2 = build_Qg(c, "f10t")
    e1 = [1] + [0] * 7
    qp = _mat_pow(q1, p - 1, p)
    v_p1 = mat_vec(qp, e1, p)
    # Q^(2p-1) e_1 through the power already at hand
    v_2p1 = mat_vec(qp, mat_vec(qp, mat_vec(q1, e1, p), p), p)
    w_p1 = mat_vec(_mat_pow(q2, p - 1, p), e1, p)

    inv040 = pow(f040, -1, p)
    inv400 = pow(f400, -1, p)
    blk1 = [0] * 28
    blk2 = [0] * 28
    blk3 = [0] * 28
    for j in range(7):
        col_edge = _I6[(0, 6 - j, j)]
        col_mid = _I6[(6 - j, 0, j)]
        blk1[col_edge] = (f031 * inv040 * inv040 % p * v_p1[j]
                          + inv040 * v_2p1[j]) % p
        blk2[col_mid] = inv400 * w_p1[j] % p
        blk3[col_edge] = inv040 * v_p1[j] % p
    return blk1, blk2, blk3


# ---------------------------------------------------------------------------
# the specialized operator product


def _triples_to_arrays(m_line):
    n = len(m_line)
    c0 = np.zeros((n, n), dtype=np.int64)
    c1 = np.zeros((n, n), dtype=np.int64)
    c2 = np.zeros((n, n), dtype=np.int64)
    for i, row in enumerate(m_line):
        for j, (a, b, c) in enumerate(row):
            c0[i, j], c1[i, j], c2[i, j] = a, b, c
    return c0, c1, c2


def _product_numpy(m_line, steps: int, p: int):
    c0, c1, c2 = _triples_to_arrays(m_line)
    val = c0 % p
    diff = (c1 + c2) % p
    ddiff = (2 * c2) % p
    acc = np.eye(len(m_line), dtype=np.int64)
    for _ in range(steps):
        acc = (val @ acc) % p
        val = (val + diff) % p
        diff = (diff + ddiff) % p
    return [[int(x) for x in row] for row in acc]


def _product_bigint(m_line, steps: int, p: int):
    acc = mat_identity(len(m_line))
    for j in range(steps):
        acc = mat_mul(uni_eval(m_line, j, p), acc, p)
    return acc


def operator_product(m_line, steps: int, p: int):
    """M(steps-1) ... M(1) M(0) mod p, stepping values by finite differences."""
    if p < NUMPY_PRIME_BOUND:
        return _product_numpy(m_line, steps, p)
    return _product_bigint(m_line, steps, p)


def compute_Cp(family: ShiftFamily, p: int):
    m_line = specialize_M(family.T, "modp", p)
    return operator_product(m_line, p - 1, p)


# ---------------------------------------------------------------------------
# assembling the matrix

# target-frame offsets of the nine matrix entries: row r of each column
# block sits at these positions of the degree-2 offset list
_COL_OFFSETS = [
    [_I2[(0, 1, 1)], _I2[(1, 1, 0)], _I2[(0, 2, 0)]],   # column 1
    [_I2[(1, 0, 1)], _I2[(2, 0, 0)], _I2[(1, 1, 0)]],   # column 2
    [_I2[(0, 1, 1)], _I2[(1, 1, 0)], _I2[(0, 2, 0)]],   # column 3
]


def _assemble(cols):
    a = [[0] * 3 for _ in range(3)]
    for j in range(3):
        for i in range(3):
            a[i][j] = cols[j][_COL_OFFSETS[j][i]]
    return tuple(tuple(r) for r in a)


def cartier_manin_from_Cp(c: CurveModP, family: ShiftFamily, cp):
    """Read the matrix off the transported source vectors."""
    p = c.p
    blk1, blk2, blk3 = edge_block_vectors(c)
    pi = [[x % p for x in row] for row in family.pi]
    y_w1 = mat_vec(pi, blk1, p)
    y_w2 = mat_vec(pi, blk2, p)
    y_w3 = mat_vec(pi, blk3, p)
    cp_inv = fp_mat_inverse(cp, p)
    col1 = [(-x) % p for x in mat_vec(cp, y_w1, p)]
    col2 = [(-x) % p for x in mat_vec(cp_inv, y_w2, p)]
    col3 = [(-x) % p for x in mat_vec(cp, y_w3, p)]
    return _assemble((col1, col2, col3))


def cartier_manin_direct(c: CurveModP):
    """Tower built over F_p itself; works whenever the reduction is good."""
    family = build_family(c)
    cp = compute_Cp(family, c.p)
    return cartier_manin_from_Cp(c, family, cp), family


def uncompressed_cartier_manin(c: CurveModP, family: ShiftFamily):
    """Same matrix via raw 28x28 shift products, skipping the compression.

    The second column needs one compressed round trip through the
    product's section-projection sandwich, inverted as a 16x16 matrix;
    no 16x16 operator product is ever formed.
    """
    p = c.p
    lam6 = family.lam6 % p
    tau_line = specialize_tau(family.tau, "modp", p)
    u_p = operator_product(tau_line, p - 1, p)
    blk1, blk2, blk3 = edge_block_vectors(c)
    pi = [[x % p for x in row] for row in family.pi]
    col1 = [(-x) % p for x in mat_vec(pi, mat_vec(u_p, blk1, p), p)]
    col3 = [(-x) % p for x in mat_vec(pi, mat_vec(u_p, blk3, p), p)]
    # psi at the line start; the sandwich pi U psi equals -lam6 C_p
    psi_start = eval_sym(family.psi, {"v0": 0, "v1": 2 * p - 1,
                                      "v2": 2 * p - 1, "m": p - 2}, p)
    sandwich = mat_mul(mat_mul(pi, u_p, p), psi_start, p)
    y_w2 = mat_vec(pi, blk2, p)
    col2 = mat_vec(fp_mat_inverse(sandwich, p), y_w2, p)
    col2 = [lam6 * x % p for x in col2]
    return _assemble((col1, col2, col3))


# ---------------------------------------------------------------------------
# derived quantities


def lpoly_modp(matrix, p: int):
    """det(I - T A) mod p, padded with the three zero high coefficients."""
    a = matrix
    tr = sum(a[i][i] for i in range(3))
    e2 = sum(a[i][i] * a[j][j] - a[i][j] * a[j][i]
             for i in range(3) for j in range(i + 1, 3))
    det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
           - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
           + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    return (1 % p, (-tr) % p, e2 % p, (-det) % p, 0, 0, 0)


def ap_from_trace(trace: int, p: int, count: int | None = None) -> int:
    """Lift the trace residue to the integer a_p.

    Unique from the Weil bound once 6 sqrt(p) < p/2; smaller primes need
    the point count to break the tie.
    """
    if count is not None:
        a = p + 1 - count
        if (a - trace) % p:
            raise ArithmeticError(
                f"count {count} contradicts trace {trace} mod {p}")
        return a
    if p <= UNIQUE_LIFT_BOUND:
        raise AmbiguousTraceError(
            f"p = {p} needs a point count to pin down a_p")
    bound = isqrt(36 * p)
    t = trace % p
    for cand in (t, t - p):
        if -bound <= cand <= bound:
            return cand
    raise ArithmeticError(f"no trace lift within the Weil bound at p = {p}")


def matrix_ranks(matrix, p: int):
    a = [[x % p for x in row] for row in matrix]
    a3 = mat_mul(mat_mul(a, a, p), a, p)
    return fp_mat_rank(a, p), fp_mat_rank(a3, p)


def _finish(c: CurveModP, matrix, route: str) -> CartierManinResult:
    p = c.p
    trace = sum(matrix[i][i] for i in range(3)) % p
    if p <= UNIQUE_LIFT_BOUND:
        count = naive_count(c)
        a_p = ap_from_trace(trace, p, count)
    else:
        a_p = ap_from_trace(trace, p)
        count = p + 1 - a_p
    rank, rank3 = matrix_ranks(matrix, p)
    return CartierManinResult(p, matrix, trace, a_p, count,
                              lpoly_modp(matrix, p), rank, rank3, route, c)


def _readoff_matrix(c: CurveModP):
    """f^(p-1) = f when p = 2, so the nine entries are curve coefficients."""
    p = c.p
    targets = [[(p - 1, p - 1, 2 * p - 2), (2 * p - 1, p - 1, p - 2),
                (p - 1, 2 * p - 1, p - 2)],
               [(p - 2, p - 1, 2 * p - 1), (2 * p - 2, p - 1, p - 1),
                (p - 2, 2 * p - 1, p - 1)],
               [(p - 1, p - 2, 2 * p - 1), (2 * p - 1, p - 2, p - 1),
                (p - 1, 2 * p - 2, p - 1)]]
    return tuple(tuple(c.coeff(t) % p for t in row) for row in targets)


# ---------------------------------------------------------------------------
# per-curve context and the public entry point


class CurveContext:
    """Caches the rational tower and bad-prime data for one curve."""

    def __init__(self, curve: QuarticCurve):
        self.curve = curve

    @cached_property
    def family(self) -> ShiftFamily:
        return build_family(self.curve)

    @cached_property
    def bad_data(self) -> BadPrimeData:
        fam = self.family
        return bad_prime_multiple(self.curve, fam.lam6, fam.basis.minor)

    @cached_property
    def disc(self) -> int:
        return discriminant_exact(self.curve)

    def is_good(self, p: int) -> bool:
        return p > 2 and self.bad_data.D % p != 0

    def result_from_Cp(self, p: int, cp) -> CartierManinResult:
        """Finish a good prime whose operator product came from elsewhere."""
        c = reduce_curve(self.curve, p)
        matrix = cartier_manin_from_Cp(c, self.family, cp)
        return _finish(c, matrix, "compressed")

    def good_result(self, p: int) -> CartierManinResult:
        return self.result_from_Cp(p, compute_Cp(self.family, p))


def _fallback_modp(c: CurveModP, seed: int = 0) -> CartierManinResult:
    """Reduction is smooth but some rational invariant degenerates mod p.

    When the reduction itself is nondegenerate the tower rebuilds over
    F_p; otherwise hunt for a model in the same projective class whose
    tower exists.  A transformed model changes the reported matrix but
    not its conjugacy invariants.
    """
    if nondegenerate_modp(c):
        matrix, _ = cartier_manin_direct(c)
        return _finish(c, matrix, "direct")
    model = random_good_model(c, seed=seed)
    matrix, _ = cartier_manin_direct(model)
    return _finish(model, matrix, "direct")


def uncompressed_result(curve, p: int | None = None,
                        context: CurveContext | None = None,
                        seed: int = 0) -> CartierManinResult:
    """Same routing as cartier_manin_modp, but through the 28x28 product.

    p = 2 still reads coefficients off directly; there is nothing to
    decompress in a one-step product.
    """
    if isinstance(curve, QuarticCurve):
        if p is None:
            raise ValueError("p is required with a rational model")
        ctx = context if context is not None else CurveContext(curve)
        if p == 2:
            return cartier_manin_modp(curve, 2, context=ctx, seed=seed)
        if ctx.is_good(p):
            c = reduce_curve(curve, p)
            matrix = uncompressed_cartier_manin(c, ctx.family)
            return _finish(c, matrix, "uncompressed")
        if ctx.disc % p == 0:
            raise DegenerateCurveError(f"curve is singular mod {p}")
        c = reduce_curve(curve, p)
    else:
        c = curve
        if p is not None and p != c.p:
            raise ValueError("prime disagrees with the reduction")
        if c.p == 2:
            return cartier_manin_modp(c, seed=seed)
    model = c if nondegenerate_modp(c) else random_good_model(c, seed=seed)
    family = build_family(model)
    matrix = uncompressed_cartier_manin(model, family)
    return _finish(model, matrix, "uncompressed")


def cartier_manin_modp(curve, p: int | None = None,
                       context: CurveContext | None = None,
                       seed: int = 0) -> CartierManinResult:
    """The matrix of f^(p-1) coefficients for one curve at one prime.

    Accepts a rational model (QuarticCurve, p required) or a reduction
    (CurveModP).  Routes through the fast compressed product at good
    primes and through mod-p rebuilds or model changes otherwise.
    Raises DegenerateCurveError for genuinely bad reduction.
    """
    if isinstance(curve, QuarticCurve):
        if p is None:
            raise ValueError("p is required with a rational model")
        ctx = context if context is not None else CurveContext(curve)
        if p == 2:
            if ctx.disc % 2 == 0:
                raise DegenerateCurveError("curve is singular mod 2")
            c2 = reduce_curve(curve, 2)
            return _finish(c2, _readoff_matrix(c2), "readoff")
        if ctx.is_good(p):
            # goodness already implies smooth reduction: the bad-prime
            # product is divisible by every prime of singular reduction
            return ctx.good_result(p)
        if ctx.disc % p == 0:
            raise DegenerateCurveError(f"curve is singular mod {p}")
        return _fallback_modp(reduce_curve(curve, p), seed=seed)
    c: CurveModP = curve
    if p is not None and p != c.p:
        raise ValueError("prime disagrees with the reduction")
    p = c.p
    if p == 2:
        lift = QuarticCurve(tuple(int(x) % 2 for x in c.coeffs))
        if discriminant_exact(lift) % 2 == 0:
            raise DegenerateCurveError("curve is singular mod 2")
        return _finish(c, _readoff_matrix(c), "readoff")
    return _fallback_modp(c, seed=seed)
