"""Shift-operator tower for the Cartier-Manin pipeline.

Everything acts on restriction blocks stored in offset coordinates: a
block G at frame v holds G[u] = G_{v-u} for u in lex_monomials(6), which
makes every operator below structurally independent of v; the frame only
enters through symbolic entries in (v0, v1, v2, m).

The tower, bottom to top:

* the generator matrix has rows x^s * d_i F (d_i = x_i d/dx_i) for
  s in D_2, i in {0,1,2}; its 18 pivot columns determine B6, the 10
  degree-6 monomials that survive modulo the Jacobian ideal (B2 is all
  of D_2: a quartic imposes no degree-2 relations);
* row reduction yields, for every u in D_6, an integral identity
  lam6 * x^u = sum_i h_{u,i} d_i F + sum_{beta in B6} c_{u,beta} x^beta
  with lam6 the lcm of the denominators met on the way;
* pi (16x28, constant) projects a block to 6 convolution coordinates
  plus the 10 basis reads; psi (28x16, degree <= 1 in (v, m)) sections
  back; pi . psi = (m+1) lam6 I;
* phi (36x28, degree <= 1) shifts a block one step in a coordinate
  direction, solving an 8x8 Sylvester system on the far edge; tau is its
  28-row restriction, and T = pi tau psi is the 16x16 operator whose
  univariate specializations M(t) drive both the per-prime product and
  the remainder forest.

Build over Z for curves over Q (the forest needs integer matrices), or
natively over F_p for fallback primes; the code paths are shared, with
lam6 = 1 in the modular case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .algebra import (
    SYM_ZERO,
    bareiss_det,
    lex_monomials,
    mono_index,
    rref_fraction,
    rref_modp,
    sym_add,
    sym_const,
    sym_mat_mul,
    sym_scale,
    sym_sub,
    sym_subst_line,
    sym_var,
)
from .curve import CurveModP, DegenerateCurveError, QuarticCurve

_D2 = lex_monomials(2)
_D3 = lex_monomials(3)
_D4 = lex_monomials(4)
_D6 = lex_monomials(6)
_D7 = lex_monomials(7)
_I6 = mono_index(6)
_I7 = mono_index(7)

W_DIM = 16          # 6 + 10 = dim of the compressed space, equal to 4^2
B6_SIZE = 10


@dataclass(frozen=True)
class BasisData:
    """B6 monomials (ascending column order), generator pivots, pivot minor."""

    b6: tuple
    pivots: tuple
    minor: int


@dataclass(frozen=True)
class CompressionData:
    """lam6 and, per u in D_6, the pair (h_{u,i} coefficients, c_{u,beta})."""

    lam6: int
    entries: tuple   # entries[u_idx] = (h, c): h[i][s_idx] ints, c 10 ints


@dataclass(frozen=True)
class SylvesterData:
    """The 8x8 edge system for one shift direction and its exact adjugate."""

    matrix: tuple
    theta: int
    adjugate: tuple
    direction: tuple


@dataclass(frozen=True)
class ShiftFamily:
    """Everything the engines need for one curve: built over Z (p None) or F_p."""

    pi: tuple
    psi: tuple
    tau: tuple
    T: tuple
    lam6: int
    basis: BasisData
    sylvester: SylvesterData
    p: int | None


def _unpack(c):
    if isinstance(c, CurveModP):
        return c.coeffs, c.p
    return c.coeffs, None


def generator_matrix(coeffs, p=None):
    """18x28 matrix of x^s * d_i F over s in D_2, i in {0,1,2}; d_i = x_i d/dx_i."""
    rows = []
    for i in range(3):
        for s in _D2:
            row = [0] * len(_D6)
            for e, f in zip(_D4, coeffs):
                if f and e[i]:
                    col = _I6[(e[0] + s[0], e[1] + s[1], e[2] + s[2])]
                    row[col] += e[i] * f
            rows.append([x % p for x in row] if p is not None else row)
    return rows


def select_basis(c) -> BasisData:
    """Greedy-lex pivot selection; requires full rank 18 (nondegeneracy)."""
    coeffs, p = _unpack(c)
    gen = generator_matrix(coeffs, p)
    if p is None:
        _, pivots = rref_fraction(gen, ncols=len(_D6))
    else:
        _, pivots = rref_modp(gen, p, ncols=len(_D6))
    if len(pivots) != 18:
        raise DegenerateCurveError(
            f"generator matrix has rank {len(pivots)} < 18; curve degenerate")
    pivot_set = set(pivots)
    b6 = tuple(_D6[j] for j in range(len(_D6)) if j not in pivot_set)
    minor_mat = [[row[j] for j in pivots] for row in gen]
    minor = bareiss_det(minor_mat)
    if p is not None:
        minor %= p
    return BasisData(b6, tuple(pivots), minor)


def compression_data(c, basis: BasisData) -> CompressionData:
    """Integral h and c with lam6 x^u = sum h d_i F + sum c x^beta for all u."""
    coeffs, p = _unpack(c)
    gen = generator_matrix(coeffs, p)
    aug = [row + [1 if r == k else 0 for k in range(18)]
           for r, row in enumerate(gen)]
    if p is None:
        rows, pivots = rref_fraction(aug, ncols=len(_D6))
    else:
        rows, pivots = rref_modp(aug, p, ncols=len(_D6))
    if tuple(pivots) != basis.pivots:
        raise DegenerateCurveError("pivot drift between basis and compression")
    b6_cols = [_I6[b] for b in basis.b6]
    if p is None:
        lam6 = 1
        for r in range(18):
            for x in [rows[r][j] for j in b6_cols] + rows[r][28:]:
                lam6 = lcm(lam6, Fraction(x).denominator)
    else:
        lam6 = 1
    entries = [None] * len(_D6)
    for b_idx, b in enumerate(basis.b6):
        cvec = [0] * B6_SIZE
        cvec[b_idx] = lam6 if p is None else lam6 % p
        entries[_I6[b]] = (((0,) * 6,) * 3, tuple(cvec))
    for r, piv in enumerate(basis.pivots):
        h = [[0] * 6 for _ in range(3)]
        for k in range(18):
            val = rows[r][28 + k] * lam6
            if p is None:
                assert val.denominator == 1, "lam6 failed to clear a denominator"
                val = int(val)
            else:
                val %= p
            h[k // 6][k % 6] = val
        cvec = []
        for j in b6_cols:
            val = -rows[r][j] * lam6
            if p is None:
                assert val.denominator == 1, "lam6 failed to clear a denominator"
                val = int(val)
            else:
                val %= p
            cvec.append(val)
        entries[piv] = (tuple(tuple(x) for x in h), tuple(cvec))
    return CompressionData(lam6, tuple(entries))


def build_pi(c, basis: BasisData):
    """16x28 projection: 6 convolution-with-f rows, then 10 basis reads."""
    coeffs, p = _unpack(c)
    rows = []
    for u in _D2:
        row = [0] * len(_D6)
        for t, f in zip(_D4, coeffs):
            if f:
                col = _I6[(t[0] + u[0], t[1] + u[1], t[2] + u[2])]
                row[col] += f
        rows.append([x % p for x in row] if p is not None else row)
    for b in basis.b6:
        row = [0] * len(_D6)
        row[_I6[b]] = 1
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def build_psi(c, compression: CompressionData, basis: BasisData):
    """28x16 section with degree <= 1 entries in (v0, v1, v2, m)."""
    rows = []
    m_plus_1 = sym_add(sym_var("m"), sym_const(1))
    vs = [sym_var("v0"), sym_var("v1"), sym_var("v2")]
    for u_idx in range(len(_D6)):
        h, cvec = compression.entries[u_idx]
        row = []
        for s_idx, s in enumerate(_D2):
            e = SYM_ZERO
            for i in range(3):
                coeff = h[i][s_idx]
                if coeff:
                    e = sym_add(e, sym_scale(coeff,
                                             sym_sub(vs[i], sym_const(s[i]))))
            row.append(e)
        for b_idx in range(B6_SIZE):
            row.append(sym_scale(cvec[b_idx], m_plus_1))
        rows.append(tuple(row))
    return tuple(rows)


def _adjugate(a):
    """Exact integer adjugate by cofactor expansion; adj(A) A = det(A) I."""
    n = len(a)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[a[r][s] for s in range(n) if s != j]
                     for r in range(n) if r != i]
            out[j][i] = (-1) ** (i + j) * bareiss_det(minor)
    return out


def build_phi(c, i: int = 0, j: int = 1, k: int = 2):
    """36x28 one-step shift in direction i, with j the balancing direction.

    Rows are indexed by lex_monomials(7).  A row at w with w_i >= 1 reads
    the input block directly ((v_i+1) theta delta); the eight rows with
    w_i = 0 are reconstructed through the adjugate of the 8x8 Sylvester
    system of the x_i = 0 edge.  All entries have degree <= 1.
    """
    coeffs, p = _unpack(c)
    idx4 = mono_index(4)

    def f_at(e):
        v = coeffs[idx4[e]]
        return v % p if p is not None else v

    fbar = []
    for b in range(5):
        e = [0, 0, 0]
        e[j], e[k] = b, 4 - b
        fbar.append(f_at(tuple(e)))
    a_mat = [[0] * 8 for _ in range(8)]
    for a in range(4):
        for b in range(5):
            a_mat[a][a + b] = fbar[b]
            a_mat[4 + a][a + b] = b * fbar[b]
    theta = bareiss_det(a_mat)
    if p is not None:
        theta %= p
    if theta == 0:
        raise DegenerateCurveError(
            f"edge Sylvester determinant vanishes (direction {(i, j, k)})")
    adj = _adjugate(a_mat)
    if p is not None:
        adj = [[x % p for x in row] for row in adj]
    syl = SylvesterData(tuple(tuple(r) for r in a_mat), theta,
                        tuple(tuple(r) for r in adj), (i, j, k))

    # the 8x28 right-hand side, degree <= 1 in (v, m)
    v_i, v_j = sym_var(f"v{i}"), sym_var(f"v{j}")
    m_sym = sym_var("m")
    msym_rows = [[SYM_ZERO] * len(_D6) for _ in range(8)]
    for a in range(4):
        s = [0, 0, 0]
        s[j], s[k] = a, 3 - a
        for tp in _D3:
            t = list(tp)
            t[i] += 1
            ft = f_at(tuple(t))
            if not ft:
                continue
            col = _I6[(s[0] + tp[0], s[1] + tp[1], s[2] + tp[2])]
            ti, tj = t[i], t[j]
            # (m+1) t_i - (v_i+1)
            w_top = sym_add(sym_scale(ti, sym_add(m_sym, sym_const(1))),
                            sym_sub(sym_const(-1), v_i))
            # (v_j - s_j) t_i - (v_i+1) t_j
            w_bot = sym_sub(sym_scale(ti, sym_sub(v_j, sym_const(s[j]))),
                            sym_scale(tj, sym_add(v_i, sym_const(1))))
            msym_rows[a][col] = sym_add(msym_rows[a][col], sym_scale(ft, w_top))
            msym_rows[4 + a][col] = sym_add(msym_rows[4 + a][col],
                                            sym_scale(ft, w_bot))

    vi_theta = sym_scale(theta, sym_add(v_i, sym_const(1)))
    phi_rows = []
    for w in _D7:
        if w[i] >= 1:
            u = list(w)
            u[i] -= 1
            row = [SYM_ZERO] * len(_D6)
            row[_I6[tuple(u)]] = vi_theta
        else:
            cidx = w[j]
            row = []
            for col in range(len(_D6)):
                e = SYM_ZERO
                for r in range(8):
                    av = adj[cidx][r]
                    if av and msym_rows[r][col] != SYM_ZERO:
                        e = sym_add(e, sym_scale(av, msym_rows[r][col]))
                row.append(e)
        phi_rows.append(tuple(row))
    return syl, tuple(phi_rows)


def build_tau(phi, i: int = 0, j: int = 1):
    """28x28 restriction of phi to target rows u' + e_j, u' in D_6."""
    rows = []
    for up in _D6:
        w = list(up)
        w[j] += 1
        rows.append(phi[_I7[tuple(w)]])
    return tuple(rows)


def build_T(pi, tau, psi):
    """T = pi tau psi, 16x16 with entries of degree <= 2 in (v, m)."""
    pi_sym = [[sym_const(x) for x in row] for row in pi]
    left = sym_mat_mul(pi_sym, [list(r) for r in tau])
    t_mat = sym_mat_mul(left, [list(r) for r in psi])
    return tuple(tuple(row) for row in t_mat)


def build_family(c) -> ShiftFamily:
    """Full tower for one curve over Q (QuarticCurve) or F_p (CurveModP)."""
    _, p = _unpack(c)
    basis = select_basis(c)
    comp = compression_data(c, basis)
    pi = build_pi(c, basis)
    psi = build_psi(c, comp, basis)
    syl, phi = build_phi(c, 0, 1, 2)
    tau = build_tau(phi, 0, 1)
    t_mat = build_T(pi, tau, psi)
    return ShiftFamily(pi, psi, tau, t_mat, comp.lam6, basis, syl, p)


# ---------------------------------------------------------------------------
# univariate specializations along the line v = (t, base - t, const)


def _line_params(mode: str, p=None):
    if mode == "integer":
        return (0, -1, -1), -2
    if mode == "modp":
        if p is None:
            raise ValueError("modp specialization needs p")
        return (0, 2 * p - 1, 2 * p - 1), p - 2
    raise ValueError(f"unknown mode {mode!r}")


def specialize_M(t_mat, mode: str, p=None):
    """M(t): substitute v = base + t (1,-1,0), m per mode, entrywise.

    Returns a matrix of (c0, c1, c2) univariate coefficient triples;
    integer mode uses v = (t, -1-t, -1), m = -2, the modp mode the
    congruent v = (t, 2p-1-t, 2p-1), m = p-2.
    """
    base, m_val = _line_params(mode, p)
    out = []
    for row in t_mat:
        orow = [sym_subst_line(e, base, (1, -1, 0), m_val) for e in row]
        if p is not None:
            orow = [tuple(x % p for x in e) for e in orow]
        out.append(orow)
    return out


def specialize_tau(tau, mode: str, p=None):
    """Same substitution applied to the 28x28 tau (degree <= 1 entries)."""
    return specialize_M(tau, mode, p)


# ---------------------------------------------------------------------------
# companion matrices for the edge power series


def build_Qg(c: CurveModP, edge: str):
    """8x8 companion matrix of the series a0/g for g an edge-quartic square.

    edge "f01t" takes g = f(0,1,t)^2, edge "f10t" takes g = f(1,0,t)^2.
    Q^s e_1 carries the series coefficients (c_s, ..., c_{s-7}) of
    a0/g = sum c_i t^i; requires the matching corner coefficient to be a
    unit mod p.
    """
    p = c.p
    idx4 = mono_index(4)
    if edge == "f01t":
        quart = [c.coeffs[idx4[(0, 4 - cc, cc)]] for cc in range(5)]
    elif edge == "f10t":
        quart = [c.coeffs[idx4[(4 - cc, 0, cc)]] for cc in range(5)]
    else:
        raise ValueError(f"unknown edge {edge!r}")
    g = [0] * 9
    for a in range(5):
        for b in range(5):
            g[a + b] = (g[a + b] + quart[a] * quart[b]) % p
    if g[0] % p == 0:
        raise DegenerateCurveError("edge series has non-unit constant term")
    inv0 = pow(g[0], -1, p)
    q = [[0] * 8 for _ in range(8)]
    for k in range(1, 9):
        q[0][k - 1] = -g[k] * inv0 % p
    for r in range(1, 8):
        q[r][r - 1] = 1
    return q
