"""Plane quartic models over Z and F_p.

Parsing and file formats, reduction mod p, the nondegeneracy screen, the
bad-prime product D, random good-model search for degenerate-but-smooth
primes, and the naive point count used both as the reported count for
p <= 144 and as a cross-check oracle.

A curve is 15 coefficients bound to lex_monomials(4) order:
(4,0,0),(3,1,0),(3,0,1),(2,2,0),(2,1,1),(2,0,2),(1,3,0),(1,2,1),(1,1,2),
(1,0,3),(0,4,0),(0,3,1),(0,2,2),(0,1,3),(0,0,4).

Nondegeneracy over a field asks for more than smoothness: the three
corner coefficients, the three edge binary quartic discriminants, and
the ternary discriminant of f must all be nonzero.  D multiplies integer
versions of all of these (plus 2, lambda6 and a basis minor supplied by
the caller), so that every prime where any pipeline step could degenerate
divides D.  Primes falsely flagged bad are re-screened exactly mod p and
routed to the fallback, so D only needs the superset property.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

from . import fppoly
from .algebra import bareiss_det, lex_monomials, mono_index

QUARTIC_MONOMIALS = lex_monomials(4)
_Q_INDEX = mono_index(4)


class DegenerateCurveError(ValueError):
    """Input curve fails a nondegeneracy requirement; message names the factor."""


class ModelSearchExhausted(RuntimeError):
    """No nondegenerate model found within the configured number of tries."""


@dataclass(frozen=True)
class QuarticCurve:
    """Homogeneous quartic over Z, coefficients in lex_monomials(4) order."""

    coeffs: tuple
    provenance: str = "user"

    def coeff(self, triple):
        return self.coeffs[_Q_INDEX[triple]]


@dataclass(frozen=True)
class CurveModP:
    """Reduction of a quartic mod p; transform records a model change, if any."""

    coeffs: tuple
    p: int
    provenance: str = "user"
    transform: tuple | None = None

    def coeff(self, triple):
        return self.coeffs[_Q_INDEX[triple]]


@dataclass(frozen=True)
class BadPrimeData:
    """The integer D and its factor breakdown; primes not dividing D are good."""

    D: int
    factors: dict


def parse_curve(tokens) -> QuarticCurve:
    vals = [int(t) for t in tokens]
    if len(vals) != 15:
        raise ValueError(f"expected 15 coefficients, got {len(vals)}")
    if not any(vals):
        raise ValueError("the zero polynomial is not a curve")
    return QuarticCurve(tuple(vals))


def load_curve(text: str) -> QuarticCurve:
    """Parse either 15 whitespace-separated integers or {"coeffs": [...]}."""
    text = text.strip()
    if text.startswith("{"):
        data = json.loads(text)
        return parse_curve(data["coeffs"])
    return parse_curve(text.split())


def reduce_curve(c: QuarticCurve, p: int) -> CurveModP:
    vals = tuple(x % p for x in c.coeffs)
    if not any(vals):
        raise DegenerateCurveError(f"curve vanishes identically mod {p}")
    return CurveModP(vals, p, c.provenance)


# ---------------------------------------------------------------------------
# edge restrictions and binary discriminants

# ascending-t coefficient extraction for the three edge quartics
_EDGES = {
    "t10": [(a, 4 - a, 0) for a in range(5)],    # f(t, 1, 0)
    "t01": [(a, 0, 4 - a) for a in range(5)],    # f(t, 0, 1)
    "0t1": [(0, b, 4 - b) for b in range(5)],    # f(0, t, 1)
}


def edge_quartic(coeffs, which: str):
    """Coefficients c0..c4 of the named edge restriction, ascending in t."""
    return [coeffs[_Q_INDEX[e]] for e in _EDGES[which]]


def _sylvester_resultant(g, h, m, n):
    """Resultant of univariate g (deg m) and h (deg n), ascending coeffs.

    Nominal degrees are trusted: a zero leading coefficient scales the
    true resultant by the other polynomial's leading coefficient, which
    is what the callers want (they guarantee one unit leading term).
    """
    size = m + n
    rows = []
    gd = list(reversed(g + [0] * (m + 1 - len(g))))
    hd = list(reversed(h + [0] * (n + 1 - len(h))))
    for i in range(n):
        rows.append([0] * i + gd + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + hd + [0] * (size - n - 1 - i))
    return bareiss_det(rows)


def disc_binary_quartic(c5, p=None):
    """Discriminant resultant(g, g')/lc of a degree-4 polynomial.

    Exact over Z when p is None, else mod p.  lc must be nonzero (a unit
    mod p); the division is exact by the classical factorization of the
    resultant.
    """
    if p is not None:
        c5 = [x % p for x in c5]
    if not c5[4]:
        raise ValueError("leading coefficient vanishes; not a quartic")
    d4 = [i * c for i, c in enumerate(c5)][1:]
    res = _sylvester_resultant(list(c5), d4, 4, 3)
    if p is not None:
        return res * pow(c5[4], -1, p) % p
    if res % c5[4]:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    return res // c5[4]


# ---------------------------------------------------------------------------
# ternary discriminant via the Macaulay matrix of the partials


def partial_cubics(coeffs):
    """The three partials of f as 10-vectors over lex_monomials(3)."""
    idx3 = mono_index(3)
    out = []
    for i in range(3):
        v = [0] * 10
        for e, c in zip(QUARTIC_MONOMIALS, coeffs):
            if e[i]:
                low = list(e)
                low[i] -= 1
                v[idx3[tuple(low)]] += e[i] * c
        out.append(v)
    return out


def _macaulay_pair(coeffs):
    """det M and det M' of the degree-7 Macaulay matrix of the partials.

    Rows: for each degree-7 monomial m, take the least i with x_i^3 | m
    and expand (m / x_i^3) * dF/dx_i over the 36 degree-7 monomials.
    M' restricts to the rows and columns whose monomial has x_i^3 | m
    for at least two i; Macaulay's theorem gives Res = det M / det M'.
    """
    monos7 = lex_monomials(7)
    idx7 = mono_index(7)
    idx3 = mono_index(3)
    parts = partial_cubics(coeffs)
    monos3 = lex_monomials(3)
    rows = []
    nonreduced = []
    for r, m in enumerate(monos7):
        i = next(k for k in range(3) if m[k] >= 3)
        if sum(1 for k in range(3) if m[k] >= 3) >= 2:
            nonreduced.append(r)
        shift = list(m)
        shift[i] -= 3
        row = [0] * len(monos7)
        for e, c in zip(monos3, parts[i]):
            if c:
                tgt = (e[0] + shift[0], e[1] + shift[1], e[2] + shift[2])
                row[idx7[tgt]] += c
        rows.append(row)
    det_m = bareiss_det(rows)
    sub = [[rows[r][idx7[monos7[s]]] for s in nonreduced] for r in nonreduced]
    det_sub = bareiss_det(sub)
    return det_m, det_sub


def _random_unimodular(rng):
    # product of a few elementary shears: determinant exactly 1
    t = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    for _ in range(4):
        i, j = rng.sample(range(3), 2)
        c = rng.choice((-2, -1, 1, 2))
        for k in range(3):
            t[i][k] += c * t[j][k]
    return tuple(tuple(r) for r in t)


def _poly_mul_dict(a, b, p=None):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])
            v = out.get(e, 0) + ca * cb
            out[e] = v % p if p is not None else v
    return {e: c for e, c in out.items() if c}


def substitute_coeffs(coeffs, T, p=None):
    """Coefficients of f(T x) in lex_monomials(4) order."""
    lins = []
    for i in range(3):
        row = {}
        for j in range(3):
            if T[i][j]:
                e = [0, 0, 0]
                e[j] = 1
                row[tuple(e)] = T[i][j] % p if p is not None else T[i][j]
        lins.append(row)
    total = {}
    for e, c in zip(QUARTIC_MONOMIALS, coeffs):
        if not c:
            continue
        term = {(0, 0, 0): c % p if p is not None else c}
        for i in range(3):
            for _ in range(e[i]):
                term = _poly_mul_dict(term, lins[i], p)
        for mono, v in term.items():
            w = total.get(mono, 0) + v
            total[mono] = w % p if p is not None else w
    return tuple(total.get(e, 0) for e in QUARTIC_MONOMIALS)


def substitute_linear(c: CurveModP, T) -> CurveModP:
    vals = substitute_coeffs(c.coeffs, T, c.p)
    return CurveModP(vals, c.p, "transformed", tuple(tuple(r) for r in T))


def macaulay_multiple(c: QuarticCurve, seed: int = 0) -> int:
    """A nonzero integer multiple of the ternary discriminant of f.

    The Macaulay determinant itself, retried under random unimodular
    substitutions (which change the resultant only by sign) until it is
    nonzero.  Primes dividing the extraneous factor det M' are falsely
    flagged bad; the per-prime fallback re-screens them exactly.
    """
    rng = random.Random(seed)
    coeffs = c.coeffs
    for _ in range(40):
        det_m, _ = _macaulay_pair(coeffs)
        if det_m:
            return det_m
        coeffs = substitute_coeffs(coeffs, _random_unimodular(rng))
    raise DegenerateCurveError("ternary discriminant factor vanishes over Q")


_RES_TO_DISC = 4 ** 7   # Res(dF/dx0, dF/dx1, dF/dx2) = 4^7 * disc(F) for quartics


def discriminant_exact(c: QuarticCurve, seed: int = 0) -> int:
    """The ternary discriminant of f up to sign, exactly.

    Macaulay's quotient formula Res = det M / det M' (retrying with
    unimodular substitutions until both determinants are nonzero),
    then division by the constant 4^7.  Zero iff the curve is singular
    over the algebraic closure of Q; p divides it iff the reduction
    mod p is singular, including p = 2.
    """
    rng = random.Random(seed)
    coeffs = c.coeffs
    for _ in range(40):
        det_m, det_sub = _macaulay_pair(coeffs)
        if det_sub:
            if det_m % det_sub:
                raise ArithmeticError("Macaulay quotient not exact")
            res = det_m // det_sub
            if res % _RES_TO_DISC:
                raise ArithmeticError("resultant not divisible by 4^7")
            return res // _RES_TO_DISC
        coeffs = substitute_coeffs(coeffs, _random_unimodular(rng))
    raise ArithmeticError("no unimodular model with invertible Macaulay minor")


def bad_prime_multiple(c: QuarticCurve, lam6: int, basis_minor: int = 1) -> BadPrimeData:
    """D = 2 * lam6 * corners * edge discriminants * Macaulay multiple.

    Every prime at which any transition-construction step degenerates
    divides D.  lam6 and the basis minor come from the shift-operator
    construction; callers without one pass 1 (weakening D is safe only
    because the fallback re-screens mod p).
    Raises DegenerateCurveError naming the factor that vanishes over Q.
    """
    factors = {"2": 2, "lambda6": lam6, "basis_minor": basis_minor}
    for name, e in (("corner f_(4,0,0)", (4, 0, 0)),
                    ("corner f_(0,4,0)", (0, 4, 0)),
                    ("corner f_(0,0,4)", (0, 0, 4))):
        v = c.coeff(e)
        if v == 0:
            raise DegenerateCurveError(f"degenerate over Q: {name} = 0")
        factors[name] = v
    for which, label in (("t10", "disc f(t,1,0)"), ("t01", "disc f(t,0,1)"),
                         ("0t1", "disc f(0,t,1)")):
        d = disc_binary_quartic(edge_quartic(c.coeffs, which))
        if d == 0:
            raise DegenerateCurveError(f"degenerate over Q: {label} = 0")
        factors[label] = d
    factors["macaulay"] = macaulay_multiple(c)
    if lam6 == 0 or basis_minor == 0:
        raise DegenerateCurveError("degenerate over Q: vanishing transition scalar")
    d_total = 1
    for v in factors.values():
        d_total *= v
    return BadPrimeData(d_total, factors)


# ---------------------------------------------------------------------------
# nondegeneracy over F_p

def _poly_in_x2(coeffs, p):
    """The three partials at x1 = 1 as x2-polynomials with F_p[t] coefficients.

    Returns [F0, F1, F2], each a length-4 list (x2-degree 0..3) of
    ascending-t coefficient lists, t standing for x0.
    """
    parts = partial_cubics(coeffs)
    monos3 = lex_monomials(3)
    out = []
    for v in parts:
        poly = [[0, 0, 0, 0] for _ in range(4)]
        for e, c in zip(monos3, v):
            if c:
                poly[e[2]][e[0]] = (poly[e[2]][e[0]] + c) % p
        out.append([fppoly.trim(cs) for cs in poly])
    return out


def _x2_resultant(a, b, p):
    """Res_x2 of two x2-cubics with F_p[t] coefficients, via a 6x6 Sylvester
    determinant expanded over permutations (exact for every p)."""
    rows = []
    ad = list(reversed(a))
    bd = list(reversed(b))
    for i in range(3):
        rows.append([[]] * i + ad + [[]] * (2 - i))
    for i in range(3):
        rows.append([[]] * i + bd + [[]] * (2 - i))
    det = []
    for perm in itertools.permutations(range(6)):
        term = [1]
        ok = True
        for r, cidx in enumerate(perm):
            e = rows[r][cidx]
            if not e:
                ok = False
                break
            term = fppoly.mul(term, e, p)
        if not ok:
            continue
        inversions = sum(1 for i in range(6) for j in range(i + 1, 6)
                         if perm[i] > perm[j])
        if inversions % 2:
            det = fppoly.sub(det, term, p)
        else:
            det = fppoly.add(det, term, p)
    return det


def _fiber_gcd_nonconstant(polys_x2, K) -> bool:
    # common factor of the three partials' x2-polynomials over K; an
    # all-zero fiber counts as nonconstant (everything vanishes there)
    g = None
    for poly in polys_x2:
        lifted = fppoly.ext_trim([K.from_poly(cs) for cs in poly], K)
        g = lifted if g is None else fppoly.ext_gcd(g, lifted, K)
    return (not g) or len(g) - 1 >= 1


def nondegenerate_modp(c: CurveModP, seed: int = 1) -> bool:
    """Corner, edge-discriminant and smoothness screen over F_p, p odd.

    Smoothness is decided exactly: the x2-resultants of (F2,F0) and
    (F2,F1) are supported on the projections of common partial zeros
    (F2 has unit x2^3 coefficient once the corner test passes), their
    gcd's irreducible factors name the candidate x0-coordinates up to
    conjugacy, and each candidate is verified in the matching extension
    field.  The (1:0:*) fiber is checked separately.
    """
    p = c.p
    if p == 2:
        raise ValueError("p = 2 unsupported here; the direct extraction path handles it")
    for e in ((4, 0, 0), (0, 4, 0), (0, 0, 4)):
        if c.coeff(e) % p == 0:
            return False
    for which in ("t10", "t01", "0t1"):
        if disc_binary_quartic(edge_quartic(c.coeffs, which), p) == 0:
            return False
    f0, f1, f2 = _poly_in_x2(c.coeffs, p)
    res_a = _x2_resultant(f2, f0, p)
    res_b = _x2_resultant(f2, f1, p)
    if fppoly.is_zero(res_a) or fppoly.is_zero(res_b):
        return False
    g = fppoly.gcd_poly(res_a, res_b, p)
    if fppoly.degree(g) >= 1:
        for q in fppoly.distinct_irreducible_factors(g, p, seed=seed):
            K = fppoly.ExtField(p, q)
            if _fiber_gcd_nonconstant((f2, f0, f1), K):
                return False
    # the (1:0:*) fiber: x0 = 1, x1 = 0
    fiber = []
    monos3 = lex_monomials(3)
    for v in partial_cubics(c.coeffs):
        poly = [0, 0, 0, 0]
        for e, cf in zip(monos3, v):
            if e[1] == 0 and cf:
                poly[e[2]] = (poly[e[2]] + cf) % p
        fiber.append(fppoly.trim(poly))
    g = None
    for poly in fiber:
        g = poly if g is None else fppoly.gcd_poly(g, poly, p)
    if fppoly.is_zero(g) or fppoly.degree(g) >= 1:
        return False
    return True


def _det3(T, p):
    (a, b, c), (d, e, f), (g, h, i) = T
    return (a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)) % p


def random_good_model(c: CurveModP, max_tries: int = 200, seed: int = 0) -> CurveModP:
    """A nondegenerate model f(T x) for uniformly random invertible T.

    The transform is recorded on the result so traces and counts carry
    over unchanged (the models are isomorphic).  p > 3 required; raises
    ModelSearchExhausted when max_tries runs out.
    """
    p = c.p
    if p <= 3:
        raise ValueError("good-model search requires p > 3")
    if nondegenerate_modp(c):
        return CurveModP(c.coeffs, p, c.provenance,
                         ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    rng = random.Random(seed * 0x9E3779B1 + p)
    for _ in range(max_tries):
        T = [[rng.randrange(p) for _ in range(3)] for _ in range(3)]
        if _det3(T, p) == 0:
            continue
        cand = substitute_linear(c, T)
        if not any(cand.coeffs):
            continue
        if nondegenerate_modp(cand):
            return cand
    raise ModelSearchExhausted(f"no nondegenerate model mod {p} after {max_tries} tries")


# ---------------------------------------------------------------------------
# naive point count


def naive_count(c: CurveModP) -> int:
    """#X(F_p) by charts: (1:0:0), (t:0:1), and (t:1:a) for a in F_p.

    Root counts are deg gcd(g, t^p - t) with t^p by repeated squaring;
    an identically-zero fiber contributes p points and 0^0 = 1.
    """
    p = c.p
    total = 1 if c.coeff((4, 0, 0)) % p == 0 else 0
    g = fppoly.trim([x % p for x in edge_quartic(c.coeffs, "t01")])
    total += p if fppoly.is_zero(g) else fppoly.distinct_root_count(g, p)
    # f(t,1,a) = sum over monomials (i,j,k) of c * t^i * a^k
    by_power = [[0] * 5 for _ in range(5)]   # [k][i]
    for e, cf in zip(QUARTIC_MONOMIALS, c.coeffs):
        if cf:
            by_power[e[2]][e[0]] = (by_power[e[2]][e[0]] + cf) % p
    for a in range(p):
        cs = [0] * 5
        ak = 1
        for k in range(5):
            row = by_power[k]
            if any(row):
                for i in range(5):
                    if row[i]:
                        cs[i] = (cs[i] + row[i] * ak) % p
            ak = ak * a % p
        g = fppoly.trim(cs)
        total += p if fppoly.is_zero(g) else fppoly.distinct_root_count(g, p)
    return total
