"""End-to-end acceptance sweeps.

One test per shipped guarantee, so a verbose run reports one pass or
fail line for each.  The corpus is a fixed pseudorandom draw of small
integer quartics, nondegenerate over Q.  Curves that additionally need
to be good at named small primes were found by the same rejection
sampling offline and are frozen below; the screen is re-asserted at
runtime, only the search is skipped.  Timed sweeps assert their
expected wall-clock budget, so a pass also certifies the speed claim.
"""

import random
import time

import pytest

from planequartic.algebra import (
    eval_sym,
    fp_mat_inverse,
    lex_monomials,
    mat_mul,
    mat_vec,
    sieve_primes,
    sym_mat_degree,
)
from planequartic.cli import main as cli_main
from planequartic.curve import (
    DegenerateCurveError,
    QuarticCurve,
    naive_count,
    reduce_curve,
)
from planequartic.engine import (
    CurveContext,
    cartier_manin_from_Cp,
    cartier_manin_modp,
    compute_Cp,
    operator_product,
    uncompressed_cartier_manin,
)
from planequartic.forest import make_plan, range_cartier_manin, step_matrix
from planequartic.oracle import (
    ZetaCounts,
    cartier_manin_bruteforce,
    count_points_ext,
    lpoly_from_counts,
    power_coeff_bruteforce,
)
from planequartic.transition import specialize_tau

SEED = 20260823
CORPUS_SIZE = 20

FERMAT = QuarticCurve((1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1))

# corner coefficient 1009 forces the bad-prime product to pick up a
# factor well above the trace-lift bound while the reduction mod 1009
# stays smooth, so a range sweep must route that prime through the
# per-prime fallback rather than the forest
ENGINEERED = QuarticCurve((1009, 4, -4, -1, -4, 2, 2, 2, 5, 1, -2, -4, 2, -5, 1))

# rejection-sampled small random quartics that are good at 5, 7, 11
# and 13 simultaneously; about one draw in two hundred qualifies, so
# searching inside the test would dominate its runtime
LPOLY_CURVES = (
    (6, 8, -8, -7, 0, -5, 7, -3, -5, -6, 3, -7, -4, -6, -8),
    (8, 3, -7, 5, -1, 3, 3, -6, -2, 5, -9, -9, -8, 6, -6),
    (3, 9, 7, -9, -5, -6, -7, 6, 5, 6, -8, -7, -5, 9, 2),
    (4, -2, -2, -9, -2, 6, -3, 7, 0, 5, 1, 2, -9, -6, -1),
    (-4, 3, -4, -1, 5, -3, -3, -8, -6, 4, 3, 7, -2, 2, -1),
)


def _try_context(coeffs):
    if not any(coeffs):
        return None
    ctx = CurveContext(QuarticCurve(coeffs))
    try:
        if ctx.bad_data.D == 0:
            return None
    except (DegenerateCurveError, ArithmeticError, ZeroDivisionError):
        return None
    return ctx


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(SEED)
    out = []
    while len(out) < CORPUS_SIZE:
        ctx = _try_context(tuple(rng.randint(-9, 9) for _ in range(15)))
        if ctx is not None:
            out.append(ctx)
    return out


def test_small_prime_matrices_match_brute_force(corpus):
    t0 = time.perf_counter()
    assert len(corpus) >= 20
    checked = 0
    for ctx in corpus:
        for p in sieve_primes(199):
            if p < 5 or not ctx.is_good(p):
                continue
            res = ctx.good_result(p)
            brute = cartier_manin_bruteforce(reduce_curve(ctx.curve, p))
            got = tuple(tuple(x % p for x in row) for row in brute)
            assert got == res.matrix, (ctx.curve.coeffs, p)
            checked += 1
    assert checked >= 400
    assert time.perf_counter() - t0 < 120


def test_trace_count_congruence_to_1000(corpus):
    t0 = time.perf_counter()
    for ctx in corpus:
        for p in sieve_primes(1000):
            if not ctx.is_good(p):
                continue
            res = ctx.good_result(p)
            cnt = naive_count(reduce_curve(ctx.curve, p))
            assert (res.trace - (p + 1 - cnt)) % p == 0, (ctx.curve.coeffs, p)
    assert time.perf_counter() - t0 < 300


def test_char_poly_matches_extension_count_lpoly():
    t0 = time.perf_counter()
    contexts = [CurveContext(QuarticCurve(c)) for c in LPOLY_CURVES]
    assert len(contexts) >= 5
    for ctx in contexts:
        assert all(ctx.is_good(p) for p in (5, 7, 11, 13)), ctx.curve.coeffs
        for p in (5, 7, 11, 13):
            res = ctx.good_result(p)
            c = reduce_curve(ctx.curve, p)
            z = ZetaCounts(p, *(count_points_ext(c, p, r) for r in (1, 2, 3)))
            lp = lpoly_from_counts(z)
            assert tuple(x % p for x in lp) == res.lpoly, (ctx.curve.coeffs, p)
    assert time.perf_counter() - t0 < 600


def test_range_sweep_matches_per_prime_engine(corpus):
    t0 = time.perf_counter()
    contexts = [CurveContext(ENGINEERED)] + corpus[:4]
    for ctx in contexts:
        fallback_primes = []
        seen = []
        for item in range_cartier_manin(ctx.curve, 1 << 13):
            seen.append(item.p)
            if item.status in ("ok", "fallback"):
                ref = cartier_manin_modp(ctx.curve, item.p, context=ctx)
                assert item.result == ref, (ctx.curve.coeffs, item.p)
                if item.status == "fallback":
                    fallback_primes.append(item.p)
            elif item.status == "bad_reduction":
                with pytest.raises(DegenerateCurveError):
                    cartier_manin_modp(ctx.curve, item.p, context=ctx)
            else:
                assert item.detail
        assert seen == sieve_primes(1 << 13)
        if ctx.curve is ENGINEERED:
            assert 1009 in fallback_primes
    assert time.perf_counter() - t0 < 300


def test_compressed_and_uncompressed_paths_agree(corpus):
    for ctx in corpus[:5]:
        fam = ctx.family
        for p in sieve_primes(1 << 12):
            if not ctx.is_good(p):
                continue
            c = reduce_curve(ctx.curve, p)
            compressed = cartier_manin_from_Cp(c, fam, compute_Cp(fam, p))
            assert compressed == uncompressed_cartier_manin(c, fam), \
                (ctx.curve.coeffs, p)
    # the full-width product is conjugate to the compressed one by the
    # section/projection pair; checked as the two product identities
    # that need no division by lam6
    relation = [CurveContext(FERMAT)]
    relation += [ctx for ctx in corpus
                 if all(ctx.is_good(p) for p in (11, 101))][:1]
    for ctx in relation:
        fam = ctx.family
        for p in (11, 101):
            assert ctx.is_good(p)
            lam = fam.lam6 % p
            u_p = operator_product(specialize_tau(fam.tau, "modp", p),
                                   p - 1, p)
            cp = compute_Cp(fam, p)
            pi = [[x % p for x in row] for row in fam.pi]
            psi_start = eval_sym(fam.psi, {"v0": 0, "v1": 2 * p - 1,
                                           "v2": 2 * p - 1, "m": p - 2}, p)
            psi_end = eval_sym(fam.psi, {"v0": p - 1, "v1": p,
                                         "v2": 2 * p - 1, "m": p - 2}, p)
            sandwich = mat_mul(mat_mul(pi, u_p, p), psi_start, p)
            assert sandwich == [[(-lam) * x % p for x in row] for row in cp]
            assert mat_mul(u_p, psi_start, p) == mat_mul(psi_end, cp, p)


def test_tower_dimensions_and_compression_identity(corpus):
    rng = random.Random(SEED + 6)
    for ctx in corpus:
        fam = ctx.family
        assert len(lex_monomials(2)) == 6
        assert len(fam.basis.b6) == 10
        assert len(fam.T) == 16 and len(fam.T[0]) == 16
        assert 16 == 6 + len(fam.basis.b6) == 4 ** 2
        assert len(fam.pi) == 16 and len(fam.pi[0]) == 28
        assert len(fam.psi) == 28 and len(fam.psi[0]) == 16
        assert sym_mat_degree(fam.T) <= 2
        assert sym_mat_degree(fam.tau) <= 1
        for _ in range(20):
            v0 = rng.randint(-40, 40)
            v1 = rng.randint(-40, 40)
            m = rng.randint(-40, 40)
            v2 = 4 * m + 6 - v0 - v1  # the identity lives on this shell
            psi_val = eval_sym(fam.psi, {"v0": v0, "v1": v1,
                                         "v2": v2, "m": m})
            prod = mat_mul([list(r) for r in fam.pi], psi_val)
            scalar = (m + 1) * fam.lam6
            assert prod == [[scalar if i == j else 0 for j in range(16)]
                            for i in range(16)], ctx.curve.coeffs


def test_operator_product_transports_restrictions(corpus):
    contexts = [CurveContext(FERMAT)]
    contexts += [ctx for ctx in corpus
                 if all(ctx.is_good(p) for p in (7, 13, 101))][:2]
    for ctx in contexts:
        fam = ctx.family
        for p in (7, 13, 101):
            assert ctx.is_good(p)
            c = reduce_curve(ctx.curve, p)
            cp = compute_Cp(fam, p)
            fp_mat_inverse(cp, p)  # the product must be invertible
            pi = [[x % p for x in row] for row in fam.pi]
            w1 = (0, 2 * p - 1, 2 * p - 1)
            v1 = (p - 1, p, 2 * p - 1)
            y_w = mat_vec(pi, power_coeff_bruteforce(c, p - 2, w1, 6), p)
            y_v = mat_vec(pi, power_coeff_bruteforce(c, p - 2, v1, 6), p)
            assert mat_vec(cp, y_w, p) == [(-x) % p for x in y_v], \
                (ctx.curve.coeffs, p)


def test_paired_step_products_carry_lam6_factor(corpus):
    for ctx in corpus[:5]:
        plan = make_plan(ctx, 8, kappa=0)
        for i in range(100):
            prod = mat_mul(step_matrix(plan.source, i),
                           step_matrix(plan.source, i + 1))
            assert all(x % plan.lam6 == 0 for row in prod for x in row), \
                (ctx.curve.coeffs, i)


def test_range_wall_time_scales_quasilinearly(tmp_path):
    coeffs = [str(x) for x in FERMAT.coeffs]
    times = {}
    for e in (15, 16, 17):
        out = tmp_path / f"range{e}.jsonl"
        t0 = time.perf_counter()
        code = cli_main(["range", "--coeffs", *coeffs,
                         "-N", str(1 << e), "--out", str(out)])
        times[e] = time.perf_counter() - t0
        assert code == 0
        with out.open() as fh:
            assert sum(1 for _ in fh) == len(sieve_primes(1 << e))
    assert times[16] / times[15] <= 2.8, times
    assert times[17] / times[16] <= 2.8, times
    assert times[17] < 1800, times
