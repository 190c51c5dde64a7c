"""Tests for the exact-arithmetic substrate and the F_p[t] helpers."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from planequartic import algebra, fppoly
from planequartic.algebra import (
    SingularMatrixError,
    bareiss_det,
    eval_sym,
    finite_diff_stream,
    fp_mat_inverse,
    is_prime,
    lex_monomials,
    mono_index,
    sieve_primes,
    sym_const,
    sym_subst_line,
    sym_var,
    uni_eval,
)


def test_lex_monomials_degree0():
    assert lex_monomials(0) == ((0, 0, 0),)


def test_lex_monomials_degree2():
    assert lex_monomials(2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1),
                                (0, 2, 0), (0, 1, 1), (0, 0, 2))


def test_lex_monomials_degree6_size():
    assert len(lex_monomials(6)) == 28


@pytest.mark.parametrize("l", [0, 1, 2, 4, 6, 7])
def test_mono_index_roundtrip(l):
    monos = lex_monomials(l)
    assert len(monos) == (l + 2) * (l + 1) // 2
    idx = mono_index(l)
    for i, u in enumerate(monos):
        assert idx[u] == i
        assert sum(u) == l


def test_eval_sym_constant_identity():
    s = [[sym_const(1 if i == j else 0) for j in range(3)] for i in range(3)]
    assert eval_sym(s, {}) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_eval_sym_linear_entry():
    s = [[algebra.sym_add(sym_var("v0"), sym_var("m"))]]
    assert eval_sym(s, {"v0": 3, "m": -2}) == [[1]]


def test_eval_sym_missing_variable():
    s = [[sym_var("v1")]]
    with pytest.raises(ValueError):
        eval_sym(s, {"v0": 1})


def test_sym_mul_degree_cap():
    q = algebra.sym_mul(sym_var("v0"), sym_var("v0"))
    with pytest.raises(ValueError):
        algebra.sym_mul(q, sym_var("v0"))


def test_sym_subst_line():
    # (v0 + m)*(v1) at v = (1,2,0) + t*(1,-1,0), m = -2
    e = algebra.sym_mul(algebra.sym_add(sym_var("v0"), sym_var("m")),
                        sym_var("v1"))
    c = sym_subst_line(e, (1, 2, 0), (1, -1, 0), -2)
    for t in range(-3, 4):
        assert c[0] + c[1] * t + c[2] * t * t == (1 + t - 2) * (2 - t)


def test_finite_diff_stream_constant():
    s = [[(5, 0, 0), (1, 0, 0)]]
    out = list(finite_diff_stream(s, 3, 4, 11))
    assert out == [[[5, 1]]] * 4


def test_finite_diff_stream_square():
    s = [[(0, 0, 1)]]
    out = [m[0][0] for m in finite_diff_stream(s, 0, 4, 101)]
    assert out == [0, 1, 4, 9]


def test_finite_diff_stream_matches_direct_eval():
    rng = random.Random(7)
    s = [[(rng.randrange(-50, 50), rng.randrange(-50, 50), rng.randrange(-50, 50))
          for _ in range(4)] for _ in range(4)]
    direct = [uni_eval(s, t, 101) for t in range(100)]
    assert list(finite_diff_stream(s, 0, 100, 101)) == direct


def test_finite_diff_stream_integer_mode():
    s = [[(3, -2, 7)]]
    vals = [m[0][0] for m in finite_diff_stream(s, -5, 12)]
    assert vals == [3 - 2 * t + 7 * t * t for t in range(-5, 7)]


@given(st.integers(-30, 30), st.integers(1, 5))
@settings(max_examples=40, deadline=None)
def test_uni_eval_congruence(a, k):
    # degree <= 2 entries: t == t' mod p forces value congruence mod p
    p = 13
    s = [[(4, -9, 2), (0, 1, 1)]]
    assert uni_eval(s, a, p) == uni_eval(s, a + k * p, p)


def test_fp_mat_inverse_identity():
    i16 = algebra.mat_identity(16)
    assert fp_mat_inverse(i16, 7) == i16


def test_fp_mat_inverse_diag():
    assert fp_mat_inverse([[2, 0], [0, 3]], 7) == [[4, 0], [0, 5]]


def test_fp_mat_inverse_multiply_back():
    p = 10007
    rng = random.Random(1)
    m = [[rng.randrange(p) for _ in range(16)] for _ in range(16)]
    inv = fp_mat_inverse(m, p)
    assert algebra.mat_mul(m, inv, p) == algebra.mat_identity(16)
    assert algebra.mat_mul(inv, m, p) == algebra.mat_identity(16)


def test_fp_mat_inverse_singular():
    with pytest.raises(SingularMatrixError):
        fp_mat_inverse([[1, 2], [2, 4]], 5)


def test_fp_mat_rank():
    assert algebra.fp_mat_rank([[1, 2], [2, 4]], 5) == 1
    assert algebra.fp_mat_rank([[0, 0], [0, 0]], 5) == 0
    assert algebra.fp_mat_rank(algebra.mat_identity(3), 5) == 3


def test_bareiss_det_small():
    assert bareiss_det([[3]]) == 3
    assert bareiss_det([[1, 2], [3, 4]]) == -2
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[2, 0, 0], [0, 3, 0], [0, 0, 5]]) == 30


def test_bareiss_det_vs_fraction_elimination():
    rng = random.Random(3)
    for _ in range(5):
        n = 5
        m = [[rng.randrange(-9, 10) for _ in range(n)] for _ in range(n)]
        det = Fraction(1)
        rows = [[Fraction(x) for x in row] for row in m]
        sign = 1
        for k in range(n):
            piv = next((i for i in range(k, n) if rows[i][k]), None)
            if piv is None:
                det = Fraction(0)
                break
            if piv != k:
                rows[k], rows[piv] = rows[piv], rows[k]
                sign = -sign
            det *= rows[k][k]
            inv = 1 / rows[k][k]
            for i in range(k + 1, n):
                f = rows[i][k] * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
        assert bareiss_det(m) == sign * det


def test_rref_fraction_solves():
    rows, pivots = algebra.rref_fraction([[2, 1, 5], [1, -1, 1]], ncols=2)
    assert pivots == [0, 1]
    assert rows[0][:2] == [1, 0] and rows[0][2] == 2
    assert rows[1][:2] == [0, 1] and rows[1][2] == 1


def test_rref_modp_matches_fraction():
    rng = random.Random(11)
    p = 97
    m = [[rng.randrange(-20, 20) for _ in range(6)] for _ in range(4)]
    qrows, qpiv = algebra.rref_fraction(m)
    prows, ppiv = algebra.rref_modp(m, p)
    assert qpiv == ppiv
    for qr, pr in zip(qrows, prows):
        for qx, px in zip(qr, pr):
            assert qx.denominator % p != 0
            num = qx.numerator * pow(qx.denominator, -1, p) % p
            assert num == px


def test_is_prime():
    assert [n for n in range(60) if is_prime(n)] == [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
    assert not is_prime(561)       # Carmichael
    assert not is_prime(1)
    assert is_prime(2 ** 31 - 1)
    assert not is_prime(2 ** 32 + 1)


def test_sieve_primes():
    assert sieve_primes(1) == []
    assert sieve_primes(100) == [n for n in range(101) if is_prime(n)]


# ---------------------------------------------------------------------------
# fppoly


def test_fppoly_divmod_reconstructs():
    rng = random.Random(5)
    p = 13
    for _ in range(20):
        a = fppoly.trim([rng.randrange(p) for _ in range(rng.randrange(1, 9))])
        b = fppoly.trim([rng.randrange(p) for _ in range(rng.randrange(1, 6))])
        if fppoly.is_zero(b):
            continue
        q, r = fppoly.divmod_poly(a, b, p)
        assert fppoly.degree(r) < fppoly.degree(b)
        assert fppoly.add(fppoly.mul(q, b, p), r, p) == a


def test_fppoly_gcd():
    p = 7
    t2m1 = [p - 1, 0, 1]          # t^2 - 1
    t3m1 = [p - 1, 0, 0, 1]       # t^3 - 1
    assert fppoly.gcd_poly(t2m1, t3m1, p) == [p - 1, 1]   # t - 1


def test_distinct_root_count():
    p = 7
    assert fppoly.distinct_root_count([p - 1, 0, 1], p) == 2   # t^2 - 1
    assert fppoly.distinct_root_count([1, 0, 1], p) == 0       # t^2 + 1, 7 = 3 mod 4
    assert fppoly.distinct_root_count([0, 1], p) == 1          # t
    assert fppoly.distinct_root_count([0, 0, 1], p) == 1       # t^2, one distinct root
    assert fppoly.distinct_root_count([3], p) == 0


def test_distinct_root_count_vs_enumeration():
    rng = random.Random(9)
    for p in (3, 5, 11, 101):
        for _ in range(5):
            g = fppoly.trim([rng.randrange(p) for _ in range(6)])
            if fppoly.is_zero(g):
                continue
            roots = sum(1 for x in range(p) if fppoly.eval_poly(g, x, p) == 0)
            assert fppoly.distinct_root_count(g, p) == roots


def test_powmod_matches_naive():
    p = 11
    g = [3, 1, 0, 2, 1]
    a = [1, 4, 2]
    direct = [1]
    for _ in range(23):
        direct = fppoly.rem(fppoly.mul(direct, a, p), g, p)
    assert fppoly.powmod(a, 23, g, p) == direct


def test_factor_distinct():
    p = 7
    # (t-1)^2 (t^2+1) (t+2): t^2+1 is irreducible mod 7
    f = [1]
    for g in ([p - 1, 1], [p - 1, 1], [1, 0, 1], [2, 1]):
        f = fppoly.mul(f, g, p)
    found = fppoly.distinct_irreducible_factors(f, p, seed=3)
    assert sorted(found) == sorted([[p - 1, 1], [1, 0, 1], [2, 1]])


def test_factor_pth_power():
    p = 3
    # (t^3 - t)^3 = (t(t-1)(t+1))^3 has derivative 0
    base = fppoly.mul(fppoly.mul([0, 1], [p - 1, 1], p), [1, 1], p)
    f = [1]
    for _ in range(3):
        f = fppoly.mul(f, base, p)
    found = fppoly.distinct_irreducible_factors(f, p, seed=1)
    assert sorted(found) == sorted([[0, 1], [p - 1, 1], [1, 1]])


def test_factor_reconstructs_random():
    rng = random.Random(17)
    for p in (3, 5, 13):
        for _ in range(8):
            g = fppoly.trim([rng.randrange(p) for _ in range(rng.randrange(2, 10))])
            if fppoly.degree(g) < 1:
                continue
            factors = fppoly.distinct_irreducible_factors(g, p, seed=2)
            h = fppoly.monic(g, p)
            for q in factors:
                assert fppoly.rem(h, q, p) == []
                # irreducible: no root-degree split left over
                if fppoly.degree(q) > 1:
                    assert fppoly.distinct_root_count(q, p) == 0 or fppoly.degree(q) == 1
            prod = [1]
            for q in factors:
                prod = fppoly.mul(prod, q, p)
            assert fppoly.rem(prod, prod, p) == []  # sanity
            assert all(fppoly.rem(h, q, p) == [] for q in factors)


def test_inv_mod():
    p = 5
    g = [2, 0, 1, 1]
    a = [1, 3]
    inv = fppoly.inv_mod(a, g, p)
    assert fppoly.rem(fppoly.mul(a, inv, p), g, p) == [1]


def test_ext_field_f9():
    K = fppoly.ExtField(3, [1, 0, 1])     # F_9 = F_3[y]/(y^2+1)
    y = K.from_poly([0, 1])
    assert K.mul(y, y) == K.from_int(-1)
    assert K.mul(y, K.inv(y)) == K.one
    # multiplicative order of the group is 8
    x = K.from_poly([1, 1])
    acc = K.one
    for _ in range(8):
        acc = K.mul(acc, x)
    assert acc == K.one


def test_ext_gcd():
    K = fppoly.ExtField(3, [1, 0, 1])
    y = K.from_poly([0, 1])
    two_y = K.add(y, y)
    # (x - y)(x - 2y) and (x - y)(x - 1): gcd = x - y
    a = [K.mul(y, two_y), K.sub(K.zero, K.add(y, two_y)), K.one]
    b = [K.mul(y, K.one), K.sub(K.zero, K.add(y, K.one)), K.one]
    g = fppoly.ext_gcd(a, b, K)
    assert g == [K.sub(K.zero, y), K.one]
