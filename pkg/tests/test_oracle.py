"""Tests for the brute-force oracles.

The oracles are themselves the ground truth for the fast pipeline, so
they get checked against hand multinomials, small enumerations, and each
other (two genuinely different expansion strategies).
"""

import random

import pytest

from planequartic.algebra import lex_monomials, mono_index
from planequartic.curve import QuarticCurve, naive_count, reduce_curve
from planequartic.oracle import (
    BudgetError,
    ZetaCounts,
    _find_irreducible,
    cartier_manin_bruteforce,
    count_points_ext,
    lpoly_from_counts,
    power_coeff_bruteforce,
)

FERMAT = QuarticCurve(tuple(
    1 if m in ((4, 0, 0), (0, 4, 0), (0, 0, 4)) else 0
    for m in lex_monomials(4)))


def klein() -> QuarticCurve:
    coeffs = [0] * 15
    for m in ((3, 1, 0), (0, 3, 1), (1, 0, 3)):
        coeffs[mono_index(4)[m]] = 1
    return QuarticCurve(tuple(coeffs))


def random_curve(rng: random.Random) -> QuarticCurve:
    while True:
        coeffs = tuple(rng.randint(-9, 9) for _ in range(15))
        if any(coeffs):
            return QuarticCurve(coeffs)


# ---------------------------------------------------------------------------
# power_coeff_bruteforce


def test_power_zero_exponent():
    c = reduce_curve(FERMAT, 7)
    block = power_coeff_bruteforce(c, 0, (2, 2, 2), 6)
    expected = [0] * 28
    expected[mono_index(6)[(2, 2, 2)]] = 1
    assert block == expected


def test_power_one_reads_f():
    rng = random.Random(3)
    c = reduce_curve(random_curve(rng), 11)
    v = (4, 3, 3)
    block = power_coeff_bruteforce(c, 1, v, 6)
    for u, got in zip(lex_monomials(6), block):
        t = (v[0] - u[0], v[1] - u[1], v[2] - u[2])
        want = c.coeff(t) if min(t) >= 0 else 0
        assert got == want


def test_power_fermat_cube_multinomials():
    # f^3 for the Fermat quartic has multinomial coefficients at
    # exponent triples divisible by 4: coeff = 3!/(i! j! k!).
    c = reduce_curve(FERMAT, 5)
    block = power_coeff_bruteforce(c, 3, (4, 5, 9), 6)
    expected = [0] * 28
    expected[mono_index(6)[(0, 1, 5)]] = 6 % 5   # (4,4,4)
    expected[mono_index(6)[(4, 1, 1)]] = 3       # (0,4,8)
    expected[mono_index(6)[(0, 5, 1)]] = 3       # (4,0,8)
    assert block == expected


def test_power_budget():
    c = reduce_curve(FERMAT, 5)
    with pytest.raises(BudgetError):
        power_coeff_bruteforce(c, 500, (500, 500, 1000), 6)


# ---------------------------------------------------------------------------
# cartier_manin_bruteforce


def test_cm_klein_p2_permutation():
    A = cartier_manin_bruteforce(reduce_curve(klein(), 2))
    assert A == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]


def test_cm_budget():
    c = reduce_curve(FERMAT, 257)
    with pytest.raises(BudgetError):
        cartier_manin_bruteforce(c)


def test_cm_prime_mismatch():
    c = reduce_curve(FERMAT, 7)
    with pytest.raises(ValueError):
        cartier_manin_bruteforce(c, 11)


TARGETS = [
    [(0, 0), (1, 0), (0, 1)],
    [(1, 1), (2, 1), (1, 2)],
    [(2, 2), (0, 2), (2, 0)],
]


def _cm_targets(p):
    return [[(p - 1, p - 1, 2 * p - 2), (2 * p - 1, p - 1, p - 2),
             (p - 1, 2 * p - 1, p - 2)],
            [(p - 2, p - 1, 2 * p - 1), (2 * p - 2, p - 1, p - 1),
             (p - 2, 2 * p - 1, p - 1)],
            [(p - 1, p - 2, 2 * p - 1), (2 * p - 1, p - 2, p - 1),
             (p - 1, 2 * p - 2, p - 1)]]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_cm_agrees_with_iterated_expansion(p):
    # repeated squaring vs iterated sparse multiplication: independent
    # strategies must produce the same nine coefficients
    rng = random.Random(100 + p)
    for _ in range(3):
        c = reduce_curve(random_curve(rng), p)
        A = cartier_manin_bruteforce(c)
        probe = mono_index(6)[(2, 2, 2)]
        for i in range(3):
            for j in range(3):
                t = _cm_targets(p)[i][j]
                v = (t[0] + 2, t[1] + 2, t[2] + 2)
                block = power_coeff_bruteforce(c, p - 1, v, 6)
                assert block[probe] == A[i][j]


# ---------------------------------------------------------------------------
# count_points_ext


def test_irreducible_search_deterministic():
    assert _find_irreducible(5, 1) == [0, 1]
    assert _find_irreducible(5, 2) == [2, 0, 1]      # y^2 + 2
    assert _find_irreducible(2, 3) == [1, 1, 0, 1]   # y^3 + y + 1
    assert _find_irreducible(3, 2) == [1, 0, 1]      # y^2 + 1


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_count_r1_matches_naive(p):
    rng = random.Random(50 + p)
    for curve in (FERMAT, klein(), random_curve(rng)):
        try:
            c = reduce_curve(curve, p)
        except ValueError:
            continue
        assert count_points_ext(c, p, 1) == naive_count(c)


def test_count_fermat_p5_tower():
    c = reduce_curve(FERMAT, 5)
    n1 = count_points_ext(c, 5, 1)
    n2 = count_points_ext(c, 5, 2)
    n3 = count_points_ext(c, 5, 3)
    assert (n1, n2, n3) == (0, 44, 192)


def test_count_weil_bounds():
    rng = random.Random(9)
    c = reduce_curve(random_curve(rng), 7)
    for r in (1, 2, 3):
        q = 7 ** r
        n = count_points_ext(c, 7, r)
        # smooth or not, the count stays within the coarse screen we
        # use here: nonnegative and at most the plane's point count
        assert 0 <= n <= q * q + q + 1


def test_count_budget_and_args():
    c = reduce_curve(FERMAT, 101)
    with pytest.raises(BudgetError):
        count_points_ext(c, 101, 2)
    with pytest.raises(ValueError):
        count_points_ext(c, 101, 4)
    with pytest.raises(ValueError):
        count_points_ext(c, 103, 1)


def test_count_permutation_invariance():
    # relabeling coordinates is a projective change of coordinates
    rng = random.Random(12)
    coeffs = [rng.randint(-9, 9) for _ in range(15)]
    idx = mono_index(4)
    swapped = [0] * 15
    for m, v in zip(lex_monomials(4), coeffs):
        swapped[idx[(m[1], m[0], m[2])]] = v
    a = reduce_curve(QuarticCurve(tuple(coeffs)), 5)
    b = reduce_curve(QuarticCurve(tuple(swapped)), 5)
    for r in (1, 2):
        assert count_points_ext(a, 5, r) == count_points_ext(b, 5, r)


# ---------------------------------------------------------------------------
# lpoly_from_counts


def test_lpoly_trivial_counts():
    p = 7
    z = ZetaCounts(p, p + 1, p * p + 1, p ** 3 + 1)
    assert lpoly_from_counts(z) == [1, 0, 0, 0, 0, 0, p ** 3]


def test_lpoly_round_trip():
    # reconstruct counts from chosen elementary symmetric functions,
    # then demand the Newton lift returns exactly those coefficients
    rng = random.Random(4)
    p = 11
    for _ in range(20):
        e1, e2, e3 = (rng.randint(-15, 15) for _ in range(3))
        s1 = e1
        s2 = e1 * s1 - 2 * e2
        s3 = e1 * s2 - e2 * s1 + 3 * e3
        z = ZetaCounts(p, p + 1 - s1, p * p + 1 - s2, p ** 3 + 1 - s3)
        L = lpoly_from_counts(z)
        assert L == [1, -e1, e2, -e3, p * e2, -p * p * e1, p ** 3]
        # functional equation: l_{3+k} = p^k l_{3-k}
        assert L[4] == p * L[2] and L[5] == p * p * L[1] and L[6] == p ** 3


def test_lpoly_parity_guard():
    with pytest.raises(ArithmeticError):
        lpoly_from_counts(ZetaCounts(7, 7, 50, 344))


def test_lpoly_klein_p2_consistency():
    # counts -> Newton -> reduction mod 2 must match the determinant of
    # I - T*A for the brute-force matrix (a 3-cycle, so 1 + T^3 mod 2)
    c = reduce_curve(klein(), 2)
    counts = [count_points_ext(c, 2, r) for r in (1, 2, 3)]
    L = lpoly_from_counts(ZetaCounts(2, *counts))
    assert [v % 2 for v in L] == [1, 0, 0, 1, 0, 0, 0]


def test_lpoly_fermat_p5():
    c = reduce_curve(FERMAT, 5)
    counts = [count_points_ext(c, 5, r) for r in (1, 2, 3)]
    L = lpoly_from_counts(ZetaCounts(5, *counts))
    assert L == [1, -6, 27, -68, 135, -150, 125]
    A = cartier_manin_bruteforce(c)
    assert sum(A[i][i] for i in range(3)) % 5 == (-L[1]) % 5
