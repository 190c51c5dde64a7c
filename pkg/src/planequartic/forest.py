"""Average polynomial-time sweep over all good primes up to a bound.

The per-prime product C_p = M(p-2)...M(0) mod p sees the matrix family
only through arguments congruent to -2, -3, ... mod p, so one shared
sequence of integer matrices M_i (the family at t = -2-i) serves every
prime at once: C_p is the prefix product M_0...M_(p-2) reduced mod p.
A product tree over the M_i with a remainder tree over the prime moduli
computes all prefixes in quasilinear total time; splitting the index
range into 2^kappa chunks bounds the tree memory, while a running carry
matrix, reduced modulo the product of the still-unserved moduli, threads
the prefixes from one chunk into the next.

Every product of two consecutive steps is divisible entrywise by the
compression scalar lambda6, so leaves are formed at the pair level with
one factor of lambda6 stripped; the missing power lambda6^((p-1)/2) is
restored mod p at extraction.  Pairing loses nothing: an even index i
would serve p = i+2 even, and the only even prime always divides the
bad-prime product.
"""

from __future__ import annotations

import math
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from gmpy2 import mpz

from .algebra import mat_identity, mat_mul, sieve_primes, uni_eval
from .curve import DegenerateCurveError, ModelSearchExhausted, QuarticCurve
from .engine import CartierManinResult, CurveContext, cartier_manin_modp
from .transition import specialize_M

W_DIM = 16


@dataclass
class ForestPlan:
    """Inputs of one sweep plus size statistics measured while it runs."""

    N: int
    kappa: int
    moduli: list            # m_i for i = 0..N-2: i+2 when a good prime, else 1
    source: tuple           # 16x16 of (c0, c1, c2) triples: leaf i sits at t = -2-i
    lam6: int
    strip: bool = True
    leaf_bits: int = 0      # largest pair-leaf entry seen
    carry_bits: int = 0     # largest carry entry seen


@dataclass(frozen=True)
class SubtreeResult:
    """One chunk's extracted primes and the carry into the next chunk."""

    start: int              # first pair index covered
    pairs: list             # (p, C_p mod p) ascending
    carry: tuple            # running product reduced mod the later moduli


def default_kappa(N: int) -> int:
    """floor(2 log2 log2 N), the empirically flat region of the tradeoff."""
    if N < 4:
        return 0
    return max(0, int(2 * math.log2(math.log2(N))))


def make_plan(curve, N: int, kappa: int | None = None,
              strip: bool = True) -> ForestPlan:
    """Moduli sequence and integer matrix source for all primes up to N."""
    ctx = curve if isinstance(curve, CurveContext) else CurveContext(curve)
    if N < 3:
        raise ValueError("bound must be at least 3")
    if kappa is None:
        kappa = default_kappa(N)
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    D = ctx.bad_data.D
    if D == 0:
        raise DegenerateCurveError(
            "curve is degenerate over Q; try a unimodular change of variables")
    flags = set(sieve_primes(N))
    moduli = [i + 2 if (i + 2) in flags and D % (i + 2) else 1
              for i in range(N - 1)]
    source = specialize_M(ctx.family.T, "integer")
    return ForestPlan(N=N, kappa=kappa, moduli=moduli,
                      source=tuple(tuple(row) for row in source),
                      lam6=ctx.family.lam6, strip=strip)


def step_matrix(source, i: int):
    """The integer leaf M_i: the matrix family evaluated at t = -2-i."""
    return uni_eval(source, -2 - i)


# ---------------------------------------------------------------------------
# pair leaves as polynomials in the pair index


def _compose(triple, a: int, b: int):
    """Coefficients of c(a + b j) as a degree-2 polynomial in j."""
    c0, c1, c2 = triple
    return (c0 + c1 * a + c2 * a * a, b * (c1 + 2 * a * c2), c2 * b * b)


def pair_polynomials(plan: ForestPlan):
    """Entries of M_(2j) M_(2j+1) as degree-4 coefficient tuples in j.

    When stripping, one factor lambda6 is divided out of every
    coefficient; a nonzero remainder would mean the divisibility of
    consecutive products has failed, which indicates a construction bug.
    """
    n = len(plan.source)
    even = [[_compose(e, -2, -2) for e in row] for row in plan.source]
    odd = [[_compose(e, -3, -2) for e in row] for row in plan.source]
    out = []
    for i in range(n):
        orow = []
        for j in range(n):
            acc = [0] * 5
            for k in range(n):
                a = even[i][k]
                b = odd[k][j]
                for s in range(3):
                    if a[s]:
                        for t in range(3):
                            acc[s + t] += a[s] * b[t]
            if plan.strip:
                for s in range(5):
                    q, r = divmod(acc[s], plan.lam6)
                    if r:
                        raise ArithmeticError(
                            "pair product entry not divisible by lambda6")
                    acc[s] = q
            orow.append(tuple(mpz(x) for x in acc))
        out.append(orow)
    return out


def _poly_values(polys, j0: int, count: int):
    """Evaluate every entry at j = j0 .. j0+count-1 by finite differences.

    Seeds a forward-difference window from five direct evaluations, so a
    chunk can start anywhere without streaming through earlier indices.
    """
    n = len(polys)
    win = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = polys[i][j]
            row = [c[0] + c[1] * t + c[2] * t ** 2 + c[3] * t ** 3
                   + c[4] * t ** 4 for t in range(j0, j0 + 5)]
            diffs = []
            for _ in range(5):
                diffs.append(row[0])
                row = [row[k + 1] - row[k] for k in range(len(row) - 1)]
            win[i][j] = diffs
    out = []
    for _ in range(count):
        out.append([[win[i][j][0] for j in range(n)] for i in range(n)])
        for i in range(n):
            for j in range(n):
                d = win[i][j]
                d[0] += d[1]
                d[1] += d[2]
                d[2] += d[3]
                d[3] += d[4]
    return out


# ---------------------------------------------------------------------------
# product tree bottom-up, remainder descent top-down


def _mat_mod(a, m):
    return [[x % m for x in row] for row in a]


def _tree_product(matrices):
    """Heap-layout product tree; node 1 is the exact product of all leaves."""
    n = len(matrices)
    size = 1
    while size < n:
        size *= 2
    nodes = [None] * (2 * size)
    nodes[size:size + n] = list(matrices)
    for k in range(size - 1, 0, -1):
        left, right = nodes[2 * k], nodes[2 * k + 1]
        if right is None:
            nodes[k] = left
        elif left is None:
            nodes[k] = right
        else:
            nodes[k] = mat_mul(left, right)
    return nodes, size


def _tree_moduli(moduli, size):
    prods = [mpz(1)] * (2 * size)
    prods[size:size + len(moduli)] = [mpz(m) for m in moduli]
    for k in range(size - 1, 0, -1):
        prods[k] = prods[2 * k] * prods[2 * k + 1]
    return prods


def _descend(nodes, prods, size, moduli, value):
    """Inclusive prefixes value*M_0..M_k mod m_k; zeros where m_k is 1."""
    dim = len(value)
    out = [None] * len(moduli)
    acc = [None] * (2 * size)
    if prods[1] != 1:
        acc[1] = _mat_mod(value, prods[1])
    for k in range(1, size):
        a = acc[k]
        if a is None:
            continue
        if prods[2 * k] != 1:
            acc[2 * k] = _mat_mod(a, prods[2 * k])
        m = prods[2 * k + 1]
        if m != 1:
            # reduce the left sibling before multiplying: the product then
            # stays at the size of the subtree modulus
            acc[2 * k + 1] = _mat_mod(mat_mul(a, _mat_mod(nodes[2 * k], m)), m)
        acc[k] = None
    for i, m in enumerate(moduli):
        if m == 1:
            out[i] = [[0] * dim for _ in range(dim)]
        else:
            out[i] = _mat_mod(mat_mul(acc[size + i], nodes[size + i]), m)
    return out


def remainder_tree(matrices, moduli, value=None):
    """All prefix products value*M_0...M_k, the k-th reduced mod m_k.

    Modulus-1 positions come back as zero matrices.  The product tree is
    built bottom-up exactly; the remainder descent prunes every subtree
    whose modulus product is 1.
    """
    if len(matrices) != len(moduli):
        raise ValueError("need one modulus per matrix")
    if not matrices:
        return []
    if value is None:
        value = mat_identity(len(matrices[0]))
    nodes, size = _tree_product(matrices)
    prods = _tree_moduli(moduli, size)
    return _descend(nodes, prods, size, list(moduli), value)


# ---------------------------------------------------------------------------
# the forest: chunked remainder trees joined by a carry


def remainder_forest(plan: ForestPlan, threads: int = 1):
    """Yield each chunk's extracted (p, C_p) as soon as the chunk completes.

    Chunk builds (leaf evaluation and product tree) are independent and
    may run ahead on worker threads; the descent and the carry update
    stay sequential, so the output does not depend on the thread count.
    """
    last = -1
    for i in range(len(plan.moduli) - 1, -1, -1):
        if plan.moduli[i] != 1:
            last = i
            break
    if last < 0:
        return
    if any(plan.moduli[i] != 1 for i in range(0, last + 1, 2)):
        raise ArithmeticError("unexpected modulus at an even index")
    n = (last + 1) // 2
    polys = pair_polynomials(plan)
    mu = [plan.moduli[2 * j + 1] for j in range(n)]
    csize = -(-n // (1 << plan.kappa))
    bounds = [(s, min(s + csize, n)) for s in range(0, n, csize)]
    suffix = [mpz(1)] * (len(bounds) + 1)
    for c in range(len(bounds) - 1, -1, -1):
        a, b = bounds[c]
        suffix[c] = math.prod(mu[a:b], start=mpz(1)) * suffix[c + 1]

    def build(c):
        a, b = bounds[c]
        leaves = _poly_values(polys, a, b - a)
        bits = max(x.bit_length() for mat in leaves for row in mat for x in row)
        nodes, size = _tree_product(leaves)
        prods = _tree_moduli(mu[a:b], size)
        return nodes, size, prods, bits

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        pending = deque()

        def submit(c):
            pending.append(build(c) if pool is None else pool.submit(build, c))

        ahead = min(max(1, threads), len(bounds))
        for c in range(ahead):
            submit(c)
        nxt = ahead
        value = mat_identity(W_DIM)
        for c, (a, b) in enumerate(bounds):
            item = pending.popleft()
            nodes, size, prods, bits = item if pool is None else item.result()
            if nxt < len(bounds):
                submit(nxt)
                nxt += 1
            plan.leaf_bits = max(plan.leaf_bits, bits)
            res = _descend(nodes, prods, size, mu[a:b], value)
            pairs = []
            for j in range(a, b):
                if mu[j] == 1:
                    continue
                p = mu[j]
                comp = pow(plan.lam6 % p, j + 1, p) if plan.strip else 1
                mat = tuple(tuple(int(x) * comp % p for x in row)
                            for row in res[j - a])
                pairs.append((p, mat))
            if suffix[c + 1] == 1:
                value = [[0] * W_DIM for _ in range(W_DIM)]
            else:
                value = _mat_mod(mat_mul(value, nodes[1]), suffix[c + 1])
                plan.carry_bits = max(
                    plan.carry_bits,
                    max(x.bit_length() for row in value for x in row))
            yield SubtreeResult(start=a, pairs=pairs,
                                carry=tuple(tuple(row) for row in value))
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)


def forest_Cp(curve, N: int, kappa: int | None = None, threads: int = 1,
              strip: bool = True):
    """C_p mod p for every good odd prime p <= N, plus the plan used."""
    ctx = curve if isinstance(curve, CurveContext) else CurveContext(curve)
    plan = make_plan(ctx, N, kappa=kappa, strip=strip)
    cps = {}
    for sub in remainder_forest(plan, threads=threads):
        for p, mat in sub.pairs:
            cps[p] = mat
    return cps, plan


# ---------------------------------------------------------------------------
# full range sweep: forest for the good primes, per-prime paths for the rest


@dataclass(frozen=True)
class RangeItem:
    """One prime's outcome in a range sweep."""

    p: int
    status: str                          # ok / fallback / bad_reduction / skipped
    result: CartierManinResult | None
    detail: str | None
    time_ms: float


def _fallback_item(curve, p: int, ctx: CurveContext, seed: int) -> RangeItem:
    t0 = time.perf_counter()
    try:
        res = cartier_manin_modp(curve, p, context=ctx, seed=seed)
    except DegenerateCurveError as exc:
        return RangeItem(p, "bad_reduction", None, str(exc),
                         (time.perf_counter() - t0) * 1000.0)
    except (ModelSearchExhausted, ValueError) as exc:
        return RangeItem(p, "skipped", None, str(exc),
                         (time.perf_counter() - t0) * 1000.0)
    status = "ok" if p == 2 else "fallback"
    return RangeItem(p, status, res, None,
                     (time.perf_counter() - t0) * 1000.0)


def range_cartier_manin(curve: QuarticCurve, N: int, kappa: int | None = None,
                        threads: int = 1, seed: int = 0, strip: bool = True):
    """Yield one RangeItem per prime p <= N in increasing order.

    Good primes are served by the forest, good-but-degenerate primes by
    the per-prime fallback, singular reductions as bad_reduction, and
    primes where no usable model exists as skipped.
    """
    ctx = CurveContext(curve)
    if ctx.bad_data.D == 0:
        raise DegenerateCurveError(
            "curve is degenerate over Q; try a unimodular change of variables")
    primes = sieve_primes(N)
    if not primes:
        return
    good = [p for p in primes if ctx.is_good(p)]
    gen = iter(())
    if good:
        plan = make_plan(ctx, N, kappa=kappa, strip=strip)
        gen = remainder_forest(plan, threads=threads)
    ready = {}
    share = {}
    spill = 0.0
    for p in primes:
        if not ctx.is_good(p):
            yield _fallback_item(curve, p, ctx, seed)
            continue
        while p not in ready:
            t0 = time.perf_counter()
            sub = next(gen)
            dt = (time.perf_counter() - t0) * 1000.0 + spill
            if sub.pairs:
                each = dt / len(sub.pairs)
                spill = 0.0
                for q, cp in sub.pairs:
                    ready[q] = cp
                    share[q] = each
            else:
                spill = dt
        t0 = time.perf_counter()
        res = ctx.result_from_Cp(p, ready.pop(p))
        dt = (time.perf_counter() - t0) * 1000.0
        yield RangeItem(p, "ok", res, None, share.pop(p) + dt)
