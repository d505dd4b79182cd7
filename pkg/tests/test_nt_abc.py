import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from abcmero.nt_abc import (
    FactorizationError,
    IntTriple,
    abc_check,
    enumerate_scan,
    factorize,
    height_q,
    is_probable_prime,
    pollard_rho,
    product_formula_residual,
    quality,
    radical,
    radical_log,
    radical_table,
    reduce_primitive,
)


def rad_by_trial_division(n: int) -> int:
    n, out, p = abs(n), 1, 2
    while p * p <= n:
        if n % p == 0:
            out *= p
            while n % p == 0:
                n //= p
        p += 1
    return out * (n if n > 1 else 1)


def random_triple(rng, bound=10 ** 7):
    while True:
        a, b = rng.randint(1, bound), rng.randint(1, bound)
        if rng.random() < 0.5:
            a = -a
        if a + b != 0:
            return IntTriple(a, b, -(a + b))


# ---------------------------------------------------------------- triples


def test_triple_validation():
    with pytest.raises(ValueError, match="sum nonzero"):
        IntTriple(1, 2, 3)
    with pytest.raises(ValueError, match="zero entry"):
        IntTriple(0, 1, -1)


@pytest.mark.parametrize(
    "t, expected",
    [((2, 16, -18), (1, 8, -9)), ((1, 8, -9), (1, 8, -9)), ((-3, -3, 6), (1, 1, -2)), ((5, -15, 10), (1, -3, 2))],
)
def test_reduce_primitive(t, expected):
    r = reduce_primitive(IntTriple(*t))
    assert (r.a, r.b, r.c) == expected
    assert sum(x < 0 for x in r) == 1


# ---------------------------------------------------------------- factorization


def test_factorize_examples():
    assert factorize(72).pairs == ((2, 3), (3, 2))
    assert factorize(6436343).pairs == ((23, 5),)
    assert factorize(1).pairs == ()


@pytest.mark.parametrize(
    "n",
    [
        2 ** 61 - 1,
        1000003 * 1000033,
        999999000001 * 999999937,
        (2 ** 31 - 1) * (2 ** 61 - 1),
        3 ** 10 * 109 * 1000000007 ** 2,
        600851475143,
    ],
)
def test_factorize_matches_sympy(n):
    f = factorize(n)
    assert dict(f.pairs) == sympy.factorint(n)
    assert f.value() == n
    assert list(f.primes) == sorted(f.primes)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10 ** 15))
def test_factorization_reconstructs_input(n):
    f = factorize(n)
    assert f.value() == n
    assert all(e >= 1 for _, e in f.pairs)
    assert all(sympy.isprime(p) for p in f.primes)


def test_miller_rabin_against_sympy():
    rng = random.Random(1)
    for _ in range(300):
        n = rng.randint(2, 10 ** 18)
        assert is_probable_prime(n) == sympy.isprime(n)
    assert not is_probable_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert is_probable_prime(2 ** 89 - 1)


def test_pollard_rho_splits_semiprime():
    n = 1000003 * 1000033
    d = pollard_rho(n)
    assert d in (1000003, 1000033)


def test_factorization_gives_up_with_partial_result():
    n = 12 * (2 ** 61 - 1) * (2 ** 89 - 1)
    with pytest.raises(FactorizationError, match="gave up") as info:
        factorize(n, rho_iterations=10)
    assert info.value.partial == {2: 2, 3: 1}
    assert info.value.remaining == (2 ** 61 - 1) * (2 ** 89 - 1)


def test_factorize_rejects_nonpositive():
    with pytest.raises(ValueError):
        factorize(0)


# ---------------------------------------------------------------- height, radical, quality


@pytest.mark.parametrize(
    "t, h",
    [((1, 8, -9), 0.5 * math.log(146)), ((2, 16, -18), 0.5 * math.log(146)), ((1, 1, -2), 0.5 * math.log(6))],
)
def test_height_q_examples(t, h):
    assert height_q(IntTriple(*t)) == pytest.approx(h, abs=1e-12)


def test_height_q_anchor_values():
    assert height_q(IntTriple(1, 8, -9)) == pytest.approx(2.49180, abs=1e-5)
    assert height_q(IntTriple(1, 1, -2)) == pytest.approx(0.89588, abs=1e-5)


@pytest.mark.parametrize("t, r", [((1, 8, -9), math.log(6)), ((2, 16, -18), math.log(6)), ((3, 5, -8), math.log(30))])
def test_radical_log_examples(t, r):
    assert radical_log(IntTriple(*t)) == pytest.approx(r, abs=1e-12)


def test_big_radical():
    t = IntTriple(2, 3 ** 10 * 109, -(23 ** 5))
    assert radical(t) == 15042
    assert abc_check(t).holds


def test_abc_check_examples():
    rep = abc_check(IntTriple(1, 8, -9))
    assert rep.h == pytest.approx(0.5 * math.log(146), abs=1e-12)
    assert rep.r_na == pytest.approx(math.log(6), abs=1e-12)
    assert rep.psi == pytest.approx(4 * math.sqrt(0.5 * math.log(146)), abs=1e-12)
    assert rep.psi == pytest.approx(6.31418, abs=1e-5)
    assert rep.margin == pytest.approx(rep.r_na + rep.psi - rep.h, abs=1e-15)
    assert rep.margin == pytest.approx(5.61413, abs=1e-5)
    assert rep.holds
    small = abc_check(IntTriple(1, 1, -2))
    assert small.h == pytest.approx(0.89588, abs=1e-5)
    assert small.r_na == pytest.approx(math.log(2), abs=1e-15)
    assert small.holds


@pytest.mark.parametrize(
    "t, qp, qc",
    [((1, 8, -9), 1.39070, 1.22629), ((1, 1, -2), None, 1.0), ((3, 5, -8), None, 0.61139)],
)
def test_quality_examples(t, qp, qc):
    q_paper, q_classical = quality(IntTriple(*t))
    assert q_classical == pytest.approx(qc, abs=1e-5)
    if qp is not None:
        assert q_paper == pytest.approx(qp, abs=1e-5)


# ---------------------------------------------------------------- properties


@pytest.mark.parametrize("seed", range(50))
def test_height_scaling_invariance(seed):
    t = random_triple(random.Random(seed))
    h = height_q(t)
    for k in (2, 3, 5):
        assert abs(height_q(k * t) - h) < 1e-9


def test_primitive_nonarch_sum_is_zero():
    rng = random.Random(4)
    for _ in range(50):
        t = reduce_primitive(random_triple(rng))
        primes = set()
        for x in t:
            primes.update(sympy.primefactors(abs(x)))
        vals = [max(-sympy.multiplicity(p, x) * math.log(p) for x in t) for p in primes]
        assert all(v == 0 for v in vals)
        assert height_q(t) == pytest.approx(0.5 * math.log(t.a ** 2 + t.b ** 2 + t.c ** 2), abs=1e-12)


def test_radical_against_independent_rad():
    rng = random.Random(9)
    for _ in range(60):
        t = reduce_primitive(random_triple(rng, 10 ** 6))
        expected = math.prod(sympy.primefactors(abs(t.a * t.b * t.c)))
        assert radical(t) == expected == rad_by_trial_division(t.a * t.b * t.c)
        assert radical_log(t) == pytest.approx(math.log(expected), abs=1e-12)


@pytest.mark.parametrize("x", [12, Fraction(5, 9), 1, Fraction(-7, 3), Fraction(2 ** 40, 3 ** 20)])
def test_product_formula_examples(x):
    assert abs(product_formula_residual(x)) < 1e-12


def test_product_formula_random():
    rng = random.Random(17)
    for _ in range(100):
        x = Fraction(rng.randint(1, 10 ** 6) * rng.choice((-1, 1)), rng.randint(1, 10 ** 6))
        assert abs(product_formula_residual(x)) < 1e-12


def test_product_formula_rejects_zero():
    with pytest.raises(ValueError):
        product_formula_residual(0)


# ---------------------------------------------------------------- enumeration


def test_radical_table_matches_trial_division():
    table = radical_table(2000)
    assert all(int(table[k]) == rad_by_trial_division(k) for k in range(1, 2001))


def brute_force_scan(N):
    """Plain-Python exhaustive oracle: best classical quality and psi-test failures."""
    best, best_key, violations = None, None, []
    for c in range(2, N + 1):
        for a in range(1, c // 2 + 1):
            if math.gcd(a, c) != 1:
                continue
            b = c - a
            r = math.log(rad_by_trial_division(a * b * c))
            q = math.log(c) / r
            key = (q, -a)
            if best_key is None or key > best_key:
                best, best_key = (a, b, -c), key
            h = 0.5 * math.log(a * a + b * b + c * c)
            if r + 4 * math.sqrt(h) - h < 0:
                violations.append((a, b, -c))
    return best, best_key[0], violations


def test_scan_small_bound():
    rep = enumerate_scan(10, top=3)
    assert tuple(rep.top[0].triple) == (1, 8, -9)
    assert rep.top[0].quality_classical == pytest.approx(1.22629, abs=1e-5)
    assert rep.violations == ()


def test_scan_trivial_bound():
    rep = enumerate_scan(2)
    assert [tuple(r.triple) for r in rep.top] == [(1, 1, -2)]
    assert rep.top[0].quality_classical == 1.0
    assert rep.count == 1


def test_scan_matches_exhaustive_oracle():
    N = 600
    rep = enumerate_scan(N, top=5)
    best, q, violations = brute_force_scan(N)
    assert tuple(rep.top[0].triple) == best
    assert rep.top[0].quality_classical == pytest.approx(q, abs=1e-12)
    assert [tuple(v.triple) for v in rep.violations] == violations == []
    assert rep.count == sum(1 for c in range(2, N + 1) for a in range(1, c // 2 + 1) if math.gcd(a, c) == 1)


def test_scan_independent_of_workers():
    one = enumerate_scan(1500, top=8, workers=1)
    many = enumerate_scan(1500, top=8, workers=3)
    assert one == many


def test_scan_rejects_bad_bound():
    with pytest.raises(ValueError):
        enumerate_scan(1)
