import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from motive_forge.arith import (CyclotomicInteger, FiniteField, IntPolynomial, build_field,
                                cyclotomic_polynomial, euler_phi, is_prime, padic_valuation,
                                poly_from_roots, prime_factors, units_mod)

SMALL_FIELDS = [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2)]


def naive_is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


@given(st.integers(-5, 3000))
def test_is_prime_matches_trial_division(n):
    assert is_prime(n) == naive_is_prime(n)


@given(st.integers(1, 5000))
def test_prime_factors_and_phi(n):
    ps = prime_factors(n)
    assert all(naive_is_prime(p) for p in ps)
    rest = n
    for p in ps:
        while rest % p == 0:
            rest //= p
    assert rest == 1
    assert euler_phi(n) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
    assert units_mod(n) == [k for k in range(n) if math.gcd(k, n) == 1]


@given(st.integers(1, 10**9), st.sampled_from([2, 3, 5, 7, 11]))
def test_padic_valuation(n, p):
    v = padic_valuation(n, p)
    assert n % p**v == 0 and n % p ** (v + 1) != 0


@pytest.mark.parametrize("p,r", SMALL_FIELDS)
def test_field_axioms_exhaustive(p, r):
    F = build_field(p, r)
    q = F.q
    add = F.addition_table()
    neg = F.negation()
    els = range(q)
    # additive group: 0 identity, negation inverse, commutative
    assert all(add[0, x] == x for x in els)
    assert all(add[x, neg[x]] == 0 for x in els)
    assert (add == add.T).all()
    # multiplication through logs agrees with the schoolbook product
    for x, y in itertools.product(range(1, q), repeat=2):
        assert F.mul(x, y) == F._slow_mul(x, y)
    # distributivity on a sample
    for x, y, z in itertools.islice(itertools.product(els, repeat=3), 0, 2000, 7):
        assert F.mul(x, int(add[y, z])) == int(add[F.mul(x, y), F.mul(x, z)])
    # generator has order exactly q-1
    assert sorted(F.exp_table.tolist()) == list(range(1, q))


@pytest.mark.parametrize("p,r", SMALL_FIELDS)
def test_trace_is_additive_and_surjective(p, r):
    F = build_field(p, r)
    tr = F.traces()
    add = F.addition_table()
    for x in range(F.q):
        for y in range(0, F.q, max(1, F.q // 8)):
            assert tr[add[x, y]] == (tr[x] + tr[y]) % p
    assert set(tr.tolist()) == set(range(p))


def test_field_rejects_composite_and_budget():
    with pytest.raises(ValueError):
        FiniteField(6)
    with pytest.raises(ValueError):
        FiniteField(2, 21)


def test_cyclotomic_polynomial_small():
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(8) == (1, 0, 0, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)


ms = st.sampled_from([3, 4, 5, 6, 8, 10, 12])


@st.composite
def cyclo(draw, m=None):
    m = m or draw(ms)
    c = draw(st.lists(st.integers(-20, 20), min_size=euler_phi(m), max_size=euler_phi(m)))
    return CyclotomicInteger(m, c)


@given(ms.flatmap(lambda m: st.tuples(cyclo(m), cyclo(m), cyclo(m))))
def test_cyclotomic_ring_laws(t):
    a, b, c = t
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == CyclotomicInteger.zero(a.m)


@given(ms.flatmap(lambda m: st.tuples(cyclo(m), cyclo(m))), st.data())
def test_galois_is_ring_automorphism(t, data):
    a, b = t
    s = data.draw(st.sampled_from(units_mod(a.m)))
    assert (a * b).galois(s) == a.galois(s) * b.galois(s)
    assert (a + b).galois(s) == a.galois(s) + b.galois(s)
    z = a.embed(s)
    assert abs(a.galois(s).embed(1) - z) < 1e-6 * (1 + abs(z))


@given(cyclo())
def test_norm_to_rational_is_real_positive(a):
    n = a * a.conj()
    assert abs(n.embed().imag) < 1e-6 * (1 + abs(n.embed()))


def test_zeta_power_relations():
    for m in (5, 8, 12):
        z = CyclotomicInteger.zeta_power(m, 1)
        assert z**m == CyclotomicInteger.one(m)
        assert sum((CyclotomicInteger.zeta_power(m, k) for k in range(m)),
                   CyclotomicInteger.zero(m)) == CyclotomicInteger.zero(m)


def test_lift_is_compatible():
    a = CyclotomicInteger(5, [1, 2, 3, 4])
    b = CyclotomicInteger(5, [0, -1, 0, 7])
    assert (a * b).lift(10) == a.lift(10) * b.lift(10)


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=6),
       st.lists(st.integers(-50, 50), min_size=1, max_size=6), st.integers(-7, 7))
def test_polynomial_evaluation_homomorphism(f, g, x):
    F, G = IntPolynomial(f), IntPolynomial(g)
    assert (F * G)(x) == F(x) * G(x)
    assert (F + G)(x) == F(x) + G(x)


def test_poly_from_roots_integers():
    roots = [CyclotomicInteger.integer(5, r) for r in (2, -3, 7)]
    expect = IntPolynomial([1, -2]) * IntPolynomial([1, 3]) * IntPolynomial([1, -7])
    assert poly_from_roots(roots) == expect


def test_poly_from_roots_galois_orbit():
    z = [CyclotomicInteger.zeta_power(5, k) for k in range(1, 5)]
    # prod (1 - zeta^k t) = 1 + t + t^2 + t^3 + t^4
    assert poly_from_roots(z) == IntPolynomial([1, 1, 1, 1, 1])
    with pytest.raises(ArithmeticError):
        poly_from_roots(z[:1])


@given(st.lists(st.sampled_from([1, 2, 3, 4, 9, 27, 8, 81]), min_size=1, max_size=5))
def test_newton_slopes_of_products_of_linears(vals):
    # prod (1 - p^e t) has slopes e, one per root
    f = IntPolynomial.one()
    es = []
    for v in vals:
        e = padic_valuation(v, 3) if v % 3 == 0 else 0
        f = f * IntPolynomial([1, -v])
        es.append(e)
    assert f.newton_slopes(3) == sorted(Fraction(e) for e in es)


def test_newton_slopes_normalised_by_r():
    f = IntPolynomial([1, 0, 11**6])  # roots +- i 11^3 over q = 121
    assert f.newton_slopes(11, 2) == [Fraction(3, 2)] * 2
