import itertools
import os
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motive_forge import zeta as Z
from motive_forge.arith import CyclotomicInteger, IntPolynomial, build_field, units_mod
from motive_forge.monomials import class_of, classify
from motive_forge.motives import characters_AQ, motive_table
from motive_forge.weights import AdmissiblePair, vafa_summary
from reference import (OCTIC_P11, OCTIC_P11_DIM2, OCTIC_P11_REMAINING_SIGNS, OCTIC_P13,
                       OCTIC_P13_DIM2, OCTIC_P13_REMAINING, OCTIC_P17, OCTIC_P17_REMAINING,
                       QUINTIC_P11, QUINTIC_P11_SLOPES, TABLE_R_P17, pmul)


def naive_jacobi(q, m, a):
    """J(a) by a plain triple loop over F_q, with J = -(raw sum)."""
    F = build_field(*Z.prime_power(q))
    counts = [0] * m
    minus_one = F.neg(1)
    for x1, x2, x3 in itertools.product(range(1, q), repeat=3):
        x4 = F.add(minus_one, F.neg(F.add(F.add(x1, x2), x3)))
        if x4 == 0:
            continue
        k = sum(ai * F.log(x) for ai, x in zip(a, (x1, x2, x3, x4))) % m
        counts[k] += 1
    return -CyclotomicInteger.from_power_counts(m, counts)


def table_rows(p, q):
    return {tuple(row.label): (row, lf) for row, lf in Z.factor_table(p, q)}


# ---------------------------------------------------------------------------
# Jacobi and Gauss sums


@pytest.mark.parametrize("q,m,a", [
    (11, 5, (1, 1, 1, 1, 1)),
    (11, 5, (1, 1, 1, 3, 4)),
    (11, 5, (1, 1, 2, 2, 4)),
    (16, 5, (1, 2, 3, 1, 3)),
    (17, 8, (1, 1, 2, 2, 2)),
    (17, 8, (1, 5, 2, 4, 4)),
    (7, 6, (1, 1, 1, 1, 2)),
])
def test_jacobi_matches_plain_loop(q, m, a):
    p, r = Z.prime_power(q)
    J = Z.jacobi_sum(build_field(p, r), m, a)
    assert J.value == naive_jacobi(q, m, a)


def test_calibrated_signs():
    s = Z.signs()
    assert (s.jacobi, s.gauss) == (-1, -1)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_jacobi_galois_equivariance(data):
    m, Q, q = data.draw(st.sampled_from([(5, (1, 1, 1, 1, 1), 11), (8, (1, 1, 2, 2, 2), 17),
                                         (5, (1, 1, 1, 1, 1), 31)]))
    p = AdmissiblePair(m, Q)
    a = data.draw(st.sampled_from(characters_AQ(p)))
    t = data.draw(st.sampled_from(units_mod(m)))
    F = Z.field_for(q)
    ta = tuple(t * x % m for x in a)
    assert Z.jacobi_sum(F, m, ta).value == Z.jacobi_sum(F, m, a).value.galois(t)


@pytest.mark.parametrize("m,Q,q", [(5, (1, 1, 1, 1, 1), 11), (8, (1, 1, 2, 2, 2), 17),
                                   (5, (1, 1, 1, 1, 1), 16)])
def test_jacobi_norm_exact(m, Q, q):
    F = Z.field_for(q)
    for a in characters_AQ(AdmissiblePair(m, Q)):
        J = Z.jacobi_sum(F, m, a)
        w = J.value * J.value.conj()
        assert w.is_rational() and w.to_int() == q**3
        assert J.weil_ok()


@pytest.mark.parametrize("m,Q,q", [(5, (1, 1, 1, 1, 1), 11), (8, (1, 1, 2, 2, 2), 17)])
def test_gauss_product_relation_holds_for_every_character(m, Q, q):
    # one sign, calibrated on a single character, must serve all of them
    F = Z.field_for(q)
    sg = Z.signs().gauss
    for a in characters_AQ(AdmissiblePair(m, Q)):
        J = Z.jacobi_sum(F, m, a).value.lift(m * F.p)
        assert J * q == Z.gauss_product(F, m, a) * sg


@pytest.mark.parametrize("q,m", [(11, 5), (16, 5), (17, 8)])
def test_gauss_sum_norm(q, m):
    F = Z.field_for(q)
    for c in range(1, m):
        g = Z.gauss_sum(F, m, c)
        assert g * g.conj() == CyclotomicInteger.integer(m * F.p, q)
    assert Z.gauss_sum(F, m, 0) == CyclotomicInteger.integer(m * F.p, -1)


def test_field_for_rejects_non_prime_power():
    with pytest.raises(ValueError):
        Z.field_for(12)


# ---------------------------------------------------------------------------
# printed local factors


def test_quintic_p11_factors(quintic):
    rows = table_rows(quintic, 11)
    assert set(rows) == set(QUINTIC_P11)
    for label, printed in QUINTIC_P11.items():
        lf = rows[label][1]
        assert list(lf.printed.coeffs) == printed
        assert list(lf.poly.coeffs) == list(Z.flip(IntPolynomial(printed)).coeffs)


def test_quintic_p11_slopes(quintic):
    rows = table_rows(quintic, 11)
    for label, slopes in QUINTIC_P11_SLOPES.items():
        assert rows[label][1].slopes == [Fraction(s) for s in slopes]


def test_octic_p17_factors(octic):
    rows = table_rows(octic, 17)
    for label, printed in OCTIC_P17.items():
        assert list(rows[label][1].printed.coeffs) == printed, label
    rest = [lab for lab in rows if lab not in OCTIC_P17]
    assert rest
    for label in rest:
        row, lf = rows[label]
        power = row.dim // 2
        assert list(lf.printed.coeffs) == pmul(*[OCTIC_P17_REMAINING] * power), label


def test_octic_p11_factors(octic):
    rows = table_rows(octic, 121)
    for label, printed in OCTIC_P11.items():
        assert list(rows[label][1].printed.coeffs) == printed, label
    for label, sign in OCTIC_P11_REMAINING_SIGNS.items():
        assert list(rows[label][1].printed.coeffs) == pmul(*[[1, sign * 11**3]] * 4), label
    assert list(rows[(2, 2, 4, 4, 4)][1].printed.coeffs) == OCTIC_P11_DIM2


def test_octic_p13_factors(octic):
    rows = table_rows(octic, 169)
    for label, printed in OCTIC_P13.items():
        assert list(rows[label][1].printed.coeffs) == printed, label
    for label, (row, lf) in rows.items():
        if label in OCTIC_P13:
            continue
        if row.dim == 4:
            assert list(lf.printed.coeffs) == OCTIC_P13_REMAINING, label
    assert list(rows[(2, 2, 4, 4, 4)][1].printed.coeffs) == OCTIC_P13_DIM2


def test_octic_p13_weight_motive_slopes(octic):
    # the printed claim of unit-root slopes does not hold; pin what the factor gives
    lf = table_rows(octic, 169)[(1, 1, 2, 2, 2)][1]
    assert lf.slopes == [Fraction(1, 2), Fraction(1, 2), Fraction(5, 2), Fraction(5, 2)]


@pytest.mark.parametrize("m,Q,q", [(5, (1, 1, 1, 1, 1), 11), (8, (1, 1, 2, 2, 2), 17),
                                   (6, (1, 1, 1, 1, 2), 7), (10, (1, 1, 1, 2, 5), 11)])
def test_factors_are_weil_polynomials(m, Q, q):
    p = AdmissiblePair(m, Q)
    total = 0
    for row, lf in Z.factor_table(p, q):
        assert lf.degree == row.dim
        assert lf.riemann_ok()
        assert Z._functional_equation_ok(lf.poly, q)
        total += row.dim * row.mult
    assert Z.full_P3(p, q).degree == total == vafa_summary(p).B3_Y


# ---------------------------------------------------------------------------
# supersingular primes


@pytest.mark.parametrize("m,Q,q", [(5, (1, 1, 1, 1, 1), 16), (5, (1, 1, 1, 1, 1), 81),
                                   (8, (1, 1, 2, 2, 2), 49), (6, (1, 1, 1, 1, 2), 25)])
def test_supersingular_closed_form_matches_jacobi(m, Q, q):
    p = AdmissiblePair(m, Q)
    assert Z.is_supersingular(m, q)
    for row in motive_table(p):
        a = row.orbits[0].representative
        direct = Z.local_factor(p, a, q)
        short = Z.local_factor(p, a, q, shortcut=True)
        assert short.regime == "supersingular"
        assert direct.poly == short.poly
        assert direct.riemann_ok() and short.riemann_ok()


def test_quintic_q16_printed_form(quintic):
    for row, lf in Z.factor_table(quintic, 16):
        assert list(lf.printed.coeffs) == pmul(*[[1, -64]] * row.dim)


@pytest.mark.parametrize("q", [4, 7])
def test_unsupported_field(quintic, q):
    # q = 4 has 2^2 = -1 mod 5, but the full order of 2 is needed
    assert not Z.is_supersingular(5, q)
    assert Z.regime(5, q) == "unsupported"
    with pytest.raises(Z.UnsupportedField):
        Z.local_factor(quintic, (1, 1, 1, 1, 1), q)


# ---------------------------------------------------------------------------
# per-class factors


def test_table_R_p17(octic):
    for classes, printed in TABLE_R_P17:
        got = Z.row_factor([class_of(octic, v) for v in classes], 17)
        assert list(got.coeffs) == printed, classes


def test_class_product_is_full_P3(quintic, octic):
    assert Z.class_product(quintic, 11) == Z.full_P3(quintic, 11)
    assert Z.class_product(octic, 17) == Z.full_P3(octic, 17)


@pytest.mark.parametrize("q", [17, 41])
def test_block_factors(octic, q):
    for block, lhs, rhs in Z.block_factors(octic, q):
        assert lhs == rhs


def test_non_rational_class_factor_is_flagged(octic):
    flagged = [c for c in classify(octic) if not Z.class_factor(c, 17).rational]
    assert flagged
    for c in flagged:
        assert "not defined over Q" in Z.class_factor(c, 17).warning


@pytest.mark.parametrize("m,Q,q", [(5, (1, 1, 1, 1, 1), 11), (8, (1, 1, 2, 2, 2), 17)])
def test_mirror_factor_is_constant_class(m, Q, q):
    p = AdmissiblePair(m, Q)
    assert Z.mirror_factor(p, q) == Z.constant_class_factor(p, q)


def test_octic_mirror_factor_value(octic):
    assert list(Z.mirror_factor(octic, 17).coeffs) == [
        1, 146, 14671, 1228828, 72078623, 3524085074, 118587876497]


# ---------------------------------------------------------------------------
# point counts


def naive_affine(p, q):
    F = Z.field_for(q)
    pw = [[F.power(x, e) for x in range(q)] for e in p.mi]
    n = 0
    for x in itertools.product(range(q), repeat=5):
        s = 0
        for i, xi in enumerate(x):
            s = F.add(s, pw[i][xi])
        n += s == 0
    return n


@pytest.mark.parametrize("m,Q,q", [(6, (1, 1, 1, 1, 2), 7), (5, (1, 1, 1, 1, 1), 11),
                                   (8, (1, 1, 2, 2, 2), 9)])
def test_brute_force_against_naive(m, Q, q):
    p = AdmissiblePair(m, Q)
    assert Z.brute_force_affine(p, q) == naive_affine(p, q)


@pytest.mark.parametrize("m,Q,q,motive", [
    (5, (1, 1, 1, 1, 1), 11, -461),
    (8, (1, 1, 2, 2, 2), 17, 568),
    (6, (1, 1, 1, 1, 2), 7, 388),
    (10, (1, 1, 1, 2, 5), 11, 358),
])
def test_count_routes_agree(m, Q, q, motive):
    rep = Z.count_report(AdmissiblePair(m, Q), q)
    assert rep.N_motive == motive
    assert rep.ok, rep.checks
    assert rep.N_brute == q**4 - (q - 1) * motive


def test_quintic_q11_projective_count(quintic):
    rep = Z.count_report(quintic, 11)
    assert rep.N_brute == 19251
    assert rep.weil == (19251 - 1) // 10


def test_octic_q17_brute(octic):
    assert Z.brute_force_affine(octic, 17) == 74433


def test_weil_count_from_P3(quintic):
    # N = 1 + q + q^2 + q^3 + a_1 for h11 = 1, a_1 the t-coefficient of P3
    a1 = Z.full_P3(quintic, 11).coeffs[1]
    assert Z.weil_count(quintic, 11) == 1 + 11 + 121 + 1331 + a1


def test_degenerate_branch(quintic):
    rep = Z.count_report(quintic, 13)
    assert rep.N_motive == 0
    assert rep.N_mon == Fraction(-1, 13)
    assert rep.ok, rep.checks
    d = Z.degenerate_dwork(quintic, 13)
    assert d["vectors"] == 0 and d["G0"] == -1 and d["zero_terms_total"] == 0


def test_partial_characters_when_gcd_is_proper():
    # gcd(10, 7 - 1) = 2: only the order-2 characters are available
    p = AdmissiblePair(10, (1, 1, 1, 2, 5))
    rep = Z.count_report(p, 7)
    assert rep.ok, rep.checks


def test_brute_force_budget(octic):
    with pytest.raises(ValueError):
        Z.brute_force_affine(octic, 97)


def test_grouped_requires_divisibility(quintic):
    with pytest.raises(ValueError):
        Z.dwork_count_grouped(quintic, 13)


# ---------------------------------------------------------------------------
# cache


def _warm(directory, p, q):
    cache = Z.FactorCache(str(directory))
    table = [lf.poly for _, lf in Z.factor_table(p, q, cache)]
    return cache, table


def test_cache_round_trip(tmp_path, quintic):
    c1, cold = _warm(tmp_path, quintic, 11)
    assert c1.hits == 0
    c2, warm = _warm(tmp_path, quintic, 11)
    assert warm == cold
    assert c2.hits == len(cold)


def test_cache_serialize_is_stable(tmp_path, quintic):
    poly = Z.local_factor(quintic, (1, 1, 1, 1, 1), 11).poly
    line = Z.FactorCache.serialize(quintic, 11, (1, 1, 1, 1, 1), poly)
    assert line == "5;1,1,1,1,1;11;1,1,1,1,1;1,-89,3861,-118459,1771561\n"
    assert Z.FactorCache._parse(line.rstrip("\n"))[1] == poly
    _warm(tmp_path, quintic, 11)
    first = (tmp_path / "factors-v1.txt").read_bytes()
    _warm(tmp_path, quintic, 11)
    assert (tmp_path / "factors-v1.txt").read_bytes() == first
    assert first.startswith(Z.FactorCache.HEADER.encode())


def test_cache_hit_skips_jacobi(tmp_path, quintic, monkeypatch):
    _warm(tmp_path, quintic, 11)

    def boom(*args, **kwargs):
        raise AssertionError("recomputed despite cache hit")

    monkeypatch.setattr(Z, "orbit_roots", boom)
    cache, table = _warm(tmp_path, quintic, 11)
    assert cache.hits == len(table)


def test_cache_truncated_final_line(tmp_path, quintic):
    _, cold = _warm(tmp_path, quintic, 11)
    path = tmp_path / "factors-v1.txt"
    text = path.read_text()
    path.write_text(text[:-7])  # cut into the last record, dropping its newline
    with pytest.warns(UserWarning, match="truncated"):
        cache = Z.FactorCache(str(tmp_path))
    assert len(cache.records) == len(cold) - 1


def test_cache_corrupted_line(tmp_path, quintic):
    _, cold = _warm(tmp_path, quintic, 11)
    path = tmp_path / "factors-v1.txt"
    lines = path.read_text().splitlines(keepends=True)
    # a plausible-looking record whose polynomial breaks the functional equation
    bad = lines[1].rsplit(",", 1)[0] + ",12345\n"
    path.write_text("".join(lines[:1] + [bad, "garbage;line\n"] + lines[2:]))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        cache = Z.FactorCache(str(tmp_path))
    assert sum("corrupted" in str(x.message) for x in w) == 2
    assert len(cache.records) == len(cold) - 1
    with pytest.warns(UserWarning, match="corrupted"):
        _, again = _warm(tmp_path, quintic, 11)
    assert again == cold


def test_cache_unwritable_directory(tmp_path, quintic):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    with pytest.warns(UserWarning, match="not writable"):
        cache = Z.FactorCache(str(blocker / "sub"))
    assert not cache.writable
    table = [lf.poly for _, lf in Z.factor_table(quintic, 11, cache)]
    assert table == [lf.poly for _, lf in Z.factor_table(quintic, 11)]
    assert not os.path.exists(blocker / "sub")


def test_functional_equation_filter():
    assert Z._functional_equation_ok(IntPolynomial([1, -89, 3861, -118459, 11**6]), 11)
    assert not Z._functional_equation_ok(IntPolynomial([1, -89, 3861, -118458, 11**6]), 11)
    assert Z._functional_equation_ok(IntPolynomial([1, 11**3]) ** 2, 121)
    assert not Z._functional_equation_ok(IntPolynomial([1, 11**3]), 11)
