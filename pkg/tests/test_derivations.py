import json
import math
import random
from pathlib import Path

import pytest

from fgderiv import (
    GF,
    QQ,
    Derivation,
    FormalGroupLaw,
    FpElem,
    HSDerivation,
    InsufficientPrecision,
    LaurentPoly,
    NotMultiplicativelyRestricted,
    NotNilpotent,
    NotProportional,
    OrderOutOfRange,
    WindowOverflow,
    canonical_derivation,
    check_restricted,
    compute_cf,
    parse_laurent,
    prolong_ga1,
    prolong_gm1,
)
from helpers import random_laurent

F2 = GF(2)
F3 = GF(3)
F5 = GF(5)

FIXTURE = Path(__file__).parent / "fixtures" / "honda22_table.json"

WIDE = (-40, 400)


def honda_deriv(orders=8):
    return canonical_derivation(FormalGroupLaw.honda(2, 2, 17), orders)


# -- canonical derivations ---------------------------------------------------


def test_canonical_additive():
    d = canonical_derivation(FormalGroupLaw.additive(QQ, 8), 8)
    assert d.entries[0] == LaurentPoly.t(QQ)
    assert d.entries[1] == LaurentPoly.one(QQ)
    assert all(d.entries[n].is_zero() for n in range(2, 8))


def test_canonical_multiplicative():
    d = canonical_derivation(FormalGroupLaw.multiplicative(F2, 8), 8)
    assert d.entries[1] == parse_laurent("t + 1", F2)
    assert all(d.entries[n].is_zero() for n in range(2, 8))


def test_canonical_honda_table():
    d = honda_deriv()
    expected = ["t", "1", "t^2", "0", "t^12 + t^6", "0", "t^4", "0"]
    assert [e.to_text() for e in d.entries] == expected


def test_canonical_requires_stabilized_entries():
    # at N = 8 the Y^4 coefficient of the honda law has not stabilized
    with pytest.raises(InsufficientPrecision):
        canonical_derivation(FormalGroupLaw.honda(2, 2, 8), 8, probe_precision=17)


def test_canonical_bound_exceeds_precision():
    with pytest.raises(InsufficientPrecision):
        canonical_derivation(FormalGroupLaw.additive(F2, 4), 6)


def test_window_too_small_for_table():
    with pytest.raises(WindowOverflow):
        canonical_derivation(FormalGroupLaw.honda(2, 2, 17), 8, window=(-9, 8))


# -- applying the derivation -------------------------------------------------


def test_apply_additive_binomial():
    d = canonical_derivation(FormalGroupLaw.additive(QQ, 8), 8)
    # coefficient of X^2 in (t+X)^3
    assert d.apply(LaurentPoly(QQ, {3: 1}), 2) == LaurentPoly(QQ, {1: 3})


def test_apply_multiplicative_inverse_power():
    d = canonical_derivation(FormalGroupLaw.multiplicative(F2, 8), 8)
    tinv = LaurentPoly(F2, {-1: 1})
    assert d.apply(tinv, 1) == parse_laurent("t^-1 + t^-2", F2)


def test_apply_honda_matches_example_36():
    d = honda_deriv()
    tinv = LaurentPoly(F2, {-1: 1})
    assert d.apply(tinv, 4) == parse_laurent("t^10 + t^4 + t + t^-2 + t^-5", F2)


def test_apply_rejects_out_of_range_order():
    d = honda_deriv()
    with pytest.raises(OrderOutOfRange):
        d.apply(LaurentPoly.t(F2), 8)


def test_apply_is_additive():
    rng = random.Random(71)
    d = honda_deriv()
    for _ in range(10):
        q = random_laurent(rng, F2, -3, 5, 4)
        r = random_laurent(rng, F2, -3, 5, 4)
        n = rng.randrange(8)
        assert d.apply(q + r, n) == d.apply(q, n) + d.apply(r, n)


def test_additive_closed_form_oracle():
    # d_n(sum a_i t^i) = sum a_{i+n} C(i+n, n) t^i, binomials from math.comb
    rng = random.Random(73)
    for field in (QQ, F3):
        d = canonical_derivation(FormalGroupLaw.additive(field, 9), 9)
        for _ in range(10):
            coeffs = {e: (rng.randint(-5, 5) if field is QQ else rng.randrange(3)) for e in range(9)}
            q = LaurentPoly(field, coeffs)
            for n in range(9):
                expected = {}
                for e, a in q.coeffs.items():
                    if e >= n:
                        expected[e - n] = field.normalize(a * math.comb(e, n))
                assert d.apply(q, n) == LaurentPoly(field, expected)


# -- 1/t images --------------------------------------------------------------


def test_inverse_image_additive_closed_form():
    d = canonical_derivation(FormalGroupLaw.additive(QQ, 10), 10)
    invs = d.inverse_image(10)
    for n in range(10):
        assert invs[n] == LaurentPoly(QQ, {-n - 1: (-1) ** n})


def test_inverse_image_honda_hand_recursion():
    d = honda_deriv()
    invs = d.inverse_image(8)
    assert invs[1] == parse_laurent("t^-2", F2)
    assert invs[2] == parse_laurent("1 + t^-3", F2)
    assert invs[3] == parse_laurent("t^-4", F2)
    assert invs[4] == parse_laurent("t^10 + t^4 + t + t^-2 + t^-5", F2)


def test_inverse_image_agrees_with_apply():
    for law in (
        FormalGroupLaw.additive(QQ, 9),
        FormalGroupLaw.multiplicative(F2, 9),
        FormalGroupLaw.honda(2, 2, 17),
    ):
        d = canonical_derivation(law, 8, window=WIDE)
        tinv = LaurentPoly(law.field, {-1: 1})
        invs = d.inverse_image(8)
        for n in range(8):
            assert d.apply(tinv, n) == invs[n]


def test_routes_agree_for_arbitrary_tables():
    # the convolution recursion and the algebra-map route agree for any table
    rng = random.Random(79)
    for field in (F2, F5):
        for _ in range(5):
            entries = [LaurentPoly.t(field)] + [
                random_laurent(rng, field, 0, 4, 3) for _ in range(5)
            ]
            d = HSDerivation(entries, WIDE)
            tinv = LaurentPoly(field, {-1: 1})
            invs = d.inverse_image(6)
            for n in range(6):
                assert d.apply(tinv, n) == invs[n]


def test_inverse_image_bounds():
    d = honda_deriv()
    with pytest.raises(OrderOutOfRange):
        d.inverse_image(9)


# -- Leibniz -----------------------------------------------------------------


def test_leibniz_examples():
    d = honda_deriv()
    one = LaurentPoly.one(F2)
    assert d.check_leibniz(one, one, 5)
    da = canonical_derivation(FormalGroupLaw.additive(QQ, 8), 8)
    t = LaurentPoly.t(QQ)
    assert da.check_leibniz(t, t * t, 2)
    tinv = LaurentPoly(F2, {-1: 1})
    assert d.check_leibniz(LaurentPoly.t(F2), tinv, 4)


def test_leibniz_randomized():
    rng = random.Random(83)
    laws = [
        canonical_derivation(FormalGroupLaw.additive(QQ, 7), 7, window=WIDE),
        canonical_derivation(FormalGroupLaw.multiplicative(F2, 7), 7, window=WIDE),
        canonical_derivation(FormalGroupLaw.honda(2, 2, 17), 7, window=WIDE),
    ]
    for d in laws:
        for _ in range(8):
            q = random_laurent(rng, d.field, -2, 4, 3)
            r = random_laurent(rng, d.field, -2, 4, 3)
            n = rng.randrange(7)
            assert d.check_leibniz(q, r, n)


# -- iterativity -------------------------------------------------------------


def test_binomial_iterativity_additive():
    d = canonical_derivation(FormalGroupLaw.additive(F2, 17), 16, window=WIDE)
    probes = [LaurentPoly.t(F2), LaurentPoly(F2, {3: 1}), LaurentPoly(F2, {-1: 1})]
    for q in probes:
        images = {n: d.apply(q, n) for n in range(16)}
        for i in range(16):
            for j in range(16 - i):
                lhs = d.apply(images[j], i)
                rhs = images[i + j].scale(math.comb(i + j, i) % 2)
                assert lhs == rhs, (i, j, q)


def test_full_iterativity_canonical_laws():
    cases = [
        (FormalGroupLaw.additive(F2, 17), 16),
        (FormalGroupLaw.multiplicative(F2, 17), 16),
        (FormalGroupLaw.honda(2, 2, 17), 8),
        (FormalGroupLaw.multiplicative(F5, 9), 8),
    ]
    for law, orders in cases:
        d = canonical_derivation(law, orders, window=WIDE)
        rep = d.check_iterativity(law)
        assert rep.passed and rep.mode == "full" and rep.orders_checked == orders


def test_truncated_iterativity_fixture():
    d = HSDerivation.from_json(FIXTURE.read_text())
    law = FormalGroupLaw.honda(2, 2, 17)
    rep = d.check_iterativity(law.truncate(3))
    assert rep.passed and rep.mode == "truncated" and rep.orders_checked == 8


def test_fixture_matches_canonical_table():
    d = HSDerivation.from_json(FIXTURE.read_text())
    assert d == honda_deriv()


def test_fixture_round_trip_is_byte_identical():
    text = FIXTURE.read_text().strip()
    d = HSDerivation.from_json(text)
    assert d.to_json() == text
    assert HSDerivation.from_json(d.to_json()).to_json() == d.to_json()


def test_mutating_any_entry_breaks_iterativity():
    base = HSDerivation.from_json(FIXTURE.read_text())
    trunc = FormalGroupLaw.honda(2, 2, 17).truncate(3)
    assert base.check_iterativity(trunc).passed
    for n in range(1, 8):
        perturbed = base.entries[n] + LaurentPoly.t(F2)
        mutated = base.with_entry(n, perturbed)
        rep = mutated.check_iterativity(trunc)
        assert not rep.passed, f"perturbing entry {n} must break iterativity"
        assert rep.first_failure is not None
        i, j, mon = rep.first_failure
        assert 0 <= i < 8 and 0 <= j < 8 and mon


def test_spec_perturbation_example():
    base = HSDerivation.from_json(FIXTURE.read_text())
    mutated = base.with_entry(2, LaurentPoly.t(F2))
    rep = mutated.check_iterativity(FormalGroupLaw.honda(2, 2, 17).truncate(3))
    assert not rep.passed


def test_truncated_iterativity_requires_matching_bound():
    d = honda_deriv(orders=4)
    with pytest.raises(ValueError):
        d.check_iterativity(FormalGroupLaw.honda(2, 2, 17).truncate(3))


# -- restricted structure ----------------------------------------------------


def test_compute_cf_values():
    assert compute_cf(FormalGroupLaw.additive(F2, 8)) == FpElem(0, 2)
    assert compute_cf(FormalGroupLaw.multiplicative(F2, 8)) == FpElem(1, 2)
    assert compute_cf(FormalGroupLaw.multiplicative(F3, 8)) == FpElem(1, 3)
    assert compute_cf(FormalGroupLaw.multiplicative(F5, 8)) == FpElem(1, 5)
    assert compute_cf(FormalGroupLaw.honda(2, 2, 17)) == FpElem(0, 2)
    assert compute_cf(FormalGroupLaw.honda(3, 2, 12)) == FpElem(0, 3)


def test_compute_cf_requires_room_to_iterate():
    with pytest.raises(ValueError):
        compute_cf(FormalGroupLaw.additive(F5, 5))


def test_compute_cf_rejects_non_proportional():
    class FakeLaw:
        field = F2
        precision = 8

        def coeff_of_y(self, n, probe):
            return LaurentPoly(F2, {3: 1}), True

    with pytest.raises(NotProportional):
        compute_cf(FakeLaw())


def test_check_restricted_examples():
    assert check_restricted(Derivation(LaurentPoly.one(F2)), 0)
    assert check_restricted(Derivation(parse_laurent("1 + t", F2)), 1)
    assert not check_restricted(Derivation(parse_laurent("t^2", F2)), 1)
    # d(t) = t^2 over F_2: d^(2)(t) = 2t^3 = 0, so it IS 0-restricted
    assert check_restricted(Derivation(parse_laurent("t^2", F2)), 0)


def test_prolong_ga1_examples():
    d3 = prolong_ga1(Derivation(LaurentPoly.one(F3)))
    assert d3.bound == 3
    assert d3.entries[1] == LaurentPoly.one(F3)
    assert d3.entries[2].is_zero()

    d2 = prolong_ga1(Derivation(parse_laurent("t^2", F2)))
    assert d2.bound == 2
    assert d2.entries[1] == parse_laurent("t^2", F2)

    d5 = prolong_ga1(Derivation(LaurentPoly.one(F5)))
    with pytest.raises(OrderOutOfRange):
        d5.apply(LaurentPoly(F5, {5: 1}), 5)

    with pytest.raises(NotNilpotent):
        prolong_ga1(Derivation(parse_laurent("1 + t", F2)))


def test_prolong_gm1_examples():
    g3 = prolong_gm1(Derivation(parse_laurent("1 + t", F3)))
    assert g3.entries[1] == parse_laurent("1 + t", F3)
    assert g3.entries[2].is_zero()

    g2 = prolong_gm1(Derivation(parse_laurent("1 + t", F2)))
    assert g2.bound == 2

    with pytest.raises(NotMultiplicativelyRestricted):
        prolong_gm1(Derivation(LaurentPoly.one(F3)))


def test_prolongations_reproduce_canonical():
    for p in (2, 3, 5):
        field = GF(p)
        ga = prolong_ga1(Derivation(LaurentPoly.one(field)))
        assert ga == canonical_derivation(FormalGroupLaw.additive(field, p + 1), p)
        gm = prolong_gm1(Derivation(parse_laurent("1 + t", field)))
        assert gm == canonical_derivation(FormalGroupLaw.multiplicative(field, p + 1), p)


def test_prolongations_are_iterative():
    for p in (3, 5):
        field = GF(p)
        ga = prolong_ga1(Derivation(LaurentPoly.one(field)))
        assert ga.check_iterativity(FormalGroupLaw.additive(field, 2 * p).truncate(1)).passed
        gm = prolong_gm1(Derivation(parse_laurent("1 + t", field)))
        assert gm.check_iterativity(
            FormalGroupLaw.multiplicative(field, 2 * p).truncate(1)
        ).passed


# -- projective line ---------------------------------------------------------


def test_p1_additive_and_multiplicative_pass():
    for law in (FormalGroupLaw.additive(F2, 17), FormalGroupLaw.multiplicative(F2, 17)):
        d = canonical_derivation(law, 16)
        rep = d.check_p1_extendable(16)
        assert rep.passed


def test_p1_honda_fails_at_order_four():
    rep = honda_deriv().check_p1_extendable(8)
    assert not rep.passed
    assert rep.first_failure_order == 4
    assert rep.offending == ("t^10", "t^4", "t")
    assert str(rep) == "FAIL at n=4; offending: t^10, t^4, t"


def test_p1_at_order_two_is_degree_condition():
    rng = random.Random(89)
    for _ in range(20):
        image = random_laurent(rng, F3, 0, 5, 3)
        d = HSDerivation([LaurentPoly.t(F3), image], WIDE)
        rep = d.check_p1_extendable(2)
        deg = image.degree()
        assert rep.passed == (deg is None or deg <= 2)


# -- windows and construction ------------------------------------------------


def test_entry_zero_must_be_t():
    with pytest.raises(ValueError):
        HSDerivation([LaurentPoly.one(F2)], WIDE)


def test_window_overflow_during_apply():
    d = HSDerivation([LaurentPoly.t(QQ), LaurentPoly.one(QQ)], (-2, 2))
    with pytest.raises(WindowOverflow):
        d.apply(LaurentPoly(QQ, {3: 1}), 1)  # (t+X)^3 needs t^3


def test_window_overflow_message_names_context():
    d = HSDerivation([LaurentPoly.t(QQ), LaurentPoly.one(QQ)], (-1, 2))
    with pytest.raises(WindowOverflow) as err:
        d.inverse_image(2)
    assert "window" in str(err.value)


def test_table_serialization_round_trip():
    d = honda_deriv()
    obj = json.loads(d.to_json())
    assert obj["p"] == 2 and obj["B"] == 8
    restored = HSDerivation.from_json_obj(obj)
    assert restored == d
