"""Scalar and extension-field arithmetic against exact rational oracles."""

import random
from fractions import Fraction

import pytest

from tatehk.errors import (AmbiguousValuation, DivisionByIndistinguishableZero,
                           NotAOneUnit)
from tatehk.field import (FieldDescriptor, KElement, k_teichmuller, parse_eisenstein,
                          parse_element, unit_decompose)
from tatehk.padic import PadicContext, PadicScalar, teichmuller, vp


def frac_vp(q: Fraction, p: int) -> int:
    assert q != 0
    return vp(q.numerator, p) - vp(q.denominator, p)


def agrees_with_fraction(x: PadicScalar, q: Fraction) -> bool:
    """x == q modulo p^(x.prec), checked with exact rationals."""
    d = Fraction(x.lift()) - q
    if d == 0:
        return True
    return frac_vp(d, x.ctx.p) >= x.prec


CTX5 = PadicContext(5, 20)
CTX3 = PadicContext(3, 20)


def test_embed_and_normal_form():
    x = PadicScalar.from_int(CTX5, 50)
    assert x.val == 2 and x.unit == 2 and x.prec == 22
    assert x.ord() == 2
    z = PadicScalar.from_int(CTX5, 0)
    assert z.is_zero() and z.prec == 20
    with pytest.raises(AmbiguousValuation):
        z.ord()


def test_add_full_precision():
    one = PadicScalar.from_int(CTX5, 1)
    two = one + one
    assert two.lift() == 2 and two.prec == 20 and not two.is_zero()


def test_mul_precision_rule():
    # prec(xy) = min(val_x + prec_y, val_y + prec_x)
    x = PadicScalar.from_int(CTX5, 25)   # val 2, prec 22
    y = PadicScalar.from_int(CTX5, 2)    # val 0, prec 20
    assert (x * y).prec == min(2 + 20, 0 + 22)
    assert (x * y).ord() == 2


def test_division_tracks_relative_precision():
    x = PadicScalar.from_int(CTX5, 1)
    y = PadicScalar.from_int(CTX5, 25)
    q = x / y
    assert q.ord() == -2
    assert q.prec == -2 + 20
    with pytest.raises(DivisionByIndistinguishableZero):
        x / PadicScalar.zero(CTX5)


def test_arithmetic_against_rationals():
    rng = random.Random(20260814)
    for _ in range(300):
        a = Fraction(rng.randint(-500, 500), rng.choice([1, 1, 2, 3, 7]))
        b = Fraction(rng.randint(-500, 500), rng.choice([1, 1, 2, 3, 7]))
        x = PadicScalar.from_rational(CTX5, a)
        y = PadicScalar.from_rational(CTX5, b)
        assert agrees_with_fraction(x + y, a + b)
        assert agrees_with_fraction(x - y, a - b)
        assert agrees_with_fraction(x * y, a * b)
        if b != 0 and frac_vp(b, 5) == 0:
            assert agrees_with_fraction(x / y, a / b)


def test_ord_is_additive():
    rng = random.Random(7)
    for _ in range(200):
        a = rng.randint(1, 10 ** 6) * 5 ** rng.randint(0, 3)
        b = rng.randint(1, 10 ** 6) * 5 ** rng.randint(0, 3)
        x = PadicScalar.from_int(CTX5, a)
        y = PadicScalar.from_int(CTX5, b)
        assert (x * y).ord() == vp(a, 5) + vp(b, 5)


def test_teichmuller_oracle():
    # omega(a) = a^(p^(prec-1)) mod p^prec, independent congruence oracle
    for ctx, a in [(CTX5, 2), (CTX5, 3), (CTX5, 4), (CTX3, 2)]:
        t = teichmuller(PadicScalar.from_int(ctx, a))
        oracle = pow(a, ctx.p ** (ctx.prec - 1), ctx.p ** ctx.prec)
        assert t.lift() % ctx.p ** ctx.prec == oracle
        assert t.lift() % ctx.p == a
        # root of unity of order dividing p-1
        pw = t ** (ctx.p - 1)
        assert (pw - 1).is_zero() and (pw - 1).prec >= ctx.prec


def test_teichmuller_rejects_non_units():
    with pytest.raises(NotAOneUnit):
        teichmuller(PadicScalar.from_int(CTX5, 10))


# -- extension field ----------------------------------------------------------


F_RAM = parse_eisenstein("s^2-5", CTX5)
F_BASE = FieldDescriptor.base(CTX5)


def test_eisenstein_parse_and_validate():
    assert F_RAM.e == 2 and F_RAM.coeffs == (Fraction(-5), Fraction(0))
    assert parse_eisenstein("s^3+5*s+10", CTX5).e == 3
    with pytest.raises(ValueError):
        parse_eisenstein("s^2-3", CTX5)     # constant term a unit
    with pytest.raises(ValueError):
        parse_eisenstein("s^2-25", CTX5)    # constant term valuation 2
    with pytest.raises(ValueError):
        parse_eisenstein("2*s^2-5", CTX5)   # not monic


def test_pi_squares_to_five():
    pi = F_RAM.pi()
    d = pi * pi - F_RAM.from_int(5)
    assert d.is_zero_at(40)
    assert pi.ord_pi() == 1
    assert F_RAM.from_int(5).ord_pi() == 2
    assert F_RAM.from_int(5).ord_p() == 1
    assert pi.ord_p() == Fraction(1, 2)


def test_base_field_is_degenerate_descriptor():
    pi = F_BASE.pi()
    assert pi.coeffs[0].lift() == 5
    assert pi.ord_pi() == 1 and pi.ord_p() == 1


def test_pi_inverse():
    for fld in (F_RAM, F_BASE):
        x = fld.pi() * fld.pi_inv()
        assert (x - fld.one()).is_zero_at(fld.e * 18)


def test_field_inverse_random():
    rng = random.Random(99)
    for fld in (F_RAM, F_BASE):
        for _ in range(40):
            coeffs = [rng.randint(-200, 200) for _ in range(fld.e)]
            x = fld.zero()
            for i, c in enumerate(coeffs):
                x = x + fld.pi() ** i * fld.from_int(c)
            if x.ord_pi_or_none() is None:
                continue
            y = x.inverse()
            assert (x * y - fld.one()).is_zero_at(fld.e * 14)


def test_field_mul_matches_polynomial_reduction():
    # (a + b*pi)(c + d*pi) = ac + 5bd + (ad + bc) pi for pi^2 = 5
    rng = random.Random(3)
    for _ in range(60):
        a, b, c, d = (rng.randint(-50, 50) for _ in range(4))
        x = F_RAM.from_int(a) + F_RAM.pi() * F_RAM.from_int(b)
        y = F_RAM.from_int(c) + F_RAM.pi() * F_RAM.from_int(d)
        z = x * y
        want = F_RAM.from_int(a * c + 5 * b * d) + F_RAM.pi() * F_RAM.from_int(a * d + b * c)
        assert (z - want).is_zero_at(36)


def test_unit_decompose_examples():
    a, omega, u = unit_decompose(F_RAM.pi())
    assert a == 1
    assert (omega - F_RAM.one()).is_zero_at(30)
    assert (u - F_RAM.one()).is_zero_at(30)

    a, omega, u = unit_decompose(F_RAM.from_int(-1))
    assert a == 0
    assert (omega + F_RAM.one()).is_zero_at(30)
    assert (u - F_RAM.one()).is_zero_at(30)


def test_unit_decompose_reassembles():
    rng = random.Random(14)
    for fld in (F_RAM, F_BASE):
        for _ in range(30):
            c0 = rng.randint(1, 400)
            k = rng.randint(0, 3)
            x = fld.from_int(c0) * fld.pi() ** k
            if x.ord_pi_or_none() is None:
                continue
            a, omega, u = unit_decompose(x)
            assert (u - fld.one()).ord_pi_or_none() is None or (u - fld.one()).ord_pi() >= 1
            back = fld.pi() ** a * omega * u
            assert (back - x).is_zero_at(fld.e * 12)


def test_teichmuller_in_k_rejects_non_units():
    with pytest.raises(NotAOneUnit):
        k_teichmuller(F_RAM.pi())


def test_parse_element():
    x = parse_element("p*(1+p)", F_BASE)
    assert x.coeffs[0].lift() % 5 ** 20 == 30 % 5 ** 20
    y = parse_element("pi^2", F_RAM)
    assert (y - F_RAM.from_int(5)).is_zero_at(40)
    z = parse_element("p^2*(1+p)", F_BASE)
    assert agrees_with_fraction(z.coeffs[0], Fraction(150))
    w = parse_element("1/2", F_BASE)
    assert agrees_with_fraction(w.coeffs[0], Fraction(1, 2))
    with pytest.raises(ValueError):
        parse_element("q+1", F_BASE)


def test_expansion_str():
    assert F_BASE.from_int(7).expansion_str(3) == "2 + pi + O(pi^3)"
    assert F_BASE.zero().expansion_str(4) == "O(pi^4)"
    x = F_RAM.from_int(5) + F_RAM.pi()
    assert x.expansion_str(4) == "pi + pi^2 + O(pi^4)"


def test_digit_expansion_roundtrip():
    rng = random.Random(5)
    for fld in (F_RAM, F_BASE):
        for _ in range(20):
            x = fld.from_int(rng.randint(0, 10 ** 8))
            digits = x.pi_digits(12)
            back = fld.zero()
            for j, d in enumerate(digits):
                back = back + fld.pi() ** j * fld.from_int(d)
            assert (back - x).is_zero_at(12)
