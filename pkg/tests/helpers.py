"""Shared random generators for the property tests (seeded, stdlib only)."""

from fractions import Fraction

from fgderiv import QQ, LaurentPoly, TruncSeries1, TruncSeries2


def random_scalar(rng, field, p_coprime=None):
    """A random field value; with p_coprime set, a rational whose
    denominator is coprime to p (so reduction mod p is defined)."""
    if field is QQ:
        num = rng.randint(-9, 9)
        den = rng.randint(1, 9)
        if p_coprime is not None:
            while den % p_coprime == 0:
                den = rng.randint(1, 9)
        return Fraction(num, den)
    return rng.randrange(field.char)


def random_laurent(rng, field, lo=-4, hi=6, terms=4, p_coprime=None):
    coeffs = {}
    for _ in range(terms):
        coeffs[rng.randint(lo, hi)] = random_scalar(rng, field, p_coprime)
    return LaurentPoly(field, coeffs)


def random_ts1(rng, field, prec, zero_constant=False, unit_linear=False, p_coprime=None):
    coeffs = [random_scalar(rng, field, p_coprime) for _ in range(prec)]
    if zero_constant:
        coeffs[0] = field.zero
    if unit_linear:
        while not coeffs[1]:
            coeffs[1] = random_scalar(rng, field, p_coprime)
    return TruncSeries1(field, coeffs, prec)


def random_ts2(rng, field, prec, zero_constant=False, p_coprime=None):
    layers = [
        [random_scalar(rng, field, p_coprime) for _ in range(d + 1)] for d in range(prec)
    ]
    if zero_constant:
        layers[0][0] = field.zero
    return TruncSeries2(field, layers, prec)
