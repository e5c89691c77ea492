"""Exact scalar arithmetic: rationals over Q and prime fields F_p.

Python ints are already arbitrary-precision integers and
``fractions.Fraction`` already stores exact rationals in reduced form
(positive denominator, gcd 1), so those two types are used directly.
This module adds the pieces that are missing: prime-field elements,
reduction of p-integral rationals, and the field objects that every
series in the package carries as a tag.

Series store *raw* coefficient values (``Fraction`` over Q, ``int`` in
``[0, p)`` over F_p) and route arithmetic through the field object;
``FpElem`` is the self-contained scalar type for callers who want a
value that knows its own modulus.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DivisionByZero, FieldMismatch, IntegralityViolation, ParseError

# Exact reduced rational; invariants (den > 0, gcd(num, den) = 1) are
# maintained by Fraction itself.
Rat = Fraction


def is_prime(n: int) -> bool:
    """Trial-division primality test; moduli in this package are tiny."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class RationalField:
    """The field Q. Raw coefficient values are ``Fraction``."""

    char = 0
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise FieldMismatch(f"cannot coerce {x!r} into Q")

    def normalize(self, x) -> Fraction:
        # Intermediate sums may be plain ints (empty accumulators).
        return x if isinstance(x, Fraction) else Fraction(x)

    def neg(self, x):
        return -x

    def inv(self, x) -> Fraction:
        if x == 0:
            raise DivisionByZero("inverse of 0 in Q")
        return 1 / Fraction(x)

    def div(self, a, b) -> Fraction:
        if b == 0:
            raise DivisionByZero("division by 0 in Q")
        return Fraction(a) / b

    def is_negative(self, x) -> bool:
        return x < 0

    def abs(self, x):
        return -x if x < 0 else x

    def render(self, x) -> str:
        return str(x)

    def parse(self, s: str) -> Fraction:
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational literal {s!r}") from exc

    def __repr__(self):
        return "QQ"


QQ = RationalField()

_prime_fields: dict[int, "PrimeField"] = {}


class PrimeField:
    """The prime field F_p. Raw coefficient values are ints in [0, p).

    Instances are cached, one per p, so field equality is identity.
    Construct through :func:`GF`.
    """

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.char = p
        self.zero = 0
        self.one = 1 % p

    def coerce(self, x) -> int:
        if isinstance(x, int):
            return x % self.char
        if isinstance(x, FpElem):
            if x.p != self.char:
                raise FieldMismatch(f"F_{x.p} element in F_{self.char} context")
            return x.value
        if isinstance(x, Fraction):
            return rat_reduce_mod_p(x, self.char).value
        raise FieldMismatch(f"cannot coerce {x!r} into F_{self.char}")

    def normalize(self, x: int) -> int:
        return x % self.char

    def neg(self, x: int) -> int:
        return -x % self.char

    def inv(self, x: int) -> int:
        x %= self.char
        if x == 0:
            raise DivisionByZero(f"inverse of 0 in F_{self.char}")
        return pow(x, self.char - 2, self.char)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.char

    def is_negative(self, x) -> bool:
        return False

    def abs(self, x):
        return x

    def render(self, x) -> str:
        return str(x)

    def parse(self, s: str) -> int:
        try:
            return int(s) % self.char
        except ValueError as exc:
            raise ParseError(f"bad F_{self.char} literal {s!r}") from exc

    def __repr__(self):
        return f"GF({self.char})"


def GF(p: int) -> PrimeField:
    """Return the cached field object for F_p; p must be prime."""
    field = _prime_fields.get(p)
    if field is None:
        field = PrimeField(p)
        _prime_fields[p] = field
    return field


class FpElem:
    """An element of F_p that carries its modulus.

    Arithmetic between elements of different primes raises
    :class:`FieldMismatch`; ints mix freely.
    """

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        GF(p)  # validates primality once, then caches
        self.value = value % p
        self.p = p

    def _lift(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise FieldMismatch(f"mixing F_{self.p} and F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElem(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElem(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElem(v - self.value, self.p)

    def __mul__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElem(self.value * v, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.value, self.p)

    def inv(self) -> "FpElem":
        return FpElem(GF(self.p).inv(self.value), self.p)

    def __truediv__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return self * FpElem(v, self.p).inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return FpElem(pow(self.value, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return f"{self.value} mod {self.p}"

    def __repr__(self):
        return f"FpElem({self.value}, {self.p})"


def rat_p_integral(a, p: int) -> bool:
    """True iff p does not divide the denominator of a (a in lowest
    terms), i.e. reduction of a mod p is defined."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    a = QQ.coerce(a)
    return a.denominator % p != 0


def rat_reduce_mod_p(a, p: int) -> FpElem:
    """Reduce a p-integral rational mod p: num * den^(-1) in F_p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    a = QQ.coerce(a)
    if a.denominator % p == 0:
        raise IntegralityViolation(f"{a} is not {p}-integral")
    num = a.numerator % p
    den_inv = pow(a.denominator % p, p - 2, p)
    return FpElem(num * den_inv, p)


def fp_inv(a: FpElem) -> FpElem:
    """Multiplicative inverse in F_p; zero raises DivisionByZero."""
    return a.inv()
