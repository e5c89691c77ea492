"""Truncated power series and Laurent polynomials over an exact field.

Four representations, chosen to match how each object is actually used:

* ``LaurentPoly`` — sparse map exponent -> coefficient, the ring k[t,1/t].
* ``TruncSeries1`` — dense univariate series known modulo X^N.
* ``TruncSeries2`` — dense bivariate series truncated by *total* degree,
  stored as homogeneous layers; total-degree truncation is the grading
  stable under substituting series into series.
* ``XSeriesOverLaurent`` — a polynomial in X of bounded degree whose
  coefficients are Laurent polynomials; the carrier of D_X(t).

All values are immutable after construction.  Arithmetic between series
of unequal precision is allowed and yields the minimum precision; mixing
coefficient fields raises ``FieldMismatch``.
"""

from __future__ import annotations

import re

from .errors import (
    FieldMismatch,
    IntegralityViolation,
    NotAUnit,
    NotReversible,
    ParseError,
    PositiveValuationRequired,
)
from .scalars import GF, QQ


def _same_field(a, b):
    if a.field is not b.field:
        raise FieldMismatch(f"cannot combine series over {a.field!r} and {b.field!r}")


def _mon_txt(var: str, e: int) -> str:
    if e == 0:
        return ""
    if e == 1:
        return var
    return f"{var}^{e}"


def _join_terms(field, terms) -> str:
    """Render (coefficient, monomial-text) pairs with signs pulled out.

    F_p values have no sign, so prime-field output only ever joins
    with " + ", matching the golden-test format.
    """
    parts = []
    for c, mon in terms:
        neg = field.is_negative(c)
        mag = field.abs(c)
        if mon and mag == field.one:
            body = mon
        elif mon:
            body = f"{field.render(mag)}*{mon}"
        else:
            body = field.render(mag)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


class LaurentPoly:
    """Finite-support Laurent polynomial in t over QQ or GF(p)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs=None):
        clean = {}
        if coeffs:
            for e, c in coeffs.items():
                c = field.coerce(c)
                if c:
                    clean[int(e)] = c
        self.field = field
        self.coeffs = clean

    @classmethod
    def _raw(cls, field, clean):
        obj = object.__new__(cls)
        obj.field = field
        obj.coeffs = clean
        return obj

    @classmethod
    def zero(cls, field):
        return cls._raw(field, {})

    @classmethod
    def one(cls, field):
        return cls(field, {0: field.one})

    @classmethod
    def t(cls, field):
        return cls(field, {1: field.one})

    @classmethod
    def monomial(cls, field, e: int, c=1):
        return cls(field, {e: c})

    @classmethod
    def constant(cls, field, c):
        return cls(field, {0: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, e: int):
        return self.coeffs.get(e, self.field.zero)

    def support(self):
        return sorted(self.coeffs)

    def degree(self):
        """Top exponent, or None for the zero polynomial."""
        return max(self.coeffs) if self.coeffs else None

    def valuation(self):
        """Bottom exponent, or None for the zero polynomial."""
        return min(self.coeffs) if self.coeffs else None

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        _same_field(self, other)
        norm = self.field.normalize
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            v = norm(out.get(e, 0) + c)
            if v:
                out[e] = v
            elif e in out:
                del out[e]
        return LaurentPoly._raw(self.field, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        neg = self.field.neg
        return LaurentPoly._raw(self.field, {e: neg(c) for e, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            _same_field(self, other)
            acc = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = e1 + e2
                    acc[e] = acc.get(e, 0) + c1 * c2
            norm = self.field.normalize
            out = {}
            for e, v in acc.items():
                v = norm(v)
                if v:
                    out[e] = v
            return LaurentPoly._raw(self.field, out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.field.coerce(c)
        if not c:
            return LaurentPoly.zero(self.field)
        norm = self.field.normalize
        out = {}
        for e, v in self.coeffs.items():
            w = norm(v * c)
            if w:
                out[e] = w
        return LaurentPoly._raw(self.field, out)

    def shifted(self, k: int):
        """Multiply by t^k."""
        return LaurentPoly._raw(self.field, {e + k: c for e, c in self.coeffs.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use unit_inverse for negative powers")
        result = LaurentPoly.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def derivative(self):
        """Formal d/dt, valid on all of k[t,1/t]."""
        norm = self.field.normalize
        out = {}
        for e, c in self.coeffs.items():
            v = norm(c * e)
            if v:
                out[e - 1] = v
        return LaurentPoly._raw(self.field, out)

    def unit_inverse(self):
        """Inverse in k[t,1/t]; defined exactly for monomials c*t^e."""
        if len(self.coeffs) != 1:
            raise NotAUnit(f"{self} is not a unit of k[t,1/t]")
        (e, c), = self.coeffs.items()
        return LaurentPoly._raw(self.field, {-e: self.field.inv(c)})

    def reduce_mod_p(self, p: int):
        """Coefficient-wise reduction mod p of a rational Laurent poly."""
        if self.field is not QQ:
            raise FieldMismatch("reduce_mod_p expects a series over Q")
        gf = GF(p)
        out = {}
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if c.denominator % p == 0:
                raise IntegralityViolation(f"coefficient {c} of t^{e} is not {p}-integral")
            v = c.numerator * pow(c.denominator, p - 2, p) % p
            if v:
                out[e] = v
        return LaurentPoly._raw(gf, out)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    __hash__ = None

    def to_text(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        terms = [(self.coeffs[e], _mon_txt(var, e)) for e in sorted(self.coeffs, reverse=True)]
        return _join_terms(self.field, terms)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"LaurentPoly({self.field!r}, {self.to_text()!r})"


_TOKEN_NUM = re.compile(r"\d+(?:/\d+)?")
_TOKEN_VAR = re.compile(r"[A-Za-z_]\w*")
_TOKEN_EXP = re.compile(r"\^(-?\d+)")


def _tokenize_poly(s: str):
    tokens = []
    i, n = 0, len(s)
    while i < n:
        ch = s[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*":
            tokens.append(ch)
            i += 1
            continue
        if ch == "^":
            m = _TOKEN_EXP.match(s, i)
            if not m:
                raise ParseError(f"bad exponent at position {i} in {s!r}")
            tokens.append(("exp", int(m.group(1))))
            i = m.end()
            continue
        m = _TOKEN_NUM.match(s, i)
        if m:
            tokens.append(("num", m.group(0)))
            i = m.end()
            continue
        m = _TOKEN_VAR.match(s, i)
        if m:
            tokens.append(("var", m.group(0)))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r} in {s!r}")
    return tokens


def parse_laurent(s: str, field, var: str = "t") -> LaurentPoly:
    """Parse the canonical text rendering, e.g. "t^10 + t^4 + t + t^-2".

    Accepts optional "c*" coefficient prefixes ("3*t^2", "1/2*t") and
    leading or joining signs.  The inverse of LaurentPoly.to_text.
    """
    tokens = _tokenize_poly(s)
    if not tokens:
        raise ParseError("empty polynomial text")
    coeffs: dict = {}
    pos = 0
    first = True
    while pos < len(tokens):
        sign = 1
        saw_sign = False
        while pos < len(tokens) and tokens[pos] in ("+", "-"):
            saw_sign = True
            if tokens[pos] == "-":
                sign = -sign
            pos += 1
        if pos >= len(tokens):
            raise ParseError(f"dangling sign in {s!r}")
        if not first and not saw_sign:
            raise ParseError(f"missing '+' or '-' between terms in {s!r}")
        first = False
        coeff_txt = None
        tok = tokens[pos]
        if isinstance(tok, tuple) and tok[0] == "num":
            coeff_txt = tok[1]
            pos += 1
            if pos < len(tokens) and tokens[pos] == "*":
                pos += 1
        exponent = 0
        if pos < len(tokens) and isinstance(tokens[pos], tuple) and tokens[pos][0] == "var":
            if tokens[pos][1] != var:
                raise ParseError(f"expected variable {var!r}, got {tokens[pos][1]!r}")
            pos += 1
            exponent = 1
            if pos < len(tokens) and isinstance(tokens[pos], tuple) and tokens[pos][0] == "exp":
                exponent = tokens[pos][1]
                pos += 1
        elif coeff_txt is None:
            raise ParseError(f"expected a term at token {pos} in {s!r}")
        c = field.parse(coeff_txt) if coeff_txt is not None else field.one
        if sign < 0:
            c = field.neg(c)
        prev = coeffs.get(exponent, field.zero)
        coeffs[exponent] = field.normalize(prev + c)
    return LaurentPoly(field, coeffs)


class TruncSeries1:
    """Univariate power series known modulo X^prec, dense storage."""

    __slots__ = ("field", "prec", "coeffs")

    def __init__(self, field, coeffs=(), prec=None):
        coeffs = [field.coerce(c) for c in coeffs]
        if prec is None:
            prec = len(coeffs)
        if prec < 1:
            raise ValueError("precision must be >= 1")
        if len(coeffs) < prec:
            coeffs.extend([field.zero] * (prec - len(coeffs)))
        self.field = field
        self.prec = prec
        self.coeffs = tuple(coeffs[:prec])

    @classmethod
    def _raw(cls, field, coeffs, prec):
        obj = object.__new__(cls)
        obj.field = field
        obj.prec = prec
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, field, prec):
        return cls(field, (), prec)

    @classmethod
    def x(cls, field, prec):
        if prec < 2:
            raise ValueError("need precision >= 2 to represent X")
        return cls(field, (field.zero, field.one), prec)

    @classmethod
    def from_dict(cls, field, terms, prec):
        coeffs = [field.zero] * prec
        for e, c in terms.items():
            if not 0 <= e < prec:
                raise ValueError(f"exponent {e} outside [0, {prec})")
            coeffs[e] = field.coerce(c)
        return cls(field, coeffs, prec)

    def coeff(self, d: int):
        if not 0 <= d < self.prec:
            raise IndexError(f"degree {d} is beyond precision {self.prec}")
        return self.coeffs[d]

    def valuation(self):
        """Lowest degree with nonzero coefficient, or None if 0 mod X^prec."""
        for d, c in enumerate(self.coeffs):
            if c:
                return d
        return None

    def truncate(self, prec: int):
        if prec > self.prec:
            raise ValueError(f"cannot extend precision {self.prec} to {prec}")
        return TruncSeries1._raw(self.field, self.coeffs[:prec], prec)

    def __add__(self, other):
        if not isinstance(other, TruncSeries1):
            return NotImplemented
        _same_field(self, other)
        n = min(self.prec, other.prec)
        norm = self.field.normalize
        coeffs = tuple(norm(a + b) for a, b in zip(self.coeffs[:n], other.coeffs[:n]))
        return TruncSeries1._raw(self.field, coeffs, n)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        neg = self.field.neg
        return TruncSeries1._raw(self.field, tuple(neg(c) for c in self.coeffs), self.prec)

    def __mul__(self, other):
        if isinstance(other, TruncSeries1):
            _same_field(self, other)
            n = min(self.prec, other.prec)
            out = [0] * n
            a, b = self.coeffs, other.coeffs
            for i in range(min(len(a), n)):
                ai = a[i]
                if not ai:
                    continue
                for j in range(min(len(b), n - i)):
                    bj = b[j]
                    if bj:
                        out[i + j] += ai * bj
            norm = self.field.normalize
            return TruncSeries1._raw(self.field, tuple(norm(v) for v in out), n)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.field.coerce(c)
        norm = self.field.normalize
        return TruncSeries1._raw(self.field, tuple(norm(v * c) for v in self.coeffs), self.prec)

    def _add_const(self, c):
        coeffs = list(self.coeffs)
        coeffs[0] = self.field.normalize(coeffs[0] + c)
        return TruncSeries1._raw(self.field, tuple(coeffs), self.prec)

    def compose(self, g: "TruncSeries1") -> "TruncSeries1":
        """f(g(X)) mod X^n, n = min precision; g must have g(0) = 0."""
        _same_field(self, g)
        if g.coeffs[0]:
            raise PositiveValuationRequired("inner series must have zero constant term")
        n = min(self.prec, g.prec)
        g = g.truncate(n)
        res = TruncSeries1.zero(self.field, n)
        for c in reversed(self.coeffs[:n]):
            res = res * g
            if c:
                res = res._add_const(c)
        return res

    def reversion(self) -> "TruncSeries1":
        """Compositional inverse g with f(g) = g(f) = X mod X^prec.

        Degree-by-degree linear solve on g(f) = X using the running
        powers of f; requires f(0) = 0 and an invertible linear term.
        """
        field = self.field
        n = self.prec
        if n < 2 or self.coeffs[0] or not self.coeffs[1]:
            raise NotReversible("need f(0) = 0 and an invertible X-coefficient")
        f1 = self.coeffs[1]
        g = [field.zero] * n
        g[1] = field.inv(f1)
        fpow = self  # f^k, starting at k = 1
        powers = [None, self.coeffs]
        for k in range(2, n):
            fpow = fpow * self
            powers.append(fpow.coeffs)
        f1d = f1
        for d in range(2, n):
            f1d = field.normalize(f1d * f1)  # = f1^d, coefficient of X^d in f^d
            s = 0
            for k in range(1, d):
                if g[k]:
                    s += g[k] * powers[k][d]
            g[d] = field.div(field.neg(field.normalize(s)), f1d)
        return TruncSeries1._raw(field, tuple(g), n)

    def unit_inverse(self) -> "TruncSeries1":
        """Multiplicative inverse mod X^prec; needs a unit constant term."""
        field = self.field
        if not self.coeffs[0]:
            raise NotAUnit("constant term is zero")
        inv0 = field.inv(self.coeffs[0])
        n = self.prec
        out = [field.zero] * n
        out[0] = inv0
        for d in range(1, n):
            s = 0
            for i in range(1, d + 1):
                if i < len(self.coeffs) and self.coeffs[i] and out[d - i]:
                    s += self.coeffs[i] * out[d - i]
            out[d] = field.normalize(field.neg(field.normalize(s)) * inv0)
        return TruncSeries1._raw(field, tuple(out), n)

    def reduce_mod_p(self, p: int) -> "TruncSeries1":
        if self.field is not QQ:
            raise FieldMismatch("reduce_mod_p expects a series over Q")
        gf = GF(p)
        out = []
        for d, c in enumerate(self.coeffs):
            if c.denominator % p == 0:
                raise IntegralityViolation(f"coefficient {c} of X^{d} is not {p}-integral")
            out.append(c.numerator * pow(c.denominator, p - 2, p) % p)
        return TruncSeries1._raw(gf, tuple(out), self.prec)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries1):
            return NotImplemented
        return (
            self.field is other.field
            and self.prec == other.prec
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def to_text(self, var: str = "X") -> str:
        terms = [(c, _mon_txt(var, d)) for d, c in enumerate(self.coeffs) if c]
        body = _join_terms(self.field, terms) if terms else "0"
        return f"{body} + O(deg {self.prec})"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"TruncSeries1({self.field!r}, {self.to_text()!r})"


class TruncSeries2:
    """Bivariate series truncated by total degree.

    layers[d][k] is the coefficient of X^(d-k) * Y^k, for d < prec.
    """

    __slots__ = ("field", "prec", "layers")

    def __init__(self, field, layers, prec=None):
        if prec is None:
            prec = len(layers)
        if prec < 1:
            raise ValueError("precision must be >= 1")
        full = []
        for d in range(prec):
            row = layers[d] if d < len(layers) else ()
            vals = [field.coerce(row[k]) if k < len(row) else field.zero for k in range(d + 1)]
            full.append(tuple(vals))
        self.field = field
        self.prec = prec
        self.layers = tuple(full)

    @classmethod
    def _raw(cls, field, layers, prec):
        obj = object.__new__(cls)
        obj.field = field
        obj.prec = prec
        obj.layers = layers
        return obj

    @classmethod
    def zero(cls, field, prec):
        return cls(field, (), prec)

    @classmethod
    def from_monomials(cls, field, terms, prec):
        layers = [[field.zero] * (d + 1) for d in range(prec)]
        for (i, j), c in terms.items():
            if i < 0 or j < 0 or i + j >= prec:
                raise ValueError(f"monomial X^{i}*Y^{j} outside total degree < {prec}")
            layers[i + j][j] = field.coerce(c)
        return cls(field, layers, prec)

    @classmethod
    def x(cls, field, prec):
        return cls.from_monomials(field, {(1, 0): field.one}, prec)

    @classmethod
    def y(cls, field, prec):
        return cls.from_monomials(field, {(0, 1): field.one}, prec)

    @classmethod
    def from_ts1_in_x(cls, f: TruncSeries1) -> "TruncSeries2":
        layers = []
        for d in range(f.prec):
            row = [f.coeffs[d]] + [f.field.zero] * d
            layers.append(row)
        return cls(f.field, layers, f.prec)

    @classmethod
    def from_ts1_in_y(cls, f: TruncSeries1) -> "TruncSeries2":
        layers = []
        for d in range(f.prec):
            row = [f.field.zero] * d + [f.coeffs[d]]
            layers.append(row)
        return cls(f.field, layers, f.prec)

    def coeff(self, i: int, j: int):
        d = i + j
        if i < 0 or j < 0 or d >= self.prec:
            raise IndexError(f"X^{i}*Y^{j} is beyond total-degree precision {self.prec}")
        return self.layers[d][j]

    def monomials(self):
        """Iterate (i, j, coefficient) over nonzero monomials, ordered by
        total degree, then by Y-exponent."""
        for d, row in enumerate(self.layers):
            for k, c in enumerate(row):
                if c:
                    yield d - k, k, c

    def truncate(self, prec: int):
        if prec > self.prec:
            raise ValueError(f"cannot extend precision {self.prec} to {prec}")
        return TruncSeries2._raw(self.field, self.layers[:prec], prec)

    def swap_xy(self):
        return TruncSeries2._raw(
            self.field, tuple(tuple(reversed(row)) for row in self.layers), self.prec
        )

    def __add__(self, other):
        if not isinstance(other, TruncSeries2):
            return NotImplemented
        _same_field(self, other)
        n = min(self.prec, other.prec)
        norm = self.field.normalize
        layers = tuple(
            tuple(norm(a + b) for a, b in zip(ra, rb))
            for ra, rb in zip(self.layers[:n], other.layers[:n])
        )
        return TruncSeries2._raw(self.field, layers, n)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        neg = self.field.neg
        layers = tuple(tuple(neg(c) for c in row) for row in self.layers)
        return TruncSeries2._raw(self.field, layers, self.prec)

    def __mul__(self, other):
        if isinstance(other, TruncSeries2):
            _same_field(self, other)
            n = min(self.prec, other.prec)
            out = [[0] * (d + 1) for d in range(n)]
            for a in range(n):
                la = self.layers[a]
                if not any(la):
                    continue
                for b in range(n - a):
                    lb = other.layers[b]
                    row = out[a + b]
                    for k1, v1 in enumerate(la):
                        if not v1:
                            continue
                        for k2, v2 in enumerate(lb):
                            if v2:
                                row[k1 + k2] += v1 * v2
            norm = self.field.normalize
            layers = tuple(tuple(norm(v) for v in row) for row in out)
            return TruncSeries2._raw(self.field, layers, n)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c):
        c = self.field.coerce(c)
        norm = self.field.normalize
        layers = tuple(tuple(norm(v * c) for v in row) for row in self.layers)
        return TruncSeries2._raw(self.field, layers, self.prec)

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.layers)

    def coeff_of_y_power(self, n: int) -> LaurentPoly:
        """The coefficient of Y^n as a polynomial in the other variable,
        returned as a Laurent polynomial with nonnegative support."""
        if not 0 <= n < self.prec:
            raise IndexError(f"Y^{n} is beyond precision {self.prec}")
        out = {}
        for d in range(n, self.prec):
            c = self.layers[d][n]
            if c:
                out[d - n] = c
        return LaurentPoly._raw(self.field, out)

    def _powers_of(self, g: "TruncSeries2", upto: int):
        powers = [None] * (upto + 1)
        if upto >= 1:
            powers[1] = g
        for k in range(2, upto + 1):
            powers[k] = powers[k - 1] * g
        return powers

    def substitute(self, g: "TruncSeries2", h: "TruncSeries2") -> "TruncSeries2":
        """F(g, h) truncated at the minimum of the three precisions;
        g and h must have zero constant terms."""
        _same_field(self, g)
        _same_field(self, h)
        if g.layers[0][0] or h.layers[0][0]:
            raise PositiveValuationRequired("substituted series must vanish at the origin")
        n = min(self.prec, g.prec, h.prec)
        g = g.truncate(n)
        h = h.truncate(n)
        field = self.field
        max_i = 0
        max_j = 0
        for i, j, _ in self.monomials():
            if i + j >= n:
                continue
            max_i = max(max_i, i)
            max_j = max(max_j, j)
        gpow = self._powers_of(g, max_i)
        hpow = self._powers_of(h, max_j)
        norm = field.normalize
        res = [[0] * (d + 1) for d in range(n)]
        for j in range(max_j + 1):
            # A_j(g) = sum_i F[i,j] g^i, accumulated as raw layers
            col_layers = [[0] * (d + 1) for d in range(n)]
            used = False
            for d in range(j, min(self.prec, n)):
                c = self.layers[d][j]
                if not c:
                    continue
                used = True
                i = d - j
                if i == 0:
                    col_layers[0][0] += c
                    continue
                gi = gpow[i]
                for dd in range(i, n):
                    crow = col_layers[dd]
                    for k, v in enumerate(gi.layers[dd]):
                        if v:
                            crow[k] += c * v
            if not used:
                continue
            if j == 0:
                term_layers = col_layers
            else:
                aj = TruncSeries2._raw(
                    field, tuple(tuple(norm(v) for v in row) for row in col_layers), n
                )
                term_layers = (aj * hpow[j]).layers
            for dd in range(n):
                rrow = res[dd]
                for k, v in enumerate(term_layers[dd]):
                    if v:
                        rrow[k] += v
        layers = tuple(tuple(norm(v) for v in row) for row in res)
        return TruncSeries2._raw(field, layers, n)

    def substitute1(self, a: TruncSeries1, b: TruncSeries1) -> TruncSeries1:
        """F(a(X), b(X)) for univariate a, b with zero constant terms."""
        _same_field(self, a)
        _same_field(self, b)
        if a.coeffs[0] or b.coeffs[0]:
            raise PositiveValuationRequired("substituted series must vanish at the origin")
        n = min(self.prec, a.prec, b.prec)
        a = a.truncate(n)
        b = b.truncate(n)
        field = self.field
        apow = [None, a]
        bpow = [None, b]
        out = [0] * n
        for i, j, c in self.monomials():
            if i + j >= n:
                continue
            while i >= len(apow):
                apow.append(apow[-1] * a)
            while j >= len(bpow):
                bpow.append(bpow[-1] * b)
            if i == 0 and j == 0:
                out[0] += c
                continue
            if i == 0:
                term = bpow[j]
            elif j == 0:
                term = apow[i]
            else:
                term = apow[i] * bpow[j]
            for d, v in enumerate(term.coeffs):
                if v:
                    out[d] += c * v
        norm = field.normalize
        return TruncSeries1._raw(field, tuple(norm(v) for v in out), n)

    def reduce_mod_p(self, p: int) -> "TruncSeries2":
        if self.field is not QQ:
            raise FieldMismatch("reduce_mod_p expects a series over Q")
        gf = GF(p)
        layers = []
        for d, row in enumerate(self.layers):
            new = []
            for k, c in enumerate(row):
                if c.denominator % p == 0:
                    raise IntegralityViolation(
                        f"coefficient {c} of X^{d - k}*Y^{k} is not {p}-integral"
                    )
                new.append(c.numerator * pow(c.denominator, p - 2, p) % p)
            layers.append(tuple(new))
        return TruncSeries2._raw(gf, tuple(layers), self.prec)

    def __eq__(self, other):
        if not isinstance(other, TruncSeries2):
            return NotImplemented
        return (
            self.field is other.field
            and self.prec == other.prec
            and self.layers == other.layers
        )

    __hash__ = None

    def to_text(self, varx: str = "X", vary: str = "Y") -> str:
        terms = []
        for i, j, c in self.monomials():
            x_txt = _mon_txt(varx, i)
            y_txt = _mon_txt(vary, j)
            mon = "*".join(part for part in (x_txt, y_txt) if part)
            terms.append((c, mon))
        body = _join_terms(self.field, terms) if terms else "0"
        return f"{body} + O(deg {self.prec})"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"TruncSeries2({self.field!r}, {self.to_text()!r})"


class XSeriesOverLaurent:
    """Polynomial in X modulo X^bound with coefficients in k[t,1/t].

    This is the ambient ring of generator images D_X(t) = sum d_n(t) X^n.
    """

    __slots__ = ("field", "bound", "coeffs")

    def __init__(self, coeffs, bound=None):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("need at least one coefficient")
        field = coeffs[0].field
        for q in coeffs:
            if q.field is not field:
                raise FieldMismatch("all coefficients must share one field")
        if bound is None:
            bound = len(coeffs)
        if len(coeffs) < bound:
            coeffs.extend([LaurentPoly.zero(field)] * (bound - len(coeffs)))
        self.field = field
        self.bound = bound
        self.coeffs = tuple(coeffs[:bound])

    @classmethod
    def _raw(cls, field, coeffs, bound):
        obj = object.__new__(cls)
        obj.field = field
        obj.bound = bound
        obj.coeffs = coeffs
        return obj

    @classmethod
    def constant(cls, q: LaurentPoly, bound: int):
        return cls([q] + [LaurentPoly.zero(q.field)] * (bound - 1), bound)

    def coeff(self, n: int) -> LaurentPoly:
        if not 0 <= n < self.bound:
            raise IndexError(f"X^{n} is beyond bound {self.bound}")
        return self.coeffs[n]

    def truncate(self, bound: int):
        if bound > self.bound:
            raise ValueError(f"cannot extend bound {self.bound} to {bound}")
        return XSeriesOverLaurent._raw(self.field, self.coeffs[:bound], bound)

    def __add__(self, other):
        if not isinstance(other, XSeriesOverLaurent):
            return NotImplemented
        _same_field(self, other)
        b = min(self.bound, other.bound)
        coeffs = tuple(a + c for a, c in zip(self.coeffs[:b], other.coeffs[:b]))
        return XSeriesOverLaurent._raw(self.field, coeffs, b)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return XSeriesOverLaurent._raw(
            self.field, tuple(-q for q in self.coeffs), self.bound
        )

    def __mul__(self, other):
        if not isinstance(other, XSeriesOverLaurent):
            return NotImplemented
        _same_field(self, other)
        b = min(self.bound, other.bound)
        out = [LaurentPoly.zero(self.field) for _ in range(b)]
        for i in range(b):
            qi = self.coeffs[i]
            if qi.is_zero():
                continue
            for j in range(b - i):
                qj = other.coeffs[j]
                if not qj.is_zero():
                    out[i + j] = out[i + j] + qi * qj
        return XSeriesOverLaurent._raw(self.field, tuple(out), b)

    def scale_poly(self, q: LaurentPoly):
        return XSeriesOverLaurent._raw(
            self.field, tuple(q * c for c in self.coeffs), self.bound
        )

    def unit_inverse(self) -> "XSeriesOverLaurent":
        """Inverse mod X^bound; the constant term must be a unit of
        k[t,1/t], i.e. a monomial."""
        q0 = self.coeffs[0]
        if not q0.is_monomial():
            raise NotAUnit(f"constant term {q0} is not a unit of k[t,1/t]")
        q0inv = q0.unit_inverse()
        m = self.scale_poly(q0inv)  # constant term 1
        one = LaurentPoly.one(self.field)
        w = XSeriesOverLaurent._raw(
            self.field, (LaurentPoly.zero(self.field),) + m.coeffs[1:], self.bound
        )
        # (1 + w)^(-1) via res <- 1 - w*res, exact after bound-1 steps
        res = XSeriesOverLaurent.constant(one, self.bound)
        for _ in range(self.bound - 1):
            prod = w * res
            coeffs = [one - prod.coeffs[0]] + [-q for q in prod.coeffs[1:]]
            res = XSeriesOverLaurent._raw(self.field, tuple(coeffs), self.bound)
        return res.scale_poly(q0inv)

    def reduce_mod_p(self, p: int) -> "XSeriesOverLaurent":
        coeffs = tuple(q.reduce_mod_p(p) for q in self.coeffs)
        return XSeriesOverLaurent._raw(GF(p), coeffs, self.bound)

    def __eq__(self, other):
        if not isinstance(other, XSeriesOverLaurent):
            return NotImplemented
        return (
            self.field is other.field
            and self.bound == other.bound
            and all(a == c for a, c in zip(self.coeffs, other.coeffs))
        )

    __hash__ = None

    def to_text(self, var: str = "X", inner: str = "t") -> str:
        parts = []
        for n, q in enumerate(self.coeffs):
            if q.is_zero():
                continue
            mon = _mon_txt(var, n)
            if not mon:
                parts.append(q.to_text(inner))
            else:
                parts.append(f"({q.to_text(inner)})*{mon}")
        if not parts:
            parts.append("0")
        return " + ".join(parts) + f" + O({var}^{self.bound})"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"XSeriesOverLaurent({self.to_text()!r})"
