"""Formal group laws and their truncations.

A one-dimensional formal group law is a bivariate series F with
F(X,0) = X, F(0,Y) = Y and F(F(X,Y),Z) = F(X,F(Y,Z)).  This module
builds the three families the package cares about -- additive X+Y,
multiplicative X+Y+XY, and the Honda law of height h over F_p -- and
provides axiom checking, the p-series and height, truncated group laws
on k[v,w]/(v^(p^m), w^(p^m)), the formal inverse, and the
coefficient-stabilization probe that certifies entries of F as honest
polynomials in X.

The Honda law is the mod-p reduction of l^(-1)(l(X) + l(Y)) for the
logarithm l(X) = sum_n p^(-n) X^(p^(nh)).  Rather than reverting l and
substituting, the rational law is computed by solving l(F) = l(X) + l(Y)
homogeneous degree by homogeneous degree, which needs only a handful of
full series products; the two routes agree and the tests check that.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (
    FieldMismatch,
    InsufficientPrecision,
    InvalidGroupLaw,
    MalformedPSeries,
    ParseError,
)
from .scalars import GF, QQ, is_prime
from .series import TruncSeries1, TruncSeries2


def honda_logarithm(p: int, h: int, precision: int) -> TruncSeries1:
    """The height-h logarithm sum_n p^(-n) X^(p^(nh)) over Q, mod X^precision."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if h < 1:
        raise ValueError("height parameter must be >= 1")
    if precision < 2:
        raise ValueError("precision must be >= 2")
    terms = {}
    e, n = 1, 0
    while e < precision:
        terms[e] = Fraction(1, p**n)
        e *= p**h
        n += 1
    return TruncSeries1.from_dict(QQ, terms, precision)


def _power_chain(targets):
    """Binary addition-chain recipes for every power in targets.

    Returns {m: (m1, m2)} with m1 + m2 = m and m1, m2 already covered,
    so F^m layers can be built from smaller powers.
    """
    recipes: dict[int, tuple[int, int]] = {}

    def ensure(m):
        if m <= 1 or m in recipes:
            return
        if m % 2 == 0:
            ensure(m // 2)
            recipes[m] = (m // 2, m // 2)
        else:
            ensure(m - 1)
            recipes[m] = (m - 1, 1)

    for m in targets:
        ensure(m)
    return recipes


def _layer_conv_into(out, la, lb):
    """out[k1+k2] += la[k1] * lb[k2] for homogeneous layers."""
    for k1, v1 in enumerate(la):
        if not v1:
            continue
        for k2, v2 in enumerate(lb):
            if v2:
                out[k1 + k2] += v1 * v2


def _honda_rational_body(p: int, h: int, precision: int) -> TruncSeries2:
    """Solve l(F) = l(X) + l(Y) over Q, one homogeneous layer at a time.

    The unknown layer F_d first appears in l(F) inside F itself; every
    F^(p^(nh)) term only involves layers of degree <= d - p^(nh) + 1, so
    F_d = S_d - sum_n p^(-n) [F^(p^(nh))]_d closes the recursion.
    """
    n = precision
    q = p**h
    targets = []  # (power, weight p^(-k))
    e, k = q, 1
    while e < n:
        targets.append((e, Fraction(1, p**k)))
        e *= q
        k += 1
    recipes = _power_chain([t for t, _ in targets])
    chain = sorted(recipes)

    zero = Fraction(0)
    s_layers = [[zero] * (d + 1) for d in range(n)]
    s_layers[1] = [Fraction(1), Fraction(1)]
    for e, w in targets:
        s_layers[e][0] += w
        s_layers[e][e] += w

    # powers[m][d] = homogeneous degree-d layer of F^m; F^m vanishes
    # below degree m, and higher layers are filled as d advances
    f_layers: list = [[zero], list(s_layers[1])] + [None] * (n - 2)
    powers: dict[int, list] = {1: f_layers}
    for m in chain:
        powers[m] = [[zero] * (d + 1) for d in range(min(m, n))] + [None] * (n - min(m, n))

    for d in range(2, n):
        for m in chain:
            if d < m:
                continue
            m1, m2 = recipes[m]
            row = [zero] * (d + 1)
            p1, p2 = powers[m1], powers[m2]
            for a in range(m1, d - m2 + 1):
                _layer_conv_into(row, p1[a], p2[d - a])
            powers[m][d] = row
        row = list(s_layers[d])
        for e, w in targets:
            if d >= e:
                pe = powers[e][d]
                for kk, v in enumerate(pe):
                    if v:
                        row[kk] -= w * v
        f_layers[d] = row

    norm = QQ.normalize
    layers = tuple(tuple(norm(v) for v in row) for row in f_layers)
    return TruncSeries2._raw(QQ, layers, n)


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of the three group-law axioms at a given precision."""

    left_unit: bool
    right_unit: bool
    associative: bool
    degree_checked: int
    first_failure: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.left_unit and self.right_unit and self.associative

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        extra = f"; first failure at {self.first_failure}" if self.first_failure else ""
        return (
            f"{verdict} (left unit: {self.left_unit}, right unit: {self.right_unit}, "
            f"associative to total degree {self.degree_checked}: {self.associative}{extra})"
        )


def _assoc_sides(body: TruncSeries2):
    """Both ternary compositions of a bivariate series with itself, as
    {(a,b,c): coefficient} dicts truncated at the body's total degree.

    The powers of F(X,Y) double as the powers of F(Y,Z) under variable
    renaming, so they are computed once.
    """
    n = body.prec
    field = body.field
    gpow = [None, body]
    for i in range(2, n):
        gpow.append(gpow[-1] * body)
    side1: dict = {}
    side2: dict = {}
    for i, j, c in body.monomials():
        # side 1: c * G(X,Y)^i * Z^j
        if i == 0:
            key = (0, 0, j)
            side1[key] = side1.get(key, 0) + c
        else:
            for a, b, v in gpow[i].monomials():
                if a + b + j < n:
                    key = (a, b, j)
                    side1[key] = side1.get(key, 0) + c * v
        # side 2: c * X^i * G(Y,Z)^j
        if j == 0:
            key = (i, 0, 0)
            side2[key] = side2.get(key, 0) + c
        else:
            for a, b, v in gpow[j].monomials():
                if i + a + b < n:
                    key = (i, a, b)
                    side2[key] = side2.get(key, 0) + c * v
    norm = field.normalize
    side1 = {k: w for k, w in ((k, norm(v)) for k, v in side1.items()) if w}
    side2 = {k: w for k, w in ((k, norm(v)) for k, v in side2.items()) if w}
    return side1, side2


def check_body_axioms(body: TruncSeries2) -> AxiomReport:
    """Group-law axiom report for an arbitrary bivariate series:
    F(X,0) = X, F(0,Y) = Y, and associativity compared coefficient-wise
    to total degree prec - 1."""
    n = body.prec
    field = body.field
    x = TruncSeries2.x(field, n)
    y = TruncSeries2.y(field, n)
    zero = TruncSeries2.zero(field, n)
    left_unit = body.substitute(x, zero) == x
    right_unit = body.substitute(zero, y) == y
    side1, side2 = _assoc_sides(body)
    failure = None
    for key in sorted(set(side1) | set(side2), key=lambda k: (sum(k), k)):
        if side1.get(key, 0) != side2.get(key, 0):
            from .series import _mon_txt

            parts = [_mon_txt(v, e) for v, e in zip("XYZ", key) if e]
            failure = "*".join(parts) if parts else "1"
            break
    return AxiomReport(
        left_unit=left_unit,
        right_unit=right_unit,
        associative=failure is None,
        degree_checked=n - 1,
        first_failure=failure,
    )


@dataclass(frozen=True)
class HeightResult:
    """Height read off the p-series at finite precision.

    A zero p-series is reported as infinite *at this precision*; a
    truncated computation cannot certify genuine infinite height.
    """

    kind: str  # "finite" | "infinite_at_precision"
    height: Optional[int] = None
    bound: Optional[int] = None
    unit: object = None

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def __str__(self):
        if self.is_finite:
            return f"height {self.height}"
        return f"height infinite at precision {self.bound}"


class FormalGroupLaw:
    """A formal group law known modulo total degree `precision`.

    The unit axioms are enforced at construction; custom bodies are
    additionally checked for associativity.  Instances are immutable.
    """

    __slots__ = ("body", "label")

    def __init__(self, body: TruncSeries2, label="custom", _validated=False):
        if body.prec < 2:
            raise InvalidGroupLaw("precision must be >= 2 to state the unit axioms")
        self.body = body
        self.label = label
        bad = self._unit_defect()
        if bad is not None:
            raise InvalidGroupLaw(f"unit axioms fail at {bad}")
        if label == "custom" and not _validated:
            report = self.check_axioms()
            if not report.passed:
                raise InvalidGroupLaw(f"associativity fails at {report.first_failure}")

    def _unit_defect(self):
        layers = self.body.layers
        if layers[0][0]:
            return "1"
        if layers[1][0] != self.field.one:
            return "X"
        if layers[1][1] != self.field.one:
            return "Y"
        for d in range(2, self.body.prec):
            if layers[d][0]:
                return f"X^{d}"
            if layers[d][d]:
                return f"Y^{d}"
        return None

    @property
    def field(self):
        return self.body.field

    @property
    def precision(self) -> int:
        return self.body.prec

    @classmethod
    def additive(cls, field, precision: int) -> "FormalGroupLaw":
        """X + Y."""
        body = TruncSeries2.from_monomials(field, {(1, 0): 1, (0, 1): 1}, precision)
        return cls(body, label="additive")

    @classmethod
    def multiplicative(cls, field, precision: int) -> "FormalGroupLaw":
        """X + Y + XY."""
        terms = {(1, 0): 1, (0, 1): 1}
        if precision > 2:
            terms[(1, 1)] = 1
        body = TruncSeries2.from_monomials(field, terms, precision)
        return cls(body, label="multiplicative")

    @classmethod
    def honda(cls, p: int, h: int, precision: int) -> "FormalGroupLaw":
        """Mod-p reduction of the rational law with logarithm
        honda_logarithm(p, h); raises IntegralityViolation if any
        rational coefficient fails to be p-integral (it never should)."""
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if h < 1:
            raise ValueError("height parameter must be >= 1")
        if precision < 2:
            raise ValueError("precision must be >= 2")
        rational = _honda_rational_body(p, h, precision)
        return cls(rational.reduce_mod_p(p), label=("honda", p, h))

    @classmethod
    def custom(cls, body: TruncSeries2) -> "FormalGroupLaw":
        return cls(body, label="custom")

    def rebuild_at(self, precision: int) -> "FormalGroupLaw":
        """Reconstruct this law at a different precision.

        Labelled laws rebuild from their defining recipe.  A custom law
        re-validates its polynomial body at the new precision, which
        fails (honestly) if the body was only ever a truncation.
        """
        if precision == self.precision:
            return self
        if self.label == "additive":
            return FormalGroupLaw.additive(self.field, precision)
        if self.label == "multiplicative":
            return FormalGroupLaw.multiplicative(self.field, precision)
        if isinstance(self.label, tuple) and self.label[0] == "honda":
            _, p, h = self.label
            return FormalGroupLaw.honda(p, h, precision)
        terms = {(i, j): c for i, j, c in self.body.monomials()}
        body = TruncSeries2.from_monomials(self.field, terms, precision)
        return FormalGroupLaw.custom(body)

    # -- axioms ---------------------------------------------------------

    def check_axioms(self) -> AxiomReport:
        """Verify both unit axioms and associativity to total degree
        precision - 1, comparing F(F(X,Y),Z) with F(X,F(Y,Z))."""
        return check_body_axioms(self.body)

    def is_commutative(self) -> bool:
        return self.body == self.body.swap_xy()

    # -- p-series, height, inverse --------------------------------------

    def p_series(self) -> TruncSeries1:
        """[p](X) = F(X, F(X, ... F(X,X)...)) with p copies of X."""
        p = self.field.char
        if p == 0:
            raise FieldMismatch("the p-series needs a prime characteristic")
        x = TruncSeries1.x(self.field, self.precision)
        s = x
        for _ in range(p - 1):
            s = self.body.substitute1(x, s)
        return s

    def height(self) -> HeightResult:
        """Read the height off the valuation of the p-series."""
        ps = self.p_series()
        v = ps.valuation()
        if v is None:
            return HeightResult(kind="infinite_at_precision", bound=self.precision)
        p = self.field.char
        m, h = v, 0
        while m % p == 0:
            m //= p
            h += 1
        if m != 1 or h == 0:
            raise MalformedPSeries(
                f"p-series valuation {v} is not a positive power of {p}"
            )
        return HeightResult(kind="finite", height=h, unit=ps.coeff(v))

    def formal_inverse(self) -> TruncSeries1:
        """The unique iota with iota(0) = 0 and F(X, iota(X)) = 0 mod X^N."""
        n = self.precision
        field = self.field
        x = TruncSeries1.x(field, n)
        coeffs = [field.zero] * n
        coeffs[1] = field.neg(field.one)
        for d in range(2, n):
            iota = TruncSeries1(field, coeffs, n)
            c = self.body.substitute1(x, iota).coeff(d)
            if c:
                # dF/dY(0,0) = 1, so the degree-d defect is killed exactly
                coeffs[d] = field.neg(c)
        return TruncSeries1(field, coeffs, n)

    # -- truncation and the polynomiality probe --------------------------

    def truncate(self, m: int) -> "TruncatedGroupLaw":
        """The m-truncation: keep monomials with both exponents < p^m.

        Requires precision >= 2*p^m - 1 so every surviving monomial is
        actually known.
        """
        p = self.field.char
        if p == 0:
            raise FieldMismatch("truncated group laws live over F_p")
        if m < 1:
            raise ValueError("truncation level must be >= 1")
        q = p**m
        need = 2 * q - 1
        if self.precision < need:
            raise InsufficientPrecision(
                f"truncation at m={m} needs N >= {need}, have {self.precision}"
            )
        coeffs = {}
        for i, j, c in self.body.monomials():
            if i < q and j < q:
                coeffs[(i, j)] = c
        return TruncatedGroupLaw(self.field, m, coeffs)

    def coeff_of_y(self, n: int, probe_precision: int):
        """The coefficient of Y^n as a polynomial in X, with a
        stabilization flag.

        The coefficient is recomputed with the law rebuilt at
        probe_precision; the flag is True iff the two computations agree
        exactly, which is evidence (not proof) that the coefficient is a
        genuine polynomial.
        """
        if not 0 <= n < self.precision:
            raise ValueError(f"need n < precision, got n={n}, N={self.precision}")
        if probe_precision < self.precision:
            raise ValueError("probe precision must be >= the law's precision")
        lo = self.body.coeff_of_y_power(n)
        hi = self.rebuild_at(probe_precision).body.coeff_of_y_power(n)
        return hi, lo == hi

    # -- serialization ---------------------------------------------------

    def to_json_obj(self) -> dict:
        mons = []
        for i, j, c in self.body.monomials():
            val = c if self.field.char else str(c)
            mons.append({"i": i, "j": j, "c": val})
        p = self.field.char if self.field.char else None
        return {"p": p, "precision": self.precision, "monomials": mons}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FormalGroupLaw":
        try:
            p = obj["p"]
            precision = obj["precision"]
            mons = obj["monomials"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"law object must have p, precision, monomials: {exc}")
        try:
            field = GF(p) if p else QQ
        except ValueError as exc:
            raise ParseError(str(exc))
        terms = {}
        for mon in mons:
            c = mon["c"]
            if field is QQ:
                c = Fraction(c)
            terms[(mon["i"], mon["j"])] = c
        body = TruncSeries2.from_monomials(field, terms, precision)
        return cls.custom(body)

    @classmethod
    def from_json(cls, text: str) -> "FormalGroupLaw":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad law JSON: {exc}")
        return cls.from_json_obj(obj)

    def __eq__(self, other):
        if not isinstance(other, FormalGroupLaw):
            return NotImplemented
        return self.body == other.body

    __hash__ = None

    def __str__(self):
        return self.body.to_text()

    def __repr__(self):
        return f"FormalGroupLaw({self.label!r}, {self.body.to_text()!r})"


def _cap_mul(d1: dict, d2: dict, cap: int, field) -> dict:
    """Multiply in k[v,w]/(v^cap, w^cap): monomials overflowing either
    exponent die (quotient by a monomial ideal, so this is exact)."""
    acc: dict = {}
    for (i1, j1), v1 in d1.items():
        for (i2, j2), v2 in d2.items():
            i, j = i1 + i2, j1 + j2
            if i < cap and j < cap:
                key = (i, j)
                acc[key] = acc.get(key, 0) + v1 * v2
    norm = field.normalize
    return {k: w for k, w in ((k, norm(v)) for k, v in acc.items()) if w}


def _cap_mul3(d1: dict, d2: dict, cap: int, field) -> dict:
    """Trivariate version of _cap_mul, keys (a, b, c)."""
    acc: dict = {}
    for k1, v1 in d1.items():
        for k2, v2 in d2.items():
            a, b, c = k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2]
            if a < cap and b < cap and c < cap:
                key = (a, b, c)
                acc[key] = acc.get(key, 0) + v1 * v2
    norm = field.normalize
    return {k: w for k, w in ((k, norm(v)) for k, v in acc.items()) if w}


class TruncatedGroupLaw:
    """An m-truncated group law: a polynomial f(v,w) with exponents
    < p^m satisfying the unit and associativity axioms *exactly* in
    k[v,w,u]/(v^(p^m), w^(p^m), u^(p^m))."""

    __slots__ = ("field", "m", "q", "coeffs")

    def __init__(self, field, m: int, coeffs: dict, validate: bool = True):
        p = field.char
        if p == 0:
            raise FieldMismatch("truncated group laws live over F_p")
        q = p**m
        clean = {}
        for (i, j), c in coeffs.items():
            if not (0 <= i < q and 0 <= j < q):
                raise ValueError(f"exponent pair ({i}, {j}) outside [0, {q})^2")
            c = field.coerce(c)
            if c:
                clean[(i, j)] = c
        self.field = field
        self.m = m
        self.q = q
        self.coeffs = clean
        if validate:
            bad = self._axiom_defect()
            if bad is not None:
                raise InvalidGroupLaw(f"truncated group-law axioms fail at {bad}")

    @property
    def p(self) -> int:
        return self.field.char

    def _axiom_defect(self):
        q, field = self.q, self.field
        one = field.one
        # units, exactly
        for i in range(q):
            if self.coeffs.get((i, 0), field.zero) != (one if i == 1 else field.zero):
                return f"v^{i} in f(v,0)"
            if self.coeffs.get((0, i), field.zero) != (one if i == 1 else field.zero):
                return f"w^{i} in f(0,w)"
        # associativity, exactly in the truncated trivariate ring
        gpow = self.powers_upto(q - 1)
        side1: dict = {}
        side2: dict = {}
        for (i, j), c in self.coeffs.items():
            base1 = gpow[i] if i else {(0, 0): one}
            for (a, b), v in base1.items():
                key = (a, b, j)
                side1[key] = side1.get(key, 0) + c * v
            base2 = gpow[j] if j else {(0, 0): one}
            for (a, b), v in base2.items():
                key = (i, a, b)
                side2[key] = side2.get(key, 0) + c * v
        norm = field.normalize
        side1 = {k: w for k, w in ((k, norm(v)) for k, v in side1.items()) if w}
        side2 = {k: w for k, w in ((k, norm(v)) for k, v in side2.items()) if w}
        for key in sorted(set(side1) | set(side2), key=lambda k: (sum(k), k)):
            if side1.get(key) != side2.get(key):
                return f"v^{key[0]}*w^{key[1]}*u^{key[2]}"
        return None

    def powers_upto(self, nmax: int) -> list:
        """[f^0, f^1, ..., f^nmax] in k[v,w]/(v^q, w^q)."""
        powers = [{(0, 0): self.field.one}]
        if nmax >= 1:
            powers.append(dict(self.coeffs))
        for _ in range(2, nmax + 1):
            powers.append(_cap_mul(powers[-1], self.coeffs, self.q, self.field))
        return powers

    def truncate(self, l: int) -> "TruncatedGroupLaw":
        """Restrict to exponents < p^l for l <= m."""
        if l > self.m:
            raise ValueError(f"cannot extend truncation level {self.m} to {l}")
        ql = self.p**l
        coeffs = {(i, j): c for (i, j), c in self.coeffs.items() if i < ql and j < ql}
        return TruncatedGroupLaw(self.field, l, coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedGroupLaw):
            return NotImplemented
        return (
            self.field is other.field
            and self.m == other.m
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def to_json_obj(self) -> dict:
        mons = [
            {"i": i, "j": j, "c": c}
            for (i, j), c in sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0][1]))
        ]
        return {"p": self.p, "m": self.m, "monomials": mons}

    def to_text(self, varv: str = "v", varw: str = "w") -> str:
        from .series import _join_terms, _mon_txt

        items = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0][1]))
        terms = []
        for (i, j), c in items:
            parts = [t for t in (_mon_txt(varv, i), _mon_txt(varw, j)) if t]
            terms.append((c, "*".join(parts)))
        return _join_terms(self.field, terms) if terms else "0"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"TruncatedGroupLaw(p={self.p}, m={self.m}, {self.to_text()!r})"


def parse_law_descriptor(text: str):
    """Parse "additive[:p]", "multiplicative[:p]" or "honda:p:h".

    Returns (kind, p, h) with h = None unless kind == "honda".  The
    prime defaults to 2 for the additive and multiplicative families.
    """
    parts = text.split(":")
    kind = parts[0]
    if kind in ("additive", "multiplicative"):
        if len(parts) == 1:
            return kind, 2, None
        if len(parts) != 2:
            raise ParseError(f"bad descriptor {text!r}")
        try:
            p = int(parts[1])
        except ValueError:
            raise ParseError(f"bad prime in {text!r}")
        if not is_prime(p):
            raise ParseError(f"{p} is not prime in {text!r}")
        return kind, p, None
    if kind == "honda":
        if len(parts) != 3:
            raise ParseError(f"honda descriptor needs honda:p:h, got {text!r}")
        try:
            p, h = int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"bad integers in {text!r}")
        if not is_prime(p):
            raise ParseError(f"{p} is not prime in {text!r}")
        if h < 1:
            raise ParseError(f"height must be >= 1 in {text!r}")
        return kind, p, h
    raise ParseError(
        f"unknown law {kind!r}; expected additive, multiplicative, or honda:p:h"
    )


def build_law(descriptor: str, precision: int) -> FormalGroupLaw:
    """Construct the law named by a CLI descriptor at the given precision."""
    kind, p, h = parse_law_descriptor(descriptor)
    if precision < 2:
        raise ParseError("precision must be >= 2")
    if kind == "additive":
        return FormalGroupLaw.additive(GF(p), precision)
    if kind == "multiplicative":
        return FormalGroupLaw.multiplicative(GF(p), precision)
    return FormalGroupLaw.honda(p, h, precision)
