"""Hasse-Schmidt derivations on k[t] and k[t,1/t].

An HS-derivation here is stored solely through its generator image
D_X(t) = sum_n d_n(t) X^n; everything else is recomputed from the fact
that D_X is a k-algebra homomorphism.  That is exactly the determinacy
that makes the iterativity checks meaningful on the single test element
t, and it removes any possibility of inconsistent stored tables.

Negative powers of t go through D_X(t)^(-1) = t^(-1) * (unit series
inverse); the same values fall out of the convolution recursion
0 = sum_{j+k=n} d_j(t) d_k(1/t), and both routes are exposed so tests
can pit them against each other.

A derivation keeps an explicit Laurent exponent window.  The window is
bookkeeping, not truncation: any intermediate value that leaves it
raises WindowOverflow instead of being silently cut off.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .errors import (
    FieldMismatch,
    InsufficientPrecision,
    NotMultiplicativelyRestricted,
    NotNilpotent,
    NotProportional,
    OrderOutOfRange,
    ParseError,
    WindowOverflow,
)
from .grouplaws import FormalGroupLaw, TruncatedGroupLaw
from .scalars import GF, QQ, FpElem
from .series import LaurentPoly, XSeriesOverLaurent, parse_laurent


@dataclass(frozen=True)
class IterativityReport:
    """Outcome of an iterativity diagram check on the generator t."""

    passed: bool
    mode: str  # "full" | "truncated"
    orders_checked: int
    first_failure: Optional[tuple] = None  # (i, j, monomial text)

    def __str__(self):
        if self.passed:
            scope = (
                f"all (i, j) with i + j < {self.orders_checked}"
                if self.mode == "full"
                else f"all (i, j) in [0, {self.orders_checked})^2"
            )
            return f"PASS ({self.mode} iterativity on t, {scope})"
        i, j, mon = self.first_failure
        return f"FAIL at (i, j) = ({i}, {j}); sides differ at {mon}"


@dataclass(frozen=True)
class P1Report:
    """Does the derivation preserve k[1/t], i.e. extend to the
    projective line?"""

    passed: bool
    orders_checked: int
    first_failure_order: Optional[int] = None
    offending: tuple = ()

    def __str__(self):
        if self.passed:
            return f"PASS (orders n < {self.orders_checked} preserve k[1/t])"
        return f"FAIL at n={self.first_failure_order}; offending: " + ", ".join(self.offending)


class Derivation:
    """A single derivation of k[t,1/t], determined by d(t)."""

    __slots__ = ("field", "image_t")

    def __init__(self, image_t: LaurentPoly):
        self.field = image_t.field
        self.image_t = image_t

    def apply(self, q: LaurentPoly) -> LaurentPoly:
        if q.field is not self.field:
            raise FieldMismatch("argument lives over a different field")
        return q.derivative() * self.image_t

    def iterate(self, q: LaurentPoly, times: int) -> LaurentPoly:
        for _ in range(times):
            q = self.apply(q)
        return q

    def __repr__(self):
        return f"Derivation(d(t) = {self.image_t})"


class HSDerivation:
    """A truncated HS-derivation (d_n)_{n<B} on k[t,1/t], stored as the
    generator image table d_n(t).

    Equality compares the table (field, bound, entries); the window is
    bookkeeping and does not participate.
    """

    __slots__ = ("field", "bound", "entries", "window", "_pow_cache", "_inv_pow_cache")

    def __init__(self, entries, window):
        entries = tuple(entries)
        if not entries:
            raise ValueError("need at least the order-0 entry")
        field = entries[0].field
        for e in entries:
            if e.field is not field:
                raise FieldMismatch("all table entries must share one field")
        if entries[0] != LaurentPoly.t(field):
            raise ValueError("entry 0 must be t (d_0 is the identity)")
        lo, hi = int(window[0]), int(window[1])
        if lo > 0 or hi < 1:
            raise ValueError(f"window [{lo}, {hi}] must contain the exponents of t")
        self.field = field
        self.bound = len(entries)
        self.entries = entries
        self.window = (lo, hi)
        self._pow_cache = {}
        self._inv_pow_cache = {}
        for n, e in enumerate(entries):
            self._check_window(e, f"table entry d_{n}(t)")

    def _check_window(self, poly: LaurentPoly, context: str) -> LaurentPoly:
        if not poly.is_zero():
            lo, hi = self.window
            if poly.valuation() < lo or poly.degree() > hi:
                raise WindowOverflow(
                    f"{context} has t-exponents in [{poly.valuation()}, {poly.degree()}], "
                    f"outside the declared window [{lo}, {hi}]"
                )
        return poly

    @property
    def generator_image(self) -> XSeriesOverLaurent:
        """D_X(t) = sum_n d_n(t) X^n."""
        return XSeriesOverLaurent(self.entries, self.bound)

    def _gen_power(self, e: int) -> XSeriesOverLaurent:
        assert e >= 1
        cached = self._pow_cache.get(e)
        if cached is not None:
            return cached
        if e == 1:
            result = self.generator_image
        else:
            result = self._gen_power(e - 1) * self.generator_image
        for n, q in enumerate(result.coeffs):
            self._check_window(q, f"coefficient of X^{n} in D_X(t)^{e}")
        self._pow_cache[e] = result
        return result

    def _gen_inv_power(self, e: int) -> XSeriesOverLaurent:
        assert e >= 1
        cached = self._inv_pow_cache.get(e)
        if cached is not None:
            return cached
        if e == 1:
            result = self.generator_image.unit_inverse()
        else:
            result = self._gen_inv_power(e - 1) * self._gen_inv_power(1)
        for n, q in enumerate(result.coeffs):
            self._check_window(q, f"coefficient of X^{n} in D_X(t)^(-{e})")
        self._inv_pow_cache[e] = result
        return result

    def image(self, q: LaurentPoly) -> XSeriesOverLaurent:
        """D_X(q) = q(D_X(t)), using that D_X is an algebra map and that
        D_X(t) is a unit (constant term t) when q has negative powers."""
        if q.field is not self.field:
            raise FieldMismatch("argument lives over a different field")
        zero = LaurentPoly.zero(self.field)
        acc = [zero] * self.bound
        for e, c in q.coeffs.items():
            if e == 0:
                acc[0] = acc[0] + LaurentPoly.constant(self.field, c)
                continue
            power = self._gen_power(e) if e > 0 else self._gen_inv_power(-e)
            for n, poly in enumerate(power.coeffs):
                if not poly.is_zero():
                    acc[n] = acc[n] + poly.scale(c)
        for n, poly in enumerate(acc):
            self._check_window(poly, f"coefficient of X^{n} in the image of {q}")
        return XSeriesOverLaurent._raw(self.field, tuple(acc), self.bound)

    def apply(self, q: LaurentPoly, n: int) -> LaurentPoly:
        """d_n(q), the X^n coefficient of the image of q."""
        if not 0 <= n < self.bound:
            raise OrderOutOfRange(f"order {n} is outside [0, {self.bound})")
        return self.image(q).coeff(n)

    def inverse_image(self, orders: int) -> list:
        """[d_0(1/t), ..., d_{orders-1}(1/t)] by the convolution
        recursion d_n(1/t) = -t^(-1) sum_{j=1..n} d_j(t) d_{n-j}(1/t)."""
        if not 1 <= orders <= self.bound:
            raise OrderOutOfRange(f"orders {orders} is outside [1, {self.bound}]")
        tinv = LaurentPoly.monomial(self.field, -1, self.field.one)
        out = [tinv]
        for n in range(1, orders):
            s = LaurentPoly.zero(self.field)
            for j in range(1, n + 1):
                if not self.entries[j].is_zero():
                    s = s + self.entries[j] * out[n - j]
            val = -(tinv * s)
            self._check_window(val, f"d_{n}(1/t)")
            out.append(val)
        return out

    def check_leibniz(self, q: LaurentPoly, r: LaurentPoly, n: int) -> bool:
        """d_n(q r) = sum_{j+k=n} d_j(q) d_k(r)."""
        if not 0 <= n < self.bound:
            raise OrderOutOfRange(f"order {n} is outside [0, {self.bound})")
        lhs = self.apply(q * r, n)
        rhs = LaurentPoly.zero(self.field)
        img_q = self.image(q)
        img_r = self.image(r)
        for j in range(n + 1):
            rhs = rhs + img_q.coeff(j) * img_r.coeff(n - j)
        return lhs == rhs

    # -- iterativity ------------------------------------------------------

    def check_iterativity(self, law) -> IterativityReport:
        """Commutativity of the iterativity diagram on the generator t.

        Both sides of the diagram are algebra maps determined by the
        image of t, so equality on t decides the whole diagram.  Against
        a FormalGroupLaw the comparison runs over all (i, j) with
        i + j < bound; against a TruncatedGroupLaw with p^m = bound it
        runs over the full grid [0, p^m)^2 with exponents reduced modulo
        (X^(p^m), Y^(p^m)).
        """
        if isinstance(law, TruncatedGroupLaw):
            return self._check_iterativity_truncated(law)
        if isinstance(law, FormalGroupLaw):
            return self._check_iterativity_full(law)
        raise TypeError(f"cannot check iterativity against {law!r}")

    def _lhs_grid(self, max_i: int, max_j: int) -> dict:
        lhs = {}
        for j in range(max_j + 1):
            img = self.image(self.entries[j])
            for i in range(max_i + 1):
                lhs[(i, j)] = img.coeff(i)
        return lhs

    def _compare(self, lhs: dict, rhs: dict, pairs, mode: str, orders: int) -> IterativityReport:
        zero = LaurentPoly.zero(self.field)
        for i, j in pairs:
            left = lhs.get((i, j), zero)
            right = rhs.get((i, j), zero)
            if left != right:
                diff = left - right
                mon = LaurentPoly.monomial(
                    self.field, diff.valuation(), diff.coeff(diff.valuation())
                )
                return IterativityReport(
                    passed=False,
                    mode=mode,
                    orders_checked=orders,
                    first_failure=(i, j, mon.to_text()),
                )
        return IterativityReport(passed=True, mode=mode, orders_checked=orders)

    def _check_iterativity_full(self, law: FormalGroupLaw) -> IterativityReport:
        if law.field is not self.field:
            raise FieldMismatch("law and derivation live over different fields")
        b = self.bound
        if law.precision < b:
            raise InsufficientPrecision(
                f"full iterativity at bound {b} needs law precision >= {b}, have {law.precision}"
            )
        g = law.body.truncate(b)
        rhs = {(0, 0): self.entries[0]}
        gpow = g
        for n in range(1, b):
            if n >= 2:
                gpow = gpow * g
            e = self.entries[n]
            if e.is_zero():
                continue
            for i, j, c in gpow.monomials():
                key = (i, j)
                term = e.scale(c)
                rhs[key] = rhs[key] + term if key in rhs else term
        lhs = self._lhs_grid(b - 1, b - 1)
        pairs = [(i, j) for j in range(b) for i in range(b - j)]
        pairs.sort(key=lambda ij: (ij[0] + ij[1], ij[0]))
        return self._compare(lhs, rhs, pairs, "full", b)

    def _check_iterativity_truncated(self, law: TruncatedGroupLaw) -> IterativityReport:
        if law.field is not self.field:
            raise FieldMismatch("law and derivation live over different fields")
        q = law.q
        if q != self.bound:
            raise ValueError(
                f"truncated iterativity needs bound p^m = {q}, derivation has {self.bound}"
            )
        fpow = law.powers_upto(q - 1)
        rhs = {}
        for n in range(q):
            e = self.entries[n]
            if e.is_zero():
                continue
            for key, c in fpow[n].items():
                term = e.scale(c)
                rhs[key] = rhs[key] + term if key in rhs else term
        lhs = self._lhs_grid(q - 1, q - 1)
        pairs = [(i, j) for j in range(q) for i in range(q)]
        pairs.sort(key=lambda ij: (ij[0] + ij[1], ij[0]))
        return self._compare(lhs, rhs, pairs, "truncated", q)

    def check_p1_extendable(self, orders: int) -> P1Report:
        """Test whether d_n(1/t) stays inside k[1/t] for all n < orders."""
        invs = self.inverse_image(orders)
        for n, poly in enumerate(invs):
            bad = [e for e in sorted(poly.coeffs, reverse=True) if e > 0]
            if bad:
                offending = tuple(
                    LaurentPoly.monomial(self.field, e, poly.coeffs[e]).to_text() for e in bad
                )
                return P1Report(
                    passed=False,
                    orders_checked=orders,
                    first_failure_order=n,
                    offending=offending,
                )
        return P1Report(passed=True, orders_checked=orders)

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        p = self.field.char if self.field.char else None
        return {
            "p": p,
            "B": self.bound,
            "entries": [
                {"n": n, "poly": e.to_text()} for n, e in enumerate(self.entries)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict, window=None) -> "HSDerivation":
        try:
            p = obj["p"]
            bound = obj["B"]
            raw_entries = obj["entries"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"derivation table must have p, B, entries: {exc}")
        try:
            field = GF(p) if p else QQ
        except ValueError as exc:
            raise ParseError(str(exc))
        polys = [LaurentPoly.zero(field) for _ in range(bound)]
        for item in raw_entries:
            n = item["n"]
            if not 0 <= n < bound:
                raise ParseError(f"entry order {n} outside [0, {bound})")
            polys[n] = parse_laurent(item["poly"], field)
        if window is None:
            window = auto_window(polys, bound)
        return cls(polys, window)

    @classmethod
    def from_json(cls, text: str, window=None) -> "HSDerivation":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad derivation JSON: {exc}")
        return cls.from_json_obj(obj, window=window)

    def with_entry(self, n: int, poly: LaurentPoly) -> "HSDerivation":
        """A copy with the order-n table entry replaced (for mutation
        tests); n = 0 is rejected by the constructor."""
        entries = list(self.entries)
        entries[n] = poly
        return HSDerivation(entries, self.window)

    def __eq__(self, other):
        if not isinstance(other, HSDerivation):
            return NotImplemented
        return (
            self.field is other.field
            and self.bound == other.bound
            and all(a == b for a, b in zip(self.entries, other.entries))
        )

    __hash__ = None

    def table_text(self) -> str:
        return "\n".join(f"d_{n}(t) = {e.to_text()}" for n, e in enumerate(self.entries))

    def __repr__(self):
        return f"HSDerivation(B={self.bound}, window={self.window})"


def auto_window(entries, orders: int):
    """Default exponent window: low end -(B+1) covers the 1/t recursion,
    high end B * (max table degree) covers the homomorphism images."""
    max_deg = 1
    for e in entries:
        d = e.degree()
        if d is not None and d > max_deg:
            max_deg = d
    return (-(orders + 1), max(orders, orders * max_deg))


def default_window(law: FormalGroupLaw, orders: int):
    """The documented CLI heuristic: -(B+1) .. B*p^h for Honda laws,
    -(B+1) .. B otherwise."""
    if isinstance(law.label, tuple) and law.label[0] == "honda":
        _, p, h = law.label
        return (-(orders + 1), orders * p**h)
    return (-(orders + 1), orders)


def canonical_derivation(
    law: FormalGroupLaw,
    orders: int,
    window=None,
    probe_precision: Optional[int] = None,
) -> HSDerivation:
    """The canonical derivation of a law: d_n(t) = coefficient of X^n in
    F(t, X).

    Every entry must pass the stabilization probe (recomputation at
    probe_precision, default N + orders); an entry that could still
    change at higher precision raises InsufficientPrecision instead of
    being returned truncated.
    """
    if orders < 1:
        raise ValueError("orders must be >= 1")
    if orders > law.precision:
        raise InsufficientPrecision(
            f"orders {orders} exceeds the law's precision {law.precision}"
        )
    if probe_precision is None:
        probe_precision = law.precision + orders
    rebuilt = law.rebuild_at(probe_precision)
    entries = []
    for n in range(orders):
        lo = law.body.coeff_of_y_power(n)
        hi = rebuilt.body.coeff_of_y_power(n)
        if lo != hi:
            raise InsufficientPrecision(
                f"d_{n}(t) is not stabilized at precision {law.precision} "
                f"(differs when recomputed at {probe_precision})"
            )
        entries.append(lo)
    if window is None:
        window = default_window(law, orders)
        max_deg = max((e.degree() or 0) for e in entries)
        window = (window[0], max(window[1], orders * max(1, max_deg)))
    return HSDerivation(entries, window)


def compute_cf(law: FormalGroupLaw, probe_precision: Optional[int] = None) -> FpElem:
    """The restricted-Lie constant c with D_1^(p) = c * D_1 for the
    canonical derivation; proportionality is verified on t and t^2."""
    p = law.field.char
    if p == 0:
        raise FieldMismatch("c_F lives in positive characteristic")
    if law.precision <= p:
        raise ValueError(f"need precision > {p} to iterate D_1 {p} times")
    if probe_precision is None:
        probe_precision = law.precision + p
    d1_t, stable = law.coeff_of_y(1, probe_precision)
    if not stable:
        raise InsufficientPrecision("D_1(t) did not stabilize under the probe")
    d = Derivation(d1_t)
    field = law.field
    t = LaurentPoly.t(field)
    dp_t = d.iterate(t, p)
    if dp_t.is_zero():
        c = field.zero
    else:
        e = d1_t.degree()
        c = field.div(dp_t.coeff(e), d1_t.coeff(e))
        if dp_t != d1_t.scale(c):
            raise NotProportional(f"D_1^({p})(t) = {dp_t} is not proportional to {d1_t}")
    t2 = t * t
    if d.iterate(t2, p) != d.apply(t2).scale(c):
        raise NotProportional(f"proportionality with c = {c} fails on t^2")
    return FpElem(c, p)


def check_restricted(d: Derivation, c) -> bool:
    """Does d^(p) = c * d hold on t and on t^2?"""
    p = d.field.char
    if p == 0:
        raise FieldMismatch("restrictedness is a characteristic-p notion")
    c = d.field.coerce(c)
    t = LaurentPoly.t(d.field)
    for probe in (t, t * t):
        if d.iterate(probe, p) != d.apply(probe).scale(c):
            return False
    return True


def prolong_ga1(d: Derivation, window=None) -> HSDerivation:
    """Expand d with d^(p) = 0 to the additively iterative 1-truncated
    derivation (d^(n)/n!)_{n<p}."""
    p = d.field.char
    if p == 0:
        raise FieldMismatch("prolongation is a characteristic-p construction")
    if not check_restricted(d, 0):
        raise NotNilpotent(f"d^({p}) does not vanish on t and t^2")
    field = d.field
    entries = [LaurentPoly.t(field), d.image_t]
    cur = d.image_t
    fact = 1
    for n in range(2, p):
        cur = d.apply(cur)
        fact = fact * n % p
        entries.append(cur.scale(field.inv(fact)))
    if window is None:
        window = auto_window(entries, p)
    return HSDerivation(entries, window)


def prolong_gm1(d: Derivation, window=None) -> HSDerivation:
    """Expand d with d^(p) = d to the multiplicatively iterative
    1-truncated derivation via d_{n+1} = (d o d_n - n d_n) / (n+1)."""
    p = d.field.char
    if p == 0:
        raise FieldMismatch("prolongation is a characteristic-p construction")
    if not check_restricted(d, 1):
        raise NotMultiplicativelyRestricted(f"d^({p}) differs from d on t or t^2")
    field = d.field
    entries = [LaurentPoly.t(field), d.image_t]
    dn = d.image_t
    for n in range(1, p - 1):
        dn = (d.apply(dn) - dn.scale(n)).scale(field.inv(n + 1))
        entries.append(dn)
    if window is None:
        window = auto_window(entries, p)
    return HSDerivation(entries, window)
