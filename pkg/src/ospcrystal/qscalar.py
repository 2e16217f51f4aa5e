"""Exact arithmetic in the field Q(q) of rational functions, with q-combinatorics.

A scalar is kept in the canonical shape  q^e * N(q)/D(q)  where N and D are
integer-coefficient polynomials with nonzero constant term, gcd(N, D) = 1, the
integer contents of N and D are coprime, and D has a positive leading
coefficient.  The exponent e is then exactly the q-adic valuation, so
valuation, A0-membership and the image at q=0 are structural reads.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Tuple

Poly = Tuple[int, ...]  # coefficients, low degree first, no trailing zeros


def _trim(c: list) -> Poly:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def _pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pcontent(a: Poly) -> int:
    g = 0
    for x in a:
        g = math.gcd(g, x)
    return g


def _pprim(a: Poly) -> Poly:
    """Primitive part with positive leading coefficient."""
    if not a:
        return ()
    c = _pcontent(a)
    if a[-1] < 0:
        c = -c
    return tuple(x // c for x in a)


def _pseudo_rem(a: Poly, b: Poly) -> Poly:
    """Pseudo-remainder of a by b over Z (b nonzero)."""
    r = list(_trim(list(a)))
    lb = b[-1]
    db = len(b) - 1
    while r and len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for i, y in enumerate(b):
            r[shift + i] -= lr * y
        r = list(_trim(r))
    return tuple(r)


def _pgcd(a: Poly, b: Poly) -> Poly:
    """Primitive gcd over Z[q]."""
    a, b = _pprim(a), _pprim(b)
    while b:
        a, b = b, _pprim(_pseudo_rem(a, b))
    return a


def _pdiv_exact(a: Poly, b: Poly) -> Poly:
    """Exact division a/b over Q[q]; a must be a multiple of b."""
    if not a:
        return ()
    r = [Fraction(x) for x in a]
    db = len(b) - 1
    lb = Fraction(b[-1])
    q = [Fraction(0)] * (len(a) - db)
    for k in range(len(a) - db - 1, -1, -1):
        c = r[k + db] / lb
        q[k] = c
        if c:
            for i, y in enumerate(b):
                r[k + i] -= c * y
    if any(r):
        raise ArithmeticError("inexact polynomial division")
    out = []
    for c in q:
        if c.denominator != 1:
            raise ArithmeticError("inexact polynomial division")
        out.append(int(c))
    return _trim(out)


class Scalar:
    """An element of Q(q), exact and canonical."""

    __slots__ = ("e", "num", "den")

    def __init__(self, e: int, num: Poly, den: Poly, _canonical: bool = False):
        if _canonical:
            self.e, self.num, self.den = e, num, den
            return
        if not den:
            raise ZeroDivisionError("scalar with zero denominator")
        if not num:
            self.e, self.num, self.den = 0, (), (1,)
            return
        # pull q-powers out of both sides into the shift
        vn = next(i for i, x in enumerate(num) if x)
        if vn:
            e += vn
            num = num[vn:]
        if den == (1,):
            self.e, self.num, self.den = e, num, den
            return
        vd = next(i for i, x in enumerate(den) if x)
        if vd:
            e -= vd
            den = den[vd:]
        g = _pgcd(num, den)
        if len(g) > 1 or g[0] != 1:
            num, den = _pdiv_exact(num, g), _pdiv_exact(den, g)
        c = math.gcd(_pcontent(num), _pcontent(den))
        if den[-1] < 0:
            c = -c
        if c != 1:
            num = tuple(x // c for x in num)
            den = tuple(x // c for x in den)
        self.e, self.num, self.den = e, num, den

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_int(n: int) -> "Scalar":
        if n == 0:
            return ZERO
        return Scalar(0, (n,), (1,), _canonical=True)

    @staticmethod
    def from_fraction(f: Fraction) -> "Scalar":
        f = Fraction(f)
        if f == 0:
            return ZERO
        return Scalar(0, (f.numerator,), (f.denominator,), _canonical=True)

    @staticmethod
    def q_power(k: int) -> "Scalar":
        return Scalar(k, (1,), (1,), _canonical=True)

    @staticmethod
    def monomial(coeff: int, k: int) -> "Scalar":
        """coeff * q^k"""
        if coeff == 0:
            return ZERO
        return Scalar(k, (coeff,), (1,), _canonical=True)

    @staticmethod
    def from_laurent(terms: dict) -> "Scalar":
        """Build from {exponent: integer coefficient}."""
        terms = {k: v for k, v in terms.items() if v}
        if not terms:
            return ZERO
        lo = min(terms)
        coeffs = [0] * (max(terms) - lo + 1)
        for k, v in terms.items():
            coeffs[k - lo] = v
        return Scalar(lo, _trim(coeffs), (1,))

    # -- ring/field ops ----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.e == other.e and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.e, self.num, self.den))

    def __neg__(self) -> "Scalar":
        return Scalar(self.e, _pneg(self.num), self.den, _canonical=True)

    def __add__(self, other: "Scalar") -> "Scalar":
        if not self.num:
            return other
        if not other.num:
            return self
        e = min(self.e, other.e)
        a = _pmul(_shiftpoly(self.num, self.e - e), other.den)
        b = _pmul(_shiftpoly(other.num, other.e - e), self.den)
        return Scalar(e, _padd(a, b), _pmul(self.den, other.den))

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __mul__(self, other: "Scalar") -> "Scalar":
        if not self.num or not other.num:
            return ZERO
        if self.den == (1,) and len(self.num) == 1:
            return other._mul_monomial(self.num[0], self.e)
        if other.den == (1,) and len(other.num) == 1:
            return self._mul_monomial(other.num[0], other.e)
        return Scalar(self.e + other.e, _pmul(self.num, other.num),
                      _pmul(self.den, other.den))

    def _mul_monomial(self, coeff: int, k: int) -> "Scalar":
        if coeff == 0 or not self.num:
            return ZERO
        if coeff == 1:
            return Scalar(self.e + k, self.num, self.den, _canonical=True)
        if coeff == -1:
            return Scalar(self.e + k, _pneg(self.num), self.den, _canonical=True)
        return Scalar(self.e + k, tuple(coeff * x for x in self.num), self.den)

    def inverse(self) -> "Scalar":
        if not self.num:
            raise ZeroDivisionError("division by zero scalar")
        num, den = self.den, self.num
        if den[-1] < 0:
            num, den = _pneg(num), _pneg(den)
        return Scalar(-self.e, num, den, _canonical=True)

    def __truediv__(self, other: "Scalar") -> "Scalar":
        return self * other.inverse()

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- valuation / A0 ----------------------------------------------------

    def valuation(self):
        """Order of vanishing at q=0; +inf for the zero scalar."""
        return math.inf if not self.num else self.e

    def in_A0(self) -> bool:
        return not self.num or self.e >= 0

    def mod_q(self) -> Fraction:
        """Image at q=0 of an element regular there."""
        if not self.num:
            return Fraction(0)
        if self.e < 0:
            raise ValueError("not in A0: valuation %d < 0" % self.e)
        if self.e > 0:
            return Fraction(0)
        return Fraction(self.num[0], self.den[0])

    # -- substitutions and renderings ---------------------------------------

    def subs_neg_inv_q(self) -> "Scalar":
        """The field automorphism q -> -q^{-1} (used by the omega duality)."""
        if not self.num:
            return ZERO
        sign = -1 if self.e % 2 else 1
        n = tuple(sign * (-1) ** i * c for i, c in enumerate(self.num))[::-1]
        d = tuple((-1) ** i * c for i, c in enumerate(self.den))[::-1]
        return Scalar(-self.e - (len(self.num) - 1) + (len(self.den) - 1), n, d)

    def is_laurent(self) -> bool:
        return self.den == (1,)

    def laurent_terms(self) -> dict:
        """{exponent: coefficient}; only valid when is_laurent()."""
        if self.den != (1,):
            raise ValueError("not a Laurent polynomial")
        return {self.e + i: c for i, c in enumerate(self.num) if c}

    def to_pairs(self):
        """Lossless JSON form: {num: [[exp, coeff]...], den: [[exp, coeff]...]}."""
        return {
            "num": [[self.e + i, c] for i, c in enumerate(self.num) if c],
            "den": [[i, c] for i, c in enumerate(self.den) if c],
        }

    @staticmethod
    def from_pairs(obj) -> "Scalar":
        num = {int(e): int(c) for e, c in obj["num"]}
        den = {int(e): int(c) for e, c in obj["den"]}
        a = Scalar.from_laurent(num)
        b = Scalar.from_laurent(den)
        return a / b

    def render(self) -> str:
        if not self.num:
            return "0"
        num = _render_laurent(self.num, self.e)
        if self.den == (1,):
            return num
        return "(%s)/(%s)" % (num, _render_laurent(self.den, 0))

    def __repr__(self):
        return "Scalar(%s)" % self.render()


def _shiftpoly(p: Poly, k: int) -> Poly:
    return ((0,) * k) + p if k else p


def _render_laurent(coeffs: Poly, shift: int) -> str:
    parts = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        k = shift + i
        if k == 0:
            t = str(abs(c))
        else:
            mag = "" if abs(c) == 1 else "%d*" % abs(c)
            t = "%sq^%d" % (mag, k) if k != 1 else "%sq" % mag
        if not parts:
            parts.append(t if c > 0 else "-" + t)
        else:
            parts.append(("+ " if c > 0 else "- ") + t)
    return " ".join(parts)


ZERO = Scalar(0, (), (1,), _canonical=True)
ONE = Scalar(0, (1,), (1,), _canonical=True)
MINUS_ONE = Scalar(0, (-1,), (1,), _canonical=True)


# -- q-integers ------------------------------------------------------------

@lru_cache(maxsize=None)
def q_int(s: int, d: int = 1) -> Scalar:
    """[s]_z for z = q^d:  (z^s - z^{-s}) / (z - z^{-1})."""
    if s < 0 or d < 1:
        raise ValueError("q_int requires s >= 0, d >= 1")
    return Scalar.from_laurent({d * (s - 1 - 2 * k): 1 for k in range(s)})


@lru_cache(maxsize=None)
def q_int_factorial(s: int, d: int = 1) -> Scalar:
    if s <= 0:
        return ONE
    return q_int_factorial(s - 1, d) * q_int(s, d)


@lru_cache(maxsize=None)
def q_odd_int(s: int, d: int = 1) -> Scalar:
    """{s}_z for z = q^d:  ((-z)^s - z^{-s}) / (-z - z^{-1})."""
    if s < 0 or d < 1:
        raise ValueError("q_odd_int requires s >= 0, d >= 1")
    if s == 0:
        return ZERO
    # recursion {s+1}_z = -z {s}_z + z^{-s}
    prev = q_odd_int(s - 1, d)
    return prev._mul_monomial(-1, d) + Scalar.q_power(-d * (s - 1))


@lru_cache(maxsize=None)
def q_odd_int_factorial(s: int, d: int = 1) -> Scalar:
    if s <= 0:
        return ONE
    return q_odd_int_factorial(s - 1, d) * q_odd_int(s, d)


def scalar_sum(xs: Iterable[Scalar]) -> Scalar:
    out = ZERO
    for x in xs:
        out = out + x
    return out
