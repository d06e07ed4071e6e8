"""Canonical-form symbolic algebra for atomic transition and bosonic ladder operators.

An expression is a sum of monomials ``coeff * sigma(i,j) * ad^m * a^n``.  The
bosonic part is always stored normal-ordered (creators left of annihilators),
atomic products are contracted with ``sigma(i,j)*sigma(k,l) = delta_jk sigma(i,l)``,
and like terms are merged, so two expressions represent the same operator
exactly when their stored forms compare equal.

Coefficients are exact: a Gaussian rational scalar times a monomial in
parameter symbols, with an optional symbol denominator.  No floating point
enters until an expression is realized as a matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping

from .errors import ResidualCoupling, UnboundParameter

__all__ = [
    "Coefficient",
    "AtomOp",
    "BosonString",
    "Monomial",
    "OperatorExpr",
    "multiply",
    "add",
    "scale",
    "adjoint",
    "commutator",
    "equal",
    "project_out_level",
    "pretty",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


@dataclass(frozen=True)
class Coefficient:
    """Exact scalar: (re + i*im) * prod(num) / prod(den).

    All parameter symbols are taken to be real, so conjugation only flips the
    sign of ``im``.  A symbol never appears in both ``num`` and ``den``;
    common factors are cancelled on multiplication.
    """

    re: Fraction = Fraction(1)
    im: Fraction = Fraction(0)
    num: tuple[str, ...] = ()
    den: tuple[str, ...] = ()

    @staticmethod
    def make(re=1, im=0, num: Iterable[str] = (), den: Iterable[str] = ()) -> "Coefficient":
        re = _as_fraction(re)
        im = _as_fraction(im)
        num = list(num)
        den = list(den)
        if re == 0 and im == 0:
            return Coefficient(Fraction(0), Fraction(0), (), ())
        # cancel common symbols (multiset difference)
        for s in list(num):
            if s in den:
                num.remove(s)
                den.remove(s)
        return Coefficient(re, im, tuple(sorted(num)), tuple(sorted(den)))

    @staticmethod
    def zero() -> "Coefficient":
        return Coefficient(Fraction(0), Fraction(0))

    @staticmethod
    def one() -> "Coefficient":
        return Coefficient()

    @staticmethod
    def i() -> "Coefficient":
        return Coefficient(Fraction(0), Fraction(1))

    @staticmethod
    def symbol(name: str) -> "Coefficient":
        return Coefficient(num=(name,))

    @property
    def signature(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (self.num, self.den)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def mul(self, other: "Coefficient") -> "Coefficient":
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        return Coefficient.make(re, im, self.num + other.num, self.den + other.den)

    def add(self, other: "Coefficient") -> "Coefficient":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.signature != other.signature:
            raise ValueError("cannot add coefficients with different symbol signatures")
        return Coefficient.make(self.re + other.re, self.im + other.im, self.num, self.den)

    def neg(self) -> "Coefficient":
        return Coefficient.make(-self.re, -self.im, self.num, self.den)

    def conj(self) -> "Coefficient":
        return Coefficient.make(self.re, -self.im, self.num, self.den)

    def evaluate(self, params: Mapping[str, float]) -> complex:
        value = complex(float(self.re), float(self.im))
        for s in self.num:
            try:
                value *= params[s]
            except KeyError:
                raise UnboundParameter(s) from None
        for s in self.den:
            try:
                value /= params[s]
            except KeyError:
                raise UnboundParameter(s) from None
        return value


#: sort key element so the identity atom precedes every transition
_IDENTITY_KEY = (0, "", "")


@dataclass(frozen=True)
class AtomOp:
    """Atomic part of a monomial: the identity or a transition |i><j|."""

    pair: tuple[str, str] | None = None  # None means identity

    @staticmethod
    def identity() -> "AtomOp":
        return AtomOp(None)

    @staticmethod
    def transition(i: str, j: str) -> "AtomOp":
        return AtomOp((i, j))

    def is_identity(self) -> bool:
        return self.pair is None

    def mul(self, other: "AtomOp") -> "AtomOp | None":
        """Operator product; None encodes the zero operator."""
        if self.pair is None:
            return other
        if other.pair is None:
            return self
        i, j = self.pair
        k, l = other.pair
        if j != k:
            return None
        return AtomOp((i, l))

    def adjoint(self) -> "AtomOp":
        if self.pair is None:
            return self
        i, j = self.pair
        return AtomOp((j, i))

    @property
    def sort_key(self):
        if self.pair is None:
            return _IDENTITY_KEY
        return (1, self.pair[0], self.pair[1])


@dataclass(frozen=True)
class BosonString:
    """Normal-ordered ladder string ad^m a^n on a single mode."""

    creators: int = 0
    annihilators: int = 0

    @property
    def degree(self) -> int:
        return self.creators + self.annihilators

    def mul(self, other: "BosonString") -> list[tuple[Fraction, "BosonString"]]:
        """Normal-order the product (ad^m1 a^n1)(ad^m2 a^n2).

        Uses a^n ad^p = sum_k k! C(n,k) C(p,k) ad^(p-k) a^(n-k).
        """
        m1, n1 = self.creators, self.annihilators
        m2, n2 = other.creators, other.annihilators
        out = []
        for k in range(min(n1, m2) + 1):
            c = Fraction(factorial(k) * comb(n1, k) * comb(m2, k))
            out.append((c, BosonString(m1 + m2 - k, n1 + n2 - k)))
        return out

    def adjoint(self) -> "BosonString":
        # (ad^m a^n)^dag = ad^n a^m, already normal-ordered
        return BosonString(self.annihilators, self.creators)

    @property
    def sort_key(self):
        return (self.degree, self.creators)


@dataclass(frozen=True)
class Monomial:
    coeff: Coefficient
    atom: AtomOp
    boson: BosonString

    @property
    def merge_key(self):
        return (self.atom.sort_key, self.boson.sort_key, self.coeff.signature)


@dataclass(frozen=True)
class OperatorExpr:
    """Canonical sum of monomials; the unique stored form of an operator."""

    terms: tuple[Monomial, ...] = ()

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_monomials(monomials: Iterable[Monomial]) -> "OperatorExpr":
        merged: dict = {}
        for m in monomials:
            if m.coeff.is_zero():
                continue
            key = m.merge_key
            if key in merged:
                merged[key] = Monomial(merged[key].coeff.add(m.coeff), m.atom, m.boson)
            else:
                merged[key] = m
        terms = tuple(
            merged[k] for k in sorted(merged) if not merged[k].coeff.is_zero()
        )
        return OperatorExpr(terms)

    @staticmethod
    def zero() -> "OperatorExpr":
        return OperatorExpr(())

    @staticmethod
    def identity(coeff: Coefficient | None = None) -> "OperatorExpr":
        c = coeff if coeff is not None else Coefficient.one()
        return OperatorExpr.from_monomials([Monomial(c, AtomOp.identity(), BosonString())])

    @staticmethod
    def sigma(i: str, j: str) -> "OperatorExpr":
        return OperatorExpr.from_monomials(
            [Monomial(Coefficient.one(), AtomOp.transition(i, j), BosonString())]
        )

    @staticmethod
    def create() -> "OperatorExpr":
        return OperatorExpr.from_monomials(
            [Monomial(Coefficient.one(), AtomOp.identity(), BosonString(1, 0))]
        )

    @staticmethod
    def annihilate() -> "OperatorExpr":
        return OperatorExpr.from_monomials(
            [Monomial(Coefficient.one(), AtomOp.identity(), BosonString(0, 1))]
        )

    # -- convenience arithmetic --------------------------------------------

    def __add__(self, other: "OperatorExpr") -> "OperatorExpr":
        return add(self, other)

    def __sub__(self, other: "OperatorExpr") -> "OperatorExpr":
        return add(self, scale(other, Coefficient.make(-1)))

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            return multiply(self, other)
        if isinstance(other, Coefficient):
            return scale(self, other)
        if isinstance(other, (int, Fraction)):
            return scale(self, Coefficient.make(other))
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorExpr":
        return scale(self, Coefficient.make(-1))

    def is_zero(self) -> bool:
        return not self.terms

    def levels(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            if m.atom.pair is not None:
                out.update(m.atom.pair)
        return out

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            out.update(m.coeff.num)
            out.update(m.coeff.den)
        return out

    def max_boson_degree(self) -> int:
        return max((m.boson.degree for m in self.terms), default=0)

    def __str__(self) -> str:
        return pretty(self)


# -- operations -------------------------------------------------------------


def multiply(x: OperatorExpr, y: OperatorExpr) -> OperatorExpr:
    """Canonical form of the operator product X*Y."""
    out: list[Monomial] = []
    for mx in x.terms:
        for my in y.terms:
            atom = mx.atom.mul(my.atom)
            if atom is None:
                continue
            coeff = mx.coeff.mul(my.coeff)
            for frac, boson in mx.boson.mul(my.boson):
                out.append(Monomial(coeff.mul(Coefficient.make(frac)), atom, boson))
    return OperatorExpr.from_monomials(out)


def add(x: OperatorExpr, y: OperatorExpr) -> OperatorExpr:
    return OperatorExpr.from_monomials(x.terms + y.terms)


def scale(x: OperatorExpr, c: Coefficient) -> OperatorExpr:
    return OperatorExpr.from_monomials(
        [Monomial(m.coeff.mul(c), m.atom, m.boson) for m in x.terms]
    )


def adjoint(x: OperatorExpr) -> OperatorExpr:
    out: list[Monomial] = []
    for m in x.terms:
        out.append(Monomial(m.coeff.conj(), m.atom.adjoint(), m.boson.adjoint()))
    return OperatorExpr.from_monomials(out)


def commutator(x: OperatorExpr, y: OperatorExpr) -> OperatorExpr:
    return add(multiply(x, y), scale(multiply(y, x), Coefficient.make(-1)))


def equal(x: OperatorExpr, y: OperatorExpr) -> bool:
    return x.terms == y.terms


def project_out_level(x: OperatorExpr, level: str) -> OperatorExpr:
    """Drop sigma(level,level) monomials; error if off-diagonal terms remain.

    Eliminating an intermediate level is only consistent when nothing couples
    in or out of it at this order, so surviving sigma(i,level)/sigma(level,i)
    terms are rejected rather than silently removed.
    """
    kept: list[Monomial] = []
    for m in x.terms:
        pair = m.atom.pair
        if pair == (level, level):
            continue
        if pair is not None and level in pair:
            raise ResidualCoupling(level)
        kept.append(m)
    return OperatorExpr.from_monomials(kept)


# -- pretty printer ---------------------------------------------------------


def _rational_str(r: Fraction) -> str:
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def _coeff_factors(c: Coefficient, has_op_factors: bool) -> tuple[int, list[str]]:
    """Split a coefficient into (sign, factor strings) for printing."""
    re, im = c.re, c.im
    factors: list[str] = []
    if im == 0:
        sign = -1 if re < 0 else 1
        mag = abs(re)
        if mag != 1 or (not c.num and not c.den and not has_op_factors):
            factors.append(_rational_str(mag))
    elif re == 0:
        sign = -1 if im < 0 else 1
        mag = abs(im)
        if mag != 1:
            factors.append(_rational_str(mag))
        factors.append("i")
    else:
        sign = 1
        op = "-" if im < 0 else "+"
        im_mag = _rational_str(abs(im))
        factors.append(f"({_rational_str(re)} {op} {im_mag}*i)")
    factors.extend(c.num)
    # distribute denominator symbols, rightmost factors first ("g1*g2/delta")
    slots = [
        i
        for i, f in enumerate(factors)
        if "/" not in f and f != "i" and not f.startswith("(")
    ]
    dens = list(c.den)
    for i in reversed(slots):
        if not dens:
            break
        factors[i] = factors[i] + "/" + dens.pop(0)
    for d in dens:
        factors.append("1/" + d)
    return sign, factors


def _monomial_str(m: Monomial) -> tuple[int, str]:
    has_op = m.atom.pair is not None or m.boson.degree > 0
    sign, factors = _coeff_factors(m.coeff, has_op)
    if m.atom.pair is not None:
        i, j = m.atom.pair
        factors.append(f"sig({i},{j})")
    factors.extend(["ad"] * m.boson.creators)
    factors.extend(["a"] * m.boson.annihilators)
    if not factors:
        factors = ["1"]
    return sign, "*".join(factors)


def pretty(x: OperatorExpr) -> str:
    """Normalized text form; reparses to an equal expression."""
    if not x.terms:
        return "0"
    pieces: list[str] = []
    for idx, m in enumerate(x.terms):
        sign, body = _monomial_str(m)
        if idx == 0:
            pieces.append(("-" if sign < 0 else "") + body)
        else:
            pieces.append(("- " if sign < 0 else "+ ") + body)
    return " ".join(pieces)
