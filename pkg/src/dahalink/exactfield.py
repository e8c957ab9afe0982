"""Exact arithmetic over Q and over a single quadratic extension Q(sqrt(D)).

Every scalar in this package is a :class:`FieldElement`: a pair of rationals
``rat + irr*sqrt(D)`` attached to a :class:`FieldContext` that fixes the
square-free discriminant ``D``.  ``D = 1`` means the plain rationals (then
``irr`` is forced to zero).  All arithmetic is exact; there is no floating
point anywhere.

>>> ctx = FieldContext(2)
>>> x = ctx.element(1, 1)          # 1 + sqrt(2)
>>> (x * x.conjugate()).rat
Fraction(-1, 1)
>>> x.inv()
FieldElement(-1 + 1*sqrt(2))

The deliberately small surface (one extension, square roots of rationals
only) keeps root-of-unity detection and square detection decidable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

__all__ = [
    "Rational",
    "FieldContext",
    "FieldElement",
    "ContextMismatchError",
    "ExtensionRequiredError",
    "add",
    "sub",
    "mul",
    "inv",
    "int_pow",
    "sqrt_in_field",
    "sqrt_element",
    "is_valid_q",
    "square_free_decomposition",
    "QQ",
]

#: Rationals are stdlib fractions: arbitrary precision, always canonical.
Rational = Fraction

Coercible = Union["FieldElement", Fraction, int]


class ContextMismatchError(ValueError):
    """Two elements of genuinely different quadratic extensions were combined."""


class ExtensionRequiredError(ValueError):
    """A square root does not exist in the current field and the context
    already carries a nontrivial discriminant, so no further extension is
    attempted."""


def _square_free_int(n: int) -> tuple[int, int]:
    """Decompose a nonzero integer as ``n = s**2 * d`` with ``d`` square-free.

    Returns ``(s, d)`` with ``s > 0`` and ``sign(d) = sign(n)``.  Complete
    trial division; fine at the scale of this package (entries are small
    primes and powers of a small rational q).

    >>> _square_free_int(48)
    (4, 3)
    >>> _square_free_int(-18)
    (3, -2)
    """
    if n == 0:
        raise ValueError("square-free decomposition of zero")
    sign = 1 if n > 0 else -1
    n = abs(n)
    s, d = 1, 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                d *= p
        p += 1 if p == 2 else 2
    d *= n  # leftover prime (if any) appears once
    return s, sign * d


def square_free_decomposition(r: Fraction) -> tuple[Fraction, int]:
    """Write a nonzero rational as ``r = s**2 * D`` with ``D`` a square-free
    integer and ``s`` a positive rational.

    >>> square_free_decomposition(Fraction(9, 4))
    (Fraction(3, 2), 1)
    >>> square_free_decomposition(Fraction(8))
    (Fraction(2, 1), 2)
    >>> square_free_decomposition(Fraction(-3, 2))
    (Fraction(1, 2), -6)
    """
    if r == 0:
        raise ValueError("square-free decomposition of zero")
    # r = p/q = (p*q) / q**2
    s_int, d = _square_free_int(r.numerator * r.denominator)
    return Fraction(s_int, r.denominator), d


def _rational_sqrt(r: Fraction) -> Optional[Fraction]:
    """The positive rational square root of ``r``, or None."""
    if r < 0:
        return None
    if r == 0:
        return Fraction(0)
    pn, pd = math.isqrt(r.numerator), math.isqrt(r.denominator)
    if pn * pn == r.numerator and pd * pd == r.denominator:
        return Fraction(pn, pd)
    return None


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def _parse_frac(s: Union[str, int]) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(s)


@dataclass(frozen=True)
class FieldContext:
    """The field Q(sqrt(disc)); ``disc = 1`` is plain Q.

    ``disc`` must be square-free and nonzero (negative values give an
    imaginary quadratic field, which is fine).  Contexts compare by value,
    so two contexts with the same discriminant are interchangeable.
    """

    disc: int = 1

    def __post_init__(self) -> None:
        if self.disc == 0:
            raise ValueError("discriminant must be nonzero")
        _, d = _square_free_int(self.disc)
        if d != self.disc:
            raise ValueError(f"discriminant {self.disc} is not square-free")

    # -- element factories -------------------------------------------------

    def element(self, rat: Union[Fraction, int, str], irr: Union[Fraction, int, str] = 0) -> FieldElement:
        return FieldElement(self, _parse_frac(rat) if isinstance(rat, (int, str)) else rat,
                            _parse_frac(irr) if isinstance(irr, (int, str)) else irr)

    def rational(self, p: int, q: int = 1) -> FieldElement:
        return FieldElement(self, Fraction(p, q), Fraction(0))

    def from_fraction(self, f: Fraction) -> FieldElement:
        return FieldElement(self, f, Fraction(0))

    def zero(self) -> FieldElement:
        return FieldElement(self, Fraction(0), Fraction(0))

    def one(self) -> FieldElement:
        return FieldElement(self, Fraction(1), Fraction(0))

    def sqrt_disc(self) -> FieldElement:
        """The element sqrt(disc) itself (requires disc != 1)."""
        if self.disc == 1:
            return self.one()
        return FieldElement(self, Fraction(0), Fraction(1))


#: The plain rational field, shared default context.
QQ = FieldContext(1)


class FieldElement:
    """An element ``rat + irr*sqrt(D)`` of the field fixed by its context.

    Immutable.  Supports ``+ - * / **`` with other elements of the same
    context and with ints/Fractions (which coerce).  Elements whose ``irr``
    part vanishes compare equal across contexts.
    """

    __slots__ = ("ctx", "rat", "irr")

    def __init__(self, ctx: FieldContext, rat: Fraction, irr: Fraction = Fraction(0)) -> None:
        if not isinstance(rat, Fraction):
            rat = Fraction(rat)
        if not isinstance(irr, Fraction):
            irr = Fraction(irr)
        if ctx.disc == 1 and irr != 0:
            raise ValueError("irrational part must vanish over Q (disc = 1)")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "rat", rat)
        object.__setattr__(self, "irr", irr)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("FieldElement is immutable")

    # -- coercion ----------------------------------------------------------

    def _align(self, other: Coercible) -> Optional["FieldElement"]:
        """Bring ``other`` into this element's context, or None if impossible."""
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.ctx, Fraction(other))
        if not isinstance(other, FieldElement):
            return None
        if other.ctx == self.ctx:
            return other
        if other.irr == 0:
            return FieldElement(self.ctx, other.rat)
        if self.irr == 0:
            # will be re-aligned from the other side by the caller
            return None
        raise ContextMismatchError(
            f"cannot combine elements of Q(sqrt({self.ctx.disc})) and Q(sqrt({other.ctx.disc}))"
        )

    def _pair(self, other: Coercible) -> Optional[tuple["FieldElement", "FieldElement"]]:
        o = self._align(other)
        if o is not None:
            return self, o
        if isinstance(other, FieldElement) and self.irr == 0:
            return FieldElement(other.ctx, self.rat), other
        return None

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: Coercible) -> "FieldElement":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        return FieldElement(a.ctx, a.rat + b.rat, a.irr + b.irr)

    __radd__ = __add__

    def __sub__(self, other: Coercible) -> "FieldElement":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        return FieldElement(a.ctx, a.rat - b.rat, a.irr - b.irr)

    def __rsub__(self, other: Coercible) -> "FieldElement":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        return FieldElement(a.ctx, b.rat - a.rat, b.irr - a.irr)

    def __mul__(self, other: Coercible) -> "FieldElement":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        d = a.ctx.disc
        return FieldElement(
            a.ctx,
            a.rat * b.rat + d * a.irr * b.irr,
            a.rat * b.irr + a.irr * b.rat,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Coercible) -> "FieldElement":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        return a * b.inv()

    def __rtruediv__(self, other: Coercible) -> "FieldElement":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        a, b = p
        return b * a.inv()

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.ctx, -self.rat, -self.irr)

    def __pow__(self, e: int) -> "FieldElement":
        return int_pow(self, e)

    def conjugate(self) -> "FieldElement":
        return FieldElement(self.ctx, self.rat, -self.irr)

    def norm(self) -> Fraction:
        """The field norm ``rat**2 - disc*irr**2`` (a rational)."""
        return self.rat * self.rat - self.ctx.disc * self.irr * self.irr

    def inv(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero field element")
        return FieldElement(self.ctx, self.rat / n, -self.irr / n)

    # -- predicates & canonical forms ---------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.irr == 0

    def __bool__(self) -> bool:
        return self.rat != 0 or self.irr != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.irr == 0 and self.rat == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        if self.irr == 0 and other.irr == 0:
            return self.rat == other.rat
        return self.ctx == other.ctx and self.rat == other.rat and self.irr == other.irr

    def __hash__(self) -> int:
        disc = 1 if self.irr == 0 else self.ctx.disc
        return hash((self.rat, self.irr, disc))

    def __repr__(self) -> str:
        if self.irr == 0:
            return f"FieldElement({_frac_str(self.rat)})"
        return f"FieldElement({_frac_str(self.rat)} + {_frac_str(self.irr)}*sqrt({self.ctx.disc}))"

    def canonical_str(self) -> str:
        """A deterministic serialization used for lexicographic tie-breaks."""
        return json.dumps(self.to_json(), sort_keys=True)

    # -- (de)serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {"rat": _frac_str(self.rat), "irr": _frac_str(self.irr), "disc": self.ctx.disc}

    @classmethod
    def from_json(cls, data: object, ctx: Optional[FieldContext] = None) -> "FieldElement":
        """Parse an element from JSON.

        Accepts the canonical ``{"rat": "p/q", "irr": "p/q", "disc": D}``
        object, or a bare int / "p/q" string, which is read as a rational in
        ``ctx`` (default Q).
        """
        if isinstance(data, (int, str)):
            return FieldElement(ctx or QQ, _parse_frac(data))
        if isinstance(data, dict):
            disc = int(data.get("disc", 1))
            rat = _parse_frac(data.get("rat", 0))
            irr = _parse_frac(data.get("irr", 0))
            if irr == 0 and ctx is not None:
                return FieldElement(ctx, rat)
            target = ctx if (ctx is not None and ctx.disc == disc) else FieldContext(disc)
            return FieldElement(target, rat, irr)
        raise ValueError(f"cannot parse field element from {data!r}")


# ---------------------------------------------------------------------------
# Operations (thin functional forms of the methods above)
# ---------------------------------------------------------------------------


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def sub(x: FieldElement, y: FieldElement) -> FieldElement:
    return x - y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def inv(x: FieldElement) -> FieldElement:
    return x.inv()


def int_pow(x: Coercible, e: int) -> FieldElement:
    """``x**e`` for an integer exponent, by repeated squaring.

    >>> int_pow(QQ.rational(2), -4)
    FieldElement(1/16)
    """
    if not isinstance(x, FieldElement):
        x = QQ.element(Fraction(x))
    if e == 0:
        return x.ctx.one()
    base = x.inv() if e < 0 else x
    e = abs(e)
    out = base.ctx.one()
    while e:
        if e & 1:
            out = out * base
        base = base * base
        e >>= 1
    return out


def sqrt_in_field(x: FieldElement) -> Optional[FieldElement]:
    """A square root of a *rational* element inside its own field.

    Returns ``s`` with ``s*s == x`` when ``x`` is a rational square (s
    rational) or ``x/disc`` is a rational square (s a multiple of
    sqrt(disc)); otherwise None, signalling the caller to rebuild the
    context with a fresh discriminant.

    >>> sqrt_in_field(QQ.rational(9, 4))
    FieldElement(3/2)
    >>> ctx = FieldContext(2)
    >>> sqrt_in_field(ctx.rational(8))
    FieldElement(0 + 2*sqrt(2))
    >>> sqrt_in_field(ctx.rational(3)) is None
    True
    """
    if x.irr != 0:
        raise ValueError("square roots are taken of rational quantities only")
    if x.rat == 0:
        return x.ctx.zero()
    r = _rational_sqrt(x.rat)
    if r is not None:
        return x.ctx.from_fraction(r)
    if x.ctx.disc != 1:
        r = _rational_sqrt(x.rat / x.ctx.disc)
        if r is not None:
            return FieldElement(x.ctx, Fraction(0), r)
    return None


def sqrt_element(x: FieldElement) -> Optional[FieldElement]:
    """A square root of a general element within its own field, or None.

    For ``x = r + s*sqrt(D)`` with ``s != 0``: any root ``u + v*sqrt(D)``
    satisfies ``u**2 + D*v**2 = r`` and ``2uv = s``, which forces
    ``(u**2 - D*v**2)**2 = r**2 - D*s**2``; so the norm must be a rational
    square and ``u**2 = (r ± t)/2`` a rational square.

    >>> ctx = FieldContext(2)
    >>> y = ctx.element(3, 2)        # (1 + sqrt 2)**2
    >>> sqrt_element(y)
    FieldElement(1 + 1*sqrt(2))
    """
    if x.irr == 0:
        return sqrt_in_field(x)
    t = _rational_sqrt(x.norm())
    if t is None:
        return None
    for tt in (t, -t):
        u2 = (x.rat + tt) / 2
        if u2 <= 0:
            continue
        u = _rational_sqrt(u2)
        if u is None:
            continue
        v = x.irr / (2 * u)
        cand = FieldElement(x.ctx, u, v)
        if cand * cand == x:
            return cand
    return None


def is_valid_q(x: FieldElement) -> bool:
    """True iff ``x`` can serve as the deformation parameter: a rational
    that is neither zero nor a root of unity (for rationals: not ±1)."""
    return x.irr == 0 and x.rat not in (0, 1, -1)
