"""Exact arithmetic on dyadic rationals viewed as elements of Q_2.

Every locally constant, compactly supported function on the 2-adic line or
plane is determined by its values at dyadic rational points, so this subring
is the only number system the package needs.  Values are stored in canonical
form (odd-or-zero numerator over a power of two), which makes valuation,
norm, fractional part and coset arithmetic exact -- no floating point enters
until a complex character value is requested.

All objects in this module are immutable and all operations are pure, so
values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

__all__ = [
    "INFINITE_VALUATION",
    "DyadicRational",
    "DyadicVec2",
    "QuincunxMatrix",
    "QUINCUNX_A",
    "QUINCUNX_A_INV",
    "QUINCUNX_A_SQ",
    "QUINCUNX_A_INV_SQ",
    "quincunx_matrix",
    "character",
    "enumerate_shifts",
]

# Distinguished sentinel for valuation(0); compares greater than any integer.
INFINITE_VALUATION = math.inf


@total_ordering
class DyadicRational:
    """A number numerator / 2**exponent with the numerator odd or zero.

    The constructor accepts any integer numerator and normalizes, so
    ``DyadicRational(12)`` and ``DyadicRational(3, -2)`` are the same value.
    Zero is canonically ``(0, 0)``.
    """

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        if num == 0:
            exp = 0
        else:
            while num % 2 == 0:
                num //= 2
                exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRational is immutable")

    # -- arithmetic (exact and closed) --------------------------------------

    def __add__(self, other: "DyadicRational") -> "DyadicRational":
        e = max(self.exp, other.exp)
        return DyadicRational(
            self.num * (1 << (e - self.exp)) + other.num * (1 << (e - other.exp)), e
        )

    def __sub__(self, other: "DyadicRational") -> "DyadicRational":
        return self + (-other)

    def __neg__(self) -> "DyadicRational":
        return DyadicRational(-self.num, self.exp)

    def __mul__(self, other: "DyadicRational") -> "DyadicRational":
        return DyadicRational(self.num * other.num, self.exp + other.exp)

    # -- 2-adic structure ----------------------------------------------------

    def valuation(self) -> float | int:
        """Exponent of 2 in the value; INFINITE_VALUATION for zero."""
        if self.num == 0:
            return INFINITE_VALUATION
        return -self.exp

    def norm2(self) -> Fraction:
        """The 2-adic absolute value, exactly, as a Fraction."""
        if self.num == 0:
            return Fraction(0)
        v = -self.exp
        return Fraction(1, 1 << v) if v >= 0 else Fraction(1 << (-v))

    def frac_part(self) -> "DyadicRational":
        """The 2-adic fractional part: the digits at negative positions.

        The result r lies in [0, 1) and self - r is a 2-adic integer.
        """
        if self.exp <= 0:
            return DyadicRational(0)
        return DyadicRational(self.num % (1 << self.exp), self.exp)

    def is_integral(self) -> bool:
        """True when the value lies in Z_2 (valuation >= 0)."""
        return self.exp <= 0

    # -- conversions and formatting -------------------------------------------

    def as_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.num, 1 << self.exp)
        return Fraction(self.num * (1 << (-self.exp)))

    def __float__(self) -> float:
        return float(self.as_fraction())

    def __str__(self) -> str:
        return f"{self.num}/2^{self.exp}"

    def __repr__(self) -> str:
        return f"DyadicRational({self.num}, {self.exp})"

    @classmethod
    def parse(cls, text: str) -> "DyadicRational":
        """Inverse of str(); accepts 'num/2^exp' and validates the shape."""
        try:
            num_s, exp_s = text.split("/2^")
            return cls(int(num_s), int(exp_s))
        except ValueError as e:
            raise ValueError(f"not a dyadic rational string: {text!r}") from e

    def to_json(self) -> dict:
        return {"num": str(self.num), "exp": self.exp}

    @classmethod
    def from_json(cls, obj: dict) -> "DyadicRational":
        return cls(int(obj["num"]), int(obj["exp"]))

    # -- comparisons (by real value) and hashing ------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return self.num == other.num and self.exp == other.exp

    def __lt__(self, other: "DyadicRational") -> bool:
        return self.as_fraction() < other.as_fraction()

    def __hash__(self) -> int:
        return hash((self.num, self.exp))


DR_ZERO = DyadicRational(0)
DR_ONE = DyadicRational(1)
DR_HALF = DyadicRational(1, 1)


@dataclass(frozen=True)
class DyadicVec2:
    """A point of Q_2^2 with dyadic rational coordinates."""

    x1: DyadicRational
    x2: DyadicRational

    @classmethod
    def of(cls, x1, x2) -> "DyadicVec2":
        """Build from ints, (num, exp) pairs or DyadicRationals."""
        return cls(_as_dr(x1), _as_dr(x2))

    def __add__(self, other: "DyadicVec2") -> "DyadicVec2":
        return DyadicVec2(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "DyadicVec2") -> "DyadicVec2":
        return DyadicVec2(self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "DyadicVec2":
        return DyadicVec2(-self.x1, -self.x2)

    def __iter__(self):
        yield self.x1
        yield self.x2

    def norm2(self) -> Fraction:
        """max of the coordinate norms."""
        return max(self.x1.norm2(), self.x2.norm2())

    def frac_part(self) -> "DyadicVec2":
        return DyadicVec2(self.x1.frac_part(), self.x2.frac_part())

    def is_integral(self) -> bool:
        return self.x1.is_integral() and self.x2.is_integral()

    def __str__(self) -> str:
        return f"({self.x1}, {self.x2})"


def _as_dr(x) -> DyadicRational:
    if isinstance(x, DyadicRational):
        return x
    if isinstance(x, int):
        return DyadicRational(x)
    if isinstance(x, tuple) and len(x) == 2:
        return DyadicRational(x[0], x[1])
    raise TypeError(f"cannot interpret {x!r} as a dyadic rational")


def character(x: DyadicRational) -> complex:
    """The additive character exp(2*pi*i*{x}) of Q_2.

    The fractional part is computed exactly first, so the result is a root
    of unity accurate to floating precision.
    """
    f = x.frac_part()
    if f.num == 0:
        return 1.0 + 0.0j
    theta = math.tau * f.num / (1 << f.exp)
    return complex(math.cos(theta), math.sin(theta))


class QuincunxMatrix:
    """One of the four fixed dilation matrices, with exact dyadic entries.

    ``A`` is the inverse of the integer quincunx matrix [[1,-1],[1,1]];
    ``A_SQ`` and ``A_INV_SQ`` are the exact squares, so composing two
    applications of A agrees with one application of A_SQ entry for entry.
    """

    __slots__ = ("tag", "entries")

    def __init__(self, tag: str, entries):
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("QuincunxMatrix is immutable")

    def apply(self, v: DyadicVec2) -> DyadicVec2:
        (a, b), (c, d) = self.entries
        return DyadicVec2(a * v.x1 + b * v.x2, c * v.x1 + d * v.x2)

    def __repr__(self) -> str:
        return f"QuincunxMatrix({self.tag})"


def _mat(rows) -> tuple:
    return tuple(tuple(_as_dr(x) for x in row) for row in rows)


def _matmul(p, q) -> tuple:
    return tuple(
        tuple(p[i][0] * q[0][j] + p[i][1] * q[1][j] for j in range(2)) for i in range(2)
    )


_A_ENTRIES = _mat([[(1, 1), (1, 1)], [(-1, 1), (1, 1)]])
_A_INV_ENTRIES = _mat([[1, -1], [1, 1]])

QUINCUNX_A = QuincunxMatrix("A", _A_ENTRIES)
QUINCUNX_A_INV = QuincunxMatrix("A_inverse", _A_INV_ENTRIES)
QUINCUNX_A_SQ = QuincunxMatrix("A_squared", _matmul(_A_ENTRIES, _A_ENTRIES))
QUINCUNX_A_INV_SQ = QuincunxMatrix(
    "A_inverse_squared", _matmul(_A_INV_ENTRIES, _A_INV_ENTRIES)
)

_BY_TAG = {
    m.tag: m
    for m in (QUINCUNX_A, QUINCUNX_A_INV, QUINCUNX_A_SQ, QUINCUNX_A_INV_SQ)
}


def quincunx_matrix(tag: str) -> QuincunxMatrix:
    try:
        return _BY_TAG[tag]
    except KeyError:
        raise ValueError(f"unknown quincunx matrix tag: {tag!r}") from None


def enumerate_shifts(s: int) -> list[DyadicVec2]:
    """All lattice shifts (k/2^s, l/2^s), 0 <= k,l < 2^s, ordered N = 2^s*l + k.

    This ordering matches the vectorization used throughout the wavelet
    generator, so index N in a coefficient vector always refers to the same
    shift as position N of this list.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    size = 1 << s
    return [
        DyadicVec2(DyadicRational(k, s), DyadicRational(l, s))
        for l in range(size)
        for k in range(size)
    ]
