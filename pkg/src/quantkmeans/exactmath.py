"""Exact arbitrary-precision rational arithmetic for quantized-fraction states.

Every protocol decision (event triggers, nearest-centroid assignment,
extrema comparisons, termination tests) is made on integers via
cross-multiplication.  No floating point enters the decision path; floats
exist only as projections for plot data.

Unlike the stdlib fractions module, values are NOT reduced on construction:
a state such as 12/3 keeps its counter denominator until ``reduced()`` is
called.  Equality and ordering are value-based, so 12/3 == 4/1.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence


class Fraction:
    """A rational number ``num/den`` with ``den > 0``, compared by value."""

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("fraction denominator must be nonzero")
        if den < 0:
            num, den = -num, -den
        self.num = num
        self.den = den

    @classmethod
    def parse(cls, text: str) -> "Fraction":
        """Parse ``"num/den"`` or a plain integer literal."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return cls(int(num), int(den))
        return cls(int(text), 1)

    def reduced(self) -> "Fraction":
        g = gcd(self.num, self.den)
        if g <= 1:
            return self
        return Fraction(self.num // g, self.den // g)

    # Comparisons cross-multiply; denominators are positive by construction.
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fraction):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __lt__(self, other: "Fraction") -> bool:
        return self.num * other.den < other.num * self.den

    def __le__(self, other: "Fraction") -> bool:
        return self.num * other.den <= other.num * self.den

    def __gt__(self, other: "Fraction") -> bool:
        return self.num * other.den > other.num * self.den

    def __ge__(self, other: "Fraction") -> bool:
        return self.num * other.den >= other.num * self.den

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.num, r.den))

    def __add__(self, other: "Fraction") -> "Fraction":
        if self.den == other.den:
            return Fraction(self.num + other.num, self.den)
        return Fraction(self.num * other.den + other.num * self.den,
                        self.den * other.den)

    def __sub__(self, other: "Fraction") -> "Fraction":
        if self.den == other.den:
            return Fraction(self.num - other.num, self.den)
        return Fraction(self.num * other.den - other.num * self.den,
                        self.den * other.den)

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        r = self.reduced()
        return f"{r.num}/{r.den}"

    def __repr__(self) -> str:
        return f"Fraction({self.num}, {self.den})"


class FractionVector:
    """A d-dimensional rational point: integer numerators over one positive
    integer denominator.  This is the shape of a node's state estimate
    (value-mass vector over counter mass) and of a centroid."""

    __slots__ = ("nums", "den")

    def __init__(self, nums: Iterable[int], den: int = 1):
        if den == 0:
            raise ZeroDivisionError("fraction denominator must be nonzero")
        nums = tuple(nums)
        if den < 0:
            nums = tuple(-v for v in nums)
            den = -den
        self.nums = nums
        self.den = den

    @classmethod
    def from_ints(cls, values: Iterable[int]) -> "FractionVector":
        return cls(tuple(values), 1)

    @property
    def dim(self) -> int:
        return len(self.nums)

    def component(self, i: int) -> Fraction:
        return Fraction(self.nums[i], self.den)

    def components(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self.den) for v in self.nums)

    def reduced(self) -> "FractionVector":
        g = gcd(self.den, *self.nums) if self.nums else self.den
        if g <= 1:
            return self
        return FractionVector(tuple(v // g for v in self.nums), self.den // g)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FractionVector):
            return NotImplemented
        if len(self.nums) != len(other.nums):
            return False
        a, b = self.den, other.den
        return all(x * b == y * a for x, y in zip(self.nums, other.nums))

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.nums, r.den))

    def elementwise_max(self, other: "FractionVector") -> "FractionVector":
        """Per-dimension maximum.  Returns one of the inputs unchanged when it
        dominates in every dimension, so repeated merging of already-agreed
        values costs no allocation."""
        return self._elementwise(other, take_max=True)

    def elementwise_min(self, other: "FractionVector") -> "FractionVector":
        return self._elementwise(other, take_max=False)

    def _elementwise(self, other: "FractionVector", take_max: bool) -> "FractionVector":
        if len(self.nums) != len(other.nums):
            raise ValueError("dimension mismatch")
        a, b = self.den, other.den
        self_ge = other_ge = True
        for x, y in zip(self.nums, other.nums):
            lhs, rhs = x * b, y * a
            if lhs < rhs:
                self_ge = False
            elif lhs > rhs:
                other_ge = False
        # Ties return the other operand, so a value that has stopped moving
        # propagates through merges as one shared object.
        if take_max:
            if other_ge:
                return other
            if self_ge:
                return self
        else:
            if self_ge:
                return other
            if other_ge:
                return self
        pick = max if take_max else min
        nums = tuple(pick(x * b, y * a) for x, y in zip(self.nums, other.nums))
        return FractionVector(nums, a * b).reduced()

    def __str__(self) -> str:
        r = self.reduced()
        return " ".join(f"{v}/{r.den}" for v in r.nums)

    def __repr__(self) -> str:
        return f"FractionVector({self.nums!r}, {self.den})"


def sq_dist_exact(x: Sequence[int], c: FractionVector) -> Fraction:
    """Exact squared Euclidean distance between an integer point and a
    rational point, as a fraction over ``c.den ** 2``."""
    if len(x) != len(c.nums):
        raise ValueError("dimension mismatch")
    den = c.den
    num = 0
    for xi, ci in zip(x, c.nums):
        diff = xi * den - ci
        num += diff * diff
    return Fraction(num, den * den)
