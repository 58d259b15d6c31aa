"""Exact rational intervals and normalized finite unions of intervals.

Every coordinate is a :class:`fractions.Fraction`.  An :class:`IntervalSet`
is always normalized: components are sorted, pairwise disjoint, and no two
of them could be merged into a single interval.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: silently converting them would break exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValueError("a degenerate interval must be closed at both ends")

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(as_rational(lo), as_rational(hi), True, True)

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(as_rational(lo), as_rational(hi), False, False)

    @classmethod
    def point(cls, x) -> "Interval":
        x = as_rational(x)
        return cls(x, x, True, True)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Fraction) -> bool:
        if self.lo < x < self.hi:
            return True
        return (x == self.lo and self.lo_closed) or (x == self.hi and self.hi_closed)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def to_json(self) -> dict:
        return {
            "lo": format_rational(self.lo),
            "hi": format_rational(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Interval":
        return cls(as_rational(d["lo"]), as_rational(d["hi"]),
                   bool(d["lo_closed"]), bool(d["hi_closed"]))

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


def _merge(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    # closed-at-lo sorts first so degenerate points absorb open neighbours
    ivs = sorted(intervals, key=lambda iv: (iv.lo, not iv.lo_closed))
    out: list[Interval] = []
    for iv in ivs:
        if not out:
            out.append(iv)
            continue
        cur = out[-1]
        touches = iv.lo < cur.hi or (iv.lo == cur.hi and (cur.hi_closed or iv.lo_closed))
        if not touches:
            out.append(iv)
            continue
        if iv.hi > cur.hi:
            hi, hi_closed = iv.hi, iv.hi_closed
        elif iv.hi == cur.hi:
            hi, hi_closed = cur.hi, cur.hi_closed or iv.hi_closed
        else:
            hi, hi_closed = cur.hi, cur.hi_closed
        lo_closed = cur.lo_closed or (iv.lo == cur.lo and iv.lo_closed)
        out[-1] = Interval(cur.lo, hi, lo_closed, hi_closed)
    return tuple(out)


class IntervalSet:
    """Normalized finite union of intervals (immutable)."""

    __slots__ = ("components", "_los")

    def __init__(self, intervals: Iterable[Interval] = ()):
        self.components: tuple[Interval, ...] = _merge(intervals)
        self._los = [c.lo for c in self.components]

    @classmethod
    def _trusted(cls, comps: Sequence[Interval]) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj.components = tuple(comps)
        obj._los = [c.lo for c in obj.components]
        return obj

    # -- queries -------------------------------------------------------
    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __bool__(self) -> bool:
        return bool(self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalSet) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        return "IntervalSet{" + ", ".join(str(c) for c in self.components) + "}"

    @property
    def length(self) -> Fraction:
        return sum((c.length for c in self.components), ZERO)

    def contains(self, x: Fraction) -> bool:
        i = bisect_right(self._los, x) - 1
        return i >= 0 and self.components[i].contains(x)

    __contains__ = contains

    def _covers_right_of(self, x: Fraction) -> bool:
        """True when the open segment just to the right of x lies in the set."""
        i = bisect_right(self._los, x) - 1
        return i >= 0 and x < self.components[i].hi

    def endpoints(self) -> list[Fraction]:
        pts = []
        for c in self.components:
            pts.append(c.lo)
            pts.append(c.hi)
        return pts

    def component_lengths(self) -> list[Fraction]:
        return [c.length for c in self.components]

    # -- algebra ---------------------------------------------------------
    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.components + other.components)

    def symmetric_difference(self, other: "IntervalSet") -> "IntervalSet":
        return combine([self, other], lambda a, b: a != b)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return combine([self, other], lambda a, b: a and not b)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        return combine([self, other], lambda a, b: a and b)

    def complement_in_unit(self) -> "IntervalSet":
        for c in self.components:
            if c.lo < 0 or c.hi > 1:
                raise ValueError(f"component {c} lies outside [0, 1]")
        return UNIT.difference(self)

    __or__ = union
    __xor__ = symmetric_difference
    __and__ = intersection
    __sub__ = difference

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.components]

    @classmethod
    def from_json(cls, data: list[dict]) -> "IntervalSet":
        return cls(Interval.from_json(d) for d in data)


EMPTY = IntervalSet()
UNIT = IntervalSet([Interval.closed(0, 1)])


def from_profile(points: Sequence[Fraction], at: Sequence[bool],
                 after: Sequence[bool]) -> IntervalSet:
    """Build a normalized set from a piecewise-constant membership profile.

    ``points`` are sorted and distinct; ``at[i]`` is membership at
    ``points[i]`` and ``after[i]`` on the open gap to the next point.  The
    set is empty left of the first point and right of the last.
    """
    comps: list[Interval] = []
    start = None
    start_closed = False
    inside = False
    for p, a, nxt in zip(points, at, after):
        if inside:
            if a and nxt:
                continue
            if a:
                comps.append(Interval(start, p, start_closed, True))
                inside = False
            else:
                comps.append(Interval(start, p, start_closed, False))
                inside = False
                if nxt:
                    start, start_closed, inside = p, False, True
        else:
            if a and nxt:
                start, start_closed, inside = p, True, True
            elif a:
                comps.append(Interval(p, p, True, True))
            elif nxt:
                start, start_closed, inside = p, False, True
    if inside:
        raise ValueError("profile is unbounded on the right")
    return IntervalSet._trusted(comps)


def combine(sets: Sequence[IntervalSet], rule: Callable[..., bool]) -> IntervalSet:
    """Pointwise boolean combination of interval sets (rule(False, ...) must be False)."""
    pts = sorted({p for s in sets for p in s.endpoints()})
    at = [rule(*(s.contains(p) for s in sets)) for p in pts]
    after = [rule(*(s._covers_right_of(p) for s in sets)) for p in pts]
    if after:
        after[-1] = False
    return from_profile(pts, at, after)


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def symmetric_difference(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.symmetric_difference(b)


def complement_in_unit(a: IntervalSet) -> IntervalSet:
    return a.complement_in_unit()


def intersection_de_morgan(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """a ∩ b for subsets of [0, 1], via union and complement only."""
    return complement_in_unit(union(complement_in_unit(a), complement_in_unit(b)))


def minkowski_sum_window(starts: IntervalSet, eta) -> IntervalSet:
    """Union of the closed windows [c, c + eta] over all starts c."""
    eta = as_rational(eta)
    if eta <= 0:
        raise ValueError("window length must be positive")
    return IntervalSet(
        Interval(c.lo, c.hi + eta, c.lo_closed, c.hi_closed) for c in starts
    )
