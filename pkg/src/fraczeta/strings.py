"""Fractal strings: depth-truncated interval layouts with symbolic boundary models.

A string is stored to a finite depth, but each generator also knows its
full (infinite) length hierarchy, so tube volumes and tail sums are exact.
Accumulation structure is declared by the generator and never inferred from
truncated endpoints.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from .exact import (EMPTY, Interval, IntervalSet, as_rational, format_rational)

ONE = Fraction(1)


# -- length systems ---------------------------------------------------------

@dataclass(frozen=True)
class LengthSystem:
    """Distinct lengths with multiplicities, sorted by decreasing length."""

    entries: tuple[tuple[Fraction, int], ...] = ()

    def __post_init__(self):
        lengths = [l for l, _ in self.entries]
        if lengths != sorted(lengths, reverse=True) or len(set(lengths)) != len(lengths):
            raise ValueError("length system entries must be distinct and decreasing")
        if any(m <= 0 for _, m in self.entries):
            raise ValueError("multiplicities must be positive")

    @classmethod
    def from_lengths(cls, lengths) -> "LengthSystem":
        counts = Counter(l for l in lengths if l > 0)
        return cls(tuple(sorted(counts.items(), key=lambda e: -e[0])))

    @classmethod
    def from_counter(cls, counts) -> "LengthSystem":
        return cls(tuple(sorted(((l, m) for l, m in counts.items() if m and l > 0),
                                key=lambda e: -e[0])))

    def as_counter(self) -> Counter:
        return Counter(dict(self.entries))

    @property
    def total(self) -> Fraction:
        return sum((l * m for l, m in self.entries), Fraction(0))

    @property
    def count(self) -> int:
        return sum(m for _, m in self.entries)

    def restricted(self, min_exclusive: Fraction) -> "LengthSystem":
        return LengthSystem(tuple(e for e in self.entries if e[0] > min_exclusive))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_json(self) -> list:
        return [[format_rational(l), m] for l, m in self.entries]

    @classmethod
    def from_json(cls, data) -> "LengthSystem":
        return cls(tuple((as_rational(l), int(m)) for l, m in data))


# -- boundary models --------------------------------------------------------

@dataclass(frozen=True)
class PerfectSelfSimilar:
    """Self-similar attractor inside a closed host interval.

    Children are the copies ``[lo + o*L, lo + o*L + ratio*L]`` for each
    offset ``o`` (``L`` the host length).  Only equal-ratio (lattice)
    systems are modelled.
    """

    host: Interval
    ratio: Fraction
    offsets: tuple[Fraction, ...]

    @property
    def scale_base(self) -> int:
        inv = 1 / self.ratio
        if inv.denominator != 1:
            raise ValueError("ratio is not the reciprocal of an integer")
        return int(inv)

    @property
    def copies(self) -> int:
        return len(self.offsets)

    @property
    def dimension(self) -> float:
        # Moran equation copies * ratio**d = 1
        return math.log(self.copies) / math.log(self.scale_base)

    def _children(self, lo: Fraction, length: Fraction):
        child = self.ratio * length
        for o in self.offsets:
            a = lo + o * length
            yield a, child

    def meets_open(self, lo: Fraction, hi: Fraction) -> bool:
        """Does the open interval (lo, hi) contain a point of the attractor?"""
        stack = [(self.host.lo, self.host.length)]
        while stack:
            a, length = stack.pop()
            b = a + length
            if hi <= a or lo >= b:
                continue
            # copy endpoints belong to the attractor
            if lo < a < hi or lo < b < hi:
                return True
            # (lo, hi) is strictly inside [a, b]; it cannot shrink below its own size
            if length < hi - lo:
                continue
            stack.extend(self._children(a, length))
        return False

    def contains(self, x: Fraction) -> bool:
        """Exact attractor membership; terminates for the rational points we use."""
        a, length = self.host.lo, self.host.length
        seen = set()
        while True:
            if x < a or x > a + length:
                return False
            if x == a or x == a + length:
                return True
            # normalized position repeats for rational non-terminating expansions
            t = (x - a) / length
            if t in seen:
                return True
            seen.add(t)
            for ca, clen in self._children(a, length):
                if ca <= x <= ca + clen:
                    a, length = ca, clen
                    break
            else:
                return False

    def gaps(self, min_length: Fraction = Fraction(0),
             strict: bool = False) -> list[tuple[Fraction, Fraction]]:
        """Bounded complementary gaps (a, b) of the attractor inside its host.

        Only gaps longer than ``min_length`` (or equal, unless ``strict``)
        are listed.  ``min_length`` must be positive for infinite attractors.
        """
        if min_length <= 0:
            raise ValueError("min_length must be positive")
        out = []
        stack = [(self.host.lo, self.host.length)]
        while stack:
            a, length = stack.pop()
            kids = list(self._children(a, length))
            found_any = False
            for (ca, cl), (na, _) in zip(kids, kids[1:]):
                g = na - (ca + cl)
                if g > min_length or (g == min_length and not strict):
                    out.append((ca + cl, na))
                    found_any = True
            if found_any:
                stack.extend(kids)
        out.sort()
        return out

    def to_json(self) -> dict:
        return {"type": "perfect_self_similar", "host": self.host.to_json(),
                "ratio": format_rational(self.ratio),
                "offsets": [format_rational(o) for o in self.offsets],
                "scale_base": self.scale_base, "copies": self.copies}


@dataclass(frozen=True)
class IsolatedAccumulation:
    point: Fraction
    acc_from_left: bool = False
    acc_from_right: bool = False

    def witnessed_by(self, lo: Fraction, hi: Fraction) -> bool:
        """Does the closed window [lo, hi] contain a one-sided neighbourhood of the point?"""
        x = self.point
        return ((self.acc_from_right and lo <= x < hi)
                or (self.acc_from_left and lo < x <= hi))

    def to_json(self) -> dict:
        return {"type": "isolated_accumulation", "point": format_rational(self.point),
                "acc_from_left": self.acc_from_left, "acc_from_right": self.acc_from_right}


Piece = Union[PerfectSelfSimilar, IsolatedAccumulation]


@dataclass(frozen=True)
class BoundaryModel:
    pieces: tuple[Piece, ...] = ()
    # runs of intervals adjacent through isolated points, ending at accumulation points/0/1
    runs: tuple[Interval, ...] = ()
    isolated_points: tuple[Fraction, ...] = ()

    @property
    def perfect_pieces(self) -> list[PerfectSelfSimilar]:
        return [p for p in self.pieces if isinstance(p, PerfectSelfSimilar)]

    @property
    def accumulations(self) -> list[IsolatedAccumulation]:
        return [p for p in self.pieces if isinstance(p, IsolatedAccumulation)]

    def is_accumulation_point(self, x: Fraction) -> bool:
        return (any(a.point == x for a in self.accumulations)
                or any(p.contains(x) for p in self.perfect_pieces))

    def to_json(self) -> dict:
        return {"pieces": [p.to_json() for p in self.pieces],
                "runs": [r.to_json() for r in self.runs],
                "isolated_points": [format_rational(x) for x in self.isolated_points]}

    @classmethod
    def from_json(cls, d: dict) -> "BoundaryModel":
        pieces = []
        for p in d.get("pieces", []):
            if p["type"] == "perfect_self_similar":
                pieces.append(PerfectSelfSimilar(
                    Interval.from_json(p["host"]), as_rational(p["ratio"]),
                    tuple(as_rational(o) for o in p["offsets"])))
            elif p["type"] == "isolated_accumulation":
                pieces.append(IsolatedAccumulation(
                    as_rational(p["point"]), bool(p["acc_from_left"]),
                    bool(p["acc_from_right"])))
            else:
                raise ValueError(f"unknown boundary piece {p['type']!r}")
        return cls(tuple(pieces), tuple(Interval.from_json(r) for r in d.get("runs", [])),
                   tuple(as_rational(x) for x in d.get("isolated_points", [])))


# -- the string itself ------------------------------------------------------

GENERATORS = ("cantor", "cantor-reordered", "cantor-paired", "a-string", "custom")
_ALIASES = {"omega1": "cantor", "omega2": "cantor-reordered", "omega3": "cantor-paired",
            "reordered": "cantor-reordered", "paired": "cantor-paired"}


@dataclass(frozen=True)
class FractalString:
    intervals: tuple[Interval, ...]
    depth: int
    generator: str
    boundary_model: BoundaryModel
    params: tuple = ()
    # largest length of an interval that the truncation left out
    resolution: Fraction = Fraction(0)
    # largest unrepresented run of adjacent intervals outside tail_zone
    count_resolution: Fraction = Fraction(0)
    # open region where unrepresented endpoints sit outside any perfect piece
    tail_zone: IntervalSet = field(default=EMPTY)

    @property
    def length_system(self) -> LengthSystem:
        return LengthSystem.from_lengths(iv.length for iv in self.intervals)

    @property
    def total_length(self) -> Fraction:
        return sum((iv.length for iv in self.intervals), Fraction(0))

    @property
    def endpoints(self) -> list[Fraction]:
        return sorted({x for iv in self.intervals for x in (iv.lo, iv.hi)})

    @property
    def lattice(self) -> bool:
        """Self-similar single-ratio length hierarchy (closed forms available)."""
        return self.generator in ("cantor", "cantor-reordered", "cantor-paired")

    def levels(self) -> Iterator[tuple[Fraction, int]]:
        """Full, untruncated distinct lengths (largest first) with multiplicities."""
        if self.lattice:
            n = 1
            while True:
                yield Fraction(1, 3 ** n), 2 ** (n - 1)
                n += 1
        elif self.generator == "a-string":
            a = self.params[0]
            j = 1
            while True:
                yield Fraction(1, j ** a) - Fraction(1, (j + 1) ** a), 1
                j += 1
        else:
            yield from self.length_system.entries

    def remaining_total(self, k: int) -> Fraction:
        """Total length of all intervals beyond the first k levels."""
        if self.lattice:
            return Fraction(2, 3) ** k
        if self.generator == "a-string":
            return Fraction(1, (k + 1) ** self.params[0])
        return sum((l * m for l, m in self.length_system.entries[k:]), Fraction(0))

    def regenerate(self, depth: int) -> "FractalString":
        if self.generator == "custom":
            raise ValueError("custom strings cannot be regenerated at another depth")
        return make_string(self.generator, depth, *self.params)

    def to_json(self) -> dict:
        return {
            "generator": self.generator,
            "depth": self.depth,
            "params": [format_rational(Fraction(p)) for p in self.params],
            "intervals": [iv.to_json() for iv in self.intervals],
            "length_system": self.length_system.to_json(),
            "boundary_model": self.boundary_model.to_json(),
            "resolution": format_rational(self.resolution),
            "count_resolution": format_rational(self.count_resolution),
            "tail_zone": self.tail_zone.to_json(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "FractalString":
        gen = d["generator"]
        if gen != "custom":
            params = tuple(int(as_rational(p)) for p in d.get("params", []))
            s = make_string(gen, int(d["depth"]), *params)
            stored = tuple(Interval.from_json(i) for i in d["intervals"])
            if stored != s.intervals:
                raise ValueError("stored intervals do not match the named generator")
            return s
        return cls(
            intervals=tuple(Interval.from_json(i) for i in d["intervals"]),
            depth=int(d["depth"]),
            generator="custom",
            boundary_model=BoundaryModel.from_json(d["boundary_model"]),
            resolution=as_rational(d.get("resolution", "0/1")),
            count_resolution=as_rational(d.get("count_resolution", "0/1")),
            tail_zone=IntervalSet.from_json(d.get("tail_zone", [])),
        )


def _check_depth(depth: int) -> None:
    if not isinstance(depth, int) or depth < 1:
        raise ValueError("depth must be a positive integer")


CANTOR_SET = PerfectSelfSimilar(Interval.closed(0, 1), Fraction(1, 3),
                                (Fraction(0), Fraction(2, 3)))


def make_cantor_string(depth: int) -> FractalString:
    _check_depth(depth)
    gaps = CANTOR_SET.gaps(Fraction(1, 3 ** depth))
    res = Fraction(1, 3 ** (depth + 1))
    return FractalString(
        intervals=tuple(Interval.open(a, b) for a, b in gaps),
        depth=depth, generator="cantor",
        boundary_model=BoundaryModel(pieces=(CANTOR_SET,)),
        resolution=res, count_resolution=res)


def _cantor_lengths_desc(depth: int) -> list[Fraction]:
    out = []
    for n in range(1, depth + 1):
        out.extend([Fraction(1, 3 ** n)] * 2 ** (n - 1))
    return out


def make_reordered_cantor(depth: int) -> FractalString:
    """Cantor lengths packed from 1 leftwards in non-increasing order."""
    _check_depth(depth)
    right = Fraction(1)
    intervals = []
    for l in _cantor_lengths_desc(depth):
        intervals.append(Interval.open(right - l, right))
        right -= l
    intervals.reverse()
    points = tuple(sorted({x for iv in intervals for x in (iv.lo, iv.hi)}))
    res = Fraction(1, 3 ** (depth + 1))
    return FractalString(
        intervals=tuple(intervals), depth=depth, generator="cantor-reordered",
        boundary_model=BoundaryModel(
            pieces=(IsolatedAccumulation(Fraction(0), acc_from_right=True),),
            runs=(Interval.closed(0, 1),), isolated_points=points),
        resolution=res, count_resolution=res,
        tail_zone=IntervalSet([Interval.open(0, right)]))


# Cantor-like part of the paired string: gaps 4*9^-n with multiplicity 2^(n-1)
PAIRED_HOST = Fraction(4, 7)
PAIRED_SET = PerfectSelfSimilar(Interval.closed(0, PAIRED_HOST), Fraction(1, 9),
                                (Fraction(0), Fraction(8, 9)))


def make_paired_cantor(depth: int) -> FractalString:
    """Paired layout: consecutive lengths (3^(1-2n), 3^-2n) share an endpoint.

    The pairs fill the gaps of a self-similar set with ratio 1/9 on
    [0, 4/7]; the leftover lengths are packed on [4/7, 1] in non-increasing
    order from left to right, accumulating at 1.
    """
    _check_depth(depth)
    intervals = []
    tail = []
    blocks = PAIRED_SET.gaps(Fraction(4, 9 ** ((depth + 1) // 2)))
    used = Counter()
    for a, b in blocks:
        g = b - a
        k = 0
        while Fraction(4, 9 ** (k + 1)) != g:
            k += 1
        k += 1
        big, small = Fraction(1, 3 ** (2 * k - 1)), Fraction(1, 3 ** (2 * k))
        intervals.append(Interval.open(a, a + big))
        used[2 * k - 1] += 1
        if 2 * k <= depth:
            intervals.append(Interval.open(a + big, b))
            used[2 * k] += 1
        else:
            tail.append(Interval.open(a + big, b))
    x = PAIRED_HOST
    for n in range(1, depth + 1):
        l = Fraction(1, 3 ** n)
        k = (n + 1) // 2
        remaining = 2 ** (n - 1) - 2 ** (k - 1)
        for _ in range(remaining):
            intervals.append(Interval.open(x, x + l))
            x += l
    intervals.sort(key=lambda iv: iv.lo)
    res = Fraction(1, 3 ** (depth + 1))
    if depth % 2 == 0:
        count_res = Fraction(4, 3 ** (depth + 2))
    else:
        count_res = Fraction(4, 3 ** (depth + 3))
    points = tuple(sorted({p for iv in intervals for p in (iv.lo, iv.hi)
                           if p > PAIRED_HOST}))
    return FractalString(
        intervals=tuple(intervals), depth=depth, generator="cantor-paired",
        boundary_model=BoundaryModel(
            pieces=(PAIRED_SET, IsolatedAccumulation(Fraction(1), acc_from_left=True)),
            runs=(Interval.closed(PAIRED_HOST, 1),), isolated_points=points),
        resolution=res, count_resolution=count_res,
        tail_zone=IntervalSet(tail + [Interval.open(x, 1)]))


def make_a_string(a, depth: int) -> FractalString:
    """Intervals (1/(j+1)^a, 1/j^a), j = 1..depth; a must be a positive integer."""
    _check_depth(depth)
    a = as_rational(a) if not isinstance(a, int) else Fraction(a)
    if a <= 0:
        raise ValueError("a must be positive")
    if a.denominator != 1:
        raise ValueError("only integer a keeps the endpoints rational")
    a = int(a)
    intervals = tuple(Interval.open(Fraction(1, (j + 1) ** a), Fraction(1, j ** a))
                      for j in range(depth, 0, -1))
    res = Fraction(1, (depth + 1) ** a) - Fraction(1, (depth + 2) ** a)
    points = tuple(sorted({x for iv in intervals for x in (iv.lo, iv.hi)}))
    return FractalString(
        intervals=intervals, depth=depth, generator="a-string", params=(a,),
        boundary_model=BoundaryModel(
            pieces=(IsolatedAccumulation(Fraction(0), acc_from_right=True),),
            runs=(Interval.closed(0, 1),), isolated_points=points),
        resolution=res, count_resolution=res,
        tail_zone=IntervalSet([Interval.open(0, Fraction(1, (depth + 1) ** a))]))


def make_string(generator: str, depth: int, *params) -> FractalString:
    gen = _ALIASES.get(generator, generator)
    if gen == "cantor":
        return make_cantor_string(depth)
    if gen == "cantor-reordered":
        return make_reordered_cantor(depth)
    if gen == "cantor-paired":
        return make_paired_cantor(depth)
    if gen == "a-string":
        if not params:
            raise ValueError("the a-string needs its exponent a")
        return make_a_string(params[0], depth)
    raise ValueError(f"unknown generator {generator!r}")


# -- geometry ---------------------------------------------------------------

def tube_volume(s: FractalString, epsilon) -> Fraction:
    """Exact inner tube volume V(eps) = sum_j min(l_j, 2 eps), including the analytic tail."""
    eps = as_rational(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    two_eps = 2 * eps
    vol = Fraction(0)
    k = 0
    for l, m in s.levels():
        if l <= two_eps:
            break
        vol += m * two_eps
        k += 1
    return vol + s.remaining_total(k)


def gap_lengths(s: FractalString) -> LengthSystem:
    """Gap lengths: total length of maximal runs between accumulation points, 0 or 1.

    Gaps of perfect pieces come from the self-similar description (down to
    the represented depth); runs through isolated points come from the model.
    """
    bm = s.boundary_model
    if not bm.pieces and not bm.runs:
        raise ValueError("string has no boundary model")
    counts = Counter()
    threshold = s.count_resolution
    for piece in bm.perfect_pieces:
        if threshold > 0:
            gaps = piece.gaps(threshold, strict=True)
        else:
            smallest = min(iv.length for iv in s.intervals)
            gaps = piece.gaps(smallest)
        for a, b in gaps:
            counts[b - a] += 1
    for run in bm.runs:
        counts[run.length] += 1
    return LengthSystem.from_counter(counts)


def detect_runs(s: FractalString) -> list[tuple[Fraction, Fraction]]:
    """Maximal runs of represented intervals joined through shared endpoints.

    Returns (left, right) for runs whose extreme endpoints are 0, 1 or
    accumulation points.  Runs that touch the truncation frontier are dropped.
    """
    ivs = sorted(s.intervals, key=lambda iv: iv.lo)
    runs = []
    start = None
    prev_hi = None
    for iv in ivs:
        if start is not None and iv.lo == prev_hi:
            prev_hi = iv.hi
            continue
        if start is not None:
            runs.append((start, prev_hi))
        start, prev_hi = iv.lo, iv.hi
    if start is not None:
        runs.append((start, prev_hi))
    bm = s.boundary_model

    def terminal(x):
        if x in (0, 1) or bm.is_accumulation_point(x):
            return True
        return False

    def frontier(x):
        return any(c.contains(x) or c.lo == x or c.hi == x for c in s.tail_zone)

    return [(a, b) for a, b in runs
            if terminal(a) and terminal(b) and not frontier(a) and not frontier(b)]


def hausdorff_dimension(s: FractalString) -> float:
    """Max over boundary pieces: Moran dimension for self-similar parts, 0 otherwise."""
    dims = [p.dimension for p in s.boundary_model.perfect_pieces]
    return max(dims, default=0.0)
