"""Unit point-mass boundary measures and window regularity.

Infinite mass is decided from the boundary model (accumulation points and
self-similar pieces); finite masses are counted from the represented atoms.
Windows are closed intervals ``[c, c + eta]`` and are indexed by their
start ``c``.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import mpmath

from .exact import (EMPTY, Interval, IntervalSet, as_rational, format_rational,
                    from_profile)
from .strings import (BoundaryModel, FractalString, IsolatedAccumulation,
                      LengthSystem, PerfectSelfSimilar)

INF = math.inf

_MP_DPS = 60
_MP_TOL = mpmath.mpf(10) ** -45


@dataclass(frozen=True)
class Regularity:
    """Coarse Hölder exponent of a window: +inf, -inf, or log k / log eta.

    Finite values keep the witnessing (count, eta) pair when known so that
    equality against other windows is decided to 60 digits instead of in
    double precision.
    """

    kind: str  # "+inf" | "-inf" | "finite"
    count: Optional[int] = None
    eta: Optional[Fraction] = None
    value: float = 0.0

    @classmethod
    def plus_inf(cls) -> "Regularity":
        return cls("+inf", value=INF)

    @classmethod
    def minus_inf(cls) -> "Regularity":
        return cls("-inf", value=-INF)

    @classmethod
    def of_count(cls, count: int, eta) -> "Regularity":
        eta = as_rational(eta)
        if count < 1:
            raise ValueError("finite regularity needs a positive mass")
        if not 0 < eta < 1:
            raise ValueError("window length must lie in (0, 1)")
        return cls("finite", count, eta, math.log(count) / math.log(eta) + 0.0)

    @classmethod
    def finite(cls, value: float) -> "Regularity":
        return cls("finite", value=float(value))

    @classmethod
    def parse(cls, text: str) -> "Regularity":
        t = text.strip().lower()
        if t in ("+inf", "inf", "infinity", "+infinity"):
            return cls.plus_inf()
        if t in ("-inf", "-infinity"):
            return cls.minus_inf()
        if "@" in t:
            k, eta = t.split("@", 1)
            return cls.of_count(int(k), Fraction(eta))
        return cls.finite(float(t))

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def matches(self, count: int, eta: Fraction) -> bool:
        """Is log(count)/log(eta) equal to this value (count 0 means +inf)?"""
        if count == 0:
            return self.kind == "+inf"
        if self.kind != "finite":
            return False
        if self.count is not None:
            if count == 1 or self.count == 1:
                return count == self.count
            with mpmath.workdps(_MP_DPS):
                lhs = mpmath.log(count) * mpmath.log(mpmath.mpf(self.eta.numerator) / self.eta.denominator)
                rhs = mpmath.log(self.count) * mpmath.log(mpmath.mpf(eta.numerator) / eta.denominator)
                return abs(lhs - rhs) < _MP_TOL
        v = math.log(count) / math.log(eta)
        return abs(v - self.value) <= 1e-12 * max(1.0, abs(v))

    def __str__(self) -> str:
        if self.kind != "finite":
            return self.kind
        if self.count is not None:
            return f"log({self.count})/log({self.eta})"
        return repr(self.value)

    def to_json(self):
        if self.kind != "finite":
            return self.kind
        d = {"value": self.value}
        if self.count is not None:
            d.update(count=self.count, eta=format_rational(self.eta))
        return d


@dataclass(frozen=True)
class PointMassMeasure:
    """Sum of unit point masses at the string's endpoints, plus the boundary model."""

    atoms: tuple[Fraction, ...]
    weights: tuple[Fraction, ...]
    boundary_model: BoundaryModel
    intervals: tuple[Interval, ...] = ()
    resolution: Fraction = Fraction(0)
    count_resolution: Fraction = Fraction(0)
    tail_zone: IntervalSet = field(default=EMPTY)
    length_system: LengthSystem = field(default_factory=LengthSystem)
    lattice: bool = False

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.atoms, self.atoms[1:])):
            raise ValueError("atom positions must be strictly increasing")
        if self.atoms and (self.atoms[0] < 0 or self.atoms[-1] > 1):
            raise ValueError("atoms must lie in [0, 1]")

    # -- mass ---------------------------------------------------------------
    def has_witness(self, lo: Fraction, hi: Fraction) -> bool:
        """Does [lo, hi] contain infinitely many atoms (a one-sided accumulation)?"""
        for piece in self.boundary_model.pieces:
            if isinstance(piece, IsolatedAccumulation):
                if piece.witnessed_by(lo, hi):
                    return True
            elif piece.meets_open(lo, hi):
                return True
        return False

    def count(self, u: Interval) -> int:
        lo = bisect_left(self.atoms, u.lo) if u.lo_closed else bisect_right(self.atoms, u.lo)
        hi = bisect_right(self.atoms, u.hi) if u.hi_closed else bisect_left(self.atoms, u.hi)
        return max(0, hi - lo)

    def to_json(self) -> dict:
        return {"atoms": [[format_rational(x), format_rational(w)]
                          for x, w in zip(self.atoms, self.weights)],
                "accumulation": self.boundary_model.to_json()}


def boundary_measure(s: FractalString, min_eta=None) -> PointMassMeasure:
    """mu_Omega = sum of unit masses at every endpoint a_j, b_j.

    When ``min_eta`` is given the string is regenerated deeper until finite
    window masses are exact at that window length.
    """
    if min_eta is not None:
        min_eta = as_rational(min_eta)
        while s.count_resolution >= min_eta or s.resolution > min_eta:
            s = s.regenerate(s.depth + 1)
    atoms = tuple(s.endpoints)
    return PointMassMeasure(
        atoms=atoms, weights=(Fraction(1),) * len(atoms),
        boundary_model=s.boundary_model, intervals=s.intervals,
        resolution=s.resolution, count_resolution=s.count_resolution,
        tail_zone=s.tail_zone, length_system=s.length_system, lattice=s.lattice)


def measure_of(m: PointMassMeasure, u: Interval) -> Union[Fraction, float]:
    """mu(u): an exact rational, or ``math.inf`` when u holds an accumulation witness."""
    if u.lo < 0 or u.hi > 1:
        raise ValueError("window must lie in [0, 1]")
    if not u.is_degenerate and m.has_witness(u.lo, u.hi):
        return INF
    lo = bisect_left(m.atoms, u.lo) if u.lo_closed else bisect_right(m.atoms, u.lo)
    hi = bisect_right(m.atoms, u.hi) if u.hi_closed else bisect_left(m.atoms, u.hi)
    return sum(m.weights[lo:hi], Fraction(0))


def regularity(m: PointMassMeasure, u: Interval) -> Regularity:
    if u.length <= 0:
        raise ValueError("regularity is undefined on degenerate windows")
    mass = measure_of(m, u)
    if mass == INF:
        return Regularity.minus_inf()
    if mass == 0:
        return Regularity.plus_inf()
    if mass.denominator == 1 and 0 < u.length < 1:
        return Regularity.of_count(int(mass), u.length)
    return Regularity.finite(math.log(mass) / math.log(u.length))


# -- start sets -------------------------------------------------------------

def _window_domain(eta: Fraction) -> IntervalSet:
    return IntervalSet([Interval.closed(0, 1 - eta)])


def plus_inf_starts(m: PointMassMeasure, eta: Fraction) -> IntervalSet:
    """Starts of mass-free windows: (a_j, b_j - eta) for every l_j > eta."""
    return IntervalSet(Interval.open(iv.lo, iv.hi - eta)
                       for iv in m.intervals if iv.length > eta)


def minus_inf_starts(m: PointMassMeasure, eta: Fraction) -> IntervalSet:
    """Starts of windows containing a neighbourhood of an accumulation point."""
    pieces = []
    for piece in m.boundary_model.pieces:
        if isinstance(piece, IsolatedAccumulation):
            x = piece.point
            if piece.acc_from_right:
                pieces.append(Interval(x - eta, x, False, True))
            if piece.acc_from_left:
                pieces.append(Interval(x - eta, x, True, False))
        else:
            host = IntervalSet([Interval.open(piece.host.lo - eta, piece.host.hi)])
            free = IntervalSet(Interval.closed(a, b - eta) for a, b in piece.gaps(eta))
            pieces.extend(host.difference(free).components)
    return IntervalSet(pieces).intersection(_window_domain(eta))


def _critical_starts(m: PointMassMeasure, eta: Fraction) -> list[Fraction]:
    pts = {Fraction(0), 1 - eta}
    for x in m.atoms:
        pts.add(x)
        pts.add(x - eta)
    for piece in m.boundary_model.pieces:
        if isinstance(piece, IsolatedAccumulation):
            pts.update((piece.point, piece.point - eta))
        else:
            pts.update((piece.host.lo - eta, piece.host.lo, piece.host.hi - eta, piece.host.hi))
            for a, b in piece.gaps(eta):
                pts.update((a, b - eta))
    for c in m.tail_zone:
        pts.update((c.lo - eta, c.lo, c.hi - eta, c.hi))
    top = 1 - eta
    return sorted(p for p in pts if 0 <= p <= top)


def classify_window(m: PointMassMeasure, c: Fraction, eta: Fraction):
    """'-inf', 'unresolved', or the exact atom count of [c, c + eta]."""
    hi = c + eta
    if m.has_witness(c, hi):
        return "-inf"
    for z in m.tail_zone:
        if z.lo < hi and c < z.hi:
            return "unresolved"
    return m.count(Interval(c, hi, True, True))


def classify_starts(m: PointMassMeasure, eta) -> dict:
    """Partition of [0, 1 - eta] by window class (the sweep).

    Window classes are constant between consecutive critical starts, so
    evaluating at each critical start and at each midpoint is exact.
    """
    eta = as_rational(eta)
    if not 0 < eta < 1:
        raise ValueError("window length must lie in (0, 1)")
    if eta <= m.count_resolution:
        raise ValueError(f"window length {eta} is below the measure's count resolution "
                         f"{m.count_resolution}; build the measure deeper")
    pts = _critical_starts(m, eta)
    at = [classify_window(m, p, eta) for p in pts]
    mids = [classify_window(m, (p + q) / 2, eta) for p, q in zip(pts, pts[1:])] + [None]
    out = {}
    for key in set(at) | set(mids[:-1]):
        out[key] = from_profile(pts, [a == key for a in at], [b == key for b in mids])
    return out


def window_start_set(m: PointMassMeasure, eta, alpha: Regularity) -> IntervalSet:
    """Exact set of starts c in [0, 1 - eta] with A([c, c + eta]) = alpha."""
    eta = as_rational(eta)
    if not 0 < eta < 1:
        raise ValueError("window length must lie in (0, 1)")
    if alpha.kind == "+inf":
        if eta < m.resolution:
            raise ValueError("window length below the string's resolution")
        return plus_inf_starts(m, eta)
    if alpha.kind == "-inf":
        return minus_inf_starts(m, eta)
    classes = classify_starts(m, eta)
    parts = [s for key, s in classes.items()
             if isinstance(key, int) and key > 0 and alpha.matches(key, eta)]
    return IntervalSet([c for s in parts for c in s])
