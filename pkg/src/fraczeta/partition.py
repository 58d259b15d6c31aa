"""Binomial cascade on the Cantor set: partition zeta functions and spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .analysis import ZetaForm


@dataclass(frozen=True)
class CascadeMeasure:
    weights: tuple
    scales: tuple
    partition_base: int = 3

    def __post_init__(self):
        if len(self.weights) != len(self.scales) or not self.weights:
            raise ValueError("weights and scales must be nonempty and of equal length")
        if any(p < 0 for p in self.weights):
            raise ValueError("weights must be nonnegative")
        if any(not 0 < r < 1 for r in self.scales):
            raise ValueError("scales must lie in (0, 1)")
        if sum(self.weights) > 1 + 1e-15:
            raise ValueError("weights must sum to at most 1")

    @property
    def lattice_base(self):
        """b when every scale is 1/b, else None."""
        bs = {Fraction(r).limit_denominator(10 ** 9) for r in self.scales}
        if len(bs) == 1:
            r = bs.pop()
            if r.numerator == 1:
                return r.denominator
        return None


BINOMIAL = CascadeMeasure((Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 3), Fraction(1, 3)))

LOG3 = math.log(3)


def entropy(t: float) -> float:
    if t <= 0 or t >= 1:
        return 0.0
    return -t * math.log(t) - (1 - t) * math.log(1 - t)


@dataclass(frozen=True)
class PartitionZeta:
    """sum_{n>=1} C(n k2, n k1) 3**(-k2 n s)."""

    k1: int
    k2: int
    base: int = 3

    def coefficient(self, n: int) -> int:
        return comb(n * self.k2, n * self.k1)

    @property
    def abscissa(self) -> float:
        return entropy(self.k1 / self.k2) / math.log(self.base)

    def log_coefficients(self, n_terms: int) -> np.ndarray:
        return kernels.log_binomials(self.k1, self.k2, n_terms)

    def log_partial_sum(self, s: float, n_terms: int) -> float:
        return kernels.partition_log_sum(self.log_coefficients(n_terms), self.k2, s,
                                         math.log(self.base))

    def evaluate(self, s: float, tol: float = 1e-12, max_terms: int = 1_000_000):
        """(value, tail bound) for real s above the abscissa, by the ratio test."""
        if s <= self.abscissa:
            raise ValueError("series diverges at or left of the abscissa")
        x = self.base ** (-self.k2 * s)
        total, n = 0.0, 1
        while n <= max_terms:
            term = math.exp(self.log_coefficients_at(n) - self.k2 * n * s * math.log(self.base))
            total += term
            # consecutive-term ratio is increasing towards its limit
            nxt = math.exp(self.log_coefficients_at(n + 1) - self.log_coefficients_at(n)) * x
            limit = self.growth * x
            rho = max(nxt, limit)
            if rho < 1 and term * rho / (1 - rho) < tol:
                return total, term * rho / (1 - rho)
            n += 1
        return total, math.inf

    def log_coefficients_at(self, n: int) -> float:
        a, b = n * self.k2, n * self.k1
        return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)

    @property
    def growth(self) -> float:
        """lim C((n+1)k2, (n+1)k1) / C(n k2, n k1)."""
        return math.exp(self.k2 * entropy(self.k1 / self.k2))


def partition_zeta(k1: int, k2: int) -> PartitionZeta:
    if k2 < 1 or k1 < 0:
        raise ValueError("need k1 >= 0 and k2 >= 1")
    if k1 > k2:
        raise ValueError("k1 must not exceed k2")
    return PartitionZeta(int(k1), int(k2))


def diverges(z: PartitionZeta, s: float, n_terms: int = 100_000, bound: float = 1e6) -> bool:
    """Do the first n_terms partial sums exceed `bound`?"""
    return z.log_partial_sum(s, n_terms) > math.log(bound)


def _bisect_divergence(z, lo, hi, n_terms, bound, tol):
    if not diverges(z, lo, n_terms, bound):
        raise ValueError("lower end does not diverge")
    if diverges(z, hi, n_terms, bound):
        raise ValueError("upper end diverges")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if diverges(z, mid, n_terms, bound):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def abscissa_bisection(z: PartitionZeta, lo: float = -1.0, hi: float = 2.0,
                       n_terms: int = 100_000, bound: float = 1e6, tol: float = 1e-7):
    """Abscissa from truncated sums alone, as (low, high).

    The divergence threshold s_N approaches the abscissa from below as N grows;
    the step from N/10 to N terms bounds the remaining distance.
    """
    est = _bisect_divergence(z, lo, hi, n_terms, bound, tol)
    coarse = _bisect_divergence(z, lo, hi, max(n_terms // 10, 10), bound, tol)
    d = abs(est - coarse) + tol
    return est - d, est + d


def modified_mzf(m: CascadeMeasure, q: float) -> ZetaForm:
    """1 / (1 - sum p_j**q r_j**s) as a lattice form in x = b**-s."""
    b = m.lattice_base
    if b is None:
        raise ValueError("closed form needs equal scales 1/b")
    if q < 0 and any(p == 0 for p in m.weights):
        raise ValueError("zero weight with negative q")
    ratio = sum(float(p) ** q for p in m.weights if p > 0)
    return ZetaForm.geometric(b, ((1.0, Fraction(1)),), ratio, self_similar=True)


def sigma_of_q(m: CascadeMeasure, q: float) -> float:
    """Real root of sum p_j**q r_j**sigma = 1."""
    if q < 0 and any(p == 0 for p in m.weights):
        raise ValueError("zero weight with negative q")
    ps = [float(p) for p in m.weights if p > 0]
    lrs = [math.log(float(r)) for r, p in zip(m.scales, m.weights) if p > 0]
    lps = [math.log(p) for p in ps]

    def f(sig):
        # log-sum-exp of q log p + sigma log r; strictly decreasing in sigma
        v = [q * a + sig * b for a, b in zip(lps, lrs)]
        top = max(v)
        return top + math.log(sum(math.exp(x - top) for x in v))

    lo, hi = -10.0, 10.0
    while f(lo) < 0:
        lo *= 2
    while f(hi) > 0:
        hi *= 2
    return brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)


def alpha_of(k1: int, k2: int) -> float:
    """Coarse exponent of a 3**-k2 cell of weight (1/3)**k1 (2/3)**(k2-k1)."""
    return (k1 * LOG3 + (k2 - k1) * math.log(1.5)) / (k2 * LOG3)


def spectrum_from_partition(k_max: int) -> list[tuple[float, float, int, int]]:
    """(alpha, f(alpha), k1, k2) over reduced k1/k2, sorted by alpha."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    rows = []
    for k2 in range(1, k_max + 1):
        for k1 in range(0, k2 + 1):
            if math.gcd(k1, k2) != 1:
                continue
            rows.append((alpha_of(k1, k2), partition_zeta(k1, k2).abscissa, k1, k2))
    rows.sort()
    return rows


def legendre_transform(spectrum: Sequence, q: float) -> float:
    """inf over the grid of q alpha - f(alpha)."""
    return min(q * a - f for a, f, *_ in spectrum)


def legendre_gap(spectrum: Sequence, m: CascadeMeasure, qs: Sequence[float]) -> float:
    """max_q |inf_alpha(q alpha - f) + sigma(q)|."""
    return max(abs(legendre_transform(spectrum, q) + sigma_of_q(m, q)) for q in qs)


def is_concave(spectrum: Sequence, tol: float = 1e-12) -> bool:
    pts = [(a, f) for a, f, *_ in spectrum]
    for (x0, y0), (x1, y1), (x2, y2) in zip(pts, pts[1:], pts[2:]):
        if x2 - x0 <= 0:
            continue
        interp = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0)
        if y1 < interp - tol:
            return False
    return True
