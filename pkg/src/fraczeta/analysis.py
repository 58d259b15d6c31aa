"""Zeta functions of length systems: closed forms, poles, residues, tube formula.

A lattice closed form is a rational function of ``x = b**-s``::

    zeta(s) = sum_pre c * l**s + (sum_num c * l**s) / (d0 + d1 x + d2 x**2 + ...)

with ``d0 = 1``.  Numerator terms keep their length rather than a bare power
of x so that blocks such as ``2 * (2/81)**s`` stay exact.
"""
from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .exact import as_rational, format_rational
from .strings import FractalString, LengthSystem, tube_volume

_POLE_TOL = 1e-13


class PoleError(ZeroDivisionError):
    """Evaluation hit a pole of the closed form."""

    def __init__(self, s, pole):
        super().__init__(f"s = {s} is a pole ({pole})")
        self.s = s
        self.pole = pole


class UnsupportedAnalysis(ValueError):
    """The requested analysis is outside what the closed form supports."""


def _fmt(c):
    if isinstance(c, (int, Fraction)):
        return format_rational(Fraction(c))
    return float(c)


def _log(x) -> float:
    if isinstance(x, Fraction):
        # exact-ish log for tiny rationals that underflow as floats
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def _power(length, s: complex) -> complex:
    if length == 1:
        return 1.0 + 0j
    return cmath.exp(s * _log(length))


@dataclass(frozen=True)
class ZetaForm:
    kind: str  # "finite" | "lattice"
    base: Optional[int] = None
    preamble: tuple = ()      # ((coeff, length), ...)
    numerator: tuple = ()     # ((coeff, length), ...)
    denominator: tuple = (1,)  # coefficients of x**0, x**1, ...
    self_similar: bool = False
    period: int = 1           # stages per factor of x (bookkeeping only)

    def __post_init__(self):
        if self.kind not in ("finite", "lattice"):
            raise ValueError(f"unknown form kind {self.kind!r}")
        if self.kind == "lattice":
            if not isinstance(self.base, int) or self.base < 2:
                raise ValueError("lattice base must be an integer > 1")
            if not self.denominator or self.denominator[0] != 1:
                raise ValueError("denominator must have constant term 1")
            if all(d == 0 for d in self.denominator[1:]):
                raise ValueError("lattice denominator must be nonconstant")

    # -- constructors -----------------------------------------------------
    @classmethod
    def finite(cls, terms) -> "ZetaForm":
        if isinstance(terms, LengthSystem):
            terms = [(Fraction(m), l) for l, m in terms.entries]
        return cls("finite", preamble=tuple(terms))

    @classmethod
    def geometric(cls, base: int, numerator, ratio, preamble=(), self_similar=False,
                  period: int = 1) -> "ZetaForm":
        """preamble + numerator / (1 - ratio * b**-s)."""
        return cls("lattice", base, tuple(preamble), tuple(numerator), (1, -ratio),
                   self_similar, period)

    # -- evaluation --------------------------------------------------------
    def den_value(self, x: complex) -> complex:
        return sum(d * x ** k for k, d in enumerate(self.denominator))

    def num_value(self, s: complex) -> complex:
        return sum(float(c) * _power(l, s) for c, l in self.numerator)

    def pre_value(self, s: complex) -> complex:
        return sum(float(c) * _power(l, s) for c, l in self.preamble)

    def x_of(self, s: complex) -> complex:
        return cmath.exp(-s * math.log(self.base))

    def evaluate(self, s) -> complex:
        s = complex(s)
        val = self.pre_value(s)
        if self.kind == "finite":
            return val
        den = self.den_value(self.x_of(s))
        scale = sum(abs(float(d)) for d in self.denominator)
        if abs(den) <= _POLE_TOL * scale:
            raise PoleError(s, "denominator vanishes")
        return val + self.num_value(s) / den

    __call__ = evaluate

    # -- series ----------------------------------------------------------------
    def series_coefficients(self, n: int) -> list:
        """First n coefficients of 1/denominator as a power series in x."""
        d = self.denominator
        a = [Fraction(1) if all(isinstance(c, (int, Fraction)) for c in d) else 1.0]
        for k in range(1, n):
            a.append(-sum(d[i] * a[k - i] for i in range(1, min(k, len(d) - 1) + 1)))
        return a

    def expand(self, min_length) -> Counter:
        """Length multiset of the Dirichlet series down to min_length (inclusive)."""
        min_length = as_rational(min_length) if not isinstance(min_length, float) else min_length
        out = Counter()
        for c, l in self.preamble:
            if l >= min_length:
                out[l] += c
        if self.kind == "lattice" and self.numerator:
            r = Fraction(1, self.base)
            top = max(l for _, l in self.numerator)
            k_max = 0
            while top * r ** (k_max + 1) >= min_length:
                k_max += 1
            coeffs = self.series_coefficients(k_max + 1)
            for k, a in enumerate(coeffs):
                for c, l in self.numerator:
                    ll = l * r ** k
                    if ll >= min_length:
                        out[ll] += c * a
        return Counter({l: m for l, m in out.items() if m != 0})

    def terms(self, periods: int) -> tuple[np.ndarray, np.ndarray]:
        """(log lengths, coefficients) of the series through `periods` powers of x."""
        logs, coeffs = [], []
        for c, l in self.preamble:
            logs.append(_log(l))
            coeffs.append(float(c))
        if self.kind == "lattice":
            lb = math.log(self.base)
            for k, a in enumerate(self.series_coefficients(periods)):
                for c, l in self.numerator:
                    logs.append(_log(l) - k * lb)
                    coeffs.append(float(c * a))
        return np.array(logs), np.array(coeffs)

    def geometric_ratio(self):
        """q when the denominator is 1 - q x, else None."""
        if len(self.denominator) == 2:
            return -self.denominator[1]
        return None

    def tail_bound(self, sigma: float, periods: int) -> float:
        """Bound on |sum of series terms past `periods` powers of x| at Re s = sigma."""
        if self.kind == "finite":
            return 0.0
        q = self.geometric_ratio()
        if q is None:
            return math.inf
        rho = abs(float(q)) * self.base ** (-sigma)
        if rho >= 1:
            return math.inf
        mag = sum(abs(float(c)) * math.exp(sigma * _log(l)) for c, l in self.numerator)
        return mag * rho ** periods / (1 - rho)

    def to_json(self) -> dict:
        d = {"kind": self.kind,
             "preamble": [[_fmt(c), format_rational(l)] for c, l in self.preamble]}
        if self.kind == "lattice":
            d["b"] = self.base
            d["num"] = [{"coeff": _fmt(c), "length": format_rational(l),
                         "x_power": _x_power(l, self.base)} for c, l in self.numerator]
            d["den"] = [[_fmt(c), k] for k, c in enumerate(self.denominator) if c != 0]
            d["self_similar"] = self.self_similar
        return d


def _x_power(length: Fraction, base: int):
    """k with length = base**-k, or None."""
    k, v = 0, Fraction(1)
    while v > length:
        v /= base
        k += 1
    return k if v == length else None


# -- building closed forms ----------------------------------------------------

def _scaled(stage: Counter, r: Fraction, q: Fraction) -> Counter:
    return Counter({l * r: m * q for l, m in stage.items()})


def _period_match(stages: Sequence[Counter], start: int, p: int):
    """(r, q) if stage i+p == stage i scaled by (r, q) for all i >= start, else None."""
    ref = next((i for i in range(start, len(stages) - p) if stages[i]), None)
    if ref is None:
        return None
    a, b = stages[ref], stages[ref + p]
    if not b:
        return None
    r = max(b) / max(a)
    q = Fraction(b[max(b)], a[max(a)])
    if r <= 0 or r >= 1 or r.numerator != 1 or q <= 0:
        return None
    for i in range(start, len(stages) - p):
        if stages[i + p] != _scaled(stages[i], r, q):
            return None
    return r, q


def detect_lattice_form(stages: Sequence[Counter], min_stages: int = 4,
                        max_period: int = 3, scale_ratio: Optional[Fraction] = None):
    """Recognize preamble + geometric block in per-stage length counts.

    ``stages[i]`` holds the lengths emitted at stage i + 1.  A pattern must
    hold on at least ``min_stages`` consecutive stages at the end of the list.
    When ``scale_ratio`` is given the length ratio per period must equal
    ``scale_ratio**period`` (the scales' own self-similarity).  Returns
    ``(form, n0)`` with n0 the first stage of the geometric block, or
    ``(None, None)``.
    """
    n = len(stages)
    for start in range(n):
        rest = stages[start:]
        if len(rest) < min_stages:
            break
        pre = [(Fraction(m), l) for st in stages[:start] for l, m in sorted(st.items(), reverse=True)]
        if not any(rest):
            return ZetaForm.finite(pre), start + 1
        for p in range(1, max_period + 1):
            if len(rest) < max(min_stages, 2 * p + 1):
                continue
            match = _period_match(stages, start, p)
            if match is None:
                continue
            r, q = match
            if scale_ratio is not None and r != scale_ratio ** p:
                continue
            block = [(Fraction(m), l) for st in stages[start:start + p]
                     for l, m in sorted(st.items(), reverse=True)]
            form = ZetaForm.geometric(r.denominator, block, q, pre, period=p)
            return form, start + 1
    return None, None


def geometric_form(s: FractalString, stages: int = 8) -> ZetaForm:
    """Closed form of the geometric zeta function of a lattice string."""
    if not s.lattice:
        raise UnsupportedAnalysis(f"no closed form for generator {s.generator!r}")
    it = s.levels()
    levels = [Counter({l: m}) for l, m in (next(it) for _ in range(stages))]
    form, _ = detect_lattice_form(levels)
    if form is None:  # pragma: no cover - lattice generators always match
        raise UnsupportedAnalysis("lattice pattern not recognized")
    return ZetaForm(form.kind, form.base, form.preamble, form.numerator,
                    form.denominator, True, form.period)


# -- evaluation of raw systems ----------------------------------------------------

def evaluate_truncated(ls: LengthSystem, s) -> complex:
    """Plain truncated Dirichlet sum sum_j l_j**s."""
    if not ls.entries:
        return 0j
    logs = [_log(l) for l, _ in ls.entries]
    mults = [float(m) for _, m in ls.entries]
    return kernels.dirichlet_sum(logs, mults, complex(s))


def series_evaluate(form: ZetaForm, s, tol: float = 1e-10, max_periods: int = 100_000):
    """Sum the Dirichlet series of a form until the geometric tail bound is <= tol.

    Returns (value, tail_bound, periods).  The tail bound is infinite when
    Re s is not inside the half-plane of convergence.
    """
    s = complex(s)
    if form.kind == "finite":
        return form.evaluate(s), 0.0, 0
    periods = 1
    while form.tail_bound(s.real, periods) > tol and periods < max_periods:
        periods *= 2
    logs, coeffs = form.terms(periods)
    return kernels.dirichlet_sum(logs, coeffs, s), form.tail_bound(s.real, periods), periods


def evaluate(z, s):
    """(value, error bound).  Closed forms are exact; raw systems report their tail bound."""
    if isinstance(z, ZetaForm):
        return z.evaluate(s), 0.0
    if isinstance(z, LengthSystem):
        return evaluate_truncated(z, s), math.inf
    raise TypeError(f"cannot evaluate {type(z).__name__}")


# -- abscissa ------------------------------------------------------------------

@dataclass(frozen=True)
class Abscissa:
    value: float
    exact: bool
    uncertainty: float = 0.0


def abscissa_of_convergence(z) -> Abscissa:
    if isinstance(z, ZetaForm):
        if z.kind == "finite" or not z.numerator:
            return Abscissa(-math.inf, True)
        lines = pole_lines(z)
        if not lines:
            return Abscissa(-math.inf, True)
        return Abscissa(max(l.sigma for l in lines), True)
    if isinstance(z, LengthSystem):
        return _abscissa_estimate(z)
    raise TypeError(f"no abscissa for {type(z).__name__}")


def _abscissa_estimate(ls: LengthSystem) -> Abscissa:
    """Slope of log N(x) against log(1/x) for the counting function N(x) = #{l_j >= x}."""
    if len(ls.entries) < 3:
        return Abscissa(-math.inf if not ls.entries else 0.0, False, math.inf)
    xs, ns = [], []
    total = 0
    for l, m in ls.entries:
        total += m
        xs.append(-_log(l))
        ns.append(math.log(total))
    xs, ns = np.array(xs), np.array(ns)
    half = len(xs) // 2
    slope = np.polyfit(xs[half:], ns[half:], 1)[0] if len(xs) - half >= 2 else np.polyfit(xs, ns, 1)[0]
    whole = np.polyfit(xs, ns, 1)[0]
    return Abscissa(float(slope), False, float(abs(slope - whole)) + 1.0 / len(xs))


# -- poles ---------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    sigma_min: float = -math.inf
    t_max: float = 20.0

    def __post_init__(self):
        if self.t_max < 0:
            raise ValueError("t_max must be nonnegative")


@dataclass(frozen=True)
class Pole:
    s: complex
    residue: complex
    line: "ComplexDimensionLine" = field(repr=False, compare=False, default=None)

    def to_json(self) -> dict:
        return {"re": self.s.real, "im": self.s.imag,
                "residue_re": self.residue.real, "residue_im": self.residue.imag}


@dataclass(frozen=True)
class ComplexDimensionLine:
    sigma: float
    spacing: float
    base_b: int
    phase: float       # imaginary part of the m = 0 pole
    x0: complex
    simple: bool
    form: ZetaForm = field(repr=False, compare=False, default=None)

    def pole(self, m: int) -> complex:
        return complex(self.sigma, self.phase + m * self.spacing)

    def residue_at_line(self, m: int) -> complex:
        if not self.simple:
            raise UnsupportedAnalysis("residues of multiple poles are not computed")
        return residue(self.form, self.pole(m), self.x0)

    def poles(self, t_max: float) -> list[Pole]:
        lo = math.ceil((-t_max - self.phase) / self.spacing - 1e-12)
        hi = math.floor((t_max - self.phase) / self.spacing + 1e-12)
        out = []
        for m in range(lo, hi + 1):
            w = self.pole(m)
            out.append(Pole(w, self.residue_at_line(m) if self.simple else complex("nan"), self))
        return out


def _poly_roots(coeffs) -> list[tuple[complex, int]]:
    """Roots (with multiplicity) of sum coeffs[k] x**k; rational roots found exactly."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    roots: list[tuple[complex, int]] = []
    if all(isinstance(v, (int, Fraction)) for v in c):
        c = [Fraction(v) for v in c]
        for x in _rational_roots(c):
            mult = 0
            while len(c) > 1 and _peval(c, x) == 0:
                c = _deflate(c, x)
                mult += 1
            roots.append((complex(float(x)), mult))
    if len(c) > 1:
        arr = np.array([float(v) for v in reversed(c)])
        found = np.roots(arr)
        polished = [_newton(c, complex(r)) for r in found]
        groups: list[list[complex]] = []
        for r in polished:
            for g in groups:
                if abs(g[0] - r) < 1e-7 * max(1.0, abs(r)):
                    g.append(r)
                    break
            else:
                groups.append([r])
        roots.extend((sum(g) / len(g), len(g)) for g in groups)
    return roots


def _peval(c, x):
    return sum(v * x ** k for k, v in enumerate(c))


def _deflate(c, x):
    # divide by (X - x); c is low-to-high
    n = len(c) - 1
    out = [Fraction(0)] * n
    carry = Fraction(0)
    for k in range(n, 0, -1):
        carry = c[k] + carry * x
        out[k - 1] = carry
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _rational_roots(c) -> list[Fraction]:
    lcm = 1
    for v in c:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in c]
    if ints[0] == 0:
        return [Fraction(0)]
    if max(abs(ints[0]), abs(ints[-1])) > 10 ** 9:
        return []
    cands = {Fraction(sign * p, q) for p in _divisors(ints[0]) for q in _divisors(ints[-1])
             for sign in (1, -1)}
    return sorted(x for x in cands if _peval(c, x) == 0)


def _newton(c, x: complex, steps: int = 50) -> complex:
    cf = [complex(float(v)) for v in c]
    dc = [k * v for k, v in enumerate(cf)][1:]
    for _ in range(steps):
        f = sum(v * x ** k for k, v in enumerate(cf))
        d = sum(v * x ** k for k, v in enumerate(dc))
        if d == 0:
            break
        step = f / d
        x -= step
        if abs(step) < 1e-16 * max(1.0, abs(x)):
            break
    return x


def residue(form: ZetaForm, w: complex, x0: complex) -> complex:
    """N(w) / (Q'(x0) * x0 * (-log b)) at a simple pole."""
    dq = sum(k * float(d) * x0 ** (k - 1) for k, d in enumerate(form.denominator) if k)
    return form.num_value(w) / (dq * x0 * (-math.log(form.base)))


def pole_lines(form: ZetaForm, window: Optional[Window] = None) -> list[ComplexDimensionLine]:
    if form.kind == "finite" or not form.numerator:
        return []
    window = window or Window()
    lb = math.log(form.base)
    spacing = 2 * math.pi / lb
    lines = []
    for x0, mult in _poly_roots(form.denominator):
        if x0 == 0:
            continue
        sigma = -math.log(abs(x0)) / lb
        if sigma < window.sigma_min:
            continue
        phase = -cmath.phase(x0) / lb
        # normalize phase into (-spacing/2, spacing/2]
        phase = phase - spacing * round(phase / spacing) + 0.0
        line = ComplexDimensionLine(sigma, spacing, form.base, phase, x0, mult == 1, form)
        # a numerator vanishing identically on the line cancels it
        probe = line.pole(0)
        if abs(form.num_value(probe)) < 1e-14 and abs(form.num_value(line.pole(1))) < 1e-14:
            continue
        lines.append(line)
    lines.sort(key=lambda l: (-l.sigma, l.phase))
    return lines


def complex_dimensions(form: ZetaForm, window: Optional[Window] = None):
    """(lines, poles) of a closed form inside a rectangular window."""
    window = window or Window()
    lines = pole_lines(form, window)
    poles = [p for line in lines for p in line.poles(window.t_max)]
    poles.sort(key=lambda p: (-p.s.real, p.s.imag))
    return lines, poles


def ring_residue(form: ZetaForm, w: complex, radius: float) -> complex:
    """Average of (s - w) zeta(s) over four points s = w + radius * i**k."""
    acc = 0j
    for k in range(4):
        d = radius * (1j ** k)
        acc += d * form.evaluate(w + d)
    return acc / 4


# -- Minkowski content and the tube formula ------------------------------------

def _rational_eps(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10 ** 15)


def log_grid(lo: Fraction, hi: Fraction, n: int) -> list[Fraction]:
    a, b = _log(lo), _log(hi)
    pts = [lo] + [_rational_eps(math.exp(a + (b - a) * i / (n - 1))) for i in range(1, n - 1)] + [hi]
    return pts


@dataclass(frozen=True)
class MinkowskiReport:
    D: float
    measurable: bool
    content: Optional[float] = None
    content_residue: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    L_limit: Optional[float] = None
    L_error: Optional[float] = None
    samples: tuple = ()
    method: str = ""

    def to_json(self) -> dict:
        d = {k: getattr(self, k) for k in ("D", "measurable", "content", "content_residue",
                                            "lower", "upper", "L_limit", "L_error", "method")}
        return d


def tube_trace(s: FractalString, eps_values, D: float):
    """[(eps, V(eps), V(eps) eps**(D-1))] with exact V."""
    out = []
    for e in eps_values:
        v = tube_volume(s, e)
        out.append((e, v, float(v) * float(e) ** (D - 1)))
    return out


def minkowski_report(s: FractalString, grid_points: int = 64, period_k: int = 8) -> MinkowskiReport:
    if s.lattice:
        form = geometric_form(s)
        D = abscissa_of_convergence(form).value
        lines = [l for l in pole_lines(form) if abs(l.sigma - D) < 1e-12]
        nonreal = any(abs(l.phase) > 1e-12 for l in lines) or any(
            abs(l.spacing) > 0 and len(l.poles(l.spacing * 1.01)) > 1 for l in lines)
        b = form.base ** form.period
        lo, hi = Fraction(1, b ** (period_k + 1)), Fraction(1, b ** period_k)
        trace = tube_trace(s, log_grid(lo, hi, grid_points), D)
        vals = [t[2] for t in trace]
        lower, upper = min(vals), max(vals)
        measurable = not nonreal
        res = None
        if lines and lines[0].simple:
            res = residue(form, complex(D, 0), lines[0].x0).real
        return MinkowskiReport(D, measurable, None if not measurable else (lower + upper) / 2,
                               res, lower, upper, samples=tuple(trace),
                               method="pole set on the line Re s = D; oscillation over one period")
    if s.generator == "a-string":
        a = s.params[0]
        D = 1.0 / (1 + a)
        if not 0 < D < 1:
            raise UnsupportedAnalysis("dimension outside (0, 1)")
        # L = lim l_j j**(1/D), checked for Cauchy convergence
        js = [10 ** k for k in range(2, 7)]
        Ls = [float((Fraction(1, j ** a) - Fraction(1, (j + 1) ** a)) * j ** (a + 1)) for j in js]
        L = Ls[-1]
        err = abs(Ls[-1] - Ls[-2])
        content = 2 ** (1 - D) * L ** D / (1 - D)
        trace = tube_trace(s, [Fraction(1, 10 ** k) for k in range(2, 7)], D)
        vals = [t[2] for t in trace]
        return MinkowskiReport(D, err < 1e-3 * L, content, None, min(vals[-2:]), max(vals[-2:]),
                               L, err, tuple(trace), method="L-limit and content formula")
    raise UnsupportedAnalysis(f"no Minkowski analysis for generator {s.generator!r}")


def tube_explicit_formula(form: ZetaForm, epsilon, m_max: int = 50):
    """Residue sum for V(eps) over the complex dimensions and s = 0.

    Only self-similar forms are accepted; for them the error term vanishes.
    Returns (value, info) where info lists the truncation used.
    """
    if not form.self_similar:
        raise UnsupportedAnalysis("explicit tube formula needs a self-similar form")
    eps = float(as_rational(epsilon)) if not isinstance(epsilon, float) else epsilon
    if not 0 < eps <= 0.5:
        # past eps = 1/2 the residue sum no longer tracks V (it returns 2 - 2 eps)
        raise UnsupportedAnalysis("explicit tube formula is valid for 0 < eps <= 1/2")
    lines = pole_lines(form)
    if any(not l.simple for l in lines):
        raise UnsupportedAnalysis("explicit tube formula needs simple poles")
    two = 2 * eps
    total = 0j
    n_terms = 0
    for line in lines:
        if abs(line.pole(0)) < 1e-12 or abs(line.pole(0) - 1) < 1e-12:
            raise UnsupportedAnalysis("pole at s = 0 or s = 1")
        for m in range(-m_max, m_max + 1):
            w = line.pole(m)
            total += line.residue_at_line(m) * cmath.exp((1 - w) * math.log(two)) / (w * (1 - w))
            n_terms += 1
    zeta0 = form.evaluate(0)
    total += two * zeta0
    return total.real, {"poles": n_terms, "m_max": m_max, "zeta0": zeta0.real,
                        "imag_residual": total.imag}
