"""Stage-by-stage R/J/K construction of multifractal zeta length systems."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .analysis import ZetaForm, detect_lattice_form
from .exact import (EMPTY, IntervalSet, as_rational, format_rational,
                    minkowski_sum_window)
from .measures import (PointMassMeasure, Regularity, classify_starts,
                       minus_inf_starts, plus_inf_starts, window_start_set)
from .strings import FractalString, LengthSystem, gap_lengths


@dataclass(frozen=True)
class TailRule:
    """eta_n = c * b**-(n + shift)."""

    c: Fraction
    b: int
    shift: int = 0

    def eta(self, n: int) -> Fraction:
        return self.c / Fraction(self.b) ** (n + self.shift)

    def __str__(self) -> str:
        coef = "" if self.c == 1 else f"{self.c}*"
        return f"{coef}{self.b}^-(n+{self.shift})" if self.shift else f"{coef}{self.b}^-n"


@dataclass(frozen=True)
class ScaleSequence:
    etas: tuple[Fraction, ...]
    tail_rule: Optional[TailRule] = None

    def __post_init__(self):
        if not self.etas:
            raise ValueError("scale sequence is empty")
        for e in self.etas:
            if not 0 < e < 1:
                raise ValueError(f"scale {e} is outside (0, 1)")
        if any(b >= a for a, b in zip(self.etas, self.etas[1:])):
            raise ValueError("scales must be strictly decreasing")
        if self.tail_rule is not None:
            for n, e in enumerate(self.etas, 1):
                if self.tail_rule.eta(n) != e:
                    raise ValueError(f"scale {n} = {e} does not follow {self.tail_rule}")

    @classmethod
    def geometric(cls, n: int, b: int = 3, shift: int = 1, c=1) -> "ScaleSequence":
        rule = TailRule(as_rational(c), int(b), int(shift))
        return cls(tuple(rule.eta(k) for k in range(1, n + 1)), rule)

    @classmethod
    def explicit(cls, etas: Sequence) -> "ScaleSequence":
        return cls(tuple(as_rational(e) for e in etas))

    @classmethod
    def parse(cls, text: str, n: int) -> "ScaleSequence":
        """``"3^-(n+1)"``, ``"2/5*3^-n"`` or a comma-separated list of rationals."""
        t = text.replace(" ", "")
        m = re.fullmatch(r"(?:(\d+(?:/\d+)?)\*)?(\d+)\^-(?:n|\(n([+-]\d+)\))", t)
        if m:
            c = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            return cls.geometric(n, int(m.group(2)), int(m.group(3) or 0), c)
        return cls.explicit([Fraction(x) for x in t.split(",") if x])

    def __len__(self) -> int:
        return len(self.etas)

    def to_json(self) -> dict:
        return {"etas": [format_rational(e) for e in self.etas],
                "tail_rule": str(self.tail_rule) if self.tail_rule else None}


@dataclass(frozen=True)
class StageDecomposition:
    n: int
    eta: Fraction
    R: IntervalSet
    J: IntervalSet
    K: IntervalSet

    @property
    def k_lengths(self) -> list[Fraction]:
        return [c.length for c in self.K if c.length > 0]

    def to_json(self) -> dict:
        return {"n": self.n, "eta": format_rational(self.eta), "R": self.R.to_json(),
                "J": self.J.to_json(), "K": self.K.to_json(),
                "k_lengths": [format_rational(l) for l in self.k_lengths]}


@dataclass
class MzfResult:
    alpha: Regularity
    scales: ScaleSequence
    stages: list[StageDecomposition]
    length_system: LengthSystem
    closed_form: Optional[ZetaForm] = None
    entire: Optional[bool] = None
    horizon: Fraction = Fraction(0)
    block_start: Optional[int] = None

    @property
    def stage_counts(self) -> list[Counter]:
        return [Counter(st.k_lengths) for st in self.stages]

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(), "scales": self.scales.to_json(),
                "length_system": self.length_system.to_json(),
                "closed_form": self.closed_form.to_json() if self.closed_form else None,
                "entire": self.entire, "horizon": format_rational(self.horizon),
                "stages": [st.to_json() for st in self.stages]}


def stage_R(m: PointMassMeasure, eta, alpha: Regularity) -> IntervalSet:
    eta = as_rational(eta)
    return minkowski_sum_window(window_start_set(m, eta, alpha), eta)


def stage_J(r_prev: Optional[IntervalSet], r_cur: IntervalSet) -> IntervalSet:
    if r_prev is None:
        return r_cur
    return r_prev.symmetric_difference(r_cur)


def stage_K(j_set: IntervalSet, r_prev: Optional[IntervalSet]) -> IntervalSet:
    """Drop J components whose left (or right) position is a left (right) position of R^{n-1}."""
    if r_prev is None:
        return j_set
    lefts = {c.lo for c in r_prev}
    rights = {c.hi for c in r_prev}
    return IntervalSet._trusted(
        [c for c in j_set if c.lo not in lefts and c.hi not in rights])


def _run_stages(scales: ScaleSequence, r_of_eta) -> list[StageDecomposition]:
    stages = []
    prev = None
    for n, eta in enumerate(scales.etas, 1):
        cur = r_of_eta(eta)
        j = stage_J(prev, cur)
        stages.append(StageDecomposition(n, eta, cur, j, stage_K(j, prev)))
        prev = cur
    return stages


def _aggregate(stages) -> LengthSystem:
    return LengthSystem.from_lengths(l for st in stages for l in st.k_lengths)


def _closed_form(m: PointMassMeasure, scales: ScaleSequence, stages):
    """Closed form only when both the scales and the string are self-similar."""
    rule = scales.tail_rule
    if rule is None or not m.lattice:
        return None, None
    counts = [Counter(st.k_lengths) for st in stages]
    form, n0 = detect_lattice_form(counts, scale_ratio=Fraction(1, rule.b))
    if form is None:
        return None, None
    total = _aggregate(stages)
    if total.entries and form.expand(total.entries[-1][0]) != total.as_counter():
        return None, None
    return form, n0


def build_mzf(m: PointMassMeasure, scales: ScaleSequence, alpha: Regularity,
              detect: bool = True) -> MzfResult:
    if not len(scales):
        raise ValueError("scale sequence is empty")
    stages = _run_stages(scales, lambda eta: stage_R(m, eta, alpha))
    form, n0 = _closed_form(m, scales, stages) if detect else (None, None)
    entire = None
    if form is not None:
        entire = form.kind == "finite"
    return MzfResult(alpha, scales, stages, _aggregate(stages), form, entire,
                     scales.etas[-1], n0)


def finite_alpha_mzf(m: PointMassMeasure, scales: ScaleSequence, alpha: Regularity,
                     _classes: Optional[dict] = None) -> MzfResult:
    """Construction at a finite regularity.

    ``entire`` is set when at most two stages contribute lengths; a
    recognized geometric tail (poles) clears it.
    """
    if not alpha.is_finite:
        raise ValueError("finite_alpha_mzf needs a finite regularity")
    cache = _classes if _classes is not None else {}

    def r_of(eta):
        if eta not in cache:
            cache[eta] = classify_starts(m, eta)
        starts = IntervalSet([c for key, s in cache[eta].items()
                              if isinstance(key, int) and key > 0 and alpha.matches(key, eta)
                              for c in s])
        return minkowski_sum_window(starts, eta)

    stages = _run_stages(scales, r_of)
    form, n0 = _closed_form(m, scales, stages)
    contributing = sum(1 for st in stages if st.k_lengths)
    entire = contributing <= 2 and (form is None or form.kind == "finite")
    return MzfResult(alpha, scales, stages, _aggregate(stages), form, entire,
                     scales.etas[-1], n0)


def realizable_alphas(m: PointMassMeasure, scales: ScaleSequence,
                      _classes: Optional[dict] = None) -> list[Regularity]:
    """Distinct finite values log k / log eta met by some window at some scale."""
    cache = _classes if _classes is not None else {}
    found: list[Regularity] = []
    for eta in scales.etas:
        if eta not in cache:
            cache[eta] = classify_starts(m, eta)
        for key in sorted(k for k in cache[eta] if isinstance(k, int) and k > 0):
            if not any(a.matches(key, eta) for a in found):
                found.append(Regularity.of_count(key, eta))
    return sorted(found, key=lambda a: a.value)


# -- effective lengths ------------------------------------------------------------

@dataclass(frozen=True)
class Detection:
    gap: Fraction
    multiplicity: int
    stage: int
    eta: Fraction

    @property
    def effective_length(self) -> Fraction:
        return self.gap - 2 * self.eta


@dataclass(frozen=True)
class EffectiveLengths:
    head: LengthSystem            # K^1 components
    detections: tuple[Detection, ...]
    horizon: Fraction

    @property
    def tail(self) -> LengthSystem:
        c = Counter()
        for d in self.detections:
            if d.stage >= 2 and d.effective_length > 0:
                c[d.effective_length] += d.multiplicity
        return LengthSystem.from_counter(c)

    @property
    def length_system(self) -> LengthSystem:
        c = self.head.as_counter()
        c.update(self.tail.as_counter())
        return LengthSystem.from_counter(c)


def effective_lengths(s: FractalString, scales: ScaleSequence) -> EffectiveLengths:
    """Gaps g between accumulation points, each read at its first detecting scale.

    A gap g is detected at the first stage n with g >= 2 eta_n and contributes
    g - 2 eta_n.  Gaps detected at stage 1 live inside the K^1 block, which
    is taken from the actual stage-1 construction.
    """
    gaps = gap_lengths(s)
    etas = scales.etas
    dets = []
    for g, mult in gaps.entries:
        n = next((i for i, e in enumerate(etas, 1) if g >= 2 * e), None)
        if n is not None:
            dets.append(Detection(g, mult, n, etas[n - 1]))
    from .measures import boundary_measure
    m = boundary_measure(s)
    r1 = minkowski_sum_window(minus_inf_starts(m, etas[0]), etas[0])
    head = LengthSystem.from_lengths(c.length for c in r1 if c.length > 0)
    return EffectiveLengths(head, tuple(dets), etas[-1])


# -- geometric recovery --------------------------------------------------------

@dataclass(frozen=True)
class RecoveryReport:
    ok: bool
    expected: LengthSystem
    found: LengthSystem
    complete: bool      # eta_N below every represented length

    def to_json(self) -> dict:
        return {"ok": self.ok, "complete": self.complete,
                "expected": self.expected.to_json(), "found": self.found.to_json()}


def verify_geometric_recovery(m: PointMassMeasure, scales: ScaleSequence) -> RecoveryReport:
    """Is the +inf length system the string's own length system (lengths > eta_N)?"""
    res = build_mzf(m, scales, Regularity.plus_inf(), detect=False)
    horizon = scales.etas[-1]
    expected = m.length_system.restricted(horizon)
    smallest = m.length_system.entries[-1][0] if m.length_system.entries else Fraction(1)
    found = res.length_system
    return RecoveryReport(found == expected, expected, found, horizon < smallest)
