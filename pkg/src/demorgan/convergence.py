"""Ratio-test hierarchy: Kummer's test, coefficient extraction, verdicts.

The central object is the expansion

    a_n/a_{n+1} = 1 + 1/n + (1/n) * sum_{i=1}^{K-1} 1/(ln(n)*...*ln_(i)(n))
                  + s_n / (n * ln(n) * ... * ln_(K)(n))

``extract_sn`` solves this for s_n at a given depth K.  A positive series
converges when s_n stays above 1 and diverges when it stays below 1; the
machinery here replaces those asymptotic statements with tail-window extrema
over a geometric sample grid plus a caller-set margin, reporting Inconclusive
whenever the samples cannot separate the tail from the critical value.

At depth K = 1 the coefficient is the classical Bertrand statistic r_n; the
Raabe and d'Alembert regimes fall out of the same formula for rapidly
converging or diverging ratios.  ``adaptive_classify`` walks the depth
hierarchy, escalating whenever the current level either hovers near the
critical value or shows a margin that the next level reveals to be a slowly
decaying correction rather than a genuine limit gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

from .errors import DomainError, EvalError, InvalidWindow
from .iterlog import K_MAX_NUMERIC, iterlog, iterlog_product, min_domain, zeta_weight

# A no-delta subtraction that lost more than half the significand of the
# unit-scale term is unreliable; 2**-26 marks that point.
_CANCEL_THRESHOLD = 2.0**-26

# Default sampling policy: geometric grid, tail = last quarter.
DEFAULT_WINDOW_FLOOR = 100
DEFAULT_WINDOW_HI = 10_000_000
DEFAULT_SAMPLES = 64
DEFAULT_TAIL_FRACTION = 0.25


class Decision(str, Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class RatioSpec:
    """Supplier of the term ratio a_n/a_{n+1} of a positive series.

    ``ratio(n)`` must be strictly positive for n >= first_index.  ``delta``,
    when supplied, must give a_n/a_{n+1} - 1 in a cancellation-free form;
    extraction prefers it because subtracting 1 from a ratio near 1 in double
    precision poisons the deepest correction term.  ``support`` restricts
    sampling to an explicit index set (tabulated input); ``last_index`` caps
    the domain.
    """

    ratio: Callable[[int], float]
    first_index: int = 1
    delta: Callable[[int], float] | None = None
    last_index: int | None = None
    support: tuple[int, ...] | None = None
    label: str = ""

    def ratio_at(self, n: int) -> float:
        r = float(self.ratio(n))
        if not r > 0.0:
            raise DomainError(f"ratio at n={n} is {r}, must be > 0")
        return r


@dataclass(frozen=True)
class KummerWeight:
    """Positive weight sequence for Kummer's test.

    A divergence verdict is only sound when the reciprocal sum of the weights
    diverges; that side condition is not machine-checkable, so constructors
    must assert it explicitly.  The built-in iterated-log weights carry the
    flag because their reciprocal sums diverge by integral comparison.
    """

    zeta: Callable[[int], float]
    reciprocal_sum_diverges: bool
    first_index: int = 1
    label: str = ""

    @classmethod
    def from_level(cls, K: int) -> "KummerWeight":
        return cls(
            zeta=lambda n: zeta_weight(K, n),
            reciprocal_sum_diverges=True,
            first_index=min_domain(K),
            label=f"zeta(K={K})",
        )

    def zeta_at(self, n: int) -> float:
        z = float(self.zeta(n))
        if not z > 0.0:
            raise DomainError(f"weight at n={n} is {z}, must be > 0")
        return z


@dataclass(frozen=True)
class ExtractionSample:
    """One extracted coefficient s_n, flagged when cancellation ate its bits."""

    n: int
    s: float
    precision_warning: bool = False


@dataclass(frozen=True)
class SamplePoint:
    n: int
    value: float
    usable: bool


@dataclass(frozen=True)
class GuardReport:
    """Next-level growth check behind a tentatively decisive verdict.

    For a genuine limit gap at depth K, the depth-(K+1) coefficient
    (s_n - 1) * ln_(K+1)(n) must grow (shrink) roughly like the gap times
    ln_(K+1); a flat next level means the apparent margin is a decaying
    correction term and the verdict cannot be trusted at this depth.
    """

    passed: bool
    growth: float
    required: float
    n_lo: int
    n_hi: int


@dataclass(frozen=True)
class LevelReport:
    level: int
    window: tuple[int, int]
    decision: Decision
    s_min: float | None
    s_max: float | None
    usable: int
    dropped: int
    guard: GuardReport | None
    escalated: str = ""


@dataclass(frozen=True)
class Verdict:
    """Outcome of a tail-window test, with the evidence that produced it.

    ``s_min``/``s_max`` are the extrema of the usable tail samples (the
    Kummer statistic rho for :func:`kummer_test`, the extracted coefficient
    for the depth tests).  A Converges decision implies s_min > threshold +
    margin over the tail; Diverges implies s_max < threshold - margin.
    """

    decision: Decision
    level: int | None
    window: tuple[int, int]
    s_min: float | None
    s_max: float | None
    margin: float
    samples: tuple[SamplePoint, ...] = ()
    dropped: int = 0
    trace: tuple[LevelReport, ...] = ()
    note: str = ""


@dataclass(frozen=True)
class ClassifyConfig:
    """Knobs for the adaptive classifier.

    ``window_lo`` is a floor: the effective start of each level's window is
    max(window_lo, min_domain(K), first_index).  ``near_one_band`` controls
    escalation from an inconclusive level: only when the tail samples sit
    within this band of 1 can the next level's correction term plausibly
    account for the gap.  ``guard_threshold`` is the fraction of the ideal
    next-level growth a decisive verdict must exhibit to be accepted below
    ``k_max``.
    """

    k_start: int = 1
    k_max: int = K_MAX_NUMERIC
    margin: float = 0.2
    near_one_band: float = 0.5
    window_lo: int = DEFAULT_WINDOW_FLOOR
    window_hi: int = DEFAULT_WINDOW_HI
    samples: int = DEFAULT_SAMPLES
    tail_fraction: float = DEFAULT_TAIL_FRACTION
    use_delta: bool = True
    guard: bool = True
    guard_threshold: float = 0.5

    def __post_init__(self):
        if not 1 <= self.k_start <= self.k_max:
            raise ValueError(f"need 1 <= k_start <= k_max, got {self.k_start}..{self.k_max}")
        if self.k_max > K_MAX_NUMERIC:
            raise ValueError(f"k_max {self.k_max} exceeds numeric cap {K_MAX_NUMERIC}")
        if not self.margin > 0:
            raise ValueError("margin must be positive")
        if not 0 < self.tail_fraction <= 1:
            raise ValueError("tail_fraction must be in (0, 1]")
        if self.samples < 4:
            raise ValueError("need at least 4 samples")


def sample_grid(
    lo: int,
    hi: int,
    count: int = DEFAULT_SAMPLES,
    support: Sequence[int] | None = None,
) -> tuple[int, ...]:
    """Geometric grid of integer indices in [lo, hi], deduplicated and sorted.

    With explicit support, returns the supported indices in range, thinned
    geometrically when there are more than ``count`` of them.
    """
    if hi <= lo:
        raise InvalidWindow(f"window [{lo}, {hi}] is empty")
    if support is not None:
        inside = [n for n in support if lo <= n <= hi]
        if len(inside) <= count:
            return tuple(inside)
        picks = sorted({int(round(i)) for i in _linspace(0, len(inside) - 1, count)})
        return tuple(inside[i] for i in picks)
    la, lb = math.log(lo), math.log(hi)
    raw = (math.exp(la + (lb - la) * i / (count - 1)) for i in range(count))
    grid = sorted({min(max(int(round(v)), lo), hi) for v in raw})
    return tuple(grid)


def _linspace(a: float, b: float, count: int):
    return (a + (b - a) * i / (count - 1) for i in range(count))


def _usable_tail(points: Sequence[SamplePoint], tail_fraction: float) -> list[SamplePoint]:
    """Last quarter (by default) of the usable samples.

    Samples that tripped a precision warning or failed to evaluate are
    excluded before the tail is taken: a poisoned sample must not decide a
    verdict, and a run of poisoned samples at the top of the window must not
    blind the test to the believable evidence below them.
    """
    usable = [p for p in points if p.usable]
    k = max(1, math.ceil(len(usable) * tail_fraction))
    return usable[len(usable) - k:]


def delta_at(spec: RatioSpec, n: int, use_delta: bool = True) -> tuple[float, bool]:
    """(a_n/a_{n+1} - 1, had_exact_delta) at index n."""
    if use_delta and spec.delta is not None:
        return float(spec.delta(n)), True
    return spec.ratio_at(n) - 1.0, False


def kummer_rho(weight: KummerWeight, ratio: RatioSpec, n: int, use_delta: bool = True) -> float:
    """Kummer statistic zeta_n * (a_n/a_{n+1}) - zeta_{n+1}.

    With a cancellation-free delta available this is computed as
    zeta_n * delta(n) - (zeta_{n+1} - zeta_n), which avoids differencing two
    nearly equal products.
    """
    if n < max(weight.first_index, ratio.first_index):
        raise DomainError(f"kummer_rho: n={n} precedes the weight/ratio domain")
    if ratio.last_index is not None and n > ratio.last_index:
        raise DomainError(f"kummer_rho: n={n} beyond ratio domain end {ratio.last_index}")
    zn = weight.zeta_at(n)
    zn1 = weight.zeta_at(n + 1)
    if use_delta and ratio.delta is not None:
        return zn * float(ratio.delta(n)) - (zn1 - zn)
    return zn * ratio.ratio_at(n) - zn1


def kummer_test(
    weight: KummerWeight,
    ratio: RatioSpec,
    window: tuple[int, int],
    margin: float,
    samples: int = DEFAULT_SAMPLES,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    use_delta: bool = True,
) -> Verdict:
    """Tail-window Kummer test.

    Converges when the tail minimum of rho exceeds +margin; diverges when the
    tail maximum is below -margin *and* the weight declares a divergent
    reciprocal sum; otherwise inconclusive.
    """
    lo, hi = window
    if hi <= lo:
        raise InvalidWindow(f"window [{lo}, {hi}] has n_hi <= n_lo")
    if margin <= 0:
        raise ValueError("margin must be positive")
    lo = max(lo, weight.first_index, ratio.first_index)
    if ratio.last_index is not None:
        hi = min(hi, ratio.last_index)
    if hi <= lo:
        raise InvalidWindow(f"window collapsed to [{lo}, {hi}] after domain clipping")
    pts = []
    for n in sample_grid(lo, hi, samples, ratio.support):
        try:
            rho = kummer_rho(weight, ratio, n, use_delta=use_delta)
            pts.append(SamplePoint(n, rho, True))
        except (DomainError, EvalError, ArithmeticError):
            pts.append(SamplePoint(n, math.nan, False))
    tail = _usable_tail(pts, tail_fraction)
    dropped = sum(1 for p in pts if not p.usable)
    if not tail:
        return Verdict(Decision.INCONCLUSIVE, None, (lo, hi), None, None, margin,
                       tuple(pts), dropped, note="no usable tail samples")
    r_min = min(p.value for p in tail)
    r_max = max(p.value for p in tail)
    if r_min > margin:
        decision = Decision.CONVERGES
    elif r_max < -margin and weight.reciprocal_sum_diverges:
        decision = Decision.DIVERGES
    else:
        decision = Decision.INCONCLUSIVE
    return Verdict(decision, None, (lo, hi), r_min, r_max, margin, tuple(pts), dropped)


def extract_sn(K: int, ratio: RatioSpec, n: int, use_delta: bool = True) -> ExtractionSample:
    """Solve the depth-K ratio expansion for the coefficient s_n.

    s_n = [delta(n) - 1/n - sum_{i=1}^{K-1} 1/(n * prod_(i))] * zeta_K(n),
    with delta(n) := ratio(n) - 1 when no exact delta form is supplied.  The
    empty sum at K = 1 contributes nothing.  ``precision_warning`` is set
    when the subtraction chain, starting from a raw ratio, lost more than
    half the significand.
    """
    lo = max(ratio.first_index, min_domain(K))
    if n < lo:
        raise DomainError(f"extract_sn: n={n} below first admissible index {lo} at depth {K}")
    if ratio.last_index is not None and n > ratio.last_index:
        raise DomainError(f"extract_sn: n={n} beyond ratio domain end {ratio.last_index}")
    d, exact = delta_at(ratio, n, use_delta)
    t = d - 1.0 / n
    for i in range(1, K):
        t -= 1.0 / (float(n) * iterlog_product(i, n))
    s = t * zeta_weight(K, n)
    warned = (not exact) and abs(t) < _CANCEL_THRESHOLD
    return ExtractionSample(n=n, s=s, precision_warning=warned)


def reconstruct_ratio(K: int, s: float, n: int) -> float:
    """Right side of the depth-K expansion evaluated at (s, n).

    Inverse of :func:`extract_sn` up to rounding: feeding an extracted s back
    reproduces the ratio to within a few ulps.
    """
    t = s / zeta_weight(K, n)
    for i in range(K - 1, 0, -1):
        t += 1.0 / (float(n) * iterlog_product(i, n))
    t += 1.0 / n
    return 1.0 + t


def _effective_window(
    K: int,
    ratio: RatioSpec,
    lo_floor: int,
    hi: int,
) -> tuple[int, int]:
    lo = max(lo_floor, min_domain(K), ratio.first_index)
    if ratio.last_index is not None:
        hi = min(hi, ratio.last_index)
    if hi <= lo:
        raise InvalidWindow(
            f"no admissible window at depth {K}: need indices above {lo}, have up to {hi}"
        )
    return lo, hi


def extended_bdm_test(
    K: int,
    ratio: RatioSpec,
    window: tuple[int, int] | None = None,
    margin: float = 0.2,
    samples: int = DEFAULT_SAMPLES,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    use_delta: bool = True,
) -> Verdict:
    """Fixed-depth test: tail extrema of the extracted s_n against 1 +- margin.

    At K = 1 this is the classical Bertrand r_n test.  Samples whose
    extraction raised a domain error or tripped the cancellation warning are
    recorded but excluded from the tail extrema; a poisoned sample can flip a
    verdict, a dropped one can only widen Inconclusive.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    if window is None:
        lo, hi = _effective_window(K, ratio, DEFAULT_WINDOW_FLOOR, DEFAULT_WINDOW_HI)
    else:
        if window[1] <= window[0]:
            raise InvalidWindow(f"window [{window[0]}, {window[1]}] has n_hi <= n_lo")
        lo, hi = _effective_window(K, ratio, window[0], window[1])
    pts = []
    for n in sample_grid(lo, hi, samples, ratio.support):
        try:
            sample = extract_sn(K, ratio, n, use_delta=use_delta)
            pts.append(SamplePoint(n, sample.s, not sample.precision_warning))
        except (DomainError, EvalError, ArithmeticError):
            pts.append(SamplePoint(n, math.nan, False))
    tail = _usable_tail(pts, tail_fraction)
    dropped = sum(1 for p in pts if not p.usable)
    if len(tail) < 2:
        return Verdict(Decision.INCONCLUSIVE, K, (lo, hi), None, None, margin,
                       tuple(pts), dropped, note="too few usable tail samples")
    s_min = min(p.value for p in tail)
    s_max = max(p.value for p in tail)
    if s_min > 1.0 + margin:
        decision = Decision.CONVERGES
    elif s_max < 1.0 - margin:
        decision = Decision.DIVERGES
    else:
        decision = Decision.INCONCLUSIVE
    return Verdict(decision, K, (lo, hi), s_min, s_max, margin, tuple(pts), dropped)


def _consistency_guard(
    K: int,
    verdict: Verdict,
    config: ClassifyConfig,
) -> GuardReport | None:
    """Check that a decisive depth-K verdict is consistent with depth K+1.

    Uses the exact identity s^(K+1)_n = (s^(K)_n - 1) * ln_(K+1)(n): when the
    depth-K tail genuinely settles away from 1, the next-level coefficient
    must grow (Converges) or fall (Diverges) by about gap * d(ln_(K+1));
    requires at least ``guard_threshold`` of that ideal change.  Returns None
    when depth K+1 is out of numeric reach for the sampled window.
    """
    if K + 1 > K_MAX_NUMERIC:
        return None
    cutoff = min_domain(K + 1)
    tail = [p for p in _usable_tail(verdict.samples, config.tail_fraction)
            if p.n >= cutoff]
    if len(tail) < 2:
        return None
    first, last = tail[0], tail[-1]
    l_lo = iterlog(K + 1, first.n)
    l_hi = iterlog(K + 1, last.n)
    span = l_hi - l_lo
    if span <= 1e-9:
        return None
    growth = (last.value - 1.0) * l_hi - (first.value - 1.0) * l_lo
    if verdict.decision is Decision.CONVERGES:
        required = config.guard_threshold * (verdict.s_min - 1.0) * span
        passed = growth >= required
    else:
        required = config.guard_threshold * (verdict.s_max - 1.0) * span
        passed = growth <= required
    return GuardReport(passed, growth, required, first.n, last.n)


def adaptive_classify(ratio: RatioSpec, config: ClassifyConfig | None = None) -> Verdict:
    """Walk the depth hierarchy until a trustworthy decisive verdict appears.

    At each depth K the fixed-depth test runs over the policy window.  A
    decisive verdict is accepted once the next-level consistency guard passes
    (or cannot be evaluated at the numeric cap); a failed guard escalates,
    because the apparent margin is then a slowly decaying correction term
    that the next depth resolves.  An inconclusive verdict escalates only
    when the tail hovers inside the near-one band.  The returned verdict
    carries the full escalation trace.
    """
    config = config or ClassifyConfig()
    reports: list[LevelReport] = []
    K = config.k_start
    last_verdict: Verdict | None = None
    while True:
        try:
            window = _effective_window(K, ratio, config.window_lo, config.window_hi)
        except InvalidWindow as exc:
            note = f"depth {K} not reachable: {exc}"
            return _inconclusive(config, K, reports, last_verdict, note)
        verdict = extended_bdm_test(
            K, ratio, window, config.margin,
            config.samples, config.tail_fraction, config.use_delta,
        )
        last_verdict = verdict
        guard = None
        escalate_reason = ""
        if verdict.decision is not Decision.INCONCLUSIVE:
            if config.guard:
                guard = _consistency_guard(K, verdict, config)
            if guard is None or guard.passed:
                reports.append(_level_report(verdict, guard))
                return replace(verdict, trace=tuple(reports))
            escalate_reason = "next-level growth check failed"
        else:
            in_band = (
                verdict.s_min is not None
                and abs(verdict.s_min - 1.0) <= config.near_one_band
                and abs(verdict.s_max - 1.0) <= config.near_one_band
            )
            if in_band:
                escalate_reason = "tail hovers near the critical value"
        if not escalate_reason or K >= config.k_max:
            note = "" if not escalate_reason else (
                f"stopped at depth {K} ({escalate_reason}, no depth left)"
            )
            reports.append(_level_report(verdict, guard, escalate_reason))
            final = verdict if verdict.decision is Decision.INCONCLUSIVE else replace(
                verdict, decision=Decision.INCONCLUSIVE,
                note=f"decisive at depth {K} but {escalate_reason}",
            )
            return replace(final, trace=tuple(reports), note=final.note or note)
        reports.append(_level_report(verdict, guard, escalate_reason))
        K += 1


def _level_report(verdict: Verdict, guard: GuardReport | None, escalated: str = "") -> LevelReport:
    return LevelReport(
        level=verdict.level if verdict.level is not None else 0,
        window=verdict.window,
        decision=verdict.decision,
        s_min=verdict.s_min,
        s_max=verdict.s_max,
        usable=sum(1 for p in verdict.samples if p.usable),
        dropped=verdict.dropped,
        guard=guard,
        escalated=escalated,
    )


def _inconclusive(
    config: ClassifyConfig,
    K: int,
    reports: list[LevelReport],
    last_verdict: Verdict | None,
    note: str,
) -> Verdict:
    base = last_verdict or Verdict(
        Decision.INCONCLUSIVE, K, (0, 0), None, None, config.margin,
    )
    return replace(base, decision=Decision.INCONCLUSIVE, trace=tuple(reports), note=note)
