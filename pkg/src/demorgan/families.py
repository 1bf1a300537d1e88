"""Built-in parametric families with analytic ground truth.

These back the acceptance suite and the CLI: every family knows its true
convergence (or recurrence) behaviour, carries a cancellation-free delta
form for accurate extraction at large n, and, for series, evaluates its
terms through the same expression engine a user-supplied formula would use,
so the family route and the expression route agree bit for bit.

Series catalog:

    p-series        1/n^p                      converges iff p > 1
    log-power       1/(n ln(n)^r)              converges iff r > 1
    iterlog-power   1/(n ln(n)...ln_(K)(n) ln_(K+1)(n)^r)   converges iff r > 1
    geometric       x^n                        converges iff x < 1

Birth-death rate families perturb lambda/mu around 1 with the same shapes;
walk families supply the position-dependent drift alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath as mp

from .birthdeath import BirthDeathRates, Fate
from .convergence import Decision, RatioSpec
from .errors import DomainError
from .expr import parse_expression
from .iterlog import K_MAX_NUMERIC, iterlog_product, min_domain
from .walk import DriftSpec, WalkFate


@dataclass(frozen=True)
class SeriesFamily:
    name: str
    params: dict[str, float]
    expression: str
    ratio_spec: RatioSpec
    truth: Decision
    hp_term: Callable[[int], mp.mpf]

    @property
    def label(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({inner})"


def _term_ratio(term: Callable[[float], float]) -> Callable[[int], float]:
    def ratio(n: int) -> float:
        a, b = term(n), term(n + 1)
        if not (a > 0.0 and b > 0.0):
            raise DomainError(f"series terms must be positive, got a({n})={a}, a({n+1})={b}")
        return a / b
    return ratio


def p_series(p: float) -> SeriesFamily:
    if not math.isfinite(p):
        raise ValueError("p must be finite")
    expression = f"1/n^{p!r}"
    term = parse_expression(expression)

    def delta(n: int) -> float:
        return math.expm1(p * math.log1p(1.0 / n))

    def hp_term(n: int) -> mp.mpf:
        return mp.mpf(n) ** (-mp.mpf(repr(p)))

    return SeriesFamily(
        name="p-series",
        params={"p": p},
        expression=expression,
        ratio_spec=RatioSpec(
            ratio=_term_ratio(term), delta=delta, first_index=1, label=f"p-series(p={p:g})",
        ),
        truth=Decision.CONVERGES if p > 1 else Decision.DIVERGES,
        hp_term=hp_term,
    )


def log_power(r: float) -> SeriesFamily:
    if not math.isfinite(r):
        raise ValueError("r must be finite")
    expression = f"1/(n*ln(n)^{r!r})"
    term = parse_expression(expression)

    def delta(n: int) -> float:
        u = math.log1p(1.0 / n)
        return math.expm1(u + r * math.log1p(u / math.log(n)))

    def hp_term(n: int) -> mp.mpf:
        return 1 / (mp.mpf(n) * mp.ln(n) ** mp.mpf(repr(r)))

    return SeriesFamily(
        name="log-power",
        params={"r": r},
        expression=expression,
        ratio_spec=RatioSpec(
            ratio=_term_ratio(term), delta=delta, first_index=2, label=f"log-power(r={r:g})",
        ),
        truth=Decision.CONVERGES if r > 1 else Decision.DIVERGES,
        hp_term=hp_term,
    )


def iterlog_power(depth: int, r: float) -> SeriesFamily:
    """1 / (n * ln(n) * ... * ln_(depth)(n) * ln_(depth+1)(n)^r)."""
    if not isinstance(depth, int) or not 1 <= depth <= K_MAX_NUMERIC - 1:
        raise ValueError(f"depth must be an integer in 1..{K_MAX_NUMERIC - 1}")
    if not math.isfinite(r):
        raise ValueError("r must be finite")
    parts = ["n", "ln(n)"] + [f"iterlog({k},n)" for k in range(2, depth + 1)]
    expression = f"1/({'*'.join(parts)}*iterlog({depth + 1},n)^{r!r})"
    term = parse_expression(expression)
    first = min_domain(depth + 1)

    def delta(n: int) -> float:
        # ln(ratio) telescopes through the log chain: with u_1 = log1p(1/n)
        # and u_{k+1} = log1p(u_k / ln_(k)(n)), the k-th factor contributes
        # u_{k+1} and the power factor r * u_{depth+2}.
        u = math.log1p(1.0 / n)
        total = u
        v = float(n)
        for k in range(1, depth + 2):
            v = math.log(v)  # ln_(k)(n)
            u = math.log1p(u / v)
            total += u if k <= depth else r * u
        return math.expm1(total)

    def hp_term(n: int) -> mp.mpf:
        d = mp.mpf(n)
        v = mp.mpf(n)
        for _ in range(depth):
            v = mp.ln(v)
            d *= v
        return 1 / (d * mp.ln(v) ** mp.mpf(repr(r)))

    return SeriesFamily(
        name="iterlog-power",
        params={"K": depth, "r": r},
        expression=expression,
        ratio_spec=RatioSpec(
            ratio=_term_ratio(term), delta=delta, first_index=first,
            label=f"iterlog-power(K={depth}, r={r:g})",
        ),
        truth=Decision.CONVERGES if r > 1 else Decision.DIVERGES,
        hp_term=hp_term,
    )


def geometric(x: float) -> SeriesFamily:
    """x^n for x > 0.  The ratio is the constant 1/x; terms under- or
    overflow floats at large n, so the ratio is supplied algebraically."""
    if not (math.isfinite(x) and x > 0):
        raise ValueError("x must be finite and positive")
    expression = f"{x!r}^n"

    def ratio(n: int) -> float:
        return 1.0 / x

    def delta(n: int) -> float:
        return (1.0 - x) / x

    def hp_term(n: int) -> mp.mpf:
        return mp.mpf(repr(x)) ** n

    return SeriesFamily(
        name="geometric",
        params={"x": x},
        expression=expression,
        ratio_spec=RatioSpec(ratio=ratio, delta=delta, first_index=1,
                             label=f"geometric(x={x:g})"),
        truth=Decision.CONVERGES if x < 1 else Decision.DIVERGES,
        hp_term=hp_term,
    )


SERIES_FACTORIES: dict[str, tuple[Callable[..., SeriesFamily], tuple[str, ...]]] = {
    "p-series": (p_series, ("p",)),
    "log-power": (log_power, ("r",)),
    "iterlog-power": (iterlog_power, ("K", "r")),
    "geometric": (geometric, ("x",)),
}


def make_series_family(name: str, **params: float) -> SeriesFamily:
    if name not in SERIES_FACTORIES:
        raise ValueError(
            f"unknown series family {name!r}; known: {', '.join(sorted(SERIES_FACTORIES))}"
        )
    factory, wanted = SERIES_FACTORIES[name]
    missing = [w for w in wanted if w not in params or params[w] is None]
    if missing:
        raise ValueError(f"family {name!r} needs parameter(s): {', '.join(missing)}")
    extra = [k for k, v in params.items() if k not in wanted and v is not None]
    if extra:
        raise ValueError(f"family {name!r} does not take: {', '.join(extra)}")
    kwargs = {w: params[w] for w in wanted}
    if "K" in kwargs:
        kwargs["depth"] = int(kwargs.pop("K"))
    return factory(**kwargs)


# The canonical 12-family acceptance catalog.
ACCEPTANCE_CATALOG: tuple[tuple[str, dict[str, float]], ...] = (
    ("p-series", {"p": 0.5}),
    ("p-series", {"p": 1.0}),
    ("p-series", {"p": 2.0}),
    ("log-power", {"r": 0.5}),
    ("log-power", {"r": 1.0}),
    ("log-power", {"r": 2.0}),
    ("iterlog-power", {"K": 1, "r": 0.5}),
    ("iterlog-power", {"K": 1, "r": 2.0}),
    ("iterlog-power", {"K": 2, "r": 0.5}),
    ("iterlog-power", {"K": 2, "r": 2.0}),
    ("geometric", {"x": 0.5}),
    ("geometric", {"x": 2.0}),
)


# ---------------------------------------------------------------------------
# Birth-death rate families: perturbations of lambda/mu around 1 whose
# recurrence behaviour is known in closed form.


@dataclass(frozen=True)
class RateFamily:
    name: str
    params: dict[str, float]
    rates: BirthDeathRates
    truth: Fate

    @property
    def label(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({inner})"


def bd_power(c: float) -> RateFamily:
    """lambda/mu = 1 + c/n; transient iff c > 1 (products decay like n^-c)."""
    if not (math.isfinite(c) and c >= 0):
        raise ValueError("c must be finite and non-negative")
    rates = BirthDeathRates(
        lam=lambda n: 1.0 + c / n,
        mu=lambda n: 1.0,
        first_index=1,
        ratio_delta=lambda n: c / n,
        label=f"bd-power(c={c:g})",
    )
    return RateFamily(
        name="bd-power", params={"c": c}, rates=rates,
        truth=Fate.TRANSIENT if c > 1 else Fate.RECURRENT,
    )


def bd_log(c: float) -> RateFamily:
    """lambda/mu = 1 + 1/n + c/(n ln n); transient iff c > 1."""
    if not (math.isfinite(c) and c >= 0):
        raise ValueError("c must be finite and non-negative")

    def delta(n: int) -> float:
        return 1.0 / n + c / (n * math.log(n))

    rates = BirthDeathRates(
        lam=lambda n: 1.0 + delta(n),
        mu=lambda n: 1.0,
        first_index=2,
        ratio_delta=delta,
        label=f"bd-log(c={c:g})",
    )
    return RateFamily(
        name="bd-log", params={"c": c}, rates=rates,
        truth=Fate.TRANSIENT if c > 1 else Fate.RECURRENT,
    )


def bd_iterlog(depth: int, c: float) -> RateFamily:
    """lambda/mu = 1 + 1/n + sum_{k<depth} 1/(n prod_k) + c/(n prod_depth).

    The boundary shape of the depth-``depth`` test with the deepest term
    weighted by c; transient iff c > 1.
    """
    if not isinstance(depth, int) or not 1 <= depth <= K_MAX_NUMERIC:
        raise ValueError(f"depth must be an integer in 1..{K_MAX_NUMERIC}")
    if not (math.isfinite(c) and c >= 0):
        raise ValueError("c must be finite and non-negative")
    first = min_domain(depth)

    def delta(n: int) -> float:
        total = 1.0 / n
        for k in range(1, depth):
            total += 1.0 / (n * iterlog_product(k, n))
        total += c / (n * iterlog_product(depth, n))
        return total

    rates = BirthDeathRates(
        lam=lambda n: 1.0 + delta(n),
        mu=lambda n: 1.0,
        first_index=first,
        ratio_delta=delta,
        label=f"bd-iterlog(K={depth}, c={c:g})",
    )
    return RateFamily(
        name="bd-iterlog", params={"K": depth, "c": c}, rates=rates,
        truth=Fate.TRANSIENT if c > 1 else Fate.RECURRENT,
    )


RATE_FACTORIES: dict[str, tuple[Callable[..., RateFamily], tuple[str, ...]]] = {
    "bd-power": (bd_power, ("c",)),
    "bd-log": (bd_log, ("c",)),
    "bd-iterlog": (bd_iterlog, ("K", "c")),
}


def make_rate_family(name: str, **params: float) -> RateFamily:
    if name not in RATE_FACTORIES:
        raise ValueError(
            f"unknown rate family {name!r}; known: {', '.join(sorted(RATE_FACTORIES))}"
        )
    factory, wanted = RATE_FACTORIES[name]
    missing = [w for w in wanted if w not in params or params[w] is None]
    if missing:
        raise ValueError(f"family {name!r} needs parameter(s): {', '.join(missing)}")
    kwargs = {w: params[w] for w in wanted}
    if "K" in kwargs:
        kwargs["depth"] = int(kwargs.pop("K"))
    return factory(**kwargs)


# ---------------------------------------------------------------------------
# Walk drift families.


@dataclass(frozen=True)
class WalkFamily:
    name: str
    params: dict[str, float]
    drift: DriftSpec
    truth: WalkFate


def alpha_const(a: float) -> WalkFamily:
    """Constant drift alpha(n) = a, 0 < a < 1/2.

    The induced rate ratio is 1 + 4a/n + O(1/n^2): transient for a > 1/4,
    recurrent for a <= 1/4 (at a = 1/4 the depth-1 coefficient collapses to
    zero, which still lands on the divergent side).
    """
    if not (math.isfinite(a) and 0.0 < a < 0.5):
        raise ValueError(f"need 0 < a < 1/2, got {a}")
    drift = DriftSpec(alpha=lambda n: a, C=0.5, label=f"alpha-const(a={a:g})")
    return WalkFamily(
        name="alpha-const", params={"a": a}, drift=drift,
        truth=WalkFate.TRANSIENT if a > 0.25 else WalkFate.RECURRENT,
    )


def alpha_threshold(depth: int, c: float) -> WalkFamily:
    """Boundary-shaped drift (1/4)(1 + sum_{k<depth} 1/prod_k + c/prod_depth).

    Below the first index where every log factor exceeds 1 the formula is
    frozen at that index and capped under min(C, n/2); the tail, which is
    all that classification sees, is the exact boundary shape.  Transient
    iff c > 1.
    """
    if not isinstance(depth, int) or not 1 <= depth <= K_MAX_NUMERIC - 1:
        raise ValueError(f"depth must be an integer in 1..{K_MAX_NUMERIC - 1}")
    if not (math.isfinite(c) and c >= 0):
        raise ValueError("c must be finite and non-negative")
    cap = 1.0
    floor_index = min_domain(depth + 1)

    def alpha(n: int) -> float:
        m = max(n, floor_index)
        value = 1.0
        for k in range(1, depth):
            value += 1.0 / iterlog_product(k, m)
        value += c / iterlog_product(depth, m)
        value *= 0.25
        return min(value, 0.999 * min(cap, 0.5 * n))

    drift = DriftSpec(alpha=alpha, C=cap, label=f"alpha-threshold(K={depth}, c={c:g})")
    return WalkFamily(
        name="alpha-threshold", params={"K": depth, "c": c}, drift=drift,
        truth=WalkFate.TRANSIENT if c > 1 else WalkFate.RECURRENT,
    )


WALK_FACTORIES: dict[str, tuple[Callable[..., WalkFamily], tuple[str, ...]]] = {
    "alpha-const": (alpha_const, ("a",)),
    "alpha-threshold": (alpha_threshold, ("K", "c")),
}


def make_walk_family(name: str, **params: float) -> WalkFamily:
    if name not in WALK_FACTORIES:
        raise ValueError(
            f"unknown walk family {name!r}; known: {', '.join(sorted(WALK_FACTORIES))}"
        )
    factory, wanted = WALK_FACTORIES[name]
    missing = [w for w in wanted if w not in params or params[w] is None]
    if missing:
        raise ValueError(f"family {name!r} needs parameter(s): {', '.join(missing)}")
    kwargs = {w: params[w] for w in wanted}
    if "K" in kwargs:
        kwargs["depth"] = int(kwargs.pop("K"))
    return factory(**kwargs)
