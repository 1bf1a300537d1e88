"""Reflected random walk with position-dependent drift, and its classifier.

The walk starts at 1 and steps +-1 on the non-negative integers.  From a
positive position S it steps up with probability 1/2 + alpha(S)/S and down
with the complement; from 0 it moves to 1 with probability 1.  The drift
values must satisfy 0 < alpha(n) < min(C, n/2), which keeps both step
probabilities inside (0, 1).

Classification maps the walk onto a birth-death chain with rates
lambda_n = 1/2 + alpha(n)/n and mu_n = 1/2 - alpha(n)/n and defers to the
series machinery.  The Monte Carlo simulator exists to corroborate those
verdicts empirically; it is deterministic given (seed, horizon, n_paths)
and independent of execution order, worker count or chunking, because each
path consumes its own SplitMix64 stream seeded by a fixed mixing rule.

RNG contract (all arithmetic mod 2**64):

    GAMMA = 0x9E3779B97F4A7C15
    mix(z) = xor-shift/multiply finalizer of SplitMix64
    path_state_i(0) = mix(master_seed + (i + 1) * GAMMA)
    draw t >= 1:  state += GAMMA;  u_t = mix(state) >> 11   (53 bits)

Step t goes up iff u_t < p_up(S) * 2**53; every double in [1/2, 1) is an
integer multiple of 2**-53, so the threshold comparison is exact.  One draw
is consumed per step, including the forced step out of 0.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .birthdeath import BirthDeathRates, Classification, Fate, bdp_classify
from .convergence import ClassifyConfig
from .errors import EvalError, InvalidDrift

GAMMA = 0x9E3779B97F4A7C15
_MIX_M1 = 0xBF58476D1CE4E5B9
_MIX_M2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1
_U53 = 1 << 53


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (scalar, for seeding and reference runs)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_M1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_M2) & _MASK64
    return z ^ (z >> 31)


def path_seed(master_seed: int, path_index: int) -> int:
    """Initial stream state for one path; fixed by the RNG contract above."""
    return mix64((master_seed + (path_index + 1) * GAMMA) & _MASK64)


class WalkFate(str, Enum):
    RECURRENT = "recurrent"
    TRANSIENT = "transient"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DriftSpec:
    """Drift supplier alpha(n) for integer positions n >= 1, with cap C."""

    alpha: Callable[[int], float]
    C: float
    label: str = ""

    def alpha_at(self, n: int) -> float:
        a = float(self.alpha(n))
        bound = min(self.C, 0.5 * n)
        if not (math.isfinite(a) and 0.0 < a < bound):
            raise InvalidDrift(
                f"alpha({n}) = {a} violates 0 < alpha < min(C={self.C}, n/2={0.5 * n})"
            )
        return a


@dataclass(frozen=True)
class RWClassification:
    decision: WalkFate
    chain: Classification


@dataclass(frozen=True)
class FinalPositionStats:
    mean: float
    median: float
    min: int
    max: int


@dataclass(frozen=True)
class SimulationReport:
    n_paths: int
    horizon: int
    seed: int
    returned_paths: int
    returned_fraction: float
    mean_first_return: float | None
    max_excursion: int
    final_positions: FinalPositionStats


def step_probabilities(spec: DriftSpec, position: int) -> tuple[float, float]:
    """(p_up, p_down) at a position; (1, 0) at the reflecting origin.

    p_down is computed as 1 - p_up, which is exact for p_up in [1/2, 1], so
    the pair always sums to exactly 1.
    """
    if not isinstance(position, int) or isinstance(position, bool) or position < 0:
        raise InvalidDrift(f"position must be a non-negative integer, got {position!r}")
    if position == 0:
        return 1.0, 0.0
    a = spec.alpha_at(position)
    p_up = 0.5 + a / position
    return p_up, 1.0 - p_up


def rw_to_bdp(spec: DriftSpec) -> BirthDeathRates:
    """Chain with lambda_n = 1/2 + alpha(n)/n, mu_n = 1/2 - alpha(n)/n.

    The rate-ratio delta lambda/mu - 1 = 2t / (1/2 - t) with t = alpha(n)/n
    is supplied in that cancellation-free form.
    """

    def lam(n: int) -> float:
        return 0.5 + spec.alpha_at(n) / n

    def mu(n: int) -> float:
        return 0.5 - spec.alpha_at(n) / n

    def ratio_delta(n: int) -> float:
        t = spec.alpha_at(n) / n
        return (2.0 * t) / (0.5 - t)

    return BirthDeathRates(
        lam=lam, mu=mu, first_index=1, ratio_delta=ratio_delta,
        label=spec.label or "walk-induced chain",
    )


_WALK_FATE_OF = {
    Fate.RECURRENT: WalkFate.RECURRENT,
    Fate.TRANSIENT: WalkFate.TRANSIENT,
    Fate.INCONCLUSIVE: WalkFate.INCONCLUSIVE,
}


def rw_classify(spec: DriftSpec, config: ClassifyConfig | None = None) -> RWClassification:
    chain = bdp_classify(rw_to_bdp(spec), config)
    return RWClassification(decision=_WALK_FATE_OF[chain.decision], chain=chain)


def _drift_tables(spec: DriftSpec, max_position: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-position up-step thresholds, validity mask and raw alpha values.

    Invalid positions are only an error if a path actually stands on one,
    so violations are recorded here and raised at visit time.
    """
    thresholds = np.zeros(max_position + 1, dtype=np.uint64)
    valid = np.ones(max_position + 1, dtype=bool)
    alphas = np.zeros(max_position + 1, dtype=np.float64)
    thresholds[0] = np.uint64(_U53)  # forced step 0 -> 1
    for s in range(1, max_position + 1):
        try:
            a = spec.alpha_at(s)
        except (InvalidDrift, EvalError):
            valid[s] = False
            try:
                alphas[s] = float(spec.alpha(s))
            except Exception:
                alphas[s] = math.nan
            continue
        alphas[s] = a
        p_up = 0.5 + a / s
        thresholds[s] = np.uint64(int(p_up * _U53))
    return thresholds, valid, alphas


def _simulate_chunk(
    seeds: np.ndarray,
    horizon: int,
    thresholds: np.ndarray,
    valid: np.ndarray,
    alphas: np.ndarray,
    C: float,
) -> tuple[int, int, int, np.ndarray]:
    """(returned_count, first_return_sum, max_excursion, final_positions)."""
    n = seeds.shape[0]
    state = seeds.copy()
    pos = np.ones(n, dtype=np.int64)
    returned = np.zeros(n, dtype=bool)
    first_ret = np.zeros(n, dtype=np.int64)
    max_exc = np.ones(n, dtype=np.int64)
    gamma = np.uint64(GAMMA)
    m1 = np.uint64(_MIX_M1)
    m2 = np.uint64(_MIX_M2)
    check_validity = not valid.all()
    for t in range(1, horizon + 1):
        if check_validity and not valid[pos].all():
            bad = int(pos[~valid[pos]].min())
            raise InvalidDrift(
                f"alpha({bad}) = {alphas[bad]} violates "
                f"0 < alpha < min(C={C}, n/2={0.5 * bad}) at step {t}"
            )
        state += gamma
        z = state.copy()
        z ^= z >> np.uint64(30)
        z *= m1
        z ^= z >> np.uint64(27)
        z *= m2
        z ^= z >> np.uint64(31)
        up = (z >> np.uint64(11)) < thresholds[pos]
        pos += np.where(up, 1, -1)
        hit = pos == 0
        new = hit & ~returned
        if new.any():
            first_ret[new] = t
            returned |= new
        np.maximum(max_exc, pos, out=max_exc)
    return (
        int(returned.sum()),
        int(first_ret.sum()),
        int(max_exc.max()),
        pos,
    )


def simulate(
    spec: DriftSpec,
    seed: int,
    horizon: int,
    n_paths: int,
    workers: int = 1,
    chunk_size: int = 4096,
) -> SimulationReport:
    """Simulate n_paths independent trajectories from position 1.

    Bit-identical output for identical (seed, horizon, n_paths) regardless
    of ``workers`` or ``chunk_size``: chunking only partitions the path set,
    and every aggregate is an order-insensitive sum/max/count over paths.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon!r}")
    if not isinstance(n_paths, int) or n_paths < 1:
        raise ValueError(f"n_paths must be a positive integer, got {n_paths!r}")
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    seed = int(seed) & _MASK64
    # Positions never exceed S_0 + horizon.
    thresholds, valid, alphas = _drift_tables(spec, horizon + 1)
    seeds = np.array([path_seed(seed, i) for i in range(n_paths)], dtype=np.uint64)
    chunks = [
        seeds[lo:lo + chunk_size] for lo in range(0, n_paths, chunk_size)
    ]

    def run(chunk: np.ndarray):
        return _simulate_chunk(chunk, horizon, thresholds, valid, alphas, spec.C)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(chunk) for chunk in chunks]

    returned = sum(r[0] for r in results)
    first_ret_sum = sum(r[1] for r in results)
    max_excursion = max(r[2] for r in results)
    finals = np.concatenate([r[3] for r in results])
    mean_first_return = (first_ret_sum / returned) if returned else None
    stats = FinalPositionStats(
        mean=float(finals.sum()) / n_paths,
        median=float(np.median(finals)),
        min=int(finals.min()),
        max=int(finals.max()),
    )
    return SimulationReport(
        n_paths=n_paths,
        horizon=horizon,
        seed=seed,
        returned_paths=returned,
        returned_fraction=returned / n_paths,
        mean_first_return=mean_first_return,
        max_excursion=max_excursion,
        final_positions=stats,
    )


def simulate_reference(spec: DriftSpec, seed: int, horizon: int, n_paths: int) -> SimulationReport:
    """Scalar pure-Python implementation of the exact same RNG contract.

    Slow; written independently of the vectorized kernel so the two can
    check each other.
    """
    if horizon < 1 or n_paths < 1:
        raise ValueError("horizon and n_paths must be positive")
    seed = int(seed) & _MASK64
    returned = 0
    first_ret_sum = 0
    max_excursion = 1
    finals = []
    for i in range(n_paths):
        state = path_seed(seed, i)
        pos = 1
        first = 0
        path_max = 1
        for t in range(1, horizon + 1):
            if pos == 0:
                p_up = 1.0
            else:
                a = spec.alpha_at(pos)
                p_up = 0.5 + a / pos
            state = (state + GAMMA) & _MASK64
            u = mix64(state) >> 11
            if u < int(p_up * _U53):
                pos += 1
            else:
                pos -= 1
            if pos == 0 and first == 0:
                first = t
            path_max = max(path_max, pos)
        if first:
            returned += 1
            first_ret_sum += first
        finals.append(pos)
        max_excursion = max(max_excursion, path_max)
    finals_arr = np.array(finals, dtype=np.int64)
    return SimulationReport(
        n_paths=n_paths,
        horizon=horizon,
        seed=seed,
        returned_paths=returned,
        returned_fraction=returned / n_paths,
        mean_first_return=(first_ret_sum / returned) if returned else None,
        max_excursion=max_excursion,
        final_positions=FinalPositionStats(
            mean=float(finals_arr.sum()) / n_paths,
            median=float(np.median(finals_arr)),
            min=int(finals_arr.min()),
            max=int(finals_arr.max()),
        ),
    )
