"""Monte Carlo simulation of the activation dynamics on a truncated interval.

Randomness is counter-based: the uniform driving step t of particle p at site
i in trial n is a pure hash of (seed, n, i, p, t).  That makes runs
reproducible bit-for-bit regardless of worker count, and couples configs that
share a seed: raising N appends particles and raising L appends steps without
disturbing existing draws, so activated sets grow monotonically per trial.

Because every walk is nearest-neighbor, the range of one particle is the
interval [i + min cum, i + max cum], and the activated set is always the
interval [1, h] for some frontier h.  A trial therefore reduces to a prefix-
maximum scan over per-site rightmost reaches: the frontier is the first site
h with max_{i <= h} (i + reach_i) == h.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from . import exact
from .classify import ProcessParams
from .errors import OutOfRangeError, ResourceLimitError
from .sequences import SequenceSpec

DEFAULT_WORK_BUDGET = 4_000_000_000  # trials * (M+L) * N * L
_CHUNK_ELEMENTS = 8_000_000

_K1 = np.uint64(0x9E3779B97F4A7C15)
_K2 = np.uint64(0xC2B2AE3D27D4EB4F)
_K3 = np.uint64(0x165667B19E3779F9)
_K4 = np.uint64(0xD6E8FEB86659FD93)


def _mix(z):
    """splitmix64 finalizer, elementwise on uint64 arrays."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class SimConfig:
    params: ProcessParams
    horizon: int
    trials: int
    seed: int
    ci_level: float = 0.95

    def __post_init__(self):
        if self.horizon <= self.params.L:
            raise OutOfRangeError(f"horizon must exceed L, got {self.horizon}")
        if self.trials < 1:
            raise OutOfRangeError(f"need trials >= 1, got {self.trials}")
        if not (0 < self.ci_level < 1):
            raise OutOfRangeError(f"ci_level must be in (0,1), got {self.ci_level}")

    def to_dict(self) -> dict:
        return {
            "params": {
                "N": self.params.N,
                "L": self.params.L,
                "spec": self.params.spec.to_dict(),
            },
            "horizon": self.horizon,
            "trials": self.trials,
            "seed": self.seed,
            "ci_level": self.ci_level,
        }


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    max_sites: np.ndarray        # per-trial max activated site, capped at M
    survival_count: int
    p_hat: float
    ci_low: float
    ci_high: float
    site_counts: np.ndarray      # activation counts for sites 1..M

    def aggregate_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "result": {
                "trials": self.config.trials,
                "survival_count": self.survival_count,
                "p_hat": self.p_hat,
                "ci_low": self.ci_low,
                "ci_high": self.ci_high,
                "max_site_mean": float(np.mean(self.max_sites)),
                "max_site_max": int(np.max(self.max_sites)),
            },
        }

    def to_jsonl(self) -> str:
        return json.dumps(self.aggregate_dict(), sort_keys=True) + "\n"


@dataclass(frozen=True)
class ActivationProfile:
    config: SimConfig
    sites: np.ndarray            # 1..M
    p_hat: np.ndarray            # empirical P(E_i)
    ci_half: np.ndarray          # Wilson half-widths
    lower_curve: np.ndarray      # telescoping bound, nan where undefined


def wilson_interval(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    z = NormalDist().inv_cdf(0.5 + level / 2)
    if n == 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _frontiers(q: np.ndarray, N: int, L: int, seed: int,
               trial_lo: int, trial_hi: int) -> np.ndarray:
    """Frontier site h (max activated site in [1, S]) for each trial in the range.

    q[i-1] is the left-step probability of site i; S = len(q) sites are tracked.
    """
    S = len(q)
    trials = np.arange(trial_lo, trial_hi, dtype=np.uint64)
    sites = np.arange(1, S + 1, dtype=np.uint64)
    particles = np.arange(N, dtype=np.uint64)
    steps = np.arange(L, dtype=np.uint64)

    h1 = _mix(np.uint64(seed) ^ (trials * _K1))                      # (B,)
    h2 = _mix(h1[:, None] ^ (sites * _K2)[None, :])                  # (B,S)
    pt = (particles * _K3)[:, None] ^ (steps * _K4)[None, :]         # (N,L)
    h3 = _mix(h2[:, :, None, None] ^ pt[None, None, :, :])           # (B,S,N,L)
    u = (h3 >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    moves = np.where(u < q[None, :, None, None], -1, 1).astype(np.int32)
    cum = np.cumsum(moves, axis=3)
    # rightmost reach of any of the N walks from each site (never below 0:
    # the origin itself counts as visited)
    reach = np.maximum(cum.max(axis=3).max(axis=2), 0)               # (B,S)

    idx = np.arange(1, S + 1, dtype=np.int64)
    far = np.minimum(idx[None, :] + reach, S)
    prefix = np.maximum.accumulate(far, axis=1)
    stuck = prefix == idx[None, :]
    # the last tracked site is always "stuck" after clipping, so argmax is safe
    return 1 + np.argmax(stuck, axis=1)


def _check_budget(cfg: SimConfig, budget: int) -> int:
    S = cfg.horizon + cfg.params.L
    work = cfg.trials * S * cfg.params.N * cfg.params.L
    if work > budget:
        raise ResourceLimitError(
            f"trials*sites*N*L = {work} exceeds the work budget {budget}"
        )
    return S


def run_trials(cfg: SimConfig, threads: int = 1,
               budget: int = DEFAULT_WORK_BUDGET) -> np.ndarray:
    """Frontier sites for all trials; deterministic in (config, seed) only."""
    S = _check_budget(cfg, budget)
    N, L = cfg.params.N, cfg.params.L
    q = cfg.params.spec.values(1, S + 1)
    per_trial = S * N * L
    chunk = max(1, min(_CHUNK_ELEMENTS // per_trial, cfg.trials))
    ranges = [(lo, min(lo + chunk, cfg.trials)) for lo in range(0, cfg.trials, chunk)]
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: _frontiers(q, N, L, cfg.seed, *r), ranges))
    else:
        parts = [_frontiers(q, N, L, cfg.seed, *r) for r in ranges]
    return np.concatenate(parts)


def simulate_trial(params: ProcessParams, M: int, trial: int, seed: int):
    """One trial: (max activated site capped at M, the activated site set)."""
    if M <= params.L:
        raise OutOfRangeError(f"horizon must exceed L, got {M}")
    q = params.spec.values(1, M + params.L + 1)
    h = int(_frontiers(q, params.N, params.L, seed, trial, trial + 1)[0])
    return min(h, M), frozenset(range(1, h + 1))


def estimate_survival(cfg: SimConfig, threads: int = 1,
                      budget: int = DEFAULT_WORK_BUDGET) -> SimResult:
    """Survival-to-horizon estimate with a Wilson interval, plus per-site counts."""
    M = cfg.horizon
    frontiers = run_trials(cfg, threads=threads, budget=budget)
    survived = int(np.sum(frontiers >= M))
    lo, hi = wilson_interval(survived, cfg.trials, cfg.ci_level)
    hist = np.bincount(np.minimum(frontiers, M), minlength=M + 1)
    # E_i holds iff the frontier reached at least i
    site_counts = np.cumsum(hist[::-1])[::-1][1:]
    return SimResult(
        config=cfg,
        max_sites=np.minimum(frontiers, M),
        survival_count=survived,
        p_hat=survived / cfg.trials,
        ci_low=lo,
        ci_high=hi,
        site_counts=site_counts,
    )


def estimate_activation_profile(cfg: SimConfig, threads: int = 1,
                                budget: int = DEFAULT_WORK_BUDGET) -> ActivationProfile:
    """Empirical P(E_i) per site, with the telescoping lower-bound curve.

    The curve anchors at the empirical P(E_{L+1}) and multiplies the exact
    block factors (1 - a_k): site n+L+1 gets P(E_{L+1}) * prod_{k=1..n}(1-a_k).
    """
    result = estimate_survival(cfg, threads=threads, budget=budget)
    M, L = cfg.horizon, cfg.params.L
    n_trials = cfg.trials
    p = result.site_counts / n_trials
    half = np.array([
        (lambda iv: (iv[1] - iv[0]) / 2)(wilson_interval(int(k), n_trials, cfg.ci_level))
        for k in result.site_counts
    ])
    curve = np.full(M, np.nan)
    if L + 1 <= M:
        anchor = p[L]  # P(E_{L+1})
        prod = 1.0
        curve[:L + 1] = np.nan
        for n in range(1, M - L):
            prod *= 1.0 - exact.a_n(cfg.params.spec, cfg.params.N, L, n)
            site = n + L + 1
            if site <= M:
                curve[site - 1] = anchor * prod
    return ActivationProfile(
        config=cfg, sites=np.arange(1, M + 1), p_hat=p, ci_half=half,
        lower_curve=curve,
    )
