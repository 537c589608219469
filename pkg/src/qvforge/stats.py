"""Heavy-output statistics and the benchmark pass/fail decision.

A run is summarized by the mean heavy-output probability (HOP) over its
circuits.  It passes when the mean exceeds the 2/3 threshold by more
than two standard errors of the mean, i.e. z = (h_mean - 2/3)/sigma > 2,
a 97.725% one-sided confidence level.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng
from .simkit.trajectories import ShotCounts

THRESHOLD = 2.0 / 3.0
Z_PASS = 2.0


class StatsError(ValueError):
    pass


def hop_of_counts(counts: ShotCounts, heavy: set[str]) -> float:
    """Fraction of sampled shots landing in the heavy set."""
    hits = sum(n for bits, n in counts.counts.items() if bits in heavy)
    return hits / counts.shots


def hop_of_distribution(probs: np.ndarray, heavy: set[str]) -> float:
    """Probability mass a distribution puts on the heavy set (exact mode)."""
    # Summation in index order: set iteration order varies per process
    # (string hash randomization) and would perturb the last ulp.
    idx = sorted(int(bits, 2) for bits in heavy)
    return float(np.asarray(probs)[idx].sum()) if idx else 0.0


def confidence(z: float) -> float:
    """Standard normal CDF as a percentage."""
    return 50.0 * (1.0 + math.erf(z / math.sqrt(2.0)))


@dataclass(frozen=True)
class HopStats:
    n_c: int
    h_mean: float
    sigma: float
    z: float
    confidence: float
    passed: bool

    def __post_init__(self) -> None:
        if not 0.0 <= self.h_mean <= 1.0:
            raise StatsError("mean HOP outside [0, 1]")
        if self.sigma < 0:
            raise StatsError("negative standard error")


def binomial_sigma(h_mean: float, n_c: int) -> float:
    """Standard error of the mean HOP under the binomial model."""
    return math.sqrt(max(h_mean * (1.0 - h_mean), 0.0) / n_c)


def bootstrap_sigma(h_list, reps: int = 10_000, seed: int = 0) -> float:
    """Alternative estimator: resample circuits with replacement.

    Deterministic in the seed; agrees with binomial_sigma to well within
    decision tolerance at a hundred circuits or more."""
    h = np.asarray(h_list, dtype=float)
    if h.size < 2:
        raise StatsError("bootstrap needs at least two circuits")
    gen = rng.substream(seed, rng.BOOTSTRAP, 0)
    idx = gen.integers(0, h.size, size=(reps, h.size))
    means = h[idx].mean(axis=1)
    return float(means.std(ddof=1))


def aggregate(
    h_list,
    threshold: float = THRESHOLD,
    z_pass: float = Z_PASS,
    sigma_mode: str = "binomial",
    seed: int = 0,
) -> HopStats:
    """Summarize per-circuit HOPs into the pass/fail decision record."""
    h = np.asarray(h_list, dtype=float)
    if h.size < 2:
        raise StatsError("aggregation needs at least two circuits")
    if np.any((h < 0) | (h > 1)):
        raise StatsError("HOP outside [0, 1]")
    h_mean = float(h.mean())
    if sigma_mode == "binomial":
        sigma = binomial_sigma(h_mean, h.size)
    elif sigma_mode == "bootstrap":
        sigma = bootstrap_sigma(h, seed=seed)
    else:
        raise StatsError(f"unknown sigma mode {sigma_mode!r}")
    if sigma == 0.0:
        # degenerate spread: the threshold comparison decides directly
        if h_mean > threshold:
            z = math.inf
        elif h_mean < threshold:
            z = -math.inf
        else:
            z = 0.0
        passed = h_mean > threshold
    else:
        z = (h_mean - threshold) / sigma
        passed = z > z_pass
    return HopStats(
        n_c=int(h.size),
        h_mean=h_mean,
        sigma=sigma,
        z=z,
        confidence=confidence(z),
        passed=passed,
    )


def cumulative_trace(
    h_list, threshold: float = THRESHOLD, z_pass: float = Z_PASS
) -> list[tuple[int, float, float, float]]:
    """Prefix rows (k, running mean, mean - 2*sigma, mean + 2*sigma), k = 2..n.

    The last row reproduces aggregate() of the full list."""
    h = np.asarray(h_list, dtype=float)
    if h.size < 2:
        raise StatsError("trace needs at least two circuits")
    rows = []
    for k in range(2, h.size + 1):
        # same summation path as aggregate(), so the final row matches exactly
        mean = float(h[:k].mean())
        s = binomial_sigma(mean, k)
        rows.append((k, mean, mean - 2.0 * s, mean + 2.0 * s))
    return rows


def first_durable_pass(trace, threshold: float = THRESHOLD) -> int | None:
    """Smallest k from which the lower band stays above the threshold."""
    good = None
    for k, _, lo, _ in trace:
        if lo > threshold:
            if good is None:
                good = k
        else:
            good = None
    return good


def write_trace_csv(trace, path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["k", "mean", "lo", "hi"])
        for k, mean, lo, hi in trace:
            w.writerow([k, f"{mean:.10f}", f"{lo:.10f}", f"{hi:.10f}"])


def stats_to_json(s: HopStats) -> dict:
    return {
        "n_c": s.n_c,
        "h_mean": s.h_mean,
        "sigma": s.sigma,
        "z": None if math.isinf(s.z) else s.z,
        "confidence": s.confidence,
        "passed": s.passed,
    }
