"""Curves, paired differences, and SINR distribution statistics from trial results."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DegenerateDistributionError, UsageError


@dataclass(frozen=True)
class CurvePoint:
    x: int
    mean_sum_rate: float
    std_err: float
    n_trials: int


@dataclass(frozen=True)
class PairedPoint:
    num_cellular: int
    num_d2d: int
    mean_diff: float
    std_err: float
    n_trials: int


@dataclass(frozen=True)
class PdfEstimate:
    bin_edges: np.ndarray
    densities: np.ndarray
    n_samples: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def integral(self) -> float:
        return float(np.sum(self.densities * self.widths))


def mean_and_std_err(values) -> tuple:
    """Sample mean and sigma/sqrt(n) with the unbiased sigma; one value -> zero error."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise UsageError("cannot aggregate an empty selection")
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


def _trials(results) -> Iterable:
    return getattr(results, "trials", results)


def aggregate_curve(results, allocator: str, num_cellular=None) -> list:
    """Mean sum rate and its standard error per number of D2D pairs."""
    groups = defaultdict(list)
    for t in _trials(results):
        if t.allocator == allocator and (num_cellular is None or t.num_cellular == num_cellular):
            groups[t.num_d2d].append(t.sum_rate)
    if not groups:
        raise UsageError(f"no trials for allocator {allocator!r}")
    points = []
    for x in sorted(groups):
        mean, se = mean_and_std_err(groups[x])
        points.append(CurvePoint(x=x, mean_sum_rate=mean, std_err=se, n_trials=len(groups[x])))
    return points


def paired_differences(results, first: str, second: str) -> list:
    """Per (C, D): mean and standard error of ``first - second`` over shared seeds."""
    by_key = defaultdict(dict)
    for t in _trials(results):
        if t.allocator in (first, second):
            by_key[t.num_cellular, t.num_d2d, t.seed][t.allocator] = t.sum_rate
    diffs = defaultdict(list)
    for (c, d, _), rates in sorted(by_key.items()):
        if first in rates and second in rates:
            diffs[c, d].append(rates[first] - rates[second])
    if not diffs:
        raise UsageError(f"no paired trials for {first!r} and {second!r}")
    out = []
    for (c, d), values in sorted(diffs.items()):
        mean, se = mean_and_std_err(values)
        out.append(PairedPoint(c, d, mean, se, len(values)))
    return out


def sinr_pdf(samples_db, num_bins: int = 30) -> PdfEstimate:
    """Equal-width histogram over the sample range, normalized to unit area.

    A zero-width range is widened by 0.5 dB on both sides.
    """
    x = np.asarray(samples_db, dtype=float)
    if x.size < 2:
        raise UsageError(f"need at least 2 samples, got {x.size}")
    if num_bins < 1:
        raise UsageError(f"num_bins={num_bins} violates num_bins >= 1")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    densities, edges = np.histogram(x, bins=num_bins, range=(lo, hi), density=True)
    return PdfEstimate(bin_edges=edges, densities=densities, n_samples=int(x.size))


def skewness(samples) -> float:
    """Fisher-Pearson coefficient m3 / m2**1.5 with population central moments."""
    x = np.asarray(samples, dtype=float)
    if x.size < 3:
        raise UsageError(f"need at least 3 samples, got {x.size}")
    dev = x - x.mean()
    m2 = np.mean(dev**2)
    # All-equal samples can leave rounding residue in dev.
    if m2 <= (8 * np.finfo(float).eps * np.abs(x).max()) ** 2:
        raise DegenerateDistributionError("skewness is undefined for zero variance")
    m3 = np.mean(dev**3)
    return float(m3 / m2**1.5)
