"""Shared estimator types: configuration, results, failure modes, regression helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

import numpy as np


class Method(str, Enum):
    RS = "rs"
    PERIODOGRAM = "periodogram"
    WHITTLE = "whittle"
    ABRY_VEITCH = "abry_veitch"


class DegenerateSeries(ValueError):
    """The input carries no usable variability for this estimator."""


class NoConvergence(RuntimeError):
    """The Whittle objective minimization did not isolate a minimum."""


# Out-of-range regression slopes are mapped into this open interval and
# flagged rather than raised, so benchmark grids can record wild
# short-series estimates instead of aborting.
H_CLAMP_LOW = 0.001
H_CLAMP_HIGH = 0.999


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning constants for the four estimators.

    pgram_low_fraction keeps the periodogram regression inside the
    low-frequency scaling region; wider cutoffs let spectral curvature
    beyond it flip the estimator's small-sample bias sign on exact fGn.
    """

    rs_min_block: int = 8
    rs_blocks_per_decade: int = 8
    pgram_low_fraction: float = 0.02
    whittle_tolerance: float = 1e-4
    whittle_spectrum_terms: int = 200
    wavelet_vanishing_moments: int = 3
    wavelet_min_scale: int = 3
    wavelet_min_coeffs: int = 8

    def __post_init__(self):
        if self.rs_min_block < 2:
            raise ValueError("rs_min_block must be at least 2")
        if self.rs_blocks_per_decade < 1:
            raise ValueError("rs_blocks_per_decade must be positive")
        if not 0.0 < self.pgram_low_fraction <= 1.0:
            raise ValueError("pgram_low_fraction must be in (0,1]")
        if self.whittle_tolerance <= 0.0:
            raise ValueError("whittle_tolerance must be positive")
        if self.whittle_spectrum_terms < 1:
            raise ValueError("whittle_spectrum_terms must be positive")
        if self.wavelet_vanishing_moments < 1:
            raise ValueError("wavelet_vanishing_moments must be positive")
        if self.wavelet_min_scale < 1:
            raise ValueError("wavelet_min_scale must be positive")
        if self.wavelet_min_coeffs < 2:
            raise ValueError("wavelet_min_coeffs must be at least 2")


DEFAULT_CONFIG = EstimatorConfig()


@dataclass(frozen=True)
class HurstEstimate:
    """An estimator's output: point value, method tag, optional CI, diagnostics."""

    value: float
    method: Method
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    diagnostics: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.value < 1.0:
            raise ValueError("estimate must lie in (0,1)")
        if (self.ci_low is None) != (self.ci_high is None):
            raise ValueError("confidence bounds must come as a pair")
        if self.ci_low is not None and not self.ci_low <= self.value <= self.ci_high:
            raise ValueError("confidence interval must bracket the estimate")


def clamp_hurst(raw: float) -> tuple[float, bool]:
    """Map a raw slope-derived H into (0.001, 0.999); report whether it moved."""
    clamped = min(max(raw, H_CLAMP_LOW), H_CLAMP_HIGH)
    return clamped, clamped != raw


def loglog_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Ordinary least-squares line fit; returns (slope, intercept, corr_coef)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise ValueError("regression abscissae are all identical")
    sxy = float(xc @ yc)
    syy = float(yc @ yc)
    slope = sxy / sxx
    intercept = float(y.mean() - slope * x.mean())
    corr = sxy / np.sqrt(sxx * syy) if syy > 0.0 else 1.0
    return slope, intercept, float(corr)
