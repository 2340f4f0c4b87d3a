"""Analytic fractal dimensions and box-counting estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DegenerateScales, OutOfRange, TooFewSamples
from .fractals import CurveSamples

MIN_GRAPH_SAMPLES = 2**16
DEFAULT_SCALES = tuple(2.0**-k for k in range(4, 13))


@dataclass
class DimensionReport:
    analytic: float | None = None
    empirical: float | None = None
    ci_halfwidth: float | None = None
    scales_used: list[float] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "analytic": self.analytic,
            "empirical": self.empirical,
            "ci_halfwidth": self.ci_halfwidth,
            "scales_used": list(self.scales_used),
            "counts": list(self.counts),
        }


def takagi_dimension(a: float) -> float:
    """Box dimension of the Takagi graph with ratio a/16: ``log2(a/4)``."""
    if not 1 < a < 16:
        raise OutOfRange(f"a={a} outside (1, 16)")
    return math.log(a / 4) / math.log(2)


def cantor_inverse_dimension(t: float) -> float:
    """``-log 2 / log t`` for the digit sum with ratio t."""
    if not 0 < t < 1:
        raise OutOfRange(f"t={t} outside (0, 1)")
    return -math.log(2) / math.log(t)


def dimension_relation(a: float) -> float:
    """``D_psi(a) + 1 / D_C(a/16)``; identically 2 on (1, 16)."""
    return takagi_dimension(a) + 1 / cantor_inverse_dimension(a / 16)


def _check_scales(scales) -> np.ndarray:
    eps = np.asarray(sorted(scales, reverse=True), dtype=float)
    if len(eps) < 4 or np.any(eps <= 0) or np.any(eps > 1):
        raise DegenerateScales("need at least four box sizes in (0, 1]")
    if math.log10(eps[0] / eps[-1]) < 2:
        raise DegenerateScales("box sizes must span at least two decades")
    return eps


def _fit(eps: np.ndarray, counts: np.ndarray) -> tuple[float, float]:
    x = np.log(1 / eps)
    y = np.log(counts)
    fit = stats.linregress(x, y)
    halfwidth = stats.t.ppf(0.975, len(x) - 2) * fit.stderr
    return float(fit.slope), float(halfwidth)


def _unit(v: np.ndarray) -> np.ndarray:
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


def box_count_graph(samples: CurveSamples, scales=DEFAULT_SCALES,
                    analytic: float | None = None) -> DimensionReport:
    """Box-counting dimension of the graph of a sampled function.

    The graph is rescaled to the unit square.  In each column of width eps
    the curve is taken to cover the vertical span of its samples, extended to
    the first sample of the next column so the polyline stays connected.
    """
    n = len(samples)
    if n < MIN_GRAPH_SAMPLES:
        raise TooFewSamples(f"{n} samples; need at least {MIN_GRAPH_SAMPLES}")
    eps = _check_scales(scales)
    x = _unit(samples.abscissae)
    y = _unit(samples.values)

    counts = []
    for e in eps:
        ncol = int(round(1 / e))
        col = np.minimum((x * ncol).astype(np.int64), ncol - 1)
        lo = np.full(ncol, np.inf)
        hi = np.full(ncol, -np.inf)
        np.minimum.at(lo, col, y)
        np.maximum.at(hi, col, y)
        # join each column to the first sample to its right
        starts = np.flatnonzero(np.diff(col)) + 1
        nxt = col[starts - 1]
        np.minimum.at(lo, nxt, y[starts])
        np.maximum.at(hi, nxt, y[starts])
        filled = np.isfinite(lo)
        boxes = np.floor(hi[filled] / e) - np.floor(lo[filled] / e) + 1
        counts.append(int(boxes.sum()))
    slope, half = _fit(eps, np.asarray(counts, float))
    return DimensionReport(analytic, slope, half, list(map(float, eps)), counts)


def box_count_image(values, scales=DEFAULT_SCALES,
                    analytic: float | None = None) -> DimensionReport:
    """Box-counting dimension of a set of reals (e.g. the values of C_t)."""
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        raise TooFewSamples("need at least two values")
    eps = _check_scales(scales)
    v = _unit(v)
    counts = [len(np.unique(np.floor(v / e))) for e in eps]
    slope, half = _fit(eps, np.asarray(counts, float))
    return DimensionReport(analytic, slope, half, list(map(float, eps)), counts)
