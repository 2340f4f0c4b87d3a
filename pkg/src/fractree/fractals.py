"""Exponential Takagi functions, digit-weighted sums and the beta-Cantor pair.

Scalar entry points take exact abscissae (``Fraction``/``int``; floats are
converted bit-exactly) so that ``sigma(2**k x)`` and the binary digits of ``x``
are computed by integer doubling rather than by repeated float scaling.  The
``*_grid`` helpers do the same for many abscissae at once with int64 numpy
arrays, which is what the curve sampler and box counter use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DepthExceeded, RatioOutOfRange
from .model import digits, sigma_doublings

MAX_DEPTH = 10**6
_INT64_SAFE = 1 << 62


@dataclass
class CurveSamples:
    """Ordered ``(abscissa, value)`` table with a free-form ``meta`` dict."""

    abscissae: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissae = np.asarray(self.abscissae, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.abscissae.shape != self.values.shape:
            raise ValueError("abscissae and values differ in length")
        if np.any(np.diff(self.abscissae) <= 0):
            raise ValueError("abscissae must be strictly increasing")

    def __len__(self):
        return len(self.abscissae)


# -- depth selection ----------------------------------------------------------


def _depth_for(ratio: float, tol: float, lead: float) -> int:
    """Smallest n with ``lead * ratio**n / (1 - ratio) <= tol``."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if lead <= tol * (1 - ratio):
        return 0
    n = math.ceil(math.log(tol * (1 - ratio) / lead) / math.log(ratio))
    n = max(n, 0)
    # guard against log rounding
    while lead * ratio**n / (1 - ratio) > tol:
        n += 1
    if n > MAX_DEPTH:
        raise DepthExceeded(f"ratio {ratio} needs {n} terms for tol {tol}")
    return n


def takagi_depth(r: float, tol: float) -> int:
    """Number of terms after which the Takagi tail is below ``tol``."""
    _check_ratio(r, "r")
    return _depth_for(r, tol, 0.5)


def c_depth(t: float, tol: float) -> int:
    """Truncation depth P with ``t**(P+1)/(1-t) <= tol``."""
    _check_ratio(t, "t")
    return _depth_for(t, tol, t)


def _check_ratio(r: float, name: str) -> None:
    if not 0 < r < 1:
        raise RatioOutOfRange(f"{name}={r} outside (0, 1): series diverges")


# -- scalar functions -------------------------------------------------------


def phi(z, r: float, P: int) -> float:
    """P-term partial sum ``sum_{i=1..P} r**(i-1) * sigma(2**(i-1) z)``."""
    sig = sigma_doublings(z, P)
    return math.fsum(r**k * s for k, s in enumerate(sig))


def takagi(z, r: float, tol: float = 1e-14) -> float:
    """Exponential Takagi function, accurate to ``tol`` in absolute terms."""
    return phi(z, r, max(takagi_depth(r, tol), 1))


def c_partial(x, t: float, P: int) -> float:
    """``sum_{k=1..P} rho_k(x) t**k`` over the canonical digits of ``x``."""
    return math.fsum(t**k for k, d in enumerate(digits(x, P), start=1) if d)


def c_limit(x, t: float, tol: float = 1e-14) -> float:
    """Infinite digit sum ``C_t(x)`` truncated once the tail is below ``tol``.

    Integers (``x = 0`` or ``1``) have no nonzero fractional digits, so both
    endpoints map to 0.
    """
    return c_partial(x, t, c_depth(t, tol))


def beta_cantor_inverse(y, beta: float, tol: float = 1e-15) -> float:
    """Inverse beta-Cantor function, read off the binary digits of ``y``.

    Returns ``(1+beta)/(1-beta) * sum_k alpha_k ((1-beta)/2)**k``.
    """
    if not 0 < beta < 1:
        raise RatioOutOfRange(f"beta={beta} outside (0, 1)")
    t = (1 - beta) / 2
    scale = (1 + beta) / (1 - beta)
    n = c_depth(t, tol / scale)
    weights = [t**k for k, d in enumerate(digits(y, n), start=1) if d]
    return scale * math.fsum(weights)


def beta_cantor(point_digits: Iterable[int], beta: float | None = None) -> float:
    """beta-Cantor function at the point of the beta-Cantor set coded by ``point_digits``.

    The value is independent of ``beta``: ``sum_k alpha_k / 2**k``.
    """
    # The coded point is (1+beta)/(1-beta) * sum alpha_k t**k; f_beta maps it
    # to the dyadic number with the same digit string.
    total = Fraction(0)
    for k, d in enumerate(point_digits, start=1):
        if d not in (0, 1):
            raise ValueError("digits must be 0 or 1")
        if d:
            total += Fraction(1, 2**k)
    return float(total)


def beta_cantor_point(point_digits: Sequence[int], beta: float) -> float:
    """Location in the beta-Cantor set coded by ``point_digits``."""
    t = (1 - beta) / 2
    return (1 + beta) / (1 - beta) * math.fsum(
        t**k for k, d in enumerate(point_digits, start=1) if d
    )


# -- grid helpers -------------------------------------------------------------


def _orbit(nums: np.ndarray, den: int, n: int) -> np.ndarray:
    """Residues ``nums * 2**k mod den`` for k = 0..n-1, shape (n, len(nums))."""
    out = np.empty((n, len(nums)), dtype=np.int64)
    p = np.mod(nums.astype(np.int64), den)
    for k in range(n):
        out[k] = p
        p = np.mod(2 * p, den)
    return out


def _as_grid(nums, den: int) -> np.ndarray:
    if den >= _INT64_SAFE:
        raise OverflowError("grid denominator too large for int64 doubling")
    return np.asarray(nums, dtype=np.int64)


def sigma_table(nums, den: int, n: int) -> np.ndarray:
    """``sigma(2**k * num/den)`` for k < n, shape (n, len(nums))."""
    res = _orbit(_as_grid(nums, den), den, n)
    return np.minimum(res, den - res) / den


def digit_table(nums, den: int, n: int) -> np.ndarray:
    """Canonical binary digits 1..n of ``num/den`` (mod 1), shape (n, len(nums))."""
    res = _orbit(_as_grid(nums, den), den, n)
    return (2 * res >= den).astype(np.int8)


def phi_grid(nums, den: int, r: float, P: int) -> np.ndarray:
    sig = sigma_table(nums, den, P)
    weights = r ** np.arange(P)
    return weights @ sig


def takagi_grid(nums, den: int, r: float, tol: float = 1e-14) -> np.ndarray:
    return phi_grid(nums, den, r, max(takagi_depth(r, tol), 1))


def c_partial_grid(nums, den: int, t: float, P: int) -> np.ndarray:
    if P == 0:
        return np.zeros(len(np.atleast_1d(nums)))
    dig = digit_table(nums, den, P)
    weights = t ** np.arange(1, P + 1)
    return weights @ dig


def c_limit_grid(nums, den: int, t: float, tol: float = 1e-14) -> np.ndarray:
    return c_partial_grid(nums, den, t, c_depth(t, tol))


def sigma_grid(nums, den: int) -> tuple[np.ndarray, int]:
    """Numerators of ``sigma(num/den)`` over the same denominator."""
    p = np.mod(_as_grid(nums, den), den)
    return np.minimum(p, den - p), den


# -- sampling -----------------------------------------------------------------

_UNIFORM_KINDS = ("takagi_partial", "takagi_limit", "c_partial", "c_limit",
                  "vertical_limit", "horizontal_limit")
_ITERATION_KINDS = ("vertical_iteration", "horizontal_iteration")
CURVE_KINDS = _UNIFORM_KINDS + _ITERATION_KINDS


def uniform_grid(n: int) -> list[Fraction]:
    """``n`` exact abscissae ``k/(n-1)`` covering [0, 1]."""
    if n < 2:
        raise ValueError("need at least two samples")
    return [Fraction(k, n - 1) for k in range(n)]


def sample_curve(kind: str, n: int = 1025, *, r: float | None = None,
                 t: float | None = None, P: int | None = None,
                 tree=None, level: int | None = None,
                 tol: float = 1e-12, regime: str | None = None) -> CurveSamples:
    """Tabulate one of the curves in ``CURVE_KINDS``.

    Uniform kinds use ``n`` exact abscissae ``k/(n-1)``; the iteration kinds
    ignore ``n`` and use the ``2**level`` node abscissae of ``tree``.  The
    digit-sum kinds report their left limit at ``x = 1``.
    """
    if kind not in CURVE_KINDS:
        raise ValueError(f"unknown curve kind {kind!r}")
    meta = {"kind": kind}

    if kind in _ITERATION_KINDS:
        from . import closedform

        if tree is None or level is None:
            raise ValueError(f"{kind} needs tree and level")
        sub = tree.with_levels(level)
        if kind == "vertical_iteration":
            prof = closedform.vertical_profile(sub)
        else:
            prof = closedform.horizontal_profile(sub)
        meta.update(level=level, **_tree_meta(tree))
        return CurveSamples(prof.abscissae, prof.total, meta)

    if n < 2:
        raise ValueError("need at least two samples")
    den = n - 1
    nums = np.arange(n, dtype=np.int64)
    xs = nums / den

    if kind in ("takagi_partial", "takagi_limit"):
        if r is None:
            raise ValueError(f"{kind} needs r")
        meta["r"] = r
        if kind == "takagi_partial":
            if P is None:
                raise ValueError("takagi_partial needs P")
            meta["P"] = P
            values = phi_grid(nums, den, r, P)
        else:
            values = takagi_grid(nums, den, r, tol)
        return CurveSamples(xs, values, meta)

    if kind in ("c_partial", "c_limit"):
        if t is None:
            raise ValueError(f"{kind} needs t")
        meta["t"] = t
        if kind == "c_partial":
            if P is None:
                raise ValueError("c_partial needs P")
            meta["P"] = P
            values = c_partial_grid(nums, den, t, P)
            top = math.fsum(t**k for k in range(1, P + 1))
        else:
            _check_ratio(t, "t")
            values = c_limit_grid(nums, den, t, tol)
            top = t / (1 - t)
        # x = 1 has no fractional digits (C = 0); a plotted staircase ends at
        # its left limit instead
        values[-1] = top
        return CurveSamples(xs, values, meta)

    from . import limits

    if tree is None:
        raise ValueError(f"{kind} needs tree parameters")
    meta.update(_tree_meta(tree))
    if kind == "vertical_limit":
        values = limits.vertical_limit_grid(tree, nums, den, tol)
    else:
        meta["regime"] = regime
        values = limits.horizontal_limit_grid(tree, nums, den, tol, regime=regime)
    return CurveSamples(xs, values, meta)


def _tree_meta(tree) -> dict:
    return {"a": tree.a, "u": tree.u, "v": tree.v}
