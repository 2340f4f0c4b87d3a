"""Infinite-level displacements, divergence classification and tail bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from . import fractals
from .errors import DivergentParameters, InvalidCancellation
from .model import TreeParams, as_exact, sigma

DEFAULT_TOL = 1e-12

Regime = Literal["bending_axial", "axial_shear"]
REGIMES = ("bending_axial", "axial_shear")

_REL = 1e-12


@dataclass(frozen=True)
class Classification:
    convergent: bool
    reasons: tuple[str, ...] = ()

    @property
    def status(self) -> str:
        return "convergent" if self.convergent else "divergent"


@dataclass
class LimitResult:
    """Outcome of a P -> infinity evaluation.

    ``value`` is set iff the series converge; ``reasons`` names the offending
    ratios otherwise.  ``tail_bound_at(P)`` bounds the distance between the
    P-level value and the limit.
    """

    status: str
    value: float | None = None
    reasons: tuple[str, ...] = ()
    tail_bound_at: Callable[[int], float] | None = field(default=None, repr=False)

    @property
    def convergent(self) -> bool:
        return self.status == "convergent"

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.convergent:
            out["value"] = self.value
        else:
            out["reasons"] = list(self.reasons)
        return out


def classify(a: float, u: float, v: float) -> Classification:
    """Convergent iff a < 16, u < 4 and v < 4."""
    reasons = tuple(name for name, val, lim in (("a", a, 16), ("u", u, 4), ("v", v, 4))
                    if val >= lim)
    return Classification(not reasons, reasons)


def _divergent(reasons) -> LimitResult:
    return LimitResult("divergent", None, tuple(reasons))


# -- tail bounds ------------------------------------------------------------------


def _geo_tail(ratio: float, P: int) -> float:
    """``sum_{i>P} ratio**i``."""
    return ratio ** (P + 1) / (1 - ratio)


def _transient_majorant(a: float, P: int) -> float:
    """Nonincreasing majorant of ``2**(1-P) * sum_{i<=P} (a/8)**i``."""
    q = a / 8
    if q == 1:
        return 2.0 ** (1 - P) * P
    if q < 1:
        return 2.0 ** (1 - P) * q / (1 - q)
    return 2 * q / (q - 1) * (a / 16) ** P


def tail_bound(kind: str, params: TreeParams, P: int | None = None) -> float:
    """Upper bound on |value at P levels - limit| at a common abscissa.

    Every series term is majorised with ``sigma <= 1/2`` and digits <= 1.
    """
    P = params.P if P is None else P
    cls = classify(params.a, params.u, params.v)
    if not cls.convergent:
        raise DivergentParameters(f"divergent in {', '.join(cls.reasons)}")
    c, s, L, E, G = params.c, params.s, params.L, params.E, params.G
    I, A, As, a, u, v = params.I, params.A, params.Astar, params.a, params.u, params.v
    r, q, p = a / 16, u / 4, v / 4
    if kind == "vertical":
        bend = c * c * L**3 / (E * I)
        return (bend * 0.5 * r**P / (1 - r)
                + 20 * bend / (3 * a) * _geo_tail(r, P)
                + 2 * s * s * L / (E * A * u) * _geo_tail(q, P)
                + 2 * c * c * L / (G * As * v) * _geo_tail(p, P))
    if kind == "horizontal":
        return 2 * abs(c * s) * L * (
            10 * L**2 / (3 * E * I * a) * _geo_tail(r, P)
            + L**2 / (E * I * a) * _transient_majorant(a, P)
            + 1 / (E * A * u) * _geo_tail(q, P)
            + 1 / (G * As * v) * _geo_tail(p, P))
    raise ValueError(f"unknown kind {kind!r}")


# -- vertical limit -----------------------------------------------------------------


def _vertical_constants(params: TreeParams) -> tuple[float, float]:
    c, s, L, E, G = params.c, params.s, params.L, params.E, params.G
    I, A, As, a, u, v = params.I, params.A, params.Astar, params.a, params.u, params.v
    scale = c * c * L**3 / (E * I)
    const = (20 * scale / (3 * (16 - a)) + 2 * s * s * L / (E * A * (4 - u))
             + 2 * c * c * L / (G * As * (4 - v)))
    return const, scale


def _psi_tol(tol: float, scale: float) -> float:
    return tol / scale if scale > 0 else 1.0


def vertical_limit(params: TreeParams, z, tol: float = DEFAULT_TOL) -> LimitResult:
    """Downward end-node displacement of the infinite tree at abscissa ``z``."""
    cls = classify(params.a, params.u, params.v)
    if not cls.convergent:
        return _divergent(cls.reasons)
    const, scale = _vertical_constants(params)
    psi = fractals.takagi(as_exact(z), params.a / 16, _psi_tol(tol, scale))
    return LimitResult("convergent", const - scale * psi, (),
                       lambda P: tail_bound("vertical", params, P))


def vertical_limit_grid(params: TreeParams, nums, den: int,
                        tol: float = DEFAULT_TOL) -> np.ndarray:
    cls = classify(params.a, params.u, params.v)
    if not cls.convergent:
        raise DivergentParameters(f"divergent in {', '.join(cls.reasons)}")
    const, scale = _vertical_constants(params)
    psi = fractals.takagi_grid(nums, den, params.a / 16, _psi_tol(tol, scale))
    return const - scale * psi


# -- horizontal limit ---------------------------------------------------------------


def _close(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=_REL, abs_tol=0.0)


def check_regime(params: TreeParams, regime: Regime) -> None:
    """Raise InvalidCancellation unless the parameters satisfy ``regime``."""
    if regime == "bending_axial":
        ok = (_close(params.a, 4 * params.u)
              and _close(params.A, 6 * params.I / (5 * params.L**2)))
        need = "a = 4u and A = 6I/(5L^2)"
    elif regime == "axial_shear":
        ok = (_close(params.u, params.v)
              and _close(params.E * params.A * params.u, params.G * params.Astar * params.v))
        need = "u = v and E A u = G A* v"
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if not ok:
        raise InvalidCancellation(f"regime {regime} requires {need}")


def divergence_reasons(params: TreeParams, regime: Regime | None = None) -> tuple[str, ...]:
    """Ratios whose series diverge; a cancellation regime drops the cancelled ones."""
    if regime is None:
        return classify(params.a, params.u, params.v).reasons
    if regime == "bending_axial":
        return tuple(n for n, val, lim in (("a", params.a, 16), ("v", params.v, 4))
                     if val >= lim)
    return ("a",) if params.a >= 16 else ()


def _horizontal_terms(params: TreeParams, regime: Regime | None):
    """Constant part and ``[(coefficient, t), ...]`` multiplying ``C_t(sigma(z*))``."""
    c, s, L, E, G = params.c, params.s, params.L, params.E, params.G
    I, A, As, a, u, v = params.I, params.A, params.Astar, params.a, params.u, params.v
    k = 2 * c * s * L

    def bending():
        return (k * 10 * L**2 / (3 * E * I * (16 - a)),
                (-k * 20 * L**2 / (3 * E * I * a), a / 16))

    def shear():
        return k / (G * As * (4 - v)), (-k * 2 / (G * As * v), v / 4)

    if regime == "bending_axial":
        const, term = shear()
        return const, [term]
    bend_const, bend = bending()
    if regime == "axial_shear":
        return bend_const, [bend]
    shear_const, shear_term = shear()
    axial_const = -k / (E * A * (4 - u))
    axial = (k * 2 / (E * A * u), u / 4)
    return bend_const + axial_const + shear_const, [bend, axial, shear_term]


def horizontal_limit(params: TreeParams, zstar, tol: float = DEFAULT_TOL,
                     regime: Regime | None = None) -> LimitResult:
    """Outward end-node displacement of the infinite tree at abscissa ``zstar``.

    ``regime`` opts into one of the exact cancellations between flexibility
    terms (``"bending_axial"``: a = 4u with A = 6I/(5L^2); ``"axial_shear"``:
    u = v with EAu = GA*v).  The constraints are checked, never inferred.
    """
    if regime is not None:
        check_regime(params, regime)
    reasons = divergence_reasons(params, regime)
    if reasons:
        return _divergent(reasons)
    const, terms = _horizontal_terms(params, regime)
    x = sigma(as_exact(zstar))
    share = tol / max(len(terms), 1)
    parts = [const]
    for coef, t in terms:
        if coef == 0:
            continue
        parts.append(coef * fractals.c_limit(x, t, share / abs(coef)))
    value = math.fsum(parts)
    return LimitResult("convergent", value, (),
                       lambda P: tail_bound("horizontal", params, P))


def horizontal_limit_grid(params: TreeParams, nums, den: int,
                          tol: float = DEFAULT_TOL,
                          regime: Regime | None = None) -> np.ndarray:
    if regime is not None:
        check_regime(params, regime)
    reasons = divergence_reasons(params, regime)
    if reasons:
        raise DivergentParameters(f"divergent in {', '.join(reasons)}")
    const, terms = _horizontal_terms(params, regime)
    sig_nums, _ = fractals.sigma_grid(nums, den)
    share = tol / max(len(terms), 1)
    out = np.full(len(sig_nums), const, dtype=float)
    for coef, t in terms:
        if coef == 0:
            continue
        out += coef * fractals.c_limit_grid(sig_nums, den, t, share / abs(coef))
    return out
