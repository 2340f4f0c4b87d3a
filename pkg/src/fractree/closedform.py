"""Closed-form end-node displacements of a finite P-level tree.

Each flexibility term is a geometric series in one of the ratios ``a/16``,
``a/8``, ``u/4`` or ``v/4``.  Summed, the series have removable singularities
at ``a = 16``, ``a = 8`` (horizontal only), ``u = 4`` and ``v = 4``, so every
term dispatches on its :class:`CaseKey`.  Ratios within ``GUARD`` of a special
value but not equal to it raise :class:`IllConditioned`.

Horizontal values are reported positive outward: leftward for end nodes in
the left half, rightward in the right half.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import fractals
from .errors import IllConditioned, IndexOutOfRange
from .mechanics import Displacement
from .model import (
    TreeParams,
    end_node_position_horizontal,
    end_node_position_vertical,
    sigma,
)

GUARD = 1e-9

Kind = Literal["vertical", "horizontal"]


@dataclass(frozen=True, order=True)
class CaseKey:
    a_case: str  # "generic" | "a8" | "a16"
    u_case: str  # "generic" | "u4"
    v_case: str  # "generic" | "v4"

    def __str__(self):
        return f"{self.a_case}/{self.u_case}/{self.v_case}"


VERTICAL_CASES = tuple(
    CaseKey(a, u, v) for a in ("generic", "a16") for u in ("generic", "u4")
    for v in ("generic", "v4")
)
HORIZONTAL_CASES = tuple(
    CaseKey(a, u, v) for a in ("generic", "a8", "a16") for u in ("generic", "u4")
    for v in ("generic", "v4")
)


def _special(value: float, special: float, name: str) -> bool:
    if value == special:
        return True
    if abs(value - special) < GUARD:
        raise IllConditioned(
            f"{name}={value!r} is within {GUARD} of {special} but not equal to it"
        )
    return False


def case_key(params: TreeParams, kind: Kind = "vertical") -> CaseKey:
    if _special(params.a, 16.0, "a"):
        a_case = "a16"
    elif kind == "horizontal" and _special(params.a, 8.0, "a"):
        a_case = "a8"
    else:
        a_case = "generic"
    u_case = "u4" if _special(params.u, 4.0, "u") else "generic"
    v_case = "v4" if _special(params.v, 4.0, "v") else "generic"
    return CaseKey(a_case, u_case, v_case)


def _geometric(ratio: float, P: int) -> float:
    """``sum_{i=1..P} ratio**i`` for ratio != 1."""
    return (1 - ratio**P) / (1 / ratio - 1)


# -- vertical -------------------------------------------------------------------


def _vertical_bending(params: TreeParams, phi_value: float, a16: bool) -> float:
    c, L, E, I, a, P = params.c, params.L, params.E, params.I, params.a, params.P
    scale = c * c * L**3 / (E * I)
    if a16:
        return 5 * scale * P / 12 - scale * phi_value
    return 20 * scale / (3 * a) * _geometric(a / 16, P) - scale * phi_value


def vertical_bending_term(params: TreeParams, w: int) -> float:
    """Bending share of the downward displacement of end node w."""
    key = case_key(params, "vertical")
    z = end_node_position_vertical(w, params.P)
    r = 1.0 if key.a_case == "a16" else params.a / 16
    return _vertical_bending(params, fractals.phi(z, r, params.P), key.a_case == "a16")


def vertical_axial_term(params: TreeParams) -> float:
    s, L, E, A, u, P = params.s, params.L, params.E, params.A, params.u, params.P
    if _special(u, 4.0, "u"):
        return s * s * L * P / (2 * E * A)
    return 2 * s * s * L / (E * A * u) * _geometric(u / 4, P)


def vertical_shear_term(params: TreeParams) -> float:
    c, L, G, As, v, P = params.c, params.L, params.G, params.Astar, params.v, params.P
    if _special(v, 4.0, "v"):
        return c * c * L * P / (2 * G * As)
    return 2 * c * c * L / (G * As * v) * _geometric(v / 4, P)


def vertical_displacement(params: TreeParams, w: int) -> Displacement:
    """Downward displacement of end node w per unit total load."""
    return Displacement.from_parts(
        vertical_bending_term(params, w),
        vertical_axial_term(params),
        vertical_shear_term(params),
    )


# -- horizontal -----------------------------------------------------------------


def _horizontal_bending(params: TreeParams, C, a_case: str) -> float:
    """``C(t)`` returns the P-digit sum at ratio t for the node's abscissa."""
    c, s, L, E, I, a, P = (params.c, params.s, params.L, params.E, params.I,
                           params.a, params.P)
    scale = 4 * c * s * L**3 / (E * I)
    if a_case == "a8":
        inner = (5 / 24 * (1 - 2.0**-P) - 5 / 12 * C(0.5)
                 - P / 2.0 ** (P + 3) + C(1.0) / 2.0 ** (P + 2))
    elif a_case == "a16":
        inner = (5 * P / 48 - 5 / 24 * C(1.0) + (2.0**-P - 1) / 8
                 + C(2.0) / 2.0 ** (P + 3))
    else:
        r = a / 16
        inner = ((5 - 5 * r**P) / (48 - 3 * a) - 10 / (3 * a) * C(r)
                 - (2.0**-P - r**P) / (8 - a) + C(a / 8) / (2.0 ** (P - 1) * a))
    return scale * inner


def _horizontal_axial(params: TreeParams, C, u4: bool) -> float:
    c, s, L, E, A, u, P = (params.c, params.s, params.L, params.E, params.A,
                           params.u, params.P)
    if u4:
        return c * s * L / (2 * E * A) * (2 * C(1.0) - P)
    return 2 * c * s * L / (E * A * u) * (2 * C(u / 4) - _geometric(u / 4, P))


def _horizontal_shear(params: TreeParams, C, v4: bool) -> float:
    c, s, L, G, As, v, P = (params.c, params.s, params.L, params.G, params.Astar,
                            params.v, params.P)
    if v4:
        return c * s * L / (2 * G * As) * (P - 2 * C(1.0))
    return 2 * c * s * L / (G * As * v) * (_geometric(v / 4, P) - 2 * C(v / 4))


def _digit_sum(params: TreeParams, w: int):
    x = sigma(end_node_position_horizontal(w, params.P))
    P = params.P
    return lambda t: fractals.c_partial(x, t, P)


def horizontal_bending_term(params: TreeParams, w: int) -> float:
    key = case_key(params, "horizontal")
    return _horizontal_bending(params, _digit_sum(params, w), key.a_case)


def horizontal_axial_term(params: TreeParams, w: int) -> float:
    key = case_key(params, "horizontal")
    return _horizontal_axial(params, _digit_sum(params, w), key.u_case == "u4")


def horizontal_shear_term(params: TreeParams, w: int) -> float:
    key = case_key(params, "horizontal")
    return _horizontal_shear(params, _digit_sum(params, w), key.v_case == "v4")


def horizontal_displacement(params: TreeParams, w: int) -> Displacement:
    """Outward horizontal displacement of end node w per unit total load."""
    key = case_key(params, "horizontal")
    C = _digit_sum(params, w)
    return Displacement.from_parts(
        _horizontal_bending(params, C, key.a_case),
        _horizontal_axial(params, C, key.u_case == "u4"),
        _horizontal_shear(params, C, key.v_case == "v4"),
    )


def outward_sign(w: int, P: int) -> int:
    """-1 for left-half end nodes (outward = leftward), +1 for the right half."""
    return -1 if w <= 2 ** (P - 1) else 1


# -- intermediate levels --------------------------------------------------------


def displacement_at_level(params: TreeParams, i: int, n: int,
                          kind: Kind = "vertical") -> Displacement:
    """Displacement of node n on level i of the full tree.

    A level-i node carries the same load path as an end node of an i-level
    tree, so the end-node formulas apply with ``P = i`` and ``w = n``.
    """
    if not 1 <= i <= params.P:
        raise IndexOutOfRange(f"level {i} outside 1..{params.P}")
    if not 1 <= n <= 2**i:
        raise IndexOutOfRange(f"no node {n} on level {i}")
    sub = params.with_levels(i)
    if kind == "vertical":
        return vertical_displacement(sub, n)
    if kind == "horizontal":
        return horizontal_displacement(sub, n)
    raise ValueError(f"unknown kind {kind!r}")


# -- whole-level profiles ---------------------------------------------------------


@dataclass
class Profile:
    """All end nodes of one structure, as parallel arrays."""

    abscissae: np.ndarray
    total: np.ndarray
    bending: np.ndarray
    axial: np.ndarray
    shear: np.ndarray

    def __len__(self):
        return len(self.total)

    def at(self, w: int) -> Displacement:
        k = w - 1
        return Displacement(float(self.total[k]), float(self.bending[k]),
                            float(self.axial[k]), float(self.shear[k]))


def vertical_profile(params: TreeParams) -> Profile:
    """Vectorised :func:`vertical_displacement` over every end node."""
    P = params.P
    key = case_key(params, "vertical")
    N = 2**P
    # z(w) = (2w - 1) / 2**(P+1)
    nums = 2 * np.arange(1, N + 1, dtype=np.int64) - 1
    den = 2 * N
    r = 1.0 if key.a_case == "a16" else params.a / 16
    phis = fractals.phi_grid(nums, den, r, P)
    bending = _vertical_bending(params, phis, key.a_case == "a16")
    axial = np.full(N, vertical_axial_term(params))
    shear = np.full(N, vertical_shear_term(params))
    total = bending + axial + shear
    return Profile(nums / den, total, bending, axial, shear)


def horizontal_profile(params: TreeParams) -> Profile:
    """Vectorised :func:`horizontal_displacement` over every end node."""
    P = params.P
    key = case_key(params, "horizontal")
    N = 2**P
    den = N - 1
    nums = np.arange(N, dtype=np.int64)
    if den == 0:  # pragma: no cover - P >= 1 always gives den >= 1
        raise IndexOutOfRange("empty structure")
    sig_nums, _ = fractals.sigma_grid(nums, den)
    digit_rows = fractals.digit_table(sig_nums, den, P)

    def C(t):
        return (t ** np.arange(1, P + 1)) @ digit_rows

    bending = _horizontal_bending(params, C, key.a_case)
    axial = _horizontal_axial(params, C, key.u_case == "u4")
    shear = _horizontal_shear(params, C, key.v_case == "v4")
    bending, axial, shear = (np.broadcast_to(np.asarray(x, float), (N,)).copy()
                             for x in (bending, axial, shear))
    total = bending + axial + shear
    return Profile(nums / den, total, bending, axial, shear)


def profile(params: TreeParams, kind: Kind) -> Profile:
    if kind == "vertical":
        return vertical_profile(params)
    if kind == "horizontal":
        return horizontal_profile(params)
    raise ValueError(f"unknown kind {kind!r}")
