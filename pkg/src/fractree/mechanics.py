"""Internal forces and two independent displacement oracles.

The per-level stress functions follow the unit-load bookkeeping of the
closed-form derivation (lever arms from ``sigma`` and binary digits).  The
oracles deliberately do not: :func:`pvw_sum_vertical` and
:func:`pvw_sum_horizontal` rebuild every internal force from plain vector
statics on the laid-out tree, and :func:`stiffness_solve` assembles and solves
a shear-deformable frame model.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import IndexOutOfRange, SingularSystem
from .model import (
    NodeRef,
    TreeParams,
    dyadic_digit,
    end_node_position_horizontal,
    end_node_position_vertical,
    iter_nodes,
    node_coordinates,
    sigma,
)


@dataclass(frozen=True)
class Displacement:
    """Displacement per unit load with its flexibility breakdown."""

    total: float
    bending: float
    axial: float
    shear: float

    @classmethod
    def from_parts(cls, bending: float, axial: float, shear: float) -> "Displacement":
        return cls(math.fsum((bending, axial, shear)), bending, axial, shear)

    def scaled(self, factor: float) -> "Displacement":
        return Displacement(self.total * factor, self.bending * factor,
                            self.axial * factor, self.shear * factor)


@dataclass(frozen=True)
class BarStressState:
    """Internal forces along one bar.

    The moment is affine in the arc position ``x`` measured from the bar's
    lower end: ``M(x) = moment0 + moment_slope * x``.  Axial and shear forces
    are constant.
    """

    length: float
    moment0: float
    moment_slope: float
    axial: float
    shear: float

    def bending(self, x):
        return self.moment0 + self.moment_slope * x


def integrate_moment_product(m: BarStressState, n: BarStressState) -> float:
    """Exact integral of ``m.bending(x) * n.bending(x)`` over the bar."""
    ell = m.length
    p0, p1 = m.moment0, m.moment_slope
    q0, q1 = n.moment0, n.moment_slope
    return p0 * q0 * ell + (p0 * q1 + p1 * q0) * ell**2 / 2 + p1 * q1 * ell**3 / 3


# -- stresses used by the closed-form derivation ------------------------------


def _check_level(params: TreeParams, i: int) -> None:
    if not 1 <= i <= params.P:
        raise IndexOutOfRange(f"level {i} outside 1..{params.P}")


def real_stresses(params: TreeParams, i: int) -> BarStressState:
    """Forces in any level-i bar under 1/2**P on every end node."""
    _check_level(params, i)
    c, s = params.c, params.s
    load = 2.0**-i
    Li = params.length(i)
    return BarStressState(Li, c * load * Li, -c * load, s * load, c * load)


def lever_arm_vertical(params: TreeParams, i: int, w: int) -> float:
    """Horizontal distance from the foot of the loaded level-i bar to end node w."""
    _check_level(params, i)
    z = end_node_position_vertical(w, params.P)
    sig = sigma(2 ** (i - 1) * z)
    return 4 * params.c * params.L * float(Fraction(1, 2**i) - sig / 2 ** (i - 1))


def virtual_stresses_vertical(params: TreeParams, i: int, w: int) -> BarStressState:
    """Forces in the loaded level-i bar for a unit downward load on end node w."""
    c, s = params.c, params.s
    Q = lever_arm_vertical(params, i, w)
    return BarStressState(params.length(i), Q, -c, s, c)


def lever_arm_horizontal(params: TreeParams, i: int, P: int | None = None) -> float:
    """Rise from the foot of the loaded level-i bar to the end nodes."""
    P = params.P if P is None else P
    if not 1 <= i <= P:
        raise IndexOutOfRange(f"level {i} outside 1..{P}")
    return params.s * params.L * (2.0 ** (2 - i) - 2.0 ** (1 - P))


def horizontal_sign(params: TreeParams, i: int, w: int) -> int:
    """``1 - 2*rho_i(sigma(z*(w)))``: +1 for a bar leaning outward."""
    x = sigma(end_node_position_horizontal(w, params.P))
    return 1 - 2 * dyadic_digit(x, i)


def virtual_stresses_horizontal(params: TreeParams, i: int, w: int) -> BarStressState:
    """Forces in the loaded level-i bar for a unit outward load on end node w.

    Uses the left-half convention; right-half nodes are handled through
    their mirror image, which is what taking ``sigma`` of the abscissa does.
    """
    _check_level(params, i)
    c, s = params.c, params.s
    sign = horizontal_sign(params, i, w)
    H = lever_arm_horizontal(params, i)
    return BarStressState(params.length(i), H * sign, -s * sign, -c * sign, s * sign)


# -- direct PVW summation from vector statics ---------------------------------


@lru_cache(maxsize=64)
def _subtree_resultants(params: TreeParams) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per level, total vertical load and moment about each node of its subtree.

    Built bottom-up from the end-node loads, so nothing assumes the load
    resultant passes through the node.
    """
    P = params.P
    c, s = params.c, params.s
    force = np.full(2**P, -(2.0**-P))
    moment = np.zeros(2**P)
    out = [None] * (P + 1)
    out[P] = (force, moment)
    for i in range(P - 1, 0, -1):
        d = c * params.length(i + 1)
        fl, fr = force[0::2], force[1::2]
        # child offset (dx, dy) crossed with (0, f) gives dx * f
        moment = moment[0::2] + moment[1::2] + (-d) * fl + d * fr
        force = fl + fr
        out[i] = (force, moment)
    return out


def _cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def _bar_state(length: float, ex: float, ey: float,
               fx: float, fy: float, m_top: float) -> BarStressState:
    """Internal forces from the load (fx, fy) and moment m_top acting above the bar.

    The moment about the section at arc position x is
    ``m_top + (length - x) * (e x f)``.
    """
    k = _cross(ex, ey, fx, fy)
    axial = fx * ex + fy * ey
    shear = -fx * ey + fy * ex
    return BarStressState(length, m_top + length * k, -k, axial, shear)


def _pvw(params: TreeParams, w: int, probe: tuple[float, float]) -> Displacement:
    P = params.P
    if not 1 <= w <= 2**P:
        raise IndexOutOfRange(f"end node {w} does not exist for P={P}")
    signs = NodeRef(P, w).path_signs()
    res = _subtree_resultants(params)
    c, s, E, G = params.c, params.s, params.E, params.G
    px, py = probe

    # offsets from each path node up to the loaded end node
    rel = [(0.0, 0.0)] * (P + 1)
    rx = ry = 0.0
    for k in range(P, 0, -1):
        rel[k] = (rx, ry)
        Lk = params.length(k)
        rx += signs[k - 1] * c * Lk
        ry += s * Lk

    bend, axial, shear = [], [], []
    idx = w - 1
    for i in range(1, P + 1):
        j = idx >> (P - i)
        Li = params.length(i)
        ex, ey = signs[i - 1] * c, s
        force, moment = res[i]
        real = _bar_state(Li, ex, ey, 0.0, float(force[j]), float(moment[j]))
        dx, dy = rel[i]
        virt = _bar_state(Li, ex, ey, px, py, _cross(dx, dy, px, py))
        bend.append(integrate_moment_product(virt, real) / (E * params.inertia(i)))
        axial.append(virt.axial * real.axial * Li / (E * params.area(i)))
        shear.append(virt.shear * real.shear * Li / (G * params.shear_area(i)))
    return Displacement.from_parts(math.fsum(bend), math.fsum(axial), math.fsum(shear))


def pvw_sum_vertical(params: TreeParams, w: int) -> Displacement:
    """Downward displacement of end node w by bar-by-bar virtual work."""
    return _pvw(params, w, (0.0, -1.0))


def pvw_sum_horizontal(params: TreeParams, w: int) -> Displacement:
    """Horizontal displacement of end node w, rightward positive."""
    return _pvw(params, w, (1.0, 0.0))


def loaded_bars(P: int, w: int) -> list[NodeRef]:
    """Bars carrying virtual stress for a probe on end node w (one per level)."""
    node = NodeRef(P, w)
    path = []
    while node is not None:
        path.append(node)
        node = node.parent
    return path[::-1]


# -- direct stiffness oracle ----------------------------------------------------


@dataclass
class FrameSolution:
    displacements: dict  # NodeRef -> (ux, uy)
    rotations: dict  # NodeRef -> rotation
    base_reaction: tuple[float, float, float]
    applied: tuple[float, float]


REFINE_STEPS = 4
_XP = np.longdouble  # working precision for element matrices and residuals


def _timoshenko_local(E, G, I, A, As, L):
    phi = 12 * E * I / (G * As * L**2)
    b = E * I / ((1 + phi) * L**3)
    a = E * A / L
    return np.array([
        [a, 0, 0, -a, 0, 0],
        [0, 12 * b, 6 * L * b, 0, -12 * b, 6 * L * b],
        [0, 6 * L * b, (4 + phi) * L**2 * b, 0, -6 * L * b, (2 - phi) * L**2 * b],
        [-a, 0, 0, a, 0, 0],
        [0, -12 * b, -6 * L * b, 0, 12 * b, -6 * L * b],
        [0, 6 * L * b, (2 - phi) * L**2 * b, 0, -6 * L * b, (4 + phi) * L**2 * b],
    ], dtype=_XP)


def _rotation(cx, cy):
    T = np.zeros((6, 6), dtype=_XP)
    R = np.array([[cx, cy, 0], [-cy, cx, 0], [0, 0, 1]], dtype=_XP)
    T[:3, :3] = R
    T[3:, 3:] = R
    return T


def solve_frame(params: TreeParams, extra_loads: dict | None = None) -> FrameSolution:
    """Linear solve of the tree as a rigid-jointed frame fixed at the base.

    Every bar is one shear-deformable (Timoshenko) element, which reproduces
    the bending, axial and shear flexibilities of a cantilever exactly.
    ``extra_loads`` maps NodeRef -> (fx, fy) on top of the end-node weights.

    Axial stiffness exceeds bending stiffness by orders of magnitude in the
    upper levels, so a plain float64 solve loses digits.  Element matrices and
    residuals are formed in extended precision and a float64 LU factorisation
    is reused for a few steps of iterative refinement.
    """
    if params.c < 1e-12:
        raise SingularSystem("theta = 90 deg puts sibling bars on top of each other")
    P = params.P
    nodes = list(iter_nodes(P))
    index = {node: k for k, node in enumerate(nodes)}
    coords = {node: node_coordinates(params, node) for node in nodes}
    ndof = 3 * len(nodes)

    rows, cols, vals = [], [], []
    base_rows = []  # stiffness rows of the base (for the reaction)
    E, G = _XP(params.E), _XP(params.G)
    for node in nodes:
        i = node.level
        parent = node.parent
        x1, y1 = coords[parent] if parent is not None else (0.0, 0.0)
        x2, y2 = coords[node]
        dx, dy = _XP(x2) - _XP(x1), _XP(y2) - _XP(y1)
        L = np.sqrt(dx * dx + dy * dy)
        k_local = _timoshenko_local(E, G, _XP(params.inertia(i)), _XP(params.area(i)),
                                    _XP(params.shear_area(i)), L)
        T = _rotation(dx / L, dy / L)
        k = T.T @ k_local @ T
        lo = None if parent is None else 3 * index[parent]
        hi = 3 * index[node]
        dofs = [lo + d if lo is not None else None for d in range(3)] + [hi + d for d in range(3)]
        for a_ in range(6):
            for b_ in range(6):
                ra, cb = dofs[a_], dofs[b_]
                if ra is None:
                    if cb is not None:
                        base_rows.append((a_, cb, k[a_, b_]))
                    continue
                if cb is None:
                    continue
                rows.append(ra)
                cols.append(cb)
                vals.append(k[a_, b_])

    K = sp.csr_matrix((np.array(vals, dtype=_XP), (rows, cols)), shape=(ndof, ndof))
    f = np.zeros(ndof, dtype=_XP)
    weight = _XP(2.0) ** -P
    for w in range(1, 2**P + 1):
        f[3 * index[NodeRef(P, w)] + 1] -= weight
    applied = [0.0, -1.0]
    for node, (fx, fy) in (extra_loads or {}).items():
        f[3 * index[node]] += fx
        f[3 * index[node] + 1] += fy
        applied[0] += fx
        applied[1] += fy

    try:
        lu = spla.splu(K.astype(np.float64).tocsc())
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from exc
    u = np.zeros(ndof, dtype=_XP)
    r = f
    for _ in range(REFINE_STEPS):
        du = lu.solve(np.asarray(r, dtype=np.float64))
        if not np.all(np.isfinite(du)):
            raise SingularSystem("frame stiffness matrix is singular")
        u = u + du.astype(_XP)
        r = f - K @ u

    # reaction at the base from the first-level element end forces
    reaction = np.zeros(3, dtype=_XP)
    for a_, col, val in base_rows:
        reaction[a_] += val * u[col]

    disp = {node: (float(u[3 * k]), float(u[3 * k + 1])) for node, k in index.items()}
    rot = {node: float(u[3 * k + 2]) for node, k in index.items()}
    return FrameSolution(disp, rot, tuple(float(x) for x in reaction), tuple(applied))


def stiffness_solve(params: TreeParams) -> dict:
    """Node displacements ``NodeRef -> (ux, uy)`` under the end-node weights."""
    return solve_frame(params).displacements
