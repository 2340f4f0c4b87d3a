"""Tree parameters, node addressing, exact abscissae and digit primitives.

Positions are kept as :class:`fractions.Fraction` so that binary digits and
the sawtooth ``sigma`` can be read off with integer arithmetic at any depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import IndexOutOfRange, ValidationError

#: Exact abscissa in [0, 1].  ``numerator``/``denominator`` are always reduced.
ExactPos = Fraction

_POSITIVE_FIELDS = ("E", "G", "L", "I", "A", "Astar")
_RATIO_FIELDS = ("a", "u", "v")


@dataclass(frozen=True)
class TreeParams:
    """Full parameter vector of a P-level binary tree.

    ``theta`` is in radians.  ``I``, ``A`` and ``Astar`` are first-level
    section properties; level ``i`` divides them by ``a**(i-1)``,
    ``u**(i-1)`` and ``v**(i-1)`` respectively.
    """

    theta: float
    E: float
    G: float
    L: float
    I: float  # noqa: E741
    A: float
    Astar: float
    a: float
    u: float
    v: float
    P: int

    @property
    def c(self) -> float:
        # cos(pi/2) is 6e-17 in floating point; the formulas rely on an exact zero
        if self.theta == math.pi / 2:
            return 0.0
        return math.cos(self.theta)

    @property
    def s(self) -> float:
        return math.sin(self.theta)

    def length(self, i: int) -> float:
        return self.L * 2.0 ** (1 - i)

    def inertia(self, i: int) -> float:
        return self.I * self.a ** (1 - i)

    def area(self, i: int) -> float:
        return self.A * self.u ** (1 - i)

    def shear_area(self, i: int) -> float:
        return self.Astar * self.v ** (1 - i)

    def with_levels(self, P: int) -> "TreeParams":
        return replace(self, P=P)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_degrees(cls, theta_deg: float, **kw) -> "TreeParams":
        return cls(theta=math.radians(theta_deg), **kw)


#: Material and section values used for the figures of the original study.
FIGURE_PARAMS = dict(
    theta=math.radians(60.0),
    E=1e10,
    G=5e8,
    L=0.5,
    I=3.1416e-4,
    A=3.1416e-2,
    Astar=2.8274e-2,
    a=9.0,
    u=3.0,
    v=3.0,
)


def figure_params(P: int = 8, **overrides) -> TreeParams:
    kw = dict(FIGURE_PARAMS, P=P)
    kw.update(overrides)
    return TreeParams(**kw)


def validate(params: TreeParams | Mapping) -> TreeParams:
    """Check every constraint and return the params, or raise ValidationError.

    All violations are collected before raising, so the error lists each
    offending field once.
    """
    if isinstance(params, Mapping):
        known = {f.name for f in fields(TreeParams)}
        missing = known - set(params)
        if missing:
            raise ValidationError([("Missing", name) for name in sorted(missing)])
        params = TreeParams(**{k: params[k] for k in known})

    violations = []
    theta = params.theta
    if not (isinstance(theta, (int, float)) and 0.0 < theta <= math.pi / 2):
        violations.append(("AngleOutOfRange", "theta"))
    for name in _POSITIVE_FIELDS:
        value = getattr(params, name)
        if not (math.isfinite(value) and value > 0):
            violations.append(("NonPositive", name))
    for name in _RATIO_FIELDS:
        value = getattr(params, name)
        if not (math.isfinite(value) and value > 1):
            violations.append(("RatioNotAboveOne", name))
    P = params.P
    if isinstance(P, bool) or not isinstance(P, int) or P < 1:
        violations.append(("ZeroLevels", "P"))
    if violations:
        raise ValidationError(violations)
    return params


# -- node addressing --------------------------------------------------------


@dataclass(frozen=True, order=True)
class NodeRef:
    """Node ``index`` (1-based, left to right) on level ``level``."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 1 or not 1 <= self.index <= 2**self.level:
            raise IndexOutOfRange(f"no node {self.index} on level {self.level}")

    @property
    def parent(self) -> "NodeRef | None":
        if self.level == 1:
            return None
        return NodeRef(self.level - 1, (self.index + 1) // 2)

    def mirror(self) -> "NodeRef":
        return NodeRef(self.level, 2**self.level + 1 - self.index)

    def path_signs(self) -> list[int]:
        """Lean of each bar from the base to this node: -1 left, +1 right."""
        bits = self.index - 1
        return [
            1 if (bits >> (self.level - k)) & 1 else -1
            for k in range(1, self.level + 1)
        ]


def iter_nodes(P: int) -> Iterator[NodeRef]:
    for i in range(1, P + 1):
        for n in range(1, 2**i + 1):
            yield NodeRef(i, n)


def end_nodes(P: int) -> list[NodeRef]:
    return [NodeRef(P, w) for w in range(1, 2**P + 1)]


def _check_end_node(w: int, P: int) -> None:
    if P < 1 or not 1 <= w <= 2**P:
        raise IndexOutOfRange(f"end node {w} does not exist for P={P}")


# -- exact positions and digits ---------------------------------------------


def as_exact(x) -> Fraction:
    """Exact rational image of ``x`` (floats are converted bit-exactly)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def sigma(x):
    """Distance from ``x >= 0`` to the nearest integer.

    Exact for Fraction/int input, float otherwise.
    """
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        frac = x - (x.numerator // x.denominator)
        return min(frac, 1 - frac)
    frac = x - math.floor(x)
    return min(frac, 1.0 - frac)


def dyadic_digit(x, k: int) -> int:
    """k-th binary digit (k >= 1) of the fractional part of ``x``.

    Dyadic rationals use the terminating expansion, so ``1/2 -> 1, 0, 0, ...``
    and ``1 -> 0, 0, ...``.
    """
    if k < 1:
        raise ValueError("digit index starts at 1")
    x = as_exact(x)
    return ((x.numerator << k) // x.denominator) & 1


def digits(x, n: int) -> list[int]:
    """First ``n`` canonical binary digits of the fractional part of ``x``."""
    x = as_exact(x)
    if n <= 0:
        return []
    block = ((x.numerator << n) // x.denominator) & ((1 << n) - 1)
    return [(block >> (n - k)) & 1 for k in range(1, n + 1)]


def sigma_doublings(x, n: int) -> list[float]:
    """``[sigma(2**k * x) for k in range(n)]`` by exact integer doubling."""
    x = as_exact(x)
    q = x.denominator
    p = x.numerator % q
    out = []
    for _ in range(n):
        out.append(min(p, q - p) / q)
        p = (2 * p) % q
    return out


def end_node_position_vertical(w: int, P: int) -> Fraction:
    """Abscissa of end node ``w`` with the end nodes centred in their cells."""
    _check_end_node(w, P)
    N = 2**P
    return Fraction(w - 1, N - 1) * (1 - Fraction(1, N)) + Fraction(1, 2 * N)


def end_node_position_horizontal(w: int, P: int) -> Fraction:
    """Abscissa of end node ``w`` with node 1 at 0 and node 2**P at 1."""
    _check_end_node(w, P)
    return Fraction(w - 1, 2**P - 1)


def node_coordinates(params: TreeParams, node: NodeRef) -> tuple[float, float]:
    """Undeformed position of ``node`` with the base of the tree at the origin.

    The two level-1 bars leave the base at +/-theta; every further bar halves
    in length and forks the same way.
    """
    c, s = params.c, params.s
    x = 0.0
    y = 0.0
    for k, sign in enumerate(node.path_signs(), start=1):
        Lk = params.length(k)
        x += sign * c * Lk
        y += s * Lk
    return x, y
