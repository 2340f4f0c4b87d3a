"""Randomised cross-checks: closed forms vs direct PVW vs frame stiffness."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from . import closedform, mechanics
from .closedform import HORIZONTAL_CASES, VERTICAL_CASES, CaseKey
from .model import FIGURE_PARAMS, NodeRef, TreeParams

PVW_TOL = 1e-12
STIFFNESS_TOL = 1e-9

Formula = Callable[[TreeParams], closedform.Profile]


def worker_count() -> int:
    env = os.environ.get("FRACTREE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _pick_ratio(rng, case: str, special: float, hi: float) -> float:
    if case != "generic":
        return special
    while True:
        x = float(rng.uniform(1.0, hi))
        if min(abs(x - 8.0), abs(x - 16.0), abs(x - 4.0)) > 1e-6:
            return x


def draw_params(rng: np.random.Generator, key: CaseKey, p_min: int, p_max: int) -> TreeParams:
    a = {"generic": None, "a8": 8.0, "a16": 16.0}[key.a_case]
    if a is None:
        a = _pick_ratio(rng, "generic", 0.0, 16.0)
    u = _pick_ratio(rng, key.u_case, 4.0, 4.0)
    v = _pick_ratio(rng, key.v_case, 4.0, 4.0)
    # material and section properties scatter by up to 2x around the figure
    # values; the solid-section ratio A L^2 / I stays O(10) as in practice
    jitter = lambda: float(2.0 ** rng.uniform(-1, 1))  # noqa: E731
    fig = FIGURE_PARAMS
    E = fig["E"] * jitter()
    A = fig["A"] * jitter()
    return TreeParams(
        theta=math.radians(float(rng.uniform(10, 80))),
        E=E,
        G=E / float(rng.uniform(2.5, 40)),
        L=fig["L"] * jitter(),
        I=fig["I"] * jitter(),
        A=A,
        Astar=A * float(rng.uniform(0.7, 0.95)),
        a=a,
        u=u,
        v=v,
        P=int(rng.integers(p_min, p_max + 1)),
    )


def _rel(diff: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.max(np.abs(ref)))
    return float(np.max(np.abs(diff))) / scale if scale else float(np.max(np.abs(diff)))


def check_structure(params: TreeParams, kind: str, formula: Formula | None = None,
                    stiffness: bool = True) -> tuple[float, float | None]:
    """Worst relative error of the closed form against both oracles.

    Errors are normalised by the largest oracle value over the end nodes.
    """
    if formula is None:
        formula = closedform.profile
        prof = formula(params, kind)
    else:
        prof = formula(params)
    P = params.P
    N = 2**P
    if kind == "vertical":
        pvw = np.array([mechanics.pvw_sum_vertical(params, w).total for w in range(1, N + 1)])
    else:
        signs = np.array([closedform.outward_sign(w, P) for w in range(1, N + 1)])
        pvw = signs * np.array(
            [mechanics.pvw_sum_horizontal(params, w).total for w in range(1, N + 1)])
    err_pvw = _rel(prof.total - pvw, pvw)
    if not stiffness:
        return err_pvw, None
    disp = mechanics.stiffness_solve(params)
    if kind == "vertical":
        frame = np.array([-disp[NodeRef(P, w)][1] for w in range(1, N + 1)])
    else:
        frame = signs * np.array([disp[NodeRef(P, w)][0] for w in range(1, N + 1)])
    return err_pvw, _rel(prof.total - frame, frame)


def _run_case(seed: int, index: int, kind: str, key: CaseKey, draws: int,
              p_min: int, p_max: int, formula, stiffness: bool) -> dict:
    rng = np.random.default_rng([seed, index])
    worst_pvw = 0.0
    worst_frame = 0.0
    for _ in range(draws):
        params = draw_params(rng, key, p_min, p_max)
        e_pvw, e_frame = check_structure(params, kind, formula, stiffness)
        worst_pvw = max(worst_pvw, e_pvw)
        if e_frame is not None:
            worst_frame = max(worst_frame, e_frame)
    passed = worst_pvw <= PVW_TOL and (not stiffness or worst_frame <= STIFFNESS_TOL)
    return {
        "kind": kind,
        "case": str(key),
        "max_rel_pvw": worst_pvw,
        "max_rel_stiffness": worst_frame if stiffness else None,
        "passed": passed,
    }


def run_verification(seed: int = 42, draws: int = 50, p_min: int = 1, p_max: int = 10,
                     stiffness: bool = True,
                     formulas: dict[str, Formula] | None = None,
                     threads: int | None = None) -> dict:
    """Oracle triangle over all 20 case keys; deterministic for a given seed."""
    formulas = formulas or {}
    jobs = [("vertical", k) for k in VERTICAL_CASES] + [("horizontal", k) for k in HORIZONTAL_CASES]
    threads = threads or worker_count()

    def run(item):
        index, (kind, key) = item
        return _run_case(seed, index, kind, key, draws, p_min, p_max,
                         formulas.get(kind), stiffness)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        cases = list(pool.map(run, enumerate(jobs)))
    return {
        "seed": seed,
        "draws": draws,
        "P_range": [p_min, p_max],
        "tolerances": {"pvw": PVW_TOL, "stiffness": STIFFNESS_TOL},
        "cases": cases,
        "failed": [f"{c['kind']}:{c['case']}" for c in cases if not c["passed"]],
        "passed": all(c["passed"] for c in cases),
    }
