"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a ``[PASS]`` / ``[FAIL]`` line that is repeated in the
terminal summary, then asserts.
"""

import dataclasses
import itertools
import math
import time
from fractions import Fraction

import numpy as np
from scipy import stats

from fractree import cli
from fractree import closedform as cf
from fractree import dimension as dm
from fractree import fractals, limits, verify
from fractree.mechanics import pvw_sum_horizontal, pvw_sum_vertical
from fractree.model import digits, figure_params, sigma

from conftest import ACCEPTANCE_LINES, random_params


def _record(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _random_fractions(rng, count, bits=40):
    den = 2**bits - 1
    return [Fraction(int(k), den) for k in rng.integers(0, den, count)]


def test_criterion_1_oracle_triangle():
    start = time.perf_counter()
    rep = verify.run_verification(seed=42, draws=50, p_min=1, p_max=10)
    elapsed = time.perf_counter() - start
    worst_pvw = max(c["max_rel_pvw"] for c in rep["cases"])
    worst_frame = max(c["max_rel_stiffness"] for c in rep["cases"])
    ok = rep["passed"] and len(rep["cases"]) == 20 and elapsed < 120
    _record(1, ok, f"20 case keys x 50 draws, worst rel err pvw {worst_pvw:.2e} (<1e-12), "
                   f"stiffness {worst_frame:.2e} (<1e-9), {elapsed:.0f}s (<120s), "
                   f"failed={rep['failed']}")
    assert ok


def _iteration_gaps(fig, kind):
    gaps, bounds = {}, {}
    for i in (2, 4, 6, 8, 16):
        it = cf.profile(fig.with_levels(i), kind).total
        N = 2**i
        if kind == "vertical":
            lim = limits.vertical_limit_grid(fig, 2 * np.arange(1, N + 1) - 1, 2 * N, 1e-20)
        else:
            lim = limits.horizontal_limit_grid(fig, np.arange(N), N - 1, 1e-20)
        gaps[i] = float(np.max(np.abs(it - lim)))
        bounds[i] = limits.tail_bound(kind, fig, i)
    return gaps, bounds


def test_criterion_2_limit_consistency():
    fig = figure_params()
    start = time.perf_counter()
    within, ratios = True, {}
    for kind in ("vertical", "horizontal"):
        gaps, bounds = _iteration_gaps(fig, kind)
        within &= all(gaps[i] <= bounds[i] for i in gaps)
        ratios[kind] = gaps[16] / gaps[2]
    elapsed = time.perf_counter() - start
    contraction = all(r < 1e-3 for r in ratios.values())
    ok = within and contraction and elapsed < 60
    _record(2, ok, f"gap <= tail_bound at i=2,4,6,8,16: {within}; gap16/gap2 "
                   f"vertical {ratios['vertical']:.3g}, horizontal {ratios['horizontal']:.3g} "
                   f"(<1e-3); {elapsed:.1f}s (<60s)")
    assert ok


def test_criterion_3_divergence():
    grid = [1.5, 3.9, 4.0, 4.1, 8.0, 15.9, 16.0, 16.5]
    region_ok = True
    for a, u, v in itertools.product(grid, repeat=3):
        convergent = a < 16 and u < 4 and v < 4
        region_ok &= (limits.classify(a, u, v).status == "convergent") == convergent
    p = figure_params(u=4.0)
    Ps = np.arange(8, 21)
    values = [cf.vertical_displacement(p.with_levels(int(P)), 1).total for P in Ps]
    fit = stats.linregress(Ps, values)
    r2 = fit.rvalue**2
    ok = region_ok and r2 > 0.999
    _record(3, ok, f"classify matches a<16, u<4, v<4 on {len(grid)**3} points: {region_ok}; "
                   f"figure parameters with u=4, node w=1, P=8..20: R^2 = {r2:.6f} (>0.999)")
    assert ok


def test_criterion_4_special_function_identities():
    rng = np.random.default_rng(2024)
    half = max(abs(fractals.takagi(Fraction(1, 2), r) - 0.5) for r in (0.1, 9 / 16, 0.9))

    tol = 1e-13
    selfsim = 0.0
    for x in _random_fractions(rng, 1000):
        for r in (0.25, 9 / 16):
            frac2 = 2 * x - int(2 * x)
            resid = fractals.takagi(x, r, tol) - float(sigma(x)) - r * fractals.takagi(frac2, r, tol)
            selfsim = max(selfsim, abs(resid))

    shift = 0.0
    for x in _random_fractions(rng, 1000):
        for t in (0.2, 1 / 3, 0.7):
            c = fractals.c_limit(x, t, 1e-16)
            shift = max(shift,
                        abs(fractals.c_limit(x / 2, t, 1e-16) - t * c),
                        abs(fractals.c_limit((1 + x) / 2, t, 1e-16) - t * (1 + c)))

    inverse = 0.0
    for beta in (1 / 3, 1 / 5, 3 / 5):
        t = (1 - beta) / 2
        for y in _random_fractions(rng, 1000):
            lhs = fractals.beta_cantor_inverse(y, beta)
            inverse = max(inverse, abs(lhs - (1 - t) / t * fractals.c_limit(y, t, 1e-16)))
            # and f_beta maps the point back to y
            inverse = max(inverse, abs(fractals.beta_cantor(digits(y, 60), beta) - float(y)))

    ok = half < 1e-14 and selfsim < 2 * tol and shift < 1e-12 and inverse < 1e-12
    _record(4, ok, f"|Psi(1/2)-1/2| {half:.1e} (<1e-14); self-similarity {selfsim:.1e} "
                   f"(<{2 * tol:.0e}); digit shift {shift:.1e} (<1e-12); "
                   f"inverse identity {inverse:.1e} (<1e-12)")
    assert ok


def test_criterion_5_dimension_relation():
    start = time.perf_counter()
    a = np.random.default_rng(5).uniform(1, 16, 10_000)
    relation = max(abs(dm.dimension_relation(float(x)) - 2) for x in a if 1 < x < 16)

    graph = dm.box_count_graph(fractals.sample_curve("takagi_limit", 2**18 + 1, r=12 / 16))
    image = {}
    for t in (1 / 3, 1 / 4):
        nums = np.arange(2**18, dtype=np.int64)
        image[t] = dm.box_count_image(fractals.c_partial_grid(nums, 2**18, t, 18)).empirical
    elapsed = time.perf_counter() - start

    ok = (relation < 1e-12 and abs(graph.empirical - 1.585) <= 0.1
          and abs(image[1 / 3] - 0.6309) <= 0.05 and abs(image[1 / 4] - 0.5) <= 0.05
          and elapsed < 180)
    _record(5, ok, f"relation max err {relation:.1e} (<1e-12); Takagi a=12 box dim "
                   f"{graph.empirical:.3f} (1.585+-0.1); image t=1/3 {image[1 / 3]:.3f} "
                   f"(0.6309+-0.05), t=1/4 {image[1 / 4]:.3f} (0.5+-0.05); {elapsed:.0f}s")
    assert ok


def _mirror_err(values, magnitudes=False):
    v = np.abs(values) if magnitudes else values
    return float(np.max(np.abs(v - v[::-1]) / np.maximum(np.abs(v), 1e-300)))


def test_criterion_6_symmetry():
    rng = np.random.default_rng(6)
    worst = 0.0
    for P in range(1, 13):
        trees = [figure_params(P=P)] + [random_params(rng, P=P) for _ in range(3)]
        for p in trees:
            worst = max(worst, _mirror_err(cf.vertical_profile(p).total),
                        _mirror_err(cf.horizontal_profile(p).total, magnitudes=True))
    ok = worst <= 1e-13
    _record(6, ok, f"w <-> 2^P+1-w for P=1..12, worst rel mismatch {worst:.1e} (<=1e-13)")
    assert ok


def _normwise(got, ref):
    scale = max(abs(ref.bending), abs(ref.axial), abs(ref.shear), abs(ref.total))
    return max(abs(got.bending - ref.bending), abs(got.axial - ref.axial),
               abs(got.shear - ref.shear), abs(got.total - ref.total)) / scale


def test_criterion_7_removable_singularities():
    rng = np.random.default_rng(7)
    eps = 1e-12
    probes = [("vertical", "a", 16.0), ("horizontal", "a", 16.0), ("horizontal", "a", 8.0),
              ("vertical", "u", 4.0), ("horizontal", "u", 4.0),
              ("vertical", "v", 4.0), ("horizontal", "v", 4.0)]
    worst = 0.0
    for kind, name, special in probes:
        for _ in range(4):
            P = int(rng.integers(1, 13))
            base = random_params(rng, P=P)
            exact = dataclasses.replace(base, **{name: special})
            for side in (-1, 1):
                near = dataclasses.replace(base, **{name: special * (1 + side * eps)})
                for w in {1, 2**P, int(rng.integers(1, 2**P + 1))}:
                    if kind == "vertical":
                        got = pvw_sum_vertical(near, w)
                        ref = cf.vertical_displacement(exact, w)
                    else:
                        got = pvw_sum_horizontal(near, w).scaled(cf.outward_sign(w, P))
                        ref = cf.horizontal_displacement(exact, w)
                    worst = max(worst, _normwise(got, ref))
    ok = worst < 1e-6
    _record(7, ok, f"direct sums at a=16(1-+1e-12), a=8(1+-1e-12), u,v=4(1+-1e-12) vs "
                   f"special-case formulas: worst rel {worst:.1e} (<1e-6)")
    assert ok


def _run_twice(tmp_path, argv, name):
    outs = []
    for k in range(2):
        path = tmp_path / f"{name}{k}.csv"
        assert cli.main(argv + ["-o", str(path)]) == 0
        outs.append(path.read_bytes())
    return outs[0] == outs[1], np.loadtxt(tmp_path / f"{name}0.csv", delimiter=",",
                                           skiprows=1, ndmin=2)


def test_criterion_8_cli_figure_data(tmp_path):
    fig = figure_params(P=8)
    checks = {}

    same_v, v = _run_twice(tmp_path, ["vertical"], "v")
    checks["vertical: 256 rows, symmetric, deterministic"] = (
        same_v and v.shape == (256, 6) and np.allclose(v[:, 2], v[::-1, 2], rtol=1e-13, atol=0)
        and v[0, 1] == 1 / 512 and v[-1, 1] == 1 - 1 / 512)

    same_h, h = _run_twice(tmp_path, ["horizontal"], "h")
    checks["horizontal: 256 rows, mirrored magnitudes, z* in [0,1]"] = (
        same_h and h.shape == (256, 6) and h[0, 1] == 0 and h[-1, 1] == 1
        and np.allclose(np.abs(h[:, 2]), np.abs(h[::-1, 2]), rtol=1e-13, atol=0))

    same_l, lim = _run_twice(tmp_path, ["limit", "--n", "1025"], "lim")
    at_zero = limits.vertical_limit(fig, 0, 1e-16).value
    checks["limit: 1025 rows, symmetric, endpoint = limit at 0"] = (
        same_l and lim.shape == (1025, 2) and abs(lim[0, 1] - at_zero) <= 1e-12
        and np.allclose(lim[:, 1], lim[::-1, 1], rtol=1e-12, atol=0))

    for kind, lim_kind in (("vertical_iteration", "vertical"),
                           ("horizontal_iteration", "horizontal")):
        gaps = []
        for i in (2, 4, 6, 8):
            same_i, it = _run_twice(tmp_path, ["curve", "--kind", kind, "--level", str(i)],
                                    f"{kind}{i}")
            N = 2**i
            if lim_kind == "vertical":
                ref = limits.vertical_limit_grid(fig, 2 * np.arange(1, N + 1) - 1, 2 * N, 1e-20)
            else:
                ref = limits.horizontal_limit_grid(fig, np.arange(N), N - 1, 1e-20)
            gaps.append(float(np.max(np.abs(it[:, 1] - ref))) if same_i and len(it) == N
                        else math.inf)
        checks[f"{kind}: 4 files, 2^i rows, gaps to limit decrease"] = all(
            a > b for a, b in zip(gaps, gaps[1:]))

    same_t, tk = _run_twice(tmp_path, ["curve", "--kind", "takagi_limit", "--r", "0.5625"], "tk")
    checks["takagi_limit: endpoints 0, symmetric"] = (
        same_t and tk[0, 1] == 0 and tk[-1, 1] == 0
        and np.allclose(tk[:, 1], tk[::-1, 1], atol=1e-13))

    same_c, cl = _run_twice(tmp_path, ["curve", "--kind", "c_limit", "--t", str(1 / 3)], "cl")
    checks["c_limit t=1/3: nondecreasing"] = same_c and bool(np.all(np.diff(cl[:, 1]) >= 0))

    failed = [k for k, ok in checks.items() if not ok]
    ok = not failed
    _record(8, ok, f"{len(checks)} figure-data checks, byte-identical reruns; failed={failed}")
    assert ok
