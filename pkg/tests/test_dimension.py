import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractree import dimension as dm
from fractree import fractals
from fractree.errors import DegenerateScales, OutOfRange, TooFewSamples
from fractree.fractals import CurveSamples

N_GRAPH = 2**18


def _line(n, slope=1.0):
    x = np.linspace(0, 1, n)
    return CurveSamples(x, slope * x)


def _takagi(a, n=N_GRAPH + 1):
    return fractals.sample_curve("takagi_limit", n, r=a / 16)


def _image(t, m=18):
    nums = np.arange(2**m, dtype=np.int64)
    return fractals.c_partial_grid(nums, 2**m, t, m)


def test_analytic_examples():
    assert dm.takagi_dimension(8) == pytest.approx(1.0, abs=1e-15)
    assert dm.takagi_dimension(9) == pytest.approx(1.169925001442312, rel=1e-14)
    assert dm.takagi_dimension(4 + 1e-13) == pytest.approx(0.0, abs=1e-12)
    assert dm.cantor_inverse_dimension(0.25) == pytest.approx(0.5, rel=1e-15)
    assert dm.cantor_inverse_dimension(0.5) == pytest.approx(1.0, rel=1e-15)
    assert dm.cantor_inverse_dimension(9 / 16) == pytest.approx(1.2047104198266045, rel=1e-14)
    assert dm.dimension_relation(9) == pytest.approx(2.0, abs=1e-12)
    assert dm.dimension_relation(8) == pytest.approx(2.0, abs=1e-12)


def test_relation_sweep():
    a = np.random.default_rng(7).uniform(1, 16, 10_000)
    a = a[(a > 1) & (a < 16)]
    worst = max(abs(dm.dimension_relation(float(x)) - 2) for x in a)
    assert worst < 1e-12


@given(st.floats(1, 16, exclude_min=True, exclude_max=True))
def test_relation_property(a):
    assert dm.dimension_relation(a) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("fn, arg", [(dm.takagi_dimension, 16.0), (dm.takagi_dimension, 1.0),
                                     (dm.takagi_dimension, 17.0), (dm.dimension_relation, 0.5),
                                     (dm.cantor_inverse_dimension, 0.0),
                                     (dm.cantor_inverse_dimension, 1.0)])
def test_out_of_range(fn, arg):
    with pytest.raises(OutOfRange):
        fn(arg)


def test_smooth_graphs_have_dimension_one():
    for samples in (_line(2**16), _line(2**16, slope=0.0)):
        rep = dm.box_count_graph(samples)
        assert rep.empirical == pytest.approx(1.0, abs=0.05)
        assert len(rep.scales_used) >= 4
        assert rep.scales_used[0] / rep.scales_used[-1] >= 100


def test_graph_errors():
    with pytest.raises(TooFewSamples):
        dm.box_count_graph(_line(1000))
    with pytest.raises(DegenerateScales):
        dm.box_count_graph(_line(2**16), scales=[0.5, 0.25, 0.125])
    with pytest.raises(DegenerateScales):
        dm.box_count_graph(_line(2**16), scales=[0.1, 0.09, 0.08, 0.07])
    with pytest.raises(TooFewSamples):
        dm.box_count_image([0.5])


@pytest.mark.parametrize("a", [10.0, 12.0, 14.0])
def test_takagi_box_count(a):
    rep = dm.box_count_graph(_takagi(a), analytic=dm.takagi_dimension(a))
    assert rep.empirical == pytest.approx(rep.analytic, abs=0.1)
    half = dm.box_count_graph(_takagi(a, N_GRAPH // 2 + 1))
    assert abs(half.empirical - rep.empirical) <= 0.05


@pytest.mark.parametrize("t", [1 / 5, 1 / 4, 1 / 3])
def test_cantor_image_box_count(t):
    rep = dm.box_count_image(_image(t), analytic=dm.cantor_inverse_dimension(t))
    assert rep.empirical == pytest.approx(rep.analytic, abs=0.05)
    half = dm.box_count_image(_image(t, 17))
    assert abs(half.empirical - rep.empirical) <= 0.05


def test_image_at_half_fills_interval():
    assert dm.box_count_image(_image(0.5)).empirical == pytest.approx(1.0, abs=0.05)


def test_report_json():
    rep = dm.box_count_image(_image(1 / 3, 14), analytic=0.63)
    js = rep.to_json()
    assert set(js) == {"analytic", "empirical", "ci_halfwidth", "scales_used", "counts"}
    assert js["ci_halfwidth"] > 0
    assert len(js["counts"]) == len(js["scales_used"])
