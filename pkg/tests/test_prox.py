import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from pdsplit import prox as px
from pdsplit.core import ConfigError, DimensionError

import prox_oracle as oracle

N_RANDOM = 100
TOL = 1e-6


def _instances(seed, dim=4):
    r = np.random.default_rng(seed)
    for _ in range(N_RANDOM):
        yield r, 2.0 * r.standard_normal(dim), float(r.uniform(0.1, 3.0))


# -- worked values -----------------------------------------------------------

def test_prox_l1_box_values():
    np.testing.assert_array_equal(px.prox_l1_box(np.full(3, 0.5), 1.0, 0.0), 0.5)
    assert px.prox_l1_box(np.array([1.4]), 1.0, 0.2)[0] == 1.0
    assert px.prox_l1_box(np.array([-0.3]), 2.0, 0.1)[0] == 0.0
    assert px.prox_l1_box(np.array([-0.3]), 2.0, 0.0)[0] == 0.0


def test_prox_l1_box_rejects_negative_lower_bound():
    with pytest.raises(ConfigError):
        px.prox_l1_box(np.zeros(2), 1.0, 0.1, lo=-1.0)
    with pytest.raises(ConfigError):
        px.make_l1_box(0.1, lo=-1.0)
    with pytest.raises(ConfigError):
        px.prox_l1_box(np.zeros(2), 0.0, 0.1)


def test_proj_box_shifted_values():
    assert px.proj_box_shifted(np.zeros(1), 1.0, np.zeros(1))[0] == 0.0
    assert px.proj_box_shifted(np.array([0.5]), 1.0, np.array([1.0]))[0] == -0.5
    assert px.proj_box_shifted(np.array([3.0]), 2.0, np.array([0.5]))[0] == 1.0
    with pytest.raises(DimensionError):
        px.proj_box_shifted(np.zeros(2), 1.0, np.zeros(3))


def test_pair_ball_values():
    assert px.proj_linf_pair_ball(0.0, 0.0, 1.0) == (0.0, 0.0)
    p, q = px.proj_linf_pair_ball(3.0, 4.0, 1.0)
    assert (p, q) == pytest.approx((0.6, 0.8), abs=1e-15)
    p, q = px.proj_linf_pair_ball(0.3, 0.1, 1.0)
    assert (p, q) == (0.3, 0.1)
    with pytest.raises(ConfigError):
        px.proj_linf_pair_ball(1.0, 1.0, 0.0)
    with pytest.raises(DimensionError):
        px.proj_pair_ball_block(np.zeros(3), 1.0)


def test_proj_box_values():
    lam = 0.07
    v = np.array([0.01, -0.02])
    np.testing.assert_array_equal(px.proj_box(v, -lam, lam), v)
    assert px.proj_box(np.array([2 * lam]), -lam, lam)[0] == lam
    with pytest.raises(ConfigError):
        px.proj_box(v, 1.0, 0.0)


def test_tv_values():
    x = np.array([0.0, 1, 2, 3])
    assert px.tv_aniso(x, 2, 2) == pytest.approx(6.0)
    # per-pixel pairs (2, 1), (2, 0), (0, 1), (0, 0)
    assert px.tv_iso(x, 2, 2) == pytest.approx(np.sqrt(5) + 3)
    assert px.tv_aniso(np.full(9, 0.4), 3, 3) == 0.0
    assert px.tv_iso(np.full(9, 0.4), 3, 3) == 0.0


@given(arrays(float, 12, elements=st.floats(-5, 5)))
def test_tv_iso_between_aniso_bounds(x):
    a = px.tv_aniso(x, 3, 4)
    i = px.tv_iso(x, 3, 4)
    assert i <= a + 1e-12
    assert a <= np.sqrt(2) * i + 1e-12


def test_factories_reject_bad_step():
    for prox in (px.make_identity(), px.make_box(0, 1), px.make_pair_ball(1.0)):
        with pytest.raises(ConfigError):
            prox(np.zeros(2), 0.0)


# -- brute-force oracle (100 random instances each) ----------------------------

def test_proj_box_oracle():
    for r, x, _ in _instances(1):
        lo = -r.uniform(0, 1, 4)
        hi = r.uniform(0, 1, 4)
        np.testing.assert_allclose(px.proj_box(x, lo, hi), oracle.prox_quadratic_linear(x, lo=lo, hi=hi), atol=TOL)


def test_prox_l1_box_oracle():
    for r, x, g in _instances(2):
        lam2 = r.uniform(0, 1)
        got = px.make_l1_box(lam2, 0.0, 1.0)(x, g)
        ref = oracle.prox_weighted_l1(x, g * lam2, lo=0.0, hi=1.0)
        np.testing.assert_allclose(got, ref, atol=TOL)


def test_proj_box_shifted_oracle():
    for r, p, g in _instances(3):
        b = r.standard_normal(4)
        got = px.make_box_shifted(b)(p, g)
        ref = oracle.prox_quadratic_linear(p, lin=g * b, lo=-1.0, hi=1.0)
        np.testing.assert_allclose(got, ref, atol=TOL)


def test_pair_ball_oracle():
    for r, y, g in _instances(4, dim=6):
        lam = r.uniform(0.1, 2.0)
        np.testing.assert_allclose(px.make_pair_ball(lam)(y, g), oracle.proj_disc_pairs(y, lam), atol=TOL)


def test_soft_threshold_oracle():
    for r, x, g in _instances(5):
        np.testing.assert_allclose(px.soft_threshold(x, g), oracle.prox_weighted_l1(x, g), atol=TOL)


def test_prox_l1_shifted_oracle():
    for r, x, g in _instances(6):
        b = r.standard_normal(4)
        np.testing.assert_allclose(px.prox_l1_shifted(x, g, b), oracle.prox_weighted_l1(x, g, center=b), atol=TOL)


def test_group_soft_threshold_oracle():
    for r, y, g in _instances(7, dim=6):
        np.testing.assert_allclose(px.group_soft_threshold_block(y, g), oracle.prox_group_norm(y, g), atol=TOL)


def test_prox_sq_dist_oracle():
    for r, x, g in _instances(8):
        b = r.standard_normal(4)
        w = r.uniform(0.1, 2.0)
        # 1/2||y-x||^2 + g*w/2||y-b||^2 = (1+gw)/2 ||y||^2 - <x + gwb, y> + const
        ref = oracle.prox_quadratic_linear((x + g * w * b) / (1 + g * w))
        np.testing.assert_allclose(px.make_sq_dist(b, w)(x, g), ref, atol=TOL)


def test_identity_prox():
    x = np.array([1.0, -2.0])
    np.testing.assert_array_equal(px.make_identity()(x, 3.0), x)


# -- Moreau decomposition x = prox_{g f}(x) + g prox_{f*/g}(x/g) -------------------

@given(arrays(float, 8, elements=st.floats(-10, 10)), st.floats(0.05, 5.0), st.floats(0.01, 3.0))
def test_moreau_l1(x, g, t):
    total = px.soft_threshold(x, g * t) + g * px.proj_box(x / g, -t, t)
    np.testing.assert_allclose(total, x, atol=1e-10)


@given(arrays(float, 8, elements=st.floats(-10, 10)), st.floats(0.05, 5.0), st.floats(0.01, 3.0))
def test_moreau_group_norm(y, g, lam):
    total = px.group_soft_threshold_block(y, g * lam) + g * px.proj_pair_ball_block(y / g, lam)
    np.testing.assert_allclose(total, y, atol=1e-10)


@given(arrays(float, 6, elements=st.floats(-10, 10)), arrays(float, 6, elements=st.floats(-3, 3)),
       st.floats(0.05, 5.0))
def test_moreau_shifted_l1(x, b, g):
    total = px.prox_l1_shifted(x, g, b) + g * px.proj_box_shifted(x / g, 1.0 / g, b)
    np.testing.assert_allclose(total, x, atol=1e-10)


# -- firm nonexpansiveness ------------------------------------------------------

CATALOG = {
    "box": px.make_box(-0.5, 0.7),
    "l1_box": px.make_l1_box(0.3),
    "box_shifted": px.make_box_shifted(np.linspace(-1, 1, 6)),
    "pair_ball": px.make_pair_ball(0.4),
    "sq_dist": px.make_sq_dist(np.linspace(0, 1, 6), 2.0),
    "identity": px.make_identity(),
}


@pytest.mark.parametrize("name", sorted(CATALOG))
@given(arrays(float, 6, elements=st.floats(-4, 4)), arrays(float, 6, elements=st.floats(-4, 4)),
       st.floats(0.01, 4.0))
def test_firmly_nonexpansive(name, x, y, g):
    P = CATALOG[name]
    d = P(x, g) - P(y, g)
    assert d @ d <= d @ (x - y) + 1e-10
