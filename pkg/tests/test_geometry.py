import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrayphg.errors import OutOfChartError, ParameterError
from xrayphg.geometry import (
    INWARD,
    OUTWARD,
    BoundaryRay,
    DiskModel,
    RadialModel,
    f_factor,
    glancing_chart,
    kappa,
    model_from_config,
    mu_measure_coefficient,
    santalo_check,
    scatter,
    tau,
    upsilon,
)

DISK = DiskModel()
RADIAL = RadialModel([1.0, 0.2])

alphas = st.floats(-1.5, 1.5)
betas = st.floats(0.0, 2 * math.pi)


def test_disk_chord_length():
    for a in (0.0, 0.4, -1.2):
        assert tau(DISK, BoundaryRay(0.3, a)) == pytest.approx(2 * math.cos(a), abs=1e-15)
    assert tau(DISK, BoundaryRay(0.0, math.pi / 2)) == 0.0


def test_disk_scatter_explicit():
    out = scatter(DISK, BoundaryRay(0.0, 0.3))
    assert out.side == OUTWARD
    assert out.beta == pytest.approx(math.pi - 0.6)
    assert out.alpha == pytest.approx(-0.3)


@pytest.mark.parametrize("model", [DISK, RADIAL], ids=["disk", "radial"])
@settings(max_examples=25, deadline=None)
@given(betas, alphas)
def test_scatter_involution(model, beta, alpha):
    ray = BoundaryRay(beta, alpha)
    back = scatter(model, scatter(model, ray))
    assert back.side == INWARD
    assert abs(math.remainder(back.beta - beta, 2 * math.pi)) < 1e-8
    assert back.alpha == pytest.approx(alpha, abs=1e-8)
    # exit data carries the integrator error (ode_tol 1e-10, amplified near glancing)
    assert tau(model, scatter(model, ray)) == pytest.approx(tau(model, ray), rel=1e-8)


@pytest.mark.parametrize("model", [DISK, RADIAL], ids=["disk", "radial"])
@settings(max_examples=15, deadline=None)
@given(betas, st.floats(-1.4, 1.4))
def test_upsilon_endpoints_on_boundary(model, beta, alpha):
    ray = BoundaryRay(beta, alpha)
    x, _ = upsilon(model, ray, np.array([0.0, 1.0]))
    assert np.allclose(model.rho(x), 0.0, atol=1e-8)
    out = scatter(model, ray)
    x_end, _ = upsilon(model, out, 0.0)
    assert np.allclose(x_end, x[1], atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(-1.5, 1.5))
def test_disk_f_factor_formula(u, alpha):
    ray = BoundaryRay(0.0, alpha)
    t = 2 * math.cos(alpha)
    x, _ = upsilon(DISK, ray, u)
    if 1e-6 < u < 1 - 1e-6:
        assert f_factor(DISK, ray, u) == pytest.approx(float(DISK.rho(x)) / (t * t * u * (1 - u)), rel=1e-7)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.2, 1.3))
def test_radial_f_factor_positive_and_bounded(u, alpha):
    val = f_factor(RADIAL, BoundaryRay(0.0, alpha), u)
    assert 0.0 < val < 2.0


def test_kappa_and_s0_disk():
    assert kappa(DISK) == 0.5
    assert mu_measure_coefficient(DISK) == 0.25


def test_kappa_and_s0_radial():
    # m = r + 0.2 r³: m(1) = 1.2, m'(1) = 1.6, curvature m'/m = 4/3, half of it 2/3
    assert kappa(RADIAL) == pytest.approx(2.0 / 3.0, rel=1e-6)
    assert mu_measure_coefficient(RADIAL) == pytest.approx(4.0 / 9.0, rel=1e-6)


def test_f_factor_glancing_limit():
    near = BoundaryRay(0.0, math.pi / 2 - 1e-4)
    assert f_factor(DISK, near, 0.5) == pytest.approx(0.5, abs=1e-6)
    assert f_factor(RADIAL, near, 0.5) == pytest.approx(2.0 / 3.0, abs=1e-4)


@pytest.mark.parametrize("model", [DISK, RADIAL], ids=["disk", "radial"])
def test_glancing_chart_parity(model):
    ray = BoundaryRay(0.7, 1.3)
    c_in = glancing_chart(model, ray)
    c_out = glancing_chart(model, scatter(model, ray))
    assert c_out.t == pytest.approx(-c_in.t, abs=1e-10)
    assert abs(math.remainder(c_out.y_mid - c_in.y_mid, 2 * math.pi)) < 1e-9
    assert c_out.w_sign == c_in.w_sign


def test_glancing_chart_out_of_range():
    with pytest.raises(OutOfChartError):
        glancing_chart(DISK, BoundaryRay(0.0, 0.1))


def test_glancing_ray_is_degenerate():
    ray = BoundaryRay(0.4, math.pi / 2)
    assert ray.is_glancing
    assert tau(RADIAL, ray) == 0.0
    assert glancing_chart(DISK, ray).t == 0.0


def test_bad_parameters():
    with pytest.raises(ParameterError):
        BoundaryRay(0.0, 2.0)
    with pytest.raises(ParameterError):
        RadialModel([2.0])
    with pytest.raises(ParameterError):
        RadialModel([1.0, -0.5])
    with pytest.raises(ParameterError):
        model_from_config({"model": "sphere"})


def test_model_from_config():
    assert isinstance(model_from_config({"model": "disk"}), DiskModel)
    m = model_from_config({"model": "radial", "m_coeffs": [1.0, 0.1]})
    assert m.boundary_scale == pytest.approx(1.1)


def test_radial_reduces_to_disk():
    flat = RadialModel([1.0])
    for a in (0.0, 0.5, 1.2):
        assert tau(flat, BoundaryRay(0.0, a)) == pytest.approx(2 * math.cos(a), rel=1e-8)


def test_footpoint_inverts_flow():
    rng = np.random.default_rng(3)
    beta = rng.uniform(0, 2 * math.pi, 20)
    alpha = rng.uniform(-1.4, 1.4, 20)
    t = rng.uniform(0, 1, 20) * DISK.tau_of(alpha)
    x, v = DISK.flow(beta, alpha, t)
    b2, a2, t2 = DISK.footpoint(x, v)
    assert np.allclose(np.remainder(b2 - beta + math.pi, 2 * math.pi) - math.pi, 0, atol=1e-10)
    assert np.allclose(a2, alpha, atol=1e-10)
    assert np.allclose(t2, t, atol=1e-10)


def _test_fn(x, v):
    return 1.0 + x[..., 0] ** 2 + 0.5 * x[..., 1] * v[..., 0]


@pytest.mark.parametrize("model", [DISK, RADIAL], ids=["disk", "radial"])
def test_santalo(model):
    res = santalo_check(model, _test_fn)
    assert res.gap < 1e-8
