import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from planarpair import classical as cl
from planarpair.errors import DomainError, OriginError

CHIS = [math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3, 5 * math.pi / 6]


def test_orbit_from_channel():
    o = cl.orbit_from_channel(1.0, 1.0)
    assert (o.p, o.e) == pytest.approx((1.0, math.sqrt(2)))
    assert o.rho_min == pytest.approx(1 / (math.sqrt(2) - 1))
    assert cl.orbit_from_channel(1e-6, 1.0).e == pytest.approx(1.0)
    with pytest.raises(DomainError):
        cl.orbit_from_channel(0.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5))
def test_orbit_sampler_and_hj_residual(lam, k):
    o = cl.orbit_from_channel(lam, k)
    phi, rho = o.sample(51)
    assert np.max(np.abs(o.p / rho + 1 - o.e * np.cos(phi))) < 1e-10
    assert np.min(rho) >= o.rho_min * (1 - 1e-12)
    r, p = o.state(phi)
    assert np.max(np.abs(cl.hj_residual(r, p, k))) < 1e-8 * max(1.0, k * k)
    A = cl.lrl_vector(r, p)
    assert np.allclose(np.linalg.norm(A, axis=1), o.e, rtol=1e-10)
    assert np.allclose(cl.angular_momentum(r, p), lam, rtol=1e-10)


def test_lrl_parallel_to_apse_and_origin():
    o = cl.orbit_from_channel(1.2, 0.9)
    r, p = o.state(0.0)
    A = cl.lrl_vector(r, p)
    assert abs(A[0] * r[1] - A[1] * r[0]) < 1e-12 and A @ r > 0
    with pytest.raises(OriginError):
        cl.lrl_vector([0.0, 0.0], [1.0, 0.0])


def test_impact_relations():
    assert cl.impact_from_angle(math.pi / 2, 1.0) == pytest.approx(1.0)
    assert cl.impact_from_angle(math.pi - 1e-9, 1.0) < 1e-8
    h = 1e-5
    fd = (cl.impact_from_angle(math.pi / 2 + h, 1.0) - cl.impact_from_angle(math.pi / 2 - h, 1.0)) / (2 * h)
    assert fd == pytest.approx(-1.0, abs=1e-8)
    assert cl.impact_derivative(math.pi / 2, 1.0) == pytest.approx(fd, abs=1e-8)
    for bad in (0.0, math.pi):
        with pytest.raises(DomainError):
            cl.impact_from_angle(bad, 1.0)


def test_rutherford_values():
    assert cl.rutherford(math.pi / 2, 1.0) == pytest.approx(1.0)
    assert cl.rutherford(math.pi / 2, 1.0, symmetrized=True) == pytest.approx(2.0)
    for chi in (0.3, 1.0, 2.0):
        assert cl.rutherford(chi, 1.3, True) == pytest.approx(cl.rutherford(math.pi - chi, 1.3, True))
    with pytest.raises(DomainError):
        cl.rutherford(0.0, 1.0)


def test_jacobian_consistency():
    # |db/dchi| b / sin(chi) reproduces the Rutherford formula
    for chi in CHIS:
        k = 0.7
        b = cl.impact_from_angle(chi, k)
        assert abs(cl.impact_derivative(chi, k)) * b / math.sin(chi) == pytest.approx(cl.rutherford(chi, k))


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_trajectory_closure(k):
    for chi in CHIS:
        tr = cl.integrate_trajectory(cl.impact_from_angle(chi, k), k)
        assert abs(tr.chi - chi) < 1e-4
        d_e, d_l, d_a = tr.drifts()
        assert d_e < 1e-9 and d_l < 1e-9 and d_a < 1e-8
        assert np.max(np.abs(cl.hj_residual(tr.r, tr.p, k))) < 1e-8


def test_trajectory_limits():
    assert cl.integrate_trajectory(0.0, 1.0).chi == pytest.approx(math.pi, abs=1e-6)
    assert cl.integrate_trajectory(1e3, 1.0).chi < 2.1e-3
    with pytest.raises(DomainError):
        cl.integrate_trajectory(-1.0, 1.0)


def test_unit_kinetic_factor_breaks_lrl_conservation():
    tr = cl.integrate_trajectory(1.0, 1.0, kinetic=1.0)
    assert tr.drifts()[0] < 1e-9
    assert tr.drifts()[2] > 1e-3


def test_batched_matches_scipy():
    bs = np.array([0.2, 0.7, 1.5, 4.0])
    chi, ok = cl.batch_deflections(bs, 1.0)
    assert ok.all()
    for b, c in zip(bs, chi):
        assert c == pytest.approx(cl.integrate_trajectory(b, 1.0).chi, abs=1e-6)


def test_bin_average_reduces_to_point_value():
    c = 1.2
    assert cl.rutherford_bin_average(c - 1e-4, c + 1e-4, 1.0) == pytest.approx(cl.rutherford(c, 1.0), rel=1e-6)


def test_mc_determinism_and_jobs():
    a = cl.mc_cross_section(1.0, 3.0, 4000, 12, seed=5)
    b = cl.mc_cross_section(1.0, 3.0, 4000, 12, seed=5)
    c = cl.mc_cross_section(1.0, 3.0, 4000, 12, seed=5, jobs=2)
    assert np.array_equal(a.dsdo, b.dsdo) and np.array_equal(a.dsdo, c.dsdo)
    assert a.n_failed == 0
    d = cl.mc_cross_section(1.0, 3.0, 4000, 12, seed=6)
    assert not np.array_equal(a.counts, d.counts)


def test_mc_standard_error_scaling():
    # standard errors scale as n^-1/2: doubling n shrinks them by 1/sqrt(2)
    a = cl.mc_cross_section(1.0, 3.0, 10000, 12, seed=1)
    b = cl.mc_cross_section(1.0, 3.0, 20000, 12, seed=2)
    sel = (a.counts > 50) & (b.counts > 50)
    ratio = np.median(b.stderr[sel] / a.stderr[sel])
    assert ratio == pytest.approx(1 / math.sqrt(2), rel=0.2)
