import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from geodesic_engine import (GeodesicParam, conjugate_phase, control, geodesic_batch, geodesic_closed_form,
                             geodesic_ode, geodesic_product, left_translate, mn, phase_rotation, restart,
                             reverse_sign, sample_geodesic)
from geometry_errors import NonFiniteParameterError
from so3_core import exp, vee


def test_param_normalizes_phase():
    p = GeodesicParam(-0.5, 2.0)
    assert p.phi0 == pytest.approx(2 * math.pi - 0.5)
    assert GeodesicParam(4 * math.pi + 0.25, 0.0).phi0 == pytest.approx(0.25)
    assert p.omega == pytest.approx(math.sqrt(5.0))


def test_param_rejects_non_finite():
    with pytest.raises(NonFiniteParameterError):
        GeodesicParam(0.0, math.nan)
    with pytest.raises(NonFiniteParameterError):
        geodesic_closed_form(GeodesicParam(0.0, 1.0), math.inf)


def test_identity_at_time_zero():
    assert_allclose(geodesic_closed_form(GeodesicParam(1.3, -2.0), 0.0).matrix, np.eye(3), atol=0)


def test_beta_zero_half_turn():
    g = geodesic_closed_form(GeodesicParam(0.0, 0.0), math.pi).matrix
    assert_allclose(g, np.diag([-1.0, -1.0, 1.0]), atol=1e-15)
    assert_allclose(g[:, 0], [-1.0, 0.0, 0.0], atol=1e-15)


def test_beta_zero_is_one_parameter_subgroup():
    p = GeodesicParam(0.7, 0.0)
    assert_allclose(geodesic_closed_form(p, 1.9).matrix, exp([1.9 * math.cos(0.7), 1.9 * math.sin(0.7), 0.0]).matrix,
                    atol=1e-14)


def test_full_circle_endpoint_in_fiber():
    g = geodesic_closed_form(GeodesicParam(0.0, 1.0), 2 * math.pi / math.sqrt(2.0)).matrix
    assert_allclose(g[:, 0], [1.0, 0.0, 0.0], atol=1e-15)
    assert_allclose(g[0, :], [1.0, 0.0, 0.0], atol=1e-15)


def test_mn_identity(rng):
    for beta, t in zip(rng.uniform(-5, 5, 200), rng.uniform(0, 2 * math.pi, 200)):
        assert mn(beta, t).identity_gap(beta) <= 1e-12


def test_closed_form_matches_product(rng):
    n = 2000
    phi0, beta, t = rng.uniform(0, 2 * math.pi, n), rng.uniform(-5, 5, n), rng.uniform(0, 2 * math.pi, n)
    batch = geodesic_batch(phi0, beta, t)
    for k in range(0, n, 97):
        p = GeodesicParam(phi0[k], beta[k])
        assert_allclose(geodesic_product(p, t[k]).matrix, batch[k], atol=1e-10)
        assert_allclose(geodesic_closed_form(p, t[k]).matrix, batch[k], atol=1e-14)


def test_ode_matches_closed_form(rng):
    for _ in range(3):
        p = GeodesicParam(rng.uniform(0, 2 * math.pi), rng.uniform(-3, 3))
        t = rng.uniform(0.2, 1.5)
        assert_allclose(geodesic_ode(p, t).matrix, geodesic_closed_form(p, t).matrix, atol=1e-7)


def test_ode_fourth_order():
    p, t = GeodesicParam(0.4, 0.9), 1.3
    exact = geodesic_closed_form(p, t).matrix
    coarse = np.max(np.abs(geodesic_ode(p, t, 0.05).matrix - exact))
    fine = np.max(np.abs(geodesic_ode(p, t, 0.025).matrix - exact))
    assert coarse / fine >= 12.0


def test_ode_rejects_bad_step():
    with pytest.raises(ValueError):
        geodesic_ode(GeodesicParam(0.0, 1.0), 1.0, step=0.0)


def test_velocity_is_horizontal_unit_control(rng):
    h = 1e-6
    for _ in range(20):
        p = GeodesicParam(rng.uniform(0, 2 * math.pi), rng.uniform(-4, 4))
        t = rng.uniform(0, 5)
        G = geodesic_batch(p.phi0, p.beta, t)
        D = G.T @ (geodesic_batch(p.phi0, p.beta, t + h) - geodesic_batch(p.phi0, p.beta, t - h)) / (2 * h)
        assert_allclose(vee(D).as_array(), control(p, t).as_array(), atol=1e-6)


def test_initial_velocity():
    p = GeodesicParam(0.3, 2.0)
    assert_allclose(p.initial_velocity().as_array(), [math.cos(0.3), math.sin(0.3), 0.0])


def test_restart_contract(rng):
    for _ in range(100):
        p = GeodesicParam(rng.uniform(0, 2 * math.pi), rng.uniform(-5, 5))
        t0, s = rng.uniform(-3, 3), rng.uniform(-3, 3)
        q = restart(p, t0)
        lhs = geodesic_batch(p.phi0, p.beta, t0).T @ geodesic_batch(p.phi0, p.beta, t0 + s)
        assert_allclose(lhs, geodesic_batch(q.phi0, q.beta, s), atol=1e-11)


def test_reverse_sign_reaches_same_point(rng):
    for _ in range(50):
        p = GeodesicParam(rng.uniform(0, 2 * math.pi), rng.uniform(-5, 5))
        t = rng.uniform(-5, 5)
        q, s = reverse_sign(p, t)
        assert s == -t
        assert q.beta == -p.beta
        assert_allclose(geodesic_closed_form(q, s).matrix, geodesic_closed_form(p, t).matrix, atol=1e-12)


def test_conjugate_phase(rng):
    for _ in range(50):
        beta, phi0, t = rng.uniform(-5, 5), rng.uniform(0, 2 * math.pi), rng.uniform(0, 6)
        assert_allclose(conjugate_phase(GeodesicParam(0.0, beta), phi0, t).matrix,
                        geodesic_batch(phi0, beta, t), atol=1e-12)
    with pytest.raises(ValueError):
        conjugate_phase(GeodesicParam(0.5, 1.0), 0.2, 1.0)


def test_phase_rotation_fixes_e1():
    B = phase_rotation(0.9)
    assert_allclose(B @ [1.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    assert_allclose(B, exp([0.0, 0.0, 0.9]).matrix, atol=1e-15)


def test_left_translate(rng):
    g = exp(rng.normal(size=3))
    p = GeodesicParam(1.0, -0.5)
    assert_allclose(left_translate(g, p, 2.0).matrix, g.matrix @ geodesic_batch(1.0, -0.5, 2.0))


def test_sample_geodesic():
    times, matrices = sample_geodesic(GeodesicParam(0.0, 0.0), 3.14159, 2)
    assert_allclose(times, [0.0, 3.14159])
    assert_allclose(matrices[0], np.eye(3), atol=0)
    assert_allclose(matrices[-1][:, 0], [-1.0, 0.0, 0.0], atol=1e-5)
    times, matrices = sample_geodesic(GeodesicParam(0.0, 0.0), 0.0, 1)
    assert times.tolist() == [0.0]
    assert_allclose(matrices[0], np.eye(3), atol=0)
    with pytest.raises(ValueError):
        sample_geodesic(GeodesicParam(0.0, 0.0), 1.0, 0)
