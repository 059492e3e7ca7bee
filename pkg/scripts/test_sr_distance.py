import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cut_locus import DIAMETER, INV_SQRT3, cut_time, cut_time_value
from geodesic_engine import GeodesicParam, geodesic_batch, phase_rotation
from geometry_config import GeometryConfig
from geometry_errors import InvalidRotationError, RadiusOutOfRangeError
from so3_core import Rotation, axis_angle_to_rotation, exp, rotation_distance
from sr_distance import (Multiplicity, SolverSettings, distance, distance_between, sample_sphere, sr_log)


def test_identity():
    result = sr_log(np.eye(3))
    assert result.distance == 0.0
    assert result.residual == 0.0


def test_farthest_point():
    result = sr_log(exp([0.0, 0.0, math.pi]))
    assert result.distance == pytest.approx(DIAMETER, abs=1e-6)
    assert result.multiplicity == Multiplicity.CIRCLE
    assert abs(result.param.beta) == pytest.approx(INV_SQRT3, abs=1e-9)


@pytest.mark.parametrize("theta", [0.3, 1.5, -2.0, 3.0])
def test_fiber_targets(theta):
    target = exp([0.0, 0.0, theta])
    result = sr_log(target)
    assert result.residual <= 1e-9
    assert result.multiplicity == Multiplicity.CIRCLE
    assert abs(result.param.beta) >= INV_SQRT3 - 1e-12
    assert result.distance == pytest.approx(cut_time_value(result.param.beta), abs=1e-9)
    assert rotation_distance(geodesic_batch(result.param.phi0, result.param.beta, result.time), target) <= 1e-9


def test_half_turn_is_cut_pair():
    result = sr_log(np.diag([-1.0, -1.0, 1.0]))
    assert result.distance == pytest.approx(math.pi, abs=1e-12)
    assert result.multiplicity == Multiplicity.CUT_PAIR
    other = sr_log(axis_angle_to_rotation([0.0, math.sin(0.4), math.cos(0.4)], math.pi))
    assert other.distance == pytest.approx(math.pi, abs=1e-12)
    assert other.residual <= 1e-9


def test_horizontal_one_parameter_subgroup():
    assert distance(exp([0.3, 0.0, 0.0])) == pytest.approx(0.3, abs=1e-6)
    assert distance(exp([0.0, -1.2, 0.0])) == pytest.approx(1.2, abs=1e-6)


def test_recovers_known_geodesic():
    result = sr_log(geodesic_batch(1.0, 0.5, 2.0))
    assert result.distance == pytest.approx(2.0, abs=1e-6)
    assert result.param.phi0 == pytest.approx(1.0, abs=1e-6)
    assert result.param.beta == pytest.approx(0.5, abs=1e-6)
    assert result.multiplicity == Multiplicity.UNIQUE


def test_round_trip(rng):
    for _ in range(40):
        beta = math.tan(rng.uniform(-1.4, 1.4))
        phi0 = rng.uniform(0, 2 * math.pi)
        t = rng.uniform(0.05, 0.95) * cut_time_value(beta)
        result = sr_log(geodesic_batch(phi0, beta, t))
        assert result.distance == pytest.approx(t, abs=1e-6)
        assert result.residual <= 1e-9


@pytest.mark.parametrize("beta", [0.1, 0.3, -0.45])
def test_cut_pair_on_digon_branch(beta):
    point = cut_time(beta)
    result = sr_log(point.endpoint)
    assert result.distance == pytest.approx(point.t1, abs=1e-8)
    assert result.multiplicity == Multiplicity.CUT_PAIR


def test_symmetries(rng):
    for _ in range(5):
        g = exp(rng.normal(size=3))
        d = distance(g)
        assert distance(g.inverse()) == pytest.approx(d, abs=1e-6)
        B = phase_rotation(rng.uniform(0, 2 * math.pi))
        assert distance(Rotation(B @ g.matrix @ B.T)) == pytest.approx(d, abs=1e-6)
        assert d <= DIAMETER + 1e-9


def test_triangle_inequality(rng):
    for _ in range(5):
        g, h = exp(rng.normal(size=3)), exp(rng.normal(size=3))
        assert distance(g @ h) <= distance(g) + distance(h) + 1e-6


def test_distance_between_is_left_invariant(rng):
    g, h, k = (exp(rng.normal(size=3)) for _ in range(3))
    assert distance_between(k @ g, k @ h) == pytest.approx(distance_between(g, h), abs=1e-6)
    assert distance_between(g, g) == pytest.approx(0.0, abs=1e-9)


def test_rejects_invalid_rotation():
    with pytest.raises(InvalidRotationError):
        sr_log(np.eye(3) * 1.01)


def test_tolerance_override():
    result = sr_log(geodesic_batch(0.2, 1.1, 1.0), tol=1e-12)
    assert result.residual <= 1e-12
    with pytest.raises(ValueError):
        sr_log(np.eye(3), tol=0.0)


def test_settings_from_config():
    settings = SolverSettings.from_config(GeometryConfig("strict"))
    assert settings.tol == 1e-11
    assert settings.xi_grid == 256
    assert SolverSettings.from_config(GeometryConfig()).tol == 1e-9


def test_sample_sphere_points_lie_on_sphere():
    radius = 2.0
    samples = sample_sphere(radius, n_beta=16, n_phi=8)
    assert samples
    for sample in samples:
        assert sample.t == radius
        assert cut_time_value(sample.param.beta) >= radius - 1e-12
        assert_allclose(sample.rotation.matrix, geodesic_batch(sample.param.phi0, sample.param.beta, radius))
    for sample in samples[::17]:
        assert distance(sample.rotation) == pytest.approx(radius, abs=1e-6)


def test_sample_sphere_at_diameter_keeps_peak_beta():
    samples = sample_sphere(DIAMETER, n_beta=8, n_phi=4)
    assert {round(abs(s.param.beta), 12) for s in samples} == {round(INV_SQRT3, 12)}


def test_sample_sphere_radius_range():
    with pytest.raises(RadiusOutOfRangeError):
        sample_sphere(0.0)
    with pytest.raises(RadiusOutOfRangeError):
        sample_sphere(DIAMETER + 1e-6)


@pytest.mark.parametrize("t", [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
def test_targets_near_identity(rng, t):
    for _ in range(5):
        beta = math.tan(rng.uniform(-1.4, 1.4))
        phi0 = rng.uniform(0, 2 * math.pi)
        result = sr_log(geodesic_batch(phi0, beta, t))
        assert result.residual <= 1e-9
        assert result.distance == pytest.approx(t, abs=1e-8)
        assert result.time <= cut_time_value(result.param.beta) + 1e-9


@pytest.mark.parametrize("angle", [1e-4, 1e-7])
def test_short_horizontal_rotation(angle):
    result = sr_log(axis_angle_to_rotation([0.0, 0.0, 1.0], angle))
    assert result.distance == pytest.approx(angle, rel=1e-9)
    assert result.residual <= 1e-9


@pytest.mark.parametrize("theta, kick", [(2.0, [1e-5, 0.0, 0.0]), (1.0, [0.0, 1e-4, 0.0]),
                                         (-2.5, [3e-5, -2e-5, 0.0])])
def test_targets_near_fiber(theta, kick):
    fiber = exp([0.0, 0.0, theta])
    offset = exp(kick)
    result = sr_log(fiber @ offset)
    assert result.residual <= 1e-9
    assert result.time <= cut_time_value(result.param.beta) + 1e-9
    # |d(g h) - d(g)| <= d(h) = |kick| for a horizontal kick
    assert abs(result.distance - distance(fiber)) <= np.linalg.norm(kick) + 1e-9
