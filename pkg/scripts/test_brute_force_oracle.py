import math

import numpy as np
import pytest

from brute_force_oracle import _PathProblem, brute_force_distance, brute_force_search
from cut_locus import DIAMETER, cut_endpoint
from geodesic_engine import geodesic_batch
from sr_distance import distance
from so3_core import exp


def test_path_endpoint_is_product_of_exponentials():
    problem = _PathProblem(np.eye(3), 4)
    headings = np.array([0.0, 0.5, 1.0, 1.5])
    lengths = np.array([0.2, 0.3, 0.1, 0.4])
    expected = np.eye(3)
    for th, ln in zip(headings, lengths):
        expected = expected @ exp([ln * math.cos(th), ln * math.sin(th), 0.0]).matrix
    np.testing.assert_allclose(problem.endpoints(np.concatenate([headings, lengths])), expected, atol=1e-15)


def test_straight_segment_is_feasible_immediately():
    target = exp([0.4, 0.0, 0.0]).matrix
    problem = _PathProblem(target, 4)
    z = np.concatenate([np.zeros(4), np.full(4, 0.1)])
    assert np.linalg.norm(problem.constraint(z)) <= 1e-14
    assert problem.objective(z) == pytest.approx(0.4)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        brute_force_search(np.eye(3), segments=3)
    with pytest.raises(ValueError):
        brute_force_search(np.eye(3), budget=0)


@pytest.mark.slow
def test_deterministic_for_fixed_seed():
    target = geodesic_batch(0.3, 0.8, 1.2)
    first = brute_force_search(target, segments=8, budget=4, seed=7)
    second = brute_force_search(target, segments=8, budget=4, seed=7, jobs=2)
    assert first.bound == second.bound
    assert first.mismatch == second.mismatch


@pytest.mark.slow
@pytest.mark.parametrize("target", [
    geodesic_batch(0.3, 0.8, 1.2),
    cut_endpoint(0.3).matrix,
    exp([0.0, 0.0, math.pi]).matrix,
])
def test_bound_sandwiches_distance(target):
    d = distance(target)
    report = brute_force_search(target, segments=16, budget=60, seed=1)
    assert report.feasible
    assert d - 1e-2 <= report.bound <= d + 5e-2
    assert report.bound <= DIAMETER * 1.2


@pytest.mark.slow
def test_brute_force_distance_returns_bound():
    target = geodesic_batch(1.0, -0.4, 0.9)
    assert brute_force_distance(target, segments=8, budget=5, seed=3) == pytest.approx(
        brute_force_search(target, segments=8, budget=5, seed=3).bound)
