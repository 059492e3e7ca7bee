#!/usr/bin/env python3
"""
sphere_geometry.py - Projected geodesics on S^2 (v1.0.0)

The projection R -> R e1 sends geodesics to circles of geodesic curvature
-|beta| (measured against the right-hand normal T x N). The arc
over [0, t1] and its great-circle chord bound a digon with interior angle psi
and area 2 psi - |beta| t1. Transported frames gamma(t) e2 are Levi-Civita
parallel along the projected curve; around a closed projection they turn by
the enclosed area.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from geodesic_engine import GeodesicParam, geodesic_batch, mn_array, phase_rotation
from geometry_errors import DigonDomainError, InsufficientSamplesError
from so3_core import Rotation

__version__ = "1.0.0"

logger = logging.getLogger('sphere_geometry')

TWO_PI = 2.0 * math.pi
E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])

MIN_CURVATURE_SAMPLES = 5
MIN_TRANSPORT_SAMPLES = 10


@dataclass(frozen=True)
class S2Point:
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"S2Point must have unit length (|p|^2 = {norm2!r})")

    @classmethod
    def from_array(cls, v: Sequence[float]) -> "S2Point":
        v = np.asarray(v, dtype=float).reshape(3)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class DigonGeometry:
    """Chord length r, interior angle psi, area"""
    r: float
    psi: float
    area: float


PointsLike = Union[np.ndarray, Iterable[S2Point]]


def _points_array(points: PointsLike) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return np.asarray(points, dtype=float).reshape(-1, 3)
    return np.array([p.as_array() if isinstance(p, S2Point) else p for p in points], dtype=float).reshape(-1, 3)


def project(R: Union[Rotation, np.ndarray]) -> S2Point:
    m = R.matrix if isinstance(R, Rotation) else np.asarray(R, dtype=float)
    return S2Point.from_array(m[:, 0])


def projected_curve(p: GeodesicParam, times: np.ndarray) -> np.ndarray:
    """x(t) = gamma(t) e1 for an array of times; shape (len(times), 3)"""
    return geodesic_batch(p.phi0, p.beta, np.asarray(times, dtype=float))[..., :, 0]


def spherical_distance(x: Union[S2Point, np.ndarray], y: Union[S2Point, np.ndarray]) -> float:
    a = x.as_array() if isinstance(x, S2Point) else np.asarray(x, dtype=float)
    b = y.as_array() if isinstance(y, S2Point) else np.asarray(y, dtype=float)
    return float(math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b))))


def circle_center(beta: float, phi0: float = 0.0) -> S2Point:
    """Center of the projected circle on the side of e1; sign(beta)(beta, 0, 1)/w, rotated by exp(phi0 c)"""
    sign = -1.0 if beta < 0 else 1.0
    omega = math.hypot(1.0, beta)
    center = sign * np.array([beta, 0.0, 1.0]) / omega
    if phi0 != 0.0:
        center = phase_rotation(phi0) @ center
    return S2Point.from_array(center)


def circle_radius(beta: float) -> float:
    """arccos(|beta|/sqrt(1+beta^2)) in (0, pi/2]"""
    return math.atan2(1.0, abs(beta))


def _check_arc_inputs(r: float, alpha: float):
    if not (0.0 <= alpha <= TWO_PI):
        raise ValueError(f"alpha must lie in [0, 2pi] (got {alpha})")
    if not (0.0 <= r <= 0.5 * math.pi):
        raise ValueError(f"r must lie in [0, pi/2] (got {r})")


def arc_length(r: float, alpha: float) -> float:
    _check_arc_inputs(r, alpha)
    return alpha * math.sin(r)


def sector_area(r: float, alpha: float) -> float:
    _check_arc_inputs(r, alpha)
    return alpha * (1.0 - math.cos(r))


def curvature_exact(beta: float) -> float:
    return -abs(beta)


def cap_area(beta: float) -> float:
    """Area enclosed by the full projected circle"""
    return TWO_PI * (1.0 - abs(beta) / math.hypot(1.0, beta))


def digon_angle(beta, t1):
    """Interior angle psi = atan2(|beta| |sin(th/2)|, w cos(th/2)) in [0, pi], th = t1 w; vectorized"""
    beta = np.asarray(beta, dtype=float)
    omega = np.hypot(1.0, beta)
    half = 0.5 * np.asarray(t1, dtype=float) * omega
    psi = np.arctan2(np.abs(beta) * np.abs(np.sin(half)), omega * np.cos(half))
    return float(psi) if psi.ndim == 0 else psi


def full_period(beta: float) -> float:
    return TWO_PI / math.hypot(1.0, beta)


def _check_digon(beta: float, t1: float, allow_closed: bool = False):
    period = full_period(beta)
    upper_ok = t1 <= period * (1.0 + 1e-12) if allow_closed else t1 < period
    if beta == 0.0 or not (t1 > 0.0 and upper_ok):
        raise DigonDomainError(
            f"Digon needs beta != 0 and 0 < t1 < 2pi/sqrt(1+beta^2) = {period:.12g} (beta={beta}, t1={t1})")


def digon(beta: float, t1: float) -> DigonGeometry:
    _check_digon(beta, t1)
    m, n = mn_array(beta, t1)
    r = math.atan2(math.sqrt(max(float(n) * (2.0 - float(n)), 0.0)), 1.0 - float(n))
    psi = digon_angle(beta, t1)
    return DigonGeometry(r=r, psi=psi, area=2.0 * psi - abs(beta) * t1)


def psi_rate(beta: float, t1: float) -> float:
    """d psi / d t1 = |beta| / (2 - n)"""
    _, n = mn_array(beta, t1)
    return abs(beta) / (2.0 - float(n))


def area_rate(beta: float, t1: float) -> float:
    """d area / d t1 = |beta| (2/(2 - n) - 1) > 0"""
    _, n = mn_array(beta, t1)
    return abs(beta) * (2.0 / (2.0 - float(n)) - 1.0)


def geodesic_curvature_numeric(samples: PointsLike, right_normal: bool = True) -> float:
    """Mean signed geodesic curvature of a uniformly sampled spherical curve

    Central differences; with right_normal the normal is T x N (pointing to
    the right of the motion), otherwise N x T.
    """
    x = _points_array(samples)
    if len(x) < MIN_CURVATURE_SAMPLES:
        raise InsufficientSamplesError(f"Curvature needs at least {MIN_CURVATURE_SAMPLES} samples (got {len(x)})")
    d1 = 0.5 * (x[2:] - x[:-2])
    d2 = x[2:] - 2.0 * x[1:-1] + x[:-2]
    speed = np.linalg.norm(d1, axis=1)
    kappa = np.einsum('ij,ij->i', d2, np.cross(x[1:-1], d1)) / speed ** 3
    sign = -1.0 if right_normal else 1.0
    return sign * float(np.mean(kappa))


def triangle_areas(reference: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Signed areas of spherical triangles (reference, a_i, b_i)"""
    det = np.einsum('j,ij->i', reference, np.cross(a, b))
    denom = 1.0 + a @ reference + np.einsum('ij,ij->i', a, b) + b @ reference
    return 2.0 * np.arctan2(det, denom)


def spherical_polygon_area(vertices: PointsLike, reference: Optional[np.ndarray] = None) -> float:
    """Signed area of a closed geodesic polygon (positive when counterclockwise about the reference)"""
    v = _points_array(vertices)
    if reference is None:
        reference = v.mean(axis=0)
    reference = np.asarray(reference, dtype=float)
    reference = reference / np.linalg.norm(reference)
    return float(np.sum(triangle_areas(reference, v, np.roll(v, -1, axis=0))))


def gauss_bonnet_residual(beta: float, t1: float, samples: int = 10000) -> float:
    """|polygon area of (arc + chord) - (2 psi - |beta| t1)|

    t1 may also equal the full period; the region is then the enclosed cap.
    """
    _check_digon(beta, t1, allow_closed=True)
    if samples < 3:
        raise InsufficientSamplesError(f"Digon polygon needs at least 3 samples (got {samples})")
    times = np.linspace(0.0, t1, samples)
    boundary = projected_curve(GeodesicParam(0.0, beta), times)
    if t1 >= full_period(beta) * (1.0 - 1e-12):
        reference = circle_center(beta).as_array()
    else:
        reference = None
    numeric = abs(spherical_polygon_area(boundary, reference))
    formula = 2.0 * digon_angle(beta, t1) - abs(beta) * t1
    residual = abs(numeric - formula)
    logger.debug(f"gauss_bonnet beta={beta:.6f} t1={t1:.9f} numeric={numeric:.12f} formula={formula:.12f}")
    return residual


def transport_defect(p: GeodesicParam, t1: float, samples: int = 1000) -> float:
    """Max tangential part of d/dt[gamma(t) e2] along x(t) = gamma(t) e1 (central differences)"""
    if samples < MIN_TRANSPORT_SAMPLES:
        raise InsufficientSamplesError(f"Transport needs at least {MIN_TRANSPORT_SAMPLES} samples (got {samples})")
    times = np.linspace(0.0, t1, samples)
    h = times[1] - times[0]
    frames = geodesic_batch(p.phi0, p.beta, times)
    x = frames[:, :, 0]
    v = frames[:, :, 1]
    dv = (v[2:] - v[:-2]) / (2.0 * h)
    xm = x[1:-1]
    tangential = dv - np.einsum('ij,ij->i', dv, xm)[:, None] * xm
    return float(np.max(np.linalg.norm(tangential, axis=1)))


def _transport_step(x_from: np.ndarray, x_to: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """Rotate vector by the minimal rotation taking x_from to x_to"""
    axis = np.cross(x_from, x_to)
    s = np.linalg.norm(axis)
    c = float(np.dot(x_from, x_to))
    if s < 1e-300:
        return vector
    k = axis / s
    return vector * c + np.cross(k, vector) * s + k * np.dot(k, vector) * (1.0 - c)


def _turning_angle(v0: np.ndarray, v1: np.ndarray, normal: np.ndarray) -> float:
    angle = math.atan2(float(np.dot(np.cross(v0, v1), normal)), float(np.dot(v0, v1)))
    return angle % TWO_PI


def holonomy_angle(p: GeodesicParam, t1: float, samples: int = 1000) -> float:
    """Turning of gamma(0) e2 after discrete transport along the sampled projection (closed by its chord), in [0, 2pi)"""
    if samples < MIN_TRANSPORT_SAMPLES:
        raise InsufficientSamplesError(f"Transport needs at least {MIN_TRANSPORT_SAMPLES} samples (got {samples})")
    x = projected_curve(p, np.linspace(0.0, t1, samples))
    v0 = E2.copy()
    v = v0
    for k in range(len(x) - 1):
        v = _transport_step(x[k], x[k + 1], v)
    v = _transport_step(x[-1], x[0], v)
    return _turning_angle(v0, v, x[0])


def transport_frame_angle(p: GeodesicParam, t1: float, closure_tol: float = 1e-9) -> float:
    """Same angle from the exact frame gamma(t1) e2; the projection must close at t1"""
    frame = geodesic_batch(p.phi0, p.beta, t1)
    if np.linalg.norm(frame[:, 0] - E1) > closure_tol:
        raise ValueError(f"Projected curve is not closed at t1={t1}")
    return _turning_angle(E2, frame[:, 1], E1)


def chord_angle(p: GeodesicParam, t1: float) -> float:
    """Measured angle at x(0) between the curve tangent and the great-circle chord to x(t1)"""
    x0 = E1
    x1 = projected_curve(p, np.array([t1]))[0]
    tangent = np.array([0.0, math.cos(p.phi0), math.sin(p.phi0)])
    chord = x1 - np.dot(x1, x0) * x0
    chord /= np.linalg.norm(chord)
    return math.atan2(float(np.linalg.norm(np.cross(tangent, chord))), float(np.dot(tangent, chord)))
