#!/usr/bin/env python3
"""
geodesic_engine.py - Unit-speed geodesics from the identity (v1.0.0)

Three evaluators of gamma_(phi0, beta)(t):
- geodesic_closed_form: explicit matrix in m, n, beta, phi0 (canonical path)
- geodesic_product:     exp(t(cos phi0 a + sin phi0 b + beta c)) exp(-t beta c)
- geodesic_ode:         RK4 on gamma' = gamma u(t), u = cos(beta t + phi0) a + sin(beta t + phi0) b

plus the symmetries used by the distance solver (restart, sign reversal,
conjugation by exp(phi0 c)).
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.linalg import polar

from geometry_errors import NonFiniteParameterError
from so3_core import LieVector, Rotation, exp_array, hat

__version__ = "1.0.0"

logger = logging.getLogger('geodesic_engine')

TWO_PI = 2.0 * math.pi
ODE_STEP = 1e-3


@dataclass(frozen=True)
class GeodesicParam:
    """Initial heading phi0 (normalized to [0, 2pi)) and vertical momentum beta"""
    phi0: float
    beta: float

    def __post_init__(self):
        if not math.isfinite(self.phi0) or not math.isfinite(self.beta):
            raise NonFiniteParameterError(f"Geodesic parameters must be finite (phi0={self.phi0}, beta={self.beta})")
        phi0 = math.fmod(float(self.phi0), TWO_PI)
        if phi0 < 0.0:
            phi0 += TWO_PI
        if phi0 >= TWO_PI:
            phi0 = 0.0
        object.__setattr__(self, 'phi0', phi0)
        object.__setattr__(self, 'beta', float(self.beta))

    @property
    def omega(self) -> float:
        return math.hypot(1.0, self.beta)

    def initial_velocity(self) -> LieVector:
        return LieVector(math.cos(self.phi0), math.sin(self.phi0), 0.0)


@dataclass(frozen=True)
class MNCoefficients:
    """m = sin(t w)/w, n = (1 - cos(t w))/w^2 with w = sqrt(1 + beta^2)"""
    m: float
    n: float

    def identity_gap(self, beta: float) -> float:
        """|m^2 w^2 + (1 - n w^2)^2 - 1|"""
        w2 = 1.0 + beta * beta
        return abs(self.m * self.m * w2 + (1.0 - self.n * w2) ** 2 - 1.0)


def _check_time(t: float):
    if not math.isfinite(t):
        raise NonFiniteParameterError(f"Geodesic time must be finite (t={t})")


def mn_array(beta, t) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized m, n; 1 - cos is taken as 2 sin^2 to keep n accurate near t = 0"""
    beta = np.asarray(beta, dtype=float)
    t = np.asarray(t, dtype=float)
    omega = np.hypot(1.0, beta)
    theta = t * omega
    m = np.sin(theta) / omega
    n = 2.0 * np.sin(0.5 * theta) ** 2 / (omega * omega)
    return m, n


def mn(beta: float, t: float) -> MNCoefficients:
    _check_time(t)
    if not math.isfinite(beta):
        raise NonFiniteParameterError(f"beta must be finite (beta={beta})")
    m, n = mn_array(beta, t)
    return MNCoefficients(float(m), float(n))


def geodesic_batch(phi0, beta, t) -> np.ndarray:
    """Closed-form geodesic matrices for broadcast arrays of (phi0, beta, t); shape (..., 3, 3)"""
    phi0, beta, t = np.broadcast_arrays(np.asarray(phi0, dtype=float),
                                        np.asarray(beta, dtype=float),
                                        np.asarray(t, dtype=float))
    m, n = mn_array(beta, t)
    s = beta * t
    psi = s + phi0
    cphi, sphi = np.cos(phi0), np.sin(phi0)
    cs, ss = np.cos(s), np.sin(s)
    cpsi, spsi = np.cos(psi), np.sin(psi)
    q = 1.0 - beta * beta * n
    bm = beta * m
    bn = beta * n

    out = np.empty(phi0.shape + (3, 3))
    out[..., 0, 0] = 1.0 - n
    out[..., 0, 1] = -m * cpsi - bn * spsi
    out[..., 0, 2] = -m * spsi + bn * cpsi
    out[..., 1, 0] = m * cphi - bn * sphi
    out[..., 1, 1] = q * cs + bm * ss - n * cpsi * cphi
    out[..., 1, 2] = q * ss - bm * cs - n * spsi * cphi
    out[..., 2, 0] = m * sphi + bn * cphi
    out[..., 2, 1] = bm * cs - q * ss - n * cpsi * sphi
    out[..., 2, 2] = q * cs + bm * ss - n * spsi * sphi
    return out


def geodesic_closed_form(p: GeodesicParam, t: float) -> Rotation:
    """Explicit geodesic matrix; the canonical evaluator"""
    _check_time(t)
    return Rotation(geodesic_batch(p.phi0, p.beta, t))


def geodesic_product(p: GeodesicParam, t: float) -> Rotation:
    """Product of the two one-parameter subgroups"""
    _check_time(t)
    left = exp_array(t * np.array([math.cos(p.phi0), math.sin(p.phi0), p.beta]))
    right = exp_array(np.array([0.0, 0.0, -t * p.beta]))
    return Rotation(left @ right)


def control(p: GeodesicParam, t: float) -> LieVector:
    """Horizontal control u(t) = cos(beta t + phi0) a + sin(beta t + phi0) b"""
    phase = p.beta * t + p.phi0
    return LieVector(math.cos(phase), math.sin(phase), 0.0)


def _control_matrix(p: GeodesicParam, s: float) -> np.ndarray:
    return hat(control(p, s))


def geodesic_ode(p: GeodesicParam, t: float, step: float = ODE_STEP) -> Rotation:
    """Classical RK4 with polar re-projection onto SO(3) after every step"""
    _check_time(t)
    if not step > 0.0:
        raise ValueError(f"ODE step must be positive (got {step})")
    if t == 0.0:
        return Rotation.identity()

    steps = max(1, int(math.ceil(abs(t) / step - 1e-9)))
    h = t / steps
    gamma = np.eye(3)
    for k in range(steps):
        s = k * h
        u1 = _control_matrix(p, s)
        u2 = _control_matrix(p, s + 0.5 * h)
        u4 = _control_matrix(p, s + h)
        k1 = gamma @ u1
        k2 = (gamma + 0.5 * h * k1) @ u2
        k3 = (gamma + 0.5 * h * k2) @ u2
        k4 = (gamma + h * k3) @ u4
        gamma = gamma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        gamma, _ = polar(gamma)

    logger.debug(f"geodesic_ode phi0={p.phi0:.6f} beta={p.beta:.6f} t={t:.6f} steps={steps}")
    return Rotation(gamma)


def restart(p: GeodesicParam, t0: float) -> GeodesicParam:
    """Parameters of s -> gamma(t0)^-1 gamma(t0 + s)"""
    _check_time(t0)
    return GeodesicParam(p.beta * t0 + p.phi0, p.beta)


def reverse_sign(p: GeodesicParam, t: float) -> Tuple[GeodesicParam, float]:
    """((phi0 + pi, -beta), -t) reaches the same point as (p, t)"""
    _check_time(t)
    return GeodesicParam(p.phi0 + math.pi, -p.beta), -t


def phase_rotation(phi0: float) -> np.ndarray:
    """B = exp(phi0 c), the rotation about e1 by phi0"""
    c, s = math.cos(phi0), math.sin(phi0)
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, c, -s],
                     [0.0, s, c]])


def conjugate_phase(p_base: GeodesicParam, phi0: float, t: float) -> Rotation:
    """B gamma_(0, beta)(t) B^-1 with B = exp(phi0 c); equals gamma_(phi0, beta)(t)"""
    if min(p_base.phi0, TWO_PI - p_base.phi0) > 1e-12:
        raise ValueError(f"conjugate_phase expects a base parameter with phi0 = 0 (got {p_base.phi0})")
    B = phase_rotation(phi0)
    base = geodesic_batch(0.0, p_base.beta, t)
    return Rotation(B @ base @ B.T)


def left_translate(g: Union[Rotation, np.ndarray], p: GeodesicParam, t: float) -> Rotation:
    """Geodesic from g: g gamma_p(t)"""
    m = g.matrix if isinstance(g, Rotation) else np.asarray(g, dtype=float)
    return Rotation(m @ geodesic_batch(p.phi0, p.beta, t))


def sample_geodesic(p: GeodesicParam, t_max: float, steps: int) -> Tuple[np.ndarray, np.ndarray]:
    """Uniform times (steps of them, ending at t_max) and the closed-form matrices"""
    if steps < 1:
        raise ValueError(f"steps must be >= 1 (got {steps})")
    _check_time(t_max)
    times = np.linspace(0.0, t_max, steps) if steps > 1 else np.array([t_max])
    return times, geodesic_batch(p.phi0, p.beta, times)
