#!/usr/bin/env python3
"""
cut_locus.py - Cut time t1(beta), diameter and cut locus of the identity (v1.0.0)

Branches:
- BetaZero   beta = 0, t1 = pi (antipodal great-circle arcs)
- FullCircle |beta| >= 1/sqrt(3), t1 = 2pi/sqrt(1+beta^2), endpoint in SO(2)
- DigonPi    0 < |beta| < 1/sqrt(3), t1 is the root of 2 psi - |beta| t1 = pi
             in (pi/w, 2pi/w), i.e. the digon area reaches pi
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from geodesic_engine import GeodesicParam, geodesic_batch, mn_array
from geometry_errors import CutSymmetryDomainError, NonFiniteParameterError
from so3_core import Rotation, log_array
from sphere_geometry import digon_angle

__version__ = "1.0.0"

logger = logging.getLogger('cut_locus')

INV_SQRT3 = 1.0 / math.sqrt(3.0)
DIAMETER = math.pi * math.sqrt(3.0)
TWO_PI = 2.0 * math.pi
BISECTION_ITERATIONS = 100
SO2_TOL = 1e-10


class CutBranch(str, Enum):
    FULL_CIRCLE = "FullCircle"
    DIGON_PI = "DigonPi"
    BETA_ZERO = "BetaZero"


@dataclass(frozen=True, eq=False)
class CutPoint:
    beta: float
    t1: float
    endpoint: Rotation
    branch: CutBranch


@dataclass
class DiameterCheck:
    """Grid maximization of t1 against pi sqrt(3)"""
    max_t1: float
    argmax_beta: float
    diameter: float
    gap: float
    passed: bool
    grid_points: int
    grid_max_t1: float = field(default=float('nan'))


def branch_of(beta: float) -> CutBranch:
    if beta == 0.0:
        return CutBranch.BETA_ZERO
    if abs(beta) >= INV_SQRT3:
        return CutBranch.FULL_CIRCLE
    return CutBranch.DIGON_PI


def psi(beta, t1):
    """Digon interior angle at x(0) and x(t1)"""
    return digon_angle(beta, t1)


def cut_equation(beta, t1):
    """F(t1) = 2 psi - |beta| t1 - pi; increasing on (pi/w, 2pi/w)"""
    value = 2.0 * np.asarray(digon_angle(beta, t1)) - np.abs(beta) * np.asarray(t1, dtype=float) - math.pi
    return float(value) if np.ndim(value) == 0 else value


def _bisect_digon_roots(abs_beta: np.ndarray, iterations: int = BISECTION_ITERATIONS) -> np.ndarray:
    omega = np.hypot(1.0, abs_beta)
    lo = math.pi / omega
    hi = TWO_PI / omega
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = cut_equation(abs_beta, mid) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    # Keep whichever of the final bracket points has the smallest residual
    candidates = np.stack([lo, 0.5 * (lo + hi), hi])
    residuals = np.abs(cut_equation(abs_beta[None, :], candidates))
    return candidates[np.argmin(residuals, axis=0), np.arange(abs_beta.size)]


def cut_times(betas: Union[Sequence[float], np.ndarray],
              iterations: int = BISECTION_ITERATIONS) -> np.ndarray:
    """Vectorized t1(beta)"""
    beta = np.atleast_1d(np.asarray(betas, dtype=float))
    if not np.all(np.isfinite(beta)):
        raise NonFiniteParameterError("cut_time needs finite beta values")
    abs_beta = np.abs(beta)
    t1 = np.full(beta.shape, math.pi)
    full = abs_beta >= INV_SQRT3
    t1[full] = TWO_PI / np.hypot(1.0, abs_beta[full])
    digon = (abs_beta > 0.0) & ~full
    if np.any(digon):
        t1[digon] = _bisect_digon_roots(abs_beta[digon], iterations)
    return t1


def cut_time_value(beta: float, iterations: int = BISECTION_ITERATIONS) -> float:
    return float(cut_times([beta], iterations)[0])


def cut_time(beta: float, iterations: int = BISECTION_ITERATIONS) -> CutPoint:
    t1 = cut_time_value(beta, iterations)
    return CutPoint(beta=float(beta), t1=t1,
                    endpoint=Rotation(geodesic_batch(0.0, beta, t1)),
                    branch=branch_of(beta))


def _psi_beta_partial(a: float, t1: float) -> float:
    """d psi / d|beta| at fixed t1"""
    omega = math.hypot(1.0, a)
    half = 0.5 * t1 * omega
    s, c = math.sin(half), math.cos(half)
    dhalf = 0.5 * t1 * a / omega
    u, v = a * s, omega * c
    du = s + a * c * dhalf
    dv = (a / omega) * c - omega * s * dhalf
    return (v * du - u * dv) / (u * u + v * v)


def cut_time_slope(beta: float) -> float:
    """dt1/d|beta|; on DigonPi by implicit differentiation of the cut equation"""
    a = abs(beta)
    if a == 0.0:
        return 0.0
    t1 = cut_time_value(beta)
    if a >= INV_SQRT3:
        return -TWO_PI * a / (1.0 + a * a) ** 1.5
    _, n = mn_array(a, t1)
    n = float(n)
    return (t1 - 2.0 * _psi_beta_partial(a, t1)) * (2.0 - n) / (a * n)


def diameter() -> float:
    return DIAMETER


def uniform_beta_grid(beta_min: float, beta_max: float, step: float) -> np.ndarray:
    count = int(math.floor((beta_max - beta_min) / step + 1e-9)) + 1
    return beta_min + step * np.arange(count)


def atan_beta_grid(n: int, beta_max: float = math.inf) -> np.ndarray:
    """beta = tan(xi), xi at the midpoints of n equal cells of (-atan beta_max, atan beta_max)"""
    if n < 1:
        raise ValueError(f"n must be >= 1 (got {n})")
    xi_max = math.atan(beta_max) if math.isfinite(beta_max) else 0.5 * math.pi
    xi = -xi_max + (np.arange(n) + 0.5) * (2.0 * xi_max / n)
    return np.tan(xi)


def diameter_check(betas: Optional[np.ndarray] = None, tol: float = 1e-6,
                   include_breakpoints: bool = True) -> DiameterCheck:
    """Maximize t1 over a beta grid (default: [-3, 3] step 1e-3)

    t1 has a cusp at the branch switch |beta| = 1/sqrt(3); the breakpoints are
    evaluated with the grid when include_breakpoints is set.
    """
    grid = uniform_beta_grid(-3.0, 3.0, 1e-3) if betas is None else np.asarray(betas, dtype=float)
    values = cut_times(grid)
    grid_max = float(np.max(values))
    if include_breakpoints:
        lo, hi = float(np.min(grid)), float(np.max(grid))
        extra = np.array([b for b in (-INV_SQRT3, INV_SQRT3) if lo <= b <= hi])
        if extra.size:
            grid = np.concatenate([grid, extra])
            values = np.concatenate([values, cut_times(extra)])
    k = int(np.argmax(values))
    gap = abs(float(values[k]) - DIAMETER)
    return DiameterCheck(max_t1=float(values[k]), argmax_beta=float(grid[k]), diameter=DIAMETER,
                         gap=gap, passed=gap <= tol, grid_points=int(grid.size), grid_max_t1=grid_max)


def cut_endpoint(beta: float) -> Rotation:
    return cut_time(beta).endpoint


def cut_symmetry_partner(phi0: float, beta: float) -> Tuple[float, float]:
    """(beta t1 + phi0 + pi mod 2pi, -beta): same endpoint at the common cut time

    Phases follow the control u(t) = cos(beta t + phi0) a + sin(beta t + phi0) b.
    """
    if beta * beta > 1.0 / 3.0 + 1e-12:
        raise CutSymmetryDomainError(f"Cut symmetry holds for beta^2 <= 1/3 only (beta={beta})")
    t1 = cut_time_value(beta)
    return (beta * t1 + phi0 + math.pi) % TWO_PI, -beta


def _cut_points_chunk(betas: Sequence[float]) -> List[CutPoint]:
    return [cut_time(float(b)) for b in betas]


def sample_cut_locus(n: int, beta_max: float = 5.0, jobs: int = 1) -> List[CutPoint]:
    """Cut points on the atan grid; chunks merged in grid order for any jobs"""
    betas = atan_beta_grid(n, beta_max)
    if jobs <= 1 or n < 2 * jobs:
        return _cut_points_chunk(betas)
    chunks = [chunk.tolist() for chunk in np.array_split(betas, jobs)]
    points: List[CutPoint] = []
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        for part in executor.map(_cut_points_chunk, chunks):
            points.extend(part)
    return points


def so2_deviation(R: Union[Rotation, np.ndarray]) -> float:
    """Largest gap between the first row/column and e1"""
    m = R.matrix if isinstance(R, Rotation) else np.asarray(R, dtype=float)
    return float(max(abs(m[0, 0] - 1.0), abs(m[0, 1]), abs(m[0, 2]), abs(m[1, 0]), abs(m[2, 0])))


def in_so2(R: Union[Rotation, np.ndarray], tol: float = SO2_TOL) -> bool:
    """Membership in exp(R c), the stabilizer of e1"""
    return so2_deviation(R) <= tol


def conjugate_rank_diagnostic(beta: float, h: float = 1e-6, rank_tol: float = 1e-6) -> Dict[str, object]:
    """Numerical rank of d(phi0, beta, t) -> gamma at (0, beta, t1(beta))

    Non-gating: drops below 3 on the conjugate set (beta^2 >= 1/3).
    """
    t1 = cut_time_value(beta)
    base = geodesic_batch(0.0, beta, t1)
    point = np.array([0.0, beta, t1])
    jacobian = np.empty((3, 3))
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        plus = geodesic_batch(*(point + step))
        minus = geodesic_batch(*(point - step))
        jacobian[:, k] = (log_array(base.T @ plus) - log_array(base.T @ minus)) / (2.0 * h)
    singular_values = np.linalg.svd(jacobian, compute_uv=False)
    rank = int(np.sum(singular_values > rank_tol * singular_values[0]))
    return {"beta": beta, "t1": t1, "rank": rank, "singular_values": singular_values.tolist()}


def translate_cut_locus(g: Union[Rotation, np.ndarray], points: Sequence[CutPoint]) -> List[Rotation]:
    """Cut locus of g: left translates of the cut endpoints"""
    m = g.matrix if isinstance(g, Rotation) else np.asarray(g, dtype=float)
    return [Rotation(m @ point.endpoint.matrix) for point in points]


def no_shorter_geodesic(beta: float, margin: float = 0.05, phi_grid: int = 64,
                        beta_grid: int = 256) -> float:
    """Closest approach (rotation angle) of geodesics of length t1 - margin to the cut endpoint

    Sweeps (phi0, beta') on a grid; beta' on the full atan grid.
    """
    point = cut_time(beta)
    length = point.t1 - margin
    phis = np.linspace(0.0, TWO_PI, phi_grid, endpoint=False)
    betas = atan_beta_grid(beta_grid)
    phi_mesh, beta_mesh = np.meshgrid(phis, betas, indexing='ij')
    reached = geodesic_batch(phi_mesh, beta_mesh, length)
    # trace(R^T g) gives the rotation angle of R^T g
    traces = np.einsum('...ij,ij->...', reached, point.endpoint.matrix)
    angles = np.arccos(np.clip(0.5 * (traces - 1.0), -1.0, 1.0))
    return float(np.min(angles))
