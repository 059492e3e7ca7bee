#!/usr/bin/env python3
"""
sr_distance.py - Sub-Riemannian logarithm and distance from the identity (v1.0.0)

sr_log(g) finds (phi0, beta, t) with gamma_(phi0, beta)(t) = g and t <= t1(beta):

1. SO(2) fiber, g = exp(theta c): closed form on the FullCircle branch (any phi0)
2. first column -e1: the beta = 0 half turn (two preimages, phi0 and phi0 + pi)
3. near the identity (|log g| <= small_angle): seeds read off log(g) and a
   three-parameter LM scaled by its Jacobian
4. generic: phi0 is eliminated with the conjugation-invariant data
       n = 1 - g11,   w = z_r conj(z_c) = e^{i beta t} (m - i beta n)^2
   (z_c = g21 + i g31, z_r = -(g12 + i g13)); a cached (atan beta, t/t1) grid,
   log-spaced in t/t1 below the first linear node, seeds Levenberg-Marquardt
   in (beta, t) on residuals relative to n, phi0 is read off z_c, and a final
   LM pass polishes all three parameters on log(gamma^-1 g)
5. near the fiber: bounded trust-region fit in (phi0, beta, t/t1 <= 1) around
   the fiber beta
6. fallback: (phi0, atan beta, t/t1) grid + three-parameter LM

Residuals are rotation angles |log(R1^T R2)|.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy.optimize import least_squares

from cut_locus import DIAMETER, INV_SQRT3, TWO_PI, cut_time_value, cut_times, so2_deviation
from geodesic_engine import GeodesicParam, geodesic_batch, mn_array, reverse_sign
from geometry_errors import NoConvergenceError, RadiusOutOfRangeError
from so3_core import Rotation, log_array, rotation_distance

__version__ = "1.0.0"

logger = logging.getLogger('sr_distance')


class Multiplicity(str, Enum):
    UNIQUE = "Unique"
    CUT_PAIR = "CutPair"
    CIRCLE = "Circle"


@dataclass
class DistanceResult:
    distance: float
    param: GeodesicParam
    time: float
    residual: float
    multiplicity: Multiplicity = Multiplicity.UNIQUE
    oracle_bound: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-9
    xi_grid: int = 192
    tau_grid: int = 96
    candidates: int = 8
    max_nfev: int = 200
    so2_tol: float = 1e-10
    cut_tol: float = 1e-9
    fallback_phi_grid: int = 24
    fallback_xi_grid: int = 64
    fallback_tau_grid: int = 32
    tau_log_grid: int = 24
    tau_log_min: float = 1e-8
    small_angle: float = 0.1
    near_fiber: float = 1e-2
    near_fiber_phi: int = 16

    @classmethod
    def from_config(cls, config) -> "SolverSettings":
        """Build from a GeometryConfig-like object exposing get('section.key')"""
        return cls(tol=float(config.get("solver.tol", cls.tol)),
                   xi_grid=int(config.get("solver.xi_grid", cls.xi_grid)),
                   tau_grid=int(config.get("solver.tau_grid", cls.tau_grid)),
                   candidates=int(config.get("solver.candidates", cls.candidates)),
                   max_nfev=int(config.get("solver.max_nfev", cls.max_nfev)),
                   so2_tol=float(config.get("cut.so2_tol", cls.so2_tol)),
                   fallback_phi_grid=int(config.get("solver.fallback_phi_grid", cls.fallback_phi_grid)),
                   fallback_xi_grid=int(config.get("solver.fallback_xi_grid", cls.fallback_xi_grid)),
                   fallback_tau_grid=int(config.get("solver.fallback_tau_grid", cls.fallback_tau_grid)),
                   tau_log_grid=int(config.get("solver.tau_log_grid", cls.tau_log_grid)),
                   tau_log_min=float(config.get("solver.tau_log_min", cls.tau_log_min)),
                   small_angle=float(config.get("solver.small_angle", cls.small_angle)),
                   near_fiber=float(config.get("solver.near_fiber", cls.near_fiber)),
                   near_fiber_phi=int(config.get("solver.near_fiber_phi", cls.near_fiber_phi)))


class SphereSample(NamedTuple):
    param: GeodesicParam
    t: float
    rotation: Rotation


RotationLike = Union[Rotation, np.ndarray]

_LM_TOL = 1e-15


def _target_matrix(g: RotationLike) -> np.ndarray:
    if isinstance(g, Rotation):
        return g.matrix
    return Rotation.from_matrix(g).matrix


def _xi_midpoints(count: int) -> np.ndarray:
    return -0.5 * math.pi + (np.arange(count) + 0.5) * (math.pi / count)


@lru_cache(maxsize=8)
def _invariant_grid(xi_grid: int, tau_grid: int, tau_log_grid: int = 0,
                    tau_log_min: float = 1e-8) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """beta values, times and the invariants (n, w) on the (xi, tau) grid"""
    beta = np.tan(_xi_midpoints(xi_grid))
    t1 = cut_times(beta)
    tau = (np.arange(tau_grid) + 1.0) / tau_grid
    if tau_log_grid > 0:
        # log-spaced times below the first linear node reach targets near the identity
        short = np.logspace(math.log10(tau_log_min), math.log10(tau[0]), tau_log_grid, endpoint=False)
        tau = np.concatenate([short, tau])
    B = np.repeat(beta[:, None], tau.size, axis=1)
    T = t1[:, None] * tau[None, :]
    m, n = mn_array(B, T)
    w = np.exp(1j * B * T) * (m - 1j * B * n) ** 2
    return B, T, n, w


def _invariant_residual(x: np.ndarray, n_target: float, w_target: complex,
                        scale: float = 1.0) -> np.ndarray:
    beta, t = x
    m, n = mn_array(beta, t)
    w = np.exp(1j * beta * t) * (m - 1j * beta * n) ** 2 - w_target
    return np.array([float(n) - n_target, w.real, w.imag]) / scale


def _rotation_residual(x: np.ndarray, target: np.ndarray) -> np.ndarray:
    reached = geodesic_batch(x[0], x[1], x[2])
    return log_array(reached.T @ target)


def _local_minima(values: np.ndarray, count: int) -> np.ndarray:
    """Flat indices of grid local minima, best first, padded with global best points"""
    padded = np.pad(values, 1, constant_values=np.inf)
    center = padded[1:-1, 1:-1]
    mask = ((center <= padded[:-2, 1:-1]) & (center <= padded[2:, 1:-1])
            & (center <= padded[1:-1, :-2]) & (center <= padded[1:-1, 2:]))
    flat = values.ravel()
    minima = np.flatnonzero(mask.ravel())
    ordered = list(minima[np.argsort(flat[minima])][:count])
    if len(ordered) < count:
        for idx in np.argsort(flat)[:count]:
            if idx not in ordered:
                ordered.append(idx)
            if len(ordered) >= count:
                break
    return np.array(ordered, dtype=int)


def _phase_from_first_column(target: np.ndarray, beta: float, t: float) -> float:
    m, n = mn_array(beta, t)
    z_c = complex(target[1, 0], target[2, 0])
    return float(np.angle(z_c * np.conj(complex(float(m), beta * float(n)))))


def _normalize(phi0: float, beta: float, t: float) -> Tuple[GeodesicParam, float]:
    param = GeodesicParam(phi0, beta)
    if t < 0.0:
        return reverse_sign(param, t)
    return param, t


def _polish(target: np.ndarray, x0: np.ndarray, settings: SolverSettings,
            x_scale: Union[float, str] = 1.0) -> Tuple[np.ndarray, int]:
    result = least_squares(_rotation_residual, x0, args=(target,), method='lm', x_scale=x_scale,
                           xtol=_LM_TOL, ftol=_LM_TOL, gtol=_LM_TOL, max_nfev=settings.max_nfev)
    return result.x, int(result.nfev)


class _Candidate(NamedTuple):
    param: GeodesicParam
    time: float
    residual: float
    t1: float


def _evaluate(target: np.ndarray, x: np.ndarray) -> _Candidate:
    param, t = _normalize(float(x[0]), float(x[1]), float(x[2]))
    residual = rotation_distance(geodesic_batch(param.phi0, param.beta, t), target)
    return _Candidate(param, t, residual, cut_time_value(param.beta))


def _acceptable(candidate: _Candidate, settings: SolverSettings) -> bool:
    return candidate.residual <= settings.tol and candidate.time <= candidate.t1 + settings.cut_tol


def _multiplicity(candidate: _Candidate, settings: SolverSettings) -> Multiplicity:
    on_cut = abs(candidate.time - candidate.t1) <= 1e-7 * max(1.0, candidate.t1)
    if on_cut and abs(candidate.param.beta) < INV_SQRT3:
        return Multiplicity.CUT_PAIR
    return Multiplicity.UNIQUE


def _result(candidate: _Candidate, multiplicity: Multiplicity, diagnostics: Dict[str, Any]) -> DistanceResult:
    return DistanceResult(distance=candidate.time, param=candidate.param, time=candidate.time,
                          residual=candidate.residual, multiplicity=multiplicity, diagnostics=diagnostics)


def _fiber_solution(target: np.ndarray) -> Optional[DistanceResult]:
    """g = exp(theta c): t w = 2 pi and beta t = -theta (mod 2 pi) with |beta| t in [pi, 2 pi)"""
    theta = math.atan2(target[2, 1], target[1, 1])
    if abs(theta) <= 1e-15:
        return DistanceResult(distance=0.0, param=GeodesicParam(0.0, 0.0), time=0.0,
                              residual=rotation_distance(np.eye(3), target),
                              diagnostics={"phase": "identity"})
    # endpoint exp(-beta t c) with beta t = 2pi - theta for theta > 0
    q = (TWO_PI - abs(theta)) / TWO_PI
    root = math.sqrt(1.0 - q * q)
    beta = math.copysign(q / root, theta)
    t = TWO_PI * root
    param = GeodesicParam(0.0, beta)
    residual = rotation_distance(geodesic_batch(0.0, beta, t), target)
    return DistanceResult(distance=t, param=param, time=t, residual=residual,
                          multiplicity=Multiplicity.CIRCLE, diagnostics={"phase": "fiber"})


def _half_turn_solution(target: np.ndarray) -> DistanceResult:
    """First column -e1: rotation by pi about (0, -sin phi0, cos phi0)"""
    phi0 = 0.5 * math.atan2(-target[1, 2], 0.5 * (target[2, 2] - target[1, 1]))
    param = GeodesicParam(phi0, 0.0)
    residual = rotation_distance(geodesic_batch(param.phi0, 0.0, math.pi), target)
    return DistanceResult(distance=math.pi, param=param, time=math.pi, residual=residual,
                          multiplicity=Multiplicity.CUT_PAIR, diagnostics={"phase": "half_turn"})


def _invariant_targets(target: np.ndarray) -> Tuple[float, complex]:
    """(n, w) of the target; n = 1 - g11 is taken from the first column when g11 > 0"""
    g11 = float(target[0, 0])
    if g11 > 0.0:
        n_target = (target[1, 0] ** 2 + target[2, 0] ** 2) / (1.0 + g11)
    else:
        n_target = 1.0 - g11
    z_c = complex(target[1, 0], target[2, 0])
    z_r = -complex(target[0, 1], target[0, 2])
    return float(n_target), z_r * np.conj(z_c)


def _small_target_seeds(target: np.ndarray) -> List[np.ndarray]:
    """Seeds read off log(g) = x_a a + x_b b + x_c c, where x_c ~ beta t^3 / 12"""
    x_a, x_b, x_c = log_array(target)
    t0 = math.hypot(x_a, x_b)
    if t0 == 0.0:
        return []
    phi0 = math.atan2(x_b, x_a)
    seeds = [np.array([phi0, 0.0, t0])]
    beta_guess = min(12.0 * abs(x_c) / t0 ** 3, 1e4)
    if beta_guess > 0.0:
        seeds += [np.array([phi0, beta_guess, t0]), np.array([phi0, -beta_guess, t0])]
    return seeds


def _small_target_search(target: np.ndarray, settings: SolverSettings) -> Tuple[Optional[_Candidate], Optional[_Candidate], Dict[str, Any]]:
    best: Optional[_Candidate] = None
    nfev = 0
    seeds = _small_target_seeds(target)
    for tried, x0 in enumerate(seeds, start=1):
        x, polish_nfev = _polish(target, x0, settings, x_scale='jac')
        nfev += polish_nfev
        candidate = _evaluate(target, x)
        if best is None or candidate.residual < best.residual:
            best = candidate
        if _acceptable(candidate, settings):
            return candidate, best, {"phase": "small_target", "candidates_tried": tried, "nfev": nfev}
    return None, best, {"phase": "small_target", "candidates_tried": len(seeds), "nfev": nfev}


def _invariant_search(target: np.ndarray, settings: SolverSettings) -> Tuple[Optional[_Candidate], Optional[_Candidate], Dict[str, Any]]:
    n_target, w_target = _invariant_targets(target)
    scale = min(1.0, max(n_target, 1e-30))

    B, T, n, w = _invariant_grid(settings.xi_grid, settings.tau_grid,
                                 settings.tau_log_grid, settings.tau_log_min)
    grid_residual = ((n - n_target) ** 2 + np.abs(w - w_target) ** 2) / scale ** 2
    seeds = _local_minima(grid_residual, settings.candidates)

    best: Optional[_Candidate] = None
    nfev = 0
    for tried, idx in enumerate(seeds, start=1):
        beta0, t0 = float(B.flat[idx]), float(T.flat[idx])
        reduced = least_squares(_invariant_residual, np.array([beta0, t0]), args=(n_target, w_target, scale),
                                method='lm', xtol=_LM_TOL, ftol=_LM_TOL, gtol=_LM_TOL,
                                max_nfev=settings.max_nfev)
        beta, t = float(reduced.x[0]), float(reduced.x[1])
        phi0 = _phase_from_first_column(target, beta, t)
        x, polish_nfev = _polish(target, np.array([phi0, beta, t]), settings)
        nfev += int(reduced.nfev) + polish_nfev
        candidate = _evaluate(target, x)
        if best is None or candidate.residual < best.residual:
            best = candidate
        if _acceptable(candidate, settings):
            return candidate, best, {"phase": "invariant", "candidates_tried": tried, "nfev": nfev}
    return None, best, {"phase": "invariant", "candidates_tried": len(seeds), "nfev": nfev}


def _near_fiber_search(target: np.ndarray, settings: SolverSettings) -> Tuple[Optional[_Candidate], Optional[_Candidate], Dict[str, Any]]:
    """Targets close to exp(theta c): (phi0, beta, t/t1) with t/t1 bounded by 1 around the fiber beta"""
    fiber = _fiber_solution(target)
    beta_f = fiber.param.beta
    if beta_f == 0.0:
        return None, None, {"phase": "near_fiber", "candidates_tried": 0, "nfev": 0}
    lower, upper = sorted((0.5 * beta_f, 2.0 * beta_f))

    def residual(z: np.ndarray) -> np.ndarray:
        return _rotation_residual(np.array([z[0], z[1], z[2] * cut_time_value(z[1])]), target)

    best: Optional[_Candidate] = None
    nfev = 0
    phis = np.linspace(0.0, TWO_PI, settings.near_fiber_phi, endpoint=False)
    for tried, phi in enumerate(phis, start=1):
        fit = least_squares(residual, np.array([phi, beta_f, 1.0 - 1e-4]),
                            bounds=([-np.inf, lower, 0.0], [np.inf, upper, 1.0]), method='trf',
                            x_scale='jac', xtol=_LM_TOL, ftol=_LM_TOL, gtol=_LM_TOL,
                            max_nfev=settings.max_nfev)
        nfev += int(fit.nfev)
        phi0, beta, tau = (float(v) for v in fit.x)
        candidate = _evaluate(target, np.array([phi0, beta, tau * cut_time_value(beta)]))
        if best is None or candidate.residual < best.residual:
            best = candidate
        if _acceptable(candidate, settings):
            return candidate, best, {"phase": "near_fiber", "candidates_tried": tried, "nfev": nfev}
    return None, best, {"phase": "near_fiber", "candidates_tried": len(phis), "nfev": nfev}


def _fallback_search(target: np.ndarray, settings: SolverSettings) -> Tuple[Optional[_Candidate], Optional[_Candidate], Dict[str, Any]]:
    phis = np.linspace(0.0, TWO_PI, settings.fallback_phi_grid, endpoint=False)
    betas = np.tan(_xi_midpoints(settings.fallback_xi_grid))
    t1 = cut_times(betas)
    taus = (np.arange(settings.fallback_tau_grid) + 1.0) / settings.fallback_tau_grid
    P, Bi, Ti = np.meshgrid(phis, np.arange(betas.size), taus, indexing='ij')
    beta_mesh = betas[Bi]
    time_mesh = t1[Bi] * Ti
    reached = geodesic_batch(P, beta_mesh, time_mesh)
    traces = np.einsum('...ij,ij->...', reached, target)
    order = np.argsort(-traces.ravel())[:settings.candidates]

    best: Optional[_Candidate] = None
    nfev = 0
    for tried, idx in enumerate(order, start=1):
        x0 = np.array([P.flat[idx], beta_mesh.flat[idx], time_mesh.flat[idx]])
        x, polish_nfev = _polish(target, x0, settings)
        nfev += polish_nfev
        candidate = _evaluate(target, x)
        if best is None or candidate.residual < best.residual:
            best = candidate
        if _acceptable(candidate, settings):
            return candidate, best, {"phase": "fallback", "candidates_tried": tried, "nfev": nfev}
    return None, best, {"phase": "fallback", "candidates_tried": len(order), "nfev": nfev}


def sr_log(g: RotationLike, tol: Optional[float] = None,
           settings: Optional[SolverSettings] = None) -> DistanceResult:
    """Shortest geodesic from the identity to g"""
    settings = settings or SolverSettings()
    if tol is not None:
        if not tol > 0.0:
            raise ValueError(f"tol must be positive (got {tol})")
        settings = replace(settings, tol=float(tol))
    target = _target_matrix(g)

    if so2_deviation(target) <= settings.so2_tol:
        result = _fiber_solution(target)
        logger.debug(f"sr_log fiber target: distance={result.distance:.12f}")
        return result

    first_column_gap = max(abs(target[0, 0] + 1.0), abs(target[1, 0]), abs(target[2, 0]),
                           abs(target[0, 1]), abs(target[0, 2]))
    if first_column_gap <= settings.so2_tol:
        return _half_turn_solution(target)

    phases = []
    if float(np.linalg.norm(log_array(target))) <= settings.small_angle:
        phases.append(_small_target_search)
    phases.append(_invariant_search)
    if so2_deviation(target) <= settings.near_fiber:
        phases.append(_near_fiber_search)
    phases.append(_fallback_search)

    found: Optional[_Candidate] = None
    best: Optional[_Candidate] = None
    diagnostics: Dict[str, Any] = {}
    total_nfev = 0
    for phase in phases:
        found, phase_best, diagnostics = phase(target, settings)
        total_nfev += diagnostics.get("nfev", 0)
        if phase_best is not None and (best is None or phase_best.residual < best.residual):
            best = phase_best
        if found is not None:
            break
        logger.debug(f"sr_log {diagnostics['phase']} phase failed (best residual "
                     f"{best.residual if best else float('nan'):.3e})")
    diagnostics = {**diagnostics, "total_nfev": total_nfev}

    if found is None:
        best_result = None
        if best is not None:
            best_result = _result(best, _multiplicity(best, settings), diagnostics)
        raise NoConvergenceError(
            f"sr_log residual above tol {settings.tol:.1e} "
            f"(best {best.residual if best else float('nan'):.3e})", best=best_result)

    result = _result(found, _multiplicity(found, settings), diagnostics)
    logger.debug(f"sr_log distance={result.distance:.12f} residual={result.residual:.3e} "
                 f"phase={diagnostics.get('phase')} nfev={diagnostics.get('nfev')}")
    return result


def distance(g: RotationLike, tol: Optional[float] = None,
             settings: Optional[SolverSettings] = None) -> float:
    return sr_log(g, tol, settings).distance


def distance_between(g: RotationLike, h: RotationLike, tol: Optional[float] = None,
                     settings: Optional[SolverSettings] = None) -> float:
    """d(g, h) = d(e, g^-1 h)"""
    return distance(Rotation(_target_matrix(g).T @ _target_matrix(h)), tol, settings)


def sample_sphere(radius: float, n_beta: int = 64, n_phi: int = 32) -> List[SphereSample]:
    """Points Exp((phi0, beta), radius) with radius <= t1(beta) on an (atan beta, phi0) grid"""
    if not (0.0 < radius <= DIAMETER + 1e-12):
        raise RadiusOutOfRangeError(f"Sphere radius must lie in (0, pi sqrt(3)] (got {radius})")
    if n_beta < 1 or n_phi < 1:
        raise ValueError("n_beta and n_phi must be >= 1")
    betas = np.concatenate([np.tan(_xi_midpoints(n_beta)), [-INV_SQRT3, INV_SQRT3]])
    betas = np.unique(betas)
    t1 = cut_times(betas)
    keep = betas[t1 >= radius - 1e-12]
    phis = np.linspace(0.0, TWO_PI, n_phi, endpoint=False)

    samples: List[SphereSample] = []
    for beta in keep:
        matrices = geodesic_batch(phis, beta, radius)
        for phi0, matrix in zip(phis, matrices):
            samples.append(SphereSample(GeodesicParam(float(phi0), float(beta)), float(radius), Rotation(matrix)))
    return samples
