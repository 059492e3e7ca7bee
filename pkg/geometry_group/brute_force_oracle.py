#!/usr/bin/env python3
"""
brute_force_oracle.py - Independent upper bound on the distance from the identity (v1.0.0)

Searches horizontal paths made of constant-heading arcs
    exp(l_1 u(th_1)) ... exp(l_N u(th_N)),  u(th) = cos(th) a + sin(th) b
minimizing the total length sum(l_i) with the endpoint pinned to the target.
Each restart draws a random discretized geodesic (heading turning at a
constant rate), screens its length against the endpoint, and runs SLSQP on
length + penalty * |mismatch|^2 under the constraint mismatch = 0.
The local search moves all headings and lengths at once with SLSQP, in
place of per-coordinate descent; the endpoint Jacobian is a forward
difference over the stacked path.

Uses only products of exponentials; nothing from the closed-form solver.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize

from so3_core import Rotation, exp_array, log_batch

__version__ = "1.0.0"

logger = logging.getLogger('brute_force_oracle')

MAX_LENGTH = math.pi * math.sqrt(3.0) * 1.2
SEGMENT_RANGE = (4, 32)


@dataclass
class OracleResult:
    bound: float
    mismatch: float
    feasible: bool
    restarts: int
    feasible_restarts: int
    headings: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    lengths: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))


class _PathProblem:
    """Endpoint mismatch of a piecewise-constant horizontal control, with a cached FD Jacobian"""

    def __init__(self, target: np.ndarray, segments: int, penalty: float = 50.0, fd_step: float = 1e-7):
        self.target = target
        self.segments = segments
        self.penalty = penalty
        self.fd_step = fd_step
        self._z: Optional[np.ndarray] = None
        self._r: Optional[np.ndarray] = None
        self._J: Optional[np.ndarray] = None

    def endpoints(self, z: np.ndarray) -> np.ndarray:
        """z = (headings, lengths), possibly stacked as (..., 2N); returns (..., 3, 3)"""
        n = self.segments
        headings, lengths = z[..., :n], z[..., n:]
        coefficients = np.stack([lengths * np.cos(headings), lengths * np.sin(headings),
                                 np.zeros_like(lengths)], axis=-1)
        factors = exp_array(coefficients)
        product = factors[..., 0, :, :]
        for k in range(1, n):
            product = product @ factors[..., k, :, :]
        return product

    def residuals(self, z: np.ndarray) -> np.ndarray:
        reached = self.endpoints(z)
        return log_batch(np.swapaxes(reached, -1, -2) @ self.target)

    def _update(self, z: np.ndarray):
        if self._z is not None and np.array_equal(z, self._z):
            return
        size = z.size
        stacked = np.vstack([z[None, :], z[None, :] + self.fd_step * np.eye(size)])
        values = self.residuals(stacked)
        self._z = z.copy()
        self._r = values[0]
        self._J = ((values[1:] - values[0]) / self.fd_step).T

    def objective(self, z: np.ndarray) -> float:
        self._update(z)
        return float(np.sum(z[self.segments:]) + self.penalty * np.dot(self._r, self._r))

    def objective_grad(self, z: np.ndarray) -> np.ndarray:
        self._update(z)
        grad = 2.0 * self.penalty * (self._J.T @ self._r)
        grad[self.segments:] += 1.0
        return grad

    def constraint(self, z: np.ndarray) -> np.ndarray:
        self._update(z)
        return self._r.copy()

    def constraint_jac(self, z: np.ndarray) -> np.ndarray:
        self._update(z)
        return self._J.copy()


@dataclass
class _RestartOutcome:
    index: int
    length: float
    mismatch: float
    z: np.ndarray


def _geodesic_seed(segments: int, total: float, phi0: float, beta: float) -> np.ndarray:
    step = total / segments
    headings = phi0 + beta * (np.arange(segments) + 0.5) * step
    return np.concatenate([headings, np.full(segments, step)])


def _draw_seed(problem: _PathProblem, rng: np.random.Generator, screen: int = 48) -> np.ndarray:
    """Random (phi0, atan beta); the total length is screened on a grid against the endpoint"""
    phi0 = rng.uniform(0.0, 2.0 * math.pi)
    beta = math.tan(rng.uniform(-0.5 * math.pi, 0.5 * math.pi) * 0.98)
    totals = np.linspace(MAX_LENGTH / screen, MAX_LENGTH, screen)
    seeds = np.stack([_geodesic_seed(problem.segments, L, phi0, beta) for L in totals])
    mismatch = np.linalg.norm(problem.residuals(seeds), axis=-1)
    return seeds[int(np.argmin(mismatch + 1e-3 * totals))]


def _run_restart(target: np.ndarray, segments: int, seed_sequence: np.random.SeedSequence,
                 index: int, maxiter: int) -> _RestartOutcome:
    rng = np.random.default_rng(seed_sequence)
    problem = _PathProblem(target, segments)
    z0 = _draw_seed(problem, rng)
    bounds = [(None, None)] * segments + [(0.0, MAX_LENGTH)] * segments
    result = minimize(problem.objective, z0, jac=problem.objective_grad, method='SLSQP', bounds=bounds,
                      constraints=[{'type': 'eq', 'fun': problem.constraint, 'jac': problem.constraint_jac}],
                      options={'maxiter': maxiter, 'ftol': 1e-12})
    z = np.asarray(result.x, dtype=float)
    z[segments:] = np.clip(z[segments:], 0.0, None)
    mismatch = float(np.linalg.norm(problem.residuals(z)))
    return _RestartOutcome(index=index, length=float(np.sum(z[segments:])), mismatch=mismatch, z=z)


def _run_chunk(target: np.ndarray, segments: int, seeds: Sequence[np.random.SeedSequence],
               indices: Sequence[int], maxiter: int) -> List[_RestartOutcome]:
    return [_run_restart(target, segments, s, i, maxiter) for s, i in zip(seeds, indices)]


def brute_force_search(g: Union[Rotation, np.ndarray], segments: int = 16, budget: int = 200, seed: int = 0,
                       mismatch_tol: float = 1e-6, jobs: int = 1, maxiter: int = 200) -> OracleResult:
    """Random-restart search; the best feasible length (or least-mismatch path) with its report"""
    if not SEGMENT_RANGE[0] <= segments <= SEGMENT_RANGE[1]:
        raise ValueError(f"segments must lie in [{SEGMENT_RANGE[0]}, {SEGMENT_RANGE[1]}] (got {segments})")
    if budget < 1:
        raise ValueError(f"budget must be >= 1 (got {budget})")
    target = g.matrix if isinstance(g, Rotation) else Rotation.from_matrix(g).matrix
    target = np.array(target)

    children = np.random.SeedSequence(seed).spawn(budget)
    indices = list(range(budget))
    if jobs <= 1 or budget < 2 * jobs:
        outcomes = _run_chunk(target, segments, children, indices, maxiter)
    else:
        parts = np.array_split(np.arange(budget), jobs)
        outcomes = []
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(_run_chunk, target, segments, [children[i] for i in part],
                                       [int(i) for i in part], maxiter) for part in parts]
            for future in futures:
                outcomes.extend(future.result())

    feasible = [o for o in outcomes if o.mismatch <= mismatch_tol]
    if feasible:
        best = min(feasible, key=lambda o: (o.length, o.index))
    else:
        best = min(outcomes, key=lambda o: (o.mismatch, o.index))
        logger.warning(f"brute-force oracle found no path within mismatch {mismatch_tol:.1e} "
                       f"(best mismatch {best.mismatch:.3e}, length {best.length:.6f})")
    logger.debug(f"oracle bound={best.length:.9f} mismatch={best.mismatch:.2e} "
                 f"feasible={len(feasible)}/{budget}")
    return OracleResult(bound=best.length, mismatch=best.mismatch, feasible=bool(feasible),
                        restarts=budget, feasible_restarts=len(feasible),
                        headings=best.z[:segments], lengths=best.z[segments:])


def brute_force_distance(g: Union[Rotation, np.ndarray], segments: int = 16, budget: int = 200,
                         seed: int = 0, mismatch_tol: float = 1e-6, jobs: int = 1) -> float:
    """Upper bound on d(e, g)"""
    return brute_force_search(g, segments, budget, seed, mismatch_tol, jobs).bound
