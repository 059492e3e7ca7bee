#!/usr/bin/env python3
"""
Check Suite - SO(3) Geometry Toolkit v1.0.0
Invariant suites run by `srso3_cli.py check`.

Each check produces a status dict {suite, name, passed, value, bound, gating,
message}; an exception inside one check is recorded as a failed entry and the
remaining checks still run.
"""

import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import expm

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / 'geometry_group'))

from brute_force_oracle import brute_force_search
from cut_locus import (DIAMETER, INV_SQRT3, atan_beta_grid, conjugate_rank_diagnostic, cut_endpoint,
                       cut_equation, cut_symmetry_partner, cut_time, cut_times, diameter_check,
                       in_so2, no_shorter_geodesic, so2_deviation, uniform_beta_grid)
from geodesic_engine import (GeodesicParam, conjugate_phase, geodesic_batch, geodesic_ode, mn, phase_rotation,
                             restart, reverse_sign)
from geometry_config import GeometryConfig
from so3_core import (Ad, ad_matrix, basis, bracket, exp, exp_array, hat, log, log_batch, rotation_distance,
                      Rotation)
from sphere_geometry import (cap_area, chord_angle, circle_center, circle_radius, digon, full_period,
                             gauss_bonnet_residual, geodesic_curvature_numeric, holonomy_angle, projected_curve,
                             psi_rate, sector_area, transport_defect, transport_frame_angle)
from sr_distance import Multiplicity, SolverSettings, sr_log

from verify_logger import VerifyLogger

SUITES = ['core', 'geodesic', 'sphere', 'cut', 'distance', 'oracle', 'transport']
TWO_PI = 2.0 * math.pi


def _circular_gap(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


class CheckSuite:
    """Invariant checks grouped by module - v1.0.0"""

    def __init__(self, config: Optional[GeometryConfig] = None, logger: Optional[VerifyLogger] = None,
                 seed: int = 0, jobs: int = 1):
        self.config = config or GeometryConfig()
        self.logger = logger
        self.seed = seed
        self.jobs = jobs
        self.version = "1.0.0"
        self.settings = SolverSettings.from_config(self.config)
        self.iterations = int(self.config.get("cut.bisection_iterations"))
        self.results: List[Dict[str, Any]] = []
        self._current_suite = ''

    def _n(self, key: str) -> int:
        return int(self.config.get(f"check.{key}"))

    def _rng(self, suite: str) -> np.random.Generator:
        return np.random.default_rng([self.seed, SUITES.index(suite)])

    def _record(self, name: str, value: float, bound: float, passed: Optional[bool] = None,
                gating: bool = True, message: str = '') -> Dict[str, Any]:
        value = float(value)
        if passed is None:
            passed = bool(value <= bound)
        entry = {
            'suite': self._current_suite,
            'name': name,
            'passed': bool(passed),
            'value': value,
            'bound': float(bound),
            'gating': gating,
            'message': message
        }
        self.results.append(entry)
        if self.logger:
            self.logger.log_check_result(entry['suite'], name, entry['passed'], value, bound,
                                         gating=gating, message=message)
        return entry

    def _guard(self, name: str, check: Callable[[], None]):
        try:
            check()
        except Exception as e:
            self._record(name, float('nan'), 0.0, passed=False, message=f"{type(e).__name__}: {e}")

    def run(self, suites: Sequence[str]) -> List[Dict[str, Any]]:
        for suite in suites:
            if suite not in SUITES:
                raise ValueError(f"Unknown suite: {suite}")
            self._current_suite = suite
            started = time.perf_counter()
            getattr(self, f"_suite_{suite}")()
            if self.logger:
                self.logger.debug(f"Suite {suite} finished in {time.perf_counter() - started:.2f}s")
        return self.results

    def passed(self) -> bool:
        return all(r['passed'] for r in self.results if r['gating'])

    # ------------------------------------------------------------------ core
    def _suite_core(self):
        rng = self._rng('core')
        a, b, c = basis()
        rotation_tol = float(self.config.get("core.rotation_tol"))
        taylor_switch = float(self.config.get("core.taylor_switch"))
        pi_switch = float(self.config.get("core.log_pi_switch"))

        def basis_matrices():
            expected = [np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
                        np.array([[0, 0, -1], [0, 0, 0], [1, 0, 0]]),
                        np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]])]
            gap = max(np.max(np.abs(hat(X) - E)) for X, E in zip((a, b, c), expected))
            self._record('basis_matrices', gap, 0.0)

        def bracket_table():
            gap = max(np.max(np.abs(bracket(X, Y).as_array() - Z.as_array()))
                      for X, Y, Z in ((a, b, c), (b, c, a), (c, a, b)))
            commutator = max(np.max(np.abs(hat(X) @ hat(Y) - hat(Y) @ hat(X) - hat(bracket(X, Y))))
                             for X, Y in ((a, b), (b, c), (c, a)))
            self._record('bracket_table', max(gap, commutator), 0.0)

        def exp_is_rotation():
            X = rng.normal(size=(self._n('core_samples'), 3))
            X *= (rng.uniform(0.0, 10.0, len(X)) / np.linalg.norm(X, axis=1))[:, None]
            R = exp_array(X, taylor_switch)
            ortho = np.max(np.abs(np.swapaxes(R, 1, 2) @ R - np.eye(3)))
            det = np.max(np.abs(np.linalg.det(R) - 1.0))
            self._record('exp_is_rotation', max(ortho, det), rotation_tol)

        def jacobi_identity():
            X, Y, Z = (rng.uniform(-1.0, 1.0, size=(1000, 3)) for _ in range(3))
            total = (np.cross(X, np.cross(Y, Z)) + np.cross(Y, np.cross(Z, X)) + np.cross(Z, np.cross(X, Y)))
            self._record('jacobi_identity', np.max(np.abs(total)), 1e-14)

        def adjoint_exponential():
            worst = 0.0
            for X in rng.uniform(-2.0, 2.0, size=(200, 3)):
                g = exp(X)
                columns = np.column_stack([Ad(g, E).as_array() for E in (a, b, c)])
                worst = max(worst, float(np.max(np.abs(columns - expm(ad_matrix(X))))))
            self._record('adjoint_exponential', worst, 1e-10)

        def log_round_trip():
            X = rng.normal(size=(self._n('core_samples'), 3))
            X *= (rng.uniform(0.0, math.pi - 0.01, len(X)) / np.linalg.norm(X, axis=1))[:, None]
            R = exp_array(X, taylor_switch)
            back = exp_array(log_batch(R, pi_switch), taylor_switch)
            self._record('log_round_trip', np.max(np.abs(back - R)), 1e-9)

        def log_at_pi():
            X = log(exp(math.pi * a), pi_switch=pi_switch).as_array()
            self._record('log_at_pi', np.max(np.abs(np.abs(X) - np.array([math.pi, 0.0, 0.0]))), 1e-12)

        for name, check in (('basis_matrices', basis_matrices), ('bracket_table', bracket_table),
                            ('exp_is_rotation', exp_is_rotation), ('jacobi_identity', jacobi_identity),
                            ('adjoint_exponential', adjoint_exponential), ('log_round_trip', log_round_trip),
                            ('log_at_pi', log_at_pi)):
            self._guard(name, check)

    # -------------------------------------------------------------- geodesic
    def _suite_geodesic(self):
        rng = self._rng('geodesic')

        def product_vs_closed_form():
            n = self._n('geodesic_samples')
            phi0 = rng.uniform(0.0, TWO_PI, n)
            beta = rng.uniform(-5.0, 5.0, n)
            t = rng.uniform(0.0, TWO_PI, n)
            left = exp_array(t[:, None] * np.column_stack([np.cos(phi0), np.sin(phi0), beta]))
            right = exp_array(np.column_stack([np.zeros(n), np.zeros(n), -t * beta]))
            gap = np.max(np.abs(left @ right - geodesic_batch(phi0, beta, t)))
            self._record('product_vs_closed_form', gap, 1e-10)

        def ode_vs_closed_form():
            step = float(self.config.get("geodesic.ode_step"))
            worst = 0.0
            for _ in range(self._n('ode_samples')):
                p = GeodesicParam(rng.uniform(0.0, TWO_PI), rng.uniform(-3.0, 3.0))
                t = rng.uniform(0.0, 2.0)
                gap = np.max(np.abs(geodesic_ode(p, t, step).matrix - geodesic_batch(p.phi0, p.beta, t)))
                worst = max(worst, float(gap))
            self._record('ode_vs_closed_form', worst, 1e-7)

        def ode_convergence_order():
            ratios = []
            for phi0, beta, t in ((0.4, 0.9, 1.3), (1.1, -0.7, 2.0), (2.5, 2.0, 1.0)):
                p = GeodesicParam(phi0, beta)
                exact = geodesic_batch(phi0, beta, t)
                coarse = np.max(np.abs(geodesic_ode(p, t, 0.05).matrix - exact))
                fine = np.max(np.abs(geodesic_ode(p, t, 0.025).matrix - exact))
                ratios.append(coarse / fine)
            self._record('ode_convergence_order', min(ratios), 12.0, passed=min(ratios) >= 12.0)

        def horizontal_unit_speed():
            n, h = 100, 1e-6
            phi0 = rng.uniform(0.0, TWO_PI, n)
            beta = rng.uniform(-5.0, 5.0, n)
            t = rng.uniform(0.0, TWO_PI, n)
            G = geodesic_batch(phi0, beta, t)
            D = np.swapaxes(G, 1, 2) @ (geodesic_batch(phi0, beta, t + h) - geodesic_batch(phi0, beta, t - h)) / (2 * h)
            coeffs = np.column_stack([D[:, 1, 0], D[:, 2, 0], D[:, 2, 1]])
            control = np.column_stack([np.cos(beta * t + phi0), np.sin(beta * t + phi0)])
            gap = max(np.max(np.abs(coeffs[:, 2])),
                      np.max(np.abs(np.linalg.norm(coeffs[:, :2], axis=1) - 1.0)),
                      np.max(np.abs(coeffs[:, :2] - control)))
            self._record('horizontal_unit_speed', gap, 1e-5)

        def mn_identity():
            worst = max(mn(b, t).identity_gap(b) for b, t in zip(rng.uniform(-5, 5, 1000), rng.uniform(0, TWO_PI, 1000)))
            self._record('mn_identity', worst, 1e-12)

        def restart_contract():
            worst = 0.0
            for _ in range(1000):
                p = GeodesicParam(rng.uniform(0.0, TWO_PI), rng.uniform(-5.0, 5.0))
                t0, s = rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)
                q = restart(p, t0)
                lhs = geodesic_batch(p.phi0, p.beta, t0).T @ geodesic_batch(p.phi0, p.beta, t0 + s)
                worst = max(worst, float(np.max(np.abs(lhs - geodesic_batch(q.phi0, q.beta, s)))))
            self._record('restart_contract', worst, 1e-11)

        def symmetries():
            worst = 0.0
            for _ in range(200):
                p = GeodesicParam(rng.uniform(0.0, TWO_PI), rng.uniform(-5.0, 5.0))
                t = rng.uniform(-TWO_PI, TWO_PI)
                q, s = reverse_sign(p, t)
                worst = max(worst, float(np.max(np.abs(geodesic_batch(q.phi0, q.beta, s)
                                                       - geodesic_batch(p.phi0, p.beta, t)))))
                conj = conjugate_phase(GeodesicParam(0.0, p.beta), p.phi0, t).matrix
                worst = max(worst, float(np.max(np.abs(conj - geodesic_batch(p.phi0, p.beta, t)))))
            self._record('sign_and_phase_symmetries', worst, 1e-12)

        for name, check in (('product_vs_closed_form', product_vs_closed_form),
                            ('ode_vs_closed_form', ode_vs_closed_form),
                            ('ode_convergence_order', ode_convergence_order),
                            ('horizontal_unit_speed', horizontal_unit_speed), ('mn_identity', mn_identity),
                            ('restart_contract', restart_contract), ('sign_and_phase_symmetries', symmetries)):
            self._guard(name, check)

    # ---------------------------------------------------------------- sphere
    def _suite_sphere(self):
        rng = self._rng('sphere')

        def circle_orbit():
            worst = 0.0
            for _ in range(50):
                beta = math.copysign(rng.uniform(0.05, 5.0), rng.uniform(-1.0, 1.0))
                x = projected_curve(GeodesicParam(0.0, beta), np.linspace(0.0, full_period(beta), 200))
                center = circle_center(beta).as_array()
                dist = np.arctan2(np.linalg.norm(np.cross(x, center), axis=1), x @ center)
                worst = max(worst, float(np.max(np.abs(dist - circle_radius(beta)))))
            self._record('circle_orbit', worst, 1e-10)

        def chord_and_angle():
            chord_gap, angle_gap = 0.0, 0.0
            for beta in (0.2, 0.5, 1.0, 2.0, -0.7):
                p = GeodesicParam(0.0, beta)
                for fraction in np.linspace(0.05, 0.95, 19):
                    t1 = fraction * full_period(beta)
                    geometry = digon(beta, t1)
                    x1 = projected_curve(p, np.array([t1]))[0]
                    measured = math.atan2(np.linalg.norm(np.cross([1.0, 0.0, 0.0], x1)), x1[0])
                    chord_gap = max(chord_gap, abs(geometry.r - measured))
                    angle_gap = max(angle_gap, abs(geometry.psi - chord_angle(p, t1)))
            self._record('chord_consistency', chord_gap, 1e-12)
            self._record('psi_angle_consistency', angle_gap, 1e-6)

        def psi_rate_and_area():
            rate_gap, h = 0.0, 1e-5
            monotone = True
            for beta in (0.1, 0.3, 0.5, 1.0, 2.5):
                period = full_period(beta)
                grid = np.linspace(0.05, 0.95, 37) * period
                for t1 in grid:
                    fd = (digon(beta, t1 + h).psi - digon(beta, t1 - h).psi) / (2 * h)
                    rate_gap = max(rate_gap, abs(fd - psi_rate(beta, t1)))
                    monotone &= digon(beta, t1 + 1e-3).area > digon(beta, t1).area
            self._record('psi_rate', rate_gap, 1e-6)
            self._record('area_increasing', 0.0 if monotone else 1.0, 0.0)

        def gauss_bonnet():
            count = self._n('gauss_bonnet_betas')
            samples = self._n('boundary_samples')
            betas = INV_SQRT3 * (np.arange(count) + 0.5) / count
            t1s = cut_times(betas)
            worst = max(gauss_bonnet_residual(b, t, samples) for b, t in zip(betas, t1s))
            at_cut = max(abs(digon(b, t).area - math.pi) for b, t in zip(betas, t1s))
            self._record('gauss_bonnet_closure', worst, 1e-6)
            self._record('digon_area_at_cut', at_cut, 1e-9)
            full = gauss_bonnet_residual(1.0, full_period(1.0), samples)
            cap = abs(cap_area(1.0) - sector_area(circle_radius(1.0), TWO_PI))
            self._record('cap_area_closure', max(full, cap), 1e-6)

        def curvature():
            samples = self._n('curvature_samples')
            worst = 0.0
            for beta in (0.25, 0.5, 1.0, 2.0):
                x = projected_curve(GeodesicParam(0.0, beta), np.linspace(0.0, full_period(beta), samples))
                worst = max(worst, abs(geodesic_curvature_numeric(x) + abs(beta)))
            self._record('curvature_minus_abs_beta', worst, 1e-4)
            great = projected_curve(GeodesicParam(0.0, 0.0), np.linspace(0.0, math.pi, samples))
            self._record('curvature_great_circle', abs(geodesic_curvature_numeric(great)), 1e-6)
            reversed_path = projected_curve(GeodesicParam(0.0, -1.0), np.linspace(0.0, full_period(-1.0), samples))[::-1]
            self._record('curvature_negative_beta_reversed', abs(geodesic_curvature_numeric(reversed_path) + 1.0), 1e-4)

        for name, check in (('circle_orbit', circle_orbit), ('chord_and_angle', chord_and_angle),
                            ('psi_rate_and_area', psi_rate_and_area), ('gauss_bonnet', gauss_bonnet),
                            ('curvature', curvature)):
            self._guard(name, check)

    # ------------------------------------------------------------------- cut
    def _suite_cut(self):
        rng = self._rng('cut')

        def known_cut_times():
            gap = max(abs(cut_time(0.0).t1 - math.pi),
                      abs(cut_time(1.0).t1 - math.pi * math.sqrt(2.0)),
                      abs(cut_time(INV_SQRT3).t1 - DIAMETER))
            self._record('known_cut_times', gap, 1e-12)

        def diameter():
            grid_check = diameter_check(atan_beta_grid(self._n('diameter_grid'), 5.0))
            near_peak = abs(abs(grid_check.argmax_beta) - INV_SQRT3)
            self._record('diameter_atan_grid', grid_check.gap, 1e-6)
            self._record('diameter_argmax', near_peak, 1e-3)
            uniform = diameter_check(uniform_beta_grid(-3.0, 3.0, 1e-3))
            self._record('diameter_uniform_grid', uniform.gap, 1e-6)

        def digon_branch():
            grid = np.linspace(0.0, INV_SQRT3, self._n('monotonic_grid') + 2)[1:-1]
            t1 = cut_times(grid, self.iterations)
            residual = np.max(np.abs(cut_equation(grid, t1)))
            omega = np.hypot(1.0, grid)
            eps = 1e-9
            bracket_ok = np.all(cut_equation(grid, math.pi / omega + eps) * cut_equation(grid, TWO_PI / omega - eps) < 0)
            bt = grid * t1
            self._record('root_residual', residual, 1e-12)
            self._record('bracket_validity', 0.0 if bracket_ok else 1.0, 0.0)
            self._record('beta_t1_in_open_interval', 0.0 if np.all((bt > 0) & (bt < math.pi)) else 1.0, 0.0)

        def monotonicity():
            n = self._n('monotonic_grid')
            rising = cut_times(np.linspace(0.0, INV_SQRT3, n), self.iterations)
            falling = cut_times(np.linspace(INV_SQRT3, 5.0, n), self.iterations)
            violations = int(np.sum(np.diff(rising) <= 0) + np.sum(np.diff(falling) >= 0))
            self._record('monotonicity_violations', violations, 0.0)
            omega = math.hypot(1.0, INV_SQRT3)
            edge = abs(cut_equation(INV_SQRT3, TWO_PI / omega))
            right = abs(cut_times([INV_SQRT3 + 1e-12])[0] - DIAMETER)
            trend = [abs(cut_times([INV_SQRT3 - d])[0] - DIAMETER) for d in (1e-3, 1e-5, 1e-7)]
            shrinking = trend[0] > trend[1] > trend[2]
            self._record('continuity_at_branch_switch', max(edge, right), 1e-8,
                         passed=max(edge, right) <= 1e-8 and shrinking)

        def conjugate_set():
            n = self._n('conjugate_grid')
            xi = np.linspace(math.atan(INV_SQRT3), math.atan(50.0), n // 2)
            betas = np.concatenate([np.tan(xi), -np.tan(xi)])
            in_fiber = max(so2_deviation(cut_endpoint(b)) for b in betas)
            not_identity = min(rotation_distance(np.eye(3), cut_endpoint(b)) for b in betas)
            self._record('conjugate_endpoints_in_so2', in_fiber, 1e-10,
                         passed=in_fiber <= 1e-10 and not_identity > 0.0)
            inside = np.linspace(-INV_SQRT3, INV_SQRT3, n + 2)[1:-1]
            smallest = min(so2_deviation(cut_endpoint(b)) for b in inside)
            self._record('digon_endpoints_outside_so2', smallest, 1e-3, passed=smallest > 1e-3)
            ranks = (conjugate_rank_diagnostic(1.0)['rank'], conjugate_rank_diagnostic(0.3)['rank'])
            self._record('conjugate_rank_diagnostic', ranks[0], 2.0, passed=ranks[0] < 3, gating=False,
                         message=f"rank at beta=1: {ranks[0]}, at beta=0.3: {ranks[1]}")

        def double_cover():
            worst = 0.0
            for _ in range(self._n('double_cover_samples')):
                phi0 = rng.uniform(0.0, TWO_PI)
                beta = rng.uniform(-INV_SQRT3, INV_SQRT3)
                partner_phi, partner_beta = cut_symmetry_partner(phi0, beta)
                t1 = cut_time(beta).t1
                gap = np.max(np.abs(geodesic_batch(phi0, beta, t1) - geodesic_batch(partner_phi, partner_beta, t1)))
                worst = max(worst, float(gap))
            self._record('double_cover', worst, 1e-9)

        def minimality():
            count = self._n('no_shorter_samples')
            digon_betas = rng.uniform(-INV_SQRT3, INV_SQRT3, count)
            circle_betas = np.copysign(rng.uniform(INV_SQRT3, 5.0, count), rng.uniform(-1, 1, count))
            closest = min(no_shorter_geodesic(b) for b in np.concatenate([digon_betas, circle_betas]))
            self._record('no_shorter_geodesic', closest, 1e-3, passed=closest > 1e-3)

        for name, check in (('known_cut_times', known_cut_times), ('diameter', diameter),
                            ('digon_branch', digon_branch), ('monotonicity', monotonicity),
                            ('conjugate_set', conjugate_set), ('double_cover', double_cover),
                            ('minimality', minimality)):
            self._guard(name, check)

    # -------------------------------------------------------------- distance
    def _suite_distance(self):
        rng = self._rng('distance')
        settings = self.settings

        def random_rotation() -> Rotation:
            X = rng.normal(size=3)
            return exp(X / np.linalg.norm(X) * rng.uniform(0.0, math.pi))

        def known_targets():
            gaps = [sr_log(np.eye(3), settings=settings).distance]
            circle = sr_log(exp([0.0, 0.0, math.pi]), settings=settings)
            gaps.append(abs(circle.distance - DIAMETER))
            gaps.append(0.0 if circle.multiplicity == Multiplicity.CIRCLE else 1.0)
            half = sr_log(np.diag([-1.0, -1.0, 1.0]), settings=settings)
            gaps.append(abs(half.distance - math.pi))
            gaps.append(0.0 if half.multiplicity == Multiplicity.CUT_PAIR else 1.0)
            gaps.append(abs(sr_log(exp([0.3, 0.0, 0.0]), settings=settings).distance - 0.3))
            known = sr_log(geodesic_batch(1.0, 0.5, 2.0), settings=settings)
            gaps.extend([abs(known.distance - 2.0), abs(known.param.phi0 - 1.0), abs(known.param.beta - 0.5)])
            self._record('known_targets', max(gaps), 1e-6)

        def round_trip():
            failures, worst = 0, 0.0
            for _ in range(self._n('roundtrip_samples')):
                beta = math.tan(rng.uniform(-1.4, 1.4))
                phi0 = rng.uniform(0.0, TWO_PI)
                t = rng.uniform(0.05, 0.95) * cut_time(beta).t1
                try:
                    err = abs(sr_log(geodesic_batch(phi0, beta, t), settings=settings).distance - t)
                except Exception:
                    err = float('inf')
                failures += err > 1e-6
                worst = max(worst, err)
            self._record('round_trip', worst, 1e-6, passed=failures == 0, message=f"failures: {failures}")

        def symmetry_and_triangle():
            count = max(10, self._n('roundtrip_samples') // 10)
            inverse_gap, conj_gap, triangle_excess, ball_excess = 0.0, 0.0, -math.inf, -math.inf
            for _ in range(count):
                g, h = random_rotation(), random_rotation()
                dg = sr_log(g, settings=settings).distance
                dh = sr_log(h, settings=settings).distance
                inverse_gap = max(inverse_gap, abs(dg - sr_log(g.inverse(), settings=settings).distance))
                B = phase_rotation(rng.uniform(0.0, TWO_PI))
                conj_gap = max(conj_gap, abs(dg - sr_log(Rotation(B @ g.matrix @ B.T), settings=settings).distance))
                dgh = sr_log(g @ h, settings=settings).distance
                triangle_excess = max(triangle_excess, dgh - dg - dh)
                ball_excess = max(ball_excess, dg - DIAMETER, dh - DIAMETER, dgh - DIAMETER)
            self._record('inverse_symmetry', inverse_gap, 1e-6)
            self._record('conjugation_invariance', conj_gap, 1e-6)
            self._record('triangle_inequality', max(triangle_excess, 0.0), 1e-6)
            self._record('ball_bound', max(ball_excess, 0.0), 1e-9)

        def small_and_near_fiber():
            worst = 0.0
            for t in (1e-2, 1e-4, 1e-6):
                beta = math.tan(rng.uniform(-1.4, 1.4))
                result = sr_log(geodesic_batch(rng.uniform(0.0, TWO_PI), beta, t), settings=settings)
                worst = max(worst, abs(result.distance - t), result.residual)
            for theta in (2.0, -1.0):
                fiber = exp([0.0, 0.0, theta])
                kick = 1e-5 * rng.normal(size=2)
                result = sr_log(fiber @ exp([kick[0], kick[1], 0.0]), settings=settings)
                # |d(g h) - d(g)| <= d(h) for the horizontal kick h
                excess = abs(result.distance - sr_log(fiber, settings=settings).distance) - np.linalg.norm(kick)
                worst = max(worst, excess, result.residual)
            self._record('small_and_near_fiber_targets', max(worst, 0.0), 1e-8)

        def cut_multiplicity():
            worst = 0.0
            for beta in (0.05, 0.2, 0.3, -0.4, 0.55):
                point = cut_time(beta)
                result = sr_log(point.endpoint, settings=settings)
                partner_phi, partner_beta = cut_symmetry_partner(0.0, beta)
                partner_gap = rotation_distance(geodesic_batch(partner_phi, partner_beta, point.t1), point.endpoint)
                worst = max(worst, abs(result.distance - point.t1), partner_gap)
            self._record('cut_pair_distances', worst, 1e-8)

        for name, check in (('known_targets', known_targets), ('round_trip', round_trip),
                            ('symmetry_and_triangle', symmetry_and_triangle),
                            ('small_and_near_fiber', small_and_near_fiber),
                            ('cut_multiplicity', cut_multiplicity)):
            self._guard(name, check)

    # ---------------------------------------------------------------- oracle
    def _suite_oracle(self):
        rng = self._rng('oracle')
        segments = int(self.config.get("oracle.segments"))
        budget = int(self.config.get("oracle.budget"))
        mismatch_tol = float(self.config.get("oracle.mismatch_tol"))

        def sandwich():
            count = self._n('oracle_targets')
            targets = [exp([0.0, 0.0, math.pi]).matrix]
            cut_betas = [0.3, 0.1, 0.45, 1.0, -0.2, 2.0, 0.55, -0.5, 0.7]
            n_cut = max(1, count - count // 2)
            targets += [cut_endpoint(b).matrix for b in cut_betas[:n_cut - 1]]
            for _ in range(count - len(targets)):
                beta = math.tan(rng.uniform(-1.2, 1.2))
                t = rng.uniform(0.2, 0.9) * cut_time(beta).t1
                targets.append(geodesic_batch(rng.uniform(0.0, TWO_PI), beta, t))
            low, high = math.inf, -math.inf
            for index, target in enumerate(targets):
                d = sr_log(target, settings=self.settings).distance
                report = brute_force_search(target, segments=segments, budget=budget, seed=self.seed + index,
                                            mismatch_tol=mismatch_tol, jobs=self.jobs)
                low = min(low, report.bound - d)
                high = max(high, report.bound - d)
                if self.logger:
                    self.logger.log_solver_result('oracle', report.mismatch, budget,
                                                  distance=d, bound=report.bound, feasible=report.feasible)
            self._record('oracle_lower_soundness', -low, 1e-2)
            self._record('oracle_upper_accuracy', high, 5e-2)

        self._guard('sandwich', sandwich)

    # ------------------------------------------------------------- transport
    def _suite_transport(self):
        rng = self._rng('transport')
        samples = self._n('transport_samples')

        def defect():
            worst = 0.0
            for _ in range(self._n('transport_segments')):
                p = GeodesicParam(rng.uniform(0.0, TWO_PI), rng.uniform(-2.0, 2.0))
                worst = max(worst, transport_defect(p, rng.uniform(0.5, 3.0), samples))
            self._record('transport_defect', worst, 1e-4)

        def holonomy():
            p = GeodesicParam(0.0, 1.0)
            period = full_period(1.0)
            discrete = holonomy_angle(p, period, samples)
            exact = transport_frame_angle(p, period)
            gap = max(_circular_gap(discrete, cap_area(1.0)), _circular_gap(exact, cap_area(1.0)))
            self._record('holonomy_equals_area', gap, 1e-3)

        self._guard('defect', defect)
        self._guard('holonomy', holonomy)
