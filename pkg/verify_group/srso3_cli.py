#!/usr/bin/env python3
"""
SRSO3 CLI - SO(3) Geometry Toolkit v1.0.0
Command-line surface: geodesics, cut times, distances, spheres, cut locus and
the invariant suites. Data goes to stdout (or --output), logs go to stderr.

Exit codes: 0 ok, 1 check failure, 2 usage or invalid input.
"""

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import psutil
from dotenv import load_dotenv

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / 'geometry_group'))
sys.path.insert(0, str(Path(__file__).resolve().parent))

from brute_force_oracle import brute_force_search
from cut_locus import branch_of, cut_times, diameter, diameter_check, sample_cut_locus
from geodesic_engine import GeodesicParam, sample_geodesic
from geometry_config import GeometryConfig
from geometry_errors import SubRiemannianError
from so3_core import Rotation, axis_angle_to_rotation
from sr_distance import SolverSettings, sample_sphere, sr_log

from check_suite import SUITES, CheckSuite
from export_writer import ExportWriter
from verify_logger import VerifyLogger

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Flag combination that argparse cannot reject by itself"""
    pass


class SRSO3CLI:
    """SRSO3 CLI v1.0.0"""

    def __init__(self, profile: Optional[str] = None, tol: Optional[float] = None, jobs: Optional[int] = None,
                 seed: Optional[int] = None, verbose: bool = False):
        self.version = "1.0.0"
        overrides = {"solver": {"tol": tol}} if tol is not None else None
        self.config = GeometryConfig(profile, overrides)
        self.jobs = default_jobs() if jobs is None else max(1, int(jobs))
        self.seed = int(self.config.get("oracle.seed", 0)) if seed is None else int(seed)
        self.settings = SolverSettings.from_config(self.config)
        self.validate_tol = float(self.config.get("core.validate_tol"))
        self.bisection_iterations = int(self.config.get("cut.bisection_iterations"))

        level = "DEBUG" if verbose else self.config.get("logging.level", "INFO")
        self.logger = VerifyLogger(log_dir=self.config.get("logging.log_dir", "logs/verify"),
                                   enable_file_logging=bool(self.config.get("logging.file_logging", False)),
                                   enable_console_logging=bool(self.config.get("logging.console_logging", True)),
                                   level=level)
        self.writer = ExportWriter(output_dir="data/reports")
        self.logger.debug(f"SRSO3CLI v{self.version} profile={self.config.profile_name} "
                          f"solver.tol={self.settings.tol:.1e} jobs={self.jobs} seed={self.seed}")

    def _emit(self, kind: str, df, fmt: Optional[str], output: Optional[str]):
        path = self.writer.write(df, fmt or "csv", output)
        self.logger.log_export(kind, len(df), path)

    @staticmethod
    def _print_scalar(value: float):
        print(repr(float(value)))

    def geodesic(self, phi0: float, beta: float, t_max: float, steps: int,
                 fmt: Optional[str] = None, output: Optional[str] = None) -> int:
        p = GeodesicParam(phi0, beta)
        times, matrices = sample_geodesic(p, t_max, steps)
        df = self.writer.geodesic_sample_frame(p.phi0, p.beta, times, matrices)
        self._emit('GeodesicSample', df, fmt, output)
        return EXIT_OK

    def cut_time(self, beta: Optional[float], beta_range: Optional[List[float]],
                 fmt: Optional[str] = None, output: Optional[str] = None) -> int:
        if beta_range is not None:
            lo, hi, n = beta_range
            if int(n) != n or n < 1:
                raise UsageError(f"--beta-range count must be a positive integer (got {n})")
            betas = np.linspace(lo, hi, int(n))
        else:
            betas = np.array([beta])
        t1s = cut_times(betas, self.bisection_iterations)
        if beta_range is None and fmt is None and output is None:
            self._print_scalar(t1s[0])
            return EXIT_OK
        df = self.writer.cut_time_frame(betas, t1s, [branch_of(float(b)) for b in betas])
        self._emit('CutTime', df, fmt, output)
        return EXIT_OK

    def diameter(self, check_grid: bool = False) -> int:
        if check_grid:
            report = diameter_check()
            self.logger.info(f"Grid maximum {report.max_t1!r} at beta={report.argmax_beta:.6f} "
                             f"({report.grid_points} points, gap {report.gap:.3e})")
        self._print_scalar(diameter())
        return EXIT_OK

    def distance(self, target: Rotation, with_oracle: bool = False, segments: Optional[int] = None,
                 budget: Optional[int] = None, fmt: Optional[str] = None, output: Optional[str] = None) -> int:
        result = sr_log(target, settings=self.settings)
        self.logger.log_solver_result('sr_log', result.residual, result.diagnostics.get('total_nfev', 0),
                                      multiplicity=result.multiplicity.value, phase=result.diagnostics.get('phase'))
        if with_oracle:
            report = brute_force_search(target,
                                        segments=segments or int(self.config.get("oracle.segments")),
                                        budget=budget or int(self.config.get("oracle.budget")),
                                        seed=self.seed,
                                        mismatch_tol=float(self.config.get("oracle.mismatch_tol")),
                                        jobs=self.jobs)
            result.oracle_bound = report.bound
            self.logger.log_solver_result('oracle', report.mismatch, report.restarts,
                                          bound=report.bound, feasible=report.feasible)
            if not report.feasible:
                self.logger.warning(f"Oracle bound is not feasible (mismatch {report.mismatch:.3e})")
        if fmt is None and output is None:
            self._print_scalar(result.distance)
            return EXIT_OK
        self._emit('Distance', self.writer.distance_frame([result]), fmt, output)
        return EXIT_OK

    def cut_locus(self, n: int, beta_max: float, fmt: Optional[str] = None, output: Optional[str] = None) -> int:
        if n < 1:
            raise UsageError(f"--n must be >= 1 (got {n})")
        points = sample_cut_locus(n, beta_max, self.jobs)
        self._emit('CutPoint', self.writer.cut_point_frame(points), fmt, output)
        return EXIT_OK

    def sphere(self, radius: float, n: int, n_phi: int, fmt: Optional[str] = None,
               output: Optional[str] = None) -> int:
        samples = sample_sphere(radius, n, n_phi)
        self._emit('SpherePoint', self.writer.sphere_point_frame(radius, samples), fmt, output)
        return EXIT_OK

    def check(self, suite: str, fmt: Optional[str] = None, output: Optional[str] = None) -> int:
        suites = list(SUITES) if suite == 'full' else [suite]
        runner = CheckSuite(self.config, self.logger, seed=self.seed, jobs=self.jobs)
        results = runner.run(suites)
        status_path = self.writer.save_check_results(results, suites, self.config.profile_name)
        self.logger.info(f"Check results saved: {status_path}")

        if fmt is not None or output is not None:
            self._emit('Check', self.writer.check_frame(results), fmt, output)

        gating = [r for r in results if r['gating']]
        failed = [r for r in gating if not r['passed']]
        if failed:
            for r in failed:
                self.logger.error(f"[FAIL] {r['suite']}.{r['name']}: value {r['value']!r} bound {r['bound']!r}"
                                  + (f" ({r['message']})" if r['message'] else ''))
            print(f"[FAIL] {len(failed)}/{len(gating)} checks failed", file=sys.stderr)
            return EXIT_CHECK_FAILED
        print(f"[OK] {len(gating)}/{len(gating)} checks passed", file=sys.stderr)
        return EXIT_OK


def default_jobs() -> int:
    """Physical core count, 1 when psutil cannot tell"""
    return psutil.cpu_count(logical=False) or 1


def _target_from_args(parser: argparse.ArgumentParser, args, tol: float) -> Rotation:
    if args.matrix is not None and args.axis is not None:
        parser.error("use either --matrix or --axis/--angle, not both")
    if args.matrix is not None:
        return Rotation.from_entries(args.matrix, tol)
    if args.axis is not None:
        if args.angle is None:
            parser.error("--axis needs --angle")
        return axis_angle_to_rotation(args.axis, args.angle, tol)
    parser.error("distance needs --matrix (9 values, row-major) or --axis X Y Z --angle RAD")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='SO(3) sub-Riemannian geometry toolkit v1.0.0',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python srso3_cli.py geodesic --phi0 0 --beta 0 --t-max 3.14159 --steps 2
  python srso3_cli.py cut-time --beta 0                       # 3.141592653589793
  python srso3_cli.py cut-time --beta-range -5 5 1001 --format json
  python srso3_cli.py diameter                                # 5.441398092702653
  python srso3_cli.py distance --axis 1 0 0 --angle 3.141592653589793
  python srso3_cli.py distance --matrix -1 0 0 0 -1 0 0 0 1 --oracle --jobs 4
  python srso3_cli.py cut-locus --n 2000 --beta-max 5 --output data/reports/cut_locus.csv
  python srso3_cli.py sphere --radius 2.0 --n 64 --n-phi 32
  python srso3_cli.py check --suite full --profile quick

Environment:
  SRSO3_TOL         tolerance profile name or JSON path (same as --profile)
  SRSO3_SOLVER_TOL  solve tolerance of the distance solver
  SRSO3_LOG_DIR     log directory
        """
    )

    parser.add_argument('command', choices=[
        'geodesic',     # sampled closed-form geodesic
        'cut-time',     # t1(beta), single value or range
        'diameter',     # pi sqrt(3)
        'distance',     # sub-Riemannian distance from the identity
        'cut-locus',    # cut points on an atan-beta grid
        'sphere',       # metric sphere samples
        'check',        # invariant suites
    ])

    parser.add_argument('--phi0', type=float, default=0.0, help='initial heading')
    parser.add_argument('--beta', type=float, default=None, help='turning rate')
    parser.add_argument('--beta-range', type=float, nargs=3, metavar=('LO', 'HI', 'N'),
                        help='N evenly spaced beta values in [LO, HI]')
    parser.add_argument('--t-max', type=float, default=math.pi, help='final time of geodesic samples')
    parser.add_argument('--steps', type=int, default=100, help='number of geodesic samples')
    parser.add_argument('--format', choices=['csv', 'json'], default=None, help='export format (default csv)')
    parser.add_argument('--output', help='write the export to PATH instead of stdout')
    parser.add_argument('--matrix', type=float, nargs=9, metavar='R', help='target rotation, row-major')
    parser.add_argument('--axis', type=float, nargs=3, metavar=('X', 'Y', 'Z'), help='unit rotation axis')
    parser.add_argument('--angle', type=float, help='rotation angle in radians')
    parser.add_argument('--oracle', action='store_true', help='also report the brute-force upper bound')
    parser.add_argument('--segments', type=int, default=None, help='oracle control segments (4-32)')
    parser.add_argument('--budget', type=int, default=None, help='oracle restarts')
    parser.add_argument('--n', type=int, default=1000, help='grid size (cut-locus points, sphere beta values)')
    parser.add_argument('--n-phi', type=int, default=32, help='sphere phi0 values')
    parser.add_argument('--beta-max', type=float, default=5.0, help='cut-locus beta bound')
    parser.add_argument('--radius', type=float, help='sphere radius in (0, pi sqrt(3)]')
    parser.add_argument('--suite', choices=SUITES + ['full'], default='full', help='check suite')
    parser.add_argument('--grid', action='store_true', help='diameter: also maximize t1 on the default grid')
    parser.add_argument('--profile', default=None, help='tolerance profile (default, strict, quick or a JSON path)')
    parser.add_argument('--seed', type=int, default=None, help='oracle / check seed')
    parser.add_argument('--tol', type=float, default=None, help='distance solver tolerance')
    parser.add_argument('--jobs', type=int, default=None,
                        help='worker processes for grid work (default: physical cores)')
    parser.add_argument('--verbose', action='store_true', help='DEBUG console logging')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.tol is not None and not args.tol > 0.0:
        parser.error("--tol must be positive")
    if args.jobs is not None and args.jobs < 1:
        parser.error("--jobs must be >= 1")

    try:
        cli = SRSO3CLI(profile=args.profile, tol=args.tol, jobs=args.jobs, seed=args.seed, verbose=args.verbose)
    except (ValueError, OSError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == 'geodesic':
            if args.beta is None:
                parser.error("geodesic needs --beta")
            code = cli.geodesic(args.phi0, args.beta, args.t_max, args.steps, args.format, args.output)

        elif args.command == 'cut-time':
            if (args.beta is None) == (args.beta_range is None):
                parser.error("cut-time needs exactly one of --beta or --beta-range")
            code = cli.cut_time(args.beta, args.beta_range, args.format, args.output)

        elif args.command == 'diameter':
            code = cli.diameter(args.grid)

        elif args.command == 'distance':
            target = _target_from_args(parser, args, cli.validate_tol)
            code = cli.distance(target, args.oracle, args.segments, args.budget, args.format, args.output)

        elif args.command == 'cut-locus':
            code = cli.cut_locus(args.n, args.beta_max, args.format, args.output)

        elif args.command == 'sphere':
            if args.radius is None:
                parser.error("sphere needs --radius")
            code = cli.sphere(args.radius, args.n, args.n_phi, args.format, args.output)

        elif args.command == 'check':
            code = cli.check(args.suite, args.format, args.output)

        else:
            parser.error(f"unknown command: {args.command}")

    except (SubRiemannianError, UsageError, ValueError) as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        code = EXIT_USAGE
    except KeyboardInterrupt:
        print("\n[WARN] Interrupted", file=sys.stderr)
        code = EXIT_CHECK_FAILED
    finally:
        cli.logger.close()

    return code


if __name__ == "__main__":
    sys.exit(main())
