import io
import json
import math

import pandas as pd
import pytest

from srso3_cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, SRSO3CLI, build_parser, default_jobs, main


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    for name in ("SRSO3_TOL", "SRSO3_SOLVER_TOL", "SRSO3_LOG_DIR"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_diameter(capsys):
    assert main(['diameter']) == EXIT_OK
    assert capsys.readouterr().out == "5.441398092702653\n"


def test_cut_time_scalar(capsys):
    assert main(['cut-time', '--beta', '0']) == EXIT_OK
    assert capsys.readouterr().out == "3.141592653589793\n"


def test_cut_time_range_as_json(capsys):
    assert main(['cut-time', '--beta-range', '-1', '1', '5', '--format', 'json']) == EXIT_OK
    records = json.loads(capsys.readouterr().out)
    assert [r['beta'] for r in records] == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert records[2] == {'beta': 0.0, 't1': math.pi, 'branch': 'BetaZero'}
    assert records[0]['branch'] == 'FullCircle'
    assert records[1]['branch'] == 'DigonPi'


def test_geodesic_csv(capsys):
    assert main(['geodesic', '--phi0', '0', '--beta', '0', '--t-max', '3.14159', '--steps', '2']) == EXIT_OK
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(df) == 2
    assert df['t'].tolist() == [0.0, 3.14159]
    assert df['x'].iloc[0] == pytest.approx(1.0, abs=1e-15)
    assert df['x'].iloc[-1] == pytest.approx(-1.0, abs=1e-10)


def test_geodesic_json_to_file(capsys, workdir):
    target = workdir / "geodesic.json"
    assert main(['geodesic', '--beta', '0.5', '--steps', '3', '--format', 'json', '--output', str(target)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    records = json.loads(target.read_text(encoding="utf-8"))
    assert len(records) == 3
    assert records[0]['r11'] == pytest.approx(1.0, abs=1e-15)


def test_distance_axis_angle(capsys):
    assert main(['distance', '--axis', '1', '0', '0', '--angle', '3.141592653589793']) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(math.pi * math.sqrt(3.0), abs=1e-6)


def test_distance_short_rotation(capsys):
    assert main(['distance', '--axis', '0', '0', '1', '--angle', '1e-4']) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(1e-4, rel=1e-9)


def test_distance_matrix_export(capsys):
    argv = ['distance', '--matrix', '-1', '0', '0', '0', '-1', '0', '0', '0', '1', '--format', 'json']
    assert main(argv) == EXIT_OK
    record = json.loads(capsys.readouterr().out)[0]
    assert record['distance'] == pytest.approx(math.pi, abs=1e-9)
    assert record['multiplicity'] == 'CutPair'
    assert record['oracle_bound'] is None


def test_invalid_matrix_is_usage_error(capsys):
    assert main(['distance', '--matrix', '2', '0', '0', '0', '1', '0', '0', '0', '1']) == EXIT_USAGE
    assert "[ERROR]" in capsys.readouterr().err


def test_non_unit_axis_is_usage_error():
    assert main(['distance', '--axis', '1', '1', '0', '--angle', '1.0']) == EXIT_USAGE


def test_sphere_radius_out_of_range():
    assert main(['sphere', '--radius', '6.0']) == EXIT_USAGE


def test_sphere_samples(capsys):
    assert main(['sphere', '--radius', '1.0', '--n', '4', '--n-phi', '2']) == EXIT_OK
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert (df['radius'] == 1.0).all()
    assert (df['t'] == 1.0).all()


def test_cut_locus_rows(capsys):
    assert main(['cut-locus', '--n', '7', '--beta-max', '2']) == EXIT_OK
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(df) == 7
    assert df['beta'].is_monotonic_increasing


@pytest.mark.parametrize("argv", [
    ['geodesic'],
    ['cut-time'],
    ['cut-time', '--beta', '0', '--beta-range', '0', '1', '3'],
    ['distance'],
    ['distance', '--axis', '1', '0', '0'],
    ['sphere'],
    ['teleport'],
    ['diameter', '--tol', '0'],
])
def test_missing_or_bad_flags_exit_2(argv):
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == EXIT_USAGE


def test_unknown_profile_is_usage_error(capsys):
    assert main(['diameter', '--profile', 'no-such-profile']) == EXIT_USAGE
    assert "Unknown tolerance profile" in capsys.readouterr().err


def test_check_core_writes_status(capsys, workdir):
    assert main(['check', '--suite', 'core', '--profile', 'quick']) == EXIT_OK
    assert "[OK] 7/7 checks passed" in capsys.readouterr().err
    status = json.loads((workdir / "data" / "reports" / "check_results_latest.json").read_text(encoding="utf-8"))
    assert status['passed'] is True
    assert status['profile'] == 'quick'
    assert status['suites'] == ['core']


def test_check_failure_exit_code(monkeypatch):
    import check_suite

    def failing(self):
        self._record('forced', 2.0, 1.0)

    monkeypatch.setattr(check_suite.CheckSuite, '_suite_core', failing)
    assert main(['check', '--suite', 'core', '--profile', 'quick']) == EXIT_CHECK_FAILED


def test_parser_defaults():
    args = build_parser().parse_args(['check'])
    assert args.suite == 'full'
    assert args.format is None
    assert args.jobs is None


def test_single_identity_record(capsys):
    assert main(['geodesic', '--beta', '1.0', '--t-max', '0', '--steps', '1', '--format', 'json']) == EXIT_OK
    records = json.loads(capsys.readouterr().out)
    assert len(records) == 1
    assert records[0]['t'] == 0.0
    assert [records[0][k] for k in ('r11', 'r22', 'r33', 'r12')] == [1.0, 1.0, 1.0, 0.0]


def test_same_flags_same_bytes(capsys):
    argv = ['cut-locus', '--n', '9', '--format', 'json']
    main(argv)
    first = capsys.readouterr().out
    main(argv + ['--jobs', '2'])
    assert capsys.readouterr().out == first


def test_jobs_default_to_physical_cores(monkeypatch):
    import srso3_cli

    monkeypatch.setattr(srso3_cli.psutil, 'cpu_count', lambda logical=True: 6)
    assert default_jobs() == 6
    for jobs, expected in ((None, 6), (2, 2)):
        cli = SRSO3CLI(jobs=jobs)
        assert cli.jobs == expected
        cli.logger.close()
    monkeypatch.setattr(srso3_cli.psutil, 'cpu_count', lambda logical=True: None)
    assert default_jobs() == 1


def test_profile_validate_tol_reaches_target_parsing(capsys):
    argv = ['distance', '--matrix', str(1.0 + 1e-9), '0', '0', '0', '1', '0', '0', '0', '1']
    assert main(argv) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(0.0, abs=1e-9)
    assert main(argv + ['--profile', 'strict']) == EXIT_USAGE


def test_profile_bisection_iterations_reach_cut_time(capsys, workdir):
    profile = workdir / "coarse.json"
    profile.write_text(json.dumps({"profile": "coarse", "cut": {"bisection_iterations": 2}}), encoding="utf-8")
    assert main(['cut-time', '--beta', '0.3']) == EXIT_OK
    fine = float(capsys.readouterr().out)
    assert main(['cut-time', '--beta', '0.3', '--profile', str(profile)]) == EXIT_OK
    coarse = float(capsys.readouterr().out)
    assert abs(coarse - fine) > 1e-6
