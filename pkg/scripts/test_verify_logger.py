import json
import logging

from verify_logger import LOGGER_NAME, VerifyLogger


def test_check_results_are_counted(capsys):
    logger = VerifyLogger(enable_console_logging=True)
    logger.log_check_result('core', 'jacobi_identity', True, 1e-16, 1e-14)
    logger.log_check_result('cut', 'root_residual', False, 1e-9, 1e-12)
    stats = logger.get_stats()
    assert stats['checks_passed'] == 1
    assert stats['checks_failed'] == 1
    assert stats['errors_logged'] == 1
    assert stats['memory_rss_mb'] > 0
    err = capsys.readouterr().err
    assert "[OK] core.jacobi_identity" in err
    assert "[FAIL] cut.root_residual" in err
    assert '| Data: {"suite": "cut"' in err
    logger.close()


def test_console_goes_to_stderr_only(capsys):
    logger = VerifyLogger()
    logger.info("hello")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "INFO: hello" in captured.err
    logger.close()


def test_file_logging_and_stats(tmp_path):
    logger = VerifyLogger(log_dir=str(tmp_path), enable_file_logging=True, enable_console_logging=False)
    logger.log_solver_result('sr_log', 1e-12, 15, phase='invariant')
    logger.log_export('CutPoint', 10, None)
    assert logger.get_stats()['records_exported'] == 10
    logger.close()
    logs = list(tmp_path.glob('verify_log_*.log'))
    stats = list(tmp_path.glob('verify_stats_*.json'))
    assert len(logs) == 1 and len(stats) == 1
    assert "Solver sr_log" in logs[0].read_text(encoding='utf-8')
    assert json.loads(stats[0].read_text(encoding='utf-8'))['solver_calls'] == 1


def test_close_detaches_handlers():
    logger = VerifyLogger(enable_console_logging=True)
    assert logging.getLogger(LOGGER_NAME).handlers
    logger.close()
    assert logging.getLogger(LOGGER_NAME).handlers == []
