#!/usr/bin/env python3
"""
Verify Logger - SO(3) Geometry Toolkit v1.0.0
Logging for the CLI and the invariant suites (console on stderr, optional file)
"""

import os
import logging
import json
from datetime import datetime
from pathlib import Path
from typing import Dict, Any, Optional

import psutil

LOGGER_NAME = 'srso3'


class VerifyLogger:
    """Logger for check runs, solver calls and exports - v1.0.0"""

    def __init__(self, log_dir="logs/verify", enable_file_logging=False, enable_console_logging=True,
                 level: str = "INFO"):
        self.log_dir = log_dir
        self.enable_file_logging = enable_file_logging
        self.enable_console_logging = enable_console_logging
        self.console_level = getattr(logging, str(level).upper(), logging.INFO)

        if self.enable_file_logging:
            Path(self.log_dir).mkdir(parents=True, exist_ok=True)

        self.log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        self.date_format = '%Y-%m-%d %H:%M:%S'

        self.logger = self._setup_logger()

        self.operation_stats = {
            'start_time': datetime.now().isoformat(),
            'operations_logged': 0,
            'errors_logged': 0,
            'warnings_logged': 0,
            'checks_passed': 0,
            'checks_failed': 0,
            'solver_calls': 0,
            'records_exported': 0
        }

        self.debug("VerifyLogger v1.0.0 initialized")

    def _setup_logger(self) -> logging.Logger:
        logger = logging.getLogger(LOGGER_NAME)
        logger.setLevel(logging.DEBUG)
        logger.propagate = False

        for handler in logger.handlers[:]:
            logger.removeHandler(handler)

        if self.enable_file_logging:
            timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
            log_file = os.path.join(self.log_dir, f'verify_log_{timestamp}.log')

            file_handler = logging.FileHandler(log_file, encoding='utf-8')
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(self.log_format, self.date_format))
            logger.addHandler(file_handler)

        # stdout carries exported data; console messages go to stderr
        if self.enable_console_logging:
            console_handler = logging.StreamHandler()
            console_handler.setLevel(self.console_level)
            console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
            logger.addHandler(console_handler)

        return logger

    def info(self, message: str, extra_data: Optional[Dict] = None):
        self._log_with_stats(logging.INFO, message, extra_data)

    def warning(self, message: str, extra_data: Optional[Dict] = None):
        self.operation_stats['warnings_logged'] += 1
        self._log_with_stats(logging.WARNING, message, extra_data)

    def error(self, message: str, extra_data: Optional[Dict] = None):
        self.operation_stats['errors_logged'] += 1
        self._log_with_stats(logging.ERROR, message, extra_data)

    def debug(self, message: str, extra_data: Optional[Dict] = None):
        self._log_with_stats(logging.DEBUG, message, extra_data)

    def _log_with_stats(self, level: int, message: str, extra_data: Optional[Dict] = None):
        self.operation_stats['operations_logged'] += 1

        if extra_data:
            formatted_message = f"{message} | Data: {json.dumps(extra_data, default=str, ensure_ascii=False)}"
        else:
            formatted_message = message

        self.logger.log(level, formatted_message)

    def log_check_result(self, suite: str, name: str, passed: bool, value: Any = None,
                         bound: Any = None, **kwargs):
        """One invariant check; failures are logged at ERROR"""
        extra_data = {
            'suite': suite,
            'name': name,
            'passed': passed,
            'value': value,
            'bound': bound,
            **kwargs
        }

        if passed:
            self.operation_stats['checks_passed'] += 1
            self.info(f"[OK] {suite}.{name}", extra_data)
        else:
            self.operation_stats['checks_failed'] += 1
            self.error(f"[FAIL] {suite}.{name} - value {value} exceeds bound {bound}", extra_data)

    def log_solver_result(self, kind: str, residual: float, iterations: int = 0, **kwargs):
        self.operation_stats['solver_calls'] += 1
        extra_data = {
            'kind': kind,
            'residual': residual,
            'iterations': iterations,
            **kwargs
        }
        self.debug(f"Solver {kind}: residual {residual:.3e} after {iterations} evaluations", extra_data)

    def log_export(self, kind: str, records: int, path: Optional[str] = None, **kwargs):
        self.operation_stats['records_exported'] += records
        extra_data = {
            'kind': kind,
            'records': records,
            'path': path or '<stdout>',
            **kwargs
        }
        self.debug(f"Exported {records} {kind} records -> {path or '<stdout>'}", extra_data)

    def get_stats(self) -> Dict[str, Any]:
        current_time = datetime.now()
        start_time = datetime.fromisoformat(self.operation_stats['start_time'])
        duration = current_time - start_time
        process = psutil.Process()

        return {
            **self.operation_stats,
            'current_time': current_time.isoformat(),
            'duration_seconds': duration.total_seconds(),
            'memory_rss_mb': round(process.memory_info().rss / (1024 * 1024), 2),
            'log_directory': self.log_dir,
            'file_logging_enabled': self.enable_file_logging,
            'console_logging_enabled': self.enable_console_logging
        }

    def save_stats(self) -> str:
        stats = self.get_stats()
        Path(self.log_dir).mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        stats_file = os.path.join(self.log_dir, f'verify_stats_{timestamp}.json')

        with open(stats_file, 'w', encoding='utf-8') as f:
            json.dump(stats, f, ensure_ascii=False, indent=2, default=str)

        self.debug(f"Stats saved: {stats_file}")
        return stats_file

    def close(self, save_stats: Optional[bool] = None):
        """Close handlers; stats are saved when file logging is on unless told otherwise"""
        final_stats = self.get_stats()
        self.debug(f"VerifyLogger closing - operations: {final_stats['operations_logged']}, "
                   f"errors: {final_stats['errors_logged']}, warnings: {final_stats['warnings_logged']}")

        should_save = self.enable_file_logging if save_stats is None else save_stats
        if should_save:
            self.save_stats()

        for handler in self.logger.handlers[:]:
            handler.close()
            self.logger.removeHandler(handler)

