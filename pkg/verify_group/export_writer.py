#!/usr/bin/env python3
"""
Export Writer - SO(3) Geometry Toolkit v1.0.0
Plot-ready CSV / JSON exports with fixed column sets per record kind.
Every float is written with 17 significant digits in both formats.
"""

import io
import json
import math
import os
import sys
from datetime import datetime
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"
MATRIX_COLUMNS = [f"r{i}{j}" for i in range(1, 4) for j in range(1, 4)]
POINT_COLUMNS = ['x', 'y', 'z']


class ExportWriter:
    """Export generator v1.0.0 - GeodesicSample / CutPoint / SpherePoint / Check / Distance / CutTime"""

    def __init__(self, output_dir="data/reports"):
        self.output_dir = output_dir
        self.version = "1.0.0"

        self.geodesic_sample_columns = ['t', 'beta', 'phi0'] + MATRIX_COLUMNS + POINT_COLUMNS
        self.cut_point_columns = ['beta', 't1', 'branch'] + MATRIX_COLUMNS + POINT_COLUMNS
        self.sphere_point_columns = ['radius', 'beta', 'phi0', 't'] + MATRIX_COLUMNS + POINT_COLUMNS
        self.check_columns = ['suite', 'name', 'passed', 'value', 'bound']
        self.distance_columns = ['distance', 'phi0', 'beta', 'time', 'residual', 'multiplicity', 'oracle_bound']
        self.cut_time_columns = ['beta', 't1', 'branch']

        self.columns = {
            'GeodesicSample': self.geodesic_sample_columns,
            'CutPoint': self.cut_point_columns,
            'SpherePoint': self.sphere_point_columns,
            'Check': self.check_columns,
            'Distance': self.distance_columns,
            'CutTime': self.cut_time_columns,
        }

    @staticmethod
    def _matrix_fields(matrix: np.ndarray) -> Dict[str, float]:
        flat = np.asarray(matrix, dtype=float).reshape(9)
        fields = {name: float(v) for name, v in zip(MATRIX_COLUMNS, flat)}
        column = np.asarray(matrix, dtype=float)[:, 0]
        fields.update({name: float(v) for name, v in zip(POINT_COLUMNS, column)})
        return fields

    def geodesic_sample_frame(self, phi0: float, beta: float, times: Sequence[float],
                              matrices: Sequence[np.ndarray]) -> pd.DataFrame:
        rows = []
        for t, matrix in zip(times, matrices):
            rows.append({'t': float(t), 'beta': float(beta), 'phi0': float(phi0), **self._matrix_fields(matrix)})
        return pd.DataFrame(rows, columns=self.geodesic_sample_columns)

    def cut_point_frame(self, points: Iterable[Any]) -> pd.DataFrame:
        rows = []
        for point in points:
            rows.append({'beta': point.beta, 't1': point.t1, 'branch': point.branch.value,
                         **self._matrix_fields(point.endpoint.matrix)})
        return pd.DataFrame(rows, columns=self.cut_point_columns)

    def sphere_point_frame(self, radius: float, samples: Iterable[Any]) -> pd.DataFrame:
        rows = []
        for sample in samples:
            rows.append({'radius': float(radius), 'beta': sample.param.beta, 'phi0': sample.param.phi0,
                         't': sample.t, **self._matrix_fields(sample.rotation.matrix)})
        return pd.DataFrame(rows, columns=self.sphere_point_columns)

    def check_frame(self, results: Iterable[Dict[str, Any]]) -> pd.DataFrame:
        rows = [{column: result.get(column) for column in self.check_columns} for result in results]
        return pd.DataFrame(rows, columns=self.check_columns)

    def distance_frame(self, results: Iterable[Any]) -> pd.DataFrame:
        rows = []
        for result in results:
            rows.append({'distance': result.distance, 'phi0': result.param.phi0, 'beta': result.param.beta,
                         'time': result.time, 'residual': result.residual,
                         'multiplicity': result.multiplicity.value,
                         'oracle_bound': result.oracle_bound})
        return pd.DataFrame(rows, columns=self.distance_columns)

    def cut_time_frame(self, betas: Sequence[float], t1s: Sequence[float], branches: Sequence[Any]) -> pd.DataFrame:
        rows = [{'beta': float(b), 't1': float(t), 'branch': getattr(br, 'value', br)}
                for b, t, br in zip(betas, t1s, branches)]
        return pd.DataFrame(rows, columns=self.cut_time_columns)

    @staticmethod
    def _json_value(value: Any) -> str:
        if value is None:
            return "null"
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            if not math.isfinite(float(value)):
                return "null"
            return FLOAT_FORMAT % float(value)
        return json.dumps(str(value), ensure_ascii=False)

    def to_csv_text(self, df: pd.DataFrame) -> str:
        buffer = io.StringIO()
        df.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return buffer.getvalue()

    def to_json_text(self, df: pd.DataFrame) -> str:
        records = []
        for row in df.itertuples(index=False, name=None):
            fields = ", ".join(f"{json.dumps(column)}: {self._json_value(value)}"
                               for column, value in zip(df.columns, row))
            records.append("  {" + fields + "}")
        if not records:
            return "[]\n"
        return "[\n" + ",\n".join(records) + "\n]\n"

    def render(self, df: pd.DataFrame, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv_text(df)
        if fmt == "json":
            return self.to_json_text(df)
        raise ValueError(f"Unknown export format: {fmt}")

    def write(self, df: pd.DataFrame, fmt: str = "csv", output: Optional[str] = None,
              stream: Optional[TextIO] = None) -> Optional[str]:
        """Write to output (path) or the stream (stdout by default); returns the path if any"""
        text = self.render(df, fmt)
        if output:
            directory = os.path.dirname(output)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(output, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            return output
        (stream or sys.stdout).write(text)
        return None

    def save_check_results(self, results: List[Dict[str, Any]], suites: Sequence[str],
                           profile: str, filename: str = "check_results_latest.json") -> str:
        """Status file of the latest check run (latest file only)"""
        os.makedirs(self.output_dir, exist_ok=True)
        output_path = os.path.join(self.output_dir, filename)
        payload = {
            'version': self.version,
            'timestamp': datetime.now().isoformat(),
            'profile': profile,
            'suites': list(suites),
            'passed': all(r.get('passed') for r in results if r.get('gating', True)),
            'results': results
        }
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=True, indent=2, default=str)
        return output_path
