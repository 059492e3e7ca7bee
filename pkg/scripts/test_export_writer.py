import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from cut_locus import cut_time, sample_cut_locus
from export_writer import ExportWriter
from geodesic_engine import GeodesicParam, sample_geodesic
from sr_distance import sample_sphere, sr_log


@pytest.fixture
def writer(tmp_path):
    return ExportWriter(output_dir=str(tmp_path / "reports"))


def _geodesic_frame(writer):
    p = GeodesicParam(0.3, 0.7)
    times, matrices = sample_geodesic(p, 2.0, 5)
    return writer.geodesic_sample_frame(p.phi0, p.beta, times, matrices)


def test_column_sets(writer):
    df = _geodesic_frame(writer)
    assert list(df.columns) == writer.columns['GeodesicSample']
    assert list(df.columns)[:3] == ['t', 'beta', 'phi0']
    assert 'r11' in df.columns and 'r33' in df.columns
    assert list(writer.cut_point_frame(sample_cut_locus(3)).columns) == writer.columns['CutPoint']
    sphere = writer.sphere_point_frame(1.0, sample_sphere(1.0, 4, 2))
    assert list(sphere.columns) == writer.columns['SpherePoint']
    assert (sphere['radius'] == 1.0).all()


def test_projection_columns_match_first_column(writer):
    df = _geodesic_frame(writer)
    last = df.iloc[-1]
    assert [last['x'], last['y'], last['z']] == [last['r11'], last['r21'], last['r31']]


def test_csv_and_json_carry_identical_numbers(writer):
    df = _geodesic_frame(writer)
    csv_text = writer.render(df, "csv")
    json_text = writer.render(df, "json")
    from_csv = pd.read_csv(io.StringIO(csv_text), float_precision="round_trip")
    from_json = json.loads(json_text)
    assert len(from_json) == len(from_csv) == 5
    for record, (_, row) in zip(from_json, from_csv.iterrows()):
        for column in df.columns:
            assert record[column] == row[column]


def test_floats_round_trip_exactly(writer):
    df = _geodesic_frame(writer)
    back = pd.read_csv(io.StringIO(writer.to_csv_text(df)), float_precision="round_trip")
    assert np.array_equal(back.to_numpy(), df.to_numpy())


def test_csv_header_and_line_endings(writer):
    text = writer.to_csv_text(writer.cut_time_frame([0.0], [math.pi], ['BetaZero']))
    assert text == "beta,t1,branch\n0,3.1415926535897931,BetaZero\n"


def test_json_nulls_and_booleans(writer):
    df = writer.check_frame([{'suite': 'core', 'name': 'x', 'passed': True, 'value': 0.5, 'bound': 1.0}])
    records = json.loads(writer.to_json_text(df))
    assert records == [{'suite': 'core', 'name': 'x', 'passed': True, 'value': 0.5, 'bound': 1.0}]
    distance = writer.distance_frame([sr_log(np.eye(3))])
    record = json.loads(writer.to_json_text(distance))[0]
    assert record['oracle_bound'] is None
    assert record['distance'] == 0.0
    assert writer.to_json_text(distance.iloc[0:0]) == "[]\n"


def test_cut_point_branch_names(writer):
    df = writer.cut_point_frame([cut_time(0.0), cut_time(0.3), cut_time(2.0)])
    assert df['branch'].tolist() == ['BetaZero', 'DigonPi', 'FullCircle']


def test_write_to_file_and_stream(writer, tmp_path):
    df = _geodesic_frame(writer)
    target = tmp_path / "out" / "geodesic.csv"
    assert writer.write(df, "csv", str(target)) == str(target)
    assert target.read_text(encoding="utf-8") == writer.to_csv_text(df)
    stream = io.StringIO()
    assert writer.write(df, "json", stream=stream) is None
    assert stream.getvalue() == writer.to_json_text(df)
    with pytest.raises(ValueError):
        writer.render(df, "xml")


def test_save_check_results(writer):
    results = [
        {'suite': 'core', 'name': 'a', 'passed': True, 'value': 0.0, 'bound': 1.0, 'gating': True},
        {'suite': 'cut', 'name': 'b', 'passed': False, 'value': 2.0, 'bound': 1.0, 'gating': False},
    ]
    path = writer.save_check_results(results, ['core', 'cut'], 'quick')
    with open(path, encoding='utf-8') as f:
        payload = json.load(f)
    assert payload['version'] == writer.version
    assert payload['profile'] == 'quick'
    assert payload['suites'] == ['core', 'cut']
    assert payload['passed'] is True
    assert len(payload['results']) == 2
