import numpy as np
import pytest

from gm3cert.certificate import build_certificate
from gm3cert.grid import Grid
from gm3cert.integrator import perturbed_state
from gm3cert.monitor import MONITOR_COLUMNS, frame_to_rows, rows_to_frame
from gm3cert.write import (
    atomic_write_text,
    read_certificate,
    read_monitor_csv,
    read_snapshot,
    write_certificate,
    write_snapshot,
    write_table,
)


def test_certificate_file_round_trip(params, tmp_path):
    certificate = build_certificate(params, (1.0, 1.0, 1.0), 1.0, 1.0, L0=1.0)
    path = tmp_path / "nested" / "certificate.txt"
    write_certificate(certificate, path)
    assert read_certificate(path) == certificate
    assert [p.name for p in path.parent.iterdir()] == ["certificate.txt"]


def test_atomic_write_replaces_the_file(tmp_path):
    path = tmp_path / "notes.txt"
    atomic_write_text("first\n", path)
    atomic_write_text("second\n", path)
    assert path.read_text() == "second\n"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["notes.txt"]


def test_monitor_csv_round_trip_keeps_every_bit(tmp_path, make_monitor_rows):
    rows = make_monitor_rows()
    path = tmp_path / "monitor.csv"
    write_table(rows_to_frame(rows), path)
    assert path.read_text().splitlines()[0] == ",".join(MONITOR_COLUMNS)
    assert frame_to_rows(read_monitor_csv(path)) == rows


def test_missing_kappa_is_an_empty_field(tmp_path, make_monitor_rows):
    path = tmp_path / "monitor.csv"
    write_table(rows_to_frame(make_monitor_rows(2, kappa=False)), path)
    assert path.read_text().splitlines()[1].endswith(",")
    df = read_monitor_csv(path)
    assert df["kappa_margin"].isna().all()


def test_empty_monitor_csv_is_refused(tmp_path):
    header_only = tmp_path / "header.csv"
    header_only.write_text(",".join(MONITOR_COLUMNS) + "\n")
    with pytest.raises(ValueError):
        read_monitor_csv(header_only)
    blank = tmp_path / "blank.csv"
    blank.write_text("")
    with pytest.raises(ValueError):
        read_monitor_csv(blank)


def test_snapshot_file_round_trip(tmp_path):
    grid = Grid.uniform(2, 5)
    state = perturbed_state(grid, (1.0, 2.0, 3.0), 0.05, seed=12)
    path = tmp_path / "final.snapshot"
    write_snapshot(state, path)
    loaded = read_snapshot(path)
    assert loaded.grid == grid
    for original, copy in zip(state.components, loaded.components):
        np.testing.assert_array_equal(original, copy)
