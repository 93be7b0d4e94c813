import math

import pandas as pd
import pytest
from sqlmodel import Session, create_engine, select

from gm3cert.cli.config import SweepAxis, SweepSpec
from gm3cert.cli.presets import phyllotaxis
from gm3cert.cli.sweep import LEDGER_NAME, SWEEP_COLUMNS, SweepPoint, run_sweep
from gm3cert.write import write_table


@pytest.fixture
def short_base():
    return phyllotaxis().with_overrides(["t_end=0.01", "grid.n=8"])


@pytest.fixture
def spec(short_base):
    return SweepSpec(
        SweepAxis.parse("p1:2:4:2"), SweepAxis.parse("b1:1:2:2"), short_base
    )


def delete_points(out_dir, points):
    engine = create_engine(f"sqlite:///{out_dir / LEDGER_NAME}")
    with Session(engine) as session:
        query = select(SweepPoint).where(SweepPoint.point.in_(points))
        for entry in session.exec(query).all():
            session.delete(entry)
        session.commit()
    engine.dispose()


def test_sweep_table(spec, tmp_path):
    summary = run_sweep(spec, tmp_path)
    table = summary.table
    assert (summary.computed, summary.skipped) == (4, 0)
    assert list(table.columns) == SWEEP_COLUMNS
    assert list(table["point"]) == [0, 1, 2, 3]
    assert list(table["value_1"]) == [2.0, 2.0, 4.0, 4.0]
    assert list(table["value_2"]) == [1.0, 2.0, 1.0, 2.0]
    assert set(table["outcome"]) == {"CompletedBounded"}

    # p1 = 4 violates the exponent condition.
    assert list(table["feasible"]) == [True, True, False, False]
    assert all(table["kappa"].iloc[:2] > 0)
    assert all(math.isnan(k) for k in table["kappa"].iloc[2:])
    assert (tmp_path / LEDGER_NAME).exists()


def test_worker_count_does_not_change_the_result(spec, tmp_path):
    serial = run_sweep(spec, tmp_path / "serial", workers=1).table
    parallel = run_sweep(spec, tmp_path / "parallel", workers=2).table
    pd.testing.assert_frame_equal(serial, parallel)

    write_table(serial, tmp_path / "serial.csv")
    write_table(parallel, tmp_path / "parallel.csv")
    assert (tmp_path / "serial.csv").read_bytes() == (
        tmp_path / "parallel.csv"
    ).read_bytes()


def test_resume_only_computes_missing_points(spec, tmp_path):
    first = run_sweep(spec, tmp_path).table
    delete_points(tmp_path, [1, 3])

    resumed = run_sweep(spec, tmp_path, resume=True)
    assert (resumed.computed, resumed.skipped) == (2, 2)
    pd.testing.assert_frame_equal(resumed.table, first)

    again = run_sweep(spec, tmp_path, resume=True)
    assert (again.computed, again.skipped) == (0, 4)

    fresh = run_sweep(spec, tmp_path)
    assert (fresh.computed, fresh.skipped) == (4, 0)


def test_resume_discards_a_different_sweep(spec, short_base, tmp_path):
    run_sweep(spec, tmp_path)
    other = SweepSpec(
        SweepAxis.parse("p1:2:3:2"), SweepAxis.parse("b1:1:2:2"), short_base
    )
    summary = run_sweep(other, tmp_path, resume=True)
    assert (summary.computed, summary.skipped) == (4, 0)
    assert list(summary.table["value_1"]) == [2.0, 2.0, 3.0, 3.0]


def test_degenerate_axis(short_base, tmp_path):
    spec = SweepSpec(
        SweepAxis.parse("b1:1.5:1.5:2"), SweepAxis.parse("b2:1:2:2"), short_base
    )
    table = run_sweep(spec, tmp_path).table
    assert list(table["value_1"]) == [1.5] * 4
    assert table["feasible"].all()


@pytest.mark.slow
def test_five_by_five_sweep(short_base, tmp_path):
    spec = SweepSpec(
        SweepAxis.parse("p1:1.2:3.0:5"), SweepAxis.parse("b1:0.5:2.0:5"), short_base
    )
    summary = run_sweep(spec, tmp_path, workers=2)
    table = summary.table
    assert len(table) == 25
    assert list(table["point"]) == list(range(25))
    assert table.loc[table["value_1"] == 3.0, "feasible"].eq(False).all()
    assert table.loc[table["value_1"] < 2.0, "feasible"].all()


def test_a_point_that_cannot_run_is_recorded_as_failed(short_base, tmp_path):
    # The explicit bound for 8 cells is 1/128, so dt = 0.01 is refused.
    spec = SweepSpec(
        SweepAxis.parse("dt:0.001:0.01:2"), SweepAxis.parse("b1:1:2:2"), short_base
    )
    summary = run_sweep(spec, tmp_path)
    table = summary.table
    assert (summary.computed, summary.skipped) == (4, 0)
    assert list(table["outcome"]) == ["CompletedBounded"] * 2 + ["Failed"] * 2
    assert table["note"].iloc[:2].isna().all()
    assert all("stability" in note.lower() for note in table["note"].iloc[2:])
    assert not table["feasible"].iloc[2:].any()

    write_table(table, tmp_path / "sweep.csv")
    assert "Failed" in (tmp_path / "sweep.csv").read_text()
