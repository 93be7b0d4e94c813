"""Two-parameter sweeps, run concurrently and recorded in a SQLite ledger.

Each grid point is an independent simulation plus a certification attempt. The
parent process commits every finished point to a `SweepPoint` table, so an
interrupted sweep can be resumed. The CSV is assembled from the ledger in grid
order, which makes it independent of the worker count and completion order.
"""

import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import pandas as pd
from sqlmodel import Field, Session, SQLModel, create_engine, select

from gm3cert.cli.config import SweepSpec
from gm3cert.cli.workflows import simulate_config
from gm3cert.errors import GM3Error
from gm3cert.model import check_exponent_condition
from gm3cert.schemas import SweepTable

logger = logging.getLogger(__name__)

LEDGER_NAME = "sweep.db"


class SweepPoint(SQLModel, table=True):
    """One finished grid point of a sweep."""

    point: int = Field(primary_key=True)
    sweep_key: str = Field(index=True)
    param_1: str
    value_1: float
    param_2: str
    value_2: float
    outcome: str
    t_reached: float
    max_L: Optional[float] = None
    feasible: bool
    branch: str
    kappa: Optional[float] = None
    note: Optional[str] = None


SWEEP_COLUMNS = [
    "point", "param_1", "value_1", "param_2", "value_2", "outcome",
    "t_reached", "max_L", "feasible", "branch", "kappa", "note",
]

FAILED = "Failed"


def sweep_key(spec: SweepSpec) -> str:
    """Fingerprint of the base config and both axes."""
    text = "\n".join([spec.base.to_ini(), repr(spec.x), repr(spec.y)])
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def run_point(spec: SweepSpec, point: int, x: float, y: float) -> Dict:
    """Certifies and simulates one grid point. Runs in a worker process.

    A point whose run can't start, e.g. an explicit dt above the stability
    bound, is recorded as ``Failed`` with the error as its note.
    """
    cfg = spec.config_at(x, y)
    branch = check_exponent_condition(cfg.params)
    coords = {
        "point": point,
        "param_1": spec.x.key,
        "value_1": x,
        "param_2": spec.y.key,
        "value_2": y,
    }
    try:
        simulation = simulate_config(cfg)
    except GM3Error as err:
        logger.warning("Sweep point %d failed: %s", point, err)
        return {
            **coords,
            "outcome": FAILED,
            "t_reached": 0.0,
            "max_L": math.nan,
            "feasible": False,
            "branch": branch.selected_branch.value,
            "kappa": math.nan,
            "note": str(err),
        }
    certificate = simulation.certificate
    L_values = [row.L for row in simulation.monitor.rows]
    return {
        **coords,
        "outcome": simulation.outcome.kind.value,
        "t_reached": simulation.outcome.t,
        "max_L": max(L_values) if L_values else math.nan,
        "feasible": certificate is not None and certificate.valid,
        "branch": branch.selected_branch.value,
        "kappa": certificate.kappa if certificate is not None else math.nan,
        "note": None,
    }


def _to_ledger(row: Dict, key: str) -> SweepPoint:
    values = dict(row)
    for name in ("max_L", "kappa"):
        if math.isnan(values[name]):
            values[name] = None
    return SweepPoint(sweep_key=key, **values)


def _from_ledger(entry: SweepPoint) -> Dict:
    row = {name: getattr(entry, name) for name in SWEEP_COLUMNS}
    for name in ("max_L", "kappa"):
        if row[name] is None:
            row[name] = math.nan
    return row


@dataclass(frozen=True)
class SweepSummary:
    table: pd.DataFrame
    computed: int
    skipped: int


def run_sweep(
    spec: SweepSpec,
    out_dir: Union[str, Path],
    workers: int = 1,
    resume: bool = False,
) -> SweepSummary:
    """Runs every grid point of a sweep and returns the outcome table.

    Args:
        spec (SweepSpec): Axes and base config.
        out_dir (Union[str, Path]): Directory of the ledger ``sweep.db``.
        workers (int, optional): Worker processes. 1 runs in-process. Defaults to 1.
        resume (bool, optional): Keep points already in the ledger for this sweep
            instead of starting over. Defaults to False.

    Returns:
        SweepSummary: The validated `SweepTable` in grid order, and how many points
            were computed and skipped.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    engine = create_engine(f"sqlite:///{out_dir / LEDGER_NAME}")
    SQLModel.metadata.create_all(engine)
    key = sweep_key(spec)

    with Session(engine) as session:
        stale = session.exec(select(SweepPoint)).all()
        if resume:
            stale = [entry for entry in stale if entry.sweep_key != key]
            if stale:
                logger.warning(
                    "Discarding %d ledger points of a different sweep.",
                    len(stale),
                )
        for entry in stale:
            session.delete(entry)
        session.commit()
        done = {entry.point for entry in session.exec(select(SweepPoint)).all()}

    points = spec.points()
    todo: List[Tuple[int, float, float]] = [p for p in points if p[0] not in done]
    logger.info(
        "Sweep over %s x %s: %d points, %d already done",
        spec.x.key, spec.y.key, len(points), len(points) - len(todo),
    )

    with Session(engine) as session:

        def record(row: Dict) -> None:
            session.add(_to_ledger(row, key))
            session.commit()
            logger.info("Sweep point %d finished: %s", row["point"], row["outcome"])

        if workers <= 1:
            for point, x, y in todo:
                record(run_point(spec, point, x, y))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(run_point, spec, point, x, y) for point, x, y in todo
                ]
                for future in as_completed(futures):
                    record(future.result())

        query = (
            select(SweepPoint)
            .where(SweepPoint.sweep_key == key)
            .order_by(SweepPoint.point)  # type: ignore[arg-type]
        )
        entries = session.exec(query).all()
        rows = [_from_ledger(entry) for entry in entries]

    engine.dispose()
    table = SweepTable.validate(pd.DataFrame(rows, columns=SWEEP_COLUMNS))
    return SweepSummary(
        table=table, computed=len(todo), skipped=len(points) - len(todo)
    )
