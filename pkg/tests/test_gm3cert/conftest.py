import math
from pathlib import Path

import pytest

from gm3cert.cli.presets import phyllotaxis
from gm3cert.model import GMParams, validate_params
from gm3cert.monitor import MonitorRow

PHYLLOTAXIS = dict(
    a1=1.0, a2=1.0, a3=1.0,
    b1=1.0, b2=1.0, b3=1.0,
    sigma=0.1, c=0.1,
    p1=2.0, p2=2.0, p3=1.0,
    q1=1.0, q2=0.0, q3=0.0,
    r1=1.0, r2=0.0, r3=0.0,
)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def params() -> GMParams:
    return validate_params(PHYLLOTAXIS)


@pytest.fixture(scope="session")
def make_params():
    def make(**changes: float) -> GMParams:
        return validate_params({**PHYLLOTAXIS, **changes})

    return make


@pytest.fixture
def phyllotaxis_config():
    return phyllotaxis()


@pytest.fixture(scope="session")
def make_monitor_rows():
    """Synthetic monitor rows with kappa = 100, or without a certificate."""

    def make(n: int = 4, kappa: bool = True):
        rows = []
        for k in range(n):
            L = 1.0 + 0.1 * math.sin(k)
            rows.append(
                MonitorRow(
                    t=k / 3.0, L=L,
                    min_u=0.9, max_u=1.1, min_v=0.8, max_v=1.2, min_w=0.7, max_w=1.3,
                    floor_margin_u=0.1, floor_margin_v=0.2, floor_margin_w=0.3,
                    qform_min=1e-3 * k,
                    kappa_margin=(100.0 - L) if kappa else math.nan,
                )
            )
        return rows

    return make
