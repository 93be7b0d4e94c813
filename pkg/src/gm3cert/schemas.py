"""pandera schemas for every table gm3cert writes or reads."""

import pandera as pa
from pandera.typing import Series

OUTCOMES = ["CompletedBounded", "BlowUpSuspected", "PositivityLoss"]
SWEEP_OUTCOMES = OUTCOMES + ["Failed"]
BRANCHES = ["ViaV", "ViaW", "Infeasible"]


class MonitorTable(pa.DataFrameModel):
    """One row per monitor output of a run, in CSV column order."""

    t: Series[float] = pa.Field(coerce=True, ge=0)
    L: Series[float] = pa.Field(
        coerce=True,
        ge=0,
        description="Lyapunov value. +inf when the quadrature overflowed.",
    )
    min_u: Series[float] = pa.Field(coerce=True)
    max_u: Series[float] = pa.Field(coerce=True)
    min_v: Series[float] = pa.Field(coerce=True)
    max_v: Series[float] = pa.Field(coerce=True)
    min_w: Series[float] = pa.Field(coerce=True)
    max_w: Series[float] = pa.Field(coerce=True)
    floor_margin_u: Series[float] = pa.Field(
        coerce=True, description="min u minus its exponential decay floor."
    )
    floor_margin_v: Series[float] = pa.Field(coerce=True)
    floor_margin_w: Series[float] = pa.Field(coerce=True)
    qform_min: Series[float] = pa.Field(
        coerce=True,
        description=(
            "Minimum over cells of the gradient quadratic form, "
            "scaled by 1 + |T|^2."
        ),
    )
    kappa_margin: Series[float] = pa.Field(
        coerce=True,
        nullable=True,
        description="kappa - L. Empty when the run has no certificate.",
    )

    class Config:
        strict = True
        ordered = True


class SweepTable(pa.DataFrameModel):
    """One row per sweep grid point, in grid order."""

    point: Series[int] = pa.Field(coerce=True, ge=0, unique=True)
    param_1: Series[str]
    value_1: Series[float] = pa.Field(coerce=True)
    param_2: Series[str]
    value_2: Series[float] = pa.Field(coerce=True)
    outcome: Series[str] = pa.Field(isin=SWEEP_OUTCOMES)
    t_reached: Series[float] = pa.Field(coerce=True, ge=0)
    max_L: Series[float] = pa.Field(coerce=True, nullable=True)
    feasible: Series[bool] = pa.Field(coerce=True)
    branch: Series[str] = pa.Field(isin=BRANCHES)
    kappa: Series[float] = pa.Field(
        coerce=True, nullable=True, description="Empty when no certificate exists."
    )
    note: Series[str] = pa.Field(
        nullable=True, description="Why a Failed point could not be run."
    )

    class Config:
        strict = True
        ordered = True


class ViolationTable(pa.DataFrameModel):
    """Sample points where the interpolation inequality failed."""

    x: Series[float] = pa.Field(coerce=True, ge=0)
    y: Series[float] = pa.Field(coerce=True, gt=0)
    z: Series[float] = pa.Field(coerce=True, gt=0)
    lhs: Series[float] = pa.Field(coerce=True)
    rhs: Series[float] = pa.Field(coerce=True)

    class Config:
        strict = True
        ordered = True
