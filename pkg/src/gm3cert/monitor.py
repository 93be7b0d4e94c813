"""Proof-side diagnostics along a trajectory.

Per output step the monitor records the Lyapunov value
``L(t) = ∫ u^α / (v^β w^γ) dx``, the field extrema, the margins above the
exponential decay floors, the minimum of the gradient quadratic form and the
distance to the certified ceiling κ. `check_run` then turns those rows into a
verdict against a certificate.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gm3cert.certificate import (
    Certificate,
    ExponentTriple,
    QForm,
    kappa_bound,
)
from gm3cert.errors import NonFiniteValue
from gm3cert.grid import Grid, gradient_values, integrate_values, pairwise_sum
from gm3cert.integrator import State
from gm3cert.model import GMParams, power
from gm3cert.schemas import MonitorTable

logger = logging.getLogger(__name__)

KAPPA_RTOL = 1e-6
QFORM_TOL = 1e-10
KAPPA_CONSISTENCY_RTOL = 1e-9


@dataclass(frozen=True)
class MonitorRow:
    t: float
    L: float
    min_u: float
    max_u: float
    min_v: float
    max_v: float
    min_w: float
    max_w: float
    floor_margin_u: float
    floor_margin_v: float
    floor_margin_w: float
    qform_min: float
    kappa_margin: float


MONITOR_COLUMNS = [f.name for f in fields(MonitorRow)]


def lyapunov_density(state: State, triple: ExponentTriple) -> np.ndarray:
    """Pointwise integrand ``u^α / (v^β w^γ)``."""
    with np.errstate(over="ignore", invalid="ignore"):
        return power(state.u, triple.alpha) / (
            power(state.v, triple.beta) * power(state.w, triple.gamma)
        )


def lyapunov_value(state: State, triple: ExponentTriple) -> float:
    """Midpoint quadrature of the Lyapunov functional.

    Raises:
        NonFiniteValue: If the integrand or the integral overflows.
    """
    value = integrate_values(lyapunov_density(state, triple), state.grid)
    if not math.isfinite(value):
        raise NonFiniteValue(
            f"The Lyapunov functional overflowed at t = {state.t!r}, "
            "which is evidence of blow-up."
        )
    return value


def lemma3_floor(
    t: float, params: GMParams, ic_minima: Tuple[float, float, float]
) -> Tuple[float, float, float]:
    """Exponential lower bounds ``exp(-b_i t) min φ_i`` of the three fields.

    They follow from the maximum principle because every production term and the
    source are non-negative.
    """
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t!r}.")
    if not all(m > 0 for m in ic_minima):
        raise ValueError(f"Initial minima must be positive, got {ic_minima}.")
    return tuple(  # type: ignore[return-value]
        math.exp(-b * t) * m for b, m in zip(params.b, ic_minima)
    )


def floor_tolerance(dt: float, grid: Grid, params: GMParams) -> float:
    """Discretization allowance ``10 (dt + h^2)(1 + max b_i)`` for the floor check."""
    return 10.0 * (dt + grid.spacing**2) * (1.0 + max(params.b))


def quadratic_form_values(state: State, qform: QForm) -> np.ndarray:
    """Per-cell ``Σ_axes (Q T)·T / (1 + |T|^2)``.

    T is ``(vw∇u, uw∇v, uv∇w)`` along each axis.
    """
    u, v, w = state.components
    grad_u = gradient_values(u, state.grid)
    grad_v = gradient_values(v, state.grid)
    grad_w = gradient_values(w, state.grid)
    Q = qform.entries

    form = np.zeros(state.grid.shape)
    norm2 = np.zeros(state.grid.shape)
    for du, dv, dw in zip(grad_u, grad_v, grad_w):
        T = (v * w * du, u * w * dv, u * v * dw)
        for i in range(3):
            norm2 = norm2 + T[i] * T[i]
            for j in range(3):
                form = form + Q[i, j] * T[i] * T[j]
    return form / (1.0 + norm2)


def quadratic_form_min(state: State, qform: QForm) -> float:
    """Minimum over cells of the scaled gradient quadratic form.

    Non-negative whenever Q is positive definite, which is the pointwise version of
    the statement that diffusion cannot increase L.
    """
    return float(np.min(quadratic_form_values(state, qform)))


class Monitor:
    """Collects `MonitorRow`s. Pass an instance as the hook of `integrator.run`.

    Args:
        params (GMParams): Model parameters, used for the floors.
        triple (ExponentTriple): Exponents of L.
        qform (QForm): Gradient quadratic form for the triple.
        ic_minima (Tuple[float, float, float]): Minima of the initial fields.
        kappa (Optional[float]): Certified ceiling, or None without a certificate.
    """

    def __init__(
        self,
        params: GMParams,
        triple: ExponentTriple,
        qform: QForm,
        ic_minima: Tuple[float, float, float],
        kappa: Optional[float] = None,
    ):
        self.params = params
        self.triple = triple
        self.qform = qform
        self.ic_minima = ic_minima
        self.kappa = kappa
        self.rows: List[MonitorRow] = []

    def __call__(self, state: State, step: int) -> None:
        row = self.observe(state)
        self.rows.append(row)
        logger.debug(
            "step %d t=%r L=%r qform_min=%r", step, row.t, row.L, row.qform_min
        )

    def observe(self, state: State) -> MonitorRow:
        try:
            L = lyapunov_value(state, self.triple)
        except NonFiniteValue as err:
            logger.warning("%s", err)
            L = math.inf
        floors = lemma3_floor(state.t, self.params, self.ic_minima)
        minima, maxima = state.minima, state.maxima
        return MonitorRow(
            t=state.t,
            L=L,
            min_u=minima[0], max_u=maxima[0],
            min_v=minima[1], max_v=maxima[1],
            min_w=minima[2], max_w=maxima[2],
            floor_margin_u=minima[0] - floors[0],
            floor_margin_v=minima[1] - floors[1],
            floor_margin_w=minima[2] - floors[2],
            qform_min=quadratic_form_min(state, self.qform),
            kappa_margin=(self.kappa - L) if self.kappa is not None else math.nan,
        )

    def to_frame(self) -> pd.DataFrame:
        return rows_to_frame(self.rows)


def rows_to_frame(rows: Sequence[MonitorRow]) -> pd.DataFrame:
    """Monitor rows as a validated `MonitorTable` in the fixed CSV column order."""
    df = pd.DataFrame([asdict(row) for row in rows], columns=MONITOR_COLUMNS)
    df = df.astype(float)
    return MonitorTable.validate(df)


def frame_to_rows(df: pd.DataFrame) -> List[MonitorRow]:
    df = MonitorTable.validate(df)
    return [
        MonitorRow(**{name: float(record[name]) for name in MONITOR_COLUMNS})
        for record in df.to_dict(orient="records")
    ]


@dataclass(frozen=True)
class VerificationReport:
    """Verdict of a trajectory against a certificate.

    Without rows every check holds vacuously and `warning` is set. Without a
    certificate no claim is made and `certificate_absent` is set.
    """

    L_bounded_by_kappa: bool
    floors_hold: bool
    qform_nonneg: bool
    kappa_consistent: bool
    max_L: float
    argmax_t: float
    warning: bool = False
    certificate_absent: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            not self.certificate_absent
            and self.L_bounded_by_kappa
            and self.floors_hold
            and self.qform_nonneg
            and self.kappa_consistent
        )


def kappa_is_consistent(certificate: Certificate) -> bool:
    """Recomputes κ from the certificate's own constants and compares."""
    try:
        recomputed = kappa_bound(
            certificate.L0, certificate.mu, certificate.kappa_terms()
        )
    except (ValueError, ArithmeticError, RuntimeError):
        return False
    return math.isclose(certificate.kappa, recomputed, rel_tol=KAPPA_CONSISTENCY_RTOL)


def check_run(
    rows: Sequence[MonitorRow],
    certificate: Optional[Certificate],
    floor_tol: float = 0.0,
) -> VerificationReport:
    """Checks monitor rows against a certificate.

    Args:
        rows (Sequence[MonitorRow]): Rows from a run with the certificate's params.
        certificate (Optional[Certificate]): The certificate for the run's horizon.
        floor_tol (float, optional): Allowance for the floor margins, see
            `floor_tolerance`. Defaults to 0.

    Returns:
        VerificationReport: L <= κ (1 + 1e-6), all floor margins >= -floor_tol,
            qform_min >= -1e-10 on every row, and κ consistent with the certificate's
            constants.
    """
    if certificate is None:
        max_L, argmax_t = _max_L(rows)
        return VerificationReport(
            L_bounded_by_kappa=True,
            floors_hold=True,
            qform_nonneg=True,
            kappa_consistent=True,
            max_L=max_L,
            argmax_t=argmax_t,
            certificate_absent=True,
            notes=["No certificate: no boundedness claim is made for this run."],
        )

    consistent = kappa_is_consistent(certificate)
    if not rows:
        return VerificationReport(
            L_bounded_by_kappa=True,
            floors_hold=True,
            qform_nonneg=True,
            kappa_consistent=consistent,
            max_L=math.nan,
            argmax_t=math.nan,
            warning=True,
            notes=["No monitor rows: the trajectory checks hold vacuously."],
        )

    max_L, argmax_t = _max_L(rows)
    bounded = max_L <= certificate.kappa * (1.0 + KAPPA_RTOL)
    floors = all(
        min(row.floor_margin_u, row.floor_margin_v, row.floor_margin_w) >= -floor_tol
        for row in rows
    )
    qform = all(row.qform_min >= -QFORM_TOL for row in rows)

    notes = []
    if not bounded:
        notes.append(f"max L = {max_L!r} at t = {argmax_t!r} exceeds kappa.")
    if not floors:
        notes.append(f"A floor margin is below -{floor_tol!r}.")
    if not qform:
        notes.append("The gradient quadratic form went negative.")
    if not consistent:
        notes.append("kappa doesn't match the certificate's own constants.")
    for note in notes:
        logger.warning("%s", note)

    return VerificationReport(
        L_bounded_by_kappa=bounded,
        floors_hold=floors,
        qform_nonneg=qform,
        kappa_consistent=consistent,
        max_L=max_L,
        argmax_t=argmax_t,
        notes=notes,
    )


def _max_L(rows: Sequence[MonitorRow]) -> Tuple[float, float]:
    if not rows:
        return math.nan, math.nan
    best = max(range(len(rows)), key=lambda k: rows[k].L)
    return rows[best].L, rows[best].t


def dissipation_residuals(
    rows: Sequence[MonitorRow], certificate: Certificate
) -> np.ndarray:
    """Sampled residual of ``dL/dt <= -μ L + C5 (L^θ + α σ L^((α-1)/α))``.

    Returns:
        np.ndarray: For consecutive rows, the forward difference of L minus the
            right-hand side at the earlier row. Non-positive up to discretization
            error when the certificate is valid.
    """
    alpha = certificate.triple.alpha
    theta = certificate.lemma1.theta
    residuals = []
    for before, after in zip(rows[:-1], rows[1:]):
        dt = after.t - before.t
        if dt <= 0:
            continue
        L = before.L
        bound = -certificate.mu * L + certificate.C5 * (
            L**theta + alpha * certificate.params.sigma * L ** ((alpha - 1.0) / alpha)
        )
        residuals.append((after.L - L) / dt - bound)
    return np.array(residuals)


def brute_force_lyapunov(state: State, triple: ExponentTriple) -> float:
    """Cell-by-cell evaluation of L with the same summation tree as `lyapunov_value`."""
    density = [
        power(float(u), triple.alpha)
        / (power(float(v), triple.beta) * power(float(w), triple.gamma))
        for u, v, w in zip(state.u.ravel(), state.v.ravel(), state.w.ravel())
    ]
    return pairwise_sum(density) * state.grid.cell_volume
