"""Brute-force validators, independent of the certificate pipeline.

- `verify_lemma1` samples the interpolation inequality on a log-spaced grid.
- `verify_lemma2` integrates the scalar comparison ODE with RK4 and compares its
  maximum with κ.
- `ode_blowup_time` is the exact blow-up time of ``u' = u^p``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gm3cert.certificate import ExponentTriple, Lemma1Constants, kappa_bound
from gm3cert.errors import PreconditionViolated
from gm3cert.model import ratio
from gm3cert.schemas import ViolationTable

logger = logging.getLogger(__name__)

LEMMA1_RTOL = 1e-9
LEMMA2_RTOL = 1e-8
LEMMA2_STEPS = 10_000


@dataclass(frozen=True)
class SampleSpec:
    """Log-spaced sampling box for the interpolation inequality.

    x runs over (0, x_max] via ``[x_min, x_max]``, y over ``[y_min, y_max]`` with
    ``y_min = h`` and z over ``[z_min, z_max]`` with ``z_min = l``.
    """

    x_max: float
    y_min: float
    y_max: float
    z_min: float
    z_max: float
    counts: Tuple[int, int, int] = (20, 20, 20)
    x_min: Optional[float] = None

    def __post_init__(self) -> None:
        if not (self.y_min > 0 and self.z_min > 0):
            raise ValueError(
                f"y_min and z_min must be positive, got {self.y_min!r}, {self.z_min!r}."
            )
        if self.y_max < self.y_min or self.z_max < self.z_min:
            raise ValueError("Each sampling range needs max >= min.")
        if not self.x_max > 0:
            raise ValueError(f"x_max must be positive, got {self.x_max!r}.")
        if len(self.counts) != 3 or any(k < 2 for k in self.counts):
            raise ValueError(f"Need at least 2 samples per axis, got {self.counts}.")

    def axes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x_min = self.x_min if self.x_min is not None else self.x_max * 1e-8
        nx, ny, nz = self.counts
        return (
            np.geomspace(x_min, self.x_max, nx),
            np.geomspace(self.y_min, self.y_max, ny),
            np.geomspace(self.z_min, self.z_max, nz),
        )


def check_lemma1_exponents(
    exponents: Sequence[float],
) -> Tuple[float, float, float, float, float, float]:
    """Checks ``0 < (p-1)/r < min(q/(s+1), m/n, 1)``.

    Raises:
        PreconditionViolated: If the condition fails or r is not positive.
    """
    p, q, r, s, m, n = (float(e) for e in exponents)
    if not (r > 0 and p > 1):
        raise PreconditionViolated(f"Need r > 0 and p > 1, got r = {r!r}, p = {p!r}.")
    lead = (p - 1.0) / r
    limit = min(q / (s + 1.0), ratio(m, n), 1.0)
    if not lead < limit:
        raise PreconditionViolated(
            f"(p-1)/r = {lead!r} is not below min(q/(s+1), m/n, 1) = {limit!r}."
        )
    return p, q, r, s, m, n


def verify_lemma1(
    exponents: Sequence[float],
    triple: ExponentTriple,
    constants: Lemma1Constants,
    spec: SampleSpec,
) -> pd.DataFrame:
    """Evaluates the interpolation inequality at every sample point.

        α x^(p-1+α) / (y^(q+β') z^(m+γ'))
            <= β' x^(r+α) / (y^(s+1+β') z^(n+γ')) + C (x^α / (y^β' z^γ'))^θ

    β' and γ' are the weights of `constants`, so the w-branch's swapped roles are
    respected. Both sides are compared in log space; a point violates when the left
    side exceeds the right side by more than a relative 1e-9.

    Args:
        exponents (Sequence[float]): (p, q, r, s, m, n) of the selected branch.
        triple (ExponentTriple): Lyapunov exponents, α is taken from here.
        constants (Lemma1Constants): C and θ under test.
        spec (SampleSpec): Sampling box.

    Raises:
        PreconditionViolated: If the exponents break the inequality's precondition.

    Returns:
        pd.DataFrame: A `ViolationTable` with columns x, y, z, lhs, rhs. Empty when
            the inequality holds everywhere.
    """
    p, q, r, s, m, n = check_lemma1_exponents(exponents)
    alpha = triple.alpha
    by, gz = constants.weight_y, constants.weight_z

    xs, ys, zs = spec.axes()
    x, y, z = np.meshgrid(xs, ys, zs, indexing="ij")
    lx, ly, lz = np.log(x), np.log(y), np.log(z)

    log_lhs = math.log(alpha) + (p - 1.0 + alpha) * lx - (q + by) * ly - (m + gz) * lz
    log_dissipation = (
        math.log(by) + (r + alpha) * lx - (s + 1.0 + by) * ly - (n + gz) * lz
    )
    log_growth = math.log(constants.bigC) + constants.theta * (
        alpha * lx - by * ly - gz * lz
    )
    log_rhs = np.logaddexp(log_dissipation, log_growth)
    bad = log_lhs > log_rhs + math.log1p(LEMMA1_RTOL)

    with np.errstate(over="ignore"):
        violations = pd.DataFrame(
            {
                "x": x[bad],
                "y": y[bad],
                "z": z[bad],
                "lhs": np.exp(log_lhs[bad]),
                "rhs": np.exp(log_rhs[bad]),
            }
        )
    logger.info(
        "Interpolation inequality: %d violations in %d samples",
        len(violations), bad.size,
    )
    return ViolationTable.validate(violations)


def rk4_trajectory(
    rhs: Callable[[float], float], y0: float, T: float, n_steps: int
) -> np.ndarray:
    """Classical fourth-order Runge-Kutta for an autonomous scalar ODE.

    Returns:
        np.ndarray: The n_steps + 1 values at ``t_k = k T / n_steps``.
    """
    dt = T / n_steps
    values = np.empty(n_steps + 1)
    y = float(y0)
    values[0] = y
    for k in range(1, n_steps + 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        values[k] = y
    return values


@dataclass(frozen=True)
class Lemma2Check:
    max_W: float
    kappa: float
    holds: bool


def verify_lemma2(
    mu: float,
    terms: Sequence[Tuple[float, float]],
    W0: float,
    T: float,
    n_steps: int = LEMMA2_STEPS,
) -> Lemma2Check:
    """Integrates ``W' = -μ W + Σ f_j W^θ_j`` from W0 and compares max W with κ.

    Args:
        mu (float): Decay rate, positive.
        terms (Sequence[Tuple[float, float]]): Constant forcings f_j >= 0 with
            exponents θ_j in (0, 1).
        W0 (float): Initial value, non-negative.
        T (float): Horizon.
        n_steps (int, optional): RK4 steps. Defaults to 10^4, i.e. dt = T / 10^4.

    Returns:
        Lemma2Check: max W over the RK4 trajectory, κ from `kappa_bound` with
            ``c_j = f_j / μ``, and whether ``max W <= κ (1 + 1e-8)``.
    """
    terms = [(float(f), float(theta)) for f, theta in terms]
    kappa = kappa_bound(W0, mu, [(f / mu, theta) for f, theta in terms])

    def rhs(W: float) -> float:
        W_pos = max(W, 0.0)
        return -mu * W + sum(f * W_pos**theta for f, theta in terms)

    trajectory = rk4_trajectory(rhs, W0, T, n_steps)
    max_W = float(np.max(trajectory))
    holds = max_W <= kappa * (1.0 + LEMMA2_RTOL)
    logger.info(
        "Comparison ODE: max W = %r, kappa = %r, holds = %s", max_W, kappa, holds
    )
    return Lemma2Check(max_W=max_W, kappa=kappa, holds=holds)


def ode_blowup_time(p: float, u0: float) -> float:
    """Exact blow-up time ``1 / ((p-1) u0^(p-1))`` of ``u' = u^p``.

    Raises:
        PreconditionViolated: If p <= 1 (no blow-up) or u0 <= 0.
    """
    if not p > 1:
        raise PreconditionViolated(f"u' = u^p only blows up for p > 1, got p = {p!r}.")
    if not u0 > 0:
        raise PreconditionViolated(f"u0 must be positive, got {u0!r}.")
    return 1.0 / ((p - 1.0) * u0 ** (p - 1.0))
