"""The three-component Gierer-Meinhardt reaction system and its exponent condition.

The system reads

    u_t - a1 Δu = σ - b1 u + u^p1 / (v^q1 (w^r1 + c))
    v_t - a2 Δv =   - b2 v + u^p2 / (v^q2 w^r2)
    w_t - a3 Δw =   - b3 w + u^p3 / (v^q3 w^r3)

with homogeneous Neumann boundary conditions and positive initial data.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Any, Mapping, Tuple, Union

import numpy as np

from gm3cert.errors import (
    ConfigError,
    NegativeExponent,
    NonFiniteRate,
    NonPositiveCoefficient,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

POSITIVE_FIELDS = ("a1", "a2", "a3", "b1", "b2", "b3", "sigma")
NON_NEGATIVE_FIELDS = ("c", "p1", "p2", "p3", "q1", "q2", "q3", "r1", "r2", "r3")


@dataclass(frozen=True)
class GMParams:
    """All coefficients and exponents of the three-component system.

    Diffusion coefficients ``a_i``, decay rates ``b_i`` and the source ``sigma`` must
    be strictly positive. The saturation constant ``c`` and the nine reaction exponents
    must be non-negative. Both are enforced at construction.
    """

    a1: float
    a2: float
    a3: float
    b1: float
    b2: float
    b3: float
    sigma: float
    c: float
    p1: float
    p2: float
    p3: float
    q1: float
    q2: float
    q3: float
    r1: float
    r2: float
    r3: float

    def __post_init__(self) -> None:
        for name in POSITIVE_FIELDS + NON_NEGATIVE_FIELDS:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"'{name}' must be a finite number, got {value!r}.")
        for name in POSITIVE_FIELDS:
            if getattr(self, name) <= 0:
                raise NonPositiveCoefficient(name, getattr(self, name))
        for name in NON_NEGATIVE_FIELDS:
            if getattr(self, name) < 0:
                raise NegativeExponent(name, getattr(self, name))

    @property
    def a(self) -> Tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    @property
    def b(self) -> Tuple[float, float, float]:
        return (self.b1, self.b2, self.b3)

    @property
    def exponents(self) -> Tuple[float, ...]:
        return (
            self.p1, self.p2, self.p3,
            self.q1, self.q2, self.q3,
            self.r1, self.r2, self.r3,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes: float) -> "GMParams":
        """Returns a re-validated copy with some fields changed."""
        return validate_params({**self.to_dict(), **changes})


def validate_params(raw: Mapping[str, Any]) -> GMParams:
    """Validates a raw coefficient record and turns it into `GMParams`.

    Values are converted to float, nothing is clamped.

    Args:
        raw (Mapping[str, Any]): Mapping with the keys a1..a3, b1..b3, sigma, c,
            p1..p3, q1..q3 and r1..r3. Values may be numbers or decimal strings.

    Raises:
        ConfigError: If a key is missing, unknown, or a value is not a number.
        NonPositiveCoefficient: If one of a_i, b_i or sigma is not strictly positive.
        NegativeExponent: If c or one of the exponents is negative.

    Returns:
        GMParams: The validated parameters.
    """
    names = [f.name for f in fields(GMParams)]
    missing = [name for name in names if name not in raw]
    unknown = [key for key in raw if key not in names]
    if missing:
        raise ConfigError(f"Missing model parameters: {missing}")
    if unknown:
        raise ConfigError(f"Unknown model parameters: {unknown}")

    values = {}
    for name in names:
        try:
            values[name] = float(raw[name])
        except (TypeError, ValueError) as err:
            raise ConfigError(
                f"Model parameter '{name}' is not a number: {raw[name]!r}"
            ) from err

    return GMParams(**values)


@dataclass(frozen=True)
class ReactionTerms:
    """Switches for the four term groups of the system.

    Everything is on for the actual model. Switching groups off realises the
    calibration cases (diffusion-free ODE, pure decay, pure diffusion) without
    touching the positivity requirements of `GMParams`.
    """

    diffusion: bool = True
    decay: bool = True
    source: bool = True
    production: bool = True


ALL_TERMS = ReactionTerms()


def power(x: ArrayLike, exponent: float) -> ArrayLike:
    """Raises a positive base to a non-negative real exponent.

    Small integer exponents use repeated multiplication, the rest exp/log.
    """
    if exponent == 0:
        return np.ones_like(x, dtype=float) if isinstance(x, np.ndarray) else 1.0
    if float(exponent).is_integer() and exponent <= 4:
        result = x
        for _ in range(int(exponent) - 1):
            result = result * x
        return result
    return np.exp(exponent * np.log(x))


def production_terms(
    u: ArrayLike, v: ArrayLike, w: ArrayLike, params: GMParams
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """The three fractional production terms, without decay or source."""
    f = power(u, params.p1) / (power(v, params.q1) * (power(w, params.r1) + params.c))
    g = power(u, params.p2) / (power(v, params.q2) * power(w, params.r2))
    h = power(u, params.p3) / (power(v, params.q3) * power(w, params.r3))
    return f, g, h


def reaction_rates(
    u: ArrayLike,
    v: ArrayLike,
    w: ArrayLike,
    params: GMParams,
    terms: ReactionTerms = ALL_TERMS,
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Evaluates the reaction right-hand sides f, g and h.

    Works on scalars and on numpy arrays of cell values alike.

    Args:
        u (float | np.ndarray): Activator concentration, strictly positive.
        v (float | np.ndarray): First inhibitor concentration, strictly positive.
        w (float | np.ndarray): Second inhibitor concentration, strictly positive.
        params (GMParams): Model coefficients.
        terms (ReactionTerms, optional): Which term groups to include.
            Defaults to all of them.

    Raises:
        NonFiniteRate: If an input is not strictly positive and finite, or if a
            rate overflows.

    Returns:
        Tuple: The rates (f, g, h), same shape as the inputs.
    """
    for name, x in (("u", u), ("v", v), ("w", w)):
        x_arr = np.asarray(x)
        if not np.all(np.isfinite(x_arr)):
            raise NonFiniteRate(
                f"Input '{name}' is not finite.", overflow=True, component=name
            )
        if not np.all(x_arr > 0):
            raise NonFiniteRate(
                f"Input '{name}' is not strictly positive.",
                overflow=False,
                component=name,
            )

    zero = 0.0 * np.asarray(u, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore", under="ignore"):
        if terms.production:
            f, g, h = production_terms(u, v, w, params)
        else:
            f, g, h = zero, zero, zero
        if terms.decay:
            f = f - params.b1 * u
            g = g - params.b2 * v
            h = h - params.b3 * w
        if terms.source:
            f = f + params.sigma

    rates = []
    for name, component, rate in zip("fgh", "uvw", (f, g, h)):
        rate = np.asarray(rate, dtype=float) + zero
        if not np.all(np.isfinite(rate)):
            raise NonFiniteRate(
                f"Reaction rate '{name}' is not finite.", component=component
            )
        rates.append(float(rate) if rate.ndim == 0 else rate)

    return rates[0], rates[1], rates[2]


class Branch(str, Enum):
    """Which inhibitor carries the exponent condition."""

    VIA_V = "ViaV"
    VIA_W = "ViaW"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class BranchReport:
    condition_value_left: float
    bound_v_branch: float
    bound_w_branch: float
    selected_branch: Branch

    @property
    def feasible(self) -> bool:
        return self.selected_branch is not Branch.INFEASIBLE


def ratio(numerator: float, denominator: float) -> float:
    """Quotient with a zero denominator read as an absent constraint (+inf)."""
    if denominator == 0:
        return math.inf
    return numerator / denominator


def check_exponent_condition(params: GMParams) -> BranchReport:
    """Evaluates the exponent condition on p1 - 1 and selects the inhibitor branch.

    The condition is ``0 < p1 - 1 < max(bound_v, bound_w)`` with

        bound_v = p2 * min(q1 / (q2 + 1), r1 / r2, 1)
        bound_w = p3 * min(r1 / (r3 + 1), q1 / q3, 1)

    When both branches satisfy it, the v-branch is selected.

    Args:
        params (GMParams): Model parameters. Only the exponents matter.

    Returns:
        BranchReport: Both bounds and the selected branch. An infeasible condition
            is reported, not raised.
    """
    left = params.p1 - 1
    p = params
    bound_v = p.p2 * min(p.q1 / (p.q2 + 1), ratio(p.r1, p.r2), 1)
    bound_w = p.p3 * min(p.r1 / (p.r3 + 1), ratio(p.q1, p.q3), 1)

    if left <= 0:
        selected = Branch.INFEASIBLE
    elif left < bound_v:
        selected = Branch.VIA_V
    elif left < bound_w:
        selected = Branch.VIA_W
    else:
        selected = Branch.INFEASIBLE

    logger.debug(
        "Exponent condition: p1 - 1 = %r, bound_v = %r, bound_w = %r -> %s",
        left, bound_v, bound_w, selected.value,
    )
    return BranchReport(left, bound_v, bound_w, selected)


def branch_exponents(
    params: GMParams, branch: Branch
) -> Tuple[float, float, float, float, float, float]:
    """Maps the model exponents onto the (p, q, r, s, m, n) of the interpolation lemma.

    Returns:
        Tuple: (p, q, r, s, m, n). For the v-branch y plays the role of v and z of w,
            for the w-branch the roles are swapped.
    """
    if branch is Branch.VIA_V:
        return (params.p1, params.q1, params.p2, params.q2, params.r1, params.r2)
    if branch is Branch.VIA_W:
        return (params.p1, params.r1, params.p3, params.r3, params.q1, params.q3)
    raise ValueError("An infeasible branch has no lemma exponents.")


def check_classical_condition(p: float, q: float, r: float, s: float) -> bool:
    """Checks the global-existence condition of the two-component system.

    The classical system ``u_t = σ - μu + u^p/v^q``, ``v_t = -νv + u^r/v^s`` has
    bounded solutions when ``(p-1)/r < q/(s+1)`` and ``(p-1)/r < 1``.
    """
    if r <= 0 or p <= 1:
        return False
    left = (p - 1) / r
    return left < q / (s + 1) and left < 1


def embed_two_component(
    a1: float,
    a2: float,
    mu: float,
    nu: float,
    sigma: float,
    p: float,
    q: float,
    r: float,
    s: float,
    a3: float = 1.0,
    b3: float = 1.0,
) -> GMParams:
    """Embeds the classical two-component system into the three-component one.

    The third species w decouples: it solves ``w_t = a3 Δw - b3 w + 1`` and does not
    enter the activator equation because r1 = 0 and c = 0.
    """
    return GMParams(
        a1=a1, a2=a2, a3=a3,
        b1=mu, b2=nu, b3=b3,
        sigma=sigma, c=0.0,
        p1=p, p2=r, p3=0.0,
        q1=q, q2=s, q3=0.0,
        r1=0.0, r2=0.0, r3=0.0,
    )
