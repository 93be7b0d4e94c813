"""Time stepping for the three-component system on a grid.

Two first-order schemes are available:

- `step_explicit`: forward Euler on the method-of-lines system. Needs
  ``dt <= h^2 / (2 dim max(a_i))``.
- `step_imex`: diffusion and linear decay implicit, fractional production and the
  source explicit. 1D uses a tridiagonal solve, 2D one tridiagonal sweep per axis.

No value is ever clipped. A non-positive cell raises `PositivityLoss` and an
overflowing rate raises `NonFiniteRate`; `run` turns both into outcomes.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded

from gm3cert.errors import (
    ConfigError,
    NonFiniteRate,
    PositivityLoss,
    SolverFailure,
    StabilityViolation,
)
from gm3cert.grid import (
    Field,
    Grid,
    decode_snapshot,
    encode_snapshot,
    laplacian_values,
)
from gm3cert.model import (
    ALL_TERMS,
    GMParams,
    ReactionTerms,
    production_terms,
    reaction_rates,
)

logger = logging.getLogger(__name__)

COMPONENTS = ("u", "v", "w")


@dataclass(frozen=True, eq=False)
class State:
    """Fields (u, v, w) on a shared grid at time t."""

    grid: Grid
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in COMPONENTS:
            if getattr(self, name).shape != self.grid.shape:
                raise ConfigError(
                    f"Component '{name}' has shape {getattr(self, name).shape}, "
                    f"the grid has shape {self.grid.shape}."
                )

    @property
    def components(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.u, self.v, self.w)

    def field(self, name: str) -> Field:
        return Field(getattr(self, name), self.grid)

    @property
    def minima(self) -> Tuple[float, float, float]:
        u, v, w = (float(np.min(x)) for x in self.components)
        return u, v, w

    @property
    def maxima(self) -> Tuple[float, float, float]:
        u, v, w = (float(np.max(x)) for x in self.components)
        return u, v, w

    def check_positive(self) -> None:
        """Raises `PositivityLoss` for the first non-positive or non-finite cell."""
        check_components(self.components, self.t)


def check_components(
    components: Tuple[np.ndarray, ...], t: Optional[float] = None
) -> None:
    for name, values in zip(COMPONENTS, components):
        bad = ~(np.isfinite(values) & (values > 0))
        if np.any(bad):
            cell = tuple(int(i) for i in np.argwhere(bad)[0])
            raise PositivityLoss(name, cell, float(values[cell]), t)


def uniform_state(
    grid: Grid, values: Tuple[float, float, float], t: float = 0.0
) -> State:
    u, v, w = (np.full(grid.shape, float(x)) for x in values)
    return State(grid, u, v, w, t)


def perturbed_state(
    grid: Grid,
    values: Tuple[float, float, float],
    amplitude: float,
    seed: int,
    max_mode: int = 4,
) -> State:
    """Uniform state times ``1 + amplitude * prod_k cos(m_k π x_k / L_k)``.

    The modes m_k are drawn per component and axis from a generator seeded with
    `seed`. Cosine modes have zero normal derivative at the boundary.

    Raises:
        ConfigError: If the amplitude is not in [0, 0.1].
    """
    if not 0.0 <= amplitude <= 0.1:
        raise ConfigError(
            f"The perturbation amplitude must be between 0 and 0.1, got {amplitude!r}."
        )
    rng = np.random.default_rng(seed)
    mesh = grid.mesh()
    components = []
    for base in values:
        shape = np.ones(grid.shape)
        for axis, x in enumerate(mesh):
            mode = int(rng.integers(1, max_mode + 1))
            shape = shape * np.cos(mode * math.pi * x / grid.length[axis])
        components.append(float(base) * (1.0 + amplitude * shape))
    return State(grid, components[0], components[1], components[2], 0.0)


class Scheme(str, Enum):
    EXPLICIT_EULER = "ExplicitEuler"
    IMEX_EULER = "ImexEuler"


@dataclass(frozen=True)
class SchemeConfig:
    """Time stepping settings.

    Attributes:
        scheme (Scheme): Explicit Euler or IMEX Euler.
        dt (float): Nominal time step.
        t_end (float): Horizon T*. The final step is shortened to hit it exactly.
        blowup_threshold (float): Max-norm above which blow-up is suspected.
        output_every (int): Monitor hook cadence in steps.
        terms (ReactionTerms): Which term groups are switched on.
    """

    scheme: Scheme = Scheme.EXPLICIT_EULER
    dt: float = 1e-4
    t_end: float = 1.0
    blowup_threshold: float = 1e8
    output_every: int = 100
    terms: ReactionTerms = field(default_factory=ReactionTerms)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt!r}.")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ConfigError(f"t_end must be positive, got {self.t_end!r}.")
        if not self.blowup_threshold > 0:
            raise ConfigError(
                f"blowup_threshold must be positive, got {self.blowup_threshold!r}."
            )
        if self.output_every < 1:
            raise ConfigError(f"output_every must be >= 1, got {self.output_every!r}.")

    @property
    def n_steps(self) -> int:
        """Steps to reach t_end, counting the shortened last one."""
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))


def explicit_stability_bound(grid: Grid, params: GMParams) -> float:
    """Largest stable forward-Euler step ``h^2 / (2 dim max(a_i))``."""
    return grid.spacing**2 / (2.0 * grid.dim * max(params.a))


def check_stability(cfg: SchemeConfig, grid: Grid, params: GMParams) -> None:
    """Refuses an explicit step above the diffusive stability bound.

    Raises:
        StabilityViolation: If the explicit scheme with diffusion on has dt above
            the bound.
    """
    if cfg.scheme is not Scheme.EXPLICIT_EULER or not cfg.terms.diffusion:
        return
    bound = explicit_stability_bound(grid, params)
    if cfg.dt > bound:
        raise StabilityViolation(
            f"dt = {cfg.dt!r} exceeds the explicit stability bound {bound!r} "
            f"(h = {grid.spacing!r}, max a = {max(params.a)!r}). "
            "Reduce dt or use the ImexEuler scheme."
        )


def _check_new_components(components: Tuple[np.ndarray, ...], t: float) -> None:
    for name, values in zip(COMPONENTS, components):
        if not np.all(np.isfinite(values)):
            raise NonFiniteRate(
                f"Component '{name}' overflowed at t = {t!r}.", component=name
            )
    check_components(components, t)


def step_explicit(
    state: State, params: GMParams, dt: float, terms: ReactionTerms = ALL_TERMS
) -> State:
    """One forward-Euler step ``x + dt (a Δ_h x + rate)`` per component.

    Raises:
        PositivityLoss: If a cell becomes non-positive.
        NonFiniteRate: If a rate or a new value overflows.
    """
    rates = reaction_rates(state.u, state.v, state.w, params, terms)
    new = []
    with np.errstate(over="ignore", invalid="ignore"):
        for values, a, rate in zip(state.components, params.a, rates):
            update = rate
            if terms.diffusion:
                update = update + a * laplacian_values(values, state.grid)
            new.append(values + dt * update)
    t_new = state.t + dt
    _check_new_components(tuple(new), t_new)
    return State(state.grid, new[0], new[1], new[2], t_new)


def _neumann_band(n: int, r: float, shift: float) -> np.ndarray:
    """Banded form of ``shift I - r D2`` with mirror-ghost Neumann rows."""
    band = np.zeros((3, n))
    band[0, 1:] = -r
    band[1, :] = shift + 2.0 * r
    band[1, 0] -= r
    band[1, -1] -= r
    band[2, :-1] = -r
    return band


def _solve_along_axis(band: np.ndarray, rhs: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(rhs, axis, 0)
    try:
        solution = solve_banded((1, 1), band, moved)
    except (ValueError, np.linalg.LinAlgError) as err:
        raise SolverFailure(
            f"The tridiagonal solve along axis {axis} failed: {err}"
        ) from err
    return np.moveaxis(solution, 0, axis)


def implicit_solve(
    rhs: np.ndarray, grid: Grid, a: float, b: float, dt: float, diffusion: bool = True
) -> np.ndarray:
    """Solves ``((1 + dt b) I - dt a Δ_h) x = rhs``.

    In 2D the operator is factored into one tridiagonal solve per axis,
    ``(s - dt a D_xx) s^-1 (s - dt a D_yy)`` with ``s = 1 + dt b``, which is
    first-order consistent with the unfactored operator.

    Raises:
        SolverFailure: If a solve fails or returns non-finite values.
    """
    shift = 1.0 + dt * b
    if not diffusion:
        return rhs / shift
    x = rhs
    for axis, (n, h) in enumerate(zip(grid.n, grid.spacings)):
        if axis > 0:
            x = shift * x
        x = _solve_along_axis(_neumann_band(n, dt * a / (h * h), shift), x, axis)
    if not np.all(np.isfinite(x)):
        raise SolverFailure("The implicit diffusion solve returned non-finite values.")
    return x


def step_imex(
    state: State, params: GMParams, dt: float, terms: ReactionTerms = ALL_TERMS
) -> State:
    """One IMEX Euler step.

    Solves ``(I + dt (b_i I - a_i Δ_h)) x_new = x_old + dt e_i`` per component, where
    the explicit parts e_i are the source plus the fractional production for u and
    the fractional production for v and w.

    Raises:
        SolverFailure: If the banded solve fails.
        PositivityLoss: If a cell becomes non-positive.
        NonFiniteRate: If a production term overflows.
    """
    for name, values in zip(COMPONENTS, state.components):
        if not np.all(np.isfinite(values)):
            raise NonFiniteRate(f"Component '{name}' is not finite.", component=name)
    zero = np.zeros(state.grid.shape)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if terms.production:
            explicit = list(production_terms(state.u, state.v, state.w, params))
        else:
            explicit = [zero, zero, zero]
        if terms.source:
            explicit[0] = explicit[0] + params.sigma
    for name, component, part in zip("fgh", COMPONENTS, explicit):
        if not np.all(np.isfinite(part)):
            raise NonFiniteRate(
                f"Explicit part of '{name}' is not finite.", component=component
            )

    new = []
    for values, a, b, part in zip(state.components, params.a, params.b, explicit):
        decay = b if terms.decay else 0.0
        rhs = values + dt * part
        new.append(implicit_solve(rhs, state.grid, a, decay, dt, terms.diffusion))
    t_new = state.t + dt
    _check_new_components(tuple(new), t_new)
    return State(state.grid, new[0], new[1], new[2], t_new)


class OutcomeKind(str, Enum):
    COMPLETED_BOUNDED = "CompletedBounded"
    BLOWUP_SUSPECTED = "BlowUpSuspected"
    POSITIVITY_LOSS = "PositivityLoss"


@dataclass(frozen=True, eq=False)
class RunOutcome:
    """How a run ended.

    Attributes:
        kind (OutcomeKind): The outcome type.
        t (float): Time of the last state reached, or of the failure.
        component (Optional[str]): Offending component for blow-up or positivity loss.
        steps (int): Index of the last completed step.
        state (State): Last valid state.
        message (str): Human readable detail.
    """

    kind: OutcomeKind
    t: float
    component: Optional[str]
    steps: int
    state: State
    message: str = ""


MonitorHook = Callable[[State, int], None]


def _largest_component(state: State) -> Tuple[str, float]:
    maxima = state.maxima
    k = int(np.argmax(maxima))
    return COMPONENTS[k], maxima[k]


def run(
    initial: State,
    params: GMParams,
    cfg: SchemeConfig,
    hook: Optional[MonitorHook] = None,
) -> RunOutcome:
    """Steps from `initial` to ``cfg.t_end``.

    Step k ends at ``t = min(k dt, t_end)``, so a run resumed from a state saved at
    step k0 repeats the uninterrupted trajectory bitwise. The hook receives the
    state and its step index at step 0, every `output_every` steps and at the last
    step. On resume the starting state is not passed to the hook again.

    Args:
        initial (State): Positive starting state. Its time selects the first step.
        params (GMParams): Model parameters.
        cfg (SchemeConfig): Time stepping settings.
        hook (MonitorHook, optional): Called with (state, step).

    Raises:
        StabilityViolation: If the explicit scheme's dt is above the bound.
        PositivityLoss: If the initial state is not positive.
        SolverFailure: If an implicit solve fails.

    Returns:
        RunOutcome: CompletedBounded, BlowUpSuspected or PositivityLoss.
    """
    check_stability(cfg, initial.grid, params)
    initial.check_positive()

    step = step_explicit if cfg.scheme is Scheme.EXPLICIT_EULER else step_imex
    n_steps = cfg.n_steps
    k0 = int(round(initial.t / cfg.dt))
    logger.info(
        "Running %s on a %s grid: dt=%r, t_end=%r, steps %d..%d",
        cfg.scheme.value, "x".join(map(str, initial.grid.n)), cfg.dt, cfg.t_end,
        k0, n_steps,
    )

    state = initial
    if hook is not None and k0 == 0:
        hook(state, 0)

    for k in range(k0 + 1, n_steps + 1):
        t_next = min(k * cfg.dt, cfg.t_end)
        try:
            advanced = step(state, params, t_next - state.t, cfg.terms)
        except PositivityLoss as err:
            logger.warning("Positivity lost: %s", err)
            return RunOutcome(
                OutcomeKind.POSITIVITY_LOSS,
                t_next,
                err.component,
                k - 1,
                state,
                str(err),
            )
        except NonFiniteRate as err:
            name = err.component or _largest_component(state)[0]
            if err.overflow:
                kind = OutcomeKind.BLOWUP_SUSPECTED
            else:
                kind = OutcomeKind.POSITIVITY_LOSS
            logger.warning("Run stopped at t=%r: %s", t_next, err)
            return RunOutcome(kind, t_next, name, k - 1, state, str(err))
        state = State(state.grid, advanced.u, advanced.v, advanced.w, t_next)

        name, largest = _largest_component(state)
        if largest > cfg.blowup_threshold:
            message = (
                f"max {name} = {largest!r} exceeds the blow-up threshold "
                f"{cfg.blowup_threshold!r} at t = {t_next!r}."
            )
            logger.warning("Blow-up suspected: %s", message)
            return RunOutcome(
                OutcomeKind.BLOWUP_SUSPECTED, t_next, name, k, state, message
            )

        if hook is not None and (k % cfg.output_every == 0 or k == n_steps):
            hook(state, k)

    logger.info("Run completed at t=%r after %d steps", state.t, n_steps)
    return RunOutcome(OutcomeKind.COMPLETED_BOUNDED, state.t, None, n_steps, state)


def state_to_bytes(state: State) -> bytes:
    return encode_snapshot(state.grid, state.t, state.components)


def state_from_bytes(data: bytes) -> State:
    """Decodes a binary snapshot into a `State`.

    Raises:
        ValueError: If the snapshot does not hold exactly three components.
    """
    grid, t, components = decode_snapshot(data)
    if len(components) != 3:
        raise ValueError(
            f"A state snapshot holds 3 components, this one {len(components)}."
        )
    return State(grid, components[0], components[1], components[2], t)
