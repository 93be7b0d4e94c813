"""Run configuration: typed sections, flat INI text and ``--set`` overrides.

A configuration file looks like::

    [params]
    a1 = 1.0
    ...
    [grid]
    dim = 1
    n = 64
    length = 1.0
    [scheme]
    scheme = ExplicitEuler
    dt_factor = 0.5
    t_end = 1.0
    [initial]
    u0 = 1.0
    amplitude = 0.05
    [certificate]
    enabled = true
    [run]
    seed = 0

Every section and key is optional in a file: values are layered on top of a
preset. Unknown sections or keys are an error.
"""

import configparser
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from gm3cert.errors import ConfigError
from gm3cert.grid import Grid
from gm3cert.integrator import (
    Scheme,
    SchemeConfig,
    State,
    explicit_stability_bound,
    perturbed_state,
    uniform_state,
)
from gm3cert.model import GMParams, ReactionTerms, validate_params
from gm3cert.write import read_snapshot

logger = logging.getLogger(__name__)

Sections = Dict[str, Dict[str, str]]

SECTION_ORDER = ("params", "grid", "scheme", "initial", "certificate", "run")


def format_number(value: float) -> str:
    """Shortest decimal that parses back to the same double."""
    return repr(float(value))


def format_bool(value: bool) -> str:
    return "true" if value else "false"


def parse_float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as err:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number.") from err


def parse_int(section: str, key: str, raw: str) -> int:
    value = parse_float(section, key, raw)
    if not value.is_integer():
        raise ConfigError(f"[{section}] {key} = {raw!r} must be an integer.")
    return int(value)


def parse_bool(section: str, key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"[{section}] {key} = {raw!r} must be true or false.")


@dataclass(frozen=True)
class GridSpec:
    dim: int = 1
    n: int = 64
    length: float = 1.0

    def build(self) -> Grid:
        return Grid.uniform(self.dim, self.n, self.length)


@dataclass(frozen=True)
class SchemeSpec:
    """Time stepping settings as written in a config.

    Exactly one of `dt` and `dt_factor` is set. `dt_factor` scales the explicit
    stability bound of the grid and diffusion coefficients.
    """

    scheme: Scheme = Scheme.EXPLICIT_EULER
    dt: Optional[float] = None
    dt_factor: Optional[float] = 0.5
    t_end: float = 1.0
    blowup_threshold: float = 1e8
    output_every: int = 100
    terms: ReactionTerms = field(default_factory=ReactionTerms)

    def __post_init__(self) -> None:
        if (self.dt is None) == (self.dt_factor is None):
            raise ConfigError("[scheme] needs exactly one of 'dt' and 'dt_factor'.")

    def build(self, grid: Grid, params: GMParams) -> SchemeConfig:
        if self.dt is not None:
            dt = self.dt
        else:
            bound = explicit_stability_bound(grid, params)
            dt = self.dt_factor * bound  # type: ignore[operator]
        return SchemeConfig(
            scheme=self.scheme,
            dt=dt,
            t_end=self.t_end,
            blowup_threshold=self.blowup_threshold,
            output_every=self.output_every,
            terms=self.terms,
        )


@dataclass(frozen=True)
class InitialSpec:
    """Uniform values with an optional seeded cosine perturbation, or a snapshot."""

    u0: float = 1.0
    v0: float = 1.0
    w0: float = 1.0
    amplitude: float = 0.0
    max_mode: int = 4
    snapshot: Optional[str] = None

    @property
    def values(self) -> Tuple[float, float, float]:
        return (self.u0, self.v0, self.w0)


@dataclass(frozen=True)
class CertificateSpec:
    """Whether to certify, and the horizon T* (defaults to the run's t_end)."""

    enabled: bool = True
    horizon: Optional[float] = None


@dataclass(frozen=True)
class RunConfig:
    params: GMParams
    grid: GridSpec = field(default_factory=GridSpec)
    scheme: SchemeSpec = field(default_factory=SchemeSpec)
    initial: InitialSpec = field(default_factory=InitialSpec)
    certificate: CertificateSpec = field(default_factory=CertificateSpec)
    out: str = "out"
    seed: int = 0

    def build_grid(self) -> Grid:
        return self.grid.build()

    def build_scheme(self) -> SchemeConfig:
        return self.scheme.build(self.build_grid(), self.params)

    @property
    def horizon(self) -> float:
        if self.certificate.horizon is not None:
            return self.certificate.horizon
        return self.scheme.t_end

    def initial_state(self) -> State:
        """The t = 0 state: uniform plus the seeded perturbation.

        A configured snapshot is returned instead when one is set.
        """
        if self.initial.snapshot is not None:
            return read_snapshot(self.initial.snapshot)
        grid = self.build_grid()
        if self.initial.amplitude == 0:
            return uniform_state(grid, self.initial.values)
        return perturbed_state(
            grid,
            self.initial.values,
            self.initial.amplitude,
            self.seed,
            self.initial.max_mode,
        )

    def to_sections(self) -> Sections:
        sections: Sections = {
            "params": {k: format_number(v) for k, v in self.params.to_dict().items()},
            "grid": {
                "dim": str(self.grid.dim),
                "n": str(self.grid.n),
                "length": format_number(self.grid.length),
            },
            "scheme": {"scheme": self.scheme.scheme.value},
            "initial": {
                "u0": format_number(self.initial.u0),
                "v0": format_number(self.initial.v0),
                "w0": format_number(self.initial.w0),
                "amplitude": format_number(self.initial.amplitude),
                "max_mode": str(self.initial.max_mode),
            },
            "certificate": {"enabled": format_bool(self.certificate.enabled)},
            "run": {"out": self.out, "seed": str(self.seed)},
        }
        scheme = sections["scheme"]
        if self.scheme.dt is not None:
            scheme["dt"] = format_number(self.scheme.dt)
        if self.scheme.dt_factor is not None:
            scheme["dt_factor"] = format_number(self.scheme.dt_factor)
        scheme["t_end"] = format_number(self.scheme.t_end)
        scheme["blowup_threshold"] = format_number(self.scheme.blowup_threshold)
        scheme["output_every"] = str(self.scheme.output_every)
        for f in fields(ReactionTerms):
            scheme[f.name] = format_bool(getattr(self.scheme.terms, f.name))
        if self.initial.snapshot is not None:
            sections["initial"]["snapshot"] = self.initial.snapshot
        if self.certificate.horizon is not None:
            sections["certificate"]["horizon"] = format_number(self.certificate.horizon)
        return sections

    def to_ini(self) -> str:
        return sections_to_ini(self.to_sections())

    @classmethod
    def from_sections(cls, sections: Sections) -> "RunConfig":
        """Builds a validated config from complete string sections.

        Raises:
            ConfigError: On unknown sections or keys, missing keys, or bad values.
        """
        unknown = [name for name in sections if name not in SECTION_ORDER]
        if unknown:
            raise ConfigError(f"Unknown config sections: {unknown}")
        return cls(
            params=validate_params(sections.get("params", {})),
            grid=_grid_spec(sections.get("grid", {})),
            scheme=_scheme_spec(sections.get("scheme", {})),
            initial=_initial_spec(sections.get("initial", {})),
            certificate=_certificate_spec(sections.get("certificate", {})),
            **_run_section(sections.get("run", {})),
        )

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        return cls.from_sections(ini_to_sections(text))

    def with_overrides(self, overrides: Iterable[str]) -> "RunConfig":
        """Applies ``section.key=value`` overrides.

        Bare model parameter names map to [params].
        """
        overrides = list(overrides)
        sections = self.to_sections()
        for item in overrides:
            section, key, value = parse_override(item, sections)
            sections[section][key] = value
        return RunConfig.from_sections(_drop_conflicting_dt(sections, overrides))

    def with_sections(self, extra: Sections) -> "RunConfig":
        """Layers partial sections, e.g. from a config file, on top of this config."""
        sections = self.to_sections()
        for name, values in extra.items():
            if name not in SECTION_ORDER:
                raise ConfigError(f"Unknown config section [{name}].")
            sections[name].update(values)
        if "scheme" in extra:
            keys = extra["scheme"].keys()
            if "dt" in keys and "dt_factor" not in keys:
                sections["scheme"].pop("dt_factor", None)
            if "dt_factor" in keys and "dt" not in keys:
                sections["scheme"].pop("dt", None)
        return RunConfig.from_sections(sections)


def _drop_conflicting_dt(sections: Sections, overrides: Iterable[str]) -> Sections:
    keys = {item.split("=", 1)[0].strip().split(".")[-1] for item in overrides}
    if "dt" in keys and "dt_factor" not in keys:
        sections["scheme"].pop("dt_factor", None)
    if "dt_factor" in keys and "dt" not in keys:
        sections["scheme"].pop("dt", None)
    return sections


def _check_keys(section: str, raw: Dict[str, str], allowed: Iterable[str]) -> None:
    unknown = [key for key in raw if key not in allowed]
    if unknown:
        raise ConfigError(f"Unknown keys in [{section}]: {unknown}")


def _grid_spec(raw: Dict[str, str]) -> GridSpec:
    _check_keys("grid", raw, ("dim", "n", "length"))
    spec = GridSpec(
        dim=parse_int("grid", "dim", raw.get("dim", "1")),
        n=parse_int("grid", "n", raw.get("n", "64")),
        length=parse_float("grid", "length", raw.get("length", "1.0")),
    )
    spec.build()
    return spec


def _scheme_spec(raw: Dict[str, str]) -> SchemeSpec:
    term_names = [f.name for f in fields(ReactionTerms)]
    allowed = ["scheme", "dt", "dt_factor", "t_end", "blowup_threshold", "output_every"]
    _check_keys("scheme", raw, allowed + term_names)
    try:
        scheme = Scheme(raw.get("scheme", Scheme.EXPLICIT_EULER.value).strip())
    except ValueError as err:
        raise ConfigError(
            f"[scheme] scheme must be one of {[s.value for s in Scheme]}, "
            f"got {raw.get('scheme')!r}."
        ) from err
    dt = parse_float("scheme", "dt", raw["dt"]) if "dt" in raw else None
    if "dt_factor" in raw:
        dt_factor: Optional[float] = parse_float(
            "scheme", "dt_factor", raw["dt_factor"]
        )
    else:
        dt_factor = None if dt is not None else 0.5
    for name, value in (("dt", dt), ("dt_factor", dt_factor)):
        if value is not None and not (math.isfinite(value) and value > 0):
            raise ConfigError(f"[scheme] {name} must be positive, got {value!r}.")
    terms = ReactionTerms(
        **{
            name: parse_bool("scheme", name, raw.get(name, "true"))
            for name in term_names
        }
    )
    spec = SchemeSpec(
        scheme=scheme,
        dt=dt,
        dt_factor=dt_factor,
        t_end=parse_float("scheme", "t_end", raw.get("t_end", "1.0")),
        blowup_threshold=parse_float(
            "scheme", "blowup_threshold", raw.get("blowup_threshold", "1e8")
        ),
        output_every=parse_int(
            "scheme", "output_every", raw.get("output_every", "100")
        ),
        terms=terms,
    )
    if not (math.isfinite(spec.t_end) and spec.t_end > 0):
        raise ConfigError(f"[scheme] t_end must be positive, got {spec.t_end!r}.")
    if not spec.blowup_threshold > 0:
        raise ConfigError("[scheme] blowup_threshold must be positive.")
    if spec.output_every < 1:
        raise ConfigError("[scheme] output_every must be at least 1.")
    return spec


def _initial_spec(raw: Dict[str, str]) -> InitialSpec:
    _check_keys("initial", raw, ("u0", "v0", "w0", "amplitude", "max_mode", "snapshot"))
    spec = InitialSpec(
        u0=parse_float("initial", "u0", raw.get("u0", "1.0")),
        v0=parse_float("initial", "v0", raw.get("v0", "1.0")),
        w0=parse_float("initial", "w0", raw.get("w0", "1.0")),
        amplitude=parse_float("initial", "amplitude", raw.get("amplitude", "0.0")),
        max_mode=parse_int("initial", "max_mode", raw.get("max_mode", "4")),
        snapshot=raw.get("snapshot") or None,
    )
    if not all(math.isfinite(x) and x > 0 for x in spec.values):
        raise ConfigError(f"Initial values must be positive, got {spec.values}.")
    if not 0.0 <= spec.amplitude <= 0.1:
        raise ConfigError(
            f"[initial] amplitude must be between 0 and 0.1, got {spec.amplitude!r}."
        )
    if spec.max_mode < 1:
        raise ConfigError(f"[initial] max_mode must be >= 1, got {spec.max_mode}.")
    return spec


def _certificate_spec(raw: Dict[str, str]) -> CertificateSpec:
    _check_keys("certificate", raw, ("enabled", "horizon"))
    horizon = None
    if "horizon" in raw:
        horizon = parse_float("certificate", "horizon", raw["horizon"])
    if horizon is not None and not horizon > 0:
        raise ConfigError(f"[certificate] horizon must be positive, got {horizon!r}.")
    return CertificateSpec(
        enabled=parse_bool("certificate", "enabled", raw.get("enabled", "true")),
        horizon=horizon,
    )


def _run_section(raw: Dict[str, str]) -> dict:
    _check_keys("run", raw, ("out", "seed"))
    return {
        "out": raw.get("out", "out"),
        "seed": parse_int("run", "seed", raw.get("seed", "0")),
    }


def sections_to_ini(sections: Sections) -> str:
    lines: List[str] = []
    for name in SECTION_ORDER:
        if name not in sections:
            continue
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {value}" for key, value in sections[name].items())
        lines.append("")
    return "\n".join(lines)


def ini_to_sections(text: str) -> Sections:
    """Parses INI text into string sections, keeping keys case-sensitive.

    Raises:
        ConfigError: If the text is not valid INI.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"The configuration is not valid INI: {err}") from err
    return {name: dict(parser[name]) for name in parser.sections()}


def read_config_file(path: str) -> Sections:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"Can't read the config file '{path}': {err}") from err
    return ini_to_sections(text)


def resolve_key(key: str, sections: Sections) -> Tuple[str, str]:
    """Maps ``section.key`` or a bare key to (section, key).

    A bare key must occur in exactly one section; model parameters always resolve
    to [params].

    Raises:
        ConfigError: If the key is unknown or ambiguous.
    """
    if "." in key:
        section, name = key.split(".", 1)
        if section not in SECTION_ORDER:
            raise ConfigError(f"Unknown config section in '{key}'.")
        return section, name
    if key in sections.get("params", {}):
        return "params", key
    if key in ("dt", "dt_factor"):
        return "scheme", key
    if key == "snapshot":
        return "initial", key
    if key == "horizon":
        return "certificate", key
    owners = [name for name in SECTION_ORDER if key in sections.get(name, {})]
    if len(owners) != 1:
        raise ConfigError(f"Unknown or ambiguous config key '{key}'.")
    return owners[0], key


def parse_override(item: str, sections: Sections) -> Tuple[str, str, str]:
    """Splits one ``--set key=value`` override.

    Raises:
        ConfigError: If the override has no ``=`` or names an unknown key.
    """
    if "=" not in item:
        raise ConfigError(f"Overrides look like section.key=value, got {item!r}.")
    key, value = item.split("=", 1)
    section, name = resolve_key(key.strip(), sections)
    return section, name, value.strip()


@dataclass(frozen=True)
class SweepAxis:
    key: str
    lo: float
    hi: float
    count: int

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """Parses ``name:lo:hi:count``, e.g. ``p1:1.2:3.0:5``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(
                f"A sweep axis looks like name:lo:hi:count, got {text!r}."
            )
        key, lo, hi, count = parts
        return cls(
            key=key.strip(),
            lo=parse_float("sweep", key, lo),
            hi=parse_float("sweep", key, hi),
            count=parse_int("sweep", key, count),
        )

    def values(self) -> List[float]:
        step = (self.hi - self.lo) / (self.count - 1)
        last = self.count - 1
        return [self.hi if k == last else self.lo + k * step for k in range(self.count)]


@dataclass(frozen=True)
class SweepSpec:
    """Two swept config keys over a base config, visited in row-major grid order."""

    x: SweepAxis
    y: SweepAxis
    base: RunConfig

    def __post_init__(self) -> None:
        for axis in (self.x, self.y):
            if axis.count < 2:
                raise ConfigError(
                    f"Sweep axis '{axis.key}' needs at least 2 points, "
                    f"got {axis.count}."
                )
            self.base.with_overrides([f"{axis.key}={format_number(axis.lo)}"])

    def points(self) -> List[Tuple[int, float, float]]:
        ys = self.y.values()
        return [
            (i * len(ys) + j, x, y)
            for i, x in enumerate(self.x.values())
            for j, y in enumerate(ys)
        ]

    def config_at(self, x: float, y: float) -> RunConfig:
        return self.base.with_overrides(
            [f"{self.x.key}={format_number(x)}", f"{self.y.key}={format_number(y)}"]
        )
