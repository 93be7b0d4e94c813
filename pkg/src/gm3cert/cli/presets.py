"""Built-in run configurations.

- ``phyllotaxis``: the three-substance plant pattern model. Its activator
  production is read as ``u^2 / (v (w + c))``, i.e. p1 = 2, and the saturation
  constant is the config key ``c``.
- ``gm2_rothe``: the classical two-component system with p=2, q=1, r=2, s=0,
  embedded with a decoupled third species.
- ``blowup_ode``: diffusion-free ``u' = u^2`` from u0 = 2, which blows up at
  t = 0.5. It has no certificate.
"""

from typing import Callable, Dict

from gm3cert.cli.config import (
    CertificateSpec,
    GridSpec,
    InitialSpec,
    RunConfig,
    SchemeSpec,
)
from gm3cert.errors import ConfigError
from gm3cert.integrator import Scheme
from gm3cert.model import GMParams, ReactionTerms, embed_two_component

DEFAULT_PRESET = "phyllotaxis"


def phyllotaxis() -> RunConfig:
    params = GMParams(
        a1=1.0, a2=1.0, a3=1.0,
        b1=1.0, b2=1.0, b3=1.0,
        sigma=0.1, c=0.1,
        p1=2.0, p2=2.0, p3=1.0,
        q1=1.0, q2=0.0, q3=0.0,
        r1=1.0, r2=0.0, r3=0.0,
    )
    return RunConfig(
        params=params,
        grid=GridSpec(dim=1, n=64, length=1.0),
        scheme=SchemeSpec(scheme=Scheme.EXPLICIT_EULER, dt_factor=0.5, t_end=1.0),
        initial=InitialSpec(amplitude=0.05),
    )


def gm2_rothe() -> RunConfig:
    params = embed_two_component(
        a1=1.0, a2=1.0, mu=1.0, nu=1.0, sigma=0.1, p=2.0, q=1.0, r=2.0, s=0.0
    )
    return RunConfig(
        params=params,
        grid=GridSpec(dim=1, n=64, length=1.0),
        scheme=SchemeSpec(scheme=Scheme.EXPLICIT_EULER, dt_factor=0.5, t_end=1.0),
        initial=InitialSpec(amplitude=0.05),
    )


def blowup_ode() -> RunConfig:
    params = GMParams(
        a1=1.0, a2=1.0, a3=1.0,
        b1=1.0, b2=1.0, b3=1.0,
        sigma=0.1, c=0.0,
        p1=2.0, p2=0.0, p3=0.0,
        q1=0.0, q2=0.0, q3=0.0,
        r1=0.0, r2=0.0, r3=0.0,
    )
    terms = ReactionTerms(diffusion=False, decay=False, source=False, production=True)
    return RunConfig(
        params=params,
        grid=GridSpec(dim=1, n=4, length=1.0),
        scheme=SchemeSpec(
            scheme=Scheme.EXPLICIT_EULER,
            dt=1e-4,
            dt_factor=None,
            t_end=1.0,
            blowup_threshold=1e8,
            output_every=100,
            terms=terms,
        ),
        initial=InitialSpec(u0=2.0, v0=1.0, w0=1.0),
        certificate=CertificateSpec(enabled=False),
    )


PRESETS: Dict[str, Callable[[], RunConfig]] = {
    "phyllotaxis": phyllotaxis,
    "gm2_rothe": gm2_rothe,
    "blowup_ode": blowup_ode,
}


def get_preset(name: str) -> RunConfig:
    """Returns a fresh copy of a built-in configuration.

    Raises:
        ConfigError: If no preset has that name.
    """
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(
            f"Unknown preset '{name}'. Available presets: {sorted(PRESETS)}"
        ) from None
