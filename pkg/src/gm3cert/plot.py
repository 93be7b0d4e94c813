"""Standalone SVG figures of a monitor CSV.

Figures are drawn on `matplotlib.figure.Figure` objects, so no display server and
no pyplot state are involved. SVG ids are salted with a constant and the date
metadata is dropped, which makes the output a pure function of the CSV.
"""

import io
import logging
import math
from pathlib import Path
from typing import List, Optional, Union

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure

from gm3cert.write import atomic_write_bytes, read_monitor_csv

logger = logging.getLogger(__name__)

SVG_SALT = "gm3cert"
FIGURE_NAMES = ("lyapunov.svg", "extrema.svg", "floor_margins.svg")


def _save_svg(fig: Figure, path: Union[str, Path]) -> None:
    buffer = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT}):
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    atomic_write_bytes(buffer.getvalue(), path)


def kappa_from_monitor(df: pd.DataFrame) -> Optional[float]:
    """Recovers κ as ``L + kappa_margin`` from the first row that has a margin."""
    rows = df.dropna(subset=["kappa_margin"])
    if rows.empty:
        return None
    first = rows.iloc[0]
    return float(first["L"] + first["kappa_margin"])


def plot_lyapunov(
    df: pd.DataFrame, path: Union[str, Path], kappa: Optional[float] = None
) -> None:
    """L(t) with the κ ceiling as a dashed line, on a log axis when κ is drawn."""
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    ax.plot(df["t"], df["L"], label="L(t)")
    if kappa is not None and math.isfinite(kappa):
        ax.axhline(kappa, color="tab:red", linestyle="--", label=f"κ = {kappa:.4g}")
        ax.set_yscale("log")
        finite_L = df["L"][np.isfinite(df["L"])]
        low = float(finite_L.min()) if not finite_L.empty else kappa
        ax.set_ylim(low / 2.0, kappa * 2.0)
    ax.set_xlabel("t")
    ax.set_ylabel("L")
    ax.set_title("Lyapunov functional")
    ax.legend()
    _save_svg(fig, path)


def plot_extrema(df: pd.DataFrame, path: Union[str, Path]) -> None:
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    for name, color in (("u", "tab:blue"), ("v", "tab:orange"), ("w", "tab:green")):
        ax.plot(df["t"], df[f"max_{name}"], color=color, label=f"max {name}")
        ax.plot(
            df["t"], df[f"min_{name}"], color=color, linestyle=":", label=f"min {name}"
        )
    ax.set_xlabel("t")
    ax.set_ylabel("concentration")
    ax.set_title("Field extrema")
    ax.legend(ncol=3)
    _save_svg(fig, path)


def plot_floor_margins(df: pd.DataFrame, path: Union[str, Path]) -> None:
    fig = Figure(figsize=(6.4, 4.0))
    ax = fig.add_subplot()
    for name in ("u", "v", "w"):
        ax.plot(df["t"], df[f"floor_margin_{name}"], label=f"min {name} - floor")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("margin")
    ax.set_title("Margins above the decay floors")
    ax.legend()
    _save_svg(fig, path)


def plot_monitor_csv(
    csv_path: Union[str, Path], out_dir: Union[str, Path]
) -> List[Path]:
    """Draws the three monitor figures of a run.

    Args:
        csv_path (Union[str, Path]): Monitor CSV written by ``gm3cert simulate``.
        out_dir (Union[str, Path]): Directory for the SVG files.

    Raises:
        ValueError: If the CSV has no rows.

    Returns:
        List[Path]: Paths of lyapunov.svg, extrema.svg and floor_margins.svg.
    """
    df = read_monitor_csv(csv_path)
    out_dir = Path(out_dir)
    paths = [out_dir / name for name in FIGURE_NAMES]
    plot_lyapunov(df, paths[0], kappa_from_monitor(df))
    plot_extrema(df, paths[1])
    plot_floor_margins(df, paths[2])
    logger.info("Figures have been written to '%s'.", out_dir)
    return paths
