import logging
import os
import tempfile
from pathlib import Path
from typing import Union

import pandas as pd

from gm3cert.certificate import Certificate, certificate_from_text, certificate_to_text
from gm3cert.integrator import State, state_from_bytes, state_to_bytes
from gm3cert.schemas import MonitorTable

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def atomic_write_bytes(data: bytes, path: Union[str, Path]) -> None:
    """Writes bytes to a temporary file next to `path`, then renames it into place.

    A reader never sees a half-written file, and an interrupted write leaves the
    previous file untouched.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def atomic_write_text(text: str, path: Union[str, Path]) -> None:
    atomic_write_bytes(text.encode("utf-8"), path)


def write_certificate(certificate: Certificate, path: Union[str, Path]) -> None:
    """Writes a certificate as flat ``name = value`` lines.

    Args:
        certificate (Certificate): The certificate.
        path (Union[str, Path]): Output file.

    Returns:
        None
    """
    atomic_write_text(certificate_to_text(certificate), path)
    logger.info("Certificate has been written to '%s'.", path)


def read_certificate(path: Union[str, Path]) -> Certificate:
    return certificate_from_text(Path(path).read_text(encoding="utf-8"))


def write_table(df: pd.DataFrame, path: Union[str, Path]) -> None:
    """Writes a DataFrame to CSV with round-trip float formatting and no index.

    Missing values are written as empty fields.
    """
    text = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    atomic_write_text(text, path)
    logger.info("%d rows have been written to '%s'.", len(df), path)


def read_monitor_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Reads and validates a monitor CSV.

    Raises:
        ValueError: If the file has no data rows.
    """
    df = pd.read_csv(path)
    if df.empty:
        raise ValueError(f"The monitor CSV '{path}' contains no rows.")
    return MonitorTable.validate(df)


def write_snapshot(state: State, path: Union[str, Path]) -> None:
    atomic_write_bytes(state_to_bytes(state), path)
    logger.info("Snapshot at t = %r has been written to '%s'.", state.t, path)


def read_snapshot(path: Union[str, Path]) -> State:
    return state_from_bytes(Path(path).read_bytes())
