"""Run outputs: diagnostics CSV, field snapshots and a run manifest."""

import hashlib
import os
import platform

import numpy as np
import scipy

from . import __version__
from ._backend import BACKEND
from .config import to_text
from .diagnostics import write_csv
from .errors import NLCHError
from .grid import write_snapshot


class OutputError(NLCHError, OSError):
    kind = "io"


def config_hash(config):
    """SHA-256 of the normalized config text, ignoring the output directory."""
    text = "".join(
        line for line in to_text(config).splitlines(keepends=True) if not line.startswith("output.dir")
    )
    return hashlib.sha256(text.encode()).hexdigest()


def manifest_text(config):
    lines = [
        f"config_sha256 = {config_hash(config)}",
        f"seed = {config.solver.seed}",
        f"nlchr = {__version__}",
        f"backend = {BACKEND}",
        f"python = {platform.python_version()}",
        f"numpy = {np.__version__}",
        f"scipy = {scipy.__version__}",
    ]
    return "\n".join(lines) + "\n"


def write_outputs(records, fields, paths, config=None):
    """Write the CSV, one snapshot per ``(time, values)`` in ``fields`` and the manifest.

    ``paths`` maps ``csv``, ``snapshot_dir`` and ``manifest`` to file paths;
    missing keys are skipped. Returns the list of written files.
    """
    written = []
    try:
        if "csv" in paths:
            os.makedirs(os.path.dirname(os.path.abspath(paths["csv"])), exist_ok=True)
            write_csv(paths["csv"], records)
            written.append(paths["csv"])
        if fields and "snapshot_dir" in paths:
            os.makedirs(paths["snapshot_dir"], exist_ok=True)
            grid = config.solver.grid
            for step_index, time, values in fields:
                path = os.path.join(paths["snapshot_dir"], f"u_{step_index:08d}.nlch")
                write_snapshot(path, grid, values, time)
                written.append(path)
        if config is not None and "manifest" in paths:
            with open(paths["manifest"], "w") as fh:
                fh.write(manifest_text(config))
            written.append(paths["manifest"])
    except OSError as exc:
        raise OutputError(f"{exc.filename or '?'}: {exc.strerror}") from exc
    return written
