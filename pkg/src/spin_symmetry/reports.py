"""CSV and JSON data files.

Every CSV starts with a schema comment line::

    # spin-symmetry spectrum schema v1

followed by a header row. Each CSV has a JSON mirror carrying the run
config and the results; the only timestamp in either file is
``metadata.generated_at``.

"""
import json
import logging
import os
from datetime import datetime, timezone

import numpy as np
import pandas as pd


__all__ = [
    "SCAN_COLUMNS",
    "SCHEMA_VERSION",
    "SPECTRUM_COLUMNS",
    "make_document",
    "write_csv",
    "write_json",
]


log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SPECTRUM_COLUMNS = (
    "dimension",
    "branch",
    "kappa",
    "m_j",
    "channel",
    "nodes",
    "energy",
    "partner_kappa",
    "partner_m_j",
    "splitting",
    "oracle_energy",
)

SCAN_COLUMNS = (
    "dimension",
    "branch",
    "amplitude",
    "kappa",
    "m_j",
    "nodes",
    "energy",
    "partner_energy",
    "splitting",
)


def schema_line(command):
    return f"# spin-symmetry {command} schema v{SCHEMA_VERSION}\n"


def to_plain(obj):
    """Convert numpy scalars and arrays for JSON."""
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def write_csv(path, command, rows, columns=SPECTRUM_COLUMNS):
    """Write ``rows`` (dicts keyed by column) with the schema comment line."""
    records = [{c: row.get(c) for c in columns} for row in rows]
    # Object dtype keeps ints as ints and writes missing values as empty cells.
    frame = pd.DataFrame(records, columns=list(columns), dtype=object)
    with open(path, "w", newline="") as fp:
        fp.write(schema_line(command))
        frame.to_csv(fp, index=False, lineterminator="\n")
    log.info("Wrote %d rows to %s", len(frame), path)
    return path


def read_csv(path):
    """Read a data file back, skipping the schema line."""
    return pd.read_csv(path, comment="#")


def make_document(command, config, results, passed, version=None):
    if version is None:
        from . import __version__ as version  # noqa: Avoid circular import
    return {
        "metadata": {
            "command": command,
            "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "schema": SCHEMA_VERSION,
            "version": version,
        },
        "config": config.to_dict(),
        "pass": bool(passed),
        "results": results,
    }


def write_json(path, document):
    with open(path, "w") as fp:
        json.dump(document, fp, indent=2, sort_keys=True, default=to_plain)
        fp.write("\n")
    log.info("Wrote %s", path)
    return path


def output_paths(directory, command):
    os.makedirs(directory, exist_ok=True)
    stem = os.path.join(directory, command)
    return f"{stem}.csv", f"{stem}.json"
