"""
Output files: comparison CSVs, JSON sidecars and realization dumps
"""

import csv
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Sequence, TextIO

import numpy as np

from coxcell.core.exceptions import ConfigurationException
from coxcell.core.logging import LoggerMixin

REALIZATION_HEADER = ("kind", "r", "theta", "t", "x", "y")


@contextmanager
def _open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Open ``path`` for writing, or yield stdout when it is None"""
    if path is None:
        yield sys.stdout
        return
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        handle = target.open("w", newline="")
    except OSError as e:
        raise ConfigurationException(f"cannot write {path}: {e}", config_field="out")
    with handle:
        yield handle


def sidecar_path(csv_path: str) -> str:
    return str(Path(csv_path).with_suffix(".json"))


class ResultWriter(LoggerMixin):
    """Writes rows as they are produced so a failing run still leaves its prefix on disk"""

    def write_csv(self, header: Sequence[str], rows: Sequence[Sequence[str]], path: Optional[str] = None) -> None:
        with _open_output(path) as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)
            handle.flush()
        if path is not None:
            self.log_operation("CSV written", path=path, rows=len(rows))

    def write_sidecar(self, metadata: Dict[str, Any], path: str) -> None:
        with _open_output(path) as handle:
            json.dump(metadata, handle, indent=2, sort_keys=True, default=_json_default)
            handle.write("\n")
        self.log_operation("Sidecar written", path=path)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


def dump_realization(realization: Any, path: Optional[str] = None) -> None:
    """One row per road (kind=line), vehicular BS (vbs) and planar BS (pbs).

    Roads carry (r, theta); vehicular BSs add their offset t and coordinates;
    planar BSs only have coordinates. The road through the origin, when present,
    is written first with r = 0.
    """
    with _open_output(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(REALIZATION_HEADER)
        if realization.origin_line is not None:
            writer.writerow(("line", 0.0, realization.origin_line.theta, "", "", ""))
        for r, theta in zip(realization.line_r, realization.line_theta):
            writer.writerow(("line", float(r), float(theta), "", "", ""))
        for i, (t, (x, y)) in enumerate(zip(realization.vbs_t, realization.vbs_xy)):
            line = realization.line_of(i)
            writer.writerow(("vbs", line.r, line.theta, float(t), float(x), float(y)))
        for x, y in realization.planar_xy:
            writer.writerow(("pbs", "", "", "", float(x), float(y)))
