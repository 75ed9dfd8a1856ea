"""CSV rendering of series and histograms.

Numbers are written with 17 significant digits so that values round-trip
exactly and repeated runs of the same configuration produce byte-identical
files.  Each file starts with a unit comment line followed by the header row;
tests pin both.
"""

from __future__ import annotations

import numpy as np

from .collision import TwoParticleSeries
from .histogram import Histogram
from .kinematics import KinematicSeries

SERIES_HEADER = "tau,t,x,v"
SERIES_UNITS = "# units: s,s,m,m/s"
HISTOGRAM_HEADER = "bin_left,bin_right,density"
HISTOGRAM_UNITS = "# units: quantity,quantity,1/quantity"
SHOCK_HEADER = "t,x1,x2,v1,v2"
SHOCK_UNITS = "# units: s,m,m,m/s,m/s"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _rows(columns) -> str:
    return "\n".join(",".join(_fmt(v) for v in row) for row in zip(*columns))


def render_series_csv(series: KinematicSeries) -> str:
    lines = [SERIES_UNITS, SERIES_HEADER]
    if len(series):
        lines.append(_rows([series.tau, series.t, series.x, series.v]))
    return "\n".join(lines) + "\n"


def render_histogram_csv(hist: Histogram) -> str:
    lines = [HISTOGRAM_UNITS, HISTOGRAM_HEADER]
    if hist.density.size:
        lines.append(_rows([hist.edges[:-1], hist.edges[1:], hist.density]))
    return "\n".join(lines) + "\n"


def render_shock_csv(series: TwoParticleSeries, stride: int = 1) -> str:
    """Shock series as (t, x1, x2, v1, v2); the last step is always kept."""
    stride = max(1, int(stride))
    idx = np.arange(0, len(series), stride)
    if idx.size == 0 or idx[-1] != len(series) - 1:
        idx = np.append(idx, len(series) - 1)
    lines = [SHOCK_UNITS, SHOCK_HEADER]
    if len(series):
        cols = [series.t[idx], series.x1[idx], series.x2[idx], series.v1[idx], series.v2[idx]]
        lines.append(_rows(cols))
    return "\n".join(lines) + "\n"


def render_table_csv(header: str, columns) -> str:
    """Generic numeric table with a caller-supplied header row."""
    lines = [header]
    if columns and len(columns[0]):
        lines.append(_rows(columns))
    return "\n".join(lines) + "\n"


def write_series_csv(series: KinematicSeries, path) -> None:
    _write(path, render_series_csv(series))


def write_histogram_csv(hist: Histogram, path) -> None:
    _write(path, render_histogram_csv(hist))


def _write(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as err:
        raise OSError(f"failed to write {path}: {err}") from err
