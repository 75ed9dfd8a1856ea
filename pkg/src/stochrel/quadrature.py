"""Composite Simpson quadrature with step-doubling error control.

The integrands in this package (force sample paths, Lorentz factors along a
trajectory) are smooth, bounded trigonometric compositions, so a composite
Simpson rule with Richardson-style doubling converges quickly provided the
initial mesh resolves the highest frequency present.  All routines evaluate
the integrand on whole node arrays at once.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import NumericalError

_MAX_DOUBLINGS = 16


def _simpson_on_mesh(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n_panels: int) -> float:
    """Composite Simpson value on ``n_panels`` equal panels of [a, b]."""
    nodes = np.linspace(a, b, 2 * n_panels + 1)
    vals = np.asarray(f(nodes), dtype=float)
    h = (b - a) / n_panels
    return (h / 6.0) * (vals[0] + vals[-1] + 4.0 * vals[1::2].sum() + 2.0 * vals[2:-1:2].sum())


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    rtol: float = 1e-9,
    atol: float = 0.0,
    initial_panels: int = 8,
) -> tuple[float, float]:
    """Integrate ``f`` over [a, b], returning (value, error estimate).

    The panel count is doubled until the Richardson estimate
    |S(2n) - S(n)| / 15 meets ``rtol``/``atol``.  Raises
    :class:`NumericalError` (carrying the achieved estimate) if the tolerance
    is still unmet after the doubling budget.
    """
    if b == a:
        return 0.0, 0.0
    if b < a:
        value, err = adaptive_simpson(f, b, a, rtol=rtol, atol=atol, initial_panels=initial_panels)
        return -value, err

    n = max(2, int(initial_panels))
    prev = _simpson_on_mesh(f, a, b, n)
    for _ in range(_MAX_DOUBLINGS):
        n *= 2
        cur = _simpson_on_mesh(f, a, b, n)
        err = abs(cur - prev) / 15.0
        if err <= max(atol, rtol * abs(cur)):
            # one Richardson extrapolation step comes for free
            return cur + (cur - prev) / 15.0, err
        prev = cur
    raise NumericalError(
        f"Simpson quadrature on [{a!r}, {b!r}] did not converge "
        f"(last error estimate {err:.3e} with {n} panels)",
        error_estimate=err,
    )


def cumulative_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray,
    *,
    sub_panels: int = 2,
    rtol: float = 1e-9,
    atol: float = 0.0,
) -> np.ndarray:
    """Cumulative integral of ``f`` at the points of an increasing ``grid``.

    Each grid interval is integrated by Simpson on ``sub_panels`` panels and
    the whole pass is verified against a doubled mesh; the subdivision is
    doubled globally until the *total* integral satisfies the tolerance.
    Returns an array aligned with ``grid`` whose first entry is 0.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-D array with at least two points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")

    k = max(1, int(sub_panels))
    prev = _per_interval_simpson(f, grid, k)
    for _ in range(_MAX_DOUBLINGS):
        k *= 2
        cur = _per_interval_simpson(f, grid, k)
        total = float(cur.sum())
        err = float(np.abs(cur - prev).sum()) / 15.0
        if err <= max(atol, rtol * abs(total)):
            out = np.empty(grid.size)
            out[0] = 0.0
            np.cumsum(cur, out=out[1:])
            return out
        prev = cur
    raise NumericalError(
        f"cumulative Simpson over {grid.size} grid points did not converge "
        f"(last error estimate {err:.3e})",
        error_estimate=err,
    )


def _per_interval_simpson(f, grid, sub_panels: int) -> np.ndarray:
    """Simpson integral of every grid interval using ``sub_panels`` panels."""
    n_int = grid.size - 1
    # nodes: for each interval, 2*sub_panels+1 points; interior boundaries shared
    offsets = np.linspace(0.0, 1.0, 2 * sub_panels + 1)
    widths = np.diff(grid)
    nodes = grid[:-1, None] + widths[:, None] * offsets[None, :]
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(n_int, -1)
    h = widths / sub_panels
    odd = vals[:, 1::2].sum(axis=1)
    even = vals[:, 2:-1:2].sum(axis=1)
    return (h / 6.0) * (vals[:, 0] + vals[:, -1] + 4.0 * odd + 2.0 * even)


def _simpson_from_values(vals: np.ndarray, n_intervals: int, width: float) -> np.ndarray:
    """Per-interval Simpson sums from values on a shared uniform fine mesh."""
    m = (vals.size - 1) // n_intervals // 2  # panels per interval
    v = vals[:-1].reshape(n_intervals, 2 * m)
    ends = vals[2 * m :: 2 * m]
    odd = v[:, 1::2].sum(axis=1)
    even = v[:, 0::2].sum(axis=1) - v[:, 0]
    h = width / m
    return (h / 6.0) * (v[:, 0] + ends + 4.0 * odd + 2.0 * even)


def cumulative_simpson_uniform(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    n_intervals: int,
    *,
    rtol: float = 1e-9,
    atol: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative Simpson integral on a uniform grid with mesh-doubling reuse.

    Integrates ``f`` over [a, b] split into ``n_intervals`` equal intervals.
    Returns (cumulative, boundary_values): the cumulative integral at the
    n_intervals+1 interval boundaries and the integrand values there.  Each
    doubling of the internal mesh only evaluates the new midpoints.
    """
    if not b > a:
        raise ValueError("need b > a")
    width = (b - a) / n_intervals

    # start with one Simpson panel per interval
    nodes = np.linspace(a, b, 2 * n_intervals + 1)
    vals = np.asarray(f(nodes), dtype=float)
    prev = _simpson_from_values(vals, n_intervals, width)
    boundary = vals[::2].copy()

    for _ in range(_MAX_DOUBLINGS):
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        mid_vals = np.asarray(f(mids), dtype=float)
        merged = np.empty(nodes.size + mids.size)
        merged[0::2] = vals
        merged[1::2] = mid_vals
        merged_nodes = np.empty_like(merged)
        merged_nodes[0::2] = nodes
        merged_nodes[1::2] = mids
        nodes, vals = merged_nodes, merged

        cur = _simpson_from_values(vals, n_intervals, width)
        total = float(cur.sum())
        err = float(np.abs(cur - prev).sum()) / 15.0
        if err <= max(atol, rtol * abs(total)):
            out = np.empty(n_intervals + 1)
            out[0] = 0.0
            np.cumsum(cur, out=out[1:])
            return out, boundary
        prev = cur
    raise NumericalError(
        f"uniform cumulative Simpson on [{a!r}, {b!r}] did not converge "
        f"(last error estimate {err:.3e})",
        error_estimate=err,
    )
