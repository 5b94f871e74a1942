"""Resonance scans, Rabi-frequency extraction and prediction checks."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .dynamics import PropagatorConfig, Trajectory, time_averaged_transition_probability
from .exceptions import ConfigurationError, FloqlieError, NoOscillationError, ParameterError

__all__ = [
    "ScanResult",
    "RabiFit",
    "Comparison",
    "quadratic_peak",
    "scan_nu",
    "extract_rabi",
    "compare",
]

MIN_GRID = 16


@dataclass(frozen=True)
class ScanResult:
    nu_grid: np.ndarray = field(repr=False)
    p_avg: np.ndarray = field(repr=False)
    peak_nu: float
    peak_value: float
    predicted_nu: float = float("nan")

    @property
    def discrepancy(self) -> float:
        return abs(self.peak_nu - self.predicted_nu)


@dataclass(frozen=True)
class RabiFit:
    """Dominant oscillation ``amplitude * cos(omega_rabi t + phase) + offset``.

    ``residual`` is the RMS deviation of the samples from that curve.
    """

    omega_rabi: float
    amplitude: float
    residual: float
    phase: float = 0.0
    offset: float = 0.0

    @property
    def accepted(self) -> bool:
        return self.residual < 0.1 * self.amplitude

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.cos(self.omega_rabi * t + self.phase) + self.offset


@dataclass(frozen=True)
class Comparison:
    predicted: float
    measured: float
    abs_error: float
    rel_error: float
    passed: bool
    tolerance: float
    relative: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def quadratic_peak(x, y, i=None):
    """Vertex of the parabola through ``(x[i-1..i+1], y[i-1..i+1])``.

    ``i`` defaults to the argmax of ``y``.  At either end of the grid the
    sample itself is returned.  The vertex is clamped to the bracketing
    interval so a flat or noisy triple cannot throw it off the grid.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y)) if i is None else int(i)
    if i == 0 or i == len(x) - 1:
        return float(x[i]), float(y[i])
    xs = x[i - 1:i + 2] - x[i]
    c2, c1, c0 = np.polyfit(xs, y[i - 1:i + 2], 2)
    if c2 >= 0:
        return float(x[i]), float(y[i])
    dx = float(np.clip(-c1 / (2.0 * c2), xs[0], xs[2]))
    return float(x[i] + dx), float(c0 + c1 * dx + c2 * dx * dx)


def _check_grid(nu_grid):
    grid = np.asarray(nu_grid, dtype=float)
    if grid.ndim != 1 or grid.size < MIN_GRID:
        raise ConfigurationError(f"nu grid needs at least {MIN_GRID} points, got {grid.size}")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("nu grid must be strictly increasing")
    return grid


def scan_nu(builder: Callable, nu_grid, probe, cfg: PropagatorConfig, *, predicted_nu=None,
            n_jobs=None) -> ScanResult:
    """Time-averaged transition probability over a grid of modulation frequencies.

    Parameters
    ----------
    builder : callable
        ``builder(nu) -> ModelSpec``.
    nu_grid : array_like
        Strictly increasing, at least 16 points.
    probe : (int, int)
        Flat basis indices ``(initial, final)``.
    cfg : PropagatorConfig
        Averaging window and integrator settings, shared by every point.
    predicted_nu : float, optional
        If given it must lie inside the grid.
    n_jobs : int, optional
        Worker threads; defaults to the CPU count.  Output order follows the
        grid regardless of completion order.

    Raises
    ------
    ConfigurationError
        Bad grid or prediction outside it.
    FloqlieError
        Any dynamics failure, with the offending ``nu`` stored on the
        exception as ``.nu``.
    """
    grid = _check_grid(nu_grid)
    if predicted_nu is not None and not grid[0] <= predicted_nu <= grid[-1]:
        raise ConfigurationError(f"predicted peak {predicted_nu} lies outside the grid "
                                 f"[{grid[0]}, {grid[-1]}]")
    initial, final = probe

    def point(nu):
        try:
            return time_averaged_transition_probability(builder(nu), cfg, initial, final)
        except FloqlieError as exc:
            exc.nu = float(nu)
            exc.args = (f"at nu={nu!r}: {exc.args[0] if exc.args else exc}",) + exc.args[1:]
            raise

    workers = max(1, int(n_jobs or os.cpu_count() or 1))
    if workers == 1:
        p = [point(nu) for nu in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            p = list(pool.map(point, grid))
    p = np.asarray(p, dtype=float)
    peak_nu, peak_value = quadratic_peak(grid, p)
    return ScanResult(grid, p, peak_nu, peak_value,
                      float("nan") if predicted_nu is None else float(predicted_nu))


def _dominant_frequency(t, x, pad=16):
    n = x.size
    dt = t[1] - t[0]
    nfft = int(2 ** np.ceil(np.log2(n * pad)))
    spec = np.abs(np.fft.rfft(x, nfft))
    freqs = 2.0 * np.pi * np.fft.rfftfreq(nfft, dt)
    spec[0] = 0.0
    # skip the zero-frequency lobe left by mean removal
    lobe = max(1, nfft // n)
    spec[:lobe] = 0.0
    i = int(np.argmax(spec))
    body = spec[lobe:]
    body = body[body > 0]
    if body.size == 0 or spec[i] < 3.0 * np.median(body):
        raise NoOscillationError("no spectral peak above 3x the spectral median")
    if 0 < i < spec.size - 1:
        a, b, c = spec[i - 1], spec[i], spec[i + 1]
        den = a - 2 * b + c
        shift = 0.5 * (a - c) / den if den != 0 else 0.0
    else:
        shift = 0.0
    return float((i + shift) * (freqs[1] - freqs[0]))


def extract_rabi(traj, values=None) -> RabiFit:
    """Dominant angular frequency of a uniformly sampled real signal.

    Accepts a :class:`~floqlie.dynamics.Trajectory` or ``(times, values)``.
    The frequency is the peak of the zero-padded spectrum of the
    mean-removed signal, refined by a parabola through the top three bins;
    amplitude, phase and offset come from a linear least-squares fit of
    ``A cos + B sin + C`` at that frequency.
    """
    if isinstance(traj, Trajectory):
        t, x = traj.times, traj.values
    else:
        t, x = traj, values
    t = np.asarray(t, dtype=float)
    x = np.asarray(x)
    if np.iscomplexobj(x):
        raise ParameterError("extract_rabi needs a real signal")
    x = x.astype(float)
    if t.ndim != 1 or t.shape != x.shape or t.size < 8:
        raise ParameterError("need at least 8 matching time and value samples")
    dt = np.diff(t)
    if np.any(dt <= 0) or np.ptp(dt) > 1e-6 * dt.mean():
        raise ParameterError("samples must be uniform in time")
    xc = x - x.mean()
    if np.max(np.abs(xc)) <= 1e-12 * max(1.0, np.max(np.abs(x))):
        raise NoOscillationError("signal is constant")
    w = _dominant_frequency(t, xc)
    design = np.column_stack([np.cos(w * t), np.sin(w * t), np.ones_like(t)])
    (a, b, c), *_ = np.linalg.lstsq(design, x, rcond=None)
    resid = x - design @ np.array([a, b, c])
    return RabiFit(omega_rabi=w, amplitude=float(np.hypot(a, b)),
                   residual=float(np.sqrt(np.mean(resid ** 2))), phase=float(np.arctan2(-b, a)),
                   offset=float(c))


def compare(measured, predicted, tolerance, *, relative=False) -> Comparison:
    """Check a measurement against a prediction.

    ``measured`` may be a number, a :class:`ScanResult` (its ``peak_nu``) or a
    :class:`RabiFit` (its ``omega_rabi``).  ``tolerance`` is absolute unless
    ``relative`` is set.
    """
    if not tolerance > 0:
        raise ParameterError("tolerance must be positive")
    if isinstance(measured, ScanResult):
        measured = measured.peak_nu
    elif isinstance(measured, RabiFit):
        measured = measured.omega_rabi
    measured, predicted = float(measured), float(predicted)
    abs_err = abs(measured - predicted)
    rel_err = abs_err / abs(predicted) if predicted != 0 else (0.0 if abs_err == 0 else float("inf"))
    err = rel_err if relative else abs_err
    return Comparison(predicted, measured, abs_err, rel_err, bool(err <= tolerance),
                      float(tolerance), relative)
