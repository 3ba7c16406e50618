"""Benchmark signals, price-series ingestion, splits and spline baselines."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from datetime import date
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ArgumentError, DataError, DataFormatError, NumericalError, RangeError
from .rng import SplitMix64


@dataclass(frozen=True)
class AffineScale:
    """Invertible map [lo, hi] <-> [-1, 1]; degenerate ranges map to 0."""

    lo: float
    hi: float

    def apply(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.hi == self.lo:
            return np.zeros_like(values)
        return 2.0 * (values - self.lo) / (self.hi - self.lo) - 1.0

    def invert(self, scaled) -> np.ndarray:
        scaled = np.asarray(scaled, dtype=float)
        if self.hi == self.lo:
            return np.full_like(scaled, self.lo)
        return self.lo + (scaled + 1.0) * (self.hi - self.lo) / 2.0


@dataclass(frozen=True)
class TimeSeries:
    """Strictly increasing times with finite values; optionally the affine
    rescaling that produced the values (for inversion)."""

    times: np.ndarray
    values: np.ndarray
    rescale: AffineScale | None = None

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1:
            raise ArgumentError("times and values must be equal-length 1-D arrays")
        if len(times) and not np.all(np.diff(times) > 0):
            raise ArgumentError("times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise NumericalError("series contains non-finite entries")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class SplitPlan:
    """Train/test partition recipe."""

    kind: str = "contiguous"
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("contiguous", "shuffled"):
            raise ArgumentError(f"split kind must be contiguous or shuffled, got {self.kind!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ArgumentError("train_fraction must be in (0, 1)")


def gen_cosine(amplitude: float, period: float, n: int, dt: float) -> TimeSeries:
    """values[k] = amplitude * cos(2 pi k dt / period)."""
    if period <= 0 or dt <= 0 or n < 1:
        raise ArgumentError("need period > 0, dt > 0, n >= 1")
    times = np.arange(n) * dt
    return TimeSeries(times, amplitude * np.cos(2.0 * math.pi * times / period))


def gen_mackey_glass(
    beta: float = 0.2,
    gamma: float = 0.1,
    tau: float = 17.0,
    n_exp: float = 10.0,
    dt: float = 0.1,
    n_steps: int = 12000,
    history_value: float = 1.2,
    discard: int = 2000,
) -> TimeSeries:
    """Integrate dx/dt = beta x(t-tau)/(1 + x(t-tau)^n) - gamma x(t).

    Classical RK4 at fixed step ``dt``; the delayed value is linearly
    interpolated in the stored solution (constant ``history_value`` before
    t=0). ``tau == 0`` reduces to an ordinary ODE and the stage value is
    used directly. The first ``discard`` steps are dropped; the result has
    ``n_steps + 1 - discard`` points.
    """
    if dt <= 0:
        raise ArgumentError("dt must be positive")
    if tau < 0:
        raise ArgumentError("tau must be >= 0")
    if discard < 0 or n_steps < 1 or discard > n_steps:
        raise ArgumentError("need 0 <= discard <= n_steps and n_steps >= 1")

    x = np.empty(n_steps + 1)
    x[0] = history_value

    def delayed(t_query: float, frontier: int) -> float:
        # Query into the stored grid; constant history before t=0, clamp at
        # the frontier (reachable only when 0 < tau < dt).
        if t_query <= 0.0:
            return history_value
        pos = t_query / dt
        lo = min(int(math.floor(pos)), frontier)
        hi = min(lo + 1, frontier)
        w = pos - lo
        return float((1.0 - w) * x[lo] + w * x[hi])

    def f(xv: float, xd: float) -> float:
        return beta * xd / (1.0 + xd**n_exp) - gamma * xv

    for k in range(n_steps):
        t = k * dt
        xk = x[k]
        if tau == 0.0:
            k1 = f(xk, xk)
            s2 = xk + 0.5 * dt * k1
            k2 = f(s2, s2)
            s3 = xk + 0.5 * dt * k2
            k3 = f(s3, s3)
            s4 = xk + dt * k3
            k4 = f(s4, s4)
        else:
            k1 = f(xk, delayed(t - tau, k))
            d_mid = delayed(t + 0.5 * dt - tau, k)
            k2 = f(xk + 0.5 * dt * k1, d_mid)
            k3 = f(xk + 0.5 * dt * k2, d_mid)
            k4 = f(xk + dt * k3, delayed(t + dt - tau, k))
        x[k + 1] = xk + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not math.isfinite(x[k + 1]):
            raise NumericalError(f"Mackey-Glass state diverged at step {k + 1}")

    times = np.arange(n_steps + 1) * dt
    return TimeSeries(times[discard:], x[discard:])


def subsample(series: TimeSeries, stride: int) -> TimeSeries:
    """Keep every ``stride``-th point, starting at index 0."""
    if stride < 1:
        raise ArgumentError("stride must be >= 1")
    return TimeSeries(series.times[::stride], series.values[::stride], series.rescale)


def load_price_csv(path) -> TimeSeries:
    """Load a ``date,close`` CSV as a trading-day-indexed series in [-1, 1].

    Times are 0, 1, 2, ... in file order; closes are min-max rescaled to
    [-1, 1] with the affine map recorded on the result for inversion. A
    constant-price file degenerates to all-zero values with a warning.
    """
    closes: list[float] = []
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        fields = [f.strip().lower() for f in reader.fieldnames or []]
        if "date" not in fields or "close" not in fields:
            raise DataFormatError(
                f"{path}: header must contain 'date' and 'close' columns"
            )
        for row_no, row in enumerate(reader, start=2):
            row = {k.strip().lower(): v for k, v in row.items() if k is not None}
            try:
                date.fromisoformat((row.get("date") or "").strip())
                close = float((row.get("close") or "").strip())
            except (ValueError, AttributeError) as exc:
                raise DataFormatError(f"{path}: unparseable row {row_no}: {exc}") from exc
            if not math.isfinite(close) or close <= 0.0:
                raise DataError(f"{path}: non-positive close at row {row_no}")
            closes.append(close)
    if len(closes) < 2:
        raise DataError(f"{path}: need at least two price rows")
    values = np.asarray(closes)
    scale = AffineScale(float(values.min()), float(values.max()))
    if scale.lo == scale.hi:
        warnings.warn(f"{path}: constant price series rescales to all zeros")
    return TimeSeries(np.arange(len(values), dtype=float), scale.apply(values), scale)


def gen_random_walk(n: int, step_std: float = 1.0, seed: int = 0) -> TimeSeries:
    """Cumulative sum of seeded Gaussian steps, min-max rescaled to [-1, 1]."""
    if n < 2:
        raise ArgumentError("n must be >= 2")
    walk = np.cumsum(step_std * SplitMix64(seed).normals(n))
    scale = AffineScale(float(walk.min()), float(walk.max()))
    return TimeSeries(np.arange(n, dtype=float), scale.apply(walk), scale)


def split(n_items: int, plan: SplitPlan) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint, exhaustive train/test index arrays (both ascending)."""
    if n_items < 2:
        raise ArgumentError("need at least two items to split")
    # Epsilon guards floor against binary representation of the fraction.
    n_train = int(math.floor(plan.train_fraction * n_items + 1e-9))
    if n_train < 1 or n_train >= n_items:
        raise ArgumentError(
            f"train_fraction {plan.train_fraction} leaves an empty side for n={n_items}"
        )
    if plan.kind == "contiguous":
        indices = np.arange(n_items)
    else:
        indices = np.array(SplitMix64(plan.seed).permutation(n_items))
    return np.sort(indices[:n_train]), np.sort(indices[n_train:])


def _check_interpolation_inputs(train: TimeSeries, query_times) -> np.ndarray:
    if len(train) < 3:
        raise ArgumentError("need at least 3 training points")
    q = np.asarray(query_times, dtype=float).reshape(-1)
    lo, hi = train.times[0], train.times[-1]
    if len(q) and (q.min() < lo or q.max() > hi):
        raise RangeError(
            f"query times outside training range [{lo}, {hi}]"
        )
    return q


def _snap_knots(x: np.ndarray, y: np.ndarray, q: np.ndarray, out: np.ndarray) -> np.ndarray:
    # Knot queries return the stored training value exactly.
    pos = np.searchsorted(x, q)
    pos = np.clip(pos, 0, len(x) - 1)
    hit = x[pos] == q
    out[hit] = y[pos[hit]]
    return out


def cubic_spline_interpolate(train: TimeSeries, query_times) -> np.ndarray:
    """Natural cubic spline (zero second derivative at both ends)."""
    q = _check_interpolation_inputs(train, query_times)
    spline = CubicSpline(train.times, train.values, bc_type="natural")
    return _snap_knots(train.times, train.values, q, spline(q))


def cubic_hermite_interpolate(train: TimeSeries, query_times) -> np.ndarray:
    """Monotone cubic Hermite with Fritsch-Carlson slope limiting."""
    q = _check_interpolation_inputs(train, query_times)
    x = train.times
    y = train.values
    n = len(x)
    h = np.diff(x)
    delta = np.diff(y) / h

    m = np.empty(n)
    m[0] = delta[0]
    m[-1] = delta[-1]
    m[1:-1] = 0.5 * (delta[:-1] + delta[1:])
    # Flat or direction-changing intervals force zero slope at their knots.
    for i in range(n - 1):
        if delta[i] == 0.0:
            m[i] = 0.0
            m[i + 1] = 0.0
    for i in range(1, n - 1):
        if delta[i - 1] * delta[i] < 0.0:
            m[i] = 0.0
    # Fritsch-Carlson circle restriction keeps each interval monotone.
    for i in range(n - 1):
        if delta[i] == 0.0:
            continue
        alpha = m[i] / delta[i]
        beta = m[i + 1] / delta[i]
        radius = math.hypot(alpha, beta)
        if radius > 3.0:
            m[i] = 3.0 / radius * alpha * delta[i]
            m[i + 1] = 3.0 / radius * beta * delta[i]

    idx = np.clip(np.searchsorted(x, q, side="right") - 1, 0, n - 2)
    hi = h[idx]
    t = (q - x[idx]) / hi
    h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
    h10 = t * (1.0 - t) ** 2
    h01 = t * t * (3.0 - 2.0 * t)
    h11 = t * t * (t - 1.0)
    out = y[idx] * h00 + hi * m[idx] * h10 + y[idx + 1] * h01 + hi * m[idx + 1] * h11
    return _snap_knots(x, y, q, out)


def series_to_csv(series: TimeSeries, path) -> None:
    """Write a series as two-column CSV (t, value)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "value"])
        for t, v in zip(series.times, series.values):
            writer.writerow([repr(float(t)), repr(float(v))])


def load_series_csv(path) -> TimeSeries:
    """Read a two-column (t, value) CSV written by :func:`series_to_csv`."""
    times: list[float] = []
    values: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["t", "value"]:
            raise DataFormatError(f"{path}: expected 't,value' header")
        for row_no, row in enumerate(reader, start=2):
            try:
                times.append(float(row[0]))
                values.append(float(row[1]))
            except (ValueError, IndexError) as exc:
                raise DataFormatError(f"{path}: unparseable row {row_no}") from exc
    return TimeSeries(np.asarray(times), np.asarray(values))
