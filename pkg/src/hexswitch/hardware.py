"""Hardware cost models calibrated from measurements on a real device.

Two latency readings exist for programming the mesh and they do not agree:
a serial per-gate cost (47.189 ms per PUC on average, std 3.96 ms) and a
linear fit with slope k = 0.005 whose unit is read here as seconds per PUC.
They are exposed as separate modes and never mixed; pick one explicitly.

Throughput degrades with route length because loss accumulates per PUC; the
bitrate table is a step-wise descriptive lookup of measured (length ->
bitrate, loss) rows, not an extrapolating model.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

SERIAL = "serial"
LINEAR = "linear"


@dataclass(frozen=True)
class LatencyModel:
    per_puc_mean_ms: float = 47.189
    per_puc_std_ms: float = 3.96
    linear_slope_k: float = 0.005  # seconds per PUC
    linear_intercept_ms: float = 0.0
    mode: str = SERIAL

    def __post_init__(self) -> None:
        for name in ("per_puc_mean_ms", "per_puc_std_ms", "linear_slope_k", "linear_intercept_ms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.mode not in (SERIAL, LINEAR):
            raise ValueError(f"mode must be '{SERIAL}' or '{LINEAR}', got {self.mode!r}")


def estimate_config_latency(model: LatencyModel, total_pucs: int, *, exact: bool = False) -> float | Fraction:
    """Deterministic configuration latency in ms for programming total_pucs gates.

    The value is computed in exact rational arithmetic and rounded to float
    once at the end, so the model is exactly additive in total_pucs. Pass
    exact=True to get the unrounded Fraction; float results cannot add
    without rounding, so additivity only holds bit-for-bit on the exact form.
    """
    if total_pucs < 0:
        raise ValueError("total_pucs must be nonnegative")
    if model.mode == SERIAL:
        value = Fraction(model.per_puc_mean_ms) * total_pucs
    else:
        value = Fraction(model.linear_intercept_ms) + 1000 * Fraction(model.linear_slope_k) * total_pucs
    return value if exact else float(value)


def sample_config_latency(model: LatencyModel, total_pucs: int, rng: random.Random) -> float:
    """Monte-Carlo variant: per-gate latencies drawn around the serial mean.

    Only meaningful in serial mode; the linear fit has no published spread.
    """
    if total_pucs < 0:
        raise ValueError("total_pucs must be nonnegative")
    if model.mode != SERIAL:
        return estimate_config_latency(model, total_pucs)
    return sum(max(0.0, rng.gauss(model.per_puc_mean_ms, model.per_puc_std_ms)) for _ in range(total_pucs))


# Measured rows: route length in PUCs -> (bitrate Gb/s, packet loss %).
DEFAULT_BITRATE_TABLE: tuple[tuple[int, float, float], ...] = (
    (9, 9.41, 0.0),
    (13, 9.41, 0.0),
    (17, 9.41, 0.0),
    (19, 3.08, 1.14),
    (21, 2.38, 2.84),
    (23, 0.0, 22.73),
    (25, 0.0, 81.25),
    (27, 0.0, 100.0),
)


@dataclass(frozen=True)
class BitratePredictor:
    table: tuple[tuple[int, float, float], ...] = field(default=DEFAULT_BITRATE_TABLE)

    def __post_init__(self) -> None:
        if not self.table:
            raise ValueError("bitrate table must not be empty")
        last_len = None
        last_rate = None
        last_loss = None
        for length, rate, loss in self.table:
            if last_len is not None and length <= last_len:
                raise ValueError("bitrate table lengths must be strictly increasing")
            if last_rate is not None and rate > last_rate:
                raise ValueError("bitrate must not increase with route length")
            if last_loss is not None and loss < last_loss:
                raise ValueError("packet loss must not decrease with route length")
            last_len, last_rate, last_loss = length, rate, loss


def predict_bitrate(predictor: BitratePredictor, route_length: int) -> tuple[float, float]:
    """Step lookup: the measured row with the largest length <= route_length.

    Lengths below the first measured row report the first row (no loss was
    observed anywhere under it).
    """
    if route_length < 1:
        raise ValueError("route_length must be at least 1")
    chosen = predictor.table[0]
    for row in predictor.table:
        if row[0] <= route_length:
            chosen = row
        else:
            break
    return (chosen[1], chosen[2])
