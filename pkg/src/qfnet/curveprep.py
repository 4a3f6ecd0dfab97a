"""Tuning-curve preprocessing for the two embeddings.

Angle embedding wants each curve rescaled to L1 norm pi; amplitude embedding
wants the curve resampled to a power-of-two length (modified Akima, endpoints
preserved) and L2-normalized.  Resampling treats the sample indices
0..s-1 as the knot abscissae; stimulus labels ride along as metadata only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TuningCurve:
    """One neuron's stimulus-response vector plus its 3D position (um)."""

    neuron_id: str
    position: tuple[float, float, float]
    responses: np.ndarray
    stimulus_labels: np.ndarray | None = None

    def __post_init__(self):
        responses = np.asarray(self.responses, dtype=float)
        object.__setattr__(self, "responses", responses)
        if responses.ndim != 1 or responses.size < 2:
            raise ValueError(
                f"neuron {self.neuron_id}: need a 1D response vector of length >= 2"
            )
        if not np.all(np.isfinite(responses)):
            raise ValueError(f"neuron {self.neuron_id}: non-finite responses")
        if self.stimulus_labels is not None:
            labels = np.asarray(self.stimulus_labels, dtype=float)
            object.__setattr__(self, "stimulus_labels", labels)
            if labels.shape != responses.shape:
                raise ValueError(
                    f"neuron {self.neuron_id}: stimulus label length mismatch"
                )
            if np.any(np.diff(labels) <= 0):
                raise ValueError(
                    f"neuron {self.neuron_id}: stimulus labels must be strictly increasing"
                )


@dataclass(frozen=True)
class PreparedCurve:
    """Embedding-ready vector: RX angles, or unit-norm amplitudes."""

    kind: str  # "angle_vector" | "amplitude_vector"
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("angle_vector", "amplitude_vector"):
            raise ValueError(f"unknown prepared-curve kind {self.kind!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


def rescale_l1_pi(curve: TuningCurve) -> PreparedCurve:
    """Divide by the L1 norm and scale by pi; one angle per stimulus."""
    l1 = float(np.sum(np.abs(curve.responses)))
    if l1 == 0.0:
        raise ValueError(f"neuron {curve.neuron_id}: all-zero curve has no L1 scale")
    return PreparedCurve("angle_vector", np.pi * curve.responses / l1)


def next_power_of_two(s: int) -> int:
    """Smallest power of two >= s."""
    if s < 1:
        raise ValueError(f"need s >= 1, got {s}")
    return 1 << (s - 1).bit_length()


def _makima_slopes(y: np.ndarray) -> np.ndarray:
    """Node slopes of the modified Akima interpolant on unit-spaced knots.

    delta[i] is the secant slope on interval [i, i+1]; two extra secants are
    extrapolated on each side via d0 = 2*d1 - d2.  The slope at node i is the
    weighted mean (w1*delta[i-1] + w2*delta[i]) / (w1 + w2) with
        w1 = |delta[i+1] - delta[i]|   + |delta[i+1] + delta[i]| / 2
        w2 = |delta[i-1] - delta[i-2]| + |delta[i-1] + delta[i-2]| / 2
    and 0 whenever w1 + w2 vanishes (flat data stays flat).
    """
    delta = np.diff(y)
    left2 = 2 * delta[0] - delta[1]
    left1 = 2 * left2 - delta[0]
    right2 = 2 * delta[-1] - delta[-2]
    right1 = 2 * right2 - delta[-1]
    d = np.concatenate(([left1, left2], delta, [right2, right1]))
    # node i sees d[i+2] = delta_i; indices below are into the padded array
    dm2, dm1 = d[:-3], d[1:-2]
    d0, dp1 = d[2:-1], d[3:]
    w1 = np.abs(dp1 - d0) + np.abs(dp1 + d0) / 2
    w2 = np.abs(dm1 - dm2) + np.abs(dm1 + dm2) / 2
    denom = w1 + w2
    slopes = np.zeros(len(y))
    nz = denom > 0
    slopes[nz] = (w1[nz] * dm1[nz] + w2[nz] * d0[nz]) / denom[nz]
    return slopes


def resample_makima(curve: TuningCurve, target_len: int) -> np.ndarray:
    """Resample onto target_len points spanning the full index range.

    Knots sit at 0..s-1; queries are linspace(0, s-1, target_len), so both
    endpoints are reproduced exactly.  Evaluation is cubic Hermite per
    interval with modified-Akima slopes; queries that land exactly on a knot
    return the knot value bit-for-bit.
    """
    y = curve.responses
    s = y.size
    if s < 4:
        raise ValueError(f"neuron {curve.neuron_id}: need >= 4 points to resample")
    if target_len < 2:
        raise ValueError(f"target_len must be >= 2, got {target_len}")
    slopes = _makima_slopes(y)
    x = np.linspace(0.0, s - 1.0, target_len)
    idx = np.minimum(x.astype(int), s - 2)
    u = x - idx
    y0, y1 = y[idx], y[idx + 1]
    s0, s1 = slopes[idx], slopes[idx + 1]
    d = y1 - y0
    out = y0 + u * (s0 + u * ((3 * d - 2 * s0 - s1) + u * (s0 + s1 - 2 * d)))
    on_knot = u == 0.0
    out[on_knot] = y0[on_knot]
    out[x == s - 1.0] = y[-1]
    return out


def normalize_l2(values) -> PreparedCurve:
    """L2-normalize a power-of-two-length vector into embedding amplitudes."""
    v = np.asarray(values, dtype=float)
    if v.size < 2 or v.size & (v.size - 1):
        raise ValueError(f"length must be a power of two >= 2, got {v.size}")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("cannot L2-normalize a zero vector")
    return PreparedCurve("amplitude_vector", v / norm)
