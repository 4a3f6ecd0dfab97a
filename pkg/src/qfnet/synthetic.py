"""Seeded synthetic tuning-curve generation for desk-scale runs.

Each neuron gets a Gaussian tuning bump with a random peak position plus
additive noise, and a uniform random 3D position inside a box.  Generation
is a pure function of the spec (all randomness through splitmix64 streams),
and every curve is guaranteed at least one positive response so all six
metrics are well-defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curveprep import TuningCurve
from .rng import hash_fields, random_uniform


@dataclass(frozen=True)
class SyntheticSpec:
    neurons: int = 76
    stimuli: int = 9
    sigma: float = 1.2  # tuning width in stimulus-index units
    noise: float = 0.05  # additive noise scale
    amplitude: float = 1.0  # bump height
    box: tuple[float, float, float] = (400.0, 400.0, 80.0)  # volume extents (um)
    seed: int = 0

    def __post_init__(self):
        if self.neurons < 2:
            raise ValueError("need at least two neurons")
        if self.stimuli < 2:
            raise ValueError("need at least two stimuli")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.noise < 0:
            raise ValueError("noise scale must be nonnegative")


def generate_synthetic(spec: SyntheticSpec) -> list[TuningCurve]:
    """Deterministic synthetic curves: Gaussian bumps + noise + 3D positions."""
    s = spec.stimuli
    k = np.arange(s, dtype=float)
    curves = []
    for i in range(spec.neurons):
        pos_u = random_uniform(hash_fields(spec.seed, "position", i), 3)
        position = tuple(float(u * extent) for u, extent in zip(pos_u, spec.box))
        mu = random_uniform(hash_fields(spec.seed, "peak", i), 1)[0] * (s - 1)
        bump = spec.amplitude * np.exp(-((k - mu) ** 2) / (2.0 * spec.sigma**2))
        # redraw noise until some response is positive (noise >> amplitude only)
        for attempt in range(64):
            u = random_uniform(hash_fields(spec.seed, "noise", i, attempt), s)
            responses = bump + spec.noise * (2.0 * u - 1.0)
            if np.max(responses) > 0.0:
                break
        else:
            responses = bump  # noiseless bump is always positive
        curves.append(TuningCurve(f"n{i:03d}", position, responses))
    return curves


def curves_to_csv(curves) -> str:
    """Serialize curves in the ingestion CSV format (repr-precision floats)."""
    curves = list(curves)
    s = curves[0].responses.size
    header = "neuron_id,x,y,z," + ",".join(f"r{i}" for i in range(s))
    lines = [header]
    for c in curves:
        cells = [c.neuron_id] + [repr(float(v)) for v in c.position]
        cells += [repr(float(v)) for v in c.responses]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
