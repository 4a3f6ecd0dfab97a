"""The six pairwise metrics and distance-matrix assembly.

Three classical baselines (Pearson correlation, Euclidean distance between
L1-rescaled curves, classical fidelity) and three simulated quantum state
fidelities:

  - ang:     L1-rescale to angles, one qubit per stimulus, destructive swap
             test over 2n wires, parity estimator;
  - amp:     makima-resample to a power of two, L2-normalize, amplitude
             preparation, doubled compute-uncompute with Hadamard layers,
             all-zeros probability;
  - amp_qft: same with a QFT appended to each load.

Quantum metrics run either analytically (exact probabilities off the
statevector) or with seeded finite-shot sampling.  Matrices are computed for
pairs a < b only and mirrored; the diagonal is 0 for dissimilarity metrics
and NaN ("not evaluated") for similarity metrics, and is excluded from all
downstream statistics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import circuits, curveprep, statevec
from .errors import DataFormatError, NonFiniteMetricError
from .rng import hash_fields, random_uniform

METRIC_NAMES = (
    "correlation",
    "euclidean",
    "classical_fidelity",
    "ang",
    "amp",
    "amp_qft",
)
DISSIMILARITY_METRICS = frozenset({"euclidean"})
QUANTUM_METRICS = frozenset({"ang", "amp", "amp_qft"})


def natural_orientation(name: str) -> str:
    """Similarity for the correlation/fidelity family, dissimilarity for euclidean."""
    return "dissimilarity" if name in DISSIMILARITY_METRICS else "similarity"


@dataclass(frozen=True)
class MetricSpec:
    """Which metric to run and how (mode/shots/seed matter only for quantum).

    orientation defaults to the metric's natural one; to_canonical_distance
    re-tags matrices as dissimilarity after the 1 - s map.
    """

    name: str
    mode: str = "analytic"  # "analytic" | "shots"
    shots: int = 1000
    seed: int = 0
    orientation: str = ""

    def __post_init__(self):
        if self.name not in METRIC_NAMES:
            raise ValueError(f"unknown metric {self.name!r}")
        if self.mode not in ("analytic", "shots"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.orientation == "":
            object.__setattr__(self, "orientation", natural_orientation(self.name))
        elif self.orientation not in ("similarity", "dissimilarity"):
            raise ValueError(f"unknown orientation {self.orientation!r}")


@dataclass
class DistanceMatrix:
    """Symmetric matrix of one metric's pairwise values over named neurons."""

    metric: MetricSpec
    neuron_ids: list[str]
    values: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.neuron_ids)

    def condensed(self) -> np.ndarray:
        """Upper-triangle entries (i < j, row-major), diagonal excluded."""
        iu = np.triu_indices(self.size, k=1)
        return self.values[iu]


def pearson(a, b) -> float:
    """Sample Pearson correlation of two equal-length vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size != b.size or a.size < 2:
        raise ValueError("need two equal-length vectors of length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    # np.dot throughout so that pearson(a, a) is exactly 1.0
    denom = np.sqrt(np.dot(da, da) * np.dot(db, db))
    if denom == 0.0:
        raise NonFiniteMetricError("zero-variance input to Pearson correlation")
    return float(np.dot(da, db) / denom)


def euclidean_rescaled(a: curveprep.TuningCurve, b: curveprep.TuningCurve) -> float:
    """Euclidean distance between the L1-normalized curves.

    The pi factor used for angle embedding would scale every distance by the
    same constant, so it is omitted: ranks, Mantel statistics and network
    topologies are unchanged.
    """
    la = float(np.sum(np.abs(a.responses)))
    lb = float(np.sum(np.abs(b.responses)))
    if la == 0.0 or lb == 0.0:
        raise NonFiniteMetricError("all-zero curve has no L1 rescaling")
    return float(np.linalg.norm(a.responses / la - b.responses / lb))


def classical_fidelity(a: curveprep.TuningCurve, b: curveprep.TuningCurve) -> float:
    """Bhattacharyya-style fidelity (sum_i sqrt(p_i q_i))^2 of the curves.

    Responses can be negative; they are clamped at zero before L1
    normalization so each curve reads as a distribution of response mass.
    """
    p = np.clip(a.responses, 0.0, None)
    q = np.clip(b.responses, 0.0, None)
    sp, sq = p.sum(), q.sum()
    if sp == 0.0 or sq == 0.0:
        raise NonFiniteMetricError("curve has no positive response mass")
    return float(np.sum(np.sqrt(p / sp) * np.sqrt(q / sq)) ** 2)


@lru_cache(maxsize=8)
def _parity_signs(n: int) -> np.ndarray:
    """(-1)^(s.t) for every 2n-bit outcome; s = low register, t = high."""
    k = np.arange(1 << (2 * n), dtype=np.uint64)
    overlap = (k & np.uint64((1 << n) - 1)) & (k >> np.uint64(n))
    parity = np.bitwise_count(overlap) & np.uint64(1)
    return 1.0 - 2.0 * parity.astype(float)


def quantum_fidelity_swaptest(
    a: curveprep.PreparedCurve,
    b: curveprep.PreparedCurve,
    mode: str = "analytic",
    shots: int = 1000,
    seed: int = 0,
) -> float:
    """Swap-test fidelity of two angle-embedded curves.

    Analytic mode takes the exact expectation of the parity estimator; shots
    mode samples full 2n-bit outcomes and averages the per-shot parity sign,
    keeping negative estimates (clipping would bias downstream ranks).
    """
    if a.kind != "angle_vector" or b.kind != "angle_vector":
        raise ValueError("swap test expects angle_vector prepared curves")
    if a.values.size != b.values.size:
        raise ValueError("angle vectors must have equal length")
    n = a.values.size
    circuit = circuits.build_swap_test(
        circuits.build_angle_prep(a.values), circuits.build_angle_prep(b.values)
    )
    state = statevec.simulate(circuit)
    signs = _parity_signs(n)
    if mode == "analytic":
        return float(np.dot(statevec.probabilities(state), signs))
    p = statevec.probabilities(state)
    cdf = np.cumsum(p)
    cdf[-1] = max(cdf[-1], 1.0)
    idx = np.searchsorted(cdf, random_uniform(seed, shots), side="right")
    return float(signs[idx].mean())


def quantum_fidelity_compute_uncompute(
    a: curveprep.PreparedCurve,
    b: curveprep.PreparedCurve,
    qft: bool = False,
    mode: str = "analytic",
    shots: int = 1000,
    seed: int = 0,
    repetitions: int = 2,
    hadamard_layers: bool = True,
) -> float:
    """All-zeros probability of the compute-uncompute circuit for a, b."""
    if a.kind != "amplitude_vector" or b.kind != "amplitude_vector":
        raise ValueError("compute-uncompute expects amplitude_vector prepared curves")
    if a.values.size != b.values.size:
        raise ValueError("amplitude vectors must have equal length")
    circuit = circuits.build_compute_uncompute(
        circuits.build_mottonen_real_prep(a.values),
        circuits.build_mottonen_real_prep(b.values),
        repetitions=repetitions,
        hadamard_layers=hadamard_layers,
        qft_mode="on_load" if qft else "none",
    )
    state = statevec.simulate(circuit)
    p_zero = float(abs(state.amplitudes[0]) ** 2)
    if mode == "analytic":
        return p_zero
    counts = statevec.sample_counts(state, shots, seed)
    return counts.get("0" * circuit.num_wires, 0) / shots


def _prepare_all(curves, name: str):
    """Per-neuron preparation shared across pairs (rescaling/resampling)."""
    if name == "ang":
        return [curveprep.rescale_l1_pi(c) for c in curves]
    if name in ("amp", "amp_qft"):
        target = curveprep.next_power_of_two(curves[0].responses.size)
        return [
            curveprep.normalize_l2(curveprep.resample_makima(c, target))
            for c in curves
        ]
    return None


def _evaluate_pair(curves, prepared, spec: MetricSpec, i: int, j: int) -> float:
    name = spec.name
    if name == "correlation":
        return pearson(curves[i].responses, curves[j].responses)
    if name == "euclidean":
        return euclidean_rescaled(curves[i], curves[j])
    if name == "classical_fidelity":
        return classical_fidelity(curves[i], curves[j])
    pair_seed = hash_fields(spec.seed, name, i, j)
    if name == "ang":
        return quantum_fidelity_swaptest(
            prepared[i], prepared[j], spec.mode, spec.shots, pair_seed
        )
    return quantum_fidelity_compute_uncompute(
        prepared[i],
        prepared[j],
        qft=(name == "amp_qft"),
        mode=spec.mode,
        shots=spec.shots,
        seed=pair_seed,
    )


def build_distance_matrix(
    curves, spec: MetricSpec, executor=None
) -> DistanceMatrix:
    """Evaluate one metric over every pair a < b and mirror the matrix.

    Each pair gets its own seed derived from (spec.seed, metric, a, b), so
    any entry can be recomputed in isolation.  An executor with a map method
    (e.g. ThreadPoolExecutor) parallelizes pair evaluation; results are
    assembled in pair order, so output does not depend on scheduling.
    """
    if spec.orientation != natural_orientation(spec.name):
        raise ValueError(
            f"metric {spec.name} is evaluated with its natural "
            f"{natural_orientation(spec.name)} orientation"
        )
    curves = list(curves)
    n = len(curves)
    if n < 2:
        raise ValueError("need at least two curves")
    lengths = {c.responses.size for c in curves}
    if len(lengths) != 1:
        raise ValueError(f"curves have mixed response lengths: {sorted(lengths)}")
    prepared = _prepare_all(curves, spec.name)

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def run(pair):
        i, j = pair
        try:
            return _evaluate_pair(curves, prepared, spec, i, j)
        except (NonFiniteMetricError, ValueError) as exc:
            raise type(exc)(
                f"metric {spec.name} failed on pair ({i}, {j}) "
                f"[{curves[i].neuron_id}, {curves[j].neuron_id}]: {exc}"
            ) from exc

    mapper = executor.map if executor is not None else map
    results = list(mapper(run, pairs))

    values = np.zeros((n, n))
    if spec.orientation == "similarity":
        np.fill_diagonal(values, np.nan)
    for (i, j), v in zip(pairs, results):
        values[i, j] = v
        values[j, i] = v
    return DistanceMatrix(spec, [c.neuron_id for c in curves], values)


def to_canonical_distance(m: DistanceMatrix) -> DistanceMatrix:
    """Map similarities to distances d = 1 - s; dissimilarities pass through.

    The canonical form always has a zero diagonal, so MST and thresholding
    treat every metric uniformly (smallest distance = strongest connection).
    """
    if m.metric.orientation == "dissimilarity":
        return m
    values = 1.0 - m.values
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(
        replace(m.metric, orientation="dissimilarity"), m.neuron_ids, values
    )


def matrix_to_csv(m: DistanceMatrix) -> str:
    """Header of neuron ids, then n rows of n repr()-precision floats."""
    lines = [",".join(m.neuron_ids)]
    for row in m.values:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str, metric: MetricSpec | None = None) -> DistanceMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataFormatError("empty distance-matrix CSV")
    ids = [c.strip() for c in lines[0].split(",")]
    n = len(ids)
    if len(lines) != n + 1:
        raise DataFormatError(f"expected {n} rows after header, got {len(lines) - 1}")
    values = np.empty((n, n))
    for r, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != n:
            raise DataFormatError(f"line {r}: expected {n} values, got {len(cells)}")
        try:
            values[r - 2] = [float(c) for c in cells]
        except ValueError as exc:
            raise DataFormatError(f"line {r}: {exc}") from exc
    if metric is None:
        metric = MetricSpec("euclidean")
    return DistanceMatrix(metric, ids, values)


def matrix_to_json(m: DistanceMatrix) -> str:
    doc = {
        "metric": {
            "name": m.metric.name,
            "orientation": m.metric.orientation,
            "mode": m.metric.mode,
            "shots": m.metric.shots,
            "seed": m.metric.seed,
        },
        "neuron_ids": m.neuron_ids,
        "values": [[None if np.isnan(v) else float(v) for v in row] for row in m.values],
    }
    return json.dumps(doc, indent=2) + "\n"


def matrix_from_json(text: str) -> DistanceMatrix:
    doc = json.loads(text)
    meta = doc["metric"]
    spec = MetricSpec(
        meta["name"], meta["mode"], meta["shots"], meta["seed"], meta["orientation"]
    )
    values = np.array(
        [[np.nan if v is None else v for v in row] for row in doc["values"]],
        dtype=float,
    )
    return DistanceMatrix(spec, list(doc["neuron_ids"]), values)
