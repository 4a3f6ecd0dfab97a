"""qfnet: functional neural networks from tuning curves via simulated
quantum state fidelity, with classical baselines, Mantel statistics, and
graph/heatmap exports."""

__version__ = "0.1.0"

from .circuits import (  # noqa: F401
    Circuit,
    GateCensus,
    build_angle_prep,
    build_compute_uncompute,
    build_mottonen_real_prep,
    build_qft,
    build_swap_test,
    count_gates,
    invert,
)
from .curveprep import (  # noqa: F401
    PreparedCurve,
    TuningCurve,
    next_power_of_two,
    normalize_l2,
    resample_makima,
    rescale_l1_pi,
)
from .metrics import (  # noqa: F401
    DistanceMatrix,
    MetricSpec,
    build_distance_matrix,
    classical_fidelity,
    euclidean_rescaled,
    pearson,
    quantum_fidelity_compute_uncompute,
    quantum_fidelity_swaptest,
    to_canonical_distance,
)
from .netgraph import FunctionalNetwork, mst, top_percent_network  # noqa: F401
from .statevec import (  # noqa: F401
    Gate,
    StateVector,
    apply_gate,
    circuit_unitary,
    inner_product,
    new_zero_state,
    probabilities,
    sample_counts,
    simulate,
)
from .stats import MantelResult, mantel, spearman  # noqa: F401
from .synthetic import SyntheticSpec, generate_synthetic  # noqa: F401
from .transpile import (  # noqa: F401
    LoweredCircuit,
    equivalence_up_to_phase,
    insert_ddd_xyxy,
    lower,
)
