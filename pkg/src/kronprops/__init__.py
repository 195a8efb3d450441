"""Stochastic Kronecker graphs with a 2x2 initiator.

Closed-form expected feature counts and bounds, exact zero-count
probabilities, two exact samplers and Monte Carlo cross-checks.
"""

from .analytic import (
    Feature,
    FeaturePrediction,
    IsolatedBoundForm,
    Kind,
    RegimeReport,
    expected_degree,
    expected_edges_exact,
    expected_edges_paper,
    expected_isolated_exact,
    expected_self_loops,
    expected_total_degree,
    expected_triangles_exact,
    expected_two_walks_from,
    isolated_upper_bound,
    prob_no_edges_exact,
    prob_no_loops_exact,
    regime_report,
    triangle_upper_bound,
    two_walk_total,
)
from .edgelist import format_edgelist, parse_edgelist, read_edgelist, write_edgelist
from .experiments import (
    MonteCarloReport,
    SweepReport,
    SweepSpec,
    emit_report,
    run_monte_carlo,
    run_sweep,
)
from .model import (
    InitiatorMatrix,
    ModelParams,
    PairSignature,
    VertexLabel,
    edge_probability,
    pair_signature,
    signature_count,
    signature_probability,
    validate_initiator,
)
from .sampler import (
    FeatureCounts,
    GraphSample,
    count_features,
    count_triangles,
    sample,
    sample_dense,
    sample_stratified,
)

__version__ = "0.1.0"
