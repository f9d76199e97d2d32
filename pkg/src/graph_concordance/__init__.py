"""Graph concordance of outcomes on a single network, with permutation inference."""

from .errors import (
    AlignmentError,
    ClosedNeighborhoodError,
    CompleteGraphError,
    ConfigError,
    DegenerateTypeError,
    DegenerateVarianceError,
    EmptyGraphError,
    GraphConcordanceError,
    InferenceError,
    NoTypedEdgesError,
    ParseError,
    SelfLoopError,
)
from .graph import DegreeStats, Graph, build_graph, degree_stats, two_neighborhood
from .estimator import (
    ConcordanceEstimate,
    HomophilyEstimate,
    estimate_gc,
    estimate_gc_matrix,
    inbreeding_homophily,
    neighbor_averages,
    standardize,
)
from .variance import (
    VarianceEstimate,
    degree_class_means,
    estimate_variance,
    q_values,
    t_statistic,
    variance_estimate,
)
from .permutation import (
    DrawSet,
    InferenceResult,
    PermutationDraw,
    asymptotic_ci,
    confidence_interval,
    critical_value,
    permutation_inference,
    permutation_statistic,
    sample_permutations,
    test_positive_gc,
)
from .random_graphs import barabasi_albert, erdos_renyi
from .dgp import DgpConfig, generate_outcomes, true_gc_monte_carlo
from .simulation import GraphSpec, SimulationConfig, SimulationReport, run_coverage_experiment
from .dataio import Dataset, emit_report, load_dataset

__version__ = "0.1.0"
