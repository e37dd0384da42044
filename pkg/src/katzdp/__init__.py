"""Node-differentially-private synthetic graph publishing.

The pipeline computes a truncated Katz matrix with a sensitivity-capping
decay factor, privately estimates its top eigenpairs with a noisy Oja
iteration, and rebuilds a weighted graph from the resulting low-rank matrix.
"""

from .evaluation import CommunityPartition, F1Report, avg_f1, louvain, pair_f1
from .graph import Graph, adjacency_matrix, load_edge_list, max_degree, write_edge_list
from .katz import KatzParams, approx_katz, exact_katz, katz_error_bound, regulated_beta
from .oja import (
    EigenEstimate,
    OjaConfig,
    assemble_noisy_katz,
    default_schedule,
    gram_schmidt,
    private_eigenvalues,
    private_top_k,
)
from .pipeline import PipelineConfig, PipelineError, run_pipeline, run_sweep
from .privacy import (
    PrivacyLedger,
    PrivacyParams,
    add_gaussian_noise,
    compose,
    gaussian_sigma,
    split_budget,
)
from .recovery import RecoveryConfig, laplacian_to_graph, pseudo_inverse, recover_laplacian

__version__ = "0.1.0"
