"""Consensus of Bayesian-network DAGs via min-cut guided backward pruning.

The library fuses a batch of DAGs over one variable set into an unrestricted
union, then greedily deletes the edges whose endpoints are cheapest to
separate in the inputs, tracked exactly with rational arithmetic.  See the
README for the pipeline walkthrough and the CLI.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .consensus import (
    Candidate,
    Config,
    CriticalityResult,
    PruneStep,
    RunResult,
    ThetaSelection,
    Trajectory,
    as_theta,
    best_edge,
    criticality,
    graph_at_theta,
    prefix_state,
    prefix_states,
    remove_cut_edges,
    run,
    scan_candidates,
    select_theta,
)
from .equivalence import (
    DeleteChoice,
    Pdag,
    apply_delete,
    dag_to_cpdag,
    na_set,
    pdag_to_dag,
)
from .errors import (
    CycleError,
    InputError,
    OperatorError,
    StateError,
    StructuralError,
)
from .fusion import FusionInput, FusionResult, fuse, heuristic_ordering, minimal_imap
from .graphs import (
    Dag,
    NodeSet,
    Ordering,
    UGraph,
    ancestral_subgraph,
    d_separated,
    moralize,
    topological_sort,
)
from .maxflow import CutResult, min_cut
from .metrics import MetricsReport, compare, mean_smhd, smhd, treewidth_upper
from .synthetic import GenConstraints, node_labels, perturb, random_dag

__all__ = [
    "__version__",
    "Candidate",
    "Config",
    "CriticalityResult",
    "CutResult",
    "CycleError",
    "Dag",
    "DeleteChoice",
    "FusionInput",
    "FusionResult",
    "GenConstraints",
    "InputError",
    "MetricsReport",
    "NodeSet",
    "OperatorError",
    "Ordering",
    "Pdag",
    "PruneStep",
    "RunResult",
    "StateError",
    "StructuralError",
    "ThetaSelection",
    "Trajectory",
    "UGraph",
    "ancestral_subgraph",
    "apply_delete",
    "as_theta",
    "best_edge",
    "compare",
    "criticality",
    "d_separated",
    "dag_to_cpdag",
    "fuse",
    "graph_at_theta",
    "heuristic_ordering",
    "mean_smhd",
    "min_cut",
    "minimal_imap",
    "moralize",
    "na_set",
    "node_labels",
    "pdag_to_dag",
    "perturb",
    "prefix_state",
    "prefix_states",
    "random_dag",
    "remove_cut_edges",
    "run",
    "scan_candidates",
    "select_theta",
    "smhd",
    "topological_sort",
    "treewidth_upper",
]
