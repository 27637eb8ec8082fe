"""Python access to the derivd core: KB generation, depth, metrics, calculators and experiments."""

from ._core import (
    KnowledgeBase,
    __version__,
    atomic_decomposition,
    calc,
    critical_frequency,
    derivation_entropy,
    forward_closure,
    generate_kb,
    landauer_energy,
    logical_depth,
    mean_candidate_depth,
    multi_query_costs,
    run_experiment,
    shannon_entropy,
    simulate,
    zipf_weights,
)

__all__ = [
    "KnowledgeBase",
    "__version__",
    "atomic_decomposition",
    "calc",
    "critical_frequency",
    "derivation_entropy",
    "forward_closure",
    "generate_kb",
    "landauer_energy",
    "logical_depth",
    "mean_candidate_depth",
    "multi_query_costs",
    "run_experiment",
    "shannon_entropy",
    "simulate",
    "zipf_weights",
]
