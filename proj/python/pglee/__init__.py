"""Python access to the event schema induction core."""

from ._core import (
    PgleeError,
    build_prompt,
    generate_rule_based,
    membership_prob,
    minibatch_kmeans,
    normalize_attention,
    parse_candidates,
    run,
    serialize_candidates,
    silhouette,
    sweep_k,
    tokenize,
)

__all__ = [
    "PgleeError",
    "build_prompt",
    "generate_rule_based",
    "membership_prob",
    "minibatch_kmeans",
    "normalize_attention",
    "parse_candidates",
    "run",
    "serialize_candidates",
    "silhouette",
    "sweep_k",
    "tokenize",
]
