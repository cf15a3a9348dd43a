"""Knowledge-image evaluation: graph fidelity, readability and MMMG-Score."""

from ._core import (
    KgevalError,
    KnowledgeGraph,
    canonical_dependency,
    categorize_errors,
    evaluate_replay,
    exact_ged,
    fidelity,
    grounded_subgraph,
    load_kg,
    mmmg_score,
    normalize_label,
    normalized_ged,
    parse_eval_response,
    parse_kg_json,
    pearson,
    readability,
    readability_score,
    render_eval_prompt,
)

__all__ = [
    "KgevalError",
    "KnowledgeGraph",
    "canonical_dependency",
    "categorize_errors",
    "evaluate_replay",
    "exact_ged",
    "fidelity",
    "grounded_subgraph",
    "load_kg",
    "mmmg_score",
    "normalize_label",
    "normalized_ged",
    "parse_eval_response",
    "parse_kg_json",
    "pearson",
    "readability",
    "readability_score",
    "render_eval_prompt",
]
