"""Statistical prioritization of software-product-line testing.

Traces are drawn from a DTMC usage model, filtered through a featured
transition system, and each survivor is mapped to the products able to
execute it.
"""

from .errors import ModelError
from .expr import Expr, evaluate, parse_expr, to_string
from .features import (
    FeatureDiagram,
    boolean_form,
    enumerate_products,
    parse_feature_diagram,
    sat_products,
)
from .models import (
    FeaturedTransitionSystem,
    FiniteTrace,
    TransitionSystem,
    UsageModel,
    execute_trace,
    parse_fts,
    parse_usage_model,
    project,
    trace_probability,
    validate_triple,
)
from .selection import SelectionParams, TraceSet, dfs_select
from .family import accept, build_fts_prime, prioritize, products_for_trace
from .derivation import generate_tests, prune_usage_model

__all__ = [
    "ModelError", "Expr", "evaluate", "parse_expr", "to_string",
    "FeatureDiagram", "boolean_form", "enumerate_products", "parse_feature_diagram", "sat_products",
    "FeaturedTransitionSystem", "FiniteTrace", "TransitionSystem", "UsageModel",
    "execute_trace", "parse_fts", "parse_usage_model", "project", "trace_probability", "validate_triple",
    "SelectionParams", "TraceSet", "dfs_select",
    "accept", "build_fts_prime", "prioritize", "products_for_trace",
    "generate_tests", "prune_usage_model",
]
