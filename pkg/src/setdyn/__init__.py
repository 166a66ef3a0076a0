"""Exact computations for set-valued dynamical systems on finite spaces."""

from .errors import (
    ConstructionError,
    InvalidArgumentError,
    PreconditionError,
    ResourceLimitError,
    SetDynError,
)
from .metric_relation import (
    MetricSpace,
    Relation,
    build_discrete_space,
    build_grid_space,
    constant_relation,
    discretize_single_valued,
    full_relation,
    identity_relation,
    invert,
    is_surjective,
    random_relation,
    relation_from_adjacency,
    tent_inverse_relation,
    tent_map,
)

__version__ = "0.1.0"
