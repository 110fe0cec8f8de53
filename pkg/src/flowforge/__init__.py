"""Large-support group-valued flows on multigraphs."""

__version__ = "0.1.0"

from .flows import (  # noqa: E402
    Z2,
    Z2Z2,
    Z2Z3,
    Z3,
    Z3Z3,
    EdgeLabelling,
    FlowCertificate,
    GroupSpec,
    WeightedGraph,
    boundary,
    is_flow_with_boundary,
    lift_modular_to_integer,
)
from .graph import MultiGraph, Orientation  # noqa: E402
from .kernels import BACKEND  # noqa: E402
from .solver import h_ratio, max_support_flow  # noqa: E402

__all__ = [
    "BACKEND",
    "EdgeLabelling",
    "FlowCertificate",
    "GroupSpec",
    "MultiGraph",
    "Orientation",
    "WeightedGraph",
    "Z2",
    "Z2Z2",
    "Z2Z3",
    "Z3",
    "Z3Z3",
    "boundary",
    "h_ratio",
    "is_flow_with_boundary",
    "lift_modular_to_integer",
    "max_support_flow",
]
