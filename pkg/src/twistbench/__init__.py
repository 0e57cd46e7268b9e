"""Numerical workbench for spacelike graphs in twisted product spacetimes.

The pieces, bottom up: periodic torus fibers with finite-difference calculus
(``fiber_grid``), closed-form twisted models over them (``spacetime``), the
geometry of spacelike graphs with dual computational paths (``graphs``),
conformal rescaling identities (``conformal``), a prescribed-mean-curvature
Newton-Krylov solver with non-existence certificates (``solver``), and the
identity/convergence verification suites (``verify``).  The ``twistbench``
command line drives all of it from JSON experiment configs.
"""

from .errors import ConfigError, DomainError, SpacelikeError
from .fiber_grid import FiberGrid
from .profiles import TimeProfile, TrigPolynomial
from .spacetime import (
    ExpansionClass,
    SpacetimeModel,
    TwistedFunction,
    classify,
    is_grw,
    slice_mean_curvature,
    slice_umbilicity,
    torqued_one_form,
)
from .graphs import (
    GeometryReport,
    GraphField,
    area,
    area_gradient_check,
    coordinate_laplacian,
    geometry_report,
    grad_tau,
    hyperbolic_angle,
    induced_metric,
    laplacian_tau_coordinate,
    laplacian_tau_fiber,
    mean_curvature,
    mean_curvature_from_laplacian,
    rho_field,
    slice_condition_report,
    spacelike_check,
    spacelike_margin,
    unit_normal,
    warped_obstruction,
)
from .conformal import (
    ConformalFactor,
    conformal_laplacian_check,
    maximal_power_check,
    slice_shape_transform,
    static_laplacian_check,
    transform_mean_curvature,
)
from .initializers import (
    constant_graph,
    corpus_graphs,
    default_fiber,
    default_model,
    random_trig_graph,
    resolve_initializer,
)
from .solver import (
    RigidityReport,
    SolveConfig,
    SolveOutcome,
    certificate_check,
    residual_field,
    rigidity_report,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "SpacelikeError",
    "FiberGrid",
    "TimeProfile",
    "TrigPolynomial",
    "ExpansionClass",
    "SpacetimeModel",
    "TwistedFunction",
    "classify",
    "is_grw",
    "slice_mean_curvature",
    "slice_umbilicity",
    "torqued_one_form",
    "GeometryReport",
    "GraphField",
    "area",
    "area_gradient_check",
    "coordinate_laplacian",
    "geometry_report",
    "grad_tau",
    "hyperbolic_angle",
    "induced_metric",
    "laplacian_tau_coordinate",
    "laplacian_tau_fiber",
    "mean_curvature",
    "mean_curvature_from_laplacian",
    "rho_field",
    "slice_condition_report",
    "spacelike_check",
    "spacelike_margin",
    "unit_normal",
    "warped_obstruction",
    "ConformalFactor",
    "conformal_laplacian_check",
    "maximal_power_check",
    "slice_shape_transform",
    "static_laplacian_check",
    "transform_mean_curvature",
    "constant_graph",
    "corpus_graphs",
    "default_fiber",
    "default_model",
    "random_trig_graph",
    "resolve_initializer",
    "RigidityReport",
    "SolveConfig",
    "SolveOutcome",
    "certificate_check",
    "residual_field",
    "rigidity_report",
    "solve",
]
