"""Exact calculus on pure-odd supermanifolds R^{0|n}.

Grassmann algebra, Cartan calculus with Berezin integration, odd Riemannian
metrics, Hodge theory, and two field theories (electrodynamics and gravity)
solved as finite exact linear systems.
"""

from .algebra import (
    DimensionMismatch,
    DualElement,
    EvenMatrix,
    GrassmannElement,
    GrassmannError,
    NotInvertible,
    ParityError,
    UnsupportedBody,
    berezin_full,
    dual_unit,
    invert_even,
    left_derivative,
    matrix_det,
    matrix_inverse,
    pfaffian,
    sqrt_even,
    substitute,
    wedge,
)
from .cartan import (
    IntegralForm,
    NonNilpotentFlow,
    PseudoForm,
    Supermap,
    VectorField,
    berezin_pair,
    derham,
    euler,
    flow_pullback,
    form_wedge,
    inner_contract,
    lie_derivative,
    pullback,
    spatial_restrict_and_integrate,
)
from .riemann import (
    CovariantTwoTensor,
    InvalidMetric,
    KillingField,
    Metric,
    horizontal_lift,
    killing_bound,
    killing_solve,
    metric_validate,
    pullback_metric,
    vertical_lift,
)
from .hodge import (
    codifferential,
    codifferential_via_star,
    form_inner_product,
    hodge_star,
    hodge_star_back,
    laplace_beltrami,
    laplace_derham,
)
from .maxwell import (
    Current,
    MaxwellSolution,
    Potential,
    PreconditionViolated,
    conservation_residual,
    em_action,
    field_strength,
    gauge_transform,
    grassmann_charge,
    maxwell_solve,
    noether_charge,
    noether_current,
    stress_energy,
    stress_energy_explicit,
)
from .gravity import (
    Connection,
    CurvatureTensor,
    curvature,
    einstein_residual,
    hilbert_action,
    levi_civita,
    ricci_scalar,
    simplified_action,
    torsion,
    transform_connection,
)

__all__ = [
    "Connection",
    "CovariantTwoTensor",
    "Current",
    "CurvatureTensor",
    "DimensionMismatch",
    "DualElement",
    "EvenMatrix",
    "GrassmannElement",
    "GrassmannError",
    "IntegralForm",
    "InvalidMetric",
    "KillingField",
    "MaxwellSolution",
    "Metric",
    "NonNilpotentFlow",
    "NotInvertible",
    "ParityError",
    "Potential",
    "PreconditionViolated",
    "PseudoForm",
    "Supermap",
    "UnsupportedBody",
    "VectorField",
    "berezin_full",
    "berezin_pair",
    "codifferential",
    "codifferential_via_star",
    "conservation_residual",
    "curvature",
    "derham",
    "dual_unit",
    "einstein_residual",
    "em_action",
    "euler",
    "field_strength",
    "flow_pullback",
    "form_inner_product",
    "form_wedge",
    "gauge_transform",
    "grassmann_charge",
    "hilbert_action",
    "hodge_star",
    "hodge_star_back",
    "horizontal_lift",
    "inner_contract",
    "invert_even",
    "killing_bound",
    "killing_solve",
    "laplace_beltrami",
    "laplace_derham",
    "left_derivative",
    "levi_civita",
    "lie_derivative",
    "matrix_det",
    "matrix_inverse",
    "maxwell_solve",
    "metric_validate",
    "noether_charge",
    "noether_current",
    "pfaffian",
    "pullback",
    "pullback_metric",
    "ricci_scalar",
    "simplified_action",
    "spatial_restrict_and_integrate",
    "sqrt_even",
    "stress_energy",
    "stress_energy_explicit",
    "substitute",
    "torsion",
    "transform_connection",
    "vertical_lift",
    "wedge",
]

__version__ = "0.1.0"
