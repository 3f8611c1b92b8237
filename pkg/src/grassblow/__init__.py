"""grassblow: exact-arithmetic construction and verification of the
torus-equivariant blow-ups of Grassmannians.

Everything is computed over the rationals with no floating point anywhere:
sparse integer polynomials carry the symbolic identities, exact rationals
carry the numeric evaluation, and every projective object has a canonical
integer form so that equality is structural.
"""

from .errors import (
    ChartDomainError,
    DegenerateOrbitError,
    DimensionError,
    DivisibilityError,
    GrassblowError,
    IdentityFalsifiedError,
    InternalInconsistencyError,
    InvalidGroupElementError,
    InvalidParameterError,
    MissingAssignmentError,
    PivotFailureError,
    RangeError,
    StratifiedOrbitError,
    UndefinedPointError,
)
from .exactpoly import (
    MultiPoly,
    Rational,
    Variable,
    exact_divide,
    poly_det,
    poly_var,
    rat,
    substitute,
    t_degree_split,
)
from .grassmann import (
    GrassPoint,
    Params,
    ProjPoint,
    chart_matrix_ul,
    enum_index_set,
    enum_stratum,
    gl_act,
    index_tuples,
    plucker,
    plucker_oracle,
    stratum_membership,
    stratum_projection,
    weight,
)
from .charts import (
    ChartIndex,
    MCCoords,
    MultiProjPoint,
    OrbitSignature,
    chart_transition,
    enum_chart_indices,
    gamma_tau,
    j_tau,
    j_tau_inverse,
    kausz_total_map,
    orbit_signature,
    retraction_chart,
    signature_admissible,
    special_indices,
)
from .torusflow import (
    BoundaryData,
    FlowCurve,
    bb_class,
    fixed_component,
    flow_curve,
    gm_act,
    limit,
    orbit_boundary_data,
    orbit_curve_degree,
    retraction_total,
    same_fiber,
)
from .kauszlm import (
    KauszChart,
    KauszCoords,
    determinantal_ideal_gens,
    diagram_check,
    fibration_eta,
    kausz_chart_coords,
    kausz_recursion,
    lm_map,
    reconstruct_projective,
)

__version__ = "0.1.0"
