"""circgeo: circulant 4D Riemannian metrics, their curvature, and checks."""

from .core import (
    AdmissibilityError,
    BasisAngles,
    Box,
    InverseMetricAtPoint,
    ManifoldSpec,
    MetricAtPoint,
    OutsideDomainError,
    Q,
    QBasisError,
    SingularMetricError,
    SolverError,
    ZeroVectorError,
    admissibility,
    basis_angles,
    circulant_matrix,
    cos_angle,
    find_orthogonal_q_basis,
    induces_q_basis,
    inner,
    inverse_metric,
    load_spec,
    metric_at,
    q_apply,
)
from .expr import (
    DomainError,
    FieldJet,
    ParseError,
    ScalarField,
    as_point,
    eval_jet,
    parse,
    unparse,
)
from .tensor import (
    ChristoffelAtPoint,
    DegeneratePlaneError,
    NablaQ,
    RiemannAtPoint,
    christoffel_at,
    christoffel_from_metric,
    metric_compatibility_residual,
    nabla_q,
    riemann_at,
    riemann_from_christoffel,
    sectional_curvature,
)
from .verify import (
    CheckReport,
    QBasisCoefficients,
    check_curvature_q_identity,
    check_integrability,
    check_isometry,
    check_mu_law,
    check_parallel_condition,
    check_parallel_equivalence,
    check_sectional_relations,
    coeff_angles,
    run_suite,
)

__version__ = "0.1.0"
