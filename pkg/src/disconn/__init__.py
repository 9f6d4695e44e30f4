"""Discrete connections on principal circle bundles, with a verification harness."""

__version__ = "0.1.0"

from .algebra import (  # noqa: F401
    CIRCLE_IDENTITY,
    CircleElement,
    Q_I,
    Q_J,
    Q_K,
    Q_ONE,
    Quaternion,
    UnitQuaternion,
    canonical_angle,
    circle_distance,
    circle_inv,
    circle_mul,
    quat_conj,
    quat_mul,
    quat_project,
)
from .bundle import (  # noqa: F401
    FiberPair,
    HopfBundle,
    PrincipalBundle,
    TrivialBundle,
    TrivialPoint,
)
from .connection import (  # noqa: F401
    C_FAMILIES,
    Decomposition,
    DiscreteConnectionForm,
    DiscreteHorizontalLift,
    ReducedPair,
    SliceProbeReport,
    decompose_pair,
    form_from_lift,
    is_horizontal,
    lift_from_form,
    make_c_function,
    reconstruct_pair,
    reduce_pair,
    slice_probe,
    tangent_split_check,
    trivial_form_from_C,
    trivial_lift_from_C,
)
from .errors import (  # noqa: F401
    AntipodalPoints,
    DisconnError,
    EmptyDomainIntersection,
    InvalidC,
    NotSameFiber,
    OutOfDomain,
    OutOfRange,
    ProbeFailed,
    SectionUndefined,
    SolveFailed,
)
from .riemannian import (  # noqa: F401
    ConnectionSplit,
    GeodesicSegment,
    LiftResult,
    TangentVector,
    base_geodesic,
    beta_formula,
    continuous_connection_form,
    hopf_closed_form,
    horizontal_lift_path,
    infinitesimal_generator,
    lmw_form,
    riemannian_form,
)
from .verify import (  # noqa: F401
    AXIOM_IDS,
    AxiomRecord,
    FormComparison,
    SampleConfig,
    SweepResult,
    SweepRow,
    VerificationReport,
    check_axioms,
    compare_forms,
    counterexample_sweep,
    violation_from_record,
)
