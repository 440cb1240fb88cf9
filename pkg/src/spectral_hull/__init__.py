"""Finite-scale spectral-theorem toolkit.

Builds samplings and standard-biased scales for symmetric operators,
the induced atom measure and L2 embedding, the pseudometric hull with
its charts, and the projection-valued resolution, with convergence
diagnostics for the circle (shift) and line (derivative) examples.
"""

from .errors import NumericalFailure, SpectralHullError, ValidationError
from .kernels import backend_name
from .linalg import COMPLEX, REAL, DenseOp, Vec, eigh_self_adjoint, inner, project_onto_span
from .sampling import (
    GraphDefectReport,
    PVMOracle,
    Sampling,
    Scale,
    build_diff_sampling,
    build_projection_sampling,
    build_pvm_sampling,
    build_shift_sampling,
    dyadic_scale,
    graph_defect,
    load_sampling,
    save_sampling,
)
from .measure import (
    EmbeddedVec,
    MultiplierFn,
    SpectralAtomMeasure,
    atom_measure,
    embed,
    intertwining_defect,
    measure_of,
    multiply,
    unembed,
)
from .hull import (
    ChartPoint,
    HullSpace,
    PseudoMetric,
    build_hull,
    chart_circle,
    chart_line,
    covering_number,
    hull_coordinate_functions,
    pseudometric,
    pushforward_multiplier_via_partition,
)
from .resolution import (
    IntervalSet,
    SignedAtomMeasure,
    SpectralProjector,
    integrate_step_function,
    pvm_algebra_check,
    pvm_project,
    signed_measure,
    surjectivity_diagnostic,
)
from .bridge import (
    GridFunction,
    TransformTable,
    differentiation_check,
    fourier_series_check,
    fourier_transform,
    gaussian_reference,
    plancherel_check,
    staircase_lp_error,
)

__version__ = "0.1.0"
