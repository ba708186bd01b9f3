"""Birkhoff-Gustavson normal forms and non-resonant Hopf links.

Exact normal forms of two-degree-of-freedom Hamiltonians near an elliptic
minimum, resonance classification, rotation-number series for the axial
periodic orbits, the non-resonance decision procedure, and numerical
cross-validation of the predictions on the true flow.
"""

from .scalars import CC, Field, FieldError, QuadExt, RATIONAL, float_field, quad_field
from .poly import (
    ChartError,
    Polynomial,
    TruncatedMap,
    apply_D,
    compose_map,
    compose_maps,
    invert_generating,
    linear_substitute,
    poisson_bracket,
    read_polynomial,
    solve_homological,
    split_ker_im,
    symplectic_defect,
    to_complex,
    to_real,
    write_polynomial,
)
from .resonance import (
    AnDecomposition,
    Frequencies,
    NONRESONANT,
    ResonanceClass,
    ResonanceData,
    an_decompose,
    classify,
    reassemble,
    resonance_pair,
    sigma_monomial,
)
from .series import SeriesE, SeriesError
from .normalform import (
    NormalFormResult,
    check_plane_invariance,
    check_zp_invariance,
    normalize,
    psi_conjugate,
    rescale,
    symmetric_normalize_zp,
    verify,
)
from .hopf import (
    CaseVerdict,
    HopfAnalysis,
    IndeterminateError,
    amplitude_series,
    analyze,
    beta_coeffs,
    case_quantities,
    frequency_series,
    nu_index,
    omega_coeffs,
    orbit_existence,
    rotation_series,
    theorem_check,
    twist_product,
)
from .numeric import (
    EvaluableHamiltonian,
    OrbitRecord,
    PolynomialHamiltonian,
    find_periodic_orbit,
    integrate,
    quaternion_frame,
    rotation_number_numeric,
    series_vs_numeric_report,
    winding_rate,
    winding_rate_grid,
    winding_rate_numeric,
)
from .models import henon_heiles, hill_regularized, isosceles, quadratic

__version__ = "0.1.0"
