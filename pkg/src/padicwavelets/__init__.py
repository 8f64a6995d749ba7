"""Exact p-adic wavelet bases, multiplier operators, and spectral solvers."""

from .padic import (
    INF,
    Ball,
    PadicRational,
    PadicVector,
    PrimeMismatchError,
    UnitPhase,
    character,
    decompose_ball,
    enumerate_frequencies,
    enumerate_frequencies_1d,
    enumerate_shifts,
    enumerate_shifts_1d,
    frac_part,
    norm,
    phase_to_complex,
    power,
    valuation,
)
from .functions import (
    DEFAULT_TERM_BUDGET,
    DEFAULT_TOL,
    NotLizorkinError,
    SchwartzFunction,
    TermBudgetError,
    indicator,
    unit_ball_indicator,
)
from .wavelets import (
    AnalysisResult,
    CoefficientField,
    FamilySpec,
    WaveletIndex,
    Window,
    alpha_coeffs,
    analyze,
    fourier_closed_form,
    generator_phases,
    gram_matrix,
    index1d,
    parseval_partial_sum,
    psi,
    shift_matrix,
    synthesize,
    tensor_product,
    theta,
    theta_phase_at,
    wavelet,
)
from .operators import (
    EigenReport,
    EigenStatus,
    EigenfunctionError,
    SymbolSingularError,
    SymbolSpec,
    apply,
    eigen_apply,
    eigencheck,
    eigenvalue_at,
)
from .evolution import (
    DisjointSupportError,
    EvolutionProblem,
    ResidualReport,
    Trajectory,
    check_disjointness,
    residual,
    semilinear_mode,
    solve,
    solve_linear,
    solve_schrodinger,
    solve_semilinear,
)

__version__ = "0.1.0"
