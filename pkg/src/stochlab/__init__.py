"""Numerical diagnostics for stochastic completeness, criticality and the
L1-Liouville property of one-dimensional (radial) elliptic operators, and the
density rescalings ``rho P`` that switch completeness off."""
from .constructions import (
    MU_SET,
    EigenCertificate,
    HardyWeight,
    RhoRecipe,
    WitnessFunction,
    bounded_eigen_certificate,
    bump,
    critical_hardy_from_measure,
    decay_gate,
    hardy_weight,
    mu_power,
    omori_yau_flag,
    omori_yau_scan,
    rho_from_hardy,
    rho_from_measure,
    witness,
)
from .diagnostics import Budget, DiagnosticsReport, SuiteSummary, diagnose, theorem24_suite
from .discretize import DiscreteOperator, Grid1D, assemble, exhaust, make_grid, refine
from .errors import (
    CriticalSpecError,
    HypothesisFailed,
    InfinitePotential,
    StageError,
    StochLabError,
)
from .feller import FellerReport, feller_test, oracle_agree
from .green import (
    GreenPotential,
    GreenTable,
    comparability,
    criticality_closed_form,
    green_closed_form,
    green_direct,
    green_potential,
    green_via_time,
    l1_liouville_verdict,
)
from .model import (
    CoefficientField,
    OperatorSpec,
    SkewSpec,
    preset,
    rescale,
    symmetric_compatible,
    symmetric_residual,
    with_density,
)
from .semigroup import (
    KernelSlice,
    MassCurve,
    chapman_kolmogorov_defect,
    dichotomy_check,
    evolve,
    kernel_slice,
    mass_curve,
)
from .skew import (
    ContradictoryVerdicts,
    ProductDiagnostics,
    coarse_validation,
    product_kernel,
    product_l1_check,
    product_mass,
    product_subcriticality,
    theorem54_table,
)

__version__ = "0.1.0"
