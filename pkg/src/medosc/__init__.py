"""medosc: local median decompositions, maximal operators, Young/weight
calculus, discrete singular integrals, and inequality verification suites on
uniformly refined cube grids."""

from .grid import (
    Domain,
    DyadicCube,
    GridCube,
    GridFunction,
    Weight,
    average,
    cells,
    enumerate_cubes,
    read_grid_function,
    write_grid_function,
)
from .medians import (
    local_oscillation,
    maximal_median,
    median_mean_gap,
    median_sharp,
    parent_median_bound,
)
from .maximal import (
    dyadic_median_maximal,
    hl_maximal,
    hl_maximal_field,
    iterated_maximal_field,
    local_sharp_maximal,
    local_sharp_field,
    orlicz_maximal,
    sharp_maximal,
)
from .decomposition import (
    DecompositionResult,
    SelectedCube,
    decompose,
    measure_decay,
    reconstruct,
    verify_pointwise_bound,
)
from .young import (
    YoungFunction,
    bp_diagnostics,
    conjugate,
    luxemburg_norm,
    upper_index,
)
from .weights import (
    a_phi_check,
    ap_constant,
    campanato_norm,
    classify_trend,
    condition_f_estimate,
    morrey_norm,
    perez_bump_check,
    wp_estimate,
)
from .operators import (
    KernelOperator,
    apply_operator,
    lambda_sequence,
    pointwise_domination,
    sublinear_envelope,
)
from .corpus import generate_corpus
from .suites import SuiteConfig, VerificationReport, run_suite

__version__ = "0.1.0"
