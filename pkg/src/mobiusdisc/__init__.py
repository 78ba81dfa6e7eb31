"""Random Moebius dynamics on the unit disc.

Matrix families in the semigroup SU_<=(1,1) act on the disc by Moebius
transformations; this package builds two-parameter random families of
such matrices (exponential atom mixtures, Anderson chains, polymers),
iterates them, and compares radial statistics and Lyapunov exponents
against their small-parameter limits.
"""

from __future__ import annotations

from .su11 import (
    B1,
    B2,
    B3,
    CAYLEY,
    CAYLEY_INV,
    J,
    SYMPLECTIC,
    basis,
    cayley_conjugate,
    coeffs_to_matrix,
    exp_su11,
    in_su11,
    in_su11_semigroup,
    log_traceless,
    matrix_to_coeffs,
    phase_rotation,
    su11_defect,
    su11_defect_extremes,
)
from .moebius import (
    INFINITY,
    SpherePoint,
    act,
    apply_projective,
    disc_defect,
    lift,
)
from .models import (
    AnomalyError,
    Atom,
    CriticalityReport,
    DerivedConstants,
    ModelError,
    ModelSpec,
    PolymerBlock,
    PolymerSpec,
    UniformSampler,
    anderson_frame,
    anderson_model,
    constants,
    critical_energy_check,
    load_model,
    model_from_polymer,
    model_to_dict,
    polymer_transfer,
    realize,
    realize_atom,
    single_transfer,
    with_parameters,
    xi_q3_bound,
)
from .gfamily import GFunc, g_names, get_g
from .analysis import (
    ComparisonReport,
    MomentReport,
    RadialLaw,
    SupportReport,
    compare_run,
    expansion_defect_action,
    expansion_defect_lognorm,
    expansion_defect_modulus,
    gamma_prediction,
    gamma_residual,
    ks_compare,
    moment_report,
    radial_cdf,
    rho,
    second_order_balance,
    support_bound_check,
    truncated_action,
    truncated_lognorm,
    truncated_modulus,
    weak_identity_residual,
)

# The orbit engine compiles its kernels on first use; importing it here
# would make `import mobiusdisc` pay that cost even for pure analysis
# work, so its names resolve lazily instead.
_DYNAMICS_EXPORTS = {
    "RunConfig",
    "Observable",
    "OrbitAccumulator",
    "EscapeError",
    "sample_stream",
    "run_orbit",
    "orbit_trajectory",
    "lyapunov_estimate",
    "furstenberg_gamma",
    "furstenberg_nodes",
}


def __getattr__(name: str):
    if name in _DYNAMICS_EXPORTS:
        from . import dynamics

        return getattr(dynamics, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | _DYNAMICS_EXPORTS)


__version__ = "0.1.0"
