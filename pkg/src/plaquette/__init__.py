"""Mean-field dynamics of bosons on a four-site plaquette with a synthetic gauge field."""

from .analysis import (
    ReducedState,
    SelfTrapVerdict,
    classify_selftrapping,
    critical_interaction,
    orbit_center,
    reduce,
    reduced_hamiltonian,
    time_average_xc,
)
from .analytic import (
    ALL_K,
    KRoots,
    ModeFrequencies,
    Periodic,
    QuasiPeriodic,
    analytic_amplitudes,
    analytic_center,
    analytic_state,
    classify_commensurability,
    closed_form_center,
    find_k_for_ratio,
    frequency_map,
    harper_frequencies,
    mode_frequencies,
    orbit_period,
    ratio_map,
)
from .errors import (
    DegenerateFrequency,
    DegenerateRatio,
    EmptyPair,
    EmptyWindow,
    InvalidParameters,
    InvalidState,
    NonFinite,
    NonlinearUnsupported,
    NotPeriodic,
    NumericalError,
    PlaquetteError,
    ToleranceExceeded,
    ZeroImbalance,
)
from .integrator import SELFTRAP_CONFIG, IntegratorConfig, Trajectory, integrate, step_rk4, step_split4
from .model import (
    PlaquetteParams,
    SiteOccupations,
    State,
    energy,
    gpe_rhs,
    hopping_matrix,
    initial_state_paper,
    norm,
    occupations,
)
from .sweep import (
    GridSpec,
    InteractionScan,
    PhaseDiagram,
    critical_U_scan,
    scan_interaction,
    sweep_selftrap_KU,
    sweep_selftrap_phiU,
)

__version__ = "0.1.0"
