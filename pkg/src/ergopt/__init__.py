"""Ergodic optimization on one-sided subshifts of finite type.

Compute maximal ergodic averages and maximizing periodic orbits, calibrated
sub-actions and coboundary deficiencies, Mañé action tables and Aubry sets,
shadowing certificates, equilibrium states and zero-temperature limits, the
correspondence with expanding degree-2 circle maps, and orbit-locking
perturbations.
"""

from .errors import ErgoptError, ComputationError, ValidationError
from .sft import (
    MetricParams,
    SubshiftSpec,
    SymbolicPoint,
    WordGraph,
    build_subshift,
    canonical_cycle,
    distance,
    full_shift,
    golden_mean_shift,
    inverse_branches,
    periodic_point,
    point,
    word_graph,
)
from .potential import (
    DiscretizationReport,
    Potential,
    affine_combine,
    constant_potential,
    discretize,
    holder_constant,
    make_potential,
    random_potential,
)
from .optimize import (
    AubrySet,
    Deficiency,
    InvariantMeasure,
    ManeTable,
    MaxResult,
    SubAction,
    aubry_set,
    brute_force,
    deficiency,
    mane_table,
    max_mean,
    orbit_additivity_check,
    orbit_measure,
    subaction,
)
from .shadowing import (
    PseudoOrbit,
    ShadowingCertificate,
    certify,
    random_pseudo_orbit,
    shadow,
)
from .thermo import (
    ThermoState,
    equilibrium,
    measure_distance,
    normalize_pressure,
    pressure,
    pressure_derivative_check,
    zero_temp_scan,
)
from .circle import (
    CircleMap,
    CodingTable,
    coding_table,
    doubling_map,
    lyapunov_maximize,
    map_from_potential,
    perturbed_doubling,
    potential_from_map,
)
from .perturb import (
    SeparatingFunctional,
    genericity_experiment,
    lock_orbit,
    separating_functional,
    support_penalty,
)

__version__ = "0.1.0"
