"""Bidirectional map between a continuity-equation flow description
(density f, mean velocity v) and a Schrodinger-form description
(wavefunction, scalar potential, vortex vector potential), plus the
electromagnetic-analogue fields and diagnostics built on top of it.
"""

from .constants import Constants, DEFAULT_CONSTANTS
from .grid import Boundary, Grid
from .fields import ComplexField, ScalarField, VectorField, field_csv, max_norm
from .calculus import (
    cross,
    curl,
    directional_derivative,
    divergence,
    gradient,
    inner_product,
    integrate,
    laplacian,
)
from .helmholtz import (
    Decomposition,
    decompose,
    divergence_gap,
    recomposition_gap,
    solve_poisson,
    solve_vector_potential,
)
from .bridge import (
    BridgeResult,
    apply_L,
    apply_script_L,
    assemble_psi,
    continuity_residual,
    forward_bridge,
    imag_potential_residual,
    inverse_bridge,
    pauli_shift,
    phase_from_psi,
    reconstruct_potential,
    schrodinger_residual,
    velocity_from_psi,
)
from .em import (
    AgreementReport,
    EmFields,
    chi_field,
    chi_field_via_potential,
    classify_agreement,
    electric_field,
    electric_field_via_chi,
    em_fields,
    faraday_residual,
    gauss_chi_gap,
    magnetic_field,
)
from .kinematics import ComReport, com_diagnostics, lorentz_residual, material_derivative
from .scenarios import (
    ChargedSphereFlow,
    DerivativeMode,
    PeriodicFlowScenario,
    SampledScenario,
    Scenario,
    ScenarioFrame,
    TimeEnvelope,
    TrigPoly,
    UniformAccelGaussian,
    example1,
    example2,
    random_positive_density,
    random_solenoidal_field,
    random_velocity_field,
    scenario_from_config,
)
from .sphere import (
    SphereState,
    first_integral_drift,
    initial_state,
    sphere_integrate,
    sphere_radius_at_time,
    sphere_time_of_density,
    sphere_time_of_radius,
    sphere_time_of_radius_numeric,
    state_from_gamma_bar,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
