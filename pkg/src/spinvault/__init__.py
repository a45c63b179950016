"""spinvault: simulation and analytics for a hot-vapor optical quantum
memory with noble-gas spin storage, plus the multiplexed repeater rate
model built on top of it.

Layering (each imports only what sits above it):

    params     parameter bundles, validation, scenario files
    analytics  closed-form efficiencies and figures of merit
    pulses     two-level optical transfer integrator
    spinpde    radial diffusion-exchange dynamics, full protocol
    repeater   entanglement-distribution rate model
    cli        deterministic artifact generation
"""

__version__ = "1.0.0"

from .errors import (
    ComputeFailed,
    ConfigError,
    ConfigNotFound,
    EmptyGrid,
    GridTooCoarse,
    IntegratorFailure,
    NeverReachable,
    NoCrossover,
    OutOfWindow,
    OverdampedExchange,
    SpinVaultError,
    StiffnessBailout,
    UnknownField,
    ValidationFailed,
)
from .params import (
    Boundary,
    CavityParams,
    CellGeometry,
    CombParams,
    EnsembleParams,
    RephasingConvention,
    Scenario,
    Violation,
    canonical_scenario,
    ensure_valid,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate,
)
from .analytics import (
    EfficiencyBreakdown,
    ExchangeLegs,
    HshCoefficient,
    cavity_reflection,
    cooperativity,
    dephasing_factor,
    echo_delay,
    exchange_duration,
    exchange_efficiency_analytic,
    memory_efficiency_total,
    multimode_capacity,
    multiplexed_success,
    time_bandwidth_product,
    transfer_efficiency_analytic,
)
from .pulses import (
    Direction,
    PulseKind,
    PulseSpec,
    envelope,
    square_pi,
    transfer_efficiency_numeric,
    transfer_once,
)
from .spinpde import (
    ProtocolTimeline,
    RadialGrid,
    SpinState,
    Stage,
    SweepMode,
    TransferModel,
    evolve,
    laplacian_radial,
    run_protocol,
    spin_exchange_efficiency_numeric,
    uniform_state,
)
from .repeater import (
    RateCurve,
    RepeaterConfig,
    crossover_distance,
    direct_rate,
    max_distance,
    optimal_links,
    repeater_rate,
    total_time,
    total_time_direct,
    transmission_efficiency,
)
