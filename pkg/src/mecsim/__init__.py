"""Mobile-edge-computing offloading simulator.

Energy/time models for partial task offloading, a velocity-dependent
spectral-efficiency channel, GPS-trajectory analysis with linear
forecasting, an iterative greedy offloading-ratio optimizer with exact
oracles, and a seeded experiment CLI.
"""

from .channel import SeModel, builtin_model, calc_se, load_se_table, save_se_table
from .energy import (
    DeviceSpec,
    EnergyBreakdown,
    InfeasibleLinkError,
    TaskSpec,
    affine_coefficients,
    local_energy,
    local_time,
    offload_energy,
    offload_time,
    total_energy,
    total_time,
    tx_power,
    uplink_rate,
)
from .optimizer import (
    GreedyTrace,
    OffloadPlan,
    PoolDevice,
    TaskPool,
    find_worst,
    global_oracle,
    greedy_optimize,
    init_plan,
    restricted_oracle,
)
from .scenario import ScenarioConfig, build_pool, load_config, run_convergence, run_sweep
from .trajectory import (
    BaseStationGeom,
    KoopmanModel,
    TrajectorySample,
    Trip,
    angular_position,
    dmd_fit,
    dmd_predict,
    estimate_velocity,
    haversine_m,
    parse_ved_csv,
    prediction_rmse,
)

__version__ = "0.1.0"
