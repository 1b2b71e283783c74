"""D2D underlay spectrum allocation: network model, auctions, Monte Carlo harness."""

__version__ = "0.1.0"

from .allocators import (
    AuctionOutcome,
    Bid,
    Instance,
    RicaParams,
    allocate_exhaustive,
    allocate_new_auction,
    allocate_random,
    allocate_rica,
    make_instance,
    rica_value,
)
from .config import PowerProfile, ScenarioConfig
from .errors import (
    ConfigError,
    D2DSimError,
    DegenerateDistributionError,
    InfeasibleInstanceError,
    InstanceTooLargeError,
    UsageError,
)
from .harness import (
    ExperimentResult,
    TrialResult,
    compare_allocators,
    run_grid,
    run_trial,
    sweep_d2d_count,
)
from .metrics import aggregate_curve, paired_differences, sinr_pdf, skewness
from .netmodel import (
    Allocation,
    GainTable,
    Topology,
    build_gain_table,
    generate_topology,
    marginal_gain,
    sinr_cellular,
    sinr_d2d,
    sum_rate,
)
