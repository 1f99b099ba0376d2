"""Joint search of neural architectures and edge-accelerator configurations.

Modules:
  accel     hardware configuration space, area model, validity rules
  nas       architecture search spaces, decode/encode, MAC/param counting
  perf      analytical roofline latency and energy model
  oracle    synthetic accuracy oracle and the evaluator contract
  reward    weighted-product objective with hard/soft constraints
  surrogate learned (area, latency) cost model
  search    random / REINFORCE / PPO / phase controllers, Pareto analysis
  cli       command-line entry point
"""

__version__ = "0.1.0"

from .accel import (  # noqa: F401
    AcceleratorConfig,
    AreaModelParams,
    baseline_config,
    chip_area,
    enumerate_configs,
    peak_throughput,
    validate,
)
from .nas import (  # noqa: F401
    ArchitectureSpec,
    DecisionPoint,
    LayerSpec,
    SearchSpaceDef,
    build_space,
    count_macs,
    count_params,
    decode,
    encode,
    reference_decisions,
    sample_uniform,
    tiny_space,
)
from .oracle import EvalResult, SimulatorEvaluator, SyntheticOracleParams, synthetic_accuracy  # noqa: F401
from .perf import (  # noqa: F401
    EnergyModelParams,
    LayerCost,
    PerfModelParams,
    layer_latency,
    network_energy,
    network_latency,
)
from .reward import RewardSpec, compute_reward  # noqa: F401
