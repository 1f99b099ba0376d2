"""Evaluation bundle: synthetic accuracy oracle plus the evaluator contract.

Real accuracy comes from training; at desk scale we substitute a smooth,
deterministic stand-in that grows with model capacity (log parameter count
with diminishing returns) plus small per-op-type adjustments. Hardware never
affects accuracy. An optional seeded Gaussian perturbation exercises the
reward-averaging path without breaking reproducibility.

Evaluator contract: any object with
    kind: str
    evaluate(arch, cfg, decisions=None, sample_index=0) -> EvalResult
can drive the search engine. SimulatorEvaluator (here) scores with the
analytical models; surrogate.SurrogateEvaluator swaps in the learned cost
model for area and latency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import accel, nas, perf
from .accel import AcceleratorConfig, AreaModelParams
from .nas import ArchitectureSpec
from .perf import EnergyModelParams, PerfModelParams


@dataclass(frozen=True)
class EvalResult:
    """Metrics for one (architecture, config) point.

    Invalid points keep their area (always computable) but carry no
    accuracy/latency/energy; the search treats them as constraint
    violations, never crashes.
    """

    accuracy: float | None
    latency_ms: float | None
    energy_mj: float | None
    area: float
    valid: bool
    invalid_reasons: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "latency_ms": self.latency_ms,
            "energy_mj": self.energy_mj,
            "area": self.area,
            "valid": self.valid,
            "invalid_reasons": list(self.invalid_reasons),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "EvalResult":
        return cls(
            accuracy=d["accuracy"],
            latency_ms=d["latency_ms"],
            energy_mj=d["energy_mj"],
            area=d["area"],
            valid=d["valid"],
            invalid_reasons=tuple(d.get("invalid_reasons", ())),
        )


@dataclass
class SyntheticOracleParams:
    """Shape of the synthetic accuracy landscape.

    accuracy = acc_max - capacity_scale * log10(params)^(-exponent)
               + sum of op_bonus over blocks, clamped to [0, 1].
    """

    acc_max: float = 0.95
    capacity_scale: float = 9.0
    exponent: float = 2.0
    op_bonus: dict = field(default_factory=lambda: {nas.FUSED_IBN: 0.002})
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.acc_max <= 1:
            raise ValueError("acc_max must be in (0, 1]")


_DEFAULT_ORACLE = SyntheticOracleParams()


def synthetic_accuracy(arch: ArchitectureSpec,
                       params: SyntheticOracleParams = _DEFAULT_ORACLE,
                       sample_index: int = 0) -> float:
    n_params = max(nas.count_params(arch), 2)  # keep log10 positive
    acc = params.acc_max - params.capacity_scale * math.log10(n_params) ** (-params.exponent)
    acc += sum(params.op_bonus.get(b.op_type, 0.0) for b in arch.blocks)
    if params.noise_sigma > 0:
        # Noise is a pure function of (network, oracle seed, sample index):
        # re-evaluating the same sample reproduces the same draw.
        rng = np.random.default_rng((params.seed, nas.arch_digest(arch), sample_index))
        acc += params.noise_sigma * rng.standard_normal()
    return min(1.0, max(0.0, acc))


class SimulatorEvaluator:
    """Scores points with the analytical area/latency/energy models."""

    kind = "simulator"

    def __init__(self,
                 oracle_params: SyntheticOracleParams | None = None,
                 area_params: AreaModelParams | None = None,
                 energy_params: EnergyModelParams | None = None,
                 perf_params: PerfModelParams | None = None):
        self.oracle_params = oracle_params or SyntheticOracleParams()
        self.area_params = area_params or accel.default_area_params()
        self.energy_params = energy_params or EnergyModelParams()
        self.perf_params = perf_params or PerfModelParams()

    def evaluate(self, arch: ArchitectureSpec, cfg: AcceleratorConfig,
                 decisions=None, sample_index: int = 0) -> EvalResult:
        area = accel.chip_area(cfg, self.area_params)
        check = accel.validate(cfg, arch)
        if not check.valid:
            return EvalResult(None, None, None, area, False, check.reasons)
        costs, latency_s = perf.network_totals(arch, cfg, self.perf_params,
                                               check_valid=False)
        dynamic = sum(self.energy_params.e_mac_j * c.macs
                      + self.energy_params.e_dram_byte_j * c.dram_bytes
                      for c in costs)
        energy_mj = (dynamic + self.energy_params.p_static_w * latency_s) * 1e3
        acc = synthetic_accuracy(arch, self.oracle_params, sample_index)
        return EvalResult(acc, latency_s * 1e3, energy_mj, area, True)
