"""Analytical roofline latency and energy model.

Per primitive layer:
  compute_seconds = macs / (peak_macs * utilization)
  memory_seconds  = dram_bytes / io_bandwidth
  latency         = max(compute_seconds, memory_seconds)

Utilization is u_base scaled by channel-tile padding efficiency; depthwise
convolutions run at one third of the full-conv base utilization because they
starve the MAC array (one input channel per output channel). DRAM traffic is
the 8-bit weight footprint plus input/output activations when a layer's
activation working set cannot be pinned in the pooled PE-local memory.

All functions are pure; safe for concurrent callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import accel, nas
from .accel import AcceleratorConfig
from .nas import ArchitectureSpec, LayerSpec


class InvalidPointError(RuntimeError):
    """Evaluation was asked for a (network, config) pair that fails validation."""

    def __init__(self, reasons):
        super().__init__("; ".join(reasons))
        self.reasons = tuple(reasons)


@dataclass(frozen=True)
class PerfModelParams:
    """Calibration constants for the roofline mapping model.

    u_base and the depthwise divisor were set once so the MobileNetV2
    reference lands at production-scale latency on the baseline config; they
    are exposed here for recalibration against a different target.
    """

    u_base: float = 0.8
    depthwise_divisor: float = 3.0
    dispatch_overhead_s: float = 0.0


@dataclass(frozen=True)
class EnergyModelParams:
    """Energy coefficients, calibrated alongside PerfModelParams."""

    e_mac_j: float = 0.25e-12     # joules per 8-bit MAC
    e_dram_byte_j: float = 20e-12  # joules per DRAM byte moved
    p_static_w: float = 1.5        # static + control power draw

    def __post_init__(self):
        if self.e_mac_j < 0 or self.e_dram_byte_j < 0 or self.p_static_w < 0:
            raise ValueError("energy coefficients must be >= 0")


@dataclass(frozen=True)
class LayerCost:
    compute_seconds: float
    memory_seconds: float
    latency_seconds: float
    dram_bytes: int
    macs: int
    utilization: float


_DEFAULT_PERF = PerfModelParams()
_DEFAULT_ENERGY = EnergyModelParams()


def peak_macs(cfg: AcceleratorConfig) -> float:
    """Peak MACs/second (half the op throughput: one multiply plus one add)."""
    return accel.peak_throughput(cfg) / accel.OPS_PER_MAC


def channel_tile(cfg: AcceleratorConfig) -> int:
    """Output channels produced per lane pass: SIMD units times SIMD width."""
    return accel.SIMD_WIDTH * cfg.simd_units


def tile_efficiency(out_channels: int, cfg: AcceleratorConfig) -> float:
    """Fraction of the channel tile doing useful work after padding."""
    t = channel_tile(cfg)
    return out_channels / (t * math.ceil(out_channels / t))


def layer_utilization(layer: LayerSpec, cfg: AcceleratorConfig,
                      params: PerfModelParams = _DEFAULT_PERF) -> float:
    base = params.u_base
    if layer.op_type == nas.DEPTHWISE_CONV:
        base /= params.depthwise_divisor
    return base * tile_efficiency(layer.out_channels, cfg)


def lane_working_set_bytes(layer: LayerSpec, cfg: AcceleratorConfig) -> int:
    """Register-file bytes one lane needs for a single output position.

    One 8-bit input column (the receptive field across the per-group input
    channels) plus a 32-bit partial-sum slot per channel-tile entry.
    """
    accumulators = 4 * channel_tile(cfg)
    _, _, c_in = layer.input_shape
    if layer.op_type == nas.DEPTHWISE_CONV:
        window = layer.kernel ** 2
    elif layer.op_type == nas.CONV:
        window = layer.kernel ** 2 * (c_in // layer.groups)
    elif layer.op_type == nas.DENSE:
        window = c_in
    else:  # Pool reads what is already resident
        window = 0
    return window + accumulators


def layer_dram_bytes(layer: LayerSpec, cfg: AcceleratorConfig) -> int:
    """Weights always stream from DRAM; activations only when they spill."""
    h, w, c = layer.input_shape
    ho, wo, co = layer.output_shape
    traffic = nas.layer_weight_bytes(layer)
    activation_footprint = h * w * c + ho * wo * co
    if activation_footprint > cfg.total_local_memory_bytes:
        traffic += activation_footprint
    return traffic


def roofline_latency(macs: int, dram_bytes: int, utilization: float,
                     cfg: AcceleratorConfig) -> tuple[float, float]:
    """(compute_seconds, memory_seconds) for a raw work description."""
    compute = macs / (peak_macs(cfg) * utilization) if macs else 0.0
    memory = dram_bytes / cfg.io_bytes_per_second if dram_bytes else 0.0
    return compute, memory


def layer_latency(layer: LayerSpec, cfg: AcceleratorConfig,
                  params: PerfModelParams = _DEFAULT_PERF) -> LayerCost:
    """Roofline cost of one layer; composite blocks are flattened and summed."""
    primitives = nas.primitive_layers(layer)
    compute = memory = latency = 0.0
    dram = macs = 0
    for prim in primitives:
        u = layer_utilization(prim, cfg, params)
        m = nas.layer_macs(prim)
        d = layer_dram_bytes(prim, cfg)
        c, mem = roofline_latency(m, d, u, cfg)
        compute += c
        memory += mem
        latency += max(c, mem)
        dram += d
        macs += m
    util = macs / (peak_macs(cfg) * compute) if compute > 0 else 1.0
    return LayerCost(compute, memory, latency, dram, macs, util)


def network_totals(arch: ArchitectureSpec, cfg: AcceleratorConfig,
                   params: PerfModelParams = _DEFAULT_PERF,
                   check_valid: bool = True):
    """Per-layer costs plus the network latency in seconds."""
    if check_valid:
        result = accel.validate(cfg, arch)
        if not result.valid:
            raise InvalidPointError(result.reasons)
    costs = [layer_latency(l, cfg, params) for l in nas.primitive_layers(arch)]
    latency_s = sum(c.latency_seconds for c in costs) + params.dispatch_overhead_s * len(costs)
    return costs, latency_s


def network_latency(arch: ArchitectureSpec, cfg: AcceleratorConfig,
                    params: PerfModelParams = _DEFAULT_PERF,
                    check_valid: bool = True) -> float:
    """End-to-end latency in milliseconds; raises InvalidPointError when unmappable."""
    _, latency_s = network_totals(arch, cfg, params, check_valid)
    return latency_s * 1e3


def network_energy(arch: ArchitectureSpec, cfg: AcceleratorConfig,
                   energy: EnergyModelParams = _DEFAULT_ENERGY,
                   params: PerfModelParams = _DEFAULT_PERF,
                   check_valid: bool = True) -> float:
    """Inference energy in millijoules: MAC + DRAM switching plus static draw."""
    costs, latency_s = network_totals(arch, cfg, params, check_valid)
    dynamic = sum(energy.e_mac_j * c.macs + energy.e_dram_byte_j * c.dram_bytes
                  for c in costs)
    return (dynamic + energy.p_static_w * latency_s) * 1e3
