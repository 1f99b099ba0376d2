"""Edge accelerator configuration space, area model, and validity rules.

The accelerator is a 2D grid of processing elements (PEs). Each PE holds a
local memory shared by its compute lanes; each lane owns a register file and
a row of 4-way SIMD multiply-accumulate units. Peak throughput counts 8-bit
MACs as two ops each.

Memory sizes are binary (MB = 2^20 bytes); io_bandwidth is decimal GB/s
(1e9 bytes/s).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

# Searchable knob domains, in canonical order. clock_ghz is a fixed design
# parameter, not a searched knob.
HW_DOMAINS: dict[str, tuple] = {
    "pe_x": (1, 2, 4, 6, 8),
    "pe_y": (1, 2, 4, 6, 8),
    "simd_units": (16, 32, 64, 128),
    "compute_lanes": (1, 2, 4, 8),
    "local_memory_mb": (0.5, 1, 2, 3, 4),
    "register_file_kb": (8, 16, 32, 64, 128),
    "io_bandwidth": (5, 10, 15, 20, 25),
}

SIMD_WIDTH = 4   # MACs per SIMD unit per cycle
OPS_PER_MAC = 2  # multiply + accumulate

MB = 1 << 20
KB = 1 << 10


class DomainError(ValueError):
    """A config field lies outside its searchable domain."""


@dataclass(frozen=True)
class AcceleratorConfig:
    """One point in the hardware design space (defaults are the baseline)."""

    pe_x: int = 4
    pe_y: int = 4
    simd_units: int = 64
    compute_lanes: int = 4
    local_memory_mb: float = 2
    register_file_kb: int = 32
    io_bandwidth: float = 20
    clock_ghz: float = 0.8

    @property
    def pe_count(self) -> int:
        return self.pe_x * self.pe_y

    @property
    def total_local_memory_bytes(self) -> float:
        return self.pe_count * self.local_memory_mb * MB

    @property
    def register_file_bytes(self) -> float:
        return self.register_file_kb * KB

    @property
    def io_bytes_per_second(self) -> float:
        return self.io_bandwidth * 1e9

    def check_domains(self) -> None:
        """Raise DomainError if any searchable knob is off the grid."""
        for name, domain in HW_DOMAINS.items():
            value = getattr(self, name)
            if value not in domain:
                raise DomainError(f"{name}={value!r} not in {domain}")
        if self.clock_ghz <= 0:
            raise DomainError(f"clock_ghz={self.clock_ghz!r} must be > 0")

    def to_json_dict(self) -> dict:
        return {
            "pe_x": self.pe_x,
            "pe_y": self.pe_y,
            "simd_units": self.simd_units,
            "compute_lanes": self.compute_lanes,
            "local_memory_mb": self.local_memory_mb,
            "register_file_kb": self.register_file_kb,
            "io_bandwidth": self.io_bandwidth,
            "clock_ghz": self.clock_ghz,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AcceleratorConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


def baseline_config() -> AcceleratorConfig:
    """Default accelerator: 4x4 PEs, 2 MB/PE, 4 lanes, 32 KB RF, 64 SIMD units."""
    return AcceleratorConfig()


def peak_throughput(cfg: AcceleratorConfig) -> float:
    """Peak 8-bit ops/second: every MAC unit busy every cycle."""
    macs_per_cycle = cfg.pe_x * cfg.pe_y * cfg.compute_lanes * cfg.simd_units * SIMD_WIDTH
    return macs_per_cycle * OPS_PER_MAC * cfg.clock_ghz * 1e9


@dataclass(frozen=True)
class AreaModelParams:
    """Linear area coefficients, normalized so the baseline scores 1.0.

    c_mem:        area per MB of PE-local memory
    c_rf:         area per KB of lane register file
    c_simd:       area per SIMD unit
    c_lane_fixed: fixed area per compute lane
    c_io:         area per GB/s of io bandwidth
    c_fixed:      pad ring, control, misc
    """

    c_mem: float
    c_rf: float
    c_simd: float
    c_lane_fixed: float
    c_io: float
    c_fixed: float

    def __post_init__(self):
        for name in ("c_mem", "c_rf", "c_simd", "c_lane_fixed", "c_io", "c_fixed"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    # Pre-calibration coefficients: memory dominates edge-accelerator area,
    # SIMD and register files are secondary, io pads and control are small.
    _RAW = {
        "c_mem": 0.035,
        "c_rf": 0.0002,
        "c_simd": 0.00015,
        "c_lane_fixed": 0.001,
        "c_io": 0.002,
        "c_fixed": 0.05,
    }

    @classmethod
    def default(cls) -> "AreaModelParams":
        """Raw coefficients rescaled by one factor so area(baseline) == 1.0."""
        raw = cls(**cls._RAW)
        scale = 1.0 / chip_area(baseline_config(), raw)
        return cls(**{k: v * scale for k, v in cls._RAW.items()})


_DEFAULT_AREA_PARAMS: AreaModelParams | None = None


def default_area_params() -> AreaModelParams:
    global _DEFAULT_AREA_PARAMS
    if _DEFAULT_AREA_PARAMS is None:
        _DEFAULT_AREA_PARAMS = AreaModelParams.default()
    return _DEFAULT_AREA_PARAMS


def chip_area(cfg: AcceleratorConfig, params: AreaModelParams | None = None) -> float:
    """Normalized chip area, linear in every knob and monotone non-decreasing."""
    p = params if params is not None else default_area_params()
    per_lane = p.c_rf * cfg.register_file_kb + p.c_simd * cfg.simd_units + p.c_lane_fixed
    per_pe = p.c_mem * cfg.local_memory_mb + cfg.compute_lanes * per_lane
    return cfg.pe_x * cfg.pe_y * per_pe + p.c_io * cfg.io_bandwidth + p.c_fixed


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def validate(cfg: AcceleratorConfig, arch) -> ValidationResult:
    """Check whether a network can be mapped onto a configuration.

    Proxies for the compiler/mapping failures a real toolchain reports:
      a) the largest layer's 8-bit weight footprint must fit in the pooled
         PE-local memory;
      b) the widest layer's per-lane working set (input column plus one
         accumulator tile, see perf.lane_working_set_bytes) must fit in the
         lane register file;
      c) every layer must keep at least one output channel.

    Raises DomainError for configs off the Table grid; mapping failures are
    reported as Invalid with one reason per violated rule.
    """
    cfg.check_domains()
    # Imported here: perf builds on accel, so a module-level import would cycle.
    from . import nas, perf

    layers = nas.primitive_layers(arch)
    reasons = []

    weight_cap = cfg.total_local_memory_bytes
    worst_w = max(layers, key=nas.layer_weight_bytes)
    w_bytes = nas.layer_weight_bytes(worst_w)
    if w_bytes > weight_cap:
        reasons.append(
            f"weights_exceed_local_memory: {worst_w.op_type} layer needs "
            f"{w_bytes} B > {weight_cap:.0f} B pooled local memory"
        )

    rf_cap = cfg.register_file_bytes
    worst_ws = max(perf.lane_working_set_bytes(l, cfg) for l in layers)
    if worst_ws > rf_cap:
        reasons.append(
            f"working_set_exceeds_register_file: widest layer needs "
            f"{worst_ws} B > {rf_cap:.0f} B register file"
        )

    if any(l.out_channels < 1 for l in layers):
        reasons.append("channel_underflow: a layer has fewer than 1 output channel")

    return ValidationResult(not reasons, tuple(reasons))


def enumerate_configs(clock_ghz: float = 0.8):
    """Yield every config on the knob grid (250,000 points)."""
    names = list(HW_DOMAINS)
    for values in itertools.product(*(HW_DOMAINS[n] for n in names)):
        yield AcceleratorConfig(**dict(zip(names, values)), clock_ghz=clock_ghz)


def replace_config(cfg: AcceleratorConfig, **kwargs) -> AcceleratorConfig:
    return replace(cfg, **kwargs)
