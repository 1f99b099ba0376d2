"""Architecture search spaces, decision encoding, and static network metrics.

Three spaces are provided:
  S1_mobilenetv2  per-block kernel {3,5,7} and expansion {3,6} over the
                  17-block MobileNetV2 layout (first block keeps expansion 1)
  S2_efficientnet same knobs over the 16-block EfficientNet-B0 layout
  evolved         B0 layout with per-block op type {IBN, FusedIBN}, kernel,
                  expansion, filter scaling {0.75, 1.0, 1.25} and groups
                  {1, 2, 4} for the fused convolution

A block is a single LayerSpec whose op_type selects its internal structure:
an IBN expands C -> eC with a 1x1 conv, applies a kxk depthwise, and
projects to C' with a 1x1 conv; a FusedIBN replaces the first two with one
kxk full convolution (grouped when groups > 1). primitive_layers() flattens
blocks into plain Conv/DepthwiseConv/Pool/Dense layers for costing.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

import numpy as np

# op_type values
IBN = "IBN"
FUSED_IBN = "FusedIBN"
CONV = "Conv"
DEPTHWISE_CONV = "DepthwiseConv"
POOL = "Pool"
DENSE = "Dense"

_BLOCK_OPS = (IBN, FUSED_IBN)
_PRIMITIVE_OPS = (CONV, DEPTHWISE_CONV, POOL, DENSE)

CHANNEL_ROUND = 8  # filter scaling snaps channels to multiples of this, min 8


class UnknownSpaceError(ValueError):
    pass


class DecodeError(ValueError):
    pass


class EncodeError(ValueError):
    pass


@dataclass(frozen=True)
class LayerSpec:
    """One layer or block. Shapes are (H, W, C); stride divides with ceiling."""

    op_type: str
    out_channels: int
    kernel: int = 1
    expansion: float = 1
    stride: int = 1
    groups: int = 1
    input_shape: tuple[int, int, int] = (0, 0, 0)

    @property
    def output_shape(self) -> tuple[int, int, int]:
        h, w, _ = self.input_shape
        if self.op_type == POOL:  # global average pool
            return (1, 1, self.out_channels)
        if self.op_type == DENSE:
            return (1, 1, self.out_channels)
        return (
            -(-h // self.stride),
            -(-w // self.stride),
            self.out_channels,
        )

    def to_json_dict(self) -> dict:
        return {
            "op_type": self.op_type,
            "out_channels": self.out_channels,
            "kernel": self.kernel,
            "expansion": self.expansion,
            "stride": self.stride,
            "groups": self.groups,
            "input_shape": list(self.input_shape),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "LayerSpec":
        d = dict(d)
        d["input_shape"] = tuple(d["input_shape"])
        return cls(**d)


@dataclass(frozen=True)
class ArchitectureSpec:
    """A concrete network: stem, ordered blocks, head, at a fixed resolution."""

    stem: LayerSpec
    blocks: tuple[LayerSpec, ...]
    head: tuple[LayerSpec, ...]
    input_resolution: int

    def to_json_dict(self) -> dict:
        return {
            "input_resolution": self.input_resolution,
            "stem": self.stem.to_json_dict(),
            "blocks": [b.to_json_dict() for b in self.blocks],
            "head": [h.to_json_dict() for h in self.head],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ArchitectureSpec":
        return cls(
            stem=LayerSpec.from_json_dict(d["stem"]),
            blocks=tuple(LayerSpec.from_json_dict(b) for b in d["blocks"]),
            head=tuple(LayerSpec.from_json_dict(h) for h in d["head"]),
            input_resolution=d["input_resolution"],
        )


def arch_digest(arch: ArchitectureSpec) -> int:
    """Stable 63-bit digest of a network, used to seed per-sample noise."""
    payload = json.dumps(arch.to_json_dict(), sort_keys=True).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big") >> 1


@dataclass(frozen=True)
class DecisionPoint:
    id: str
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError(f"decision {self.id} has an empty domain")


@dataclass(frozen=True)
class SearchSpaceDef:
    """Decision points plus the template network they modify."""

    name: str
    decision_points: tuple[DecisionPoint, ...]
    template: ArchitectureSpec

    def __post_init__(self):
        ids = [p.id for p in self.decision_points]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate decision ids")

    @property
    def cardinality(self) -> int:
        return math.prod(len(p.values) for p in self.decision_points)


# Stage tables: (expansion, channels, repeats, first stride, kernel).
_MOBILENETV2_STAGES = (
    (1, 16, 1, 1, 3),
    (6, 24, 2, 2, 3),
    (6, 32, 3, 2, 3),
    (6, 64, 4, 2, 3),
    (6, 96, 3, 1, 3),
    (6, 160, 3, 2, 3),
    (6, 320, 1, 1, 3),
)
_EFFICIENTNET_B0_STAGES = (
    (1, 16, 1, 1, 3),
    (6, 24, 2, 2, 3),
    (6, 40, 2, 2, 5),
    (6, 80, 3, 2, 3),
    (6, 112, 3, 1, 5),
    (6, 192, 4, 2, 5),
    (6, 320, 1, 1, 3),
)
_STEM_CHANNELS = 32
_HEAD_CHANNELS = 1280
_NUM_CLASSES = 1000


def _stage_blocks(stages) -> list[LayerSpec]:
    blocks = []
    for exp, ch, repeats, stride, kernel in stages:
        for i in range(repeats):
            blocks.append(
                LayerSpec(
                    op_type=IBN,
                    out_channels=ch,
                    kernel=kernel,
                    expansion=exp,
                    stride=stride if i == 0 else 1,
                )
            )
    return blocks


def chain_shapes(arch: ArchitectureSpec) -> ArchitectureSpec:
    """Recompute every input_shape from the input resolution."""
    r = arch.input_resolution
    if r < 1:
        raise DecodeError(f"input_resolution {r} underflows")
    shape = (r, r, arch.stem.input_shape[2] or 3)
    stem = replace(arch.stem, input_shape=shape)
    shape = stem.output_shape
    blocks = []
    for b in arch.blocks:
        b = replace(b, input_shape=shape)
        blocks.append(b)
        shape = b.output_shape
    head = []
    for h in arch.head:
        h = replace(h, input_shape=shape)
        head.append(h)
        shape = h.output_shape
    return ArchitectureSpec(stem, tuple(blocks), tuple(head), r)


def _template(stages, input_resolution: int, num_classes: int = _NUM_CLASSES) -> ArchitectureSpec:
    stem = LayerSpec(op_type=CONV, out_channels=_STEM_CHANNELS, kernel=3, stride=2,
                     input_shape=(input_resolution, input_resolution, 3))
    blocks = _stage_blocks(stages)
    head = (
        LayerSpec(op_type=CONV, out_channels=_HEAD_CHANNELS, kernel=1),
        LayerSpec(op_type=POOL, out_channels=_HEAD_CHANNELS),
        LayerSpec(op_type=DENSE, out_channels=num_classes),
    )
    return chain_shapes(ArchitectureSpec(stem, tuple(blocks), head, input_resolution))


_KERNEL_CHOICES = (3, 5, 7)
_EXPANSION_CHOICES = (3, 6)
_OP_CHOICES = (IBN, FUSED_IBN)
_FILTER_SCALE_CHOICES = (0.75, 1.0, 1.25)
_GROUP_CHOICES = (1, 2, 4)

SPACE_NAMES = ("S1_mobilenetv2", "S2_efficientnet", "evolved")


def build_space(name: str, input_resolution: int = 224) -> SearchSpaceDef:
    """Construct one of the named search spaces over its template network."""
    if name == "S1_mobilenetv2":
        template = _template(_MOBILENETV2_STAGES, input_resolution)
        points = _ibn_points(len(template.blocks))
    elif name == "S2_efficientnet":
        template = _template(_EFFICIENTNET_B0_STAGES, input_resolution)
        points = _ibn_points(len(template.blocks))
    elif name == "evolved":
        template = _template(_EFFICIENTNET_B0_STAGES, input_resolution)
        points = _evolved_points(len(template.blocks))
    else:
        raise UnknownSpaceError(f"unknown search space {name!r}; known: {SPACE_NAMES}")
    return SearchSpaceDef(name=name, decision_points=tuple(points), template=template)


def _ibn_points(n_blocks: int) -> list[DecisionPoint]:
    points = [DecisionPoint(f"block{i:02d}/kernel", _KERNEL_CHOICES) for i in range(n_blocks)]
    # The first block keeps its native expansion of 1.
    points += [DecisionPoint(f"block{i:02d}/expansion", _EXPANSION_CHOICES)
               for i in range(1, n_blocks)]
    return points


def _evolved_points(n_blocks: int) -> list[DecisionPoint]:
    points = [DecisionPoint(f"block{i:02d}/op_type", _OP_CHOICES) for i in range(n_blocks)]
    points += [DecisionPoint(f"block{i:02d}/kernel", _KERNEL_CHOICES) for i in range(n_blocks)]
    points += [DecisionPoint(f"block{i:02d}/expansion", _EXPANSION_CHOICES)
               for i in range(1, n_blocks)]
    # Filter scaling skips the first block: its 16-channel base width makes
    # 0.75x/1.0x/1.25x collide after rounding to a multiple of 8, which would
    # leave decisions unrecoverable from the decoded network.
    points += [DecisionPoint(f"block{i:02d}/filter_scale", _FILTER_SCALE_CHOICES)
               for i in range(1, n_blocks)]
    points += [DecisionPoint(f"block{i:02d}/groups", _GROUP_CHOICES) for i in range(n_blocks)]
    return points


def tiny_space(input_resolution: int = 32) -> SearchSpaceDef:
    """Two-block desk benchmark space: 36 architectures, fast to enumerate."""
    stem = LayerSpec(op_type=CONV, out_channels=8, kernel=3, stride=2,
                     input_shape=(input_resolution, input_resolution, 3))
    blocks = (
        LayerSpec(op_type=IBN, out_channels=16, kernel=3, expansion=6, stride=2),
        LayerSpec(op_type=IBN, out_channels=24, kernel=3, expansion=6, stride=1),
    )
    head = (
        LayerSpec(op_type=CONV, out_channels=64, kernel=1),
        LayerSpec(op_type=POOL, out_channels=64),
        LayerSpec(op_type=DENSE, out_channels=10),
    )
    template = chain_shapes(ArchitectureSpec(stem, blocks, head, input_resolution))
    points = [DecisionPoint(f"block{i:02d}/kernel", _KERNEL_CHOICES) for i in range(2)]
    points += [DecisionPoint(f"block{i:02d}/expansion", _EXPANSION_CHOICES) for i in range(2)]
    return SearchSpaceDef(name="tiny", decision_points=tuple(points), template=template)


def round_channels(x: float) -> int:
    """Snap to the nearest multiple of 8 (half away from zero), minimum 8."""
    return max(CHANNEL_ROUND, CHANNEL_ROUND * int(math.floor(x / CHANNEL_ROUND + 0.5)))


def _split_id(point_id: str) -> tuple[int, str]:
    block, field = point_id.split("/")
    return int(block.removeprefix("block")), field


def decode(space: SearchSpaceDef, decisions: list[int]) -> ArchitectureSpec:
    """Apply a decision vector to the template and re-chain shapes."""
    points = space.decision_points
    if len(decisions) != len(points):
        raise DecodeError(f"expected {len(points)} decisions, got {len(decisions)}")
    chosen: dict[int, dict] = {}
    for point, idx in zip(points, decisions):
        if not 0 <= idx < len(point.values):
            raise DecodeError(f"{point.id}: index {idx} out of range 0..{len(point.values) - 1}")
        block, field = _split_id(point.id)
        chosen.setdefault(block, {})[field] = point.values[idx]

    blocks = []
    for i, base in enumerate(space.template.blocks):
        c = chosen.get(i, {})
        scale = c.get("filter_scale")
        out_ch = round_channels(base.out_channels * scale) if scale is not None else base.out_channels
        blocks.append(replace(
            base,
            op_type=c.get("op_type", base.op_type),
            kernel=c.get("kernel", base.kernel),
            expansion=c.get("expansion", base.expansion),
            groups=c.get("groups", base.groups),
            out_channels=out_ch,
        ))
    arch = ArchitectureSpec(space.template.stem, tuple(blocks), space.template.head,
                            space.template.input_resolution)
    return chain_shapes(arch)


def encode(space: SearchSpaceDef, arch: ArchitectureSpec) -> list[int]:
    """Recover the decision vector from a decoded network."""
    decisions = []
    for point in space.decision_points:
        block, field = _split_id(point.id)
        layer = arch.blocks[block]
        if field == "filter_scale":
            base = space.template.blocks[block].out_channels
            matches = [m for m in point.values if round_channels(base * m) == layer.out_channels]
            if not matches:
                raise EncodeError(f"{point.id}: no scale maps {base} -> {layer.out_channels}")
            value = matches[0]
        else:
            value = getattr(layer, field)
        try:
            decisions.append(point.values.index(value))
        except ValueError:
            raise EncodeError(f"{point.id}: value {value!r} not in domain {point.values}") from None
    return decisions


def reference_decisions(space: SearchSpaceDef) -> list[int]:
    """The decision vector that reproduces the template network."""
    return encode(space, space.template)


def sample_uniform(space: SearchSpaceDef, seed) -> list[int]:
    """Independent uniform choice at every decision point; seed-deterministic."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return [int(rng.integers(len(p.values))) for p in space.decision_points]


# --- flattening and static metrics -----------------------------------------


def _block_primitives(block: LayerSpec) -> list[LayerSpec]:
    h, w, c = block.input_shape
    mid = int(round(block.expansion * c))
    if block.op_type == IBN:
        layers = []
        if mid != c:
            layers.append(LayerSpec(op_type=CONV, out_channels=mid, kernel=1,
                                    input_shape=(h, w, c)))
        layers.append(LayerSpec(op_type=DEPTHWISE_CONV, out_channels=mid,
                                kernel=block.kernel, stride=block.stride,
                                groups=mid, input_shape=(h, w, mid)))
        ho, wo, _ = layers[-1].output_shape
        layers.append(LayerSpec(op_type=CONV, out_channels=block.out_channels, kernel=1,
                                input_shape=(ho, wo, mid)))
        return layers
    if block.op_type == FUSED_IBN:
        fused = LayerSpec(op_type=CONV, out_channels=mid, kernel=block.kernel,
                          stride=block.stride, groups=block.groups, input_shape=(h, w, c))
        ho, wo, _ = fused.output_shape
        project = LayerSpec(op_type=CONV, out_channels=block.out_channels, kernel=1,
                            input_shape=(ho, wo, mid))
        return [fused, project]
    raise ValueError(f"not a block op_type: {block.op_type}")


def primitive_layers(arch) -> tuple[LayerSpec, ...]:
    """Flatten a network (or a single layer/block) into primitive layers."""
    if isinstance(arch, LayerSpec):
        if arch.op_type in _BLOCK_OPS:
            return tuple(_block_primitives(arch))
        return (arch,)
    layers = [arch.stem]
    for b in arch.blocks:
        layers.extend(_block_primitives(b) if b.op_type in _BLOCK_OPS else [b])
    layers.extend(arch.head)
    return tuple(layers)


def layer_macs(layer: LayerSpec) -> int:
    """Multiply-accumulate count of one primitive layer."""
    ho, wo, _ = layer.output_shape
    _, _, c_in = layer.input_shape
    if layer.op_type == CONV:
        return ho * wo * layer.kernel ** 2 * (c_in // layer.groups) * layer.out_channels
    if layer.op_type == DEPTHWISE_CONV:
        return ho * wo * layer.kernel ** 2 * layer.out_channels
    if layer.op_type == DENSE:
        return c_in * layer.out_channels
    if layer.op_type == POOL:
        return 0
    raise ValueError(f"not a primitive op_type: {layer.op_type}")


def layer_params(layer: LayerSpec) -> int:
    """Weight count of one primitive layer (no batch norm, no bias)."""
    _, _, c_in = layer.input_shape
    if layer.op_type == CONV:
        return layer.kernel ** 2 * (c_in // layer.groups) * layer.out_channels
    if layer.op_type == DEPTHWISE_CONV:
        return layer.kernel ** 2 * layer.out_channels
    if layer.op_type == DENSE:
        return c_in * layer.out_channels
    if layer.op_type == POOL:
        return 0
    raise ValueError(f"not a primitive op_type: {layer.op_type}")


def layer_weight_bytes(layer: LayerSpec) -> int:
    """8-bit quantized weight footprint."""
    return layer_params(layer)


def count_macs(arch) -> int:
    """Total MACs of a network, block, or primitive layer."""
    return sum(layer_macs(l) for l in primitive_layers(arch))


def count_params(arch) -> int:
    """Total parameters of a network, block, or primitive layer."""
    return sum(layer_params(l) for l in primitive_layers(arch))
