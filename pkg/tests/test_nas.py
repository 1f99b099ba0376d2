import math

import numpy as np
import pytest

from nahas import nas
from nahas.nas import ArchitectureSpec, LayerSpec


def _product_cardinality(space):
    return math.prod(len(p.values) for p in space.decision_points)


def test_s1_cardinality(s1):
    assert len(s1.template.blocks) == 17
    kernels = [p for p in s1.decision_points if p.id.endswith("kernel")]
    expansions = [p for p in s1.decision_points if p.id.endswith("expansion")]
    assert len(kernels) == 17 and all(p.values == (3, 5, 7) for p in kernels)
    assert len(expansions) == 16 and all(p.values == (3, 6) for p in expansions)
    assert s1.cardinality == _product_cardinality(s1) == 3**17 * 2**16
    assert s1.cardinality == 8_463_329_722_368


def test_s2_cardinality(s2):
    assert len(s2.template.blocks) == 16
    assert s2.cardinality == _product_cardinality(s2) == 3**16 * 2**15
    assert s2.cardinality == 1_410_554_953_728


def test_degenerate_space_cardinality(tiny):
    bare = nas.SearchSpaceDef(name="bare", decision_points=(), template=tiny.template)
    assert bare.cardinality == 1


def test_unknown_space_name():
    with pytest.raises(nas.UnknownSpaceError):
        nas.build_space("S3_resnet")


def test_decode_reference_is_template(s1, s2, evolved, tiny):
    for space in (s1, s2, evolved, tiny):
        ref = nas.reference_decisions(space)
        assert nas.decode(space, ref) == space.template


def test_decode_bad_vectors(s1):
    with pytest.raises(nas.DecodeError):
        nas.decode(s1, [0] * (len(s1.decision_points) - 1))
    bad = [0] * len(s1.decision_points)
    bad[0] = 3
    with pytest.raises(nas.DecodeError):
        nas.decode(s1, bad)


def _ibn_macs_by_hand(h, w, c, e, k, c_out, stride):
    ho, wo = -(-h // stride), -(-w // stride)
    mid = e * c
    expand = h * w * c * mid if e != 1 else 0
    depthwise = ho * wo * k * k * mid
    project = ho * wo * mid * c_out
    return expand + depthwise + project


def _fused_macs_by_hand(h, w, c, e, k, c_out, stride, groups=1):
    ho, wo = -(-h // stride), -(-w // stride)
    mid = e * c
    fused = ho * wo * k * k * (c // groups) * mid
    project = ho * wo * mid * c_out
    return fused + project


def test_block_mac_worked_example():
    ibn = LayerSpec(op_type=nas.IBN, out_channels=64, kernel=3, expansion=6,
                    stride=1, input_shape=(14, 14, 64))
    fused = LayerSpec(op_type=nas.FUSED_IBN, out_channels=64, kernel=3, expansion=6,
                      stride=1, input_shape=(14, 14, 64))
    assert nas.count_macs(ibn) == _ibn_macs_by_hand(14, 14, 64, 6, 3, 64, 1)
    assert nas.count_macs(ibn) == 4_816_896 + 677_376 + 4_816_896 == 10_311_168
    assert nas.count_macs(fused) == _fused_macs_by_hand(14, 14, 64, 6, 3, 64, 1)
    assert nas.count_macs(fused) == 43_352_064 + 4_816_896 == 48_168_960
    assert nas.count_macs(fused) / nas.count_macs(ibn) == pytest.approx(4.67, abs=0.01)


def test_fused_block_structure():
    fused = LayerSpec(op_type=nas.FUSED_IBN, out_channels=64, kernel=3, expansion=6,
                      stride=1, input_shape=(14, 14, 64))
    prims = nas.primitive_layers(fused)
    assert len(prims) == 2
    conv, project = prims
    assert conv.op_type == nas.CONV and conv.kernel == 3
    assert conv.input_shape == (14, 14, 64) and conv.out_channels == 384
    assert project.op_type == nas.CONV and project.kernel == 1
    assert project.input_shape == (14, 14, 384) and project.out_channels == 64


def test_one_by_one_identity_conv():
    conv = LayerSpec(op_type=nas.CONV, out_channels=1, kernel=1, input_shape=(1, 1, 1))
    assert nas.count_macs(conv) == 1
    assert nas.count_params(conv) == 1


def test_pool_and_dense_counts():
    pool = LayerSpec(op_type=nas.POOL, out_channels=64, input_shape=(7, 7, 64))
    dense = LayerSpec(op_type=nas.DENSE, out_channels=10, input_shape=(1, 1, 64))
    assert nas.count_macs(pool) == 0 and nas.count_params(pool) == 0
    assert nas.count_macs(dense) == 640 == nas.count_params(dense)
    assert pool.output_shape == (1, 1, 64)


def test_mbv2_totals_match_layer_walk(mbv2):
    total = sum(nas.layer_macs(l) for l in nas.primitive_layers(mbv2))
    assert nas.count_macs(mbv2) == total
    # sanity band for the 224x224 reference network
    assert 270e6 < total < 330e6
    assert 3.2e6 < nas.count_params(mbv2) < 3.7e6


def test_grouped_fused_macs():
    for g in (1, 2, 4):
        blk = LayerSpec(op_type=nas.FUSED_IBN, out_channels=64, kernel=3, expansion=6,
                        stride=1, groups=g, input_shape=(14, 14, 64))
        assert nas.count_macs(blk) == _fused_macs_by_hand(14, 14, 64, 6, 3, 64, 1, g)


def test_fused_always_costs_more_than_ibn():
    # Holds for every decodable shape: channels are multiples of 8, >= 8.
    rng = np.random.default_rng(11)
    for _ in range(1000):
        c = 8 * int(rng.integers(1, 60))
        c_out = 8 * int(rng.integers(1, 60))
        h = int(rng.integers(1, 56))
        k = int(rng.choice([3, 5, 7]))
        e = int(rng.choice([1, 3, 6]))
        s = int(rng.choice([1, 2]))
        g = int(rng.choice([1, 2, 4]))
        ibn = LayerSpec(op_type=nas.IBN, out_channels=c_out, kernel=k, expansion=e,
                        stride=s, input_shape=(h, h, c))
        fused = LayerSpec(op_type=nas.FUSED_IBN, out_channels=c_out, kernel=k, expansion=e,
                          stride=s, groups=g, input_shape=(h, h, c))
        assert nas.count_macs(fused) > nas.count_macs(ibn)


def test_decode_encode_round_trip(s1, s2, evolved, tiny):
    rng = np.random.default_rng(3)
    for space in (s1, s2, evolved, tiny):
        for _ in range(250):
            d = nas.sample_uniform(space, rng)
            arch = nas.decode(space, d)
            assert nas.encode(space, arch) == d


def test_filter_scale_channels_are_unambiguous(evolved):
    for point in evolved.decision_points:
        if not point.id.endswith("filter_scale"):
            continue
        block = int(point.id.split("/")[0].removeprefix("block"))
        base = evolved.template.blocks[block].out_channels
        rounded = [nas.round_channels(base * m) for m in point.values]
        assert len(set(rounded)) == len(rounded)


def test_round_channels():
    assert nas.round_channels(12) == 16  # half rounds away from zero
    assert nas.round_channels(11.9) == 8
    assert nas.round_channels(3) == 8    # floor of 8
    assert nas.round_channels(240) == 240


def test_evolved_decode_scales_channels(evolved):
    ref = nas.reference_decisions(evolved)
    idx = next(i for i, p in enumerate(evolved.decision_points)
               if p.id == "block05/filter_scale")
    d = list(ref)
    d[idx] = 2  # 1.25x
    arch = nas.decode(evolved, d)
    base = evolved.template.blocks[5].out_channels
    assert arch.blocks[5].out_channels == nas.round_channels(base * 1.25)
    # downstream block sees the new channel count
    assert arch.blocks[6].input_shape[2] == arch.blocks[5].out_channels


def test_shape_reduction_is_decision_invariant(s1, evolved):
    rng = np.random.default_rng(5)
    for space in (s1, evolved):
        ref = nas.decode(space, nas.reference_decisions(space))
        final_ref = ref.blocks[-1].output_shape[:2]
        for _ in range(50):
            arch = nas.decode(space, nas.sample_uniform(space, rng))
            assert arch.blocks[-1].output_shape[:2] == final_ref
    assert final_ref == (7, 7)  # 224 / 2^5 with ceiling division


def test_sample_uniform_deterministic(s1):
    assert nas.sample_uniform(s1, 42) == nas.sample_uniform(s1, 42)
    assert nas.sample_uniform(s1, 42) != nas.sample_uniform(s1, 43)


def test_sample_uniform_is_uniform(s1):
    rng = np.random.default_rng(0)
    kernel0 = [nas.sample_uniform(s1, rng)[0] for _ in range(10_000)]
    sigma = math.sqrt((1 / 3) * (2 / 3) / 10_000)
    for v in (0, 1, 2):
        freq = kernel0.count(v) / 10_000
        assert abs(freq - 1 / 3) < 3 * sigma


def test_sample_uniform_degenerate_domain(tiny):
    space = nas.SearchSpaceDef(
        name="fixed", template=tiny.template,
        decision_points=(nas.DecisionPoint("block00/kernel", (5,)),))
    assert all(nas.sample_uniform(space, s) == [0] for s in range(20))


def test_arch_json_round_trip(mbv2):
    d = mbv2.to_json_dict()
    assert ArchitectureSpec.from_json_dict(d) == mbv2


def test_arch_digest_stable(mbv2, s1):
    assert nas.arch_digest(mbv2) == nas.arch_digest(s1.template)
    other = nas.decode(s1, nas.sample_uniform(s1, 1))
    assert nas.arch_digest(other) != nas.arch_digest(mbv2)


def test_duplicate_decision_ids_rejected(tiny):
    p = nas.DecisionPoint("block00/kernel", (3, 5))
    with pytest.raises(ValueError):
        nas.SearchSpaceDef(name="dup", decision_points=(p, p), template=tiny.template)


def test_empty_domain_rejected():
    with pytest.raises(ValueError):
        nas.DecisionPoint("block00/kernel", ())


def test_stride_uses_ceiling_division():
    layer = LayerSpec(op_type=nas.CONV, out_channels=8, kernel=3, stride=2,
                      input_shape=(7, 7, 3))
    assert layer.output_shape == (4, 4, 8)
