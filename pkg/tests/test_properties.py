"""Property tests for the pipeline invariants, randomized via hypothesis."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from workbench.images import (
    CfaPattern,
    RawImage,
    RgbImage,
    read_raw,
    read_rgb,
    saturation_threshold,
    write_raw,
    write_rgb,
)
from workbench.isp import demosaic, isp_chain
from workbench.pipeline_config import PipelineConfig
from workbench.scene import TimeVaryingScene
from workbench.sensor import capture, hdr_merge

BAYER = [CfaPattern.RGGB, CfaPattern.BGGR]
METHODS = ["nearest", "bilinear"]


def mosaic_constant(color, w, h, cfa):
    weights = cfa.weights(h, w)
    values = (weights * np.asarray(color, dtype=float)).sum(axis=2)
    return RawImage(np.round(values).astype(np.uint16), bit_depth=10, cfa=cfa)


@settings(max_examples=120, deadline=None)
@given(
    r=st.integers(0, 1023),
    g=st.integers(0, 1023),
    b=st.integers(0, 1023),
    w=st.integers(2, 17),
    h=st.integers(2, 17),
    cfa=st.sampled_from(BAYER),
    method=st.sampled_from(METHODS),
)
def test_mosaic_demosaic_constant_identity(r, g, b, w, h, cfa, method):
    raw = mosaic_constant((r, g, b), w, h, cfa)
    rgb = demosaic(raw, method)
    assert np.allclose(rgb[:, :, 0], r)
    assert np.allclose(rgb[:, :, 1], g)
    assert np.allclose(rgb[:, :, 2], b)


@settings(max_examples=100, deadline=None)
@given(
    data=st.data(),
    w=st.integers(2, 24),
    h=st.integers(2, 24),
    gamma=st.floats(0.5, 4.0),
    quality=st.one_of(st.none(), st.integers(1, 100)),
)
def test_isp_bit_depth_bounds(data, w, h, gamma, quality):
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    raw = RawImage(
        rng.integers(0, 1024, size=(h, w), dtype=np.uint16), bit_depth=10,
        cfa=CfaPattern.RGGB,
    )
    cfg = PipelineConfig(
        tone_gamma=gamma,
        wb_gains=(
            float(data.draw(st.floats(0.0, 4.0))),
            float(data.draw(st.floats(0.0, 4.0))),
            float(data.draw(st.floats(0.0, 4.0))),
        ),
        compress_quality=quality,
    )
    out = isp_chain(raw, cfg)
    assert out.pixels.dtype == np.uint8
    assert 0 <= int(out.pixels.min()) and int(out.pixels.max()) <= 255


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    w=st.integers(1, 16),
    h=st.integers(2, 32),
    readout_seed=st.integers(0, 2**16),
)
def test_static_scene_readout_order_invariance(seed, w, h, readout_seed):
    rng = np.random.default_rng(seed)
    base = rng.uniform(0, 1.2e6, size=(h, w, 3))
    scene = TimeVaryingScene(base)
    cfg = PipelineConfig(exposure_time=1e-3)
    seq = capture(scene, cfg)
    rand = capture(
        scene, cfg.updated(readout_order="randomized", readout_seed=readout_seed)
    )
    assert np.array_equal(seq.pixels, rand.pixels)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(2, 4),
    ratio=st.floats(1.5, 10.0),
)
def test_hdr_never_increases_saturation_vs_shortest(seed, n, ratio):
    rng = np.random.default_rng(seed)
    fs = 1023
    radiance = rng.uniform(0, fs * ratio ** (n - 1) * 1.2, size=(6, 6))
    ratios = [ratio**-i for i in range(n)]
    exposures = [
        RawImage(
            np.clip(np.round(radiance * r), 0, fs).astype(np.uint16), bit_depth=10
        )
        for r in ratios
    ]
    merged = hdr_merge(exposures, ratios)
    sat_shortest = exposures[-1].pixels >= saturation_threshold(fs)
    sat_merged = merged.pixels >= saturation_threshold(merged.metadata["hdr"]["full_scale"])
    assert int(sat_merged.sum()) <= int(sat_shortest.sum())
    assert not np.any(sat_merged & ~sat_shortest)


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    w=st.integers(1, 24),
    h=st.integers(1, 24),
    bit_depth=st.integers(1, 16),
    cfa=st.sampled_from(list(CfaPattern)),
)
def test_raw_file_round_trip(tmp_path_factory, seed, w, h, bit_depth, cfa):
    rng = np.random.default_rng(seed)
    full = (1 << bit_depth) - 1
    raw = RawImage(
        rng.integers(0, full + 1, size=(h, w), dtype=np.uint16),
        bit_depth=bit_depth,
        cfa=cfa,
        metadata={"seed": int(seed)},
    )
    path = tmp_path_factory.mktemp("raws") / "img.pgm"
    write_raw(raw, path)
    back = read_raw(path)
    assert np.array_equal(back.pixels, raw.pixels)
    assert back.bit_depth == raw.bit_depth
    assert back.cfa is raw.cfa
    assert back.metadata == raw.metadata


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), w=st.integers(1, 24), h=st.integers(1, 24))
def test_rgb_file_round_trip(tmp_path_factory, seed, w, h):
    rng = np.random.default_rng(seed)
    img = RgbImage(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))
    path = tmp_path_factory.mktemp("rgbs") / "img.ppm"
    write_rgb(img, path)
    assert np.array_equal(read_rgb(path).pixels, img.pixels)


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    exposure=st.floats(1e-5, 5e-3),
    gain=st.floats(1.0, 8.0),
)
def test_capture_respects_bit_depth(seed, exposure, gain):
    rng = np.random.default_rng(seed)
    base = rng.uniform(0, 5e6, size=(8, 8, 3))
    scene = TimeVaryingScene(base)
    cfg = PipelineConfig(exposure_time=exposure, analog_gain=gain, bit_depth=10)
    raw = capture(scene, cfg)
    assert int(raw.pixels.max()) <= 1023
