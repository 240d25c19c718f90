import numpy as np
import pytest

from workbench.attacks import (
    BlindingSpec,
    DigitalOverlaySpec,
    FlickerSpec,
    ScalingCamouflageSpec,
    attack_spec_from_json,
    attack_spec_to_json,
    apply_attack,
    craft_scaling_attack,
)
from workbench.images import ImageError, RgbImage, RoiRect
from workbench.isp import sample_indices, scale_array
from workbench.pipeline_config import PipelineConfig
from workbench.scene import TimeVaryingScene
from workbench.sensor import capture


def gray_scene(w=32, h=32, level=100_000.0):
    return TimeVaryingScene(np.full((h, w, 3), level))


def test_zero_intensity_blinding_is_noop():
    scene = gray_scene()
    spec = BlindingSpec(center=(16.0, 16.0), radius=4.0, intensity=0.0, psf_sigma=5.0)
    cfg = PipelineConfig(exposure_time=1e-3)
    assert np.array_equal(
        capture(scene, cfg).pixels, capture(apply_attack(scene, spec), cfg).pixels
    )


def test_blinding_saturates_roi():
    scene = gray_scene()
    spec = BlindingSpec(center=(16.0, 16.0), radius=6.0, intensity=5e9, psf_sigma=2.0)
    cfg = PipelineConfig(exposure_time=1e-3, bit_depth=10)
    raw = capture(apply_attack(scene, spec), cfg)
    ys, xs = RoiRect(11, 11, 11, 11).slices()
    roi = raw.pixels[ys, xs]
    assert (roi >= 1003).mean() >= 0.99


def test_blinding_outside_scene_rejected():
    with pytest.raises(ImageError):
        apply_attack(gray_scene(), BlindingSpec(center=(99.0, 0.0), radius=1.0, intensity=1.0))


def test_flicker_banding_period():
    # 90 Hz flicker against 30 us line time -> period of 1/(f*tau) = 370 rows
    scene = TimeVaryingScene(np.full((800, 8, 3), 50_000.0))
    spec = FlickerSpec(frequency_hz=90.0, intensity=500_000.0)
    cfg = PipelineConfig(exposure_time=30e-6, line_time=30e-6)
    raw = capture(apply_attack(scene, spec), cfg)
    from workbench.defenses import stripe_period

    period = stripe_period(raw)
    assert period is not None
    assert abs(period - round(1.0 / (90.0 * 30e-6))) <= 1


def test_overlay_composites_base_radiance():
    scene = gray_scene(16, 16, 1000.0)
    patch = RgbImage(np.full((4, 4, 3), 255, dtype=np.uint8))
    spec = DigitalOverlaySpec(patch=patch, position=(2, 3), radiance_scale=2000.0)
    out = apply_attack(scene, spec)
    assert out.base_radiance[3, 2, 0] == pytest.approx(2000.0)
    assert out.base_radiance[0, 0, 0] == pytest.approx(1000.0)
    half = apply_attack(scene, DigitalOverlaySpec(patch, (2, 3), opacity=0.5, radiance_scale=2000.0))
    assert half.base_radiance[3, 2, 0] == pytest.approx(1500.0)
    with pytest.raises(ImageError):
        apply_attack(scene, DigitalOverlaySpec(patch, (14, 14), radiance_scale=1.0))


def test_scaling_camouflage_rejected_at_scene_level():
    src = RgbImage(np.zeros((8, 8, 3), dtype=np.uint8))
    tgt = RgbImage(np.zeros((4, 4, 3), dtype=np.uint8))
    with pytest.raises(ImageError):
        apply_attack(gray_scene(), ScalingCamouflageSpec(src, tgt))


def _random_images(rng, sw=64, sh=64, tw=16, th=16):
    src = RgbImage(rng.integers(0, 256, size=(sh, sw, 3), dtype=np.uint8))
    # target guaranteed to differ from every sampled source pixel
    tgt_px = rng.integers(0, 256, size=(th, tw, 3), dtype=np.uint8)
    ys = sample_indices(sh, th)
    xs = sample_indices(sw, tw)
    sampled = src.pixels[np.ix_(ys, xs)]
    tgt_px = np.where(tgt_px == sampled, (tgt_px.astype(int) + 1) % 256, tgt_px).astype(np.uint8)
    return src, RgbImage(tgt_px)


def test_nearest_camouflage_exact_and_touches_only_sampled():
    rng = np.random.default_rng(21)
    src, tgt = _random_images(rng)
    result = craft_scaling_attack(src, tgt, "nearest")
    assert result.exact
    down = scale_array(result.image.pixels, 16, 16, "nearest")
    assert np.array_equal(down.astype(np.uint8), tgt.pixels)
    # exhaustive check of the modified pixel set
    ys = sample_indices(64, 16)
    xs = sample_indices(64, 16)
    expected = np.zeros((64, 64), dtype=bool)
    expected[np.ix_(ys, xs)] = True
    assert np.array_equal(result.modified, expected)
    assert int(result.modified.sum()) == 256
    # unsampled pixels identical to the source
    untouched = ~expected
    assert np.array_equal(result.image.pixels[untouched], src.pixels[untouched])


def test_nearest_camouflage_fixed_point():
    rng = np.random.default_rng(22)
    src = RgbImage(rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8))
    down = RgbImage(scale_array(src.pixels, 16, 16, "nearest").astype(np.uint8))
    result = craft_scaling_attack(src, down, "nearest")
    assert np.array_equal(result.image.pixels, src.pixels)
    assert int(result.modified.sum()) == 0


def test_bilinear_camouflage_within_one_dn():
    rng = np.random.default_rng(23)
    src = RgbImage(rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8))
    tgt = RgbImage(rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8))
    result = craft_scaling_attack(src, tgt, "bilinear")
    down = scale_array(result.image.pixels, 16, 16, "bilinear")
    assert np.abs(down - tgt.pixels.astype(np.float64)).max() <= 1.0
    assert result.residual_linf <= 1.0


def test_bilinear_camouflage_perturbs_less_than_replacement():
    rng = np.random.default_rng(24)
    src = RgbImage(rng.integers(100, 140, size=(64, 64, 3), dtype=np.uint8))
    tgt = RgbImage(rng.integers(100, 140, size=(16, 16, 3), dtype=np.uint8))
    result = craft_scaling_attack(src, tgt, "bilinear")
    delta = result.image.pixels.astype(int) - src.pixels.astype(int)
    # kernel support is 2x2 of 4 pixels per output: at most 1/4 of pixels move
    assert (delta != 0).mean() <= 0.26


def test_camouflage_requires_strictly_larger_source():
    small = RgbImage(np.zeros((8, 8, 3), dtype=np.uint8))
    with pytest.raises(ImageError):
        craft_scaling_attack(small, small, "nearest")


def test_attack_spec_json_round_trip():
    spec = FlickerSpec(frequency_hz=120.0, intensity=5.0, duty=0.25, region=RoiRect(1, 2, 3, 4))
    back = attack_spec_from_json(attack_spec_to_json(spec))
    assert back == spec
    blind = BlindingSpec(center=(3.0, 4.0), radius=2.0, intensity=9.0, psf_sigma=1.5)
    assert attack_spec_from_json(attack_spec_to_json(blind)) == blind
