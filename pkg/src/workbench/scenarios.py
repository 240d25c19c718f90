"""Shipped synthetic scenes used by the acceptance suite, the CLI demos
and the service.

The stop-sign scenario mirrors the testbed's use case: a red octagon
sign on a gray background with a strong red-heavy light source placed
directly below it, aimed into the camera. Capturing it non-HDR washes
the sign into one large saturated blob; the HDR bracket recovers it.
The HDR rendering config carries AWB-style digital gains (red held down,
green/blue lifted), standing in for the adaptive processing a real HDR
camera mode applies.
"""

from __future__ import annotations

import numpy as np

from .attacks import BlindingSpec, FlickerSpec, apply_attack
from .images import CfaPattern, RgbImage, RoiRect
from .pipeline_config import HdrBracket, PipelineConfig
from .scene import TimeVaryingScene

# --------------------------------------------------------------------------
# stop-sign use case

SCENE_SIZE = 192
SIGN_CENTER = (96, 72)  # (x, y)
SIGN_APOTHEM = 26
LASER_CENTER = (96.0, 146.0)
LASER_RADIUS = 5.0
LASER_PSF_SIGMA = 52.0
LASER_INTENSITY = 2.6  # in full-scale units at the reference exposure
LASER_WEIGHTS = (1.0, 0.08, 0.07)

BG_GRAY = (0.30, 0.30, 0.30)
ROAD_GRAY = (0.24, 0.24, 0.24)
POLE_GRAY = (0.34, 0.34, 0.34)
FACE_RED = (0.78, 0.06, 0.05)

REFERENCE_EXPOSURE = 1.0e-3  # seconds
BIT_DEPTH = 10

HDR_WB_GAINS = (2.0, 9.0, 9.0)
HDR_BRACKET = HdrBracket(n_exposures=2, exposure_ratio=8.0)


def octagon_mask(h: int, w: int, cx: float, cy: float, apothem: float) -> np.ndarray:
    """Regular flat-top octagon: square cut by the diagonal band."""
    ys, xs = np.mgrid[0:h, 0:w]
    dx = np.abs(xs - cx)
    dy = np.abs(ys - cy)
    return (dx <= apothem) & (dy <= apothem) & (dx + dy <= apothem * np.sqrt(2.0))


def sign_roi() -> RoiRect:
    cx, cy = SIGN_CENTER
    r = SIGN_APOTHEM + 4
    return RoiRect(cx - r, cy - r, 2 * r + 1, 2 * r + 1)


def _radiance_units(values: np.ndarray) -> np.ndarray:
    # full-scale units -> DN/s at the reference exposure and unit gain
    full = (1 << BIT_DEPTH) - 1
    return values * full / REFERENCE_EXPOSURE


def build_stop_sign_scene(size: int = SCENE_SIZE) -> TimeVaryingScene:
    h = w = size
    base = np.empty((h, w, 3), dtype=np.float64)
    base[:] = BG_GRAY
    road_top = int(h * 0.82)
    base[road_top:] = ROAD_GRAY
    cx, cy = SIGN_CENTER
    pole_w = 3
    base[cy : road_top, cx - pole_w : cx + pole_w] = POLE_GRAY
    face = octagon_mask(h, w, cx, cy, SIGN_APOTHEM)
    base[face] = FACE_RED
    return TimeVaryingScene(_radiance_units(base))


def blinding_spec(intensity: float = LASER_INTENSITY) -> BlindingSpec:
    full = (1 << BIT_DEPTH) - 1
    return BlindingSpec(
        center=LASER_CENTER,
        radius=LASER_RADIUS,
        intensity=intensity * full / REFERENCE_EXPOSURE,
        channel_weights=LASER_WEIGHTS,
        psf_sigma=LASER_PSF_SIGMA,
    )


def build_blinded_scene(size: int = SCENE_SIZE) -> TimeVaryingScene:
    return apply_attack(build_stop_sign_scene(size), blinding_spec())


def config_non_hdr() -> PipelineConfig:
    return PipelineConfig(
        exposure_time=REFERENCE_EXPOSURE,
        line_time=30.0e-6,
        bit_depth=BIT_DEPTH,
        cfa=CfaPattern.RGGB,
        tone_gamma=2.2,
    )


def config_hdr() -> PipelineConfig:
    return config_non_hdr().updated(hdr=HDR_BRACKET, wb_gains=HDR_WB_GAINS)


# --------------------------------------------------------------------------
# rolling-shutter flicker scenario


def build_flicker_scene(
    width: int = 48,
    height: int = 480,
    frequency_hz: float = 1000.0,
    intensity: float = 1.2,
    duty: float = 0.5,
) -> TimeVaryingScene:
    """Uniform scene lit by a square-wave source covering the frame."""
    full = (1 << BIT_DEPTH) - 1
    base = np.full((height, width, 3), 0.18 * full / REFERENCE_EXPOSURE)
    scene = TimeVaryingScene(base)
    spec = FlickerSpec(
        frequency_hz=frequency_hz,
        intensity=intensity * full / REFERENCE_EXPOSURE,
        duty=duty,
        region=RoiRect(0, 0, width, height),
    )
    return apply_attack(scene, spec)


def flicker_config(line_time: float, exposure_time: float) -> PipelineConfig:
    return PipelineConfig(
        exposure_time=exposure_time,
        line_time=line_time,
        bit_depth=BIT_DEPTH,
        cfa=CfaPattern.MONO,
    )


# --------------------------------------------------------------------------
# deterministic test chart (codec / determinism fixtures)


def build_test_chart(width: int = 96, height: int = 64) -> RgbImage:
    ys, xs = np.mgrid[0:height, 0:width]
    r = (xs * 255 // max(width - 1, 1)).astype(np.uint8)
    g = (ys * 255 // max(height - 1, 1)).astype(np.uint8)
    b = (((xs // 8 + ys // 8) % 2) * 255).astype(np.uint8)
    disc = (xs - width / 2) ** 2 + (ys - height / 2) ** 2 < (min(width, height) / 4) ** 2
    r = np.where(disc, 220, r).astype(np.uint8)
    return RgbImage(np.stack([r, g, b], axis=2))
