"""Executable camera attacks: blinding, rolling-shutter flicker, digital
overlays, and scaling camouflage."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .images import ImageError, RgbImage, RoiRect
from .isp import bilinear_support, sample_indices, scale_array
from .scene import Disc, LightModulator, TimeVaryingScene, Waveform


@dataclass(frozen=True)
class BlindingSpec:
    """Gaussian-spread disc light aimed into the camera."""

    center: tuple[float, float]  # (x, y) pixels
    radius: float
    intensity: float  # linear radiance units
    channel_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    psf_sigma: float = 0.0

    def __post_init__(self):
        if self.intensity < 0:
            raise ImageError("blinding intensity must be >= 0")


@dataclass(frozen=True)
class FlickerSpec:
    """Periodic light over a region; exploits row-sequential readout."""

    frequency_hz: float
    intensity: float
    duty: float = 0.5
    region: Optional[RoiRect] = None  # None = whole frame
    channel_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if self.intensity < 0:
            raise ImageError("flicker intensity must be >= 0")


@dataclass(frozen=True)
class ScalingCamouflageSpec:
    """Attack image whose downscale reveals different content."""

    source: RgbImage
    target: RgbImage
    method: str = "nearest"

    def __post_init__(self):
        if self.method not in ("nearest", "bilinear"):
            raise ImageError(f"unknown scaler {self.method!r}")
        if self.source.width <= self.target.width or self.source.height <= self.target.height:
            raise ImageError("camouflage source must be strictly larger than the target")


@dataclass(frozen=True)
class DigitalOverlaySpec:
    """Plain digital patch composited onto the scene's base radiance."""

    patch: RgbImage
    position: tuple[int, int]  # (x, y)
    opacity: float = 1.0
    radiance_scale: float = 1.0  # patch DN 255 maps to this radiance

    def __post_init__(self):
        if not 0.0 <= self.opacity <= 1.0:
            raise ImageError("overlay opacity must lie in [0, 1]")


AttackSpec = Union[BlindingSpec, FlickerSpec, ScalingCamouflageSpec, DigitalOverlaySpec]


def apply_attack(scene: TimeVaryingScene, spec: AttackSpec) -> TimeVaryingScene:
    """Inject a scene-level attack; returns a new scene.

    Scaling camouflage is not scene-level (it crafts an image for the
    scaler) and is rejected here — use craft_scaling_attack.
    """
    if isinstance(spec, ScalingCamouflageSpec):
        raise ImageError(
            "scaling camouflage crafts an input image; it cannot be injected "
            "into a scene — use craft_scaling_attack"
        )
    if isinstance(spec, BlindingSpec):
        cx, cy = spec.center
        if not (0 <= cx < scene.width and 0 <= cy < scene.height):
            raise ImageError(f"blinding center {spec.center} outside scene bounds")
        mod = LightModulator(
            region=Disc(cx, cy, spec.radius),
            intensity=spec.intensity,
            channel_weights=spec.channel_weights,
            waveform=Waveform("constant"),
            psf_sigma=spec.psf_sigma,
        )
        return scene.with_modulator(mod)
    if isinstance(spec, FlickerSpec):
        region = spec.region or RoiRect(0, 0, scene.width, scene.height)
        region.validate_inside(scene.width, scene.height)
        mod = LightModulator(
            region=region,
            intensity=spec.intensity,
            channel_weights=spec.channel_weights,
            waveform=Waveform("square", frequency_hz=spec.frequency_hz, duty=spec.duty),
        )
        return scene.with_modulator(mod)
    if isinstance(spec, DigitalOverlaySpec):
        x, y = spec.position
        patch = spec.patch
        if x < 0 or y < 0 or x + patch.width > scene.width or y + patch.height > scene.height:
            raise ImageError("overlay patch outside scene bounds")
        base = scene.base_radiance.copy()
        region = base[y : y + patch.height, x : x + patch.width]
        patch_rad = patch.pixels.astype(np.float64) / 255.0 * spec.radiance_scale
        base[y : y + patch.height, x : x + patch.width] = (
            (1.0 - spec.opacity) * region + spec.opacity * patch_rad
        )
        return TimeVaryingScene(base, scene.modulators)
    raise ImageError(f"unknown attack spec {type(spec).__name__}")


@dataclass(frozen=True)
class CamouflageResult:
    image: RgbImage
    modified: np.ndarray  # bool mask of touched pixels
    residual_linf: float  # |downscale(image) - target| max, DN

    @property
    def exact(self) -> bool:
        return self.residual_linf == 0.0


def craft_scaling_attack(
    source: RgbImage, target: RgbImage, method: str = "nearest", max_iters: int = 50
) -> CamouflageResult:
    """Craft A so that downscale(A) = target while A stays close to source.

    nearest: overwrite exactly the pixels the scaler samples; everything
    else is untouched and the downscale is exact.

    bilinear: per-output-pixel minimal-L2 correction over the kernel
    support (A += w * delta / |w|^2), iterated with clamping to 0..255;
    overlapping supports converge in a few sweeps. The residual L-inf is
    reported; for non-overlapping supports it is at most the rounding
    half-DN.
    """
    spec = ScalingCamouflageSpec(source, target, method)  # validates shapes
    sh, sw = source.height, source.width
    th, tw = target.height, target.width
    src = source.pixels.astype(np.float64)
    tgt = target.pixels.astype(np.float64)

    if method == "nearest":
        ys = sample_indices(sh, th)
        xs = sample_indices(sw, tw)
        out = src.copy()
        out[np.ix_(ys, xs)] = tgt
        modified = np.zeros((sh, sw), dtype=bool)
        modified[np.ix_(ys, xs)] = np.any(out[np.ix_(ys, xs)] != src[np.ix_(ys, xs)], axis=2)
        img = RgbImage(out.astype(np.uint8))
        down = scale_array(img.pixels, tw, th, "nearest")
        residual = float(np.abs(down - tgt).max())
        return CamouflageResult(img, modified, residual)

    # bilinear: alternate least-squares corrections and box clamping
    rows = bilinear_support(sh, th)
    cols = bilinear_support(sw, tw)
    work = src.copy()
    for _ in range(max_iters):
        worst = 0.0
        for oy, ((y0, y1), (wy0, wy1)) in enumerate(rows):
            for ox, ((x0, x1), (wx0, wx1)) in enumerate(cols):
                idx_y = (y0, y0, y1, y1)
                idx_x = (x0, x1, x0, x1)
                w = np.array([wy0 * wx0, wy0 * wx1, wy1 * wx0, wy1 * wx1])
                patch = work[idx_y, idx_x, :]
                current = (w[:, None] * patch).sum(axis=0)
                delta = tgt[oy, ox] - current
                worst = max(worst, float(np.abs(delta).max()))
                norm = float((w**2).sum())
                # add.at accumulates on duplicate indices from edge clamping
                np.add.at(work, (idx_y, idx_x), w[:, None] * (delta / norm)[None, :])
        np.clip(work, 0.0, 255.0, out=work)
        if worst < 0.25:
            break
    out = np.round(work).astype(np.uint8)
    img = RgbImage(out)
    down = scale_array(out, tw, th, "bilinear")
    residual = float(np.abs(down - tgt).max())
    modified = np.any(out != source.pixels, axis=2)
    return CamouflageResult(img, modified, residual)


# --------------------------------------------------------------------------
# JSON attack specs (CLI / service surface)


def attack_spec_from_json(obj: dict) -> AttackSpec:
    kind = obj.get("kind")
    if kind == "blinding":
        return BlindingSpec(
            center=tuple(obj["center"]),
            radius=float(obj["radius"]),
            intensity=float(obj["intensity"]),
            channel_weights=tuple(obj.get("channel_weights", (1.0, 1.0, 1.0))),
            psf_sigma=float(obj.get("psf_sigma", 0.0)),
        )
    if kind == "flicker":
        region = obj.get("region")
        return FlickerSpec(
            frequency_hz=float(obj["frequency_hz"]),
            intensity=float(obj["intensity"]),
            duty=float(obj.get("duty", 0.5)),
            region=RoiRect(*region) if region else None,
            channel_weights=tuple(obj.get("channel_weights", (1.0, 1.0, 1.0))),
        )
    if kind == "overlay":
        from .images import read_rgb

        return DigitalOverlaySpec(
            patch=read_rgb(obj["patch"]),
            position=tuple(obj["position"]),
            opacity=float(obj.get("opacity", 1.0)),
            radiance_scale=float(obj.get("radiance_scale", 1.0)),
        )
    raise ImageError(f"unknown attack kind {kind!r}")


def attack_spec_to_json(spec: AttackSpec) -> dict:
    if isinstance(spec, BlindingSpec):
        return {
            "kind": "blinding",
            "center": list(spec.center),
            "radius": spec.radius,
            "intensity": spec.intensity,
            "channel_weights": list(spec.channel_weights),
            "psf_sigma": spec.psf_sigma,
        }
    if isinstance(spec, FlickerSpec):
        return {
            "kind": "flicker",
            "frequency_hz": spec.frequency_hz,
            "intensity": spec.intensity,
            "duty": spec.duty,
            "region": [spec.region.x, spec.region.y, spec.region.w, spec.region.h]
            if spec.region
            else None,
            "channel_weights": list(spec.channel_weights),
        }
    raise ImageError(f"cannot serialize {type(spec).__name__} to JSON")
