"""Time-varying radiance scenes: a static base field plus light modulators.

Modulator waveforms are integrated analytically over each row's exposure
window so captures are exact; the test suite cross-checks against a
fine-step numerical oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .images import ImageError, RgbImage, RoiRect, read_rgb


@dataclass(frozen=True)
class Waveform:
    """Temporal intensity profile, normalized to [0, 1].

    kinds: "constant"; "square" with frequency_hz and duty; "sine" with
    frequency_hz, shaped as 0.5*(1 + sin(2*pi*f*t)) so it stays
    non-negative.
    """

    kind: str = "constant"
    frequency_hz: float = 0.0
    duty: float = 0.5

    def __post_init__(self):
        if self.kind not in ("constant", "square", "sine"):
            raise ImageError(f"unknown waveform kind {self.kind!r}")
        if self.kind in ("square", "sine") and self.frequency_hz <= 0:
            raise ImageError("periodic waveforms need frequency_hz > 0")
        if self.kind == "square" and not 0.0 < self.duty < 1.0:
            raise ImageError(f"square duty must lie in (0,1), got {self.duty}")

    def integral(self, t0: float, t1: float) -> float:
        """Exact integral of the waveform over [t0, t1]."""
        if t1 <= t0:
            return 0.0
        if self.kind == "constant":
            return t1 - t0
        if self.kind == "square":
            return self._square_primitive(t1) - self._square_primitive(t0)
        # sine
        f = self.frequency_hz
        return 0.5 * (t1 - t0) + (
            math.cos(2 * math.pi * f * t0) - math.cos(2 * math.pi * f * t1)
        ) / (4 * math.pi * f)

    def _square_primitive(self, t: float) -> float:
        # area under the square wave from 0 to t (t >= 0)
        cycles = t * self.frequency_hz
        whole = math.floor(cycles)
        rem = cycles - whole
        return (whole * self.duty + min(rem, self.duty)) / self.frequency_hz

    def mean(self, t0: float, t1: float) -> float:
        if t1 <= t0:
            return self.value_at(t0)
        return self.integral(t0, t1) / (t1 - t0)

    def value_at(self, t: float) -> float:
        if self.kind == "constant":
            return 1.0
        if self.kind == "square":
            return 1.0 if (t * self.frequency_hz) % 1.0 < self.duty else 0.0
        return 0.5 * (1.0 + math.sin(2 * math.pi * self.frequency_hz * t))

    @property
    def is_time_varying(self) -> bool:
        return self.kind != "constant"


@dataclass(frozen=True)
class Disc:
    cx: float
    cy: float
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ImageError("disc radius must be >= 0")


Region = Union[RoiRect, Disc]


@dataclass(frozen=True)
class LightModulator:
    """Additive light source over a region, optionally flickering.

    psf_sigma spreads the light past the region boundary with a Gaussian
    falloff in distance (a simple flare model); 0 keeps a hard edge.
    """

    region: Region
    intensity: float
    channel_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    waveform: Waveform = field(default_factory=Waveform)
    psf_sigma: float = 0.0

    def __post_init__(self):
        if self.intensity < 0:
            raise ImageError("modulator intensity must be >= 0")
        if self.psf_sigma < 0:
            raise ImageError("psf_sigma must be >= 0")
        if any(not 0.0 <= w <= 1.0 for w in self.channel_weights):
            raise ImageError("channel weights must lie in [0, 1]")

    def spatial_map(self, width: int, height: int) -> np.ndarray:
        """(h, w) spread weight: 1 inside the region, Gaussian falloff
        with distance outside."""
        ys = np.arange(height, dtype=np.float64)[:, None]
        xs = np.arange(width, dtype=np.float64)[None, :]
        if isinstance(self.region, Disc):
            dist = np.hypot(xs - self.region.cx, ys - self.region.cy) - self.region.radius
        else:
            r = self.region
            dx = np.maximum(np.maximum(r.x - xs, xs - (r.x + r.w - 1)), 0.0)
            dy = np.maximum(np.maximum(r.y - ys, ys - (r.y + r.h - 1)), 0.0)
            dist = np.hypot(dx, dy)
        dist = np.maximum(dist, 0.0)
        if self.psf_sigma == 0.0:
            return (dist <= 0.0).astype(np.float64)
        return np.exp(-(dist**2) / (2.0 * self.psf_sigma**2))


@dataclass(frozen=True)
class TimeVaryingScene:
    """Linear radiance field (h, w, 3), radiance >= 0, plus modulators.

    Radiance units are DN per second at unit analog gain: a pixel exposed
    for t seconds accumulates radiance * t DN before gain and clamping.
    """

    base_radiance: np.ndarray
    modulators: tuple[LightModulator, ...] = ()

    def __post_init__(self):
        base = np.asarray(self.base_radiance, dtype=np.float64)
        if base.ndim != 3 or base.shape[2] != 3:
            raise ImageError(f"base radiance must be (h, w, 3), got {base.shape}")
        if np.any(base < 0):
            raise ImageError("radiance must be non-negative")
        base = base.copy()
        base.setflags(write=False)
        object.__setattr__(self, "base_radiance", base)
        object.__setattr__(self, "modulators", tuple(self.modulators))

    @property
    def width(self) -> int:
        return self.base_radiance.shape[1]

    @property
    def height(self) -> int:
        return self.base_radiance.shape[0]

    @property
    def is_time_varying(self) -> bool:
        return any(m.waveform.is_time_varying for m in self.modulators)

    def with_modulator(self, mod: LightModulator) -> "TimeVaryingScene":
        return TimeVaryingScene(self.base_radiance, self.modulators + (mod,))

    def mean_radiance_rows(
        self, rows: np.ndarray, t0: np.ndarray, t1: np.ndarray
    ) -> np.ndarray:
        """Mean radiance of the given rows over per-row windows [t0, t1].

        Returns (len(rows), w, 3). Exact for all waveform kinds.
        """
        rows = np.asarray(rows)
        out = self.base_radiance[rows].copy()
        for mod in self.modulators:
            spatial = mod.spatial_map(self.width, self.height)[rows]
            means = np.array(
                [mod.waveform.mean(a, b) for a, b in zip(t0, t1)], dtype=np.float64
            )
            contrib = spatial * mod.intensity
            weights = np.asarray(mod.channel_weights, dtype=np.float64)
            out += contrib[:, :, None] * weights[None, None, :] * means[:, None, None]
        return out

    def radiance_at(self, t: float) -> np.ndarray:
        """Instantaneous radiance field at time t, (h, w, 3)."""
        out = self.base_radiance.copy()
        for mod in self.modulators:
            spatial = mod.spatial_map(self.width, self.height)
            weights = np.asarray(mod.channel_weights, dtype=np.float64)
            out += (
                spatial[:, :, None]
                * weights[None, None, :]
                * (mod.intensity * mod.waveform.value_at(t))
            )
        return out


# --------------------------------------------------------------------------
# scene files: JSON with a base image reference or flat color


def _region_to_json(region: Region) -> dict:
    if isinstance(region, Disc):
        return {"disc": [region.cx, region.cy, region.radius]}
    return {"rect": [region.x, region.y, region.w, region.h]}


def _region_from_json(obj: dict) -> Region:
    if "disc" in obj:
        cx, cy, r = obj["disc"]
        return Disc(float(cx), float(cy), float(r))
    if "rect" in obj:
        x, y, w, h = obj["rect"]
        return RoiRect(int(x), int(y), int(w), int(h))
    raise ImageError(f"region needs 'disc' or 'rect': {obj}")


def modulator_to_json(mod: LightModulator) -> dict:
    wf: dict = {"kind": mod.waveform.kind}
    if mod.waveform.kind != "constant":
        wf["frequency_hz"] = mod.waveform.frequency_hz
    if mod.waveform.kind == "square":
        wf["duty"] = mod.waveform.duty
    return {
        "region": _region_to_json(mod.region),
        "intensity": mod.intensity,
        "channel_weights": list(mod.channel_weights),
        "waveform": wf,
        "psf_sigma": mod.psf_sigma,
    }


def modulator_from_json(obj: dict) -> LightModulator:
    wf = obj.get("waveform", {"kind": "constant"})
    return LightModulator(
        region=_region_from_json(obj["region"]),
        intensity=float(obj["intensity"]),
        channel_weights=tuple(obj.get("channel_weights", (1.0, 1.0, 1.0))),
        waveform=Waveform(
            kind=wf.get("kind", "constant"),
            frequency_hz=float(wf.get("frequency_hz", 0.0)),
            duty=float(wf.get("duty", 0.5)),
        ),
        psf_sigma=float(obj.get("psf_sigma", 0.0)),
    )


def load_scene(path: str | Path) -> TimeVaryingScene:
    """Scene JSON: {"base_image": <ppm path>, "radiance_scale": s} or
    {"width", "height", "base_color": [r,g,b]} plus "modulators"."""
    path = Path(path)
    obj = json.loads(path.read_text(encoding="utf-8"))
    scale = float(obj.get("radiance_scale", 1.0))
    if "base_image" in obj:
        img = read_rgb(path.parent / obj["base_image"])
        base = img.pixels.astype(np.float64) / 255.0 * scale
    else:
        w, h = int(obj["width"]), int(obj["height"])
        color = np.asarray(obj.get("base_color", (0.0, 0.0, 0.0)), dtype=np.float64)
        base = np.broadcast_to(color * scale, (h, w, 3)).copy()
    mods = tuple(modulator_from_json(m) for m in obj.get("modulators", ()))
    return TimeVaryingScene(base, mods)


def save_scene(scene: TimeVaryingScene, path: str | Path, base_image: str) -> None:
    """Write a scene back out; the base field goes to a sibling PPM scaled
    into 8 bits with radiance_scale preserving the peak."""
    path = Path(path)
    peak = float(scene.base_radiance.max()) or 1.0
    img = np.round(scene.base_radiance / peak * 255.0).astype(np.uint8)
    from .images import write_rgb  # local import to avoid cycle at module load

    write_rgb(RgbImage(img), path.parent / base_image)
    obj = {
        "base_image": base_image,
        "radiance_scale": peak,
        "modulators": [modulator_to_json(m) for m in scene.modulators],
    }
    path.write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")
