"""Every tunable knob across the sensor and data-preparation layers."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .images import CfaPattern, ImageError, RoiRect


@dataclass(frozen=True)
class HdrBracket:
    n_exposures: int = 2
    exposure_ratio: float = 8.0

    def __post_init__(self):
        if self.n_exposures < 2:
            raise ImageError("HDR bracket needs n_exposures >= 2")
        if self.exposure_ratio <= 1.0:
            raise ImageError("HDR exposure_ratio must be > 1")

    def ratios(self) -> list[float]:
        return [self.exposure_ratio**-i for i in range(self.n_exposures)]


@dataclass(frozen=True)
class ScaleSpec:
    target_w: int
    target_h: int
    method: str = "bilinear"

    def __post_init__(self):
        if self.target_w < 1 or self.target_h < 1:
            raise ImageError("scale target must be at least 1x1")
        if self.method not in ("nearest", "bilinear"):
            raise ImageError(f"unknown scale method {self.method!r}")


@dataclass(frozen=True)
class PipelineConfig:
    # sensor layer
    exposure_time: float = 1.0e-3  # seconds
    analog_gain: float = 1.0
    line_time: float = 30.0e-6  # rolling-shutter row interval, seconds
    readout_order: str = "sequential"  # or "randomized"
    readout_seed: int = 0
    hdr: Optional[HdrBracket] = None
    bit_depth: int = 10
    cfa: CfaPattern = CfaPattern.RGGB
    black_level: int = 0
    defect_map: tuple[tuple[int, int], ...] = ()  # (y, x) pixels
    noise_sigma: float = 0.0  # read noise in DN, off by default
    noise_shot: bool = False
    noise_seed: int = 0
    # data-preparation layer
    tone_gamma: float = 1.0
    wb_gains: tuple[float, float, float] = (1.0, 1.0, 1.0)
    demosaic: str = "bilinear"  # or "nearest"
    denoise: str = "off"  # or "median3"
    scale: Optional[ScaleSpec] = None
    crop: Optional[RoiRect] = None
    compress_quality: Optional[int] = None  # 1..100, None = off
    output_bit_depth: int = 8

    def __post_init__(self):
        if self.exposure_time <= 0:
            raise ImageError("exposure_time must be > 0")
        if self.analog_gain < 1.0:
            raise ImageError("analog_gain must be >= 1")
        if self.line_time <= 0:
            raise ImageError("line_time must be > 0")
        if self.readout_order not in ("sequential", "randomized"):
            raise ImageError(f"unknown readout_order {self.readout_order!r}")
        if not 1 <= self.bit_depth <= 16:
            raise ImageError("bit_depth must lie in 1..16")
        if self.black_level < 0:
            raise ImageError("black_level must be >= 0")
        if self.tone_gamma <= 0:
            raise ImageError("tone_gamma must be > 0")
        if len(self.wb_gains) != 3 or any(g < 0 for g in self.wb_gains):
            raise ImageError("wb_gains must be three non-negative values")
        if self.demosaic not in ("nearest", "bilinear"):
            raise ImageError(f"unknown demosaic method {self.demosaic!r}")
        if self.denoise not in ("off", "median3"):
            raise ImageError(f"unknown denoise mode {self.denoise!r}")
        if self.compress_quality is not None and not 1 <= self.compress_quality <= 100:
            raise ImageError("compress_quality must lie in 1..100")
        if self.output_bit_depth != 8:
            raise ImageError("only 8-bit output is supported")
        object.__setattr__(self, "defect_map", tuple(tuple(p) for p in self.defect_map))
        object.__setattr__(self, "wb_gains", tuple(float(g) for g in self.wb_gains))

    def to_json(self) -> dict:
        obj = {
            "exposure_time": self.exposure_time,
            "analog_gain": self.analog_gain,
            "line_time": self.line_time,
            "readout_order": self.readout_order,
            "readout_seed": self.readout_seed,
            "hdr": (
                {"n_exposures": self.hdr.n_exposures, "exposure_ratio": self.hdr.exposure_ratio}
                if self.hdr
                else "off"
            ),
            "bit_depth": self.bit_depth,
            "cfa": self.cfa.name,
            "black_level": self.black_level,
            "defect_map": [list(p) for p in self.defect_map],
            "noise_sigma": self.noise_sigma,
            "noise_shot": self.noise_shot,
            "noise_seed": self.noise_seed,
            "tone_gamma": self.tone_gamma,
            "wb_gains": list(self.wb_gains),
            "demosaic": self.demosaic,
            "denoise": self.denoise,
            "scale": (
                {"target_w": self.scale.target_w, "target_h": self.scale.target_h,
                 "method": self.scale.method}
                if self.scale
                else None
            ),
            "crop": [self.crop.x, self.crop.y, self.crop.w, self.crop.h] if self.crop else None,
            "compress_quality": self.compress_quality,
            "output_bit_depth": self.output_bit_depth,
        }
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "PipelineConfig":
        kwargs = dict(obj)
        hdr = kwargs.get("hdr")
        if hdr in (None, "off"):
            kwargs["hdr"] = None
        elif isinstance(hdr, dict):
            kwargs["hdr"] = HdrBracket(
                n_exposures=int(hdr.get("n_exposures", 2)),
                exposure_ratio=float(hdr.get("exposure_ratio", 8.0)),
            )
        else:
            raise ImageError(f"hdr must be 'off' or an object, got {hdr!r}")
        if "cfa" in kwargs:
            try:
                kwargs["cfa"] = CfaPattern[kwargs["cfa"]]
            except KeyError:
                raise ImageError(f"unknown cfa {kwargs['cfa']!r}") from None
        scale = kwargs.get("scale")
        if scale:
            kwargs["scale"] = ScaleSpec(
                target_w=int(scale["target_w"]),
                target_h=int(scale["target_h"]),
                method=scale.get("method", "bilinear"),
            )
        crop = kwargs.get("crop")
        if crop:
            kwargs["crop"] = RoiRect(*[int(v) for v in crop])
        if "wb_gains" in kwargs:
            kwargs["wb_gains"] = tuple(kwargs["wb_gains"])
        if "defect_map" in kwargs:
            kwargs["defect_map"] = tuple(tuple(int(v) for v in p) for p in kwargs["defect_map"])
        unknown = set(kwargs) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ImageError(f"unknown config fields: {sorted(unknown)}")
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def updated(self, **changes) -> "PipelineConfig":
        return replace(self, **changes)
