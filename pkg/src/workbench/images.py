"""Image containers and the portable on-disk formats.

Raw mosaics are stored as 16-bit big-endian binary PGM (P5) with a JSON
sidecar ``<path>.meta.json`` carrying bit depth, CFA pattern and a config
echo; processed images are 8-bit binary PPM (P6). Both round-trip
bit-exactly, which the golden tests rely on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

# Clear ("C") photosites respond to luminance with standard weights.
CLEAR_WEIGHTS = (0.299, 0.587, 0.114)

# Channel selectors: R/G/B pick one color plane, C mixes all three.
_SELECTORS = {
    "R": (1.0, 0.0, 0.0),
    "G": (0.0, 1.0, 0.0),
    "B": (0.0, 0.0, 1.0),
    "C": CLEAR_WEIGHTS,
}


class CfaPattern(Enum):
    """2x2 color-filter-array cell, row-major (top-left, top-right,
    bottom-left, bottom-right)."""

    RGGB = ("R", "G", "G", "B")
    BGGR = ("B", "G", "G", "R")
    RCCB = ("R", "C", "C", "B")
    RCCC = ("R", "C", "C", "C")
    MONO = ("C", "C", "C", "C")

    @property
    def cell(self) -> tuple[str, str, str, str]:
        return self.value

    def site(self, y: int, x: int) -> str:
        return self.value[(y % 2) * 2 + (x % 2)]

    def weights(self, h: int, w: int) -> np.ndarray:
        """(h, w, 3) per-pixel RGB response weights for this pattern."""
        out = np.empty((2, 2, 3), dtype=np.float64)
        for i in range(2):
            for j in range(2):
                out[i, j] = _SELECTORS[self.value[i * 2 + j]]
        return np.tile(out, ((h + 1) // 2, (w + 1) // 2, 1))[:h, :w]


class ImageError(ValueError):
    pass


@dataclass(frozen=True)
class RoiRect:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ImageError(f"ROI must be at least 1x1, got {self.w}x{self.h}")

    def validate_inside(self, width: int, height: int) -> "RoiRect":
        if self.x < 0 or self.y < 0 or self.x + self.w > width or self.y + self.h > height:
            raise ImageError(
                f"ROI {self} outside {width}x{height} image bounds"
            )
        return self

    def clamped(self, width: int, height: int) -> "RoiRect":
        x = min(max(self.x, 0), width - 1)
        y = min(max(self.y, 0), height - 1)
        return RoiRect(x, y, min(self.w, width - x), min(self.h, height - y))

    def slices(self) -> tuple[slice, slice]:
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)

    @classmethod
    def parse(cls, text: str) -> "RoiRect":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ImageError(f"ROI must be x,y,w,h — got {text!r}")
        return cls(*parts)


@dataclass(frozen=True)
class RawImage:
    """Single-channel CFA mosaic in integer DN, pre-ISP."""

    pixels: np.ndarray  # (h, w) uint16
    bit_depth: int = 10
    cfa: CfaPattern = CfaPattern.RGGB
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ImageError(f"raw pixels must be 2-D, got shape {px.shape}")
        if not 1 <= self.bit_depth <= 16:
            raise ImageError(f"bit_depth {self.bit_depth} outside 1..16")
        if px.dtype != np.uint16:
            if np.any(px < 0) or np.any(px > 65535):
                raise ImageError("raw pixel values outside uint16 range")
            px = px.astype(np.uint16)
        if px.size and int(px.max()) > self.full_scale:
            raise ImageError(
                f"pixel value {int(px.max())} exceeds {self.bit_depth}-bit full scale"
            )
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def full_scale(self) -> int:
        return (1 << self.bit_depth) - 1


@dataclass(frozen=True)
class RgbImage:
    """3-channel 8-bit image, post-ISP."""

    pixels: np.ndarray  # (h, w, 3) uint8
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ImageError(f"rgb pixels must be (h, w, 3), got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ImageError("rgb pixel values outside 0..255")
            px = px.astype(np.uint8)
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def saturation_threshold(full_scale: int) -> int:
    """A sample counts as saturated at or above 98% of full scale."""
    return int(np.ceil(0.98 * full_scale))


def saturated_fraction(values: np.ndarray, full_scale: int) -> float:
    values = np.asarray(values)
    if values.size == 0:
        raise ImageError("cannot compute saturation of an empty region")
    return float(np.count_nonzero(values >= saturation_threshold(full_scale)) / values.size)


# --------------------------------------------------------------------------
# file formats


def _json_default(obj: Any):
    if isinstance(obj, Enum):
        return obj.name
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def write_raw(raw: RawImage, path: str | Path) -> Path:
    """Store a raw mosaic as 16-bit big-endian P5 plus a JSON sidecar."""
    path = Path(path)
    header = f"P5\n{raw.width} {raw.height}\n65535\n".encode("ascii")
    path.write_bytes(header + raw.pixels.astype(">u2").tobytes())
    sidecar = {
        "width": raw.width,
        "height": raw.height,
        "bit_depth": raw.bit_depth,
        "cfa": raw.cfa.name,
        "metadata": raw.metadata,
    }
    Path(str(path) + ".meta.json").write_text(
        json.dumps(sidecar, indent=1, sort_keys=True, default=_json_default) + "\n",
        encoding="utf-8",
    )
    return path


def _read_pnm_header(data: bytes, magic: bytes, path: Path) -> tuple[int, int, int, int]:
    # returns (width, height, maxval, data offset); comments allowed
    if not data.startswith(magic):
        raise ImageError(f"{path}: expected {magic.decode()} file")
    pos = len(magic)
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageError(f"{path}: truncated header")
        fields.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    return fields[0], fields[1], fields[2], pos


def read_raw(path: str | Path) -> RawImage:
    path = Path(path)
    sidecar_path = Path(str(path) + ".meta.json")
    if not sidecar_path.exists():
        raise ImageError(f"missing sidecar {sidecar_path}")
    meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    data = path.read_bytes()
    width, height, maxval, offset = _read_pnm_header(data, b"P5", path)
    if maxval != 65535:
        raise ImageError(f"{path}: raw PGM must use maxval 65535, got {maxval}")
    if (meta.get("width"), meta.get("height")) != (width, height):
        raise ImageError(
            f"{path}: sidecar dimensions {meta.get('width')}x{meta.get('height')} "
            f"do not match PGM header {width}x{height}"
        )
    expected = width * height * 2
    body = data[offset : offset + expected]
    if len(body) != expected:
        raise ImageError(f"{path}: expected {expected} pixel bytes, got {len(body)}")
    pixels = np.frombuffer(body, dtype=">u2").reshape(height, width).astype(np.uint16)
    try:
        cfa = CfaPattern[meta["cfa"]]
    except KeyError:
        raise ImageError(f"{path}: sidecar has unknown cfa {meta.get('cfa')!r}") from None
    bit_depth = int(meta["bit_depth"])
    if pixels.size and int(pixels.max()) >= (1 << bit_depth):
        raise ImageError(
            f"{path}: pixel values exceed the sidecar bit depth of {bit_depth}"
        )
    return RawImage(pixels=pixels, bit_depth=bit_depth, cfa=cfa, metadata=meta.get("metadata", {}))


def write_rgb(img: RgbImage, path: str | Path) -> Path:
    path = Path(path)
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    path.write_bytes(header + img.pixels.tobytes())
    return path


def read_rgb(path: str | Path) -> RgbImage:
    path = Path(path)
    data = path.read_bytes()
    width, height, maxval, offset = _read_pnm_header(data, b"P6", path)
    if maxval != 255:
        raise ImageError(f"{path}: rgb PPM must use maxval 255, got {maxval}")
    expected = width * height * 3
    body = data[offset : offset + expected]
    if len(body) != expected:
        raise ImageError(f"{path}: expected {expected} pixel bytes, got {len(body)}")
    pixels = np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)
    return RgbImage(pixels=pixels)
