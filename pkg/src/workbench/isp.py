"""Data-preparation layer: demosaic, white balance, denoise, tone map,
crop, scale, compress. Stage order is fixed and each stage can be
bypassed through the config."""

from __future__ import annotations

import numpy as np

from .codec import compress_array
from .images import CfaPattern, ImageError, RawImage, RgbImage
from .pipeline_config import PipelineConfig

# Offsets within the 2x2 CFA cell, row-major.
_CELL_OFFSETS = ((0, 0), (0, 1), (1, 0), (1, 1))


def _plane_positions(cfa: CfaPattern, plane: str) -> list[tuple[int, int]]:
    return [off for off, name in zip(_CELL_OFFSETS, cfa.cell) if name == plane]


def _pad_edge(a: np.ndarray, n: int = 2) -> np.ndarray:
    return np.pad(a, n, mode="edge")


def _interp_plane(values: np.ndarray, mask: np.ndarray, method: str) -> np.ndarray:
    """Fill a sparse color plane (values valid where mask) over the full
    grid. Nearest copies the closest same-color sample; bilinear averages
    the 2 or 4 nearest same-color neighbors. Borders clamp to the edge."""
    h, w = values.shape
    out = np.zeros((h, w), dtype=np.float64)
    pv = _pad_edge(values)
    pm = _pad_edge(mask.astype(np.float64))
    # Same-color samples sit on a lattice with period 2: for any pixel,
    # candidate neighbors live within a 5x5 window. Accumulate weighted
    # sums ordered by distance class.
    offsets_by_dist = {
        0.0: [(0, 0)],
        1.0: [(-1, 0), (1, 0), (0, -1), (0, 1)],
        1.4142135623730951: [(-1, -1), (-1, 1), (1, -1), (1, 1)],
        2.0: [(-2, 0), (2, 0), (0, -2), (0, 2)],
    }
    filled = np.zeros((h, w), dtype=bool)
    for dist in sorted(offsets_by_dist):
        acc = np.zeros((h, w), dtype=np.float64)
        cnt = np.zeros((h, w), dtype=np.float64)
        for dy, dx in offsets_by_dist[dist]:
            sl = (slice(2 + dy, 2 + dy + h), slice(2 + dx, 2 + dx + w))
            acc += pv[sl] * pm[sl]
            cnt += pm[sl]
        has = (cnt > 0) & ~filled
        if method == "nearest":
            # deterministic tie-break: first offset in scan order wins
            first = np.full((h, w), np.nan)
            taken = np.zeros((h, w), dtype=bool)
            for dy, dx in offsets_by_dist[dist]:
                sl = (slice(2 + dy, 2 + dy + h), slice(2 + dx, 2 + dx + w))
                ok = (pm[sl] > 0) & ~taken
                first[ok] = pv[sl][ok]
                taken |= ok
            out[has] = first[has]
        else:
            out[has] = acc[has] / cnt[has]
        filled |= has
        if filled.all():
            break
    if not filled.all():
        raise AssertionError("CFA plane interpolation left holes")
    return out


def demosaic(raw: RawImage, method: str = "bilinear") -> np.ndarray:
    """CFA mosaic -> (h, w, 3) float64 linear RGB, same DN scale.

    RCCB treats clear as the green channel; RCCC returns clear-derived
    gray on G and B with the red plane from red sites; Mono has no color
    to reconstruct and is rejected.
    """
    if method not in ("nearest", "bilinear"):
        raise ImageError(f"unknown demosaic method {method!r}")
    if raw.cfa is CfaPattern.MONO:
        raise ImageError("Mono CFA carries no color; demosaic undefined")
    h, w = raw.height, raw.width
    values = raw.pixels.astype(np.float64)

    def plane(name: str) -> np.ndarray:
        mask = np.zeros((h, w), dtype=bool)
        for dy, dx in _plane_positions(raw.cfa, name):
            mask[dy::2, dx::2] = True
        return _interp_plane(values, mask, method)

    if raw.cfa in (CfaPattern.RGGB, CfaPattern.BGGR):
        rgb = np.stack([plane("R"), plane("G"), plane("B")], axis=2)
    elif raw.cfa is CfaPattern.RCCB:
        clear = plane("C")
        rgb = np.stack([plane("R"), clear, plane("B")], axis=2)
    else:  # RCCC
        gray = plane("C")
        rgb = np.stack([plane("R"), gray, gray], axis=2)
    return rgb


def demosaic_rgb(raw: RawImage, method: str = "bilinear") -> RgbImage:
    """Demosaic plus plain linear 8-bit requantization, nothing else."""
    rgb = demosaic(raw, method)
    out = np.clip(np.round(rgb / raw.full_scale * 255.0), 0, 255).astype(np.uint8)
    return RgbImage(out, metadata={"demosaic": method, "source_bit_depth": raw.bit_depth})


def scale_array(img: np.ndarray, target_w: int, target_h: int, method: str) -> np.ndarray:
    """Resize with half-pixel-center sampling; clamp-to-edge borders."""
    h, w = img.shape[:2]
    if method == "nearest":
        ys = sample_indices(h, target_h)
        xs = sample_indices(w, target_w)
        return img[ys][:, xs]
    if method != "bilinear":
        raise ImageError(f"unknown scale method {method!r}")
    coords_y = (np.arange(target_h) + 0.5) * (h / target_h) - 0.5
    coords_x = (np.arange(target_w) + 0.5) * (w / target_w) - 0.5
    y0 = np.clip(np.floor(coords_y).astype(int), 0, h - 1)
    x0 = np.clip(np.floor(coords_x).astype(int), 0, w - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    x1 = np.clip(x0 + 1, 0, w - 1)
    fy = np.clip(coords_y - y0, 0.0, 1.0)[:, None]
    fx = np.clip(coords_x - x0, 0.0, 1.0)[None, :]
    if img.ndim == 3:
        fy = fy[:, :, None]
        fx = fx[:, :, None]
    a = img[y0][:, x0].astype(np.float64)
    b = img[y0][:, x1].astype(np.float64)
    c = img[y1][:, x0].astype(np.float64)
    d = img[y1][:, x1].astype(np.float64)
    return (a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx)


def sample_indices(src: int, dst: int) -> np.ndarray:
    """Source indices picked by nearest-neighbor scaling (half-pixel
    convention): floor((i + 0.5) * src/dst), clamped."""
    return np.minimum(((np.arange(dst) + 0.5) * (src / dst)).astype(int), src - 1)


def bilinear_support(src: int, dst: int) -> list[tuple[tuple[int, int], tuple[float, float]]]:
    """Per output index: the (i0, i1) source pair and their weights used
    by bilinear scaling along one axis."""
    out = []
    for i in range(dst):
        c = (i + 0.5) * (src / dst) - 0.5
        i0 = int(np.clip(np.floor(c), 0, src - 1))
        i1 = min(i0 + 1, src - 1)
        f = float(np.clip(c - i0, 0.0, 1.0))
        out.append(((i0, i1), (1.0 - f, f)))
    return out


def median3(channel: np.ndarray) -> np.ndarray:
    """3x3 median filter with clamp-to-edge borders."""
    p = _pad_edge(channel, 1)
    h, w = channel.shape
    stack = np.stack(
        [p[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w] for dy in (-1, 0, 1) for dx in (-1, 0, 1)],
        axis=0,
    )
    return np.median(stack, axis=0)


def correct_defects(raw: RawImage, defects) -> RawImage:
    """Replace listed pixels with the median of their same-color
    neighbors (the 5x5 lattice ring around them)."""
    if not defects:
        return raw
    px = raw.pixels.astype(np.int64).copy()
    h, w = px.shape
    for y, x in defects:
        if not (0 <= y < h and 0 <= x < w):
            raise ImageError(f"defect pixel ({y}, {x}) outside {w}x{h} image")
        neigh = []
        for dy in (-2, 0, 2):
            for dx in (-2, 0, 2):
                if dy == 0 and dx == 0:
                    continue
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w:
                    neigh.append(raw.pixels[yy, xx])
        px[y, x] = int(np.median(neigh)) if neigh else px[y, x]
    return RawImage(px.astype(np.uint16), raw.bit_depth, raw.cfa, dict(raw.metadata))


def tone_map(linear: np.ndarray, in_max: float, gamma: float) -> np.ndarray:
    """out = round(255 * (in/in_max)^(1/gamma)), clipped to 8 bits."""
    x = np.clip(linear / in_max, 0.0, 1.0)
    return np.clip(np.round(255.0 * np.power(x, 1.0 / gamma)), 0, 255)


def isp_chain(raw: RawImage, config: PipelineConfig) -> RgbImage:
    """Fixed stage order: defect correction -> black-level subtract ->
    demosaic -> white balance -> denoise -> tone map -> 8-bit -> crop ->
    scale -> compress."""
    raw = correct_defects(raw, config.defect_map)
    linear = raw.pixels.astype(np.float64) - config.black_level
    np.clip(linear, 0.0, None, out=linear)
    work = RawImage(
        np.clip(np.round(linear), 0, raw.full_scale).astype(np.uint16),
        raw.bit_depth,
        raw.cfa,
        dict(raw.metadata),
    )
    rgb = demosaic(work, config.demosaic)
    gains = np.asarray(config.wb_gains, dtype=np.float64)
    rgb = rgb * gains[None, None, :]
    if config.denoise == "median3":
        rgb = np.stack([median3(rgb[:, :, c]) for c in range(3)], axis=2)
    out = tone_map(rgb, float(raw.full_scale), config.tone_gamma).astype(np.uint8)
    if config.crop is not None:
        config.crop.validate_inside(out.shape[1], out.shape[0])
        ys, xs = config.crop.slices()
        out = out[ys, xs]
    if config.scale is not None:
        scaled = scale_array(out, config.scale.target_w, config.scale.target_h, config.scale.method)
        out = np.clip(np.round(scaled), 0, 255).astype(np.uint8)
    if config.compress_quality is not None:
        out = compress_array(out, config.compress_quality)
    return RgbImage(out, metadata={"config": config.to_json()})
