"""Low-level image analysis: ROI crops, per-channel statistics,
histograms, and signed/absolute difference images, with CSV/SVG export.

Statistics are population statistics; SNR (mean/std) is only reported
for ROI-cropped inputs and is undefined when std is zero. Pre-ISP and
post-ISP images are never diffed against each other — their pixel
representations are not comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .images import ImageError, RawImage, RgbImage, RoiRect

CHANNEL_NAMES_RGB = ("R", "G", "B")
CHANNEL_NAMES_RAW = ("raw",)


@dataclass(frozen=True)
class ChannelStats:
    channel: str
    min: float
    max: float
    mean: float
    std: float
    snr: Optional[float] = None  # only for ROI-cropped inputs; None if undefined


@dataclass(frozen=True)
class Histogram:
    channel: str
    offset: int  # DN value of bin 0 (negative for signed diffs)
    counts: np.ndarray

    @property
    def bin_values(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.counts))


@dataclass(frozen=True)
class DiffResult:
    values: np.ndarray  # (h, w) or (h, w, 3) signed int32
    mode: str
    bit_depth: int
    stats: list[ChannelStats]
    histograms: list[Histogram]


def _planes(img: Union[RawImage, RgbImage]) -> tuple[np.ndarray, tuple[str, ...], int]:
    if isinstance(img, RawImage):
        return img.pixels[:, :, None].astype(np.int64), CHANNEL_NAMES_RAW, img.bit_depth
    return img.pixels.astype(np.int64), CHANNEL_NAMES_RGB, 8


def _crop(values: np.ndarray, roi: Optional[RoiRect]) -> np.ndarray:
    if roi is None:
        return values
    roi.validate_inside(values.shape[1], values.shape[0])
    ys, xs = roi.slices()
    return values[ys, xs]


def channel_stats(values: np.ndarray, name: str, with_snr: bool) -> ChannelStats:
    flat = values.astype(np.float64).ravel()
    mean = float(flat.mean())
    std = float(flat.std())  # population
    snr = None
    if with_snr and std > 0.0:
        snr = mean / std
    return ChannelStats(
        channel=name,
        min=float(flat.min()),
        max=float(flat.max()),
        mean=mean,
        std=std,
        snr=snr,
    )


def stats(
    img: Union[RawImage, RgbImage], roi: Optional[RoiRect] = None
) -> list[ChannelStats]:
    """Exact per-channel population statistics; SNR iff an ROI is given."""
    planes, names, _ = _planes(img)
    cropped = _crop(planes, roi)
    return [channel_stats(cropped[:, :, i], n, roi is not None) for i, n in enumerate(names)]


def histogram(
    img: Union[RawImage, RgbImage], roi: Optional[RoiRect] = None
) -> list[Histogram]:
    """Exact counts; bin i holds the number of samples with DN == i."""
    planes, names, bit_depth = _planes(img)
    cropped = _crop(planes, roi)
    n_bins = 1 << bit_depth
    out = []
    for i, name in enumerate(names):
        counts = np.bincount(cropped[:, :, i].ravel(), minlength=n_bins)
        out.append(Histogram(channel=name, offset=0, counts=counts))
    return out


def _check_compatible(a, b):
    if type(a) is not type(b):
        raise ImageError("cannot diff images of different types (pre-ISP vs post-ISP)")
    if isinstance(a, RawImage):
        if a.bit_depth != b.bit_depth:
            raise ImageError("bit depth mismatch")
        if a.cfa is not b.cfa:
            raise ImageError("CFA mismatch")
    if (a.width, a.height) != (b.width, b.height):
        raise ImageError(
            f"shape mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def diff(
    a: Union[RawImage, RgbImage],
    b: Union[RawImage, RgbImage],
    mode: str = "absolute",
    roi: Optional[RoiRect] = None,
) -> DiffResult:
    """Per-pixel (per-channel) a-b, signed or absolute, with statistics
    and histograms of the result."""
    if mode not in ("absolute", "signed"):
        raise ImageError(f"unknown diff mode {mode!r}")
    _check_compatible(a, b)
    pa, names, bit_depth = _planes(a)
    pb, _, _ = _planes(b)
    values = _crop(pa, roi) - _crop(pb, roi)
    if mode == "absolute":
        values = np.abs(values)
    full = (1 << bit_depth) - 1
    offset = 0 if mode == "absolute" else -full
    n_bins = full + 1 if mode == "absolute" else 2 * full + 1
    stats_list = []
    hists = []
    for i, name in enumerate(names):
        ch = values[:, :, i]
        stats_list.append(channel_stats(ch, name, roi is not None))
        counts = np.bincount((ch - offset).ravel(), minlength=n_bins)
        hists.append(Histogram(channel=name, offset=offset, counts=counts))
    out_values = values if values.shape[2] > 1 else values[:, :, 0]
    return DiffResult(
        values=out_values.astype(np.int32),
        mode=mode,
        bit_depth=bit_depth,
        stats=stats_list,
        histograms=hists,
    )


# --------------------------------------------------------------------------
# export


def _fmt(x: Optional[float]) -> str:
    if x is None:
        return "undefined"
    return f"{x:.6f}"


def stats_csv(named_stats: list[tuple[str, list[ChannelStats]]]) -> str:
    """CSV with one row per image/channel; metrics as columns."""
    lines = ["image,channel,min,max,mean,std,snr"]
    for image_name, stats_list in named_stats:
        for s in stats_list:
            lines.append(
                f"{image_name},{s.channel},{_fmt(s.min)},{_fmt(s.max)},"
                f"{_fmt(s.mean)},{_fmt(s.std)},{_fmt(s.snr)}"
            )
    return "\n".join(lines) + "\n"


_SVG_COLORS = {"R": "#cc0000", "G": "#00aa00", "B": "#0000cc", "raw": "#444444"}


def histogram_svg(hists: list[Histogram], width: int = 640, height: int = 360) -> str:
    """Deterministic polyline plot of per-channel histograms."""
    peak = max((int(h.counts.max()) for h in hists), default=0) or 1
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for h in hists:
        n = len(h.counts)
        xs = np.linspace(0, width, n)
        ys = height - h.counts / peak * (height - 20)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        color = _SVG_COLORS.get(h.channel, "#000000")
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def export_report(
    out_dir: str | Path,
    named_stats: list[tuple[str, list[ChannelStats]]],
    named_histograms: list[tuple[str, list[Histogram]]],
) -> list[Path]:
    """Write metrics.csv and one hist_<name>.svg per histogram set.

    Output bytes are deterministic for identical input.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out_dir / "metrics.csv"
    csv_path.write_text(stats_csv(named_stats), encoding="utf-8")
    written.append(csv_path)
    for name, hists in named_histograms:
        path = out_dir / f"hist_{name}.svg"
        path.write_text(histogram_svg(hists), encoding="utf-8")
        written.append(path)
    return written
