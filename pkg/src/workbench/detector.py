"""Minimal pluggable object-detection harness.

The shipped detector is deliberately naive: red-dominance thresholding,
connected components, and a fill-ratio score. It stands in for the
application layer so pipeline effects on detection stay observable
without any ML dependency. All thresholds are arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .images import RawImage, RgbImage, RoiRect
from .isp import demosaic_rgb

RED_RATIO = 1.4
RED_FLOOR = 60
MIN_AREA = 64
SCORE_CUT = 0.5


@dataclass(frozen=True)
class Detection:
    label: str
    score: float
    box: RoiRect

    def iou(self, other: "RoiRect") -> float:
        ax0, ay0 = self.box.x, self.box.y
        ax1, ay1 = ax0 + self.box.w, ay0 + self.box.h
        bx0, by0 = other.x, other.y
        bx1, by1 = bx0 + other.w, by0 + other.h
        iw = max(0, min(ax1, bx1) - max(ax0, bx0))
        ih = max(0, min(ay1, by1) - max(ay0, by0))
        inter = iw * ih
        union = self.box.w * self.box.h + other.w * other.h - inter
        return inter / union if union else 0.0


def naive_stop_sign_detect(
    img: RgbImage,
    red_ratio: float = RED_RATIO,
    red_floor: int = RED_FLOOR,
    min_area: int = MIN_AREA,
    score_cut: float = SCORE_CUT,
) -> list[Detection]:
    """Red-dominant connected components scored by bounding-box fill ratio.

    Deterministic: detections sorted by descending score, then by (y, x).
    """
    px = img.pixels.astype(np.float64)
    r, g, b = px[:, :, 0], px[:, :, 1], px[:, :, 2]
    mask = (r > red_ratio * g) & (r > red_ratio * b) & (r > red_floor)
    labels, count = ndimage.label(mask)
    detections: list[Detection] = []
    for idx in range(1, count + 1):
        component = labels == idx
        area = int(component.sum())
        if area < min_area:
            continue
        ys, xs = np.nonzero(component)
        y0, y1 = int(ys.min()), int(ys.max())
        x0, x1 = int(xs.min()), int(xs.max())
        box = RoiRect(x0, y0, x1 - x0 + 1, y1 - y0 + 1)
        score = min(area / (box.w * box.h), 1.0)
        if score >= score_cut:
            detections.append(Detection("stop sign", float(score), box))
    detections.sort(key=lambda d: (-d.score, d.box.y, d.box.x))
    return detections


def demosaic_for_detection(raw: RawImage) -> RgbImage:
    """Pre-ISP evaluation path: bilinear demosaic plus linear 8-bit
    requantization, nothing else."""
    return demosaic_rgb(raw, "bilinear")


def detection_to_json(det: Detection) -> dict:
    return {
        "label": det.label,
        "score": round(det.score, 6),
        "box": [det.box.x, det.box.y, det.box.w, det.box.h],
    }
