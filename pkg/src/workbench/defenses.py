"""Defenses from the survey made executable: saturation-based blinding
detection, multi-ISP disagreement, and randomized readout."""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .detector import Detection
from .images import ImageError, RawImage, RgbImage, RoiRect, saturation_threshold
from .isp import isp_chain
from .pipeline_config import PipelineConfig

BLINDING_SCORE_THRESHOLD = 0.15
DISAGREEMENT_THRESHOLD = 0.5


@dataclass(frozen=True)
class DefenseReport:
    name: str
    score: float
    decision: str  # "attack_suspected" | "clean"
    threshold: float
    evidence: Optional[np.ndarray] = None  # per-pixel or per-region map

    @property
    def attack_suspected(self) -> bool:
        return self.decision == "attack_suspected"


def _decide(score: float, threshold: float) -> str:
    return "attack_suspected" if score > threshold else "clean"


def detect_blinding(
    img: Union[RawImage, RgbImage],
    roi: Optional[RoiRect] = None,
    threshold: float = BLINDING_SCORE_THRESHOLD,
) -> DefenseReport:
    """Score = fraction of samples at >= 98% of full scale inside the ROI."""
    if isinstance(img, RawImage):
        full = img.full_scale
        values = img.pixels
    else:
        full = 255
        values = img.pixels
    if roi is not None:
        roi.validate_inside(values.shape[1], values.shape[0])
        ys, xs = roi.slices()
        values = values[ys, xs]
    if values.size == 0:
        raise ImageError("empty ROI")
    mask = values >= saturation_threshold(full)
    score = float(mask.mean())
    return DefenseReport(
        name="saturation-blinding",
        score=score,
        decision=_decide(score, threshold),
        threshold=threshold,
        evidence=mask,
    )


def _boxes_mask(detections: Sequence[Detection], w: int, h: int) -> np.ndarray:
    mask = np.zeros((h, w), dtype=bool)
    for d in detections:
        ys, xs = d.box.slices()
        mask[ys, xs] = True
    return mask


def pairwise_box_disagreement(
    dets_a: Sequence[Detection], dets_b: Sequence[Detection], w: int, h: int
) -> float:
    """1 - Jaccard overlap of the union of detection boxes."""
    a = _boxes_mask(dets_a, w, h)
    b = _boxes_mask(dets_b, w, h)
    union = np.count_nonzero(a | b)
    if union == 0:
        return 0.0  # both found nothing: perfect agreement
    inter = np.count_nonzero(a & b)
    return 1.0 - inter / union


def defense_multi_pipeline(
    raw: RawImage,
    configs: Sequence[PipelineConfig],
    detector: Callable[[RgbImage], list[Detection]],
    threshold: float = DISAGREEMENT_THRESHOLD,
) -> DefenseReport:
    """Process one raw through several ISP variants and compare what the
    detector sees; content that survives only one processing path is
    suspicious."""
    if len(configs) < 2:
        raise ImageError("multi-pipeline defense needs at least 2 configs")
    outputs = [isp_chain(raw, cfg) for cfg in configs]
    detections = [detector(out) for out in outputs]
    worst = 0.0
    for i in range(len(outputs)):
        for j in range(i + 1, len(outputs)):
            wi, hi = outputs[i].width, outputs[i].height
            wj, hj = outputs[j].width, outputs[j].height
            w, h = max(wi, wj), max(hi, hj)
            worst = max(
                worst,
                pairwise_box_disagreement(detections[i], detections[j], w, h),
            )
    return DefenseReport(
        name="multi-isp",
        score=worst,
        decision=_decide(worst, threshold),
        threshold=threshold,
    )


def defense_random_readout(
    config: PipelineConfig, seed: Optional[int] = None
) -> PipelineConfig:
    """Return the config with a freshly seeded randomized readout order.

    Static scenes are unaffected; temporally modulated attacks lose their
    spatial stripe structure (the rows still sample the same value
    multiset, but scrambled)."""
    if seed is None:
        seed = secrets.randbits(32)
    return config.updated(readout_order="randomized", readout_seed=seed)


# --------------------------------------------------------------------------
# stripe metrics


def row_mean_profile(raw: RawImage) -> np.ndarray:
    return raw.pixels.astype(np.float64).mean(axis=1)


def autocorrelation(profile: np.ndarray) -> np.ndarray:
    """Normalized autocorrelation over positive lags (unit lag 0)."""
    x = profile - profile.mean()
    n = len(x)
    denom = float((x * x).sum())
    if denom == 0.0:
        return np.zeros(n)
    full = np.correlate(x, x, mode="full")
    return full[n - 1 :] / denom


def stripe_period(raw: RawImage, max_period: Optional[int] = None) -> Optional[int]:
    """Dominant stripe period in rows via the first prominent
    autocorrelation peak; None when no periodic structure stands out."""
    ac = autocorrelation(row_mean_profile(raw))
    n = len(ac)
    hi = min(max_period or n // 2, n - 1)
    best = None
    for lag in range(2, hi + 1):
        if ac[lag] >= ac[lag - 1] and ac[lag] >= ac[min(lag + 1, n - 1)] and ac[lag] > 0.2:
            best = lag
            break
    return best


def stripe_peak_at(raw: RawImage, period: int) -> float:
    """Autocorrelation magnitude at the expected stripe period (max over
    period +/- 1 to absorb discretization)."""
    ac = autocorrelation(row_mean_profile(raw))
    lags = [p for p in (period - 1, period, period + 1) if 0 < p < len(ac)]
    if not lags:
        return 0.0
    return float(max(ac[p] for p in lags))
