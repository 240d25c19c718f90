"""Sensor-layer model: rolling-shutter exposure, CFA sampling, gain,
black level, quantization, and bracketed HDR merging."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .images import ImageError, RawImage, saturation_threshold
from .pipeline_config import PipelineConfig
from .scene import TimeVaryingScene


def row_schedule(config: PipelineConfig, height: int) -> np.ndarray:
    """Time-slot index per spatial row.

    Sequential readout exposes row r during slot r; randomized readout
    permutes the slots with the configured seed.
    """
    if config.readout_order == "sequential":
        return np.arange(height)
    rng = np.random.default_rng(config.readout_seed)
    return rng.permutation(height)


def capture(scene: TimeVaryingScene, config: PipelineConfig) -> RawImage:
    """Expose the scene through the CFA, row by row.

    Row r integrates radiance over [slot*line_time, slot*line_time +
    exposure_time]; DN = clamp(round(integral * analog_gain *
    cfa_weight) + black_level, 0, full_scale).
    """
    h, w = scene.height, scene.width
    if h < 1 or w < 1:
        raise ImageError("scene must be at least 1x1")
    slots = row_schedule(config, h)
    t0 = slots * config.line_time
    t1 = t0 + config.exposure_time

    rows = np.arange(h)
    mean_rad = scene.mean_radiance_rows(rows, t0, t1)  # (h, w, 3)
    weights = config.cfa.weights(h, w)  # (h, w, 3)
    signal = (mean_rad * weights).sum(axis=2) * config.exposure_time * config.analog_gain

    if config.noise_sigma > 0.0 or config.noise_shot:
        rng = np.random.default_rng(config.noise_seed)
        if config.noise_shot:
            signal = signal + rng.normal(0.0, 1.0, signal.shape) * np.sqrt(
                np.maximum(signal, 0.0)
            )
        if config.noise_sigma > 0.0:
            signal = signal + rng.normal(0.0, config.noise_sigma, signal.shape)

    full = (1 << config.bit_depth) - 1
    dn = np.clip(np.round(signal) + config.black_level, 0, full).astype(np.uint16)
    return RawImage(
        pixels=dn,
        bit_depth=config.bit_depth,
        cfa=config.cfa,
        metadata={"config": config.to_json(), "exposure_time": config.exposure_time},
    )


def capture_reference(
    scene: TimeVaryingScene, config: PipelineConfig, time_step: float = 1e-6
) -> RawImage:
    """Brute-force capture: per-row numerical integration of the waveforms
    at fixed time steps instead of the analytic integral. Independent
    oracle for the rolling-shutter tests (spatial structure is time-
    invariant and shared; only the temporal integration differs)."""
    h, w = scene.height, scene.width
    slots = row_schedule(config, h)
    full = (1 << config.bit_depth) - 1
    weights = config.cfa.weights(h, w)
    mean_rad = scene.base_radiance.copy()
    for mod in scene.modulators:
        spatial = mod.spatial_map(w, h)
        ch = np.asarray(mod.channel_weights, dtype=np.float64)
        means = np.empty(h, dtype=np.float64)
        for r in range(h):
            t0 = slots[r] * config.line_time
            t1 = t0 + config.exposure_time
            n = max(int(math.ceil((t1 - t0) / time_step)), 1)
            ts = t0 + (np.arange(n) + 0.5) * (t1 - t0) / n
            wf = mod.waveform
            if wf.kind == "constant":
                sampled = np.ones(n)
            elif wf.kind == "square":
                sampled = ((ts * wf.frequency_hz) % 1.0 < wf.duty).astype(np.float64)
            else:
                sampled = 0.5 * (1.0 + np.sin(2 * np.pi * wf.frequency_hz * ts))
            means[r] = sampled.mean()
        mean_rad += (
            spatial[:, :, None] * ch[None, None, :] * (mod.intensity * means)[:, None, None]
        )
    signal = (mean_rad * weights).sum(axis=2) * config.exposure_time * config.analog_gain
    dn = np.clip(np.round(signal) + config.black_level, 0, full).astype(np.uint16)
    return RawImage(pixels=dn, bit_depth=config.bit_depth, cfa=config.cfa)


def hdr_merge(exposures: Sequence[RawImage], ratios: Sequence[float]) -> RawImage:
    """Merge bracketed exposures into one extended-range raw.

    Per pixel, the longest exposure still below the 98% saturation
    threshold wins; its DN is divided by its exposure ratio, which maps
    everything into the linear domain of the first (longest) exposure.
    The output full scale is full_scale/min(ratio), so recovered
    highlights keep headroom instead of clipping; only pixels saturated
    in every exposure sit at the output full scale.
    """
    if len(exposures) < 2:
        raise ImageError("HDR merge needs at least 2 exposures")
    if len(ratios) != len(exposures):
        raise ImageError("one exposure ratio per exposure required")
    if any(r2 >= r1 for r1, r2 in zip(ratios, ratios[1:])):
        raise ImageError(f"exposure ratios must be strictly decreasing, got {list(ratios)}")
    if any(r <= 0 for r in ratios):
        raise ImageError("exposure ratios must be positive")
    first = exposures[0]
    for e in exposures[1:]:
        if (e.width, e.height) != (first.width, first.height):
            raise ImageError("exposure geometry mismatch")
        if e.cfa is not first.cfa or e.bit_depth != first.bit_depth:
            raise ImageError("exposure CFA/bit-depth mismatch")

    fs_in = first.full_scale
    thresh = saturation_threshold(fs_in)
    fs_out = int(round(fs_in / ratios[-1]))
    # the merged raw still lives in a 16-bit container; very wide
    # brackets quantize more coarsely instead of overflowing
    out_scale = 1.0
    if fs_out > 65535:
        out_scale = 65535.0 / fs_out
        fs_out = 65535
    bit_out = max(int(math.ceil(math.log2(fs_out + 1))), first.bit_depth)

    merged = np.full((first.height, first.width), float(fs_out), dtype=np.float64)
    chosen = np.zeros(merged.shape, dtype=bool)
    for img, ratio in zip(exposures, ratios):
        px = img.pixels.astype(np.float64)
        usable = (~chosen) & (px < thresh)
        merged[usable] = px[usable] / ratio * out_scale
        chosen |= usable

    recovered = chosen & (exposures[0].pixels >= thresh)
    dn = np.clip(np.round(merged), 0, fs_out).astype(np.uint16)
    return RawImage(
        pixels=dn,
        bit_depth=bit_out,
        cfa=first.cfa,
        metadata={
            "hdr": {
                "ratios": [float(r) for r in ratios],
                "source_bit_depth": first.bit_depth,
                "full_scale": fs_out,
                "recovered_fraction": float(recovered.mean()),
                "unrecovered_fraction": float((~chosen).mean()),
            },
            **exposures[0].metadata,
        },
    )
