"""One capture feeds both outputs: the sensor-layer raw and the ISP result."""

from __future__ import annotations

from dataclasses import dataclass

from .images import RawImage, RgbImage
from .isp import isp_chain
from .pipeline_config import PipelineConfig
from .scene import TimeVaryingScene
from .sensor import capture, hdr_merge


@dataclass(frozen=True)
class PipelineResult:
    pre_isp: RawImage
    post_isp: RgbImage


def run_pipeline(scene: TimeVaryingScene, config: PipelineConfig) -> PipelineResult:
    """Run exactly one capture (or one HDR bracket) and process it.

    The pre-ISP output is the sensor-layer raw; the post-ISP output is
    isp_chain applied to that same raw, so the two are sample-consistent
    — there is no second exposure.
    """
    if config.hdr is None:
        raw = capture(scene, config)
    else:
        ratios = config.hdr.ratios()
        exposures = [
            capture(scene, config.updated(exposure_time=config.exposure_time * r, hdr=None))
            for r in ratios
        ]
        raw = hdr_merge(exposures, ratios)
        raw = RawImage(
            raw.pixels,
            raw.bit_depth,
            raw.cfa,
            {**raw.metadata, "config": config.to_json()},
        )
    return PipelineResult(pre_isp=raw, post_isp=isp_chain(raw, config))
