"""Desk-scale camera image-pipeline workbench.

Simulates the sensor and data-preparation layers of an automotive camera
(rolling-shutter exposure, CFA mosaic, HDR bracketing, ISP stages),
injects light/flicker/scaling attacks, evaluates defenses, and scores
published attacks with the ISO 21434 attack-potential risk method.
"""

__version__ = "0.1.0"

from .images import CfaPattern, RawImage, RgbImage, RoiRect
from .pipeline import PipelineResult, run_pipeline
from .pipeline_config import HdrBracket, PipelineConfig, ScaleSpec
from .scene import Disc, LightModulator, TimeVaryingScene, Waveform

__all__ = [
    "CfaPattern",
    "Disc",
    "HdrBracket",
    "LightModulator",
    "PipelineConfig",
    "PipelineResult",
    "RawImage",
    "RgbImage",
    "RoiRect",
    "ScaleSpec",
    "TimeVaryingScene",
    "Waveform",
    "run_pipeline",
]
