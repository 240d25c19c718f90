"""Local HTTP service steering live capture sessions for the browser UI.

Session state is revision-guarded: config writes carry the revision they
were based on and stale writes are rejected with 409, so a second client
can never interleave partial updates. All pixel math happens here; the
UI renders server responses verbatim.
"""

from __future__ import annotations

import base64
import os
import threading
import time
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .analysis import diff, stats
from .attacks import apply_attack, attack_spec_from_json
from .detector import demosaic_for_detection, detection_to_json, naive_stop_sign_detect
from .images import ImageError, RgbImage, RoiRect, read_raw, read_rgb, write_raw, write_rgb
from .isp import scale_array
from .pipeline import run_pipeline
from .pipeline_config import PipelineConfig
from .risk import (
    evaluate_catalog,
    load_builtin_catalog,
    risk_matrix,
)
from .scenarios import (
    build_blinded_scene,
    build_flicker_scene,
    build_stop_sign_scene,
    config_hdr,
    config_non_hdr,
)
from .scene import TimeVaryingScene

import numpy as np

SCENARIOS = {
    "stop_sign": build_stop_sign_scene,
    "stop_sign_blinded": build_blinded_scene,
    "flicker": build_flicker_scene,
}


class Session:
    def __init__(self, session_id: str, scene: TimeVaryingScene, config: PipelineConfig):
        self.id = session_id
        self.base_scene = scene
        self.config = config
        self.revision = 1
        self.attack: Optional[dict] = None
        self.measurements: list[dict] = []
        self.lock = threading.Lock()

    def effective_scene(self) -> TimeVaryingScene:
        if self.attack is None:
            return self.base_scene
        return apply_attack(self.base_scene, attack_spec_from_json(self.attack))


class CreateSessionBody(BaseModel):
    scenario: str = Field(default="stop_sign")
    config: Optional[dict] = None
    hdr_preset: bool = False


class PutConfigBody(BaseModel):
    revision: int
    config: dict


class PutAttackBody(BaseModel):
    spec: Optional[dict] = None


def _ppm_bytes(img: RgbImage) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def create_app(data_dir: str | Path = "./workbench-data", ui_dir: Optional[str] = None) -> FastAPI:
    data_dir = Path(data_dir)
    app = FastAPI(title="image-pipeline workbench")
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        with store_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    def get_measurement(session: Session, index: int) -> dict:
        if not 0 <= index < len(session.measurements):
            raise HTTPException(
                status_code=404, detail=f"unknown measurement {index}"
            )
        return session.measurements[index]

    def parse_config(obj: dict) -> PipelineConfig:
        try:
            return PipelineConfig.from_json(obj)
        except (ImageError, KeyError, TypeError, ValueError) as e:
            raise HTTPException(status_code=400, detail=f"config: {e}") from e

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        builder = SCENARIOS.get(body.scenario)
        if builder is None:
            raise HTTPException(
                status_code=400,
                detail=f"scenario: unknown value {body.scenario!r}; "
                f"expected one of {sorted(SCENARIOS)}",
            )
        if body.config is not None:
            config = parse_config(body.config)
        else:
            config = config_hdr() if body.hdr_preset else config_non_hdr()
        session_id = uuid.uuid4().hex[:12]
        session = Session(session_id, builder(), config)
        with store_lock:
            sessions[session_id] = session
        return {"id": session_id, "revision": session.revision, "config": config.to_json()}

    @app.get("/sessions/{session_id}/config")
    def get_config(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return {"revision": session.revision, "config": session.config.to_json()}

    @app.put("/sessions/{session_id}/config")
    def put_config(session_id: str, body: PutConfigBody):
        session = get_session(session_id)
        config = parse_config(body.config)
        with session.lock:
            if body.revision != session.revision:
                raise HTTPException(
                    status_code=409,
                    detail=f"stale revision {body.revision}, current {session.revision}",
                )
            session.config = config
            session.revision += 1
            return {"revision": session.revision, "config": session.config.to_json()}

    @app.put("/sessions/{session_id}/attack")
    def put_attack(session_id: str, body: PutAttackBody):
        session = get_session(session_id)
        if body.spec is not None:
            try:
                spec = attack_spec_from_json(body.spec)
                apply_attack(session.base_scene, spec)  # validate geometry
            except (ImageError, KeyError, TypeError, ValueError) as e:
                raise HTTPException(status_code=400, detail=f"spec: {e}") from e
        with session.lock:
            session.attack = body.spec
            session.revision += 1
            return {"revision": session.revision, "attack": session.attack}

    @app.get("/sessions/{session_id}/preview")
    def preview(session_id: str, format: str = Query(default="ppm")):
        session = get_session(session_id)
        with session.lock:
            config = session.config
            revision = session.revision
            scene = session.effective_scene()
        # preview renders at half resolution for latency; measurements
        # stay full resolution
        result = run_pipeline(scene, config)
        img = result.post_isp
        half = scale_array(img.pixels, max(img.width // 2, 1), max(img.height // 2, 1), "bilinear")
        small = RgbImage(np.clip(np.round(half), 0, 255).astype(np.uint8))
        if format == "json":
            return {
                "revision": revision,
                "config": config.to_json(),
                "width": small.width,
                "height": small.height,
                "ppm_base64": base64.b64encode(_ppm_bytes(small)).decode("ascii"),
            }
        import json as _json

        return Response(
            content=_ppm_bytes(small),
            media_type="image/x-portable-pixmap",
            headers={
                "X-Config-Revision": str(revision),
                "X-Config": _json.dumps(config.to_json(), separators=(",", ":")),
            },
        )

    @app.post("/sessions/{session_id}/measure")
    def measure(session_id: str):
        session = get_session(session_id)
        with session.lock:
            config = session.config
            revision = session.revision
            scene = session.effective_scene()
            index = len(session.measurements)
            result = run_pipeline(scene, config)
            session_dir = data_dir / session.id
            session_dir.mkdir(parents=True, exist_ok=True)
            pre_path = session_dir / f"m{index:04d}.pre.pgm"
            post_path = session_dir / f"m{index:04d}.post.ppm"
            write_raw(result.pre_isp, pre_path)
            write_rgb(result.post_isp, post_path)
            entry = {
                "index": index,
                "revision": revision,
                "config": config.to_json(),
                "attack": session.attack,
                "timestamp": time.time(),
                "pre_path": str(pre_path),
                "post_path": str(post_path),
            }
            session.measurements.append(entry)
        public = {k: v for k, v in entry.items() if k != "timestamp"}
        return {**public, "count": index + 1}

    @app.get("/sessions/{session_id}/measurements/{index}")
    def get_measurement_info(
        session_id: str, index: int, which: Optional[str] = Query(default=None)
    ):
        session = get_session(session_id)
        with session.lock:
            entry = get_measurement(session, index)
        if which is None:
            return {k: v for k, v in entry.items() if k != "timestamp"}
        if which == "post":
            img = read_rgb(entry["post_path"])
            return Response(content=_ppm_bytes(img), media_type="image/x-portable-pixmap")
        if which == "pre":
            data = Path(entry["pre_path"]).read_bytes()
            return Response(content=data, media_type="image/x-portable-graymap")
        raise HTTPException(status_code=400, detail="which: expected 'pre' or 'post'")

    @app.get("/sessions/{session_id}/analysis")
    def analysis(
        session_id: str,
        a: int,
        b: int,
        roi: Optional[str] = Query(default=None),
        signed: bool = Query(default=True),
        which: str = Query(default="post"),
    ):
        session = get_session(session_id)
        with session.lock:
            revision = session.revision
            entry_a = get_measurement(session, a)
            entry_b = get_measurement(session, b)
        try:
            roi_rect = RoiRect.parse(roi) if roi else None
        except (ImageError, ValueError) as e:
            raise HTTPException(status_code=400, detail=f"roi: {e}") from e
        if which == "post":
            img_a = read_rgb(entry_a["post_path"])
            img_b = read_rgb(entry_b["post_path"])
        elif which == "pre":
            img_a = read_raw(entry_a["pre_path"])
            img_b = read_raw(entry_b["pre_path"])
        else:
            raise HTTPException(status_code=400, detail="which: expected 'pre' or 'post'")
        mode = "signed" if signed else "absolute"
        try:
            result = diff(img_a, img_b, mode=mode, roi=roi_rect)
            stats_a = stats(img_a, roi_rect)
            stats_b = stats(img_b, roi_rect)
        except ImageError as e:
            raise HTTPException(status_code=400, detail=str(e)) from e

        def stats_json(stats_list):
            return [
                {
                    "channel": s.channel,
                    "min": s.min,
                    "max": s.max,
                    "mean": s.mean,
                    "std": s.std,
                    "snr": s.snr,
                }
                for s in stats_list
            ]

        return {
            "revision": revision,
            "mode": mode,
            "a": a,
            "b": b,
            "roi": [roi_rect.x, roi_rect.y, roi_rect.w, roi_rect.h] if roi_rect else None,
            "stats": {
                "a": stats_json(stats_a),
                "b": stats_json(stats_b),
                "diff": stats_json(result.stats),
            },
            "histograms": [
                {"channel": h.channel, "offset": h.offset, "counts": h.counts.tolist()}
                for h in result.histograms
            ],
        }

    @app.get("/sessions/{session_id}/detections")
    def detections(
        session_id: str, m: int, pre_isp: bool = Query(default=False)
    ):
        session = get_session(session_id)
        with session.lock:
            revision = session.revision
            entry = get_measurement(session, m)
        if pre_isp:
            img = demosaic_for_detection(read_raw(entry["pre_path"]))
        else:
            img = read_rgb(entry["post_path"])
        dets = naive_stop_sign_detect(img)
        return {
            "revision": revision,
            "measurement": m,
            "pre_isp": pre_isp,
            "detections": [detection_to_json(d) for d in dets],
        }

    @app.get("/risk/catalog")
    def risk_catalog():
        results = evaluate_catalog(load_builtin_catalog())
        return {
            "records": [
                {
                    "id": r.record.id,
                    "layer": r.record.layer,
                    "entry_point": r.record.entry_point,
                    "attack_class": r.record.attack_class,
                    "computed_sum": r.computed_sum,
                    "computed_feasibility": r.computed_feasibility.name,
                    "computed_risk": r.computed_risk,
                    "expected_feasibility": r.record.expected_feasibility.name,
                    "expected_risk": r.record.expected_risk,
                    "matches": r.matches_expected,
                }
                for r in results
            ]
        }

    @app.get("/risk/matrix")
    def risk_matrix_endpoint():
        return {"impact_rows": ["Negligible", "Moderate", "Major", "Severe"],
                "feasibility_columns": ["VeryLow", "Low", "Medium", "High"],
                "matrix": risk_matrix()}

    resolved_ui = ui_dir or os.environ.get("WORKBENCH_UI_DIR")
    if resolved_ui and Path(resolved_ui).is_dir():
        app.mount("/ui", StaticFiles(directory=resolved_ui, html=True), name="ui")

    return app


def main_serve(port: Optional[int] = None, data_dir: str = "./workbench-data",
               ui_dir: Optional[str] = None) -> None:
    import uvicorn

    if port is None:
        port = int(os.environ.get("WORKBENCH_PORT", "8700"))
    uvicorn.run(create_app(data_dir=data_dir, ui_dir=ui_dir), host="127.0.0.1", port=port)
