import numpy as np

import workbench.scenarios as sc
from workbench.detector import (
    Detection,
    demosaic_for_detection,
    detection_to_json,
    naive_stop_sign_detect,
)
from workbench.images import CfaPattern, RawImage, RgbImage, RoiRect
from workbench.pipeline import run_pipeline


def test_all_gray_image_empty():
    img = RgbImage(np.full((32, 32, 3), 128, dtype=np.uint8))
    assert naive_stop_sign_detect(img) == []


def test_red_octagon_detected_with_fill_ratio_score():
    px = np.full((64, 64, 3), 110, dtype=np.uint8)
    mask = sc.octagon_mask(64, 64, 32, 32, 20)
    px[mask] = (220, 30, 30)
    dets = naive_stop_sign_detect(RgbImage(px))
    assert len(dets) == 1
    det = dets[0]
    assert det.label == "stop sign"
    # regular octagon fills ~83% of its bounding box
    assert 0.75 <= det.score <= 0.9
    assert det.iou(RoiRect(12, 12, 41, 41)) > 0.9


def test_saturated_white_octagon_not_detected():
    px = np.full((64, 64, 3), 110, dtype=np.uint8)
    mask = sc.octagon_mask(64, 64, 32, 32, 20)
    px[mask] = (255, 255, 255)  # blinded to white: R ~ G ~ B
    assert naive_stop_sign_detect(RgbImage(px)) == []


def test_small_components_ignored():
    px = np.full((32, 32, 3), 100, dtype=np.uint8)
    px[4:8, 4:8] = (255, 0, 0)  # 16 px < 64 px minimum
    assert naive_stop_sign_detect(RgbImage(px)) == []


def test_detections_sorted_and_deterministic():
    px = np.full((64, 96, 3), 100, dtype=np.uint8)
    px[8:24, 8:24] = (255, 0, 0)  # filled square, score 1.0
    mask = sc.octagon_mask(64, 96, 64, 40, 14)
    px[mask] = (230, 20, 20)
    first = naive_stop_sign_detect(RgbImage(px))
    second = naive_stop_sign_detect(RgbImage(px))
    assert first == second
    scores = [d.score for d in first]
    assert scores == sorted(scores, reverse=True)
    assert all(0.0 <= s <= 1.0 for s in scores)


def test_demosaic_for_detection_constant_raw():
    raw = RawImage(np.full((8, 8), 512, dtype=np.uint16), bit_depth=10, cfa=CfaPattern.RGGB)
    out = demosaic_for_detection(raw)
    assert np.all(out.pixels == round(512 / 1023 * 255))


def test_demosaic_for_detection_full_scale():
    raw = RawImage(np.full((4, 4), 1023, dtype=np.uint16), bit_depth=10)
    assert np.all(demosaic_for_detection(raw).pixels == 255)


def test_pre_and_post_isp_agree_on_clean_sign():
    result = run_pipeline(sc.build_stop_sign_scene(), sc.config_non_hdr())
    roi = sc.sign_roi()
    post_dets = naive_stop_sign_detect(result.post_isp)
    pre_dets = naive_stop_sign_detect(demosaic_for_detection(result.pre_isp))
    assert any(d.iou(roi) >= 0.3 for d in post_dets)
    assert any(d.iou(roi) >= 0.3 for d in pre_dets)


def test_detection_json():
    det = Detection("stop sign", 0.8125, RoiRect(1, 2, 3, 4))
    assert detection_to_json(det) == {"label": "stop sign", "score": 0.8125, "box": [1, 2, 3, 4]}
