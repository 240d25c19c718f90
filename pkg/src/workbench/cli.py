"""Command-line interface for the workbench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import scenarios
from .analysis import diff, export_report, histogram, stats
from .attacks import attack_spec_from_json, apply_attack, craft_scaling_attack
from .defenses import (
    defense_multi_pipeline,
    defense_random_readout,
    detect_blinding,
)
from .detector import demosaic_for_detection, detection_to_json, naive_stop_sign_detect
from .images import ImageError, RoiRect, read_raw, read_rgb, write_raw, write_rgb
from .pipeline import run_pipeline
from .pipeline_config import PipelineConfig
from .risk import (
    RiskDomainError,
    builtin_catalog_path,
    evaluate_catalog,
    load_catalog,
    render_matrix,
    render_report,
)
from .scene import load_scene, save_scene
from .service import main_serve


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_risk(args) -> int:
    if args.risk_cmd == "matrix":
        _write_or_print(render_matrix(args.format), args.out)
        return 0
    catalog_path = args.catalog or builtin_catalog_path()
    records = load_catalog(catalog_path)
    results = evaluate_catalog(records)
    _write_or_print(render_report(results, format=args.format), args.out)
    mismatches = sum(1 for r in results if not r.matches_expected)
    if args.fail_on_mismatch and mismatches:
        print(f"{mismatches} mismatching record(s)", file=sys.stderr)
        return 1
    return 0


def cmd_capture(args) -> int:
    scene = load_scene(args.scene)
    config = PipelineConfig.load(args.config)
    result = run_pipeline(scene, config)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_raw(result.pre_isp, Path(str(prefix) + ".pre.pgm"))
    write_rgb(result.post_isp, Path(str(prefix) + ".post.ppm"))
    print(f"wrote {prefix}.pre.pgm (+sidecar) and {prefix}.post.ppm")
    return 0


def cmd_attack(args) -> int:
    if args.attack_cmd == "scalecam":
        source = read_rgb(args.source)
        target = read_rgb(args.target)
        result = craft_scaling_attack(source, target, args.method)
        write_rgb(result.image, args.out)
        report = {
            "modified_pixels": int(result.modified.sum()),
            "residual_linf": result.residual_linf,
            "exact": result.exact,
        }
        print(json.dumps(report, indent=1))
        return 0
    spec = attack_spec_from_json(json.loads(Path(args.spec).read_text(encoding="utf-8")))
    scene = load_scene(args.scene)
    attacked = apply_attack(scene, spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_scene(attacked, out, out.stem + ".base.ppm")
    print(f"wrote {out}")
    return 0


def cmd_defend(args) -> int:
    if args.defend_cmd == "blinding":
        path = Path(args.img)
        img = read_raw(path) if path.suffix == ".pgm" else read_rgb(path)
        roi = RoiRect.parse(args.roi) if args.roi else None
        report = detect_blinding(img, roi, threshold=args.threshold)
        print(json.dumps({
            "name": report.name,
            "score": round(report.score, 6),
            "decision": report.decision,
            "threshold": report.threshold,
        }, indent=1))
        return 0 if not report.attack_suspected else 2
    if args.defend_cmd == "multi-isp":
        raw = read_raw(args.raw)
        configs = [PipelineConfig.load(p) for p in args.config]
        report = defense_multi_pipeline(raw, configs, naive_stop_sign_detect)
        print(json.dumps({
            "name": report.name,
            "score": round(report.score, 6),
            "decision": report.decision,
        }, indent=1))
        return 0 if not report.attack_suspected else 2
    # random-readout
    config = PipelineConfig.load(args.config)
    randomized = defense_random_readout(config, seed=args.seed)
    Path(args.out).write_text(
        json.dumps(randomized.to_json(), indent=1) + "\n", encoding="utf-8"
    )
    print(f"wrote {args.out}")
    return 0


def cmd_analyze(args) -> int:
    def load(path_str):
        path = Path(path_str)
        return read_raw(path) if path.suffix == ".pgm" else read_rgb(path)

    img_a = load(args.a)
    img_b = load(args.b)
    roi = RoiRect.parse(args.roi) if args.roi else None
    mode = "signed" if args.signed else "absolute"
    result = diff(img_a, img_b, mode=mode, roi=roi)
    named_stats = [
        ("a", stats(img_a, roi)),
        ("b", stats(img_b, roi)),
        ("diff", result.stats),
    ]
    named_hists = [
        ("a", histogram(img_a, roi)),
        ("b", histogram(img_b, roi)),
        ("diff", result.histograms),
    ]
    files = export_report(args.out, named_stats, named_hists)
    print("\n".join(str(f) for f in files))
    return 0


def cmd_detect(args) -> int:
    path = Path(args.img)
    if args.pre_isp:
        img = demosaic_for_detection(read_raw(path))
    else:
        img = read_rgb(path)
    dets = naive_stop_sign_detect(img)
    print(json.dumps([detection_to_json(d) for d in dets], indent=1))
    return 0


def cmd_scenario(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scene = (
        scenarios.build_blinded_scene()
        if args.name == "stop_sign_blinded"
        else scenarios.build_stop_sign_scene()
        if args.name == "stop_sign"
        else scenarios.build_flicker_scene()
    )
    save_scene(scene, out_dir / "scene.json", "scene.base.ppm")
    (out_dir / "config.json").write_text(
        json.dumps(scenarios.config_non_hdr().to_json(), indent=1) + "\n", encoding="utf-8"
    )
    (out_dir / "config_hdr.json").write_text(
        json.dumps(scenarios.config_hdr().to_json(), indent=1) + "\n", encoding="utf-8"
    )
    blind = scenarios.blinding_spec()
    (out_dir / "attack_blinding.json").write_text(
        json.dumps({
            "kind": "blinding",
            "center": list(blind.center),
            "radius": blind.radius,
            "intensity": blind.intensity,
            "channel_weights": list(blind.channel_weights),
            "psf_sigma": blind.psf_sigma,
        }, indent=1) + "\n",
        encoding="utf-8",
    )
    print(f"wrote scenario files to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="image-pipeline workbench: capture simulation, attacks, "
        "defenses, analysis, and risk scoring",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    risk = sub.add_parser("risk", help="risk scoring and the attack catalog")
    risk_sub = risk.add_subparsers(dest="risk_cmd", required=True)
    risk_eval = risk_sub.add_parser("eval", help="recompute the attack catalog")
    risk_eval.add_argument("--catalog", help="catalog JSON (default: shipped table)")
    risk_eval.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    risk_eval.add_argument("--fail-on-mismatch", action="store_true")
    risk_eval.add_argument("--out", help="write report to a file instead of stdout")
    risk_matrix_p = risk_sub.add_parser("matrix", help="print the 4x4 risk matrix")
    risk_matrix_p.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    risk_matrix_p.add_argument("--out")
    risk.set_defaults(func=cmd_risk)

    capture = sub.add_parser("capture", help="run the capture pipeline on a scene")
    capture.add_argument("--scene", required=True, help="scene JSON file")
    capture.add_argument("--config", required=True, help="pipeline config JSON")
    capture.add_argument("--out-prefix", required=True)
    capture.set_defaults(func=cmd_capture)

    attack = sub.add_parser("attack", help="inject an attack")
    attack_sub = attack.add_subparsers(dest="attack_cmd", required=True)
    for name in ("blind", "flicker", "overlay"):
        p = attack_sub.add_parser(name, help=f"add a {name} modulator to a scene")
        p.add_argument("--scene", required=True)
        p.add_argument("--spec", required=True, help="attack spec JSON file")
        p.add_argument("--out", required=True, help="output scene JSON")
    scalecam = attack_sub.add_parser("scalecam", help="craft a scaling-camouflage image")
    scalecam.add_argument("--source", required=True, help="source PPM")
    scalecam.add_argument("--target", required=True, help="target PPM (smaller)")
    scalecam.add_argument("--method", choices=["nearest", "bilinear"], default="nearest")
    scalecam.add_argument("--out", required=True, help="output attack PPM")
    attack.set_defaults(func=cmd_attack)

    defend = sub.add_parser("defend", help="run a defense")
    defend_sub = defend.add_subparsers(dest="defend_cmd", required=True)
    blinding = defend_sub.add_parser("blinding", help="saturation-based blinding detection")
    blinding.add_argument("--img", required=True, help=".ppm or .pgm (+sidecar)")
    blinding.add_argument("--roi", help="x,y,w,h")
    blinding.add_argument("--threshold", type=float, default=0.15)
    multi = defend_sub.add_parser("multi-isp", help="multi-pipeline disagreement")
    multi.add_argument("--raw", required=True, help="raw .pgm (+sidecar)")
    multi.add_argument("--config", action="append", required=True,
                       help="pipeline config JSON (repeat, at least twice)")
    rro = defend_sub.add_parser("random-readout", help="emit a randomized-readout config")
    rro.add_argument("--config", required=True)
    rro.add_argument("--seed", type=int, default=None)
    rro.add_argument("--out", required=True)
    defend.set_defaults(func=cmd_defend)

    analyze = sub.add_parser("analyze", help="diff two images with stats + histograms")
    analyze.add_argument("--a", required=True)
    analyze.add_argument("--b", required=True)
    analyze.add_argument("--roi", help="x,y,w,h")
    analyze.add_argument("--signed", action="store_true")
    analyze.add_argument("--out", required=True, help="output directory")
    analyze.set_defaults(func=cmd_analyze)

    detect = sub.add_parser("detect", help="run the naive detector")
    detect.add_argument("--img", required=True)
    detect.add_argument("--pre-isp", action="store_true",
                        help="treat input as raw and demosaic first")
    detect.set_defaults(func=cmd_detect)

    scenario = sub.add_parser("scenario", help="emit a shipped scenario to disk")
    scenario.add_argument("name", choices=["stop_sign", "stop_sign_blinded", "flicker"])
    scenario.add_argument("--out-dir", required=True)
    scenario.set_defaults(func=cmd_scenario)

    serve = sub.add_parser("serve", help="start the local HTTP service")
    serve.add_argument("--port", type=int, default=None,
                       help="default: WORKBENCH_PORT or 8700")
    serve.add_argument("--data-dir", default="./workbench-data")
    serve.add_argument("--ui-dir", default=None, help="static UI bundle directory")
    serve.set_defaults(func=lambda a: main_serve(a.port, a.data_dir, a.ui_dir) or 0)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ImageError, RiskDomainError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
