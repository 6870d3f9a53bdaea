"""Command-line surface: simulate, match, loss, refine, eval.

Exit codes: 0 success, 2 IO/parse error, 3 validation error. Reports are
deterministic: JSON output has lexicographic key order and carries the config
digest, so identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import os
import sys

from .assignment import build_cost_matrix, hungarian_assign, pad_ground_truth
from .config import RunConfig
from .errors import (CardinalityMismatch, ConfigError, DanglingReference,
                     ParseError, Pose6DError)
from .fileio import (dump_report, atomic_write_text, file_digest, load_predictions,
                     load_scene, save_depth, save_intrinsics, save_predictions,
                     save_scene)
from .losses import hungarian_loss
from .metrics import add_metric, adds_metric, summarize_pose_errors
from .refine import refine_pose
from .simulate import generate_scene, perturb_depth, perturb_predictions


def build_parser():
    parser = argparse.ArgumentParser(prog="pose6d",
                                     description="6D pose matching, losses, "
                                                 "refinement and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat JSON config file")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("simulate", help="generate a synthetic scene + predictions")
    add_common(p)
    p.set_defaults(func=cmd_simulate)

    for name, func, help_text in (
            ("match", cmd_match, "optimal gt/prediction assignment"),
            ("loss", cmd_loss, "matched composite loss"),
            ("eval", cmd_eval, "pose metrics per class"),
            ("refine", cmd_refine, "depth-based translation refinement")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("scene", help="scene JSONL file")
        p.add_argument("predictions", help="predictions JSONL file")
        add_common(p)
        p.set_defaults(func=func)
    return parser


def _load_config(args):
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _emit(args, report, text_lines):
    if args.format == "json":
        out = dump_report(report)
    else:
        out = "\n".join(text_lines) + "\n"
    sys.stdout.write(out)
    if args.out:
        atomic_write_text(args.out, dump_report(report))


def _match_scene(scene, preds, cfg):
    if len(preds) != cfg.n_c:
        raise CardinalityMismatch(
            f"predictions file has {len(preds)} slots, config n_c is {cfg.n_c}")
    gt_set = pad_ground_truth(list(scene.objects), len(preds))
    costs = build_cost_matrix(gt_set, preds, cfg.match_weights(),
                              scene.point_sets, scene.symmetric_class_ids)
    return gt_set, hungarian_assign(costs)


def cmd_simulate(args, cfg):
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    scene = generate_scene(cfg.scene_config())
    preds = perturb_predictions(scene, cfg.noise_config(), cfg.n_c)
    if cfg.noise_depth_sigma > 0:
        scene_depth = perturb_depth(scene.depth, cfg.noise_depth_sigma, cfg.seed)
    else:
        scene_depth = scene.depth

    paths = {name: os.path.join(out_dir, name) for name in
             ("scene.jsonl", "predictions.jsonl", "depth.bin", "intrinsics.json")}
    save_intrinsics(scene.intrinsics, paths["intrinsics.json"])
    save_depth(scene_depth, paths["depth.bin"])
    save_scene(scene, paths["scene.jsonl"])
    save_predictions(preds, paths["predictions.jsonl"])

    manifest = {"config_digest": cfg.digest(), "seed": cfg.seed,
                "files": {name: file_digest(path) for name, path in sorted(paths.items())}}
    atomic_write_text(os.path.join(out_dir, "manifest.json"), dump_report(manifest))
    lines = [f"{name}  {digest}" for name, digest in sorted(manifest["files"].items())]
    if args.format == "json":
        sys.stdout.write(dump_report(manifest))
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_match(args, cfg):
    scene = load_scene(args.scene)
    preds = load_predictions(args.predictions)
    _, assignment = _match_scene(scene, preds, cfg)
    report = {"config_digest": cfg.digest(),
              "permutation": list(assignment.perm),
              "total_cost": assignment.total_cost}
    lines = [f"permutation: {' '.join(str(j) for j in assignment.perm)}",
             f"total cost: {assignment.total_cost!r}"]
    _emit(args, report, lines)
    return 0


def cmd_loss(args, cfg):
    scene = load_scene(args.scene)
    preds = load_predictions(args.predictions)
    gt_set, assignment = _match_scene(scene, preds, cfg)
    loss = hungarian_loss(gt_set, preds, assignment, cfg.loss_weights(),
                          scene.point_sets, scene.symmetric_class_ids,
                          cfg.no_object_weight)
    report = {"config_digest": cfg.digest(),
              "hungarian_loss": loss,
              "assignment_cost": assignment.total_cost}
    _emit(args, report, [f"hungarian loss: {loss!r}",
                         f"assignment cost: {assignment.total_cost!r}"])
    return 0


def _pose_errors(scene, preds, gt_set, assignment):
    """Per real object: (class_id, add, adds) against its matched prediction."""
    rows = []
    for i, gt in enumerate(gt_set):
        if gt is None:
            continue
        pred = preds[assignment.perm[i]]
        pts = scene.point_sets[gt.model_points_ref]
        rows.append((gt.class_id, add_metric(gt.pose, pred.pose, pts),
                     adds_metric(gt.pose, pred.pose, pts)))
    return rows


def _eval_report(scene, rows, cfg):
    per_class = {}
    for class_id in sorted({r[0] for r in rows}):
        adds = [r[1] for r in rows if r[0] == class_id]
        addss = [r[2] for r in rows if r[0] == class_id]
        summary = summarize_pose_errors(adds, addss, cfg.auc_threshold)
        per_class[str(class_id)] = {
            "add": summary.mean_add, "adds": summary.mean_adds,
            "auc_add": summary.auc_add, "auc_adds": summary.auc_adds,
            "count": len(adds)}
    overall = summarize_pose_errors([r[1] for r in rows], [r[2] for r in rows],
                                    cfg.auc_threshold)
    return {"config_digest": cfg.digest(), "per_class": per_class,
            "mean_add": overall.mean_add, "mean_adds": overall.mean_adds,
            "mean_auc_add": overall.auc_add, "mean_auc_adds": overall.auc_adds}


def cmd_eval(args, cfg):
    scene = load_scene(args.scene)
    preds = load_predictions(args.predictions)
    gt_set, assignment = _match_scene(scene, preds, cfg)
    rows = _pose_errors(scene, preds, gt_set, assignment)
    if not rows:
        raise Pose6DError("scene has no ground-truth objects to evaluate")
    report = _eval_report(scene, rows, cfg)
    lines = [f"{'class':>8} {'add':>12} {'adds':>12} {'auc_add':>9} {'auc_adds':>9}"]
    for cid, entry in report["per_class"].items():
        lines.append(f"{cid:>8} {entry['add']:>12.6f} {entry['adds']:>12.6f} "
                     f"{entry['auc_add']:>9.4f} {entry['auc_adds']:>9.4f}")
    lines.append(f"{'mean':>8} {report['mean_add']:>12.6f} {report['mean_adds']:>12.6f} "
                 f"{report['mean_auc_add']:>9.4f} {report['mean_auc_adds']:>9.4f}")
    _emit(args, report, lines)
    return 0


def cmd_refine(args, cfg):
    scene = load_scene(args.scene)
    preds = load_predictions(args.predictions)
    gt_set, assignment = _match_scene(scene, preds, cfg)
    fusion = cfg.fusion_config()

    refined = []
    degraded = 0
    for pred in preds:
        result = refine_pose(pred, scene.depth, scene.size_o, scene.intrinsics, fusion)
        degraded += int(result.degraded)
        refined.append(type(pred)(pred.class_dist, pred.patch, result.pose))

    per_object = []
    for i, gt in enumerate(gt_set):
        if gt is None:
            continue
        j = assignment.perm[i]
        pts = scene.point_sets[gt.model_points_ref]
        per_object.append({
            "class_id": gt.class_id, "prediction_index": j,
            "add_before": add_metric(gt.pose, preds[j].pose, pts),
            "add_after": add_metric(gt.pose, refined[j].pose, pts)})
    if not per_object:
        raise Pose6DError("scene has no ground-truth objects to refine against")

    out_path = args.out or (os.path.splitext(args.predictions)[0] + ".refined.jsonl")
    save_predictions(refined, out_path)

    n = len(per_object)
    report = {"config_digest": cfg.digest(),
              "refined_file": os.path.basename(out_path),
              "degraded_count": degraded,
              "per_object": per_object,
              "mean_add_before": sum(r["add_before"] for r in per_object) / n,
              "mean_add_after": sum(r["add_after"] for r in per_object) / n}
    lines = [f"refined predictions written to {out_path}",
             f"degraded (no depth): {degraded}"]
    for r in per_object:
        lines.append(f"class {r['class_id']}: add {r['add_before']:.6f} -> "
                     f"{r['add_after']:.6f}")
    lines.append(f"mean add: {report['mean_add_before']:.6f} -> "
                 f"{report['mean_add_after']:.6f}")
    if args.format == "json":
        sys.stdout.write(dump_report(report))
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return args.func(args, cfg)
    except (ParseError, DanglingReference, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, Pose6DError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
