"""Bit-exact file formats.

Scene and prediction files are line-delimited JSON with an explicit header
record carrying a schema version. Floats are emitted with Python's
shortest-roundtrip repr, which reproduces the exact double on load. Depth
maps are a one-line text header plus a little-endian uint16 grid (invalid
pixels are 0) with a CRC32 checksum. All writes are atomic (temp + rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import zlib

import numpy as np

from .core import (CameraIntrinsics, ClassDistribution, DepthMap,
                   GroundTruthObject, ImageSize, Patch, PointSet, Pose,
                   PredictionTuple)
from .errors import DanglingReference, ParseError, Pose6DError
from .simulate import Scene

__all__ = ["save_scene", "load_scene", "save_predictions", "load_predictions",
           "save_depth", "load_depth", "save_intrinsics", "load_intrinsics",
           "atomic_write_bytes", "atomic_write_text", "file_digest",
           "dump_report"]

SCHEMA_VERSION = 1
DEPTH_MAGIC = "P6DD"
DEPTH_SCALE = 1000.0


def atomic_write_bytes(path, data: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def file_digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def dump_report(obj) -> str:
    """Deterministic JSON: lexicographic keys, newline-terminated."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# --- JSONL helpers -----------------------------------------------------


def _write_jsonl(path, records):
    lines = [json.dumps(rec, sort_keys=True, separators=(",", ":")) for rec in records]
    atomic_write_text(path, "\n".join(lines) + "\n")


def _read_jsonl(path):
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc.msg}") from exc
            if not isinstance(rec, dict) or "record" not in rec:
                raise ParseError(f"{path}: line {lineno}: missing 'record' field")
            records.append((lineno, rec))
    if not records:
        raise ParseError(f"{path}: empty file")
    return records


def _field(rec, lineno, path, name, kind=None):
    if name not in rec:
        raise ParseError(f"{path}: line {lineno}: missing field {name!r}")
    value = rec[name]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{path}: line {lineno}: field {name!r} has wrong type")
    return value


def _pose_from(rec, lineno, path):
    quat = _field(rec, lineno, path, "quat_xyzw", list)
    trans = _field(rec, lineno, path, "translation", list)
    try:
        return Pose(tuple(quat), tuple(trans))
    except Pose6DError as exc:
        raise ParseError(f"{path}: line {lineno}: {exc}") from exc


def _patch_from(rec, lineno, path):
    vec = _field(rec, lineno, path, "patch", list)
    if len(vec) != 4:
        raise ParseError(f"{path}: line {lineno}: patch needs 4 values")
    try:
        return Patch(*vec)
    except Pose6DError as exc:
        raise ParseError(f"{path}: line {lineno}: {exc}") from exc


def _pose_record(pose: Pose):
    return {"quat_xyzw": list(pose.rotation), "translation": list(pose.translation)}


# --- intrinsics --------------------------------------------------------


def save_intrinsics(k: CameraIntrinsics, path):
    atomic_write_text(path, dump_report(
        {"schema": SCHEMA_VERSION, "kind": "intrinsics",
         "fx": k.fx, "fy": k.fy, "ppx": k.ppx, "ppy": k.ppy}))


def load_intrinsics(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    for name in ("fx", "fy", "ppx", "ppy"):
        if name not in data:
            raise ParseError(f"{path}: missing field {name!r}")
    return CameraIntrinsics(data["fx"], data["fy"], data["ppx"], data["ppy"])


# --- depth map ---------------------------------------------------------


def save_depth(dm: DepthMap, path, scale: float = DEPTH_SCALE):
    """Quantized uint16 grid; reproduces depths within 1/scale meters."""
    raw = np.zeros((dm.size.height, dm.size.width), dtype=np.uint16)
    q = np.floor(dm.depths * scale + 0.5)
    q = np.clip(q, 1, 65535)  # valid pixels may not quantize to the invalid marker 0
    raw[dm.valid] = q[dm.valid].astype(np.uint16)
    payload = raw.astype("<u2").tobytes()
    if dm.valid.any():
        dmin, dmax = float(dm.depths[dm.valid].min()), float(dm.depths[dm.valid].max())
    else:
        dmin = dmax = 0.0
    header = (f"{DEPTH_MAGIC} {SCHEMA_VERSION} {dm.size.width} {dm.size.height} "
              f"{scale!r} {dmin!r} {dmax!r} {zlib.crc32(payload):08x}\n")
    atomic_write_bytes(path, header.encode("ascii") + payload)


def load_depth(path):
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", errors="replace")
        payload = fh.read()
    fields = header.split()
    if len(fields) != 8 or fields[0] != DEPTH_MAGIC:
        raise ParseError(f"{path}: bad depth header")
    try:
        version = int(fields[1])
        width, height = int(fields[2]), int(fields[3])
        scale = float(fields[4])
        checksum = int(fields[7], 16)
    except ValueError as exc:
        raise ParseError(f"{path}: bad depth header field: {exc}") from exc
    if version != SCHEMA_VERSION:
        raise ParseError(f"{path}: unsupported depth schema version {version}")
    expected = width * height * 2
    if len(payload) != expected:
        raise ParseError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    if zlib.crc32(payload) != checksum:
        raise ParseError(f"{path}: checksum mismatch")
    raw = np.frombuffer(payload, dtype="<u2").reshape(height, width)
    valid = raw > 0
    depths = np.where(valid, raw / scale, 0.0)
    return DepthMap(ImageSize(width, height), depths, valid)


# --- predictions -------------------------------------------------------


def save_predictions(preds, path):
    records = [{"record": "header", "schema": SCHEMA_VERSION, "kind": "predictions",
                "n_c": len(preds),
                "num_classes": preds[0].class_dist.num_classes if preds else 0}]
    for p in preds:
        rec = {"record": "prediction", "probs": list(p.class_dist.probabilities),
               "patch": [p.patch.bx, p.patch.by, p.patch.h, p.patch.w]}
        rec.update(_pose_record(p.pose))
        records.append(rec)
    _write_jsonl(path, records)


def load_predictions(path):
    records = _read_jsonl(path)
    lineno, header = records[0]
    if header["record"] != "header" or header.get("kind") != "predictions":
        raise ParseError(f"{path}: line {lineno}: expected a predictions header")
    n_c = _field(header, lineno, path, "n_c", int)
    preds = []
    for lineno, rec in records[1:]:
        if rec["record"] != "prediction":
            raise ParseError(f"{path}: line {lineno}: unexpected record "
                             f"{rec['record']!r}")
        probs = _field(rec, lineno, path, "probs", list)
        try:
            dist = ClassDistribution(tuple(probs))
        except Pose6DError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
        preds.append(PredictionTuple(dist, _patch_from(rec, lineno, path),
                                     _pose_from(rec, lineno, path)))
    if len(preds) != n_c:
        raise ParseError(f"{path}: header promises {n_c} predictions, found {len(preds)}")
    return preds


# --- scene -------------------------------------------------------------


def save_scene(scene: Scene, path, intrinsics_ref="intrinsics.json",
               depth_ref="depth.bin"):
    """Writes the scene JSONL only; the referenced intrinsics/depth files are
    saved separately (see the simulate CLI command)."""
    records = [{
        "record": "header", "schema": SCHEMA_VERSION, "kind": "scene",
        "image_size_o": [scene.size_o.width, scene.size_o.height],
        "image_size_d": [scene.size_d.width, scene.size_d.height],
        "num_classes": scene.num_classes,
        "symmetric_classes": sorted(scene.symmetric_class_ids),
        "intrinsics_ref": intrinsics_ref,
        "depth_ref": depth_ref,
        "num_objects": len(scene.objects),
    }]
    for obj in scene.objects:
        rec = {"record": "object", "class_id": obj.class_id,
               "patch": [obj.patch.bx, obj.patch.by, obj.patch.h, obj.patch.w],
               "model_points_ref": obj.model_points_ref}
        rec.update(_pose_record(obj.pose))
        records.append(rec)
    for name in sorted(scene.point_sets):
        records.append({"record": "pointset", "id": name,
                        "points": [list(p) for p in scene.point_sets[name].points]})
    _write_jsonl(path, records)


def load_scene(path):
    """Loads a scene and resolves its intrinsics/depth references (relative to
    the scene file's directory). Missing references raise DanglingReference."""
    records = _read_jsonl(path)
    lineno, header = records[0]
    if header["record"] != "header" or header.get("kind") != "scene":
        raise ParseError(f"{path}: line {lineno}: expected a scene header")
    so = _field(header, lineno, path, "image_size_o", list)
    sd = _field(header, lineno, path, "image_size_d", list)
    num_classes = _field(header, lineno, path, "num_classes", int)
    symmetric = frozenset(_field(header, lineno, path, "symmetric_classes", list))
    base = os.path.dirname(os.path.abspath(path))

    objects = []
    point_sets = {}
    for lineno, rec in records[1:]:
        if rec["record"] == "object":
            obj = GroundTruthObject(
                _field(rec, lineno, path, "class_id", int),
                _patch_from(rec, lineno, path),
                _pose_from(rec, lineno, path),
                _field(rec, lineno, path, "model_points_ref", str))
            if obj.class_id >= num_classes:
                raise ParseError(f"{path}: line {lineno}: class id {obj.class_id} "
                                 f"out of range for {num_classes} classes")
            objects.append(obj)
        elif rec["record"] == "pointset":
            try:
                pts = PointSet(_field(rec, lineno, path, "points", list))
            except Pose6DError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
            point_sets[_field(rec, lineno, path, "id", str)] = pts
        else:
            raise ParseError(f"{path}: line {lineno}: unexpected record "
                             f"{rec['record']!r}")
    for obj in objects:
        if obj.model_points_ref not in point_sets:
            raise DanglingReference(
                f"{path}: object references unknown point set {obj.model_points_ref!r}")

    intrinsics_path = os.path.join(base, header["intrinsics_ref"])
    depth_path = os.path.join(base, header["depth_ref"])
    if not os.path.exists(intrinsics_path):
        raise DanglingReference(f"{path}: missing intrinsics file {intrinsics_path}")
    if not os.path.exists(depth_path):
        raise DanglingReference(f"{path}: missing depth file {depth_path}")
    intrinsics = load_intrinsics(intrinsics_path)
    depth = load_depth(depth_path)
    size_d = ImageSize(*sd)
    if depth.size != size_d:
        raise ParseError(f"{path}: depth file size {depth.size} != header size {size_d}")
    return Scene(tuple(objects), (), intrinsics, depth, point_sets,
                 ImageSize(*so), size_d, num_classes, symmetric)
