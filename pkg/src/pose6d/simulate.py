"""Synthetic scene and prediction generator.

Stands in for the learned networks: places sphere/box primitives in front of
a pinhole camera, derives exact ground-truth patches and an analytic depth
map, and emits controllably noisy prediction sets. All randomness flows
through numpy's Philox generator seeded via SeedSequence spawning (one child
stream per object / prediction slot), so output is reproducible across
platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (CameraIntrinsics, ClassDistribution, DepthMap,
                   GroundTruthObject, ImageSize, Patch, PointSet, Pose,
                   PredictionTuple, normalize_quat, quat_multiply,
                   quat_to_matrix)
from .errors import CardinalityMismatch, PlacementFailed, Pose6DError

__all__ = ["PrimitiveSpec", "SceneConfig", "NoiseConfig", "PlacedPrimitive",
           "Scene", "generate_scene", "perturb_predictions", "render_depth",
           "perturb_depth"]


@dataclass(frozen=True)
class PrimitiveSpec:
    """Object geometry: a sphere (size = radius) or an axis-aligned box in the
    object frame (size = full extents (ex, ey, ez))."""

    kind: str
    size: tuple[float, ...]

    def __post_init__(self):
        if self.kind == "sphere":
            if len(self.size) != 1 or self.size[0] <= 0:
                raise Pose6DError("sphere needs a single positive radius")
        elif self.kind == "box":
            if len(self.size) != 3 or any(s <= 0 for s in self.size):
                raise Pose6DError("box needs three positive extents")
        else:
            raise Pose6DError(f"unknown primitive kind {self.kind!r}")
        object.__setattr__(self, "size", tuple(float(s) for s in self.size))


@dataclass(frozen=True)
class SceneConfig:
    num_objects: int = 3
    size_o: ImageSize = ImageSize(640, 480)
    size_d: ImageSize = ImageSize(160, 120)
    intrinsics: CameraIntrinsics = CameraIntrinsics(500.0, 500.0, 320.0, 240.0)
    primitive: PrimitiveSpec = PrimitiveSpec("sphere", (0.1,))
    depth_range: tuple[float, float] = (1.5, 3.0)
    seed: int = 0
    depth_mode: str = "surface"
    num_classes: int | None = None
    max_attempts: int = 200

    def __post_init__(self):
        if self.num_objects < 1:
            raise Pose6DError("need at least one object")
        near, far = self.depth_range
        if not (0 < near <= far):
            raise Pose6DError(f"depth range must be positive and ordered, got {self.depth_range}")
        if self.depth_mode not in ("surface", "centroid"):
            raise Pose6DError(f"unknown depth mode {self.depth_mode!r}")


@dataclass(frozen=True)
class NoiseConfig:
    translation_sigma: float = 0.0
    rotation_sigma: float = 0.0
    patch_sigma: float = 0.0
    class_confusion: float = 0.0
    depth_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("translation_sigma", "rotation_sigma", "patch_sigma", "depth_sigma"):
            if getattr(self, name) < 0:
                raise Pose6DError(f"{name} must be >= 0")
        if not 0.0 <= self.class_confusion <= 1.0:
            raise Pose6DError("class confusion must lie in [0, 1]")


@dataclass(frozen=True)
class PlacedPrimitive:
    spec: PrimitiveSpec
    pose: Pose


@dataclass(frozen=True)
class Scene:
    objects: tuple[GroundTruthObject, ...]
    primitives: tuple[PlacedPrimitive, ...]
    intrinsics: CameraIntrinsics
    depth: DepthMap
    point_sets: dict[str, PointSet]
    size_o: ImageSize
    size_d: ImageSize
    num_classes: int
    symmetric_class_ids: frozenset[int]


def _fibonacci_sphere(radius, count=64):
    """Deterministic, roughly uniform points on a sphere surface."""
    k = np.arange(count)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * k
    z = 1.0 - 2.0 * (k + 0.5) / count
    r = np.sqrt(1.0 - z * z)
    return radius * np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _box_corners(extents):
    ex, ey, ez = (e / 2.0 for e in extents)
    return np.array([[sx * ex, sy * ey, sz * ez]
                     for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])


def model_points(spec: PrimitiveSpec, sphere_samples: int = 64) -> PointSet:
    if spec.kind == "sphere":
        return PointSet(_fibonacci_sphere(spec.size[0], sphere_samples))
    return PointSet(_box_corners(spec.size))


def _random_unit_quat(rng):
    q = rng.normal(size=4)
    return normalize_quat(tuple(q))


def _sphere_patch(t, radius, k: CameraIntrinsics):
    """Linearized silhouette: a disk of radius r at the center depth."""
    tx, ty, tz = t
    cx = k.fx * tx / tz + k.ppx
    cy = k.fy * ty / tz + k.ppy
    hw = radius * k.fx / tz
    hh = radius * k.fy / tz
    return Patch(cx - hw, cy - hh, 2.0 * hh, 2.0 * hw)


def _box_patch(pose: Pose, extents, k: CameraIntrinsics):
    """Exact bounding box of the eight projected corners."""
    r = quat_to_matrix(pose.rotation)
    pts = _box_corners(extents) @ r.T + pose.translation_array()
    us = k.fx * pts[:, 0] / pts[:, 2] + k.ppx
    vs = k.fy * pts[:, 1] / pts[:, 2] + k.ppy
    x0, x1 = float(us.min()), float(us.max())
    y0, y1 = float(vs.min()), float(vs.max())
    return Patch(x0, y0, y1 - y0, x1 - x0)


def _patches_overlap(a: Patch, b: Patch, margin=1.0):
    return (a.bx - margin < b.bx + b.w and b.bx - margin < a.bx + a.w
            and a.by - margin < b.by + b.h and b.by - margin < a.by + a.h)


def generate_scene(cfg: SceneConfig) -> Scene:
    """Place objects with non-overlapping patches and render the depth map.

    Patches are exact projection-derived bounds (linearized disk for spheres,
    projected-corner box for boxes), always fully inside the RGB frame.
    """
    k = cfg.intrinsics
    near, far = cfg.depth_range
    num_classes = cfg.num_classes if cfg.num_classes is not None else cfg.num_objects
    root = np.random.SeedSequence(cfg.seed)
    streams = root.spawn(cfg.num_objects)

    objects = []
    primitives = []
    patches = []
    for i in range(cfg.num_objects):
        rng = np.random.Generator(np.random.Philox(streams[i]))
        placed = None
        for _ in range(cfg.max_attempts):
            quat = _random_unit_quat(rng)
            tz = float(rng.uniform(near, far))
            u = float(rng.uniform(0.0, cfg.size_o.width))
            v = float(rng.uniform(0.0, cfg.size_o.height))
            t = ((u - k.ppx) * tz / k.fx, (v - k.ppy) * tz / k.fy, tz)
            pose = Pose(quat, t)
            if cfg.primitive.kind == "sphere":
                patch = _sphere_patch(t, cfg.primitive.size[0], k)
            else:
                patch = _box_patch(pose, cfg.primitive.size, k)
            if patch.bx < 0 or patch.by < 0:
                continue
            if patch.bx + patch.w > cfg.size_o.width or patch.by + patch.h > cfg.size_o.height:
                continue
            # keep the silhouette resolvable in the (smaller) depth frame
            scale = cfg.size_d.width / cfg.size_o.width
            if min(patch.w, patch.h) * scale < 4.0:
                continue
            if any(_patches_overlap(patch, prev) for prev in patches):
                continue
            placed = (pose, patch)
            break
        if placed is None:
            raise PlacementFailed(
                f"could not place object {i} after {cfg.max_attempts} attempts")
        pose, patch = placed
        class_id = i % num_classes
        objects.append(GroundTruthObject(class_id, patch, pose, f"class_{class_id}"))
        primitives.append(PlacedPrimitive(cfg.primitive, pose))
        patches.append(patch)

    point_sets = {f"class_{c}": model_points(cfg.primitive) for c in range(num_classes)}
    symmetric = frozenset(range(num_classes)) if cfg.primitive.kind == "sphere" else frozenset()

    sx = cfg.size_d.width / cfg.size_o.width
    sy = cfg.size_d.height / cfg.size_o.height
    depth = render_depth(primitives, k.scaled(sx, sy), cfg.size_d, mode=cfg.depth_mode)
    return Scene(tuple(objects), tuple(primitives), k, depth, point_sets,
                 cfg.size_o, cfg.size_d, num_classes, symmetric)


def render_depth(primitives, intrinsics: CameraIntrinsics, s_d: ImageSize,
                 mode: str = "surface") -> DepthMap:
    """Per-pixel nearest-surface ray depth (z convention). Rays are cast
    through integer pixel coordinates; background pixels are invalid.

    mode="surface" writes the z of the first surface hit; mode="centroid"
    writes the object's center depth inside its silhouette.
    """
    if mode not in ("surface", "centroid"):
        raise Pose6DError(f"unknown depth mode {mode!r}")
    w, h = s_d.width, s_d.height
    us, vs = np.meshgrid(np.arange(w, dtype=float), np.arange(h, dtype=float))
    dx = (us - intrinsics.ppx) / intrinsics.fx
    dy = (vs - intrinsics.ppy) / intrinsics.fy

    zbuf = np.full((h, w), np.inf)
    out = np.full((h, w), np.inf)
    for prim in primitives:
        t = prim.pose.translation_array()
        if prim.spec.kind == "sphere":
            r = prim.spec.size[0]
            a = dx * dx + dy * dy + 1.0
            b = -2.0 * (dx * t[0] + dy * t[1] + t[2])
            c = float(t @ t) - r * r
            disc = b * b - 4.0 * a * c
            hit = disc >= 0.0
            s = np.full((h, w), np.inf)
            s[hit] = (-b[hit] - np.sqrt(disc[hit])) / (2.0 * a[hit])
            hit &= s > 0.0
        else:
            rot = quat_to_matrix(prim.pose.rotation)
            dirs = np.stack([dx, dy, np.ones_like(dx)], axis=-1)
            d_obj = dirs @ rot  # == dirs @ (R^T)^T, i.e. R^T applied per pixel
            o_obj = -(rot.T @ t)
            half = np.array(prim.spec.size) / 2.0
            with np.errstate(divide="ignore", invalid="ignore"):
                t1 = (-half - o_obj) / d_obj
                t2 = (half - o_obj) / d_obj
            tmin = np.nanmax(np.minimum(t1, t2), axis=-1)
            tmax = np.nanmin(np.maximum(t1, t2), axis=-1)
            hit = (tmax >= tmin) & (tmax > 0.0)
            s = np.where(tmin > 0.0, tmin, tmax)
        value = s if mode == "surface" else np.full((h, w), t[2])
        closer = hit & (s < zbuf)
        zbuf[closer] = s[closer]
        out[closer] = value[closer]

    valid = np.isfinite(out)
    depths = np.where(valid, out, 0.0)
    return DepthMap(s_d, depths, valid)


def _confused_distribution(true_index, num_classes, confusion):
    """Probability 1-confusion on true_index, the rest spread uniformly.
    true_index == num_classes selects the no-object slot."""
    if confusion == 0.0:
        return ClassDistribution.one_hot(true_index, num_classes)
    n_slots = num_classes + 1
    p = [confusion / (n_slots - 1)] * n_slots
    p[true_index] = 1.0 - confusion
    return ClassDistribution(tuple(p))


def perturb_predictions(scene: Scene, noise: NoiseConfig, n_c: int):
    """One Gaussian-perturbed prediction per ground-truth object, padded to
    n_c slots with no-object-dominant predictions with random patches."""
    if n_c < len(scene.objects):
        raise CardinalityMismatch(
            f"cardinality {n_c} below the {len(scene.objects)} scene objects")
    root = np.random.SeedSequence(noise.seed)
    streams = root.spawn(n_c)
    w_img, h_img = scene.size_o.width, scene.size_o.height
    preds = []
    for i in range(n_c):
        rng = np.random.Generator(np.random.Philox(streams[i]))
        if i < len(scene.objects):
            gt = scene.objects[i]
            t = gt.pose.translation
            if noise.translation_sigma > 0:
                t = tuple(v + e for v, e in zip(t, rng.normal(0.0, noise.translation_sigma, 3)))
            quat = gt.pose.rotation
            if noise.rotation_sigma > 0:
                angle = float(rng.normal(0.0, noise.rotation_sigma))
                axis = rng.normal(size=3)
                axis = axis / np.linalg.norm(axis)
                half = angle / 2.0
                q_noise = (axis[0] * math.sin(half), axis[1] * math.sin(half),
                           axis[2] * math.sin(half), math.cos(half))
                quat = normalize_quat(quat_multiply(q_noise, quat))
            patch = gt.patch
            if noise.patch_sigma > 0:
                jit = rng.normal(0.0, noise.patch_sigma, 4)
                patch = Patch(patch.bx + jit[0], patch.by + jit[1],
                              max(patch.h + jit[2], 1e-3), max(patch.w + jit[3], 1e-3))
            dist = _confused_distribution(gt.class_id, scene.num_classes,
                                          noise.class_confusion)
            preds.append(PredictionTuple(dist, patch, Pose(quat, t)))
        else:
            pw = float(rng.uniform(8.0, w_img / 4.0))
            ph = float(rng.uniform(8.0, h_img / 4.0))
            bx = float(rng.uniform(0.0, w_img - pw))
            by = float(rng.uniform(0.0, h_img - ph))
            quat = _random_unit_quat(rng)
            t = tuple(rng.uniform(-1.0, 1.0, 2)) + (float(rng.uniform(0.5, 5.0)),)
            dist = _confused_distribution(scene.num_classes, scene.num_classes,
                                          noise.class_confusion)
            preds.append(PredictionTuple(dist, Patch(bx, by, ph, pw), Pose(quat, t)))
    return preds


def perturb_depth(dm: DepthMap, sigma: float, seed: int = 0) -> DepthMap:
    """Gaussian noise on valid depth pixels, clamped to stay positive."""
    if sigma == 0.0:
        return dm
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    depths = dm.depths.copy()
    noise = rng.normal(0.0, sigma, size=depths.shape)
    depths[dm.valid] = np.maximum(depths[dm.valid] + noise[dm.valid], 1e-3)
    return DepthMap(dm.size, depths, dm.valid)
