"""Flat run configuration: one key-value document controlling every module.

Defaults follow the reference operating point: sigma1=2, sigma2=5,
lambda_pose=0.05, cardinality n_c=21, 640x480 input with quarter-resolution
depth. Unknown keys are rejected. CLI flags override file values; environment
variables are never read.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass

from .core import CameraIntrinsics, ImageSize
from .errors import ConfigError
from .losses import LossWeights
from .refine import FusionConfig
from .simulate import NoiseConfig, PrimitiveSpec, SceneConfig

__all__ = ["RunConfig"]


@dataclass(frozen=True)
class RunConfig:
    # loss / matching
    sigma1: float = 2.0
    sigma2: float = 5.0
    lambda_pose: float = 0.05
    n_c: int = 21
    lambda_match: float = 0.0
    class_cost: str = "neg_prob"
    empty_cost: str = "zero"
    no_object_weight: float = 1.0
    # refinement
    w1: float = 0.5
    w2: float = 0.5
    depth_window: int = 5
    # evaluation
    auc_threshold: float = 0.10
    depth_denominator: str = "prediction"
    # simulation
    seed: int = 0
    num_objects: int = 3
    image_width: int = 640
    image_height: int = 480
    depth_width: int = 160
    depth_height: int = 120
    fx: float = 500.0
    fy: float = 500.0
    ppx: float = 320.0
    ppy: float = 240.0
    primitive: str = "sphere"
    sphere_radius: float = 0.1
    box_extent_x: float = 0.12
    box_extent_y: float = 0.08
    box_extent_z: float = 0.2
    depth_near: float = 1.5
    depth_far: float = 3.0
    depth_mode: str = "surface"
    noise_translation_sigma: float = 0.0
    noise_rotation_sigma: float = 0.0
    noise_patch_sigma: float = 0.0
    noise_confusion: float = 0.0
    noise_depth_sigma: float = 0.0

    @classmethod
    def field_names(cls):
        return {f.name for f in dataclasses.fields(cls)}

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - cls.field_names()
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a flat JSON object")
        return cls.from_dict(data)

    def replace(self, **overrides):
        cfg = dataclasses.replace(self, **overrides)
        cfg.validate()
        return cfg

    def validate(self):
        if self.n_c < 1:
            raise ConfigError(f"n_c must be >= 1, got {self.n_c}")
        if self.num_objects > self.n_c:
            raise ConfigError(
                f"num_objects {self.num_objects} exceeds cardinality {self.n_c}")
        try:
            self.loss_weights()
            self.fusion_config()
            self.scene_config()
            self.noise_config()
        except Exception as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self):
        return dataclasses.asdict(self)

    def digest(self):
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    # module-level views -------------------------------------------------

    def loss_weights(self):
        return LossWeights(self.sigma1, self.sigma2, self.lambda_pose)

    def match_weights(self):
        from .assignment import MatchWeights
        return MatchWeights(self.sigma1, self.sigma2, self.lambda_match,
                            self.class_cost, self.empty_cost)

    def fusion_config(self):
        return FusionConfig(self.w1, self.w2, self.depth_window)

    def intrinsics_obj(self):
        return CameraIntrinsics(self.fx, self.fy, self.ppx, self.ppy)

    def primitive_spec(self):
        if self.primitive == "sphere":
            return PrimitiveSpec("sphere", (self.sphere_radius,))
        return PrimitiveSpec("box", (self.box_extent_x, self.box_extent_y,
                                     self.box_extent_z))

    def scene_config(self):
        return SceneConfig(
            num_objects=self.num_objects,
            size_o=ImageSize(self.image_width, self.image_height),
            size_d=ImageSize(self.depth_width, self.depth_height),
            intrinsics=self.intrinsics_obj(),
            primitive=self.primitive_spec(),
            depth_range=(self.depth_near, self.depth_far),
            seed=self.seed,
            depth_mode=self.depth_mode,
        )

    def noise_config(self):
        return NoiseConfig(
            translation_sigma=self.noise_translation_sigma,
            rotation_sigma=self.noise_rotation_sigma,
            patch_sigma=self.noise_patch_sigma,
            class_confusion=self.noise_confusion,
            depth_sigma=self.noise_depth_sigma,
            seed=self.seed,
        )
