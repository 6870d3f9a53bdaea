"""Closed-form math for a set-prediction 6D pose pipeline.

Modules:
  core        shared domain types (patches, poses, depth maps, cameras)
  assignment  match costs and optimal bipartite assignment
  losses      patch/GIoU, pose/ShapeMatch, matched composite and depth losses
  refine      depth-based translation refinement
  metrics     ADD / ADD-S, threshold AUC, depth metrics, Sobel gradients
  simulate    synthetic scene + prediction generator
  fileio      bit-exact scene / prediction / depth file formats
  config      flat run configuration
  cli         command-line entry points
  kernels     compiled / pure-python hot kernel selection
"""

__version__ = "0.1.0"

from .core import (CameraIntrinsics, ClassDistribution, DepthMap,
                   GroundTruthObject, ImageSize, Patch, PointSet, Pose,
                   PredictionTuple, compose, quat_to_matrix, transform_points)
from .assignment import (Assignment, CostMatrix, MatchWeights,
                         build_cost_matrix, hungarian_assign, match_cost,
                         pad_ground_truth)
from .losses import (LossWeights, depth_loss, giou_loss, hungarian_loss,
                     patch_loss, pose_loss, shape_match_loss)
from .refine import (FusionConfig, RefinedPose, back_project, fuse_translation,
                     lookup_depth, patch_center, project, refine_pose,
                     rescale_patch)
from .metrics import (DepthMetricReport, PoseMetricReport, add_metric,
                      adds_metric, depth_metrics, sobel_gradient,
                      summarize_pose_errors, threshold_accuracy_auc)
from .simulate import (NoiseConfig, PlacedPrimitive, PrimitiveSpec, Scene,
                       SceneConfig, generate_scene, model_points,
                       perturb_depth, perturb_predictions, render_depth)
from .config import RunConfig
from . import errors, kernels
