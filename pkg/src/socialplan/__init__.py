"""Socially adaptive path planning workbench."""

__version__ = "0.1.0"

from .features import DEFAULT_FEATURES, FeatureConfig, FeatureExtractor, FeatureVector, build_distance_field, extract_features
from .metrics import HSignature, MetricReport, dissimilarity, feature_difference, h_signature, homotopy_rate, same_homotopy
from .oracle import OracleConfig, oracle_demo
from .planner import PlannerConfig, PlanResult, PlanTree, plan_gan_rrt_star, plan_rrt, plan_rrt_star
from .scenario import (
    FormatError,
    OccupancyGrid,
    Path,
    Pedestrian,
    Scenario,
    generate_scenarios,
    is_free,
    load_path,
    load_scenario,
    save_path,
    save_scenario,
    segment_free,
)
from .tinynet import GanPair, Mlp, d_loss, g_loss, load_mlp, save_mlp

__all__ = [
    "DEFAULT_FEATURES",
    "FeatureConfig",
    "FeatureExtractor",
    "FeatureVector",
    "FormatError",
    "GanPair",
    "HSignature",
    "MetricReport",
    "Mlp",
    "OccupancyGrid",
    "OracleConfig",
    "Path",
    "Pedestrian",
    "PlanResult",
    "PlanTree",
    "PlannerConfig",
    "Scenario",
    "build_distance_field",
    "d_loss",
    "dissimilarity",
    "extract_features",
    "feature_difference",
    "g_loss",
    "generate_scenarios",
    "h_signature",
    "homotopy_rate",
    "is_free",
    "load_mlp",
    "load_path",
    "load_scenario",
    "oracle_demo",
    "plan_gan_rrt_star",
    "plan_rrt",
    "plan_rrt_star",
    "same_homotopy",
    "save_mlp",
    "save_path",
    "save_scenario",
    "segment_free",
]
