"""Grid correlation, feature fusion and learned root-cause analysis."""
from .classifier import (DegenerateDataset, RcaClassifier, RcaConfig, SchemaMismatch, diagnose,
                         diagnose_many, precision_recall, rule_baseline, train_classifier)
from .features import DEVICE_CLASSES, FEATURE_NAMES, FeatureDomain, FusedFeatures, MissingDomain, fuse_features
from .generator import GeneratorConfig, planted_dataset, planted_sample
from .grid import GRID_SIZE, GridIndex, GridSummary, OutOfDomain, aggregate_grid, grid_index, grid_rows
from .labels import ROOT_CAUSES, USER_TYPES, RcaLabel, RootCause, UserType, user_type_for
from .trees import DecisionTree, TreeConfig, TreeEnsemble

__all__ = [
    "DEVICE_CLASSES", "FEATURE_NAMES", "GRID_SIZE", "ROOT_CAUSES", "USER_TYPES", "DecisionTree",
    "DegenerateDataset", "FeatureDomain", "FusedFeatures", "GeneratorConfig", "GridIndex", "GridSummary",
    "MissingDomain", "OutOfDomain", "RcaClassifier", "RcaConfig", "RcaLabel", "RootCause", "SchemaMismatch",
    "TreeConfig", "TreeEnsemble", "UserType", "aggregate_grid", "diagnose", "diagnose_many", "fuse_features",
    "grid_index", "grid_rows", "planted_dataset", "planted_sample", "precision_recall", "rule_baseline",
    "train_classifier", "user_type_for",
]
