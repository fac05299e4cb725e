"""Gradient boosting, random forest, and RBF SVM over fused vectors."""

from .boosting import GB_DEFAULTS, GbModel, train_gradient_boosting
from .forest import RF_DEFAULTS, RfModel, train_random_forest
from .model import (
    DEFAULT_TAU,
    KINDS,
    MODEL_FORMAT_VERSION,
    LabeledDataset,
    TrainedModel,
    load_model,
    predict,
    predict_proba,
    predict_proba_batch,
    save_model,
    train,
)
from .svm import SVM_DEFAULTS, Smo, SvmModel, fit_platt, rbf_kernel, train_svm
from .tree import Tree, grow_tree

__all__ = [
    "DEFAULT_TAU",
    "GB_DEFAULTS",
    "KINDS",
    "MODEL_FORMAT_VERSION",
    "RF_DEFAULTS",
    "SVM_DEFAULTS",
    "GbModel",
    "LabeledDataset",
    "RfModel",
    "Smo",
    "SvmModel",
    "TrainedModel",
    "Tree",
    "fit_platt",
    "grow_tree",
    "load_model",
    "predict",
    "predict_proba",
    "predict_proba_batch",
    "rbf_kernel",
    "save_model",
    "train",
    "train_gradient_boosting",
    "train_random_forest",
    "train_svm",
]
