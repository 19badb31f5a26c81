"""Semantic-accuracy evaluation for conditional image synthesis.

Real and synthetic feature vectors are embedded jointly (PCA, then exact
t-SNE), the real points are clustered with fuzzy C-means, and each
synthetic point is classified to the labelled cluster it belongs to most.
The fraction classified into their own class is the clustering accuracy.
"""
__version__ = "0.1.0"

from .data import CombinedDataset, Embedding2D, FeatureDataset, Source, combine, load_feature_csv
from .fcm import (
    ClassificationResult,
    FuzzyClusterModel,
    assign_cluster_labels,
    classify_synthetic,
    clustering_accuracy_real,
    fcm_fit,
    fcm_membership,
)
from .metrics import ProbabilityMatrix, direct_accuracy, inception_score
from .pca import PcaModel, pca_fit, pca_transform
from .plot import PlotMode, PlotSpec, render_scatter
from .tsne import AffinityMatrix, TsneConfig, build_affinities, calibrate_row, kl_divergence, tsne_embed

__all__ = [
    "AffinityMatrix", "ClassificationResult", "CombinedDataset", "Embedding2D", "FeatureDataset",
    "FuzzyClusterModel", "PcaModel", "PlotMode", "PlotSpec", "ProbabilityMatrix", "Source",
    "TsneConfig", "assign_cluster_labels", "build_affinities", "calibrate_row", "classify_synthetic",
    "clustering_accuracy_real", "combine", "direct_accuracy", "fcm_fit", "fcm_membership",
    "inception_score", "kl_divergence", "load_feature_csv", "pca_fit", "pca_transform",
    "render_scatter", "tsne_embed",
]
