"""Stochastic neighbor embedding with q-Gaussian low-dimensional kernels.

The q-Gaussian kernel interpolates between the Gaussian (q -> 1) and
heavier-than-Cauchy tails (q -> 3), with q = 2 reproducing t-SNE exactly.
The package bundles the four embedding methods (sne, ssne, tsne, qsne), PCA
preprocessing, embedding quality metrics (leave-one-out k-NN accuracy and
co-ranking Q_local), synthetic data generators, CSV/SVG tooling, and a CLI.
"""

from .affinity import (calibrate_bandwidths, conditional_affinities,
                       pairwise_sq_distances, row_entropy, symmetrize)
from .datasets import make_gaussian_mixture, make_swissroll
from .descent import TrainingTrace, embed, gradient, kl_divergence, step
from .estimator import QSNE
from .evaluation import coranking_matrix, knn_accuracy, q_local
from .exceptions import CsvFormatError, DegenerateDataError, DivergenceError
from .io import CsvData, load_csv, save_csv, save_embedding
from .pca import PCA
from .plotting import scatter_svg
from .qgaussian import low_dim_affinities, q_from_dof, qgaussian_pdf, z_q

__version__ = "0.1.0"

__all__ = [
    "QSNE",
    "PCA",
    "TrainingTrace",
    "CsvData",
    "CsvFormatError",
    "DegenerateDataError",
    "DivergenceError",
    "calibrate_bandwidths",
    "conditional_affinities",
    "coranking_matrix",
    "embed",
    "gradient",
    "kl_divergence",
    "knn_accuracy",
    "load_csv",
    "low_dim_affinities",
    "make_gaussian_mixture",
    "make_swissroll",
    "pairwise_sq_distances",
    "q_from_dof",
    "q_local",
    "qgaussian_pdf",
    "row_entropy",
    "save_csv",
    "save_embedding",
    "scatter_svg",
    "step",
    "symmetrize",
    "z_q",
    "__version__",
]
