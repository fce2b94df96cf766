"""Regime segmentation of time series.

Temporal-contiguity dissimilarities, principal-coordinates embedding,
k-means regimes, CART thresholds, majority-vote smoothing, cluster
validation, cluster-count diagnostics, GARCH(1,1) volatility and
regime-conditional regressions.
"""

from regimekit._backend import BACKEND
from regimekit.cart import fit_thresholds
from regimekit.core import (
    ConfigError,
    DataError,
    NumericalError,
    RegimeAssignment,
    RegimeError,
    SeriesMatrix,
    ThresholdSet,
    load_series,
    standardize,
    write_csv,
)
from regimekit.dct import DissimMatrix, dct_matrix, euclidean_matrix
from regimekit.diagnostics import elbow_curve, gap_statistic, silhouette_curve
from regimekit.kmeans import KMeansResult, kmeans, order_regimes
from regimekit.pcoa import Embedding, embedding_stress, pcoa_embed
from regimekit.priceanalysis import chow_test, regime_regression, vpr
from regimekit.smoothing import LabelSeries, count_regime_changes, diff_vs_reference, majority_smooth
from regimekit.validation import anova_oneway, fisher_lsd, silhouette, tukey_hsd
from regimekit.volatility import arch_lm_test, conditional_volatility, garch11_fit, ljung_box

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "DataError",
    "DissimMatrix",
    "Embedding",
    "KMeansResult",
    "LabelSeries",
    "NumericalError",
    "RegimeAssignment",
    "RegimeError",
    "SeriesMatrix",
    "ThresholdSet",
    "anova_oneway",
    "arch_lm_test",
    "chow_test",
    "conditional_volatility",
    "count_regime_changes",
    "dct_matrix",
    "diff_vs_reference",
    "elbow_curve",
    "embedding_stress",
    "euclidean_matrix",
    "fisher_lsd",
    "fit_thresholds",
    "gap_statistic",
    "garch11_fit",
    "kmeans",
    "ljung_box",
    "load_series",
    "majority_smooth",
    "order_regimes",
    "pcoa_embed",
    "regime_regression",
    "silhouette",
    "silhouette_curve",
    "standardize",
    "tukey_hsd",
    "vpr",
    "write_csv",
]
