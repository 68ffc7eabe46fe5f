"""scikit-learn compatible transformers over batches of point clouds.

Each estimator accepts ``X`` as a sequence of point clouds (arrays of shape
(n_points_i, dim) or :class:`PointCloud` instances) and produces per-cloud
features, so the invariants compose with pipelines, grid search and the rest
of the ecosystem.  ``fit`` only validates input and records the ambient
dimension.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .distances import magnitude_profile
from .magnitude import compute_magnitude
from .metric import PointCloud, build_filtration, from_point_cloud
from .persistence import weighted_barcode

__all__ = [
    "MagnitudeTransformer",
    "MagnitudeProfileTransformer",
    "WeightedBarcodeTransformer",
]


def _as_clouds(X):
    if isinstance(X, PointCloud):
        return [X]
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [PointCloud(X)]
    clouds = []
    for item in X:
        clouds.append(item if isinstance(item, PointCloud) else PointCloud(np.asarray(item, dtype=float)))
    if not clouds:
        raise ValueError("X must contain at least one point cloud")
    return clouds


class MagnitudeTransformer(BaseEstimator, TransformerMixin):
    """Magnitude of each point cloud as a single feature.

    Parameters
    ----------
    tau : float, bucket width for length comparisons.
    """

    def __init__(self, tau=1e-9):
        self.tau = tau

    def fit(self, X, y=None):
        clouds = _as_clouds(X)
        self.dim_ = clouds[0].dim
        return self

    def transform(self, X):
        check_is_fitted(self)
        clouds = _as_clouds(X)
        out = np.empty((len(clouds), 1))
        for i, cloud in enumerate(clouds):
            space = from_point_cloud(cloud, "bucketed", self.tau)
            out[i, 0] = compute_magnitude(space)
        return out


class MagnitudeProfileTransformer(BaseEstimator, TransformerMixin):
    """Fixed-length feature vector sampling the magnitude profile on a grid.

    The profile of each cloud (magnitude of the ball around the barycenter as
    a function of the radius) is sampled at ``n_bins`` left endpoints of the
    uniform partition of [0, max_radius).
    """

    def __init__(self, max_radius=2.0, n_bins=32, tau=1e-9):
        self.max_radius = max_radius
        self.n_bins = n_bins
        self.tau = tau

    def fit(self, X, y=None):
        clouds = _as_clouds(X)
        self.dim_ = clouds[0].dim
        self.grid_ = np.linspace(0.0, self.max_radius, self.n_bins, endpoint=False)
        return self

    def transform(self, X):
        check_is_fitted(self)
        clouds = _as_clouds(X)
        out = np.empty((len(clouds), self.n_bins))
        for i, cloud in enumerate(clouds):
            profile = magnitude_profile(cloud, self.max_radius, tau=self.tau)
            out[i] = [profile.value_at(r) for r in self.grid_]
        return out


class WeightedBarcodeTransformer(BaseEstimator, TransformerMixin):
    """Weighted barcode of the ball filtration of each cloud.

    ``transform`` returns a list of :class:`WeightedBarcode` objects (barcodes
    are variable-size multisets, not fixed-width features).  The filtration
    center is the barycenter by default, or a fixed coordinate vector.
    """

    def __init__(self, l_max=4.0, k_max=2, center="barycenter", tau=1e-9):
        self.l_max = l_max
        self.k_max = k_max
        self.center = center
        self.tau = tau

    def fit(self, X, y=None):
        clouds = _as_clouds(X)
        self.dim_ = clouds[0].dim
        return self

    def transform(self, X):
        check_is_fitted(self)
        out = []
        for cloud in _as_clouds(X):
            center = cloud.barycenter() if isinstance(self.center, str) else np.asarray(self.center, float)
            filt = build_filtration(cloud, center, backend="bucketed", tau=self.tau)
            out.append(weighted_barcode(filt, self.l_max, self.k_max))
        return out
