"""Magnitude, magnitude homology and weighted persistence for finite metric spaces."""

__version__ = "0.1.0"

from .lengths import BucketedLengths, RationalLengths
from .metric import (
    FiniteMetricSpace,
    Filtration,
    MonotoneFunction,
    PointCloud,
    apply_isometry,
    ball_neighborhood,
    build_filtration,
    from_distance_matrix,
    from_point_cloud,
    generalized_inverse,
)
from .magnitude import (
    MagnitudeSeries,
    Weighting,
    compute_magnitude,
    compute_weighting,
    magnitude_series,
    magnitude_upper_bound,
    similarity_matrix,
    variational_lower_bound_check,
)
from .chains import (
    BoundaryMatrix,
    MagnitudeChainBasis,
    PathTuple,
    boundary_matrix,
    chain_counts,
    enumerate_tuples,
)
from .homology import (
    HomologyRank,
    euler_characteristic,
    homology_rank,
    magnitude_from_homology,
    mh_rank_field,
    saturation_degree,
)
from .persistence import (
    FilteredSliceComplex,
    WeightedBar,
    WeightedBarcode,
    filtered_slice,
    persistent_betti,
    persistent_magnitude,
    reduce_slice,
    weighted_barcode,
)
from .distances import (
    MagnitudeProfile,
    bottleneck_weighted,
    magnitude_profile,
    profile_l1_distance,
    wasserstein_inf,
)
from .stability import (
    TrialConfig,
    TrialReport,
    collinear_instability_example,
    run_suite,
    sample_thick_config,
)
from .estimators import (
    MagnitudeProfileTransformer,
    MagnitudeTransformer,
    WeightedBarcodeTransformer,
)

__all__ = [
    "__version__",
    "BucketedLengths",
    "RationalLengths",
    "FiniteMetricSpace",
    "Filtration",
    "MonotoneFunction",
    "PointCloud",
    "apply_isometry",
    "ball_neighborhood",
    "build_filtration",
    "from_distance_matrix",
    "from_point_cloud",
    "generalized_inverse",
    "MagnitudeSeries",
    "Weighting",
    "compute_magnitude",
    "compute_weighting",
    "magnitude_series",
    "magnitude_upper_bound",
    "similarity_matrix",
    "variational_lower_bound_check",
    "BoundaryMatrix",
    "MagnitudeChainBasis",
    "PathTuple",
    "boundary_matrix",
    "chain_counts",
    "enumerate_tuples",
    "HomologyRank",
    "euler_characteristic",
    "homology_rank",
    "magnitude_from_homology",
    "mh_rank_field",
    "saturation_degree",
    "FilteredSliceComplex",
    "WeightedBar",
    "WeightedBarcode",
    "filtered_slice",
    "persistent_betti",
    "persistent_magnitude",
    "reduce_slice",
    "weighted_barcode",
    "MagnitudeProfile",
    "bottleneck_weighted",
    "magnitude_profile",
    "profile_l1_distance",
    "wasserstein_inf",
    "TrialConfig",
    "TrialReport",
    "collinear_instability_example",
    "run_suite",
    "sample_thick_config",
    "MagnitudeProfileTransformer",
    "MagnitudeTransformer",
    "WeightedBarcodeTransformer",
]
