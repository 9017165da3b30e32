"""Landscapes of the K-means cost function.

Explore local minima from seeded uniform starts, connect them through
minimum-cost crossing points of the assignment seams, and analyse the
resulting stationary-point network: rates, fastest paths, disconnectivity
graphs, frustration and outlier structure types.
"""

from .analysis import (
    FrustrationProfile,
    StructureType,
    accuracy,
    adjusted_rand_index,
    enumerate_structure_types,
    frustration_profile,
    partition_signature,
    rand_index,
    structure_type,
    superbasins,
)
from .core import (
    MinimumCandidate,
    assign,
    canonical_key,
    cost,
    cost_gradient,
    local_minimize,
    sample_uniform_start,
)
from .dataset import (
    Dataset,
    FeatureStats,
    append_outliers,
    feature_stats,
    load_csv,
    load_outlier_csv,
)
from .disconnectivity import DisconnectivityTree, build_disconnectivity, emit_disconnectivity
from .explore import explore
from .kernels import BACKEND as KERNEL_BACKEND
from .network import (
    GrowthReport,
    Network,
    PathResult,
    RateParams,
    branching,
    elementary_rate,
    fastest_path,
    grow_connected,
    overall_rate,
    select_next_pair,
    suggest_temperature,
)
from .store import (
    LandscapeDB,
    MinimaStore,
    MinimumRecord,
    TransitionStateRecord,
    validate_db,
)
from .transition import (
    MecpResult,
    SurrogateParams,
    align_clusters,
    aligned_distance,
    attempt_connection,
    connect_ts,
    downhill_eigenvector,
    f_minus,
    f_plus,
    f_plus_grad,
    interpolate_adaptive,
    locate_mecp,
)

__version__ = "0.1.0"
