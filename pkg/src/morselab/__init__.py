"""Contracting geodesics, boundary cross-ratios, and quasi-isometry probes
on explicit model spaces (the lattice-ray plane, metric trees, the bare
Euclidean plane)."""

from .boundary import (
    BoundaryMap,
    CrossRatio,
    QuasiMobiusReport,
    StratumTuple,
    TwoStableReport,
    cross_ratio,
    identity_map,
    in_stratum,
    lattice_cross_ratio,
    map_from_json,
    map_to_json,
    quasi_mobius_probe,
    stratum_counterexample,
    swap_map,
    table_map,
    translation_map,
    two_stable_probe,
)
from .contracting import (
    ContractingCertificate,
    FootPoint,
    ProjectionSet,
    SamplerConfig,
    best_certificate,
    contracting_constant_exact,
    contracting_constant_sampled,
    paths_min_distance,
    path_projection_diameter,
    point_to_path_distance,
    project_boundary,
    project_point,
    verify_bounded_geodesic_image,
    verify_contracting_triangles,
    verify_slim_triangle,
)
from .errors import (
    EmptyPreimage,
    GeodesicError,
    HypothesisFailure,
    InvariantViolation,
    MorselabError,
    ProjectionUndefined,
    SpaceError,
    StratumViolation,
)
from .extension import (
    EKSet,
    ExtendedMap,
    FlipChoice,
    barycenter,
    boundary_agreement_probe,
    ek_set,
    extend,
    pi_triangle,
    preimage_triangles,
    qi_probe,
    quasi_inverse_probe,
    select_radius,
    small_flip_select,
)
from .spaces import (
    EPS_GEOM,
    BoundaryRay,
    EuclideanPlane,
    GeodesicPath,
    LatticeIsometry,
    LatticeRayPlane,
    MetricTree,
    Plane,
    Ray,
    TreeEdgePoint,
    TreeEnd,
    TreeNode,
    TreeRayPoint,
    canonical,
    distance,
    enumerate_boundary,
    geodesic,
    point_from_json,
    point_to_json,
    points_equal,
    reflect_x,
    reflect_y,
    rotation90,
    space_from_json,
    space_to_json,
    translation,
)
from .tables import ConstantTables, default_tables

__version__ = "0.1.0"
