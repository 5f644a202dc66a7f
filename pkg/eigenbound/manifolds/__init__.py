"""A module of model manifolds."""

from eigenbound.manifolds.base import (
    GeodesicSphereQuadrature,
    ModelManifold,
    RadiusOutOfRangeError,
    ResidualStudy,
    UnknownManifoldError,
    VolumeGeometry,
    ball_volume,
    correction_k,
    eigen_residual,
    geodesic_sphere,
    get_manifold_class,
    l2_norm,
    laplacian,
    make_manifold,
)
