__version__ = "0.1.0"

from eigenbound import (
    async_utils,
    eigenfunctions,
    experiments,
    manifolds,
    means,
    odecmp,
    perturb,
    records,
    specialfun,
    suite,
    utils,
)
from eigenbound.manifolds import make_manifold
