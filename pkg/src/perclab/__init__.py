"""Site-percolation laboratory for Z^2 and its triangular embeddings.

Exact up-step path counting, log-space first-moment bounds, and a seeded
union-find Monte Carlo engine.
"""
from .bound import (
    LIMIT,
    BoundPoint,
    PsiEstimate,
    binom_kth_root_limit_check,
    bound_at,
    bound_series,
    log_binomial,
    mid_index,
    psi_finite,
    threshold_p,
)
from .lattice import (
    ORIGIN,
    Arc,
    LatticeVariant,
    UnsupportedVariantError,
    Vertex,
    arc_t,
    arc_z2,
    ball,
    neighbors,
    norm,
    up_neighbors,
)
from .pathcount import (
    BRUTEFORCE_MAX_K,
    BudgetError,
    PathCountRow,
    PathHistogram,
    binomial,
    count_row,
    enumerate_paths_bruteforce,
    pascal_next,
    path_count,
    verify_row,
)

__version__ = "0.1.0"
