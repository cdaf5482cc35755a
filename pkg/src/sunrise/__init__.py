"""Exact one-sided maximal functions, rising-sun decompositions and one-sided weight constants."""

from .core import (
    DomainError,
    IntervalSet,
    StepWeight,
    format_rational,
    hausdorff,
    measure,
    normalize,
    parse_rational,
    restrict,
    union,
    weighted_measure,
)
from .maximal import (
    Decomposition,
    HaloChain,
    halo,
    halo_iterate,
    halo_iteration_bound,
    mass_halving_sequence,
    mminus_weight_at,
    mplus_indicator_at,
    superlevel_indicator,
)
from .constants import (
    ConstantEstimate,
    SearchConfig,
    a1_plus,
    ap_plus_lower,
    fujii_wilson,
    integrate_mminus_truncated,
    sigma_weight,
)
from .tauberian import (
    SolyanikCurve,
    TauberianEstimate,
    embedding_threshold,
    holder_modulus_check,
    restricted_weak_type_check,
    solyanik_fit,
    tauberian_lower,
)
from .oracle import (
    GridSpec,
    InequalityReport,
    grid_mplus,
    grid_superlevel,
    measure_ratio_check,
    reverse_holder_check,
    solyanik_converse_check,
)
from .gallery import WeightSpec, gallery_names, gallery_weight, parse_weight_spec

__version__ = "0.1.0"
