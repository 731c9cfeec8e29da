"""Affine preferential attachment trees: simulation, exact decorated-tree
observables, moment recurrences, and seed recognition."""

from .decomposition import SubtreeForest, UrnState, coupled_grow, decompose, recompose, urn_sample
from .errors import CapExceededError, PreconditionError
from .growth import (
    AlphaParam,
    GrowthOutcome,
    as_alpha,
    enumerate_growth,
    enumerate_growth_planar,
    grow_abstract,
    grow_abstract_reference,
    grow_planar,
    grow_planted,
    replicate_rng,
)
from .moments import (
    ExponentReport,
    RecurrenceSystem,
    Reduction,
    exact_expectation,
    expectation_curve,
    gamma_exponent,
    omega_normalizer,
    precedes,
    reduction_children,
    weight,
)
from .observables import (
    MergerTerm,
    count_F,
    count_F_region,
    count_F_split,
    count_perfect,
    degree_profiles,
    merger_expansion,
)
from .planar import PlaneTree, PlantedPlaneTree, cyclic_equal
from .seedtest import (
    BlindReport,
    DistinguishPlan,
    McEstimate,
    distinguish,
    distinguishing_decoration,
    distinguishing_decoration_unequal,
    empirical_tv,
    f_infinity,
    is_blind,
    martingale_track,
    mc_moments,
    minimal_nonblind,
    tv_lower_bound,
)
from .trees import (
    DecoratedTree,
    Tree,
    canonical_code,
    canonical_order,
    enumerate_trees,
    falling_factorial,
    falling_factorial_rational,
    path_tree,
    star_tree,
)

__version__ = "0.1.0"
