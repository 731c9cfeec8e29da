"""Seed recognition: blind-tree analysis, the constructive decoration search,
Monte Carlo moments, the moment-based total-variation lower bound, and the
end-to-end distinguishing pipeline.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import CapExceededError, PreconditionError
from .growth import (
    AlphaLike,
    ENUM_CAP,
    _grow_fill,
    _seed_blue_tokens,
    _vertex_stat,
    as_alpha,
    enumerate_growth,
    replicate_rng,
)
from .moments import RecurrenceSystem, expectation_curve
from .observables import count_F, degree_profiles
from .trees import (
    DecoratedTree,
    Tree,
    canonical_code,
    canonical_order,
    enumerate_trees,
    falling_factorial_rational,
)

__all__ = [
    "BlindReport",
    "is_blind",
    "minimal_nonblind",
    "f_infinity",
    "DistinguishPlan",
    "distinguishing_decoration",
    "distinguishing_decoration_unequal",
    "tv_lower_bound",
    "McEstimate",
    "mc_moments",
    "martingale_track",
    "empirical_tv",
    "distinguish",
    "ELL_CAP",
]

ELL_CAP = 64


# ---------------------------------------------------------------------------
# Blind trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlindReport:
    tau: Tree
    is_blind: bool
    witness: Optional[tuple[int, ...]]  # degree decoration indexed by tau's vertex id


def is_blind(tau: Tree, s1: Tree, s2: Tree) -> BlindReport:
    """Do the perfect-embedding counts of tau agree on s1 and s2 for every
    degree decoration?  The witness, when they do not, is the lexicographically
    maximal differing decoration under tau's canonical vertex order."""
    if s1.n != s2.n:
        raise PreconditionError("blindness is defined for hosts of equal size")
    p1 = degree_profiles(tau, s1)
    p2 = degree_profiles(tau, s2)
    differing = [d for d in set(p1) | set(p2) if p1.get(d, 0) != p2.get(d, 0)]
    if not differing:
        return BlindReport(tau, True, None)
    order = canonical_order(tau)
    witness = max(differing, key=lambda d: tuple(d[u] for u in order))
    return BlindReport(tau, False, witness)


def minimal_nonblind(s1: Tree, s2: Tree) -> Tree:
    """Smallest non-blind pattern (ties broken by canonical-code order).

    Every proper subtree of the result, being strictly smaller, is blind.
    """
    if s1.n != s2.n:
        raise PreconditionError("seeds must have equal size")
    if canonical_code(s1) == canonical_code(s2):
        raise PreconditionError("isomorphic seeds cannot be told apart")
    for size in range(1, s1.n + 1):
        for t in enumerate_trees(size, cap=max(size, 10)):
            if not is_blind(t, s1, s2).is_blind:
                return t
    raise RuntimeError("unreachable: the seed itself is never blind")


# ---------------------------------------------------------------------------
# The closed-form limit factors and the decoration search
# ---------------------------------------------------------------------------


def f_infinity(d: Sequence[int], ell: Sequence[int], alpha: AlphaLike) -> Fraction:
    """prod_u [d(u) + ell(u) + alpha - 2]_{ell(u)}, exact.

    This is the large-n limit of the normalised seed-degree factor, up to one
    positive constant shared by all d with the same |ell| (which therefore
    cancels in every sign or ratio test).
    """
    if len(d) != len(ell):
        raise PreconditionError("d and ell must decorate the same vertices")
    a = as_alpha(alpha).fraction
    out = Fraction(1)
    for du, lu in zip(d, ell):
        out *= falling_factorial_rational(du + lu + a - 2, lu)
    return out


@dataclass(frozen=True)
class DistinguishPlan:
    tau: Tree
    ell: tuple[int, ...]
    delta: dict[tuple[int, ...], Fraction]
    d_max: tuple[int, ...]
    closed_form_sum: Fraction
    alpha: object

    @property
    def decorated(self) -> DecoratedTree:
        return DecoratedTree(self.tau, self.ell)


def _dominance_search(
    tau: Tree,
    delta: dict[tuple[int, ...], Fraction],
    alpha,
    ell_cap: int,
) -> DistinguishPlan:
    """Shared core of the decoration search.

    Fixes the decoration coordinate by coordinate, last canonical vertex
    first, doubling a coordinate until the weighted contribution of the
    decorations that first differ from d_max at that vertex is dominated by
    the d_max term.
    """
    af = alpha.fraction
    order = canonical_order(tau)
    r = tau.n
    key = lambda d: tuple(d[u] for u in order)
    d_max = max(delta, key=key)
    blocks: dict[int, list[tuple[int, ...]]] = {j: [] for j in range(r)}
    for d in delta:
        if d == d_max:
            continue
        j = min(i for i in range(r) if d[order[i]] != d_max[order[i]])
        blocks[j].append(d)

    ell = {u: 2 for u in range(r)}
    ell[order[-1]] = math.floor(1 + af) + 1  # smallest integer > 1 + alpha

    def suffix_ratio(d: tuple[int, ...], j: int) -> Fraction:
        num = Fraction(1)
        den = Fraction(1)
        for i in range(j, r):
            u = order[i]
            num *= falling_factorial_rational(d[u] + ell[u] + af - 2, ell[u])
            den *= falling_factorial_rational(d_max[u] + ell[u] + af - 2, ell[u])
        return num / den

    threshold = Fraction(1, 2 * r) * abs(delta[d_max])
    for j in range(r - 1, -1, -1):
        u = order[j]
        while True:
            leftover = abs(
                sum((suffix_ratio(d, j) * delta[d] for d in blocks[j]), Fraction(0))
            )
            if leftover <= threshold:
                break
            ell[u] *= 2
            if ell[u] > ell_cap:
                raise CapExceededError(
                    f"decoration search exceeded ell cap {ell_cap} at vertex {u}; "
                    "the dominance argument guarantees termination, so this "
                    "signals an inconsistent delta table"
                )

    ell_t = tuple(ell[u] for u in range(r))
    total = sum(
        (f_infinity(d, ell_t, alpha) * delta[d] for d in delta), Fraction(0)
    )
    if total == 0:
        raise RuntimeError("dominated sum vanished; delta table is inconsistent")
    assert all(x >= 2 for x in ell_t) and sum(ell_t) > 1 + af
    return DistinguishPlan(tau, ell_t, dict(delta), d_max, total, alpha)


def distinguishing_decoration(
    tau: Tree, s1: Tree, s2: Tree, alpha: AlphaLike, ell_cap: int = ELL_CAP
) -> DistinguishPlan:
    """Decoration making the limit of the normalised expectation difference
    provably non-zero, for a non-blind pattern on equal-size seeds."""
    a = as_alpha(alpha)
    if s1.n != s2.n:
        raise PreconditionError("seeds must have equal size")
    p1 = degree_profiles(tau, s1)
    p2 = degree_profiles(tau, s2)
    delta = {
        d: Fraction(p1.get(d, 0) - p2.get(d, 0))
        for d in set(p1) | set(p2)
        if p1.get(d, 0) != p2.get(d, 0)
    }
    if not delta:
        raise PreconditionError("tau is blind for these seeds")
    return _dominance_search(tau, delta, a, ell_cap)


def distinguishing_decoration_unequal(
    s1: Tree,
    s2: Tree,
    alpha: AlphaLike,
    ell_cap: int = ELL_CAP,
    enum_cap: int = ENUM_CAP,
) -> DistinguishPlan:
    """Plan for seeds of different sizes (|s2| < |s1|): the pattern is a
    single vertex and the smaller seed is first grown, exactly, to size |s1|.

    The delta table compares the degree counts of s1 against the exact
    mixture of degree counts of the grown smaller seed.
    """
    a = as_alpha(alpha)
    k1, k2 = s1.n, s2.n
    if not 3 <= k2 < k1:
        raise PreconditionError("needs 3 <= |s2| < |s1|")
    outcomes = enumerate_growth(s2, a, k1, canonicalize=True, cap=enum_cap)
    mix: dict[int, Fraction] = {}
    for out in outcomes:
        for v in range(out.tree.n):
            dv = out.tree.degree(v)
            mix[dv] = mix.get(dv, Fraction(0)) + out.probability
    direct: dict[int, int] = {}
    for v in range(k1):
        direct[s1.degree(v)] = direct.get(s1.degree(v), 0) + 1
    delta = {}
    for dv in set(mix) | set(direct):
        diff = Fraction(direct.get(dv, 0)) - mix.get(dv, Fraction(0))
        if diff != 0:
            delta[(dv,)] = diff
    if not delta:
        raise RuntimeError(
            "degree mixtures coincide exactly; the maximal-degree argument "
            "rules this out for valid seeds"
        )
    vertex = Tree(1, [[]])
    return _dominance_search(vertex, delta, a, ell_cap)


# ---------------------------------------------------------------------------
# Moment-based total variation bound
# ---------------------------------------------------------------------------


def tv_lower_bound(mean1, mean2, m2_1, m2_2):
    """(m1-m2)^2 / ((m1-m2)^2 + 2(m2_1 + m2_2)); 0 when the means agree."""
    for mean, m2 in ((mean1, m2_1), (mean2, m2_2)):
        if m2 < mean * mean * (1 - 1e-12) - 1e-12:
            raise PreconditionError("second moment below squared mean")
    diff = mean1 - mean2
    if diff == 0:
        return 0.0 if isinstance(diff, float) else diff * 0
    d2 = diff * diff
    return d2 / (d2 + 2 * (m2_1 + m2_2))


# ---------------------------------------------------------------------------
# Monte Carlo moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    n: int
    replicates: int
    mean: float
    second_moment: float
    std_error: float
    second_moment_std_error: float
    values: Optional[list[int]] = field(default=None, repr=False)


MC_CHUNK = 1024


def _mc_chunk(args):
    (tau_edges, tau_n, ell, seed_edges, seed_n, alpha_nd, n, master, chunk_index,
     lo, hi, keep_values) = args
    alpha = as_alpha(alpha_nd)
    seed = Tree.from_edges(seed_n, seed_edges)
    rng = replicate_rng(master, chunk_index)
    steps = n - seed_n
    seed_blue = _seed_blue_tokens(seed)
    nb0 = len(seed_blue)
    fast = tau_n == 1 and (n ** max(ell) if ell else 1) * n < 2**62
    tau = None
    if not fast:
        tau = DecoratedTree(Tree.from_edges(tau_n, tau_edges), ell)
    s1 = 0
    s2 = 0
    s4 = 0
    values: list[int] = []
    parents = np.full(n, -1, dtype=np.int64)
    blue = np.empty(max(n - 2, 1), dtype=np.int64)
    for _ in range(lo, hi):
        u1 = rng.random(steps)
        u2 = rng.random(steps)
        blue[:nb0] = seed_blue
        _grow_fill(u1, u2, parents, blue, nb0, seed_n, alpha.shadow)
        if fast:
            deg = np.bincount(parents[seed_n:n], minlength=n)
            deg[seed_n:] += 1
            deg[:seed_n] += seed.degrees
            val = int(_vertex_stat(deg.astype(np.int64), ell[0]))
        else:
            tree = Tree.from_parents(seed, parents.copy())
            val = count_F(tau, tree)
        s1 += val
        s2 += val * val
        s4 += (val * val) ** 2
        if keep_values:
            values.append(val)
    return s1, s2, s4, values


def mc_moments(
    tau: DecoratedTree,
    seed: Tree,
    alpha: AlphaLike,
    n: int,
    replicates: int,
    master_seed: int,
    workers: int = 1,
    keep_values: bool = False,
    chunk: int = MC_CHUNK,
) -> McEstimate:
    """Sample mean and second moment of F_tau over independent grown trees.

    Replicates are processed in fixed-size chunks; chunk i draws from the
    stream SeedSequence(master_seed, spawn_key=(i,)), and chunk results are
    combined in index order, so the estimate is identical for any worker
    count.  Moment sums are exact big integers before the final division.
    """
    a = as_alpha(alpha)
    if n < seed.n:
        raise PreconditionError("n must be at least the seed size")
    if replicates < 2:
        raise PreconditionError("need at least 2 replicates")
    bounds = [(c, lo, min(lo + chunk, replicates))
              for c, lo in enumerate(range(0, replicates, chunk))]
    args = [
        (
            tuple(tau.tree.edges()), tau.tree.n, tau.ell,
            tuple(seed.edges()), seed.n,
            (a.num, a.den), n, int(master_seed), c, lo, hi, keep_values,
        )
        for c, lo, hi in bounds
    ]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_mc_chunk, args))
    else:
        parts = [_mc_chunk(arg) for arg in args]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    s4 = sum(p[2] for p in parts)
    values: Optional[list[int]] = None
    if keep_values:
        values = []
        for p in parts:
            values.extend(p[3])
    r = replicates
    mean = s1 / r
    second = s2 / r
    var = max((s2 - s1 * s1 / r) / (r - 1), 0.0)
    var2 = max((s4 - s2 * s2 / r) / (r - 1), 0.0)
    return McEstimate(
        n=n,
        replicates=r,
        mean=mean,
        second_moment=second,
        std_error=math.sqrt(var / r),
        second_moment_std_error=math.sqrt(var2 / r),
        values=values,
    )


# ---------------------------------------------------------------------------
# Martingale diagnostics
# ---------------------------------------------------------------------------


def martingale_track(tree: Tree, region_ell: dict[int, int], alpha: AlphaLike) -> np.ndarray:
    """Track M_n * W_n along the growth history of a grown tree.

    M_n multiplies [deg(u) + alpha + ell(u) - 2]_{ell(u)} over the region
    vertices; W_n is the running product of (1 + |ell|/((1+alpha)m-2))^{-1}.
    The region must lie inside the seed.  Values are floats (diagnostic use).
    """
    if tree.parents is None or tree.seed_adjacency is None:
        raise PreconditionError("martingale_track needs a tree grown with history")
    k = tree.seed_size
    if any(not 0 <= v < k for v in region_ell):
        raise PreconditionError("region must be contained in the seed")
    af = as_alpha(alpha).shadow
    total_ell = sum(region_ell.values())
    deg = {v: len(tree.seed_adjacency[v]) for v in region_ell}
    n_final = tree.n

    def m_value() -> float:
        out = 1.0
        for v, lv in region_ell.items():
            x = deg[v] + af + lv - 2
            for i in range(lv):
                out *= x - i
        return out

    vals = np.empty(n_final - k + 1)
    w = 1.0
    vals[0] = m_value()
    parents = tree.parents
    for m in range(k, n_final):
        target = int(parents[m])
        if target in deg:
            deg[target] += 1
        w /= 1.0 + total_ell / ((1.0 + af) * m - 2.0)
        vals[m - k + 1] = m_value() * w
    return vals


# ---------------------------------------------------------------------------
# Empirical total variation
# ---------------------------------------------------------------------------


def empirical_tv(x: Sequence[int], y: Sequence[int], max_exact_support: int = 4096) -> float:
    """TV distance between two empirical distributions of integer samples.

    Exact value matching when the pooled support is small; otherwise
    Freedman-Diaconis bins on the pooled sample.
    """
    xs = list(x)
    ys = list(y)
    support = set(xs) | set(ys)
    if len(support) <= max_exact_support:
        cx: dict[int, int] = {}
        cy: dict[int, int] = {}
        for v in xs:
            cx[v] = cx.get(v, 0) + 1
        for v in ys:
            cy[v] = cy.get(v, 0) + 1
        return 0.5 * sum(
            abs(cx.get(v, 0) / len(xs) - cy.get(v, 0) / len(ys)) for v in support
        )
    pooled = np.asarray(xs + ys, dtype=np.float64)
    q75, q25 = np.percentile(pooled, [75, 25])
    width = 2 * (q75 - q25) / len(pooled) ** (1 / 3)
    if width <= 0:
        width = 1.0
    lo, hi = pooled.min(), pooled.max() + width
    edges = np.arange(lo, hi + width, width)
    hx, _ = np.histogram(np.asarray(xs, dtype=np.float64), bins=edges)
    hy, _ = np.histogram(np.asarray(ys, dtype=np.float64), bins=edges)
    return 0.5 * float(np.abs(hx / len(xs) - hy / len(ys)).sum())


# ---------------------------------------------------------------------------
# End-to-end pipeline
# ---------------------------------------------------------------------------


def _sub_seed(master: int, *key: int) -> int:
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _bound_interval(e1: McEstimate, e2: McEstimate) -> tuple[float, float]:
    """Conservative 95% interval for the moment bound: shift the mean gap and
    the second moments by 1.96 standard errors in the unfavourable (resp.
    favourable) direction."""
    diff = abs(e1.mean - e2.mean)
    dse = math.hypot(e1.std_error, e2.std_error)
    lo_diff = max(diff - 1.96 * dse, 0.0)
    hi_diff = diff + 1.96 * dse
    m2_hi = (
        e1.second_moment + 1.96 * e1.second_moment_std_error
        + e2.second_moment + 1.96 * e2.second_moment_std_error
    )
    m2_lo = max(
        e1.second_moment - 1.96 * e1.second_moment_std_error
        + e2.second_moment - 1.96 * e2.second_moment_std_error,
        0.0,
    )
    lo = lo_diff**2 / (lo_diff**2 + 2 * m2_hi) if lo_diff > 0 else 0.0
    hi = hi_diff**2 / (hi_diff**2 + 2 * m2_lo) if hi_diff > 0 else 0.0
    return lo, hi


def distinguish(
    s1: Tree,
    s2: Tree,
    alpha: AlphaLike,
    n_list: Sequence[int],
    replicates: int,
    master_seed: int,
    workers: int = 1,
) -> dict:
    """Full pipeline: choose a decorated observable for the two seeds, then
    estimate its moments at each n and certify a positive total-variation
    lower bound.  Returns a JSON-ready report (schema 1)."""
    a = as_alpha(alpha)
    if min(s1.n, s2.n) < 3:
        raise PreconditionError("seeds must have at least 3 vertices")
    if canonical_code(s1) == canonical_code(s2):
        raise PreconditionError("isomorphic seeds cannot be distinguished")
    if list(n_list) != sorted(set(n_list)):
        raise PreconditionError("n list must be strictly increasing")
    if any(n < max(s1.n, s2.n) for n in n_list):
        raise PreconditionError("every n must be at least the larger seed size")

    if s1.n == s2.n:
        tau = minimal_nonblind(s1, s2)
        plan = distinguishing_decoration(tau, s1, s2, a)
        orientation = 1
    else:
        big, small = (s1, s2) if s1.n > s2.n else (s2, s1)
        plan = distinguishing_decoration_unequal(big, small, a)
        orientation = 1 if s1.n > s2.n else -1

    deco = plan.decorated
    total_ell = sum(plan.ell)
    exponent = Fraction(total_ell) / (1 + a.fraction)

    system = RecurrenceSystem(a)
    curve1 = expectation_curve(deco, s1, a, list(n_list), system=system)
    curve2 = expectation_curve(deco, s2, a, list(n_list), system=system)

    per_n = []
    for i, n in enumerate(n_list):
        e1 = mc_moments(deco, s1, a, n, replicates, _sub_seed(master_seed, 1, i),
                        workers=workers, keep_values=True)
        e2 = mc_moments(deco, s2, a, n, replicates, _sub_seed(master_seed, 2, i),
                        workers=workers, keep_values=True)
        bound = tv_lower_bound(e1.mean, e2.mean, e1.second_moment, e2.second_moment)
        blo, bhi = _bound_interval(e1, e2)
        diff = curve1[i] - curve2[i]
        scale = math.exp(-float(exponent) * math.log(n))
        per_n.append(
            {
                "n": n,
                "mean_seed1": e1.mean,
                "mean_seed2": e2.mean,
                "second_moment_seed1": e1.second_moment,
                "second_moment_seed2": e2.second_moment,
                "std_error_seed1": e1.std_error,
                "std_error_seed2": e2.std_error,
                "tv_lower_bound": bound,
                "tv_bound_ci95": [blo, bhi],
                "empirical_tv": empirical_tv(e1.values, e2.values),
                "exact_difference": str(diff),
                "normalized_difference": float(diff) * scale,
            }
        )

    return {
        "schema": 1,
        "alpha": str(a),
        "replicates": replicates,
        "master_seed": int(master_seed),
        "seed1": {"n": s1.n, "edges": sorted(s1.edges())},
        "seed2": {"n": s2.n, "edges": sorted(s2.edges())},
        "orientation": orientation,
        "plan": {
            "tau_edges": sorted(plan.tau.edges()),
            "tau_n": plan.tau.n,
            "ell": list(plan.ell),
            "d_max": list(plan.d_max),
            "delta": [
                {"d": list(d), "value": str(v)} for d, v in sorted(plan.delta.items())
            ],
            "closed_form_sum": str(plan.closed_form_sum),
        },
        "per_n": per_n,
    }
