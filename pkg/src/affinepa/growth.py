"""Samplers for abstract and planar affine preferential attachment trees.

The attachment law: a new vertex links to vertex u of the current tree T of
size N with probability (deg_T(u) - 1 + alpha) / ((1 + alpha) N - 2).

The fast abstract sampler uses the corner-token view: every vertex owns one
red token (weight alpha) and deg-1 blue tokens (weight 1 each), so a step is
"pick the red class with probability alpha*N/((1+alpha)N-2), then a uniform
token".  Each step consumes exactly two uniforms; the numba kernel and the
pure-python fallback consume them identically, so a fixed rng seed yields a
bit-identical tree on either path.

Replicate streams: replicate (or chunk) i of a batch uses
Generator(PCG64(SeedSequence(master_seed, spawn_key=(i,)))), so results do
not depend on worker count or scheduling.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import CapExceededError, PreconditionError
from .planar import HALF_EDGE, PlaneTree, PlantedPlaneTree
from .trees import Tree, canonical_code

__all__ = [
    "AlphaParam",
    "as_alpha",
    "GrowthOutcome",
    "grow_abstract",
    "grow_abstract_reference",
    "grow_planar",
    "grow_planted",
    "enumerate_growth",
    "enumerate_growth_planar",
    "replicate_rng",
    "ENUM_CAP",
]

ENUM_CAP = 10**6

AlphaLike = Union["AlphaParam", Fraction, int, str, tuple]


@dataclass(frozen=True)
class AlphaParam:
    """Exact rational attachment parameter alpha > 0 with a float shadow."""

    num: int
    den: int

    def __post_init__(self):
        if self.num <= 0 or self.den <= 0:
            raise PreconditionError("alpha must be a positive rational")
        g = np.gcd(self.num, self.den)
        object.__setattr__(self, "num", int(self.num // g))
        object.__setattr__(self, "den", int(self.den // g))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def shadow(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


def as_alpha(alpha: AlphaLike) -> AlphaParam:
    """Coerce an exact representation of alpha; floats are refused."""
    if isinstance(alpha, AlphaParam):
        return alpha
    if isinstance(alpha, Fraction):
        return AlphaParam(alpha.numerator, alpha.denominator)
    if isinstance(alpha, bool):
        raise PreconditionError("alpha must be a positive rational")
    if isinstance(alpha, int):
        return AlphaParam(alpha, 1)
    if isinstance(alpha, str):
        num, _, den = alpha.partition("/")
        return AlphaParam(int(num), int(den) if den else 1)
    if isinstance(alpha, tuple) and len(alpha) == 2:
        return AlphaParam(int(alpha[0]), int(alpha[1]))
    raise PreconditionError(f"cannot interpret alpha={alpha!r} as an exact rational")


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(rng))))


def replicate_rng(master_seed: int, index: int) -> np.random.Generator:
    """Stream for replicate `index`: documented splitting rule of the package."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


# ---------------------------------------------------------------------------
# Abstract grower kernels
# ---------------------------------------------------------------------------

_NUMBA_DISABLED = bool(os.environ.get("AFFINEPA_NO_NUMBA"))

try:  # pragma: no cover - exercised implicitly
    if _NUMBA_DISABLED:
        raise ImportError("numba disabled via AFFINEPA_NO_NUMBA")
    from numba import njit as _njit
except ImportError:  # pragma: no cover
    _njit = None


def _grow_fill_py(u1, u2, parents, blue, nb, k, alpha_f):
    n = parents.shape[0]
    for t in range(n - k):
        m = k + t
        p_red = alpha_f * m / ((1.0 + alpha_f) * m - 2.0)
        if u1[t] < p_red:
            v = int(u2[t] * m)
        else:
            v = blue[int(u2[t] * (m - 2))]
        parents[m] = v
        blue[nb] = v
        nb += 1
    return nb


def _vertex_stat_py(deg, ell):
    total = 0
    for v in range(deg.shape[0]):
        d = int(deg[v]) - 1
        w = 1
        for i in range(ell):
            w *= d - i
            if w <= 0:
                w = 0
                break
        total += w
    return total


if _njit is not None:
    _grow_fill = _njit(cache=True, nogil=True)(_grow_fill_py)
    _vertex_stat = _njit(cache=True, nogil=True)(_vertex_stat_py)
else:  # pragma: no cover
    _grow_fill = _grow_fill_py
    _vertex_stat = _vertex_stat_py


def _seed_blue_tokens(seed: Tree) -> np.ndarray:
    toks = [v for v in range(seed.n) for _ in range(seed.degree(v) - 1)]
    return np.array(toks, dtype=np.int64)


def grow_abstract(seed: Tree, alpha: AlphaLike, n_target: int, rng) -> Tree:
    """Grow an abstract affine-PA tree from `seed` to `n_target` vertices."""
    a = as_alpha(alpha)
    k = seed.n
    if k < 2:
        raise PreconditionError("seed must have at least 2 vertices")
    if n_target < k:
        raise PreconditionError("n_target must be at least the seed size")
    if n_target == k:
        return seed
    gen = _rng(rng)
    steps = n_target - k
    u1 = gen.random(steps)
    u2 = gen.random(steps)
    parents = np.full(n_target, -1, dtype=np.int64)
    blue = np.empty(n_target - 2, dtype=np.int64)
    seed_blue = _seed_blue_tokens(seed)
    blue[: len(seed_blue)] = seed_blue
    _grow_fill(u1, u2, parents, blue, len(seed_blue), k, a.shadow)
    return Tree.from_parents(seed, parents)


def grow_abstract_reference(seed: Tree, alpha: AlphaLike, n_target: int, rng) -> Tree:
    """Slow reference sampler: integer-weight replication, exact arithmetic.

    Kept as an independent code path to cross-validate the corner-token
    sampler; it draws integer indices directly so no float enters the
    attachment probabilities.
    """
    a = as_alpha(alpha)
    p, q = a.num, a.den
    k = seed.n
    if k < 2:
        raise PreconditionError("seed must have at least 2 vertices")
    gen = _rng(rng)
    tokens: list[int] = []
    for v in range(k):
        tokens.extend([v] * (q * (seed.degree(v) - 1) + p))
    parents = np.full(n_target, -1, dtype=np.int64)
    for m in range(k, n_target):
        u = tokens[int(gen.integers(0, len(tokens)))]
        parents[m] = u
        tokens.extend([u] * q)
        tokens.extend([m] * p)
    return Tree.from_parents(seed, parents)


# ---------------------------------------------------------------------------
# Planar grower
# ---------------------------------------------------------------------------


class _PlanarState:
    """Mutable corner-coloured forest state shared by the planar growers.

    orders[v] is v's cyclic neighbour list (HALF_EDGE allowed as a slot);
    red[v] the index of v's red corner or None; corner i of v sits between
    orders[v][i-1] and orders[v][i].
    """

    def __init__(self, orders, red, red_tokens, blue_tokens, alpha_f):
        self.orders = orders
        self.red = red
        self.red_tokens = red_tokens
        self.blue_tokens = blue_tokens
        self.alpha_f = alpha_f

    def step(self, u1: float, u2: float, u3: float, new_vertex: int):
        """Insert `new_vertex` through a corner drawn per the corner law."""
        nr = len(self.red_tokens)
        nb = len(self.blue_tokens)
        a = self.alpha_f
        p_red = a * nr / (a * nr + nb) if nb else 1.0
        if u1 < p_red:
            v = self.red_tokens[int(u2 * nr)]
            corner = self.red[v]
            color = "r"
        else:
            v = self.blue_tokens[int(u2 * nb)]
            deg = len(self.orders[v])
            rv = self.red[v]
            blues = [j for j in range(deg) if j != rv]
            corner = blues[int(u3 * len(blues))]
            color = "b"
        self._insert(v, corner, new_vertex)
        return v, corner, color

    def _insert(self, v: int, corner: int, w: int) -> None:
        self.orders[v].insert(corner, w)
        rv = self.red[v]
        if rv is not None and rv >= corner:
            # red corner keeps its ccw end-delimiter: a split red corner's
            # red half is the one after the new half-edge
            self.red[v] = rv + 1
        while len(self.orders) <= w:
            self.orders.append(None)
            self.red.append(None)
        self.orders[w] = [v]
        self.red[w] = 0
        self.red_tokens.append(w)
        self.blue_tokens.append(v)


def _edges_from_orders(orders) -> list[tuple[int, int]]:
    out = []
    for u, nbs in enumerate(orders):
        for v in nbs:
            if v != HALF_EDGE and u < v:
                out.append((u, v))
    return out


def grow_planar(
    seed: PlaneTree,
    alpha: AlphaLike,
    n_target: int,
    rng,
    trajectory: Optional[list] = None,
) -> PlaneTree:
    """Planar affine-PA: red corners weigh alpha, blue corners weigh 1."""
    a = as_alpha(alpha)
    k = seed.n
    if n_target < k:
        raise PreconditionError("n_target must be at least the seed size")
    gen = _rng(rng)
    orders = [list(o) for o in seed.neighbor_order]
    red = list(seed.red_corner)
    state = _PlanarState(
        orders,
        red,
        red_tokens=list(range(k)),
        blue_tokens=[v for v in range(k) for _ in range(seed.tree.degree(v) - 1)],
        alpha_f=a.shadow,
    )
    steps = n_target - k
    us = gen.random((steps, 3))
    for t in range(steps):
        v, corner, color = state.step(us[t, 0], us[t, 1], us[t, 2], k + t)
        if trajectory is not None:
            trajectory.append((t, v, corner, color))
    tree = Tree.from_edges(n_target, _edges_from_orders(orders))
    return PlaneTree(tree, tuple(tuple(o) for o in orders), tuple(red))


def grow_planted(flavor: str, alpha: AlphaLike, n_target: int, rng) -> PlantedPlaneTree:
    """Grow a planted plane tree from the single-vertex initial condition."""
    if flavor not in ("red", "blue"):
        raise PreconditionError("flavor is 'red' or 'blue'")
    if n_target < 1:
        raise PreconditionError("n_target must be >= 1")
    a = as_alpha(alpha)
    gen = _rng(rng)
    orders = [[HALF_EDGE]]
    red = [0] if flavor == "red" else [None]
    state = _PlanarState(
        orders,
        red,
        red_tokens=[0] if flavor == "red" else [],
        blue_tokens=[] if flavor == "red" else [0],
        alpha_f=a.shadow,
    )
    us = gen.random((n_target - 1, 3))
    for t in range(n_target - 1):
        state.step(us[t, 0], us[t, 1], us[t, 2], 1 + t)
    return _freeze_planted(orders, red, root=0, flavor=flavor)


def _freeze_planted(orders, red, root: int, flavor: str) -> PlantedPlaneTree:
    slot = orders[root].index(HALF_EDGE)
    tree = Tree.from_edges(len(orders), _edges_from_orders(orders))
    order_t = tuple(
        tuple(x for x in o if x != HALF_EDGE) if v == root else tuple(o)
        for v, o in enumerate(orders)
    )
    return PlantedPlaneTree(tree, order_t, tuple(red), root, slot, flavor)


# ---------------------------------------------------------------------------
# Exact growth enumeration (oracle)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthOutcome:
    tree: object  # Tree or PlaneTree
    probability: Fraction


def _outcome_count(k: int, n: int) -> int:
    out = 1
    for m in range(k, n):
        out *= m
    return out


def enumerate_growth(
    seed: Tree,
    alpha: AlphaLike,
    n_target: int,
    canonicalize: bool = False,
    cap: int = ENUM_CAP,
) -> list[GrowthOutcome]:
    """Exhaustive distribution of the abstract model at n_target, exact.

    Probabilities are exact rationals and sum to exactly 1.  With
    `canonicalize`, isomorphic outcomes are merged and their probabilities
    added.
    """
    a = as_alpha(alpha)
    p, q = a.num, a.den
    k = seed.n
    if k < 2:
        raise PreconditionError("seed must have at least 2 vertices")
    if n_target < k:
        raise PreconditionError("n_target must be at least the seed size")
    if _outcome_count(k, n_target) > cap:
        raise CapExceededError(
            f"{_outcome_count(k, n_target)} growth histories exceed cap {cap}"
        )
    seed_deg = tuple(seed.degree(v) for v in range(k))
    states: list[tuple[tuple[int, ...], tuple[int, ...], Fraction]] = [
        ((), seed_deg, Fraction(1))
    ]
    for m in range(k, n_target):
        denom = (p + q) * m - 2 * q
        nxt = []
        for parents, degs, prob in states:
            for u in range(m):
                w = q * (degs[u] - 1) + p
                nd = degs[:u] + (degs[u] + 1,) + degs[u + 1 :] + (1,)
                nxt.append((parents + (u,), nd, prob * Fraction(w, denom)))
        states = nxt
    outcomes = []
    for parents, _, prob in states:
        arr = np.array((-1,) * k + parents, dtype=np.int64)
        outcomes.append(GrowthOutcome(Tree.from_parents(seed, arr), prob))
    if not canonicalize:
        return outcomes
    merged: dict[bytes, GrowthOutcome] = {}
    for out in outcomes:
        code = canonical_code(out.tree)
        if code in merged:
            merged[code] = GrowthOutcome(
                merged[code].tree, merged[code].probability + out.probability
            )
        else:
            merged[code] = out
    return [merged[c] for c in sorted(merged)]


def enumerate_growth_planar(
    seed: PlaneTree, alpha: AlphaLike, n_target: int, cap: int = ENUM_CAP
) -> list[GrowthOutcome]:
    """Exhaustive distribution of the planar model, corner by corner."""
    a = as_alpha(alpha)
    p, q = a.num, a.den
    k = seed.n
    if n_target < k:
        raise PreconditionError("n_target must be at least the seed size")
    count = 1
    for m in range(k, n_target):
        count *= 2 * m - 2
    if count > cap:
        raise CapExceededError(f"{count} corner histories exceed cap {cap}")

    states = [([list(o) for o in seed.neighbor_order], list(seed.red_corner), Fraction(1))]
    for m in range(k, n_target):
        denom = (p + q) * m - 2 * q
        nxt = []
        for orders, red, prob in states:
            for v in range(m):
                for corner in range(len(orders[v])):
                    weight = p if corner == red[v] else q
                    o2 = [list(o) for o in orders]
                    r2 = list(red)
                    st = _PlanarState(o2, r2, [], [], a.shadow)
                    st._insert(v, corner, m)
                    nxt.append((o2, r2, prob * Fraction(weight, denom)))
        states = nxt
    out = []
    for orders, red, prob in states:
        tree = Tree.from_edges(n_target, _edges_from_orders(orders))
        out.append(
            GrowthOutcome(PlaneTree(tree, tuple(tuple(o) for o in orders), tuple(red)), prob)
        )
    return out
