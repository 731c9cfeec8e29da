"""Polya-urn size vector, plane-tree decomposition around the seed, and the
coupling of two equal-size seeds through a shared planted forest.

Seed corners are indexed per vertex: corner (v, 1) is v's red corner, and
(v, i) for i >= 2 follow counterclockwise.  The subtree stemming from (v, i)
is the planted plane tree holding v (as root) and every vertex whose path to
the seed enters through that corner; it is red-flavoured iff i == 1.

A subtree size vector (k^{v,i}) relates to urn weights by
x^{v,1} = (1+alpha) k^{v,1} - 1 and x^{v,i} = (1+alpha) k^{v,i} - alpha, so
the sizes over all 2k-2 corners add up to n + k - 2 (each seed vertex is
counted once per corner it roots).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .growth import AlphaLike, _PlanarState, _rng, as_alpha
from .planar import HALF_EDGE, PlaneTree, PlantedPlaneTree
from .trees import Tree, canonical_order

__all__ = [
    "UrnState",
    "urn_sample",
    "SubtreeForest",
    "decompose",
    "recompose",
    "coupled_grow",
]


@dataclass(frozen=True)
class UrnState:
    """Weights of the 2k-2 colour urn driving the subtree sizes.

    Coordinates are ordered red block (k entries, one per seed vertex corner
    (v,1)) then blue block (k-2 entries, corners (v,i) with i >= 2 sorted by
    (v, i)).
    """

    sizes: tuple[int, ...]
    k: int
    n: int
    alpha: "object"

    @property
    def colors(self) -> tuple[str, ...]:
        return ("r",) * self.k + ("b",) * (self.k - 2)

    @property
    def weights(self) -> tuple[Fraction, ...]:
        a = self.alpha.fraction
        out = []
        for color, s in zip(self.colors, self.sizes):
            if color == "r":
                out.append((1 + a) * s - 1)
            else:
                out.append((1 + a) * s - a)
        return tuple(out)

    def total_weight(self) -> Fraction:
        return sum(self.weights, Fraction(0))


def urn_sample(k: int, alpha: AlphaLike, n_target: int, rng) -> UrnState:
    """Run the urn from its initial state for n_target - k draws.

    Starts with k coordinates of weight alpha and k-2 of weight 1; one draw
    picks a coordinate proportionally to its weight and adds 1+alpha to it.
    Draws use integer cumulative weights, so no float enters the law.
    """
    if k < 2:
        raise PreconditionError("k must be >= 2")
    if n_target < k:
        raise PreconditionError("n_target must be >= k")
    a = as_alpha(alpha)
    p, q = a.num, a.den
    gen = _rng(rng)
    ncoord = 2 * k - 2
    sizes = [1] * ncoord
    # scaled integer weights: q * x; red: (p+q)s - q, blue: (p+q)s - p
    w = [p if c < k else q for c in range(ncoord)]
    total = sum(w)
    for _ in range(n_target - k):
        r = int(gen.integers(0, total))
        acc = 0
        for j in range(ncoord):
            acc += w[j]
            if r < acc:
                break
        sizes[j] += 1
        w[j] += p + q
        total += p + q
    return UrnState(tuple(sizes), k, n_target, a)


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlantedSubtree:
    planted: PlantedPlaneTree
    global_ids: tuple[int, ...]  # local id -> id in the host tree (root first)

    @property
    def size(self) -> int:
        return self.planted.n


@dataclass(frozen=True)
class SubtreeForest:
    seed: PlaneTree
    entries: dict[tuple[int, int], PlantedSubtree]
    n: int

    @property
    def k(self) -> int:
        return self.seed.n

    def corner_keys(self) -> list[tuple[int, int]]:
        return sorted(self.entries)

    def size_vector(self) -> tuple[int, ...]:
        """Sizes ordered red block then blue block, matching UrnState."""
        reds = [self.entries[key].size for key in self.corner_keys() if key[1] == 1]
        blues = [self.entries[key].size for key in self.corner_keys() if key[1] > 1]
        return tuple(reds + blues)

    def urn_state(self, alpha: AlphaLike) -> UrnState:
        return UrnState(self.size_vector(), self.k, self.n, as_alpha(alpha))


def _check_seed_prefix(t: PlaneTree, k: int) -> None:
    if not 2 <= k <= t.n:
        raise PreconditionError("invalid seed size")
    seen = 0
    for u in range(k):
        for v in t.tree.neighbors(u):
            if v < u:
                seen += 1
    if seen != k - 1:
        raise PreconditionError("ids 0..k-1 do not induce a size-k tree")
    stack, vis = [0], {0}
    while stack:
        u = stack.pop()
        for v in t.tree.neighbors(u):
            if v < k and v not in vis:
                vis.add(v)
                stack.append(v)
    if len(vis) != k:
        raise PreconditionError("seed prefix is not connected")


def decompose(t: PlaneTree, seed_size: int) -> SubtreeForest:
    """Split a grown plane tree into the planted subtrees of its seed corners."""
    k = seed_size
    _check_seed_prefix(t, k)
    order = t.neighbor_order
    red = t.red_corner

    seed_orders: list[tuple[int, ...]] = [()] * k
    entries: dict[tuple[int, int], PlantedSubtree] = {}
    for v in range(k):
        o = order[v]
        b = o[red[v]]  # ccw end-delimiter of the red corner: always a seed edge
        if b >= k:
            raise PreconditionError(
                "red corner of a seed vertex does not end at a seed edge; "
                "tree is inconsistent with the growth convention"
            )
        pos = o.index(b)
        walk = o[pos + 1 :] + o[: pos + 1]  # cyclic walk ending at b
        gaps: list[list[int]] = []
        seed_nbrs: list[int] = []
        cur: list[int] = []
        for x in walk:
            if x < k:
                gaps.append(cur)
                seed_nbrs.append(x)
                cur = []
            else:
                cur.append(x)
        if cur:
            raise PreconditionError("corner walk did not close on a seed edge")
        # walk visits seed neighbours e_2..e_deg then e_1=b; re-key by corner index
        deg = len(seed_nbrs)
        seed_orders[v] = (b,) + tuple(seed_nbrs[:-1])
        for pos_in_walk, gap in enumerate(gaps):
            i = 1 if pos_in_walk == deg - 1 else pos_in_walk + 2
            entries[(v, i)] = _extract_planted(t, v, gap, red_flavor=(i == 1))

    seed_tree = Tree.from_edges(k, [(u, w) for u in range(k) for w in seed_orders[u] if u < w])
    seed_plane = PlaneTree(seed_tree, tuple(seed_orders), (0,) * k)
    return SubtreeForest(seed_plane, entries, t.n)


def _extract_planted(t: PlaneTree, root: int, gap: list[int], red_flavor: bool) -> PlantedSubtree:
    order = t.neighbor_order
    globals_: list[int] = [root]
    local: dict[int, int] = {root: 0}
    for x in gap:
        stack = [(x, root)]
        while stack:
            u, parent = stack.pop()
            local[u] = len(globals_)
            globals_.append(u)
            for w in reversed(order[u]):
                if w != parent:
                    stack.append((w, u))
    m = len(globals_)
    orders: list[tuple[int, ...]] = [()] * m
    reds: list[Optional[int]] = [None] * m
    orders[0] = tuple(local[x] for x in gap)
    reds[0] = len(gap) if red_flavor else None
    for u in globals_[1:]:
        orders[local[u]] = tuple(local[w] for w in order[u])
        reds[local[u]] = t.red_corner[u]
    edges = [(lu, orders[lu][j]) for lu in range(m) for j in range(len(orders[lu])) if lu < orders[lu][j]]
    planted = PlantedPlaneTree(
        Tree.from_edges(m, edges),
        tuple(orders),
        tuple(reds),
        root=0,
        half_edge_slot=len(gap),
        flavor="red" if red_flavor else "blue",
    )
    return PlantedSubtree(planted, tuple(globals_))


def recompose(forest: SubtreeForest) -> PlaneTree:
    """Graft the planted subtrees back into the seed corners (decompose inverse)."""
    seed = forest.seed
    k = seed.n
    n = forest.n
    orders: list[Optional[list[int]]] = [None] * n
    reds: list[Optional[int]] = [None] * n

    gap_of: dict[tuple[int, int], list[int]] = {}
    for (v, i), sub in forest.entries.items():
        ids = sub.global_ids
        if ids[0] != v:
            raise PreconditionError("subtree root id mismatch")
        p = sub.planted
        gap_of[(v, i)] = [ids[x] for x in p.neighbor_order[0]]
        for lu in range(1, p.n):
            u = ids[lu]
            orders[u] = [ids[w] for w in p.neighbor_order[lu]]
            reds[u] = p.red_corner[lu]

    for v in range(k):
        rot = seed.neighbor_order[v][seed.red_corner[v] :] + seed.neighbor_order[v][: seed.red_corner[v]]
        out: list[int] = []
        for j, e in enumerate(rot):
            out.append(e)
            nxt = (v, j + 2) if j + 1 < len(rot) else (v, 1)
            out.extend(gap_of[nxt])
        orders[v] = out
        reds[v] = 0

    edges = [(u, w) for u in range(n) for w in orders[u] if u < w]
    return PlaneTree(Tree.from_edges(n, edges), tuple(tuple(o) for o in orders), tuple(reds))


# ---------------------------------------------------------------------------
# Coupling
# ---------------------------------------------------------------------------


def _corner_pairing(seed: PlaneTree) -> list[tuple[int, int]]:
    """Corners ordered red block then blue block by (canonical rank, index)."""
    rank = {v: r for r, v in enumerate(canonical_order(seed.tree))}
    verts = sorted(range(seed.n), key=lambda v: (rank[v], v))
    reds = [(v, 1) for v in verts]
    blues = [(v, i) for v in verts for i in range(2, seed.tree.degree(v) + 1)]
    return reds + blues


def coupled_grow(
    seed1: PlaneTree, seed2: PlaneTree, alpha: AlphaLike, n_target: int, rng
) -> tuple[PlaneTree, PlaneTree]:
    """Grow T_n from both seeds off one urn-driven planted forest.

    The forest of k red- and k-2 blue-flavoured planted trees is grown
    step-by-step under the corner law (which realises the urn of the size
    vector), then grafted into each seed through the fixed corner pairing
    red-to-red / blue-to-blue by (vertex canonical rank, corner index).
    Each marginal is a planar affine-PA tree from its seed.
    """
    k = seed1.n
    if seed2.n != k:
        raise PreconditionError("coupled seeds must have equal size")
    if n_target < k:
        raise PreconditionError("n_target must be >= seed size")
    a = as_alpha(alpha)
    gen = _rng(rng)
    ncoord = 2 * k - 2

    root_id = lambda c: n_target + c
    orders: list[Optional[list[int]]] = [None] * (n_target + ncoord)
    reds: list[Optional[int]] = [None] * (n_target + ncoord)
    for c in range(ncoord):
        orders[root_id(c)] = [HALF_EDGE]
        reds[root_id(c)] = 0 if c < k else None
    state = _PlanarState(
        orders,
        reds,
        red_tokens=[root_id(c) for c in range(k)],
        blue_tokens=[root_id(c) for c in range(k, ncoord)],
        alpha_f=a.shadow,
    )
    us = gen.random((n_target - k, 3))
    for t in range(n_target - k):
        state.step(us[t, 0], us[t, 1], us[t, 2], k + t)

    pair1 = _corner_pairing(seed1)
    pair2 = _corner_pairing(seed2)
    out1 = _graft(seed1, pair1, orders, reds, n_target, root_id)
    out2 = _graft(seed2, pair2, orders, reds, n_target, root_id)
    return out1, out2


def _graft(seed, pairing, orders, reds, n, root_id) -> PlaneTree:
    k = seed.n
    coord_of = {corner: c for c, corner in enumerate(pairing)}
    root_to_seed = {root_id(c): corner[0] for c, corner in enumerate(pairing)}

    def gap(corner):
        o = orders[root_id(coord_of[corner])]
        pos = o.index(HALF_EDGE)
        return o[pos + 1 :] + o[:pos]

    out_orders: list[Optional[tuple[int, ...]]] = [None] * n
    out_reds: list[Optional[int]] = [None] * n
    for v in range(k):
        rot = seed.neighbor_order[v][seed.red_corner[v] :] + seed.neighbor_order[v][: seed.red_corner[v]]
        acc: list[int] = []
        for j, e in enumerate(rot):
            acc.append(e)
            nxt = (v, j + 2) if j + 1 < len(rot) else (v, 1)
            acc.extend(gap(nxt))
        out_orders[v] = tuple(acc)
        out_reds[v] = 0
    for u in range(k, n):
        out_orders[u] = tuple(root_to_seed.get(w, w) for w in orders[u])
        out_reds[u] = reds[u]
    edges = [(u, w) for u in range(n) for w in out_orders[u] if u < w]
    return PlaneTree(Tree.from_edges(n, edges), tuple(out_orders), tuple(out_reds))
