"""Exact embedding-counting observables on trees.

The basic observable of a decorated pattern (tau, ell) on a host tree T sums,
over all injective graph homomorphisms phi of tau into T, the product over
pattern vertices u of [deg_T(phi(u)) - 1]_{ell(u)}.  Embeddings are counted
as maps: automorphic images count separately.  All counts are arbitrary
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import CapExceededError, PreconditionError
from .trees import DecoratedTree, Tree, canonical_code, falling_factorial

__all__ = [
    "count_F",
    "count_F_split",
    "count_F_region",
    "count_perfect",
    "degree_profiles",
    "merger_expansion",
    "MergerTerm",
    "MERGER_CAP",
]

MERGER_CAP = 7


def _bfs_plan(t: Tree) -> tuple[list[int], list[int]]:
    """Visit order (root first) and, per position, the position of the parent."""
    root = max(range(t.n), key=lambda v: (t.degree(v), -v))
    order = [root]
    parent_pos = [-1]
    pos_of = {root: 0}
    head = 0
    while head < len(order):
        u = order[head]
        for w in t.neighbors(u):
            if w not in pos_of:
                pos_of[w] = len(order)
                order.append(w)
                parent_pos.append(head)
        head += 1
    return order, parent_pos


def _weight(hdeg: int, ell: int) -> int:
    return falling_factorial(hdeg - 1, ell)


def count_F(tau: DecoratedTree, host: Tree) -> int:
    """Sum over injective homomorphisms of the decorated degree products."""
    t, ell = tau.tree, tau.ell
    r = t.n
    hadj = host.adjacency
    hdeg = host.degrees
    order, parent_pos = _bfs_plan(t)
    pdeg = [t.degree(v) for v in order]
    pell = [ell[v] for v in order]
    used = [False] * host.n
    total = 0

    def rec(pos: int, acc: int) -> None:
        nonlocal total
        if pos == r:
            total += acc
            return
        need_deg = pdeg[pos]
        lv = pell[pos]
        if pos == 0:
            candidates: Iterable[int] = range(host.n)
        else:
            candidates = hadj[assigned[parent_pos[pos]]]
        for x in candidates:
            if used[x]:
                continue
            d = int(hdeg[x])
            if d < need_deg:
                continue
            w = _weight(d, lv)
            if w == 0:
                continue
            used[x] = True
            assigned[pos] = x
            rec(pos + 1, acc * w)
            used[x] = False

    assigned = [0] * r
    rec(0, 1)
    return total


def count_F_region(
    tau: DecoratedTree, host: Tree, seed_size: int, region: str
) -> int:
    """F restricted by the position of the image relative to the seed ids.

    region: 'intersects_seed' (image meets ids < k), 'inside_seed' (image
    contained in ids < k), or 'outside_seed' (image disjoint from the seed).
    Weights always use degrees in the full host tree.
    """
    if region not in ("intersects_seed", "inside_seed", "outside_seed"):
        raise PreconditionError(f"unknown region {region!r}")
    if not 1 <= seed_size <= host.n:
        raise PreconditionError("invalid seed size")
    t, ell = tau.tree, tau.ell
    r = t.n
    k = seed_size
    hadj = host.adjacency
    hdeg = host.degrees
    order, parent_pos = _bfs_plan(t)
    pdeg = [t.degree(v) for v in order]
    pell = [ell[v] for v in order]
    used = [False] * host.n
    sums = {"intersects_seed": 0, "inside_seed": 0, "outside_seed": 0}

    def rec(pos: int, acc: int, n_seed: int) -> None:
        if pos == r:
            if n_seed:
                sums["intersects_seed"] += acc
                if n_seed == r:
                    sums["inside_seed"] += acc
            else:
                sums["outside_seed"] += acc
            return
        if pos == 0:
            candidates: Iterable[int] = range(host.n)
        else:
            candidates = hadj[assigned[parent_pos[pos]]]
        need_deg = pdeg[pos]
        lv = pell[pos]
        for x in candidates:
            if used[x]:
                continue
            d = int(hdeg[x])
            if d < need_deg:
                continue
            w = _weight(d, lv)
            if w == 0:
                continue
            used[x] = True
            assigned[pos] = x
            rec(pos + 1, acc * w, n_seed + (1 if x < k else 0))
            used[x] = False

    assigned = [0] * r
    rec(0, 1, 0)
    return sums[region]


def count_perfect(
    tau: Tree,
    d: Sequence[int],
    host: Tree,
    anchor: Optional[tuple[Iterable[int], int]] = None,
) -> int:
    """Number of perfect embeddings: deg_host(phi(u)) == d(u) for every u.

    With anchor=(sigma_vertices, seed_size), restrict to embeddings whose
    image meets the seed ids exactly on phi(sigma); sigma must be a non-empty
    connected subtree of tau.
    """
    if len(d) != tau.n:
        raise PreconditionError("degree decoration must cover every pattern vertex")
    if any(x < 1 for x in d):
        raise PreconditionError("degree decorations are positive")
    in_sigma = None
    k = None
    if anchor is not None:
        sigma_vertices, k = anchor
        sigma = frozenset(sigma_vertices)
        if not sigma or not sigma <= set(range(tau.n)):
            raise PreconditionError("anchor vertices must be a non-empty subset of tau")
        if not _is_connected_subset(tau, sigma):
            raise PreconditionError("anchor is not a subtree of tau")
        in_sigma = [v in sigma for v in range(tau.n)]
    hadj = host.adjacency
    hdeg = host.degrees
    order, parent_pos = _bfs_plan(tau)
    pdeg = [tau.degree(v) for v in order]
    want = [d[v] for v in order]
    sig = [in_sigma[v] for v in order] if in_sigma is not None else None
    used = [False] * host.n
    total = 0

    def rec(pos: int) -> None:
        nonlocal total
        if pos == tau.n:
            total += 1
            return
        if pos == 0:
            candidates: Iterable[int] = range(host.n)
        else:
            candidates = hadj[assigned[parent_pos[pos]]]
        for x in candidates:
            if used[x] or int(hdeg[x]) != want[pos] or int(hdeg[x]) < pdeg[pos]:
                continue
            if sig is not None and (x < k) != sig[pos]:
                continue
            used[x] = True
            assigned[pos] = x
            rec(pos + 1)
            used[x] = False

    assigned = [0] * tau.n
    rec(0)
    return total


def degree_profiles(tau: Tree, host: Tree) -> dict[tuple[int, ...], int]:
    """Embedding counts grouped by the host-degree profile of the image.

    The profile of an embedding phi is (deg_host(phi(v)))_v indexed by the
    pattern vertex id; summing counts over all profiles gives the plain
    embedding count, and the count of one profile d equals count_perfect.
    """
    hadj = host.adjacency
    hdeg = host.degrees
    order, parent_pos = _bfs_plan(tau)
    pdeg = [tau.degree(v) for v in order]
    used = [False] * host.n
    out: dict[tuple[int, ...], int] = {}
    profile = [0] * tau.n

    def rec(pos: int) -> None:
        if pos == tau.n:
            key = tuple(profile)
            out[key] = out.get(key, 0) + 1
            return
        if pos == 0:
            candidates: Iterable[int] = range(host.n)
        else:
            candidates = hadj[assigned[parent_pos[pos]]]
        for x in candidates:
            if used[x] or int(hdeg[x]) < pdeg[pos]:
                continue
            used[x] = True
            assigned[pos] = x
            profile[order[pos]] = int(hdeg[x])
            rec(pos + 1)
            used[x] = False

    assigned = [0] * tau.n
    rec(0)
    return out


# ---------------------------------------------------------------------------
# Disjoint / overlapping pair split
# ---------------------------------------------------------------------------


def _mask_weights(tau: DecoratedTree, host: Tree) -> dict[int, int]:
    """Aggregate embedding weights by the bitmask of the image vertex set."""
    t, ell = tau.tree, tau.ell
    hadj = host.adjacency
    hdeg = host.degrees
    order, parent_pos = _bfs_plan(t)
    pdeg = [t.degree(v) for v in order]
    pell = [ell[v] for v in order]
    used = [False] * host.n
    out: dict[int, int] = {}

    def rec(pos: int, acc: int, mask: int) -> None:
        if pos == t.n:
            out[mask] = out.get(mask, 0) + acc
            return
        if pos == 0:
            candidates: Iterable[int] = range(host.n)
        else:
            candidates = hadj[assigned[parent_pos[pos]]]
        for x in candidates:
            if used[x]:
                continue
            d = int(hdeg[x])
            if d < pdeg[pos]:
                continue
            w = _weight(d, pell[pos])
            if w == 0:
                continue
            used[x] = True
            assigned[pos] = x
            rec(pos + 1, acc * w, mask | (1 << x))
            used[x] = False

    assigned = [0] * t.n
    rec(0, 1, 0)
    return out


def count_F_split(
    tau: DecoratedTree, sigma: DecoratedTree, host: Tree
) -> tuple[int, int]:
    """(disjoint, overlap) sums over ordered pairs of embeddings of tau and
    sigma, split on whether the two images share a host vertex.

    Both parts are accumulated directly from the pair enumeration, so
    disjoint + overlap == count_F(tau) * count_F(sigma) is a real consistency
    check rather than an algebraic identity of this function.
    """
    wa = _mask_weights(tau, host)
    wb = _mask_weights(sigma, host) if sigma is not tau else wa
    if not wa or not wb:
        return 0, 0
    # int64 fast path when every partial sum provably fits
    max_a = max(wa.values())
    sum_b = sum(wb.values())
    if host.n < 63 and max_a < 2**62 and sum_b < 2**62 and max(wb.values()) < 2**62:
        masks_b = np.fromiter(wb.keys(), dtype=np.int64, count=len(wb))
        weights_b = np.fromiter(wb.values(), dtype=np.int64, count=len(wb))
        disjoint = 0
        overlap = 0
        for m1, w1 in wa.items():
            hit = (masks_b & m1) != 0
            s_over = int(weights_b[hit].sum())
            overlap += w1 * s_over
            disjoint += w1 * (int(sum_b) - s_over)
        return disjoint, overlap
    disjoint = 0
    overlap = 0
    for m1, w1 in wa.items():
        for m2, w2 in wb.items():
            if m1 & m2:
                overlap += w1 * w2
            else:
                disjoint += w1 * w2
    return disjoint, overlap


# ---------------------------------------------------------------------------
# Merger expansion of the overlapping part
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MergerTerm:
    tree: DecoratedTree
    coefficient: int


def _is_connected_subset(t: Tree, vs: frozenset[int]) -> bool:
    it = iter(vs)
    start = next(it)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in t.neighbors(u):
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vs)


def _connected_subsets(t: Tree) -> list[frozenset[int]]:
    out: set[frozenset[int]] = set()

    def expand(current: frozenset[int], frontier: set[int]) -> None:
        out.add(current)
        for v in sorted(frontier):
            nxt = current | {v}
            if nxt in out:
                continue
            expand(nxt, (frontier | set(t.neighbors(v))) - nxt)

    for v in range(t.n):
        expand(frozenset([v]), set(t.neighbors(v)))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def _subtree_isos(t: Tree, a: frozenset[int], b: frozenset[int]) -> list[dict[int, int]]:
    """All isomorphisms from the induced subtree on a to the one on b."""
    la, lb = sorted(a), sorted(b)
    if len(la) != len(lb):
        return []
    dega = {v: sum(1 for w in t.neighbors(v) if w in a) for v in la}
    degb = {v: sum(1 for w in t.neighbors(v) if w in b) for v in lb}
    if sorted(dega.values()) != sorted(degb.values()):
        return []
    isos: list[dict[int, int]] = []
    order = [la[0]]
    parents: dict[int, Optional[int]] = {la[0]: None}
    head = 0
    while head < len(order):
        u = order[head]
        for w in t.neighbors(u):
            if w in a and w not in parents:
                parents[w] = u
                order.append(w)
        head += 1

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def rec(pos: int) -> None:
        if pos == len(order):
            isos.append(dict(mapping))
            return
        u = order[pos]
        pu = parents[u]
        if pu is None:
            candidates = lb
        else:
            candidates = [w for w in t.neighbors(mapping[pu]) if w in b]
        for x in candidates:
            if x in used or dega[u] != degb[x]:
                continue
            mapping[u] = x
            used.add(x)
            rec(pos + 1)
            used.discard(x)
            del mapping[u]

    rec(0)
    return isos


def _merge_coefficient(l1: int, l2: int, m: int) -> int:
    j = l1 + l2 - m
    return math.comb(l1, j) * math.comb(l2, j) * math.factorial(j)


def merger_expansion(tau: DecoratedTree, cap: int = MERGER_CAP) -> list[MergerTerm]:
    """Decorated trees sigma and positive coefficients C with
    sum_sigma C * F_sigma(T) equal, for every host T, to the overlapping part
    of the pair sum of tau with itself.

    Enumerates ordered pairs of isomorphic connected subtrees (sigma1,
    sigma2) of tau and every gluing isomorphism, then all valid decorations m
    with max(l1, l2) <= m <= l1 + l2 per shared vertex; terms whose glued
    decorated trees are isomorphic are merged with coefficients added.
    """
    t, ell = tau.tree, tau.ell
    if t.n > cap:
        raise CapExceededError(f"merger cap is |tau| <= {cap}")
    subsets = _connected_subsets(t)
    by_code: dict[bytes, list[frozenset[int]]] = {}
    for s in subsets:
        la = sorted(s)
        idx = {v: i for i, v in enumerate(la)}
        sub = Tree.from_edges(len(la), [(idx[u], idx[v]) for u, v in t.edges() if u in s and v in s])
        by_code.setdefault(canonical_code(sub), []).append(s)

    terms: dict[bytes, list] = {}
    tau_edges = list(t.edges())
    for group in by_code.values():
        for a in group:
            for b in group:
                for g in _subtree_isos(t, a, b):
                    _accumulate_merger(terms, t, ell, tau_edges, a, b, g)
    out = [MergerTerm(rep, coeff) for rep, coeff in terms.values()]
    out.sort(key=lambda term: canonical_code(term.tree))
    return out


def _accumulate_merger(terms, t, ell, tau_edges, a, b, g) -> None:
    r = t.n
    ginv = {x: u for u, x in g.items()}
    # merged ids: copy1 keeps 0..r-1, copy2-only vertices follow in id order
    extra = [v for v in range(r) if v not in b]
    idx2 = {v: (ginv[v] if v in b else r + extra.index(v)) for v in range(r)}
    nv = r + len(extra)
    edges = list(tau_edges)
    for u, v in tau_edges:
        if u in b and v in b:
            continue  # the shared edge already present from copy1
        edges.append(tuple(sorted((idx2[u], idx2[v]))))
    merged = Tree.from_edges(nv, edges)

    ell1 = [ell[u] if u < r else 0 for u in range(nv)]
    ell2 = [0] * nv
    for v in range(r):
        ell2[idx2[v]] = ell[v]
    shared = sorted(a)
    ranges = []
    for u in shared:
        lo = max(ell1[u], ell2[u])
        hi = ell1[u] + ell2[u]
        ranges.append(range(lo, hi + 1))

    def emit(choice: tuple[int, ...]) -> None:
        m = [ell1[u] + ell2[u] for u in range(nv)]
        coeff = 1
        for u, mu in zip(shared, choice):
            m[u] = mu
            coeff *= _merge_coefficient(ell1[u], ell2[u], mu)
        deco = DecoratedTree(merged, tuple(m))
        code = canonical_code(deco)
        if code in terms:
            terms[code][1] += coeff
        else:
            terms[code] = [deco, coeff]

    def product(pos: int, acc: list[int]) -> None:
        if pos == len(ranges):
            emit(tuple(acc))
            return
        for x in ranges[pos]:
            acc.append(x)
            product(pos + 1, acc)
            acc.pop()

    product(0, [])
