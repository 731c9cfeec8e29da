"""Independent reference implementations used as test oracles.

Nothing here shares code paths with the production counters: embeddings are
enumerated by brute force over vertex tuples, labeled trees come from Prufer
sequences, and expectations are weighted sums over the exact growth
enumeration.
"""

from fractions import Fraction
from itertools import permutations, product

from affinepa import DecoratedTree, Tree, enumerate_growth, falling_factorial
from affinepa.growth import as_alpha


def count_F_naive(tau: DecoratedTree, host: Tree) -> int:
    """Exponential reference: try every injective vertex map."""
    t, ell = tau.tree, tau.ell
    edges = list(t.edges())
    total = 0
    for image in permutations(range(host.n), t.n):
        if all(image[b] in host.neighbors(image[a]) for a, b in edges):
            w = 1
            for u in range(t.n):
                w *= falling_factorial(host.degree(image[u]) - 1, ell[u])
            total += w
    return total


def count_F_region_naive(tau: DecoratedTree, host: Tree, k: int, region: str) -> int:
    t, ell = tau.tree, tau.ell
    edges = list(t.edges())
    total = 0
    for image in permutations(range(host.n), t.n):
        if not all(image[b] in host.neighbors(image[a]) for a, b in edges):
            continue
        inside = sum(1 for x in image if x < k)
        if region == "intersects_seed" and inside == 0:
            continue
        if region == "inside_seed" and inside != t.n:
            continue
        if region == "outside_seed" and inside > 0:
            continue
        w = 1
        for u in range(t.n):
            w *= falling_factorial(host.degree(image[u]) - 1, ell[u])
        total += w
    return total


def count_perfect_naive(tau: Tree, d, host: Tree) -> int:
    edges = list(tau.edges())
    total = 0
    for image in permutations(range(host.n), tau.n):
        if all(image[b] in host.neighbors(image[a]) for a, b in edges) and all(
            host.degree(image[u]) == d[u] for u in range(tau.n)
        ):
            total += 1
    return total


def count_split_naive(tau: DecoratedTree, sigma: DecoratedTree, host: Tree):
    """Quadratic reference for the disjoint/overlap pair split."""

    def embeddings(pat: DecoratedTree):
        t, ell = pat.tree, pat.ell
        edges = list(t.edges())
        out = []
        for image in permutations(range(host.n), t.n):
            if all(image[b] in host.neighbors(image[a]) for a, b in edges):
                w = 1
                for u in range(t.n):
                    w *= falling_factorial(host.degree(image[u]) - 1, ell[u])
                if w:
                    out.append((frozenset(image), w))
        return out

    e1 = embeddings(tau)
    e2 = embeddings(sigma)
    disjoint = overlap = 0
    for s1, w1 in e1:
        for s2, w2 in e2:
            if s1 & s2:
                overlap += w1 * w2
            else:
                disjoint += w1 * w2
    return disjoint, overlap


def labeled_trees(k: int):
    """All labeled trees on k vertices via Prufer sequences."""
    if k == 1:
        yield Tree(1, [[]])
        return
    if k == 2:
        yield Tree.from_edges(2, [(0, 1)])
        return
    import heapq

    for seq in product(range(k), repeat=k - 2):
        degree = [1] * k
        for v in seq:
            degree[v] += 1
        edges = []
        heap = [v for v in range(k) if degree[v] == 1]
        heapq.heapify(heap)
        for v in seq:
            leaf = heapq.heappop(heap)
            edges.append((leaf, v))
            degree[leaf] -= 1
            degree[v] -= 1
            if degree[v] == 1:
                heapq.heappush(heap, v)
        a = heapq.heappop(heap)
        b = heapq.heappop(heap)
        edges.append((a, b))
        yield Tree.from_edges(k, edges)


def expectation_by_enumeration(tau: DecoratedTree, seed: Tree, alpha, n: int) -> Fraction:
    from affinepa import count_F

    outs = enumerate_growth(seed, alpha, n)
    return sum((o.probability * count_F(tau, o.tree) for o in outs), Fraction(0))


def one_step_mean(tau: DecoratedTree, host: Tree, alpha) -> Fraction:
    """Exact E[F_tau(T+)] conditioned on T=host, by direct attachment sum."""
    from affinepa import count_F

    a = as_alpha(alpha).fraction
    n = host.n
    denom = (1 + a) * n - 2
    total = Fraction(0)
    base_edges = list(host.edges())
    for u in range(n):
        prob = Fraction(host.degree(u) - 1) + a
        bigger = Tree.from_edges(n + 1, base_edges + [(u, n)])
        total += (prob / denom) * count_F(tau, bigger)
    return total
