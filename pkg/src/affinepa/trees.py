"""Unrooted trees, decorated trees, canonical codes and exact enumeration.

Vertex ids are dense integers 0..n-1.  Trees produced by the growers follow
the growth-id convention: the seed occupies ids 0..k-1 and the t-th added
vertex gets id k+t-1, so "intersects the seed" checks are plain id
comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import CapExceededError, PreconditionError

__all__ = [
    "Tree",
    "DecoratedTree",
    "falling_factorial",
    "falling_factorial_rational",
    "canonical_code",
    "canonical_order",
    "enumerate_trees",
    "path_tree",
    "star_tree",
]


def falling_factorial(n: int, d: int) -> int:
    """[n]_d = n(n-1)...(n-d+1), with [n]_0 = 1 and value 0 when d > n >= 0."""
    if d < 0 or n < 0:
        raise PreconditionError("falling_factorial needs non-negative arguments")
    out = 1
    for i in range(d):
        out *= n - i
        if out == 0:
            return 0
    return out


def falling_factorial_rational(x, d: int):
    """[x]_d for a rational or float first argument (exact for Fraction x)."""
    if d < 0:
        raise PreconditionError("negative depth")
    out = x ** 0  # 1 in the type of x
    for i in range(d):
        out = out * (x - i)
    return out


class Tree:
    """Immutable unrooted tree on vertices 0..n-1.

    Adjacency is materialised lazily: trees built from an attachment history
    (`from_parents`) keep only the parent array and a degree vector until
    neighbour lists are requested, which keeps million-vertex growth cheap.
    """

    __slots__ = ("n", "_adj", "_deg", "_parents", "_seed_adj")

    def __init__(self, n: int, adjacency: Sequence[Sequence[int]], _validate: bool = True):
        self.n = n
        self._adj = tuple(tuple(nb) for nb in adjacency)
        self._deg = np.array([len(nb) for nb in self._adj], dtype=np.int64)
        self._parents = None
        self._seed_adj = None
        if _validate:
            self._validate()

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Tree":
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u},{v}) out of range for n={n}")
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, adj)

    @classmethod
    def from_parents(cls, seed: "Tree", parents: np.ndarray) -> "Tree":
        """Tree grown from `seed`; parents[m] is the attachment vertex of m.

        Entries below the seed size are ignored.  Construction is trusted
        (no connectivity check) so it stays O(n) with numpy-only storage.
        """
        t = cls.__new__(cls)
        n = len(parents)
        k = seed.n
        t.n = n
        t._adj = None
        t._parents = np.asarray(parents, dtype=np.int64)
        t._seed_adj = seed.adjacency
        deg = np.bincount(t._parents[k:], minlength=n).astype(np.int64)
        deg[k:] += 1
        deg[:k] += seed._deg
        t._deg = deg
        return t

    # -- basic accessors ----------------------------------------------------

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        if self._adj is None:
            k = len(self._seed_adj)
            adj: list[list[int]] = [list(nb) for nb in self._seed_adj]
            adj.extend([] for _ in range(self.n - k))
            par = self._parents
            for m in range(k, self.n):
                p = int(par[m])
                adj[p].append(m)
                adj[m].append(p)
            self._adj = tuple(tuple(nb) for nb in adj)
        return self._adj

    @property
    def parents(self) -> Optional[np.ndarray]:
        """Attachment history when grown via `from_parents`, else None."""
        return self._parents

    @property
    def seed_size(self) -> Optional[int]:
        return len(self._seed_adj) if self._seed_adj is not None else None

    @property
    def seed_adjacency(self) -> Optional[tuple[tuple[int, ...], ...]]:
        return self._seed_adj

    def degree(self, v: int) -> int:
        return int(self._deg[v])

    @property
    def degrees(self) -> np.ndarray:
        view = self._deg.view()
        view.setflags(write=False)
        return view

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, nbs in enumerate(self.adjacency):
            for v in nbs:
                if u < v:
                    yield (u, v)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Tree(n={self.n})"

    # -- validation ---------------------------------------------------------

    def _validate(self) -> None:
        n = self.n
        if n < 1:
            raise PreconditionError("a tree needs at least one vertex")
        m = sum(len(nb) for nb in self._adj)
        if m != 2 * (n - 1):
            raise PreconditionError("edge count must be n-1")
        for u, nbs in enumerate(self._adj):
            if u in nbs:
                raise PreconditionError("self-loop")
            if len(set(nbs)) != len(nbs):
                raise PreconditionError("multi-edge")
            for v in nbs:
                if u not in self._adj[v]:
                    raise PreconditionError("adjacency not symmetric")
        # connectivity by BFS
        seen = [False] * n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for v in self._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        if count != n:
            raise PreconditionError("tree is not connected")


def path_tree(n: int) -> Tree:
    return Tree.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_tree(n: int) -> Tree:
    return Tree.from_edges(n, [(0, i) for i in range(1, n)])


@dataclass(frozen=True)
class DecoratedTree:
    """Pattern tree with a non-negative integer decoration per vertex."""

    tree: Tree
    ell: tuple[int, ...]

    def __post_init__(self):
        if len(self.ell) != self.tree.n:
            raise PreconditionError("decoration length must match vertex count")
        if any(x < 0 for x in self.ell):
            raise PreconditionError("decorations are non-negative")

    @property
    def total(self) -> int:
        """|ell|, the sum of the decorations."""
        return sum(self.ell)

    @property
    def loose_leaves(self) -> tuple[int, ...]:
        """Vertices with decoration 0 and degree 1."""
        t = self.tree
        return tuple(v for v in range(t.n) if self.ell[v] == 0 and t.degree(v) == 1)

    def ell_changed(self, u: int, new_value: int) -> "DecoratedTree":
        ell = list(self.ell)
        ell[u] = new_value
        return DecoratedTree(self.tree, tuple(ell))

    def vertex_removed(self, v: int) -> "DecoratedTree":
        """Drop leaf v; remaining ids above v shift down by one."""
        t = self.tree
        if t.degree(v) != 1:
            raise PreconditionError("only leaves can be removed")
        relab = lambda u: u if u < v else u - 1
        edges = [(relab(a), relab(b)) for a, b in t.edges() if v not in (a, b)]
        ell = tuple(x for u, x in enumerate(self.ell) if u != v)
        return DecoratedTree(Tree.from_edges(t.n - 1, edges), ell)

    def __repr__(self) -> str:  # pragma: no cover
        return f"DecoratedTree(n={self.tree.n}, ell={self.ell})"


def single_vertex(ell: int = 0) -> DecoratedTree:
    return DecoratedTree(Tree(1, [[]]), (ell,))


# ---------------------------------------------------------------------------
# Canonical codes
# ---------------------------------------------------------------------------
#
# AHU-style rooted encoding minimised over centroid roots, with the
# decoration folded into the per-vertex label.  Codes are ASCII byte strings;
# the total order used for tie-breaking everywhere is plain bytes order.


def _centroids(tree: Tree) -> list[int]:
    n = tree.n
    if n == 1:
        return [0]
    adj = tree.adjacency
    deg = [len(a) for a in adj]
    removed = [False] * n
    layer = [v for v in range(n) if deg[v] == 1]
    remaining = n
    while remaining > 2:
        nxt = []
        for v in layer:
            removed[v] = True
            remaining -= 1
            for u in adj[v]:
                if not removed[u]:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
        layer = nxt
    return sorted(v for v in range(n) if not removed[v])


def _rooted_code(tree: Tree, ell: Sequence[int], root: int) -> bytes:
    adj = tree.adjacency

    def rec(v: int, parent: int) -> bytes:
        kids = sorted(rec(u, v) for u in adj[v] if u != parent)
        return b"(" + str(ell[v]).encode() + b"".join(kids) + b")"

    return rec(root, -1)


def canonical_code(obj: Tree | DecoratedTree) -> bytes:
    """Isomorphism-invariant byte code of a (decorated) tree.

    Equal codes iff there is a decoration-preserving isomorphism.
    """
    if isinstance(obj, DecoratedTree):
        tree, ell = obj.tree, obj.ell
    else:
        tree, ell = obj, (0,) * obj.n
    return min(_rooted_code(tree, ell, c) for c in _centroids(tree))


def canonical_order(obj: Tree | DecoratedTree) -> tuple[int, ...]:
    """Deterministic vertex order: canonical-root DFS, children sorted by
    (subtree code, id).  Used wherever a fixed vertex ranking is needed."""
    if isinstance(obj, DecoratedTree):
        tree, ell = obj.tree, obj.ell
    else:
        tree, ell = obj, (0,) * obj.n
    cents = _centroids(tree)
    root = min(cents, key=lambda c: (_rooted_code(tree, ell, c), c))
    adj = tree.adjacency
    code_memo: dict[tuple[int, int], bytes] = {}

    def code(v: int, parent: int) -> bytes:
        key = (v, parent)
        if key not in code_memo:
            kids = sorted(code(u, v) for u in adj[v] if u != parent)
            code_memo[key] = b"(" + str(ell[v]).encode() + b"".join(kids) + b")"
        return code_memo[key]

    order: list[int] = []

    def visit(v: int, parent: int) -> None:
        order.append(v)
        for u in sorted((u for u in adj[v] if u != parent), key=lambda u: (code(u, v), u)):
            visit(u, v)

    visit(root, -1)
    return tuple(order)


# ---------------------------------------------------------------------------
# Exhaustive tree enumeration
# ---------------------------------------------------------------------------

ENUMERATE_CAP = 10


def enumerate_trees(size: int, cap: int = ENUMERATE_CAP) -> list[Tree]:
    """One representative per unlabeled tree of the given size.

    Grown by leaf extension with canonical-code de-duplication; the result is
    sorted by canonical code, so the order is deterministic.
    """
    if size < 1:
        raise PreconditionError("size must be >= 1")
    if size > cap:
        raise CapExceededError(f"enumerate_trees cap is {cap}, got size {size}")
    reps: dict[bytes, Tree] = {canonical_code(Tree(1, [[]])): Tree(1, [[]])}
    for m in range(2, size + 1):
        nxt: dict[bytes, Tree] = {}
        for t in reps.values():
            base = list(t.edges())
            for v in range(t.n):
                grown = Tree.from_edges(m, base + [(v, m - 1)])
                nxt.setdefault(canonical_code(grown), grown)
        reps = nxt
    return [reps[c] for c in sorted(reps)]
