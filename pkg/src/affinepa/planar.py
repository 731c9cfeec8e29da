"""Plane trees with coloured corners and planted plane trees.

Corner convention used throughout the package: the corners of a vertex v with
cyclic neighbour order (h_0, ..., h_{d-1}) are indexed 0..d-1, corner i being
the angular sector between half-edges h_{i-1} (cyclically) and h_i.  "The
corner to the right of half-edge h" means the corner ending at h, i.e. the
corner whose index equals h's position.  When a coloured corner is split by a
newly inserted edge, the half that keeps the original ccw end-delimiter
inherits the colour red if the split corner was red; this makes the red
corner of a planted root stay glued to the half-edge, and the red corner of
a seed vertex stay inside the seed corner it started in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import PreconditionError
from .trees import Tree

__all__ = ["PlaneTree", "PlantedPlaneTree", "HALF_EDGE", "cyclic_equal"]

HALF_EDGE = -1  # sentinel occupying the half-edge slot in a root's cyclic order


@dataclass(frozen=True)
class PlaneTree:
    """A tree plus a cyclic neighbour order and one red corner per vertex."""

    tree: Tree
    neighbor_order: tuple[tuple[int, ...], ...]
    red_corner: tuple[int, ...]

    def __post_init__(self):
        t = self.tree
        if t.n < 2:
            raise PreconditionError("a corner-coloured plane tree needs >= 2 vertices")
        if len(self.neighbor_order) != t.n or len(self.red_corner) != t.n:
            raise PreconditionError("per-vertex fields must match vertex count")
        for v in range(t.n):
            if sorted(self.neighbor_order[v]) != sorted(t.neighbors(v)):
                raise PreconditionError(f"neighbor_order[{v}] is not a permutation of the adjacency")
            if not 0 <= self.red_corner[v] < t.degree(v):
                raise PreconditionError(f"red corner of {v} out of range")

    @property
    def n(self) -> int:
        return self.tree.n

    def corner_count(self) -> int:
        return 2 * (self.n - 1)

    @classmethod
    def from_tree(cls, tree: Tree, red: Optional[Sequence[int]] = None) -> "PlaneTree":
        """Default embedding: adjacency order as given, red corner 0."""
        if red is None:
            red = [0] * tree.n
        return cls(tree, tree.adjacency, tuple(red))


@dataclass(frozen=True)
class PlantedPlaneTree:
    """Plane tree whose root carries an extra half-edge.

    The root's cyclic order is stored without the half-edge; `half_edge_slot`
    is the position the half-edge occupies in the extended order, and
    `red_corner[root]` indexes the extended order (deg(root)+1 corners).
    Blue-flavoured trees have no red corner at the root (None); red-flavoured
    trees have it immediately right of the half-edge (the corner ending at
    it, index == half_edge_slot).
    """

    tree: Tree
    neighbor_order: tuple[tuple[int, ...], ...]
    red_corner: tuple[Optional[int], ...]
    root: int
    half_edge_slot: int
    flavor: str

    def __post_init__(self):
        t = self.tree
        if self.flavor not in ("red", "blue"):
            raise PreconditionError("flavor is 'red' or 'blue'")
        if not 0 <= self.root < t.n:
            raise PreconditionError("root out of range")
        if not 0 <= self.half_edge_slot <= t.degree(self.root):
            raise PreconditionError("half-edge slot out of range")
        for v in range(t.n):
            if sorted(self.neighbor_order[v]) != sorted(t.neighbors(v)):
                raise PreconditionError(f"neighbor_order[{v}] is not a permutation of the adjacency")
            limit = t.degree(v) + (1 if v == self.root else 0)
            r = self.red_corner[v]
            if v == self.root:
                if self.flavor == "blue":
                    if r is not None:
                        raise PreconditionError("blue-flavoured root has no red corner")
                    continue
                if r != self.half_edge_slot:
                    raise PreconditionError("red root corner must end at the half-edge")
            if r is None or not 0 <= r < limit:
                raise PreconditionError(f"red corner of {v} out of range")

    @property
    def n(self) -> int:
        return self.tree.n

    def corner_count(self) -> int:
        return 2 * self.n - 1

    def red_count(self) -> int:
        return sum(1 for r in self.red_corner if r is not None)

    def blue_count(self) -> int:
        return self.corner_count() - self.red_count()


def cyclic_equal(a: PlaneTree, b: PlaneTree) -> bool:
    """Equality of plane trees as embeddings: per-vertex cyclic orders may be
    rotated relative to each other, red corners must name the same sector."""
    if a.tree.n != b.tree.n:
        return False
    for v in range(a.tree.n):
        oa, ob = a.neighbor_order[v], b.neighbor_order[v]
        if len(oa) != len(ob):
            return False
        d = len(oa)
        if d == 0:
            continue
        # rotation aligning ob onto oa
        try:
            shift = ob.index(oa[0])
        except ValueError:
            return False
        if tuple(ob[(shift + i) % d] for i in range(d)) != oa:
            return False
        if (b.red_corner[v] - shift) % d != a.red_corner[v] % d:
            return False
    return True
