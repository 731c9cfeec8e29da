"""Plain-text tree formats.

All formats are ASCII and newline-terminated and round-trip exactly:

    tree          line 1: n, then n-1 lines "u v" (edge list)
    decorated     tree block, then one line "ell: x0 x1 ... x(n-1)"
    plane         tree block, then per-vertex "order v: a b c ..." and
                  "red v: i" lines
"""

from __future__ import annotations

from .errors import PreconditionError
from .planar import PlaneTree
from .trees import DecoratedTree, Tree

__all__ = [
    "dump_tree",
    "load_tree",
    "dump_decorated",
    "load_decorated",
    "dump_plane",
    "load_plane",
    "read_tree_file",
    "write_tree_file",
]


def dump_tree(t: Tree) -> str:
    lines = [str(t.n)]
    lines += [f"{u} {v}" for u, v in t.edges()]
    return "\n".join(lines) + "\n"


def _parse_header(lines: list[str]) -> tuple[int, list[tuple[int, int]], int]:
    if not lines:
        raise PreconditionError("empty tree file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise PreconditionError(f"bad vertex count line: {lines[0]!r}") from exc
    edges = []
    pos = 1
    for _ in range(n - 1):
        if pos >= len(lines):
            raise PreconditionError("truncated edge list")
        parts = lines[pos].split()
        if len(parts) != 2:
            raise PreconditionError(f"bad edge line: {lines[pos]!r}")
        edges.append((int(parts[0]), int(parts[1])))
        pos += 1
    return n, edges, pos


def load_tree(text: str) -> Tree:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, edges, pos = _parse_header(lines)
    if pos != len(lines):
        raise PreconditionError("trailing content in tree file")
    return Tree.from_edges(n, edges)


def dump_decorated(d: DecoratedTree) -> str:
    return dump_tree(d.tree) + "ell: " + " ".join(str(x) for x in d.ell) + "\n"


def load_decorated(text: str) -> DecoratedTree:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, edges, pos = _parse_header(lines)
    if pos >= len(lines) or not lines[pos].startswith("ell:"):
        raise PreconditionError("missing 'ell:' line")
    ell = tuple(int(x) for x in lines[pos].split()[1:])
    if pos + 1 != len(lines):
        raise PreconditionError("trailing content in decorated tree file")
    return DecoratedTree(Tree.from_edges(n, edges), ell)


def dump_plane(p: PlaneTree) -> str:
    out = [dump_tree(p.tree).rstrip("\n")]
    for v in range(p.n):
        out.append(f"order {v}: " + " ".join(str(u) for u in p.neighbor_order[v]))
    for v in range(p.n):
        out.append(f"red {v}: {p.red_corner[v]}")
    return "\n".join(out) + "\n"


def load_plane(text: str) -> PlaneTree:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, edges, pos = _parse_header(lines)
    order: list[tuple[int, ...]] = [()] * n
    red = [0] * n
    seen_order = [False] * n
    seen_red = [False] * n
    for ln in lines[pos:]:
        head, _, rest = ln.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] not in ("order", "red"):
            raise PreconditionError(f"bad plane-tree line: {ln!r}")
        v = int(parts[1])
        if parts[0] == "order":
            order[v] = tuple(int(x) for x in rest.split())
            seen_order[v] = True
        else:
            red[v] = int(rest)
            seen_red[v] = True
    if not (all(seen_order) and all(seen_red)):
        raise PreconditionError("incomplete plane-tree file")
    return PlaneTree(Tree.from_edges(n, edges), tuple(order), tuple(red))


def read_tree_file(path: str):
    """Load a tree file of any of the three formats, inferred from content."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if any(ln.startswith("order ") for ln in lines):
        return load_plane(text)
    if any(ln.startswith("ell:") for ln in lines):
        return load_decorated(text)
    return load_tree(text)


def write_tree_file(path: str, obj) -> None:
    if isinstance(obj, PlaneTree):
        text = dump_plane(obj)
    elif isinstance(obj, DecoratedTree):
        text = dump_decorated(obj)
    elif isinstance(obj, Tree):
        text = dump_tree(obj)
    else:
        raise PreconditionError(f"cannot serialise {type(obj).__name__}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
