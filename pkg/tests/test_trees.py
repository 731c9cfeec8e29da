import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affinepa import (
    DecoratedTree,
    PreconditionError,
    Tree,
    canonical_code,
    enumerate_trees,
    falling_factorial,
    falling_factorial_rational,
    path_tree,
    star_tree,
)
from affinepa.errors import CapExceededError
from affinepa.treeio import (
    dump_decorated,
    dump_plane,
    dump_tree,
    load_decorated,
    load_plane,
    load_tree,
)
from affinepa.planar import PlaneTree

from oracles import labeled_trees


def test_falling_factorial_examples():
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(7, 0) == 1
    assert falling_factorial(2, 3) == 0


def test_falling_factorial_rational():
    from fractions import Fraction

    assert falling_factorial_rational(Fraction(7, 2), 2) == Fraction(35, 4)
    assert falling_factorial_rational(Fraction(3), 0) == 1


def test_tree_validation():
    with pytest.raises(PreconditionError):
        Tree.from_edges(3, [(0, 1)])  # disconnected / wrong edge count
    with pytest.raises(PreconditionError):
        Tree.from_edges(2, [(0, 0)])
    with pytest.raises(PreconditionError):
        Tree.from_edges(3, [(0, 1), (0, 1)])


def test_degree_sum_invariant():
    for t in [path_tree(5), star_tree(7), path_tree(2)]:
        assert int(t.degrees.sum()) == 2 * (t.n - 1)


def test_attachment_weights_normalize():
    # sum of deg - 1 + alpha over a size-N tree is (1+alpha)N - 2
    from fractions import Fraction

    for t in [path_tree(6), star_tree(9)]:
        for alpha in (Fraction(1, 2), Fraction(3)):
            total = sum(Fraction(t.degree(v) - 1) + alpha for v in range(t.n))
            assert total == (1 + alpha) * t.n - 2


def test_canonical_code_relabeling():
    a = Tree.from_edges(3, [(0, 1), (1, 2)])
    b = Tree.from_edges(3, [(2, 1), (1, 0)])
    assert canonical_code(a) == canonical_code(b)


def test_canonical_code_distinguishes():
    assert canonical_code(path_tree(4)) != canonical_code(star_tree(4))


def test_canonical_code_mirror_decoration():
    p = path_tree(3)
    a = DecoratedTree(p, (1, 0, 0))
    b = DecoratedTree(p, (0, 0, 1))
    c = DecoratedTree(p, (0, 1, 0))
    assert canonical_code(a) == canonical_code(b)
    assert canonical_code(a) != canonical_code(c)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_canonical_code_permutation_invariant(data):
    n = data.draw(st.integers(min_value=1, max_value=9))
    # random labeled tree: attach vertex i to a uniform earlier vertex
    edges = []
    for i in range(1, n):
        edges.append((data.draw(st.integers(0, i - 1)), i))
    ell = tuple(data.draw(st.integers(0, 2)) for _ in range(n))
    perm = data.draw(st.permutations(list(range(n))))
    t1 = DecoratedTree(Tree.from_edges(n, edges), ell)
    t2 = DecoratedTree(
        Tree.from_edges(n, [(perm[a], perm[b]) for a, b in edges]),
        tuple(ell[perm.index(i)] for i in range(n)),
    )
    assert canonical_code(t1) == canonical_code(t2)


def test_enumerate_trees_counts():
    known = {1: 1, 2: 1, 3: 1, 4: 2, 5: 3, 6: 6, 7: 11, 8: 23}
    for k, count in known.items():
        assert len(enumerate_trees(k)) == count


def test_enumerate_trees_matches_labeled_bruteforce():
    for k in range(1, 8):
        classes = {canonical_code(t) for t in labeled_trees(k)}
        assert len(classes) == len(enumerate_trees(k))


def test_enumerate_trees_sorted_and_capped():
    trees = enumerate_trees(6)
    codes = [canonical_code(t) for t in trees]
    assert codes == sorted(codes)
    with pytest.raises(CapExceededError):
        enumerate_trees(11)


def test_tree_io_round_trip():
    t = star_tree(5)
    assert load_tree(dump_tree(t)).adjacency == t.adjacency
    d = DecoratedTree(path_tree(4), (2, 0, 1, 0))
    back = load_decorated(dump_decorated(d))
    assert back.ell == d.ell and back.tree.adjacency == d.tree.adjacency
    p = PlaneTree.from_tree(star_tree(4), red=(2, 0, 0, 0))
    back_p = load_plane(dump_plane(p))
    assert back_p.neighbor_order == p.neighbor_order
    assert back_p.red_corner == p.red_corner
    # exact byte round trip
    assert dump_plane(load_plane(dump_plane(p))) == dump_plane(p)


def test_tree_io_rejects_garbage():
    with pytest.raises(PreconditionError):
        load_tree("x\n")
    with pytest.raises(PreconditionError):
        load_decorated(dump_tree(path_tree(3)))
