"""Tests for the succinct suffix-tree topology."""

import random
from fractions import Fraction

import pytest

from lzse.src.factorizers.context import prepare_context
from lzse.src.oracle.naive import naive_suffix_structures, with_sentinel
from lzse.src.structures.packed import PackedIntArray
from lzse.src.structures.sst import ROOT, NodeMarkingVector, build_tree, preorder_degrees
from lzse.src.structures.suffix import (
    LcpArray,
    SuffixWorkspace,
    TextBuffer,
    build_lcp,
    build_rmq,
    build_suffix_array,
    invert_in_place,
)
from lzse.src.utils.errors import ConstructionError, DomainError, RangeError, StateError
from lzse.tests.helpers import RUNNING_EXAMPLE, binary_strings, random_symbols


def context_for(text: str):
    return prepare_context(TextBuffer.from_string(text), Fraction(1))


def test_tree_of_aa():
    ctx = context_for("aa")
    tree, sa = ctx.tree, ctx.ws.a1
    assert tree.node_count == 5
    assert [tree.is_leaf(v) for v in range(1, 6)] == [False, True, False, True, True]
    assert tree.parent(4) == 3
    assert tree.parent(3) == 1
    assert tree.level_anc(4, 2) == 1
    assert tree.str_depth(3) == 1
    assert tree.edge_label_length(5, sa) == 2


def test_leaf_of_suffix_one_in_aa():
    ctx = context_for("aa")
    ws, tree = ctx.ws, ctx.tree
    invert_in_place(ws)
    assert ws.a1.to_list() == [3, 2, 1]
    assert tree.leaf_select(ws.a1[1]) == 5


def test_running_example_topology():
    ctx = context_for(RUNNING_EXAMPLE)
    tree, sa = ctx.tree, ctx.ws.a1
    # 14 leaves and 7 inner nodes.
    assert tree.node_count == 21
    assert tree.leaf_count == 14
    assert tree.parent(5) == 3
    assert list(tree.children(ROOT)) == [2, 3, 18]
    assert [tree.edge_label_length(v, sa) for v in tree.children(ROOT)] == [1, 1, 3]
    assert tree.subtree_leaf_count(3) == 10
    assert tree.subtree_leaf_count(ROOT) == 14
    assert sum(tree.subtree_leaf_count(c) for c in tree.children(ROOT)) == 14
    assert tree.str_depth(10, sa) == 5
    assert tree.str_depth(14, sa) == 4
    assert tree.leaf_label(tree.leaf_select(1), sa) == 14


def test_single_node_tree():
    t = TextBuffer.from_string("")
    ws = SuffixWorkspace(1, Fraction(1))
    build_suffix_array(t, ws)
    lcp = build_lcp(t, ws.a1, ws)
    tree = build_tree(ws.a1, lcp, build_rmq(lcp))
    assert tree.node_count == 1
    assert tree.is_leaf(ROOT)
    assert tree.leaf_label(ROOT, ws.a1) == 1


def test_navigation_errors():
    ctx = context_for("abab")
    tree = ctx.tree
    with pytest.raises(DomainError):
        tree.parent(ROOT)
    with pytest.raises(RangeError):
        tree.parent(tree.node_count + 1)
    with pytest.raises(RangeError):
        tree.level_anc(2, tree.depth(2) + 1)
    with pytest.raises(DomainError):
        tree.leaf_rank(ROOT)
    with pytest.raises(RangeError):
        tree.leaf_select(0)


def test_leaf_string_depth_needs_suffix_array():
    tree = context_for("ab").tree
    with pytest.raises(StateError):
        tree.str_depth(tree.leaf_select(2))


def test_inconsistent_lcp_is_rejected():
    t = TextBuffer.from_string("ab")
    ws = SuffixWorkspace(t.n, Fraction(1))
    build_suffix_array(t, ws)
    # SA = [3, 1, 2]; suffix 2 has length 2 so LCP[3] = 3 is impossible.
    lcp = LcpArray(PackedIntArray.from_values([0, 0, 3], 2))
    with pytest.raises(ConstructionError):
        build_tree(ws.a1, lcp)


def test_preorder_degrees_of_aa():
    ctx = context_for("aa")
    assert preorder_degrees(ctx.lcp) == [2, 0, 2, 0, 0]


def assert_matches_oracle(text: str) -> None:
    ctx = context_for(text)
    tree, sa = ctx.tree, ctx.ws.a1
    oracle = naive_suffix_structures(with_sentinel(ctx.text.symbols))
    assert tree.node_count == len(oracle.nodes)
    assert sum(tree.subtree_leaf_count(c) for c in tree.children(ROOT)) == tree.leaf_count
    for node in oracle.nodes:
        v = node.preorder
        assert tree.is_leaf(v) == node.is_leaf
        assert tree.str_depth(v, sa) == node.str_depth
        assert tree.subtree_leaf_count(v) == len(node.leaf_labels())
        if node.is_leaf:
            assert tree.leaf_label(v, sa) == node.label
        if node.parent is not None:
            assert tree.parent(v) == node.parent.preorder
            assert tree.str_depth(v, sa) > tree.str_depth(tree.parent(v), sa)
        for i in range(tree.depth(v)):
            assert tree.parent(tree.level_anc(v, i)) == tree.level_anc(v, i + 1)
        if v != ROOT:
            assert tree.level_anc(v, 1) == tree.parent(v)


def test_preorder_matches_pointer_tree_on_binary_strings():
    for s in binary_strings(10):
        assert_matches_oracle(s)


def test_preorder_matches_pointer_tree_on_ternary_strings():
    rng = random.Random(3)
    for _ in range(200):
        symbols = random_symbols(rng, rng.randint(1, 63), 3)
        assert_matches_oracle("".join("abc"[s] for s in symbols))


def test_node_marking_vector():
    marks = NodeMarkingVector.from_nodes(21, [5, 10, 14])
    assert marks.count == 3
    assert [marks.nrank(v) for v in (5, 10, 14)] == [1, 2, 3]
    assert marks.rank(12) == 2
    assert 10 in marks and 11 not in marks
    assert marks.nodes() == [5, 10, 14]
    with pytest.raises(DomainError):
        marks.nrank(11)


def test_node_codes_round_trip():
    tree = context_for(RUNNING_EXAMPLE).tree
    assert tree.node_code(4) == (1, 2)
    assert tree.node_code(3) == (0, 2)
    for v in range(1, tree.node_count + 1):
        assert tree.node_from_code(*tree.node_code(v)) == v


def test_debug_exports():
    ctx = context_for("aa")
    sa = ctx.ws.a1
    outline = ctx.tree.to_text(sa, ctx.text).splitlines()
    assert outline[0] == "1 (root)"
    assert outline[1] == "  2 [1] $ leaf=3"
    assert outline[2] == "  3 [1] a"
    assert outline[4] == "    5 [2] a$ leaf=1"
    edges = ctx.tree.to_edge_list(sa).splitlines()
    assert edges[0] == "digraph sst {"
    assert "  3 -> 5 [len=2];" in edges
    assert edges[-1] == "}"
