"""Tests for LZ78 on the suffix tree: edge counters, witnesses and matching."""

import random
from fractions import Fraction

import pytest

from lzse.src.factorizers.context import prepare_context
from lzse.src.factorizers.lz78 import (
    audit_lz78,
    build_edge_counters,
    collect_vxi,
    compute_witnesses,
    delta_threshold,
    factorize_lz78,
    match_refs,
    run_lz78,
)
from lzse.src.models.schemas import Algorithm, Lz78Factor, Phase
from lzse.src.oracle.naive import expand_lz78, naive_lz78, naive_suffix_structures, with_sentinel
from lzse.src.services.audit_service import AuditService
from lzse.src.services.factorization_service import to_oracle_factors
from lzse.src.structures.suffix import TextBuffer, invert_in_place
from lzse.src.utils.errors import InvalidInputError, InvariantViolation, RangeError, StateError
from lzse.tests.helpers import EPSILONS, binary_strings, random_symbols

A, B = ord("a"), ord("b")

RUNNING_WITNESSES = [3, 5, 18, 10, 7, 18, 4]
RUNNING_REFS = [0, 1, 0, 2, 2, 3, 1]


@pytest.mark.parametrize("n,epsilon,expected", [
    (14, Fraction(1), 1),
    (15, Fraction(1), 1),
    (16, Fraction(1), 2),
    (10 ** 8, Fraction(1), 100),
    (1 << 16, Fraction(1, 2), 4),
    (1 << 16, Fraction(1, 8), 1),
    (2, Fraction(1, 8), 1),
])
def test_delta_threshold(n, epsilon, expected):
    assert delta_threshold(n, epsilon) == expected


def test_running_example_step_by_step(running_text):
    ctx = prepare_context(running_text, Fraction(1))
    ws, tree = ctx.ws, ctx.tree

    counters = build_edge_counters(ws, tree)
    assert counters.delta == 1
    # "baa" below the root and "aa" -> "aabaa" are too long for small counters.
    assert counters.is_delta(18)
    assert counters.is_delta(10)
    assert not counters.is_delta(3)
    assert counters.length(18) == 3
    assert counters.length(3) == 1

    invert_in_place(ws)
    trail = []
    witnesses, b_f = compute_witnesses(ws, tree, counters, trail)
    assert witnesses.to_list() == RUNNING_WITNESSES
    assert b_f.to01() == "11011001001010"
    assert counters.count(18) == 2
    assert counters.saturated(3)
    assert [w for w, _ in trail] == RUNNING_WITNESSES

    m_vxi = collect_vxi(witnesses, tree)
    assert m_vxi.nodes() == [3, 5, 18]

    match_refs(witnesses, m_vxi, tree, b_f)
    assert ws.a1.to_list()[:7] == RUNNING_REFS
    assert ws.phase is Phase.REFERRED_INDICES


def test_running_example_factors(running_text):
    f = factorize_lz78(running_text, Fraction(1, 2))
    assert [x.start for x in f.factors()] == [1, 2, 4, 5, 8, 11, 13]
    assert f.factor_query(4) == Lz78Factor(start=5, length=3, ref=2, symbol=B)
    assert f.factor_query(7) == Lz78Factor(start=13, length=2, ref=1, symbol=-1)
    assert [x.ref for x in f.factors()] == RUNNING_REFS
    assert f.decode() == with_sentinel(running_text.symbols)


def test_counter_cannot_pass_its_edge():
    ctx = prepare_context(TextBuffer.from_string("ab"), Fraction(1))
    counters = build_edge_counters(ctx.ws, ctx.tree)
    # Node 2 is the leaf of "$", an edge of length 1.
    counters.increment(2)
    with pytest.raises(InvariantViolation):
        counters.increment(2)
    with pytest.raises(RangeError):
        counters.count(1)


def test_edge_counters_need_suffix_array(running_text):
    ctx = prepare_context(running_text, Fraction(1))
    invert_in_place(ctx.ws)
    with pytest.raises(StateError):
        build_edge_counters(ctx.ws, ctx.tree)


def test_single_symbol_and_repeats():
    assert [(f.start, f.length, f.ref) for f in factorize_lz78(TextBuffer.from_string("a"), Fraction(1)).factors()] \
        == [(1, 1, 0), (2, 1, 0)]
    f = factorize_lz78(TextBuffer.from_string("aaaaaaa"), Fraction(1, 8))
    assert [(x.length, x.ref) for x in f.factors()] == [(1, 0), (2, 1), (3, 2), (2, 1)]


def test_empty_text_is_rejected():
    with pytest.raises(InvalidInputError):
        factorize_lz78(TextBuffer.from_string(""), Fraction(1))


@pytest.mark.parametrize("epsilon", EPSILONS)
def test_binary_strings_match_oracle(epsilon):
    for s in binary_strings(8):
        t = TextBuffer.from_string(s)
        reference = with_sentinel(t.symbols)
        expected = naive_lz78(reference)
        f = factorize_lz78(t, epsilon)
        assert to_oracle_factors(f) == expected, s
        assert f.decode() == reference
        assert expand_lz78(expected) == reference


@pytest.mark.slow
def test_binary_strings_match_oracle_up_to_twelve():
    for s in binary_strings(12):
        t = TextBuffer.from_string(s)
        assert to_oracle_factors(factorize_lz78(t, Fraction(1, 8))) == naive_lz78(with_sentinel(t.symbols)), s


@pytest.mark.parametrize("sigma", [2, 3, 5, 26])
def test_random_texts_match_oracle(sigma):
    rng = random.Random(sigma * 7)
    for _ in range(25):
        symbols = random_symbols(rng, rng.randint(1, 150), sigma)
        f = factorize_lz78(TextBuffer(symbols), rng.choice(EPSILONS))
        assert to_oracle_factors(f) == naive_lz78(with_sentinel(symbols))


def test_audit_holds_on_running_example(running_text):
    run = run_lz78(prepare_context(running_text, Fraction(1)))
    checks = audit_lz78(run)
    assert all(check.holds for check in checks), [c for c in checks if not c.holds]
    by_name = {check.name: check for check in checks}
    assert by_name["factor_classes_sum_to_z"].lhs == 7
    assert by_name["v_xi_at_most_inner"].lhs == 3


def test_audit_needs_trail(running_text):
    run = run_lz78(prepare_context(running_text, Fraction(1)), keep_trail=False)
    with pytest.raises(StateError):
        audit_lz78(run)


@pytest.mark.parametrize("epsilon", EPSILONS)
def test_audit_report_on_random_texts(epsilon):
    rng = random.Random(epsilon.denominator + 11)
    service = AuditService()
    for _ in range(15):
        t = TextBuffer(random_symbols(rng, rng.randint(1, 200), rng.choice([2, 3])))
        report = service.report(run_lz78(prepare_context(t, epsilon)), Algorithm.LZ78)
        assert report.all_hold, [c for c in report.checks if not c.holds]
        assert report.counts["delta"] == delta_threshold(t.n, epsilon)


def exact_edges(symbols):
    """(|c(e)|, h(u)) per lower node, from the pointer tree."""
    st = naive_suffix_structures(with_sentinel(symbols))
    n = len(st.sa)
    h = {st.root.preorder: n}
    edges = {}
    for node in sorted(st.nodes, key=lambda x: x.preorder):
        if node.parent is None:
            continue
        length = node.str_depth - node.parent.str_depth
        h_u = h[node.parent.preorder]
        edges[node.preorder] = (length, h_u)
        h[node.preorder] = max(0, min(h_u, len(node.leaf_labels())) - length)
    return edges


def test_audit_reads_exact_lengths_under_delta_nodes(running_text):
    run = run_lz78(prepare_context(running_text, Fraction(1)))
    counters, tree = run.counters, run.context.tree
    edges = exact_edges(running_text.symbols)

    # Leaves below "aabaa" hang off a Delta-node on small edges longer than Delta + 1.
    capped = [
        v for v in range(2, tree.node_count + 1)
        if not counters.is_delta(v) and counters.length(v) < edges[v][0]
    ]
    assert any(counters.is_delta(tree.parent(v)) for v in capped)
    assert 10 in {tree.parent(v) for v in capped}

    for v, (length, h_u) in edges.items():
        assert counters.record.length(v) == length
        assert counters.record.h_parent(v) == h_u
        assert counters.count(v) <= min(length, h_u)
    assert all(check.holds for check in audit_lz78(run))


def test_counters_without_record_cannot_be_audited(running_text):
    run = run_lz78(prepare_context(running_text, Fraction(1)))
    run.counters.record = None
    with pytest.raises(StateError):
        audit_lz78(run)


@pytest.mark.parametrize("epsilon", EPSILONS)
def test_audit_holds_on_binary_strings(epsilon):
    for s in binary_strings(8):
        checks = audit_lz78(run_lz78(prepare_context(TextBuffer.from_string(s), epsilon)))
        assert all(check.holds for check in checks), (s, [c for c in checks if not c.holds])


@pytest.mark.slow
def test_audit_holds_on_binary_strings_up_to_twelve():
    for s in binary_strings(12):
        for epsilon in EPSILONS:
            checks = audit_lz78(run_lz78(prepare_context(TextBuffer.from_string(s), epsilon)))
            assert all(check.holds for check in checks), (s, epsilon)
