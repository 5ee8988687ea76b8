"""
LZ78 factorization on the suffix tree with the LZ78 trie superimposed.

Every LZ78 trie node lies on some suffix-tree edge e; n_e counts the trie
nodes placed on e so far. A factor starting at j walks from the root toward
the leaf of suffix j, passing saturated edges (n_e = |c(e)|), and ends one
symbol into the first unsaturated edge, whose lower node is the factor's
witness. Witnesses go to A_1[1..z]; a left-to-right scan then turns them into
referred indices, keeping per witness in V_Xi the last factor seen in
R = A_1[z+1..].

Edge counters are split by the bound h(u) on the trie height below u:
edges with min(|c(e)|, h(u)) <= Delta keep small counters, the rest live in a
full-width table addressed by nrank over the Delta-node marker.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from bitarray import bitarray

from lzse.src.factorizers.context import FactorizationContext, bound_check, prepare_context
from lzse.src.models.schemas import LemmaCheck, Lz78Factor, Phase
from lzse.src.structures.bitvec import BitVector
from lzse.src.structures.packed import PackedIntArray, cell_width
from lzse.src.structures.sst import ROOT, NodeMarkingVector, SuccinctSuffixTree
from lzse.src.structures.suffix import SaAccess, SuffixWorkspace, TextBuffer, invert_in_place
from lzse.src.utils.config import StructureSettings
from lzse.src.utils.errors import InvariantViolation, LemmaViolation, RangeError, StateError
from lzse.src.utils.logging import get_logger, log_error_with_context, log_phase

logger = get_logger(__name__)


def delta_threshold(n: int, epsilon: Fraction) -> int:
    """max(1, floor(n ** (eps / 4))), exact for rational eps."""
    epsilon = Fraction(epsilon)
    num, den = epsilon.numerator, epsilon.denominator
    # d <= n^(num / (4 den))  <=>  d^(4 den) <= n^num
    d = int(n ** (num / (4 * den)))
    while d > 0 and d ** (4 * den) > n ** num:
        d -= 1
    while (d + 1) ** (4 * den) <= n ** num:
        d += 1
    return max(1, d)


Measure = Callable[[int, int], Tuple[int, int]]


def _tree_edges(tree: SuccinctSuffixTree, n: int, measure: Measure) -> Iterator[Tuple[int, int, int, int]]:
    """
    Pre-order DFS yielding (v, |c(e)|, h(parent), h(v)) for every edge e into v.

    measure(v, parent string depth) returns (|c(e)|, string depth of v). The
    stack holds (last pre-order of the subtree, h, string depth) for the
    open ancestors; h values on it only decrease from bottom to top.
    """
    stack = [(tree.node_count, n, 0)]
    for v in range(2, tree.node_count + 1):
        while stack[-1][0] < v:
            stack.pop()
        _, h_u, depth_u = stack[-1]
        length, depth_v = measure(v, depth_u)
        h_v = max(0, min(h_u, tree.subtree_leaf_count(v)) - length)
        yield v, length, h_u, h_v
        if not tree.is_leaf(v):
            stack.append((v + tree.subtree_size(v) - 1, h_v, depth_v))


class EdgeRecord:
    """
    Audit-only copy of the exact |c(e)| and h(u) of every edge, by pre-order
    of the lower node. Filled while SA is resident; not part of the space budget.
    """

    def __init__(self, node_count: int, n: int):
        self._lengths = PackedIntArray(node_count, cell_width(n))
        self._h_parent = PackedIntArray(node_count, cell_width(n))

    def store(self, v: int, length: int, h_u: int) -> None:
        self._lengths[v] = length
        self._h_parent[v] = h_u

    def length(self, v: int) -> int:
        return self._lengths[v]

    def h_parent(self, v: int) -> int:
        return self._h_parent[v]


class EdgeCounters:
    """n_e and |c(e)| per suffix-tree edge, addressed by the edge's lower node."""

    def __init__(
        self,
        n: int,
        delta: int,
        m_vdelta: NodeMarkingVector,
        small_counts: PackedIntArray,
        small_lengths: PackedIntArray,
        large_counts: PackedIntArray,
        large_lengths: PackedIntArray,
    ):
        self.n = n
        self.delta = delta
        self.m_vdelta = m_vdelta
        self._small_counts = small_counts
        self._small_lengths = small_lengths
        self._large_counts = large_counts
        self._large_lengths = large_lengths
        self.record: Optional[EdgeRecord] = None

    def is_delta(self, v: int) -> bool:
        return v in self.m_vdelta

    def _cell(self, v: int) -> Tuple[PackedIntArray, PackedIntArray, int]:
        if v == ROOT:
            raise RangeError("the root has no incoming edge")
        if v in self.m_vdelta:
            return self._large_counts, self._large_lengths, self.m_vdelta.nrank(v)
        # Slot 1 belongs to the root and stays unused.
        return self._small_counts, self._small_lengths, v - self.m_vdelta.rank(v)

    def count(self, v: int) -> int:
        counts, _, i = self._cell(v)
        return counts[i]

    def length(self, v: int) -> int:
        """|c(e)|; on small edges values above Delta read as Delta + 1."""
        _, lengths, i = self._cell(v)
        return lengths[i]

    def saturated(self, v: int) -> bool:
        counts, lengths, i = self._cell(v)
        return counts[i] == lengths[i]

    def increment(self, v: int) -> int:
        counts, lengths, i = self._cell(v)
        value = counts[i] + 1
        if value > lengths[i]:
            log_error_with_context("invariant", "edge counter beyond the edge length", {"node": v})
            raise InvariantViolation("edge counter beyond the edge length", {"node": v, "count": value})
        if counts is self._small_counts and value > self.delta:
            log_error_with_context("lemma", "small edge counter exceeds Delta", {"node": v, "delta": self.delta})
            raise LemmaViolation("small edge counter exceeds Delta", {"node": v, "count": value, "delta": self.delta})
        counts[i] = value
        return value

    @property
    def delta_edges(self) -> int:
        return self.m_vdelta.count

    def small_bits(self) -> int:
        return self._small_counts.bit_cost() + self._small_lengths.bit_cost()

    def large_bits(self) -> int:
        return self._large_counts.bit_cost() + self._large_lengths.bit_cost()

    def bit_cost(self) -> int:
        return self.small_bits() + self.large_bits() + self.m_vdelta.bit_cost()


def build_edge_counters(ws: SuffixWorkspace, tree: SuccinctSuffixTree, record: bool = False) -> EdgeCounters:
    """
    Classify every edge and zero its counter. Needs SA resident in A_1 for
    string depths; two DFS passes, one for the Delta-node marker and one for
    the lengths. With record set, the second pass also keeps the exact
    (|c(e)|, h(u)) pairs for the audit.
    """
    ws.require(Phase.SA)
    started = time.perf_counter()
    n = ws.n
    sa = ws.a1
    delta = delta_threshold(n, ws.epsilon)

    def measure(v: int, depth_u: int) -> Tuple[int, int]:
        depth_v = tree.str_depth(v, sa)
        return depth_v - depth_u, depth_v

    marks = BitVector(tree.node_count)
    for v, length, h_u, _ in _tree_edges(tree, n, measure):
        if min(length, h_u) > delta:
            marks.set(v)
    m_vdelta = NodeMarkingVector(marks, tree.directory)

    large = m_vdelta.count
    small = tree.node_count - large
    small_width = cell_width(delta + 1)
    counters = EdgeCounters(
        n,
        delta,
        m_vdelta,
        PackedIntArray(small, small_width),
        PackedIntArray(small, small_width),
        PackedIntArray(large, cell_width(n)),
        PackedIntArray(large, cell_width(n)),
    )
    edge_record = EdgeRecord(tree.node_count, n) if record else None
    for v, length, h_u, _ in _tree_edges(tree, n, measure):
        _, lengths, i = counters._cell(v)
        lengths[i] = length if v in m_vdelta else min(length, delta + 1)
        if edge_record is not None:
            edge_record.store(v, length, h_u)
    counters.record = edge_record

    log_phase(
        "lz78_edge_counters",
        (time.perf_counter() - started) * 1000,
        delta=delta,
        delta_edges=large,
        small_bits=counters.small_bits(),
        large_bits=counters.large_bits(),
    )
    return counters


class WitnessTable:
    """W in A_1[1..z] as node codes plus a z-bit leaf flag; later R in A_1[z+1..]."""

    def __init__(self, ws: SuffixWorkspace, tree: SuccinctSuffixTree, leaf_flags: BitVector):
        self.ws = ws
        self.tree = tree
        self.leaf_flags = leaf_flags
        self.z = len(leaf_flags)

    def witness(self, x: int) -> int:
        if not 1 <= x <= self.z:
            raise RangeError("factor index out of range", {"x": x, "z": self.z})
        return self.tree.node_from_code(self.leaf_flags[x], self.ws.a1[x])

    def to_list(self) -> List[int]:
        self.ws.require(Phase.WITNESSES)
        return [self.witness(x) for x in range(1, self.z + 1)]

    def bit_cost(self) -> int:
        return len(self.leaf_flags)


AuditTrail = List[Tuple[int, bool]]


def compute_witnesses(
    ws: SuffixWorkspace,
    tree: SuccinctSuffixTree,
    counters: EdgeCounters,
    trail: Optional[AuditTrail] = None,
) -> Tuple[WitnessTable, BitVector]:
    """
    One root-to-leaf walk per factor, edge by edge through level ancestors of
    the suffix leaf. The witness of factor x overwrites A_1[x]; ISA values
    left of the current factor position are no longer read.

    trail, when given, receives (witness, factor is explicit at it) per factor.
    """
    ws.require(Phase.ISA)
    started = time.perf_counter()
    n = ws.n
    a1 = ws.a1
    b_f = BitVector(n)
    leaf_flags = BitVector()
    x = 0
    j = 1

    while j <= n:
        leaf = tree.leaf_select(a1[j])
        depth = tree.depth(leaf)
        length = 0
        witness = None
        for k in range(1, depth + 1):
            u = tree.level_anc(leaf, depth - k)
            if counters.saturated(u):
                length += counters.length(u)
                continue
            length += counters.increment(u)
            witness = u
            break
        if witness is None:
            log_error_with_context("invariant", "factor walk reached the leaf", {"j": j})
            raise InvariantViolation("factor walk reached the leaf", {"j": j, "leaf": leaf})

        x += 1
        if x > j:
            raise InvariantViolation("witness would overwrite unread ISA", {"x": x, "j": j})
        is_leaf, rank = tree.node_code(witness)
        a1[x] = rank
        leaf_flags.append(is_leaf)
        b_f.set(j)
        if trail is not None:
            trail.append((witness, counters.saturated(witness)))
        j += length

    if j != n + 1:
        raise InvariantViolation("factors overran the text", {"next": j, "n": n})

    b_f.build_index(tree.directory)
    leaf_flags.build_index(tree.directory)
    ws.advance(Phase.WITNESSES)
    log_phase("lz78_witnesses", (time.perf_counter() - started) * 1000, z=x)
    return WitnessTable(ws, tree, leaf_flags), b_f


def collect_vxi(witnesses: WitnessTable, tree: SuccinctSuffixTree) -> NodeMarkingVector:
    """
    Witnesses of factors that are inner LZ78 trie nodes. A factor at w has a
    child factor iff w shows up again in W, or the first factor at some node
    v with parent(v) = w follows (it extends the explicit trie node at w).
    """
    seen = bitarray(tree.node_count)
    seen.setall(0)
    marks = BitVector(tree.node_count)
    for x in range(1, witnesses.z + 1):
        v = witnesses.witness(x)
        if seen[v - 1]:
            marks.set(v)
            continue
        seen[v - 1] = 1
        p = tree.parent(v)
        if p != ROOT:
            marks.set(p)
    return NodeMarkingVector(marks, tree.directory)


def _factor_length(b_f: BitVector, x: int, z: int, n: int) -> int:
    start = b_f.select1(x)
    end = b_f.select1(x + 1) if x < z else n + 1
    return end - start


def match_refs(
    witnesses: WitnessTable,
    m_vxi: NodeMarkingVector,
    tree: SuccinctSuffixTree,
    b_f: BitVector,
) -> None:
    """Overwrite A_1[1..z] with referred indices, 0 for free letters."""
    ws = witnesses.ws
    ws.require(Phase.WITNESSES)
    started = time.perf_counter()
    a1 = ws.a1
    z, n = witnesses.z, ws.n

    if z + m_vxi.count > n:
        raise LemmaViolation("R does not fit behind W", {"z": z, "v_xi": m_vxi.count, "n": n})
    for k in range(1, m_vxi.count + 1):
        a1[z + k] = 0

    for x in range(1, z + 1):
        v = witnesses.witness(x)
        slot = z + m_vxi.nrank(v) if v in m_vxi else 0
        if slot and a1[slot]:
            ref = a1[slot]
        elif _factor_length(b_f, x, z, n) == 1:
            ref = 0
        else:
            p = tree.parent(v)
            ref = a1[z + m_vxi.nrank(p)] if p in m_vxi else 0
            if ref == 0:
                log_error_with_context("invariant", "no factor recorded at the parent witness", {"x": x, "node": v})
                raise InvariantViolation("no factor recorded at the parent witness", {"x": x, "node": v, "parent": p})
        if slot:
            a1[slot] = x
        a1[x] = ref

    ws.advance(Phase.REFERRED_INDICES)
    log_phase("lz78_matching", (time.perf_counter() - started) * 1000, z=z, v_xi=m_vxi.count)


class Lz78Factorization:
    """B_f and the referred indices; f_x = f_{ref} followed by one symbol."""

    def __init__(self, text: TextBuffer, b_f: BitVector, refs: SaAccess):
        self.text = text
        self.b_f = b_f
        self.refs = refs
        self.n = text.n
        self.z = b_f.index.ones

    def bounds(self, x: int) -> Tuple[int, int]:
        if not 1 <= x <= self.z:
            raise RangeError("factor index out of range", {"x": x, "z": self.z})
        start = self.b_f.select1(x)
        return start, _factor_length(self.b_f, x, self.z, self.n)

    def factor_query(self, x: int) -> Lz78Factor:
        start, length = self.bounds(x)
        return Lz78Factor(start=start, length=length, ref=self.refs[x], symbol=self.text[start + length - 1])

    def factors(self) -> Iterator[Lz78Factor]:
        for x in range(1, self.z + 1):
            yield self.factor_query(x)

    def decode(self) -> List[int]:
        """Expand every factor as its referred factor plus the extra symbol."""
        out: List[int] = []
        starts = [0]
        lengths = [0]
        for f in self.factors():
            begin = starts[f.ref] - 1
            out.extend(out[begin:begin + lengths[f.ref]])
            out.append(f.symbol)
            starts.append(f.start)
            lengths.append(f.length)
        return out

    def bit_cost(self) -> int:
        return self.b_f.bit_cost() + self.z * cell_width(self.n)


@dataclass
class Lz78Run:
    factorization: Lz78Factorization
    context: FactorizationContext
    counters: EdgeCounters
    m_vxi: NodeMarkingVector
    witnesses: WitnessTable
    trail: Optional[AuditTrail] = None
    structure_bits: Dict[str, int] = field(default_factory=dict)


def run_lz78(ctx: FactorizationContext, keep_trail: bool = True) -> Lz78Run:
    ws, tree = ctx.ws, ctx.tree

    started = time.perf_counter()
    counters = build_edge_counters(ws, tree, record=keep_trail)
    ctx.timed("edge_counters", started)

    started = time.perf_counter()
    invert_in_place(ws)
    ctx.timed("invert", started)

    started = time.perf_counter()
    trail: Optional[AuditTrail] = [] if keep_trail else None
    witnesses, b_f = compute_witnesses(ws, tree, counters, trail)
    ctx.timed("witnesses", started)

    started = time.perf_counter()
    m_vxi = collect_vxi(witnesses, tree)
    match_refs(witnesses, m_vxi, tree, b_f)
    ctx.timed("matching", started)

    factorization = Lz78Factorization(ctx.text, b_f, ws.a1)
    logger.info(
        "LZ78 factorization complete",
        n=ctx.text.n,
        z=factorization.z,
        v_xi=m_vxi.count,
        delta=counters.delta,
        epsilon=str(ws.epsilon),
    )
    return Lz78Run(
        factorization=factorization,
        context=ctx,
        counters=counters,
        m_vxi=m_vxi,
        witnesses=witnesses,
        trail=trail,
        structure_bits={
            "b_f": b_f.bit_cost(),
            "leaf_flags": witnesses.bit_cost(),
            "m_vxi": m_vxi.bit_cost(),
            "m_vdelta": counters.m_vdelta.bit_cost(),
            "small_counters": counters.small_bits(),
            "large_counters": counters.large_bits(),
            "seen": tree.node_count,
        },
    )


def factorize_lz78(
    t: TextBuffer,
    eps: Fraction,
    structures: Optional[StructureSettings] = None,
) -> Lz78Factorization:
    return run_lz78(prepare_context(t, eps, structures), keep_trail=False).factorization


def _trie_heights(refs: List[int]) -> List[int]:
    """Height of every factor's LZ78 trie node; index 0 is the trie root."""
    heights = [0] * len(refs)
    for x in range(len(refs) - 1, 0, -1):
        y = refs[x]
        heights[y] = max(heights[y], heights[x] + 1)
    return heights


def audit_lz78(run: Lz78Run) -> List[LemmaCheck]:
    """Trie-size, counter and Delta-edge bounds of a finished LZ78 run."""
    if run.trail is None:
        raise StateError("the LZ78 audit needs the witness trail of the run")
    counters = run.counters
    record = counters.record
    if record is None:
        raise StateError("the LZ78 audit needs the exact edge lengths of the run")
    f = run.factorization
    tree = run.context.tree
    n, z = f.n, f.z
    checks: List[LemmaCheck] = []

    refs = [0] + [f.refs[x] for x in range(1, z + 1)]
    internal = bitarray(z + 1)
    internal.setall(0)
    for x in range(1, z + 1):
        internal[refs[x]] = 1

    free = [refs[x] == 0 for x in range(z + 1)]
    alpha = sum(1 for x in range(1, z + 1) if free[x] and internal[x])
    beta = sum(1 for x in range(1, z + 1) if free[x] and not internal[x])
    gamma = sum(1 for x in range(1, z + 1) if not free[x] and internal[x])
    delta_leaves = sum(1 for x in range(1, z + 1) if not free[x] and not internal[x])
    z_i = alpha + gamma

    detail = f"alpha={alpha} beta={beta} gamma={gamma} delta={delta_leaves}"
    checks.append(bound_check("factor_classes_sum_to_z", alpha + beta + gamma + delta_leaves, z, detail, equal=True))
    checks.append(bound_check("factor_lengths_fit_text", z + gamma + delta_leaves, n, detail))
    checks.append(bound_check("free_inner_at_most_ref_leaves", alpha, delta_leaves, detail))
    checks.append(bound_check("z_plus_inner_at_most_n", z + z_i, n, f"z_i={z_i}"))
    checks.append(bound_check("v_xi_at_most_inner", run.m_vxi.count, z_i))

    over = 0
    for v in range(2, tree.node_count + 1):
        if counters.count(v) > min(record.length(v), record.h_parent(v)):
            over += 1
    checks.append(bound_check("edge_counters_within_h", over, 0, "edges with n_e > min(|c(e)|, h(u))"))

    # Trie height below explicit nodes whose parent is explicit.
    heights = _trie_heights(refs)
    deepest: Dict[int, int] = {}
    for x, (witness, _) in enumerate(run.trail, start=1):
        deepest[witness] = x
    over = 0
    for v, x in deepest.items():
        if not counters.saturated(v):
            continue
        u = tree.parent(v)
        if u != ROOT and not counters.saturated(u):
            continue
        if heights[x] > tree.subtree_leaf_count(v) - record.length(v):
            over += 1
    checks.append(bound_check("trie_height_within_leaves", over, 0, "explicit nodes above l(v) - |c(e)|"))

    delta = counters.delta
    ratio = n / delta
    checks.append(bound_check(
        "delta_edges_harmonic_bound",
        counters.delta_edges,
        ratio * (1 + math.log(ratio)),
        f"delta={delta}",
    ))
    return checks
