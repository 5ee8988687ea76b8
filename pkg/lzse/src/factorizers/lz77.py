"""
LZ77 factorization by leaf-to-top traversals over the succinct suffix tree.

Traversal j starts at the leaf of suffix j and marks nodes upward until it
meets a node that is already marked. When j is a factor position the node it
stops at decides the factor: the root gives a free letter, any other node v
(a referred node) gives a factor of length str_depth(v) whose referred
position is the traversal that first marked v.

With the output kept inside A_1 this takes three rounds and a matching scan:

  round 1   B_f, B_r and the referred-node marker M_{V_r}
  round 2   B_D, counting in unary the referred nodes seen per traversal
  sparsify  keep ISA[j] only where traversal j contributes to D
  round 3   D, written over the sparse ISA from the left
  matching  replace every referred entry of D by its first-marking traversal

D cells hold nrank(M_{V_r}, v) rather than the pre-order number v. Ranks are
bounded by |V_r| <= n and fit the arena width, pre-order numbers may not.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from bitarray import bitarray

from lzse.src.factorizers.context import FactorizationContext, bound_check, prepare_context
from lzse.src.models.schemas import LemmaCheck, Lz77Factor, Phase
from lzse.src.structures.bitvec import BitVector
from lzse.src.structures.packed import PackedIntArray, cell_width
from lzse.src.structures.sst import ROOT, NodeMarkingVector, SuccinctSuffixTree
from lzse.src.structures.suffix import (
    RmqIndex,
    SaAccess,
    SampledInverse,
    SuffixWorkspace,
    TextBuffer,
    build_inverse_access,
    invert_in_place,
)
from lzse.src.utils.config import StructureSettings
from lzse.src.utils.errors import InvariantViolation, RangeError, StateError
from lzse.src.utils.logging import get_logger, log_error_with_context, log_phase

logger = get_logger(__name__)


class TraversalState:
    """Node marks shared by the replayed traversals, plus the referred-node set."""

    def __init__(self, node_count: int):
        self.node_count = node_count
        self.marked = bitarray(node_count)
        self.referred = BitVector(node_count)
        self.m_vr: Optional[NodeMarkingVector] = None
        self.shallow_referred = 0
        self.trail: List[int] = []
        self.steps = 0
        self.parent_steps: List[int] = []
        self.reset()

    def reset(self) -> None:
        """Only the root is marked."""
        self.marked.setall(0)
        self.marked[ROOT - 1] = 1
        self.steps = 0

    def close_round(self) -> None:
        self.parent_steps.append(self.steps)
        self.steps = 0

    def is_marked(self, v: int) -> bool:
        return bool(self.marked[v - 1])

    def climb(self, tree: SuccinctSuffixTree, leaf: int) -> int:
        """Mark from leaf upward; returns the first already-marked node, newly marked nodes land in trail."""
        self.trail.clear()
        v = leaf
        while not self.marked[v - 1]:
            self.marked[v - 1] = 1
            self.trail.append(v)
            v = tree.parent(v)
            self.steps += 1
        return v


def _blocks(b_d: BitVector) -> Iterator[Tuple[int, int]]:
    """(j, number of D entries of traversal j) for j = 1..n, by one scan over B_D."""
    j = 1
    zeros = 0
    for bit in b_d.bits:
        if bit:
            yield j, zeros
            j += 1
            zeros = 0
        else:
            zeros += 1


def _invariant(message: str, **context) -> InvariantViolation:
    log_error_with_context("invariant", message, context)
    return InvariantViolation(message, context)


OnReference = Callable[[int, int], None]


def _leaf_to_top(
    ws: SuffixWorkspace,
    tree: SuccinctSuffixTree,
    inverse: SampledInverse,
    classic: bool,
    on_reference: Optional[OnReference] = None,
) -> Tuple[BitVector, BitVector, TraversalState]:
    """All n traversals with SA reachable; fills B_f, B_r and the referred-node set."""
    n = ws.n
    state = TraversalState(tree.node_count)
    b_f = BitVector(n)
    b_r = BitVector()
    next_factor = 1

    for j in range(1, n + 1):
        v = state.climb(tree, tree.leaf_select(ws.a1[j]))
        if j != next_factor:
            continue
        b_f.set(j)
        if v == ROOT:
            b_r.append(0)
            next_factor = j + 1
            continue

        length = tree.str_depth(v, inverse) + (1 if classic else 0)
        if not state.referred[v]:
            state.referred.set(v)
            if length == 1:
                state.shallow_referred += 1
        b_r.append(1)
        if on_reference is not None:
            on_reference(j, v)
        next_factor = j + length

    if next_factor != n + 1:
        raise _invariant("factors do not end at the sentinel", next_factor=next_factor, n=n)

    state.close_round()
    state.m_vr = NodeMarkingVector(state.referred, tree.directory)
    b_f.build_index(tree.directory)
    b_r.build_index(tree.directory)
    return b_f, b_r, state


def round1(
    ws: SuffixWorkspace,
    tree: SuccinctSuffixTree,
    inverse: SampledInverse,
    classic: bool = False,
) -> Tuple[BitVector, BitVector, TraversalState]:
    """
    Factor positions, referencing factors and referred nodes.

    ISA is read from A_1, SA values come from the sampled inverse in A_2 and
    are needed only for str_depth at factor stops. A_2 is released at the end.
    """
    ws.require(Phase.ISA)
    if ws.a2_owner != "sampled_inverse":
        raise StateError("round 1 needs the sampled inverse in A_2", {"owner": ws.a2_owner})
    started = time.perf_counter()

    b_f, b_r, state = _leaf_to_top(ws, tree, inverse, classic)
    ws.release_a2()

    log_phase(
        "lz77_round1",
        (time.perf_counter() - started) * 1000,
        z=b_f.index.ones,
        z_r=b_r.index.ones,
        referred_nodes=state.m_vr.count,
        parent_steps=state.parent_steps[-1],
        sa_steps=inverse.steps,
    )
    return b_f, b_r, state


def round2(ws: SuffixWorkspace, tree: SuccinctSuffixTree, state: TraversalState, b_f: BitVector) -> BitVector:
    """Replay all traversals and write B_D: one 0 per referred-node event, one 1 per traversal."""
    ws.require(Phase.ISA)
    if state.m_vr is None:
        raise StateError("round 2 needs the referred nodes of round 1")
    started = time.perf_counter()
    state.reset()
    m_vr = state.m_vr
    b_d = BitVector()

    for j in range(1, ws.n + 1):
        v = state.climb(tree, tree.leaf_select(ws.a1[j]))
        events = sum(1 for u in state.trail if u in m_vr)
        if b_f[j] and v != ROOT:
            if v not in m_vr:
                raise _invariant("factor stop is not a referred node", j=j, node=v)
            events += 1
        b_d.extend([0] * events)
        b_d.append(1)

    state.close_round()
    log_phase(
        "lz77_round2",
        (time.perf_counter() - started) * 1000,
        d_size=b_d.count(0),
        parent_steps=state.parent_steps[-1],
    )
    return b_d


def sparsify_isa(ws: SuffixWorkspace, b_d: BitVector) -> int:
    """
    Keep ISA[j] only for traversals with at least one D entry and pack the
    survivors, in increasing j, against the right end of A_1. Returns their count.
    """
    ws.require(Phase.ISA)
    a1 = ws.a1
    bits = b_d.bits
    write = ws.n
    j = ws.n + 1
    has_entries = False

    # B_D read backwards: a 1 closes the block of the traversal before it.
    for pos in range(len(bits) - 1, -1, -1):
        if bits[pos]:
            if j <= ws.n and has_entries:
                a1[write] = a1[j]
                write -= 1
            j -= 1
            has_entries = False
        else:
            has_entries = True
    if j == 1 and has_entries:
        a1[write] = a1[1]
        write -= 1

    ws.advance(Phase.SPARSE_ISA)
    return ws.n - write


def round3(
    ws: SuffixWorkspace,
    tree: SuccinctSuffixTree,
    state: TraversalState,
    b_f: BitVector,
    b_d: BitVector,
    survivors: int,
) -> int:
    """
    Replay the surviving traversals and write D into A_1 from the left.

    Traversals without D entries are skipped: they never first-mark a
    referred node and never stop a referencing factor. Returns |D|.
    """
    ws.require(Phase.SPARSE_ISA)
    started = time.perf_counter()
    state.reset()
    m_vr = state.m_vr
    a1 = ws.a1
    read = ws.n - survivors + 1
    write = 1

    for j, entries in _blocks(b_d):
        if entries == 0:
            continue
        leaf = tree.leaf_select(a1[read])
        read += 1
        v = state.climb(tree, leaf)

        emitted = [u for u in state.trail if u in m_vr]
        if b_f[j] and v != ROOT:
            emitted.append(v)
        if len(emitted) != entries:
            raise _invariant("replay diverged from B_D", j=j, expected=entries, emitted=len(emitted))
        for u in emitted:
            if write >= read:
                raise _invariant("D overtook the sparse ISA", j=j, write=write, read=read)
            a1[write] = m_vr.nrank(u)
            write += 1

    d_size = write - 1
    state.close_round()
    ws.advance(Phase.D)
    log_phase(
        "lz77_round3",
        (time.perf_counter() - started) * 1000,
        d_size=d_size,
        survivors=survivors,
        parent_steps=state.parent_steps[-1],
    )
    return d_size


def match_referred(
    ws: SuffixWorkspace,
    b_d: BitVector,
    m_vr: NodeMarkingVector,
    b_f: BitVector,
    b_r: BitVector,
    d_size: int,
) -> Tuple[int, int]:
    """
    Turn the referred entries of D into referred positions and compact them
    so that A_1[x'] belongs to the x'-th referencing factor.

    A_2 holds one chunk of V_r per pass: A_2[t] is the traversal that first
    marked the t-th node of the chunk. Returns (z_r, number of passes).
    """
    ws.require(Phase.D)
    started = time.perf_counter()
    a1 = ws.a1
    referred_nodes = m_vr.count
    passes = 0

    if referred_nodes:
        a2 = ws.claim_a2("matching")
        chunk = len(a2)
        passes = ceil(referred_nodes / chunk)
        resolved = bitarray(d_size)
        resolved.setall(0)

        for p in range(passes):
            low = p * chunk
            if p:
                a2.fill(0)
            x = 0
            k = 1
            for bit in b_d.bits:
                if bit:
                    k += 1
                    continue
                x += 1
                if resolved[x - 1]:
                    continue
                rank = a1[x]
                if not low < rank <= low + chunk:
                    continue
                slot = rank - low
                if a2[slot] == 0:
                    a2[slot] = k
                else:
                    a1[x] = a2[slot]
                resolved[x - 1] = 1
        ws.release_a2()

    # The referred entry of a referencing factor is the last entry of its block.
    z_r = 0
    x = 0
    factor = 0
    for j, entries in _blocks(b_d):
        x += entries
        if not b_f[j]:
            continue
        factor += 1
        if b_r[factor]:
            z_r += 1
            a1[z_r] = a1[x]

    ws.advance(Phase.REFERRED_POSITIONS)
    log_phase("lz77_matching", (time.perf_counter() - started) * 1000, z_r=z_r, passes=passes)
    return z_r, passes


class Lz77Factorization:
    """B_f, B_r and the referred positions; factor lookups in O(1)."""

    def __init__(self, text: TextBuffer, b_f: BitVector, b_r: BitVector, refs: SaAccess, classic: bool = False):
        self.text = text
        self.b_f = b_f
        self.b_r = b_r
        self.refs = refs
        self.classic = classic
        self.n = text.n
        self.z = b_f.index.ones
        self.z_r = b_r.index.ones

    def bounds(self, x: int) -> Tuple[int, int]:
        if not 1 <= x <= self.z:
            raise RangeError("factor index out of range", {"x": x, "z": self.z})
        start = self.b_f.select1(x)
        end = self.b_f.select1(x + 1) if x < self.z else self.n + 1
        return start, end - start

    def factor_query(self, x: int) -> Lz77Factor:
        start, length = self.bounds(x)
        if not self.b_r[x]:
            return Lz77Factor(start=start, length=length, symbol=self.text[start])
        ref = self.refs[self.b_r.rank1(x)]
        symbol = self.text[start + length - 1] if self.classic else None
        return Lz77Factor(start=start, length=length, ref=ref, symbol=symbol)

    def factors(self) -> Iterator[Lz77Factor]:
        for x in range(1, self.z + 1):
            yield self.factor_query(x)

    def decode(self) -> List[int]:
        """Rebuild T (sentinel included) from the factors alone."""
        out: List[int] = []
        for f in self.factors():
            if f.ref is None:
                out.append(f.symbol)
                continue
            copied = f.length - 1 if self.classic else f.length
            for i in range(copied):
                out.append(out[f.ref - 1 + i])
            if self.classic:
                out.append(f.symbol)
        return out

    def bit_cost(self) -> int:
        """B_f, B_r and z_r referred positions of arena width."""
        return self.b_f.bit_cost() + self.b_r.bit_cost() + self.z_r * cell_width(self.n)


@dataclass
class Lz77Run:
    """A finished factorization plus the intermediate figures the audit reads."""
    factorization: Lz77Factorization
    context: FactorizationContext
    state: TraversalState
    variant: str = "three_round"
    b_d: Optional[BitVector] = None
    d_size: int = 0
    survivors: int = 0
    passes: int = 0
    inverse_steps: int = 0
    structure_bits: Dict[str, int] = field(default_factory=dict)


def _invert_with_inverse(ctx: FactorizationContext) -> SampledInverse:
    started = time.perf_counter()
    invert_in_place(ctx.ws)
    inverse = build_inverse_access(ctx.ws, ctx.tree.directory)
    ctx.timed("invert", started)
    return inverse


def run_lz77(ctx: FactorizationContext, classic: bool = False) -> Lz77Run:
    """Three rounds and matching; the result stays in B_f, B_r and A_1."""
    ws, tree = ctx.ws, ctx.tree
    inverse = _invert_with_inverse(ctx)

    started = time.perf_counter()
    b_f, b_r, state = round1(ws, tree, inverse, classic)
    ctx.timed("round1", started)

    started = time.perf_counter()
    b_d = round2(ws, tree, state, b_f)
    ctx.timed("round2", started)

    started = time.perf_counter()
    survivors = sparsify_isa(ws, b_d)
    d_size = round3(ws, tree, state, b_f, b_d, survivors)
    ctx.timed("round3", started)

    started = time.perf_counter()
    z_r, passes = match_referred(ws, b_d, state.m_vr, b_f, b_r, d_size)
    ctx.timed("matching", started)

    factorization = Lz77Factorization(ctx.text, b_f, b_r, ws.a1, classic)
    logger.info(
        "LZ77 factorization complete",
        n=ctx.text.n,
        z=factorization.z,
        z_r=z_r,
        classic=classic,
        epsilon=str(ws.epsilon),
    )
    return Lz77Run(
        factorization=factorization,
        context=ctx,
        state=state,
        b_d=b_d,
        d_size=d_size,
        survivors=survivors,
        passes=passes,
        inverse_steps=inverse.steps,
        structure_bits={
            "b_f": b_f.bit_cost(),
            "b_r": b_r.bit_cost(),
            "b_d": len(b_d),
            "m_vr": state.m_vr.bit_cost(),
            "marks": state.node_count,
            "skip": d_size,
            "sample_marker": inverse.bit_cost(),
        },
    )


def run_lz77_extra_output(ctx: FactorizationContext, classic: bool = False) -> Lz77Run:
    """
    One round of traversals with the referred positions written outside the
    arena. The referred position of a stop node v is the smallest leaf label
    below v, found by a range minimum over SA on v's leaf interval.
    """
    ws, tree = ctx.ws, ctx.tree
    ws.require(Phase.SA)
    started = time.perf_counter()
    sa_rmq = RmqIndex(ws.a1, ws.n, ctx.structures.rmq_block_size)
    ctx.timed("sa_rmq", started)

    inverse = _invert_with_inverse(ctx)
    sa_rmq.rebind(inverse)
    positions: List[int] = []

    def on_reference(j: int, v: int) -> None:
        lb, rb = tree.leaf_interval(v)
        positions.append(inverse[sa_rmq.query(lb, rb)])

    started = time.perf_counter()
    b_f, b_r, state = _leaf_to_top(ws, tree, inverse, classic, on_reference)
    ws.release_a2()
    ctx.timed("round1", started)

    refs = PackedIntArray.from_values(positions, cell_width(ws.n))
    factorization = Lz77Factorization(ctx.text, b_f, b_r, refs, classic)
    log_phase("lz77_extra_output", ctx.timings_ms["round1"], z=factorization.z, z_r=len(positions))
    return Lz77Run(
        factorization=factorization,
        context=ctx,
        state=state,
        variant="extra_output",
        inverse_steps=inverse.steps,
        structure_bits={
            "b_f": b_f.bit_cost(),
            "b_r": b_r.bit_cost(),
            "m_vr": state.m_vr.bit_cost(),
            "marks": state.node_count,
            "sa_rmq": sa_rmq.bit_cost(),
            "refs_output": refs.bit_cost(),
            "sample_marker": inverse.bit_cost(),
        },
    )


def factorize_lz77(
    t: TextBuffer,
    eps: Fraction,
    classic: bool = False,
    structures: Optional[StructureSettings] = None,
) -> Lz77Factorization:
    return run_lz77(prepare_context(t, eps, structures), classic).factorization


def factorize_lz77_extra_output(
    t: TextBuffer,
    eps: Fraction,
    classic: bool = False,
    structures: Optional[StructureSettings] = None,
) -> Lz77Factorization:
    return run_lz77_extra_output(prepare_context(t, eps, structures), classic).factorization


def d_nodes(ws: SuffixWorkspace, m_vr: NodeMarkingVector, d_size: int) -> List[int]:
    """D as pre-order numbers; valid between round 3 and matching."""
    ws.require(Phase.D)
    nodes = m_vr.nodes()
    return [nodes[ws.a1[x] - 1] for x in range(1, d_size + 1)]


def audit_lz77(run: Lz77Run) -> List[LemmaCheck]:
    """|D| decomposition bounds and the per-round parent-step bound."""
    f = run.factorization
    n = f.n
    node_count = run.context.tree.node_count
    checks: List[LemmaCheck] = []

    lengths = [f.bounds(x)[1] for x in range(1, f.z + 1)]
    z_f = f.z - f.z_r
    z_r1 = sum(1 for x, length in enumerate(lengths, start=1) if length == 1 and f.b_r[x])
    z_r2 = f.z_r - z_r1
    v_r = run.state.m_vr.count
    v_r1 = run.state.shallow_referred
    v_r2 = v_r - v_r1

    if run.b_d is not None:
        checks.append(bound_check("d_size_is_vr_plus_zr", run.d_size, v_r + f.z_r, equal=True))
        checks.append(bound_check("d_size_at_most_n", run.d_size, n))
    checks.append(bound_check("shallow_referred_at_most_free", v_r1, z_f))
    checks.append(bound_check("deep_referred_at_most_long_refs", v_r2, z_r2))
    checks.append(bound_check("factor_length_chain", z_f + z_r1 + 2 * z_r2, n,
                              detail=f"z_f={z_f} z_r1={z_r1} z_r2={z_r2}"))
    for i, steps in enumerate(run.state.parent_steps, start=1):
        checks.append(bound_check(f"parent_steps_round{i}", steps, node_count))
    return checks
