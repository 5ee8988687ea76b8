"""
Succinct suffix-tree topology.

Nodes are identified by pre-order numbers 1..|V| (root = 1). Children are
ordered by the first symbol of their edge label with the sentinel smallest,
so the i-th leaf in pre-order is the suffix SA[i].

The stored topology is the DFUDS sequence: a leading '(' followed, for every
node in pre-order, by one '(' per child and a closing ')'. parent() runs on
DFUDS. A balanced-parentheses copy derived from the same degrees answers
depth, level ancestors and subtree sizes. Leaves are marked in a pre-order
bit vector; string depths come from the LCP array through the RMQ index.
"""

import time
from typing import Iterator, List, Optional, Sequence, Tuple

from lzse.src.structures.bitvec import BitVector, RankDirectory
from lzse.src.structures.parentheses import ExcessIndex
from lzse.src.structures.suffix import LcpArray, RmqIndex, SaAccess, TextBuffer
from lzse.src.utils.errors import ConstructionError, DomainError, RangeError, StateError
from lzse.src.utils.logging import get_logger, log_phase

logger = get_logger(__name__)

ROOT = 1


class NodeMarkingVector:
    """Marks a node subset; nrank maps a marked node to its dense index."""

    def __init__(self, marks: BitVector, directory: Optional[RankDirectory] = None):
        self.marks = marks
        self._index = marks.build_index(directory)

    @classmethod
    def from_nodes(
        cls,
        node_count: int,
        nodes: Sequence[int],
        directory: Optional[RankDirectory] = None,
    ) -> "NodeMarkingVector":
        marks = BitVector(node_count)
        for v in nodes:
            marks.set(v)
        return cls(marks, directory)

    def __len__(self) -> int:
        return len(self.marks)

    def __contains__(self, v: int) -> bool:
        return 1 <= v <= len(self.marks) and self.marks[v] == 1

    @property
    def count(self) -> int:
        return self._index.ones

    def nrank(self, v: int) -> int:
        if v not in self:
            raise DomainError("nrank is defined only for marked nodes", {"v": v})
        return self._index.rank1(v)

    def rank(self, v: int) -> int:
        """Marked nodes with pre-order <= v, for any v."""
        return self._index.rank1(v)

    def nodes(self) -> List[int]:
        return [self._index.select1(k) for k in range(1, self.count + 1)]

    def bit_cost(self) -> int:
        return self.marks.bit_cost()


class SuccinctSuffixTree:
    """Pre-order navigation over DFUDS, BP and the leaf marker."""

    def __init__(
        self,
        dfuds: BitVector,
        bp: BitVector,
        leaves: BitVector,
        lcp: LcpArray,
        rmq: Optional[RmqIndex],
        excess_block_bits: int = 128,
        directory: Optional[RankDirectory] = None,
    ):
        self.dfuds = dfuds
        self.bp = bp
        self.leaves = leaves
        self.lcp = lcp
        self.rmq = rmq
        self.node_count = len(leaves)
        self.leaf_count = len(lcp)
        self.directory = directory
        self._dfuds_excess = ExcessIndex(dfuds, excess_block_bits, directory)
        self._bp_excess = ExcessIndex(bp, excess_block_bits, directory)
        leaves.build_index(directory)

    @property
    def n(self) -> int:
        return self.leaf_count

    def _check_node(self, v: int) -> None:
        if not 1 <= v <= self.node_count:
            raise RangeError("node out of range", {"v": v, "nodes": self.node_count})

    def is_leaf(self, v: int) -> bool:
        self._check_node(v)
        return self.leaves[v] == 1

    def parent(self, v: int) -> int:
        self._check_node(v)
        if v == ROOT:
            raise DomainError("the root has no parent")
        # v's description starts right after the (v-1)-th ')'; the ')' just
        # before it closes the '(' in the parent's description pointing to v.
        pos = self.dfuds.select0(v - 1) + 1
        opening = self._dfuds_excess.find_open(pos - 1)
        return self.dfuds.rank0(opening) + 1

    def depth(self, v: int) -> int:
        self._check_node(v)
        return self._bp_excess.excess(self.bp.select1(v)) - 1

    def level_anc(self, v: int, i: int) -> int:
        depth = self.depth(v)
        if not 0 <= i <= depth:
            raise RangeError("level ancestor beyond the root", {"v": v, "i": i, "depth": depth})
        if i == 0:
            return v
        p = self.bp.select1(v)
        q = self._bp_excess.bwd_le(p, depth - i)
        return self.bp.rank1(q + 1)

    def subtree_size(self, v: int) -> int:
        """Number of nodes in the subtree of v, v included."""
        self._check_node(v)
        p = self.bp.select1(v)
        return (self._bp_excess.find_close(p) - p + 1) // 2

    def children(self, v: int) -> Iterator[int]:
        end = v + self.subtree_size(v) - 1
        child = v + 1
        while child <= end:
            yield child
            child += self.subtree_size(child)

    def leaf_select(self, i: int) -> int:
        if not 1 <= i <= self.leaf_count:
            raise RangeError("leaf rank out of range", {"i": i, "n": self.leaf_count})
        return self.leaves.select1(i)

    def leaf_rank(self, v: int) -> int:
        if not self.is_leaf(v):
            raise DomainError("node is not a leaf", {"v": v})
        return self.leaves.rank1(v)

    def node_code(self, v: int) -> Tuple[int, int]:
        """(1, leaf rank) or (0, inner-node rank); either rank fits a ceil(lg(n+1))-bit cell."""
        self._check_node(v)
        leaf_rank = self.leaves.rank1(v)
        if self.leaves[v]:
            return 1, leaf_rank
        return 0, v - leaf_rank

    def node_from_code(self, is_leaf: int, rank: int) -> int:
        return self.leaves.select1(rank) if is_leaf else self.leaves.select0(rank)

    def leaf_label(self, v: int, sa_access: SaAccess) -> int:
        return sa_access[self.leaf_rank(v)]

    def leaf_interval(self, v: int) -> Tuple[int, int]:
        """Suffix-array interval [lb, rb] of the leaves below v."""
        last = v + self.subtree_size(v) - 1
        return self.leaves.rank1(v - 1) + 1, self.leaves.rank1(last)

    def subtree_leaf_count(self, v: int) -> int:
        lb, rb = self.leaf_interval(v)
        return rb - lb + 1

    def str_depth(self, v: int, sa_access: Optional[SaAccess] = None) -> int:
        self._check_node(v)
        if v == ROOT:
            return 0
        lb, rb = self.leaf_interval(v)
        if lb == rb:
            if sa_access is None:
                raise StateError("string depth of a leaf needs suffix-array access", {"v": v})
            return self.leaf_count - sa_access[lb] + 1
        if self.rmq is None:
            raise StateError("string depth of an inner node needs the RMQ index", {"v": v})
        return self.lcp[self.rmq.query(lb + 1, rb)]

    def edge_label_length(self, v: int, sa_access: Optional[SaAccess] = None) -> int:
        """|c(e)| of the edge entering v."""
        return self.str_depth(v, sa_access) - self.str_depth(self.parent(v), sa_access)

    def bit_cost(self) -> int:
        return (
            self._dfuds_excess.bit_cost() + len(self.dfuds)
            + self._bp_excess.bit_cost() + len(self.bp)
            + self.leaves.bit_cost()
        )

    # -- debug export -------------------------------------------------------

    def _preorder_with_depth(self) -> Iterator[Tuple[int, int]]:
        stack = [(ROOT, 0)]
        while stack:
            v, d = stack.pop()
            yield v, d
            stack.extend((c, d + 1) for c in reversed(list(self.children(v))))

    def to_text(self, sa_access: SaAccess, text: Optional[TextBuffer] = None) -> str:
        """Indented outline: pre-order number, |c(e)| and, given the text, the edge label."""
        lines = []
        for v, d in self._preorder_with_depth():
            if v == ROOT:
                lines.append("1 (root)")
                continue
            length = self.edge_label_length(v, sa_access)
            line = f"{'  ' * d}{v} [{length}]"
            if text is not None:
                lb, _ = self.leaf_interval(v)
                end = sa_access[lb] + self.str_depth(v, sa_access)
                label = "".join(_printable(s) for s in text.substring(end - length, length))
                line += f" {label}"
            if self.is_leaf(v):
                line += f" leaf={self.leaf_label(v, sa_access)}"
            lines.append(line)
        return "\n".join(lines)

    def to_edge_list(self, sa_access: SaAccess) -> str:
        """DOT-like edge list: parent -> child with the edge-label length."""
        lines = ["digraph sst {"]
        for v in range(2, self.node_count + 1):
            lines.append(f"  {self.parent(v)} -> {v} [len={self.edge_label_length(v, sa_access)}];")
        lines.append("}")
        return "\n".join(lines)


def _printable(symbol: int) -> str:
    if symbol < 0:
        return "$"
    return chr(symbol) if 32 <= symbol < 127 else f"<{symbol}>"


def _lcp_intervals(lcp: LcpArray) -> List[Tuple[int, int, int]]:
    """Inner nodes as (lb, lcp value, degree), innermost first for equal lb."""
    n = len(lcp)
    nodes = []
    stack = [[0, 1, 1]]
    for i in range(2, n + 2):
        current = lcp[i] if i <= n else -1
        lb = i - 1
        while stack and current < stack[-1][0]:
            value, start, degree = stack.pop()
            nodes.append((start, value, degree))
            lb = start
        if current < 0:
            continue
        if current == stack[-1][0]:
            stack[-1][2] += 1
        else:
            stack.append([current, lb, 2])
    return nodes


def preorder_degrees(lcp: LcpArray) -> List[int]:
    """Child counts of all nodes in pre-order (leaves have 0)."""
    n = len(lcp)
    if n == 1:
        return [0]
    buckets: List[List[int]] = [[] for _ in range(n + 1)]
    for lb, _, degree in _lcp_intervals(lcp):
        buckets[lb].append(degree)
    degrees = []
    for lb in range(1, n + 1):
        degrees.extend(reversed(buckets[lb]))
        degrees.append(0)
    return degrees


def build_tree(
    sa_access: SaAccess,
    lcp: LcpArray,
    rmq: Optional[RmqIndex] = None,
    excess_block_bits: int = 128,
    directory: Optional[RankDirectory] = None,
) -> SuccinctSuffixTree:
    """DFUDS suffix-tree topology from SA and LCP."""
    started = time.perf_counter()
    n = len(lcp)
    for i in range(2, n + 1):
        value = lcp[i]
        if value > n - max(sa_access[i - 1], sa_access[i]):
            raise ConstructionError(
                "LCP value longer than the suffixes it compares",
                {"i": i, "lcp": value, "sa_prev": sa_access[i - 1], "sa": sa_access[i]},
            )

    degrees = preorder_degrees(lcp)
    if sum(degrees) != len(degrees) - 1 or degrees.count(0) != n:
        raise ConstructionError(
            "SA/LCP do not describe a suffix tree",
            {"nodes": len(degrees), "edges": sum(degrees), "leaves": degrees.count(0), "n": n},
        )

    dfuds = BitVector([1])
    bp = BitVector()
    leaves = BitVector(len(degrees))
    pending: List[int] = []
    for v, degree in enumerate(degrees, start=1):
        dfuds.extend([1] * degree)
        dfuds.append(0)
        bp.append(1)
        if degree:
            pending.append(degree)
            continue
        leaves.set(v)
        bp.append(0)
        while pending:
            pending[-1] -= 1
            if pending[-1]:
                break
            pending.pop()
            bp.append(0)

    tree = SuccinctSuffixTree(dfuds, bp, leaves, lcp, rmq, excess_block_bits, directory)
    log_phase(
        "tree",
        (time.perf_counter() - started) * 1000,
        nodes=tree.node_count,
        leaves=tree.leaf_count,
    )
    return tree
