"""
Brute-force reference implementations.

Everything here works on plain Python lists of symbols that already end with
the sentinel (-1) and shares no code with the succinct pipeline. Positions
and ranks are 1-based to match the factorizations under test.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from lzse.src.models.schemas import OracleFactor

SENTINEL = -1


def with_sentinel(symbols: Sequence[int]) -> List[int]:
    return list(symbols) + [SENTINEL]


@dataclass
class ExplicitNode:
    """Pointer-based suffix-tree node."""
    preorder: int
    str_depth: int
    parent: Optional["ExplicitNode"] = None
    children: List["ExplicitNode"] = field(default_factory=list)
    label: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return self.label is not None

    def leaf_labels(self) -> List[int]:
        if self.is_leaf:
            return [self.label]
        labels: List[int] = []
        for child in self.children:
            labels.extend(child.leaf_labels())
        return labels


@dataclass
class SuffixStructures:
    sa: List[int]
    isa: List[int]
    lcp: List[int]
    nodes: List[ExplicitNode]

    @property
    def root(self) -> ExplicitNode:
        return self.nodes[0]

    def leaf_of(self, position: int) -> ExplicitNode:
        for node in self.nodes:
            if node.label == position:
                return node
        raise KeyError(position)


def _common_prefix(a: Sequence[int], b: Sequence[int]) -> int:
    k = 0
    while k < len(a) and k < len(b) and a[k] == b[k]:
        k += 1
    return k


def naive_suffix_structures(text: Sequence[int]) -> SuffixStructures:
    """SA by comparison sort, ISA, pairwise LCP and an explicit suffix tree."""
    n = len(text)
    sa = sorted(range(1, n + 1), key=lambda i: list(text[i - 1:]))
    isa = [0] * n
    for rank, pos in enumerate(sa, start=1):
        isa[pos - 1] = rank
    lcp = [0] + [_common_prefix(text[sa[i - 1] - 1:], text[sa[i] - 1:]) for i in range(1, n)]

    nodes: List[ExplicitNode] = []

    def build(lo: int, hi: int, parent: Optional[ExplicitNode]) -> ExplicitNode:
        # Suffixes sa[lo..hi] (0-based, inclusive) share the path to this node.
        if lo == hi:
            depth = n - sa[lo] + 1
            node = ExplicitNode(len(nodes) + 1, depth, parent, label=sa[lo])
            nodes.append(node)
            return node
        depth = min(lcp[lo + 1:hi + 1])
        node = ExplicitNode(len(nodes) + 1, depth, parent)
        nodes.append(node)
        start = lo
        for i in range(lo + 1, hi + 2):
            if i == hi + 1 or lcp[i] == depth:
                node.children.append(build(start, i - 1, node))
                start = i
        return node

    build(0, n - 1, None)
    return SuffixStructures(sa, isa, lcp, nodes)


def _longest_previous(text: Sequence[int], i: int) -> Tuple[int, int]:
    """(length, leftmost start) of the longest match of text[i:] starting before i, 0-based."""
    best_length, best_start = 0, -1
    for p in range(i):
        m = 0
        while i + m < len(text) and text[p + m] == text[i + m]:
            m += 1
        if m > best_length:
            best_length, best_start = m, p
    return best_length, best_start


def naive_lz77(text: Sequence[int], classic: bool = False) -> List[OracleFactor]:
    """Greedy longest previous factor; classic mode appends the fresh character."""
    factors = []
    i = 0
    while i < len(text):
        length, start = _longest_previous(text, i)
        if length == 0:
            factors.append(OracleFactor(start=i + 1, length=1, literal=text[i]))
            i += 1
        elif classic:
            factors.append(OracleFactor(start=i + 1, length=length + 1, ref=start + 1, literal=text[i + length]))
            i += length + 1
        else:
            factors.append(OracleFactor(start=i + 1, length=length, ref=start + 1))
            i += length
    return factors


def naive_lz78(text: Sequence[int]) -> List[OracleFactor]:
    """Explicit trie with one node per factor; ref is the index of the extended factor."""
    trie: Dict[Tuple[int, int], int] = {}
    factors = []
    i = 0
    while i < len(text):
        start = i
        node = 0
        while i < len(text) - 1 and (node, text[i]) in trie:
            node = trie[(node, text[i])]
            i += 1
        trie[(node, text[i])] = len(factors) + 1
        factors.append(OracleFactor(start=start + 1, length=i - start + 1, ref=node, literal=text[i]))
        i += 1
    return factors


def pointer_traversals(st: SuffixStructures) -> Iterator[Tuple[int, ExplicitNode, Set[int]]]:
    """
    Leaf-to-top traversal j = 1..n over the pointer tree. Yields j, the node
    where traversal j stopped and the marked pre-orders after it.
    """
    marked = {st.root.preorder}
    leaves = {node.label: node for node in st.nodes if node.is_leaf}
    for j in range(1, len(st.sa) + 1):
        v = leaves[j]
        while v.preorder not in marked:
            marked.add(v.preorder)
            v = v.parent
        yield j, v, marked


def easy_lz77(text: Sequence[int], classic: bool = False) -> List[OracleFactor]:
    """Leaf-to-top traversals with SA and ISA both at hand; ref = smallest leaf label below the stop."""
    st = naive_suffix_structures(text)
    factors = []
    next_factor = 1

    for j, v, _ in pointer_traversals(st):
        if j != next_factor:
            continue
        if v is st.root:
            factors.append(OracleFactor(start=j, length=1, literal=text[j - 1]))
            next_factor = j + 1
            continue
        ref = min(v.leaf_labels())
        if classic:
            length = v.str_depth + 1
            factors.append(OracleFactor(start=j, length=length, ref=ref, literal=text[j + length - 2]))
        else:
            length = v.str_depth
            factors.append(OracleFactor(start=j, length=length, ref=ref))
        next_factor = j + length
    return factors


def expand_lz77(factors: Sequence[OracleFactor]) -> List[int]:
    out: List[int] = []
    for f in factors:
        if f.ref is None:
            out.append(f.literal)
            continue
        copied = f.length - 1 if f.literal is not None else f.length
        for k in range(copied):
            out.append(out[f.ref - 1 + k])
        if f.literal is not None:
            out.append(f.literal)
    return out


def expand_lz78(factors: Sequence[OracleFactor]) -> List[int]:
    texts: List[List[int]] = [[]]
    for f in factors:
        texts.append(texts[f.ref] + [f.literal])
    return [symbol for piece in texts[1:] for symbol in piece]
