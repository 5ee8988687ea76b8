"""
Excess searches over a parentheses sequence ('(' = 1, ')' = 0).

excess(p) is the number of '(' minus the number of ')' in P[1..p], with
excess(0) = 0. The sequence is cut into blocks; each block keeps its absolute
minimum excess, and a binary min-tree over those minima locates the first
(or last) block that can reach a target. The search finishes by scanning the
bits of that block.
"""

from typing import Optional

from lzse.src.structures.bitvec import BitVector, RankDirectory
from lzse.src.utils.errors import RangeError

_INF = float("inf")


class ExcessIndex:
    """fwd/bwd "excess <= target" searches with find_open/find_close on top."""

    def __init__(self, parens: BitVector, block_bits: int = 128, directory: Optional[RankDirectory] = None):
        self.parens = parens
        self.length = len(parens)
        self.block_bits = block_bits
        self._rank = parens.build_index(directory)
        bits = parens.bits

        blocks = max(1, (self.length + block_bits - 1) // block_bits)
        minima = []
        excess = 0
        for b in range(blocks):
            low = _INF
            for bit in bits[b * block_bits:(b + 1) * block_bits]:
                excess += 1 if bit else -1
                if excess < low:
                    low = excess
            minima.append(low)
        self._blocks = blocks

        size = 1
        while size < blocks:
            size *= 2
        self._size = size
        tree = [_INF] * (2 * size)
        tree[size:size + blocks] = minima
        for node in range(size - 1, 0, -1):
            tree[node] = min(tree[2 * node], tree[2 * node + 1])
        self._tree = tree

    def excess(self, p: int) -> int:
        return 2 * self._rank.rank1(p) - p

    def _block_of(self, p: int) -> int:
        """Block holding position p >= 1."""
        return (p - 1) // self.block_bits

    def _first_block(self, lo: int, target: int, node: int = 1, left: int = 0, right: Optional[int] = None) -> int:
        """Smallest block b >= lo with minimum <= target, or -1."""
        if right is None:
            right = self._size - 1
        if right < lo or self._tree[node] > target:
            return -1
        if left == right:
            return left
        mid = (left + right) // 2
        found = self._first_block(lo, target, 2 * node, left, mid)
        if found != -1:
            return found
        return self._first_block(lo, target, 2 * node + 1, mid + 1, right)

    def _last_block(self, hi: int, target: int, node: int = 1, left: int = 0, right: Optional[int] = None) -> int:
        """Largest block b <= hi with minimum <= target, or -1."""
        if right is None:
            right = self._size - 1
        if left > hi or self._tree[node] > target:
            return -1
        if left == right:
            return left
        mid = (left + right) // 2
        found = self._last_block(hi, target, 2 * node + 1, mid + 1, right)
        if found != -1:
            return found
        return self._last_block(hi, target, 2 * node, left, mid)

    def fwd_le(self, p: int, target: int) -> Optional[int]:
        """Smallest q > p with excess(q) <= target."""
        if not 0 <= p <= self.length:
            raise RangeError("position out of range", {"p": p, "len": self.length})
        bits = self.parens.bits
        excess = self.excess(p)
        end = min(self.length, (self._block_of(p + 1) + 1) * self.block_bits) if p < self.length else p
        for q in range(p + 1, end + 1):
            excess += 1 if bits[q - 1] else -1
            if excess <= target:
                return q

        b = self._first_block(self._block_of(end + 1), target) if end < self.length else -1
        if b == -1:
            return None
        q = b * self.block_bits
        excess = self.excess(q)
        while True:
            q += 1
            excess += 1 if bits[q - 1] else -1
            if excess <= target:
                return q

    def bwd_le(self, p: int, target: int) -> Optional[int]:
        """Largest q < p (q >= 0) with excess(q) <= target."""
        if not 1 <= p <= self.length:
            raise RangeError("position out of range", {"p": p, "len": self.length})
        bits = self.parens.bits
        excess = self.excess(p)
        start = self._block_of(p) * self.block_bits + 1
        # excess(q) for q = p - 1 down to start
        for q in range(p - 1, start - 1, -1):
            excess -= 1 if bits[q] else -1
            if excess <= target:
                return q

        b = self._last_block(self._block_of(start) - 1, target) if start > 1 else -1
        if b != -1:
            q = (b + 1) * self.block_bits
            excess = self.excess(q)
            block_start = b * self.block_bits + 1
            while q >= block_start:
                if excess <= target:
                    return q
                excess -= 1 if bits[q - 1] else -1
                q -= 1
        return 0 if target >= 0 else None

    def find_close(self, p: int) -> int:
        """Matching ')' of the '(' at p."""
        q = self.fwd_le(p, self.excess(p) - 1)
        if q is None:
            raise RangeError("unbalanced parentheses", {"p": p})
        return q

    def find_open(self, q: int) -> int:
        """Matching '(' of the ')' at q."""
        r = self.bwd_le(q, self.excess(q))
        if r is None:
            raise RangeError("unbalanced parentheses", {"q": q})
        return r + 1

    def bit_cost(self) -> int:
        word = max(1, self.length.bit_length()) + 1
        return len(self._tree) * word + self._rank.bit_cost()
