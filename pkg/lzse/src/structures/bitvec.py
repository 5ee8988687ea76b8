"""
Plain bit vectors with rank and select support.

Positions are 1-based. rank1(i) counts the ones in B[1..i]; select1(k) returns
the position of the k-th one. rank(0) is accepted and returns 0 so that
formulas of the form rank(v - 1) need no special case at v = 1.

The directory is two-level: cumulative counts per superblock plus counts per
block relative to the enclosing superblock. Rank adds both and popcounts the
tail with bitarray. Select binary-searches the directory and finishes with a
scan inside one block.
"""

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from bitarray import bitarray

from lzse.src.utils.errors import InvalidInputError, RangeError, StateError

DEFAULT_SUPERBLOCK_BITS = 512
DEFAULT_BLOCK_BITS = 64


@dataclass(frozen=True)
class RankDirectory:
    """Block sizes of a rank/select directory."""
    superblock_bits: int = DEFAULT_SUPERBLOCK_BITS
    block_bits: int = DEFAULT_BLOCK_BITS

    def __post_init__(self) -> None:
        if self.block_bits < 1 or self.superblock_bits < 1 or self.superblock_bits % self.block_bits:
            raise InvalidInputError(
                "superblock size must be a positive multiple of the block size",
                {"superblock_bits": self.superblock_bits, "block_bits": self.block_bits},
            )


DEFAULT_DIRECTORY = RankDirectory()


class BitVector:
    """Mutable bit vector that freezes once an index is attached."""

    def __init__(self, source: Union[int, str, bitarray, Iterable[int]] = 0):
        if isinstance(source, int):
            self._bits = bitarray(source)
            self._bits.setall(0)
        elif isinstance(source, bitarray):
            self._bits = bitarray(source)
        elif isinstance(source, str):
            self._bits = bitarray(source)
        else:
            self._bits = bitarray([1 if bit else 0 for bit in source])
        self._index: Optional["RankSelectIndex"] = None

    @property
    def bits(self) -> bitarray:
        return self._bits

    @property
    def frozen(self) -> bool:
        return self._index is not None

    def __len__(self) -> int:
        return len(self._bits)

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= len(self._bits):
            raise RangeError("bit position out of range", {"i": i, "len": len(self._bits)})
        return self._bits[i - 1]

    def _check_mutable(self) -> None:
        if self._index is not None:
            raise StateError("bit vector is immutable after its index was built")

    def set(self, i: int, value: int = 1) -> None:
        self._check_mutable()
        if not 1 <= i <= len(self._bits):
            raise RangeError("bit position out of range", {"i": i, "len": len(self._bits)})
        self._bits[i - 1] = value

    def append(self, value: int) -> None:
        self._check_mutable()
        self._bits.append(value)

    def extend(self, values: Iterable[int]) -> None:
        self._check_mutable()
        self._bits.extend(values)

    def count(self, value: int = 1) -> int:
        return self._bits.count(value)

    def to01(self) -> str:
        return self._bits.to01()

    def build_index(self, directory: Optional[RankDirectory] = None) -> "RankSelectIndex":
        if self._index is None:
            self._index = RankSelectIndex(self, directory or DEFAULT_DIRECTORY)
        return self._index

    @property
    def index(self) -> "RankSelectIndex":
        if self._index is None:
            raise StateError("rank/select index not built")
        return self._index

    def rank1(self, i: int) -> int:
        return self.index.rank1(i)

    def rank0(self, i: int) -> int:
        return self.index.rank0(i)

    def select1(self, k: int) -> int:
        return self.index.select1(k)

    def select0(self, k: int) -> int:
        return self.index.select0(k)

    def bit_cost(self) -> int:
        cost = len(self._bits)
        if self._index is not None:
            cost += self._index.bit_cost()
        return cost

    def __repr__(self) -> str:
        return f"BitVector({self._bits.to01()!r})" if len(self._bits) <= 64 else f"BitVector(len={len(self._bits)})"


class RankSelectIndex:
    """Superblock/block count directory over a frozen BitVector."""

    def __init__(self, vector: BitVector, directory: RankDirectory = DEFAULT_DIRECTORY):
        if len(vector) == 0:
            raise InvalidInputError("cannot index an empty bit vector")
        superblock_bits, block_bits = directory.superblock_bits, directory.block_bits

        self._bits = vector.bits
        self.length = len(self._bits)
        self.superblock_bits = superblock_bits
        self.block_bits = block_bits

        # Entry k covers the prefix [0, k * size); one extra entry so that
        # rank(len) never indexes past the end.
        self._super = [0] * (self.length // superblock_bits + 1)
        self._block = [0] * (self.length // block_bits + 1)

        total = 0
        in_super = 0
        per_super = superblock_bits // block_bits
        for b in range(len(self._block)):
            if b % per_super == 0:
                self._super[b // per_super] = total
                in_super = 0
            self._block[b] = in_super
            start = b * block_bits
            ones = self._bits.count(1, start, min(start + block_bits, self.length))
            in_super += ones
            total += ones
        self.ones = total
        self.zeros = self.length - total

    def _check_position(self, i: int) -> None:
        if not 0 <= i <= self.length:
            raise RangeError("rank argument out of range", {"i": i, "len": self.length})

    def rank1(self, i: int) -> int:
        self._check_position(i)
        b = i // self.block_bits
        start = b * self.block_bits
        return self._super[i // self.superblock_bits] + self._block[b] + self._bits.count(1, start, i)

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def _ones_before_block(self, b: int) -> int:
        return self._super[b * self.block_bits // self.superblock_bits] + self._block[b]

    def _select(self, k: int, value: int) -> int:
        total = self.ones if value else self.zeros
        if not 1 <= k <= total:
            raise RangeError(f"select{value} argument out of range", {"k": k, "count": total})

        if value:
            before = self._ones_before_block
        else:
            def before(b: int) -> int:
                return b * self.block_bits - self._ones_before_block(b)

        # Last block whose preceding count is still below k.
        blocks = range(len(self._block))
        b = bisect_left(blocks, k, key=before) - 1
        remaining = k - before(b)
        pos = b * self.block_bits
        while True:
            pos = self._bits.index(value, pos)
            remaining -= 1
            if remaining == 0:
                return pos + 1
            pos += 1

    def select1(self, k: int) -> int:
        return self._select(k, 1)

    def select0(self, k: int) -> int:
        return self._select(k, 0)

    def bit_cost(self) -> int:
        """Directory bits: word-size superblock counts plus block counts sized to the superblock."""
        word = max(1, self.length.bit_length())
        return len(self._super) * word + len(self._block) * max(1, self.superblock_bits.bit_length())


def build_index(b: BitVector, directory: Optional[RankDirectory] = None) -> RankSelectIndex:
    """Attach a rank/select directory to b and freeze it."""
    if len(b) == 0:
        raise InvalidInputError("cannot index an empty bit vector")
    return b.build_index(directory)
