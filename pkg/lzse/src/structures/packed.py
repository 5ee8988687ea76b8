"""Fixed-width integer cells packed into a bitarray, 1-based."""

from typing import Iterable, Iterator

from bitarray import bitarray
from bitarray.util import ba2int, int2ba

from lzse.src.utils.errors import RangeError


def cell_width(n: int) -> int:
    """ceil(lg(n + 1)) bits, enough to hold any value in 0..n."""
    return max(1, n.bit_length())


class PackedIntArray:
    """Array of `length` unsigned cells, each `width` bits wide."""

    def __init__(self, length: int, width: int):
        if length < 0 or width < 1:
            raise ValueError("length must be >= 0 and width >= 1")
        self.length = length
        self.width = width
        self._limit = 1 << width
        self._bits = bitarray(length * width)
        self._bits.setall(0)

    @classmethod
    def from_values(cls, values: Iterable[int], width: int) -> "PackedIntArray":
        values = list(values)
        array = cls(len(values), width)
        for i, value in enumerate(values, start=1):
            array[i] = value
        return array

    def __len__(self) -> int:
        return self.length

    def _offset(self, i: int) -> int:
        if not 1 <= i <= self.length:
            raise RangeError("cell index out of range", {"i": i, "len": self.length})
        return (i - 1) * self.width

    def __getitem__(self, i: int) -> int:
        start = self._offset(i)
        return ba2int(self._bits[start:start + self.width], signed=False)

    def __setitem__(self, i: int, value: int) -> None:
        start = self._offset(i)
        if not 0 <= value < self._limit:
            raise RangeError("value does not fit the cell width", {"value": value, "width": self.width})
        self._bits[start:start + self.width] = int2ba(value, length=self.width)

    def __iter__(self) -> Iterator[int]:
        for i in range(1, self.length + 1):
            yield self[i]

    def fill(self, value: int = 0) -> None:
        if value == 0:
            self._bits.setall(0)
            return
        for i in range(1, self.length + 1):
            self[i] = value

    def to_list(self, upto: int = -1) -> list:
        stop = self.length if upto < 0 else upto
        return [self[i] for i in range(1, stop + 1)]

    def bit_cost(self) -> int:
        return self.length * self.width
