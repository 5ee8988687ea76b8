"""
Suffix array, inverse suffix array, LCP array and RMQ inside the arena.

The workspace owns two packed arrays: A_1 with n cells and A_2 with
max(1, floor(eps * n)) cells, each ceil(lg(n + 1)) bits wide. Phases
reinterpret the cells; nothing here reallocates them.

Text positions and suffix ranks are 1-based. The text carries a virtual
sentinel at position n that compares smaller than every user symbol.
"""

import time
from array import array
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, List, Optional, Protocol, Sequence

from bitarray import bitarray

from lzse.src.models.schemas import Phase
from lzse.src.structures.bitvec import BitVector, RankDirectory
from lzse.src.structures.packed import PackedIntArray, cell_width
from lzse.src.utils.errors import InvalidInputError, RangeError, StateError
from lzse.src.utils.logging import get_logger, log_phase

logger = get_logger(__name__)

SENTINEL = -1


class SaAccess(Protocol):
    """Anything answering SA[i] for 1 <= i <= n."""

    def __getitem__(self, i: int) -> int: ...


class TextBuffer:
    """Read-only text T[1..n] whose last symbol is the sentinel."""

    def __init__(self, symbols: Iterable[int]):
        self._symbols = array("L")
        try:
            self._symbols.extend(symbols)
        except OverflowError as e:
            raise InvalidInputError("symbols must be non-negative machine words") from e
        self.n = len(self._symbols) + 1
        self.sigma = len(set(self._symbols)) + 1

    @classmethod
    def from_bytes(cls, data: bytes) -> "TextBuffer":
        return cls(data)

    @classmethod
    def from_u32(cls, data: bytes) -> "TextBuffer":
        if len(data) % 4:
            raise InvalidInputError("u32 input length must be a multiple of 4", {"length": len(data)})
        return cls(int.from_bytes(data[i:i + 4], "big") for i in range(0, len(data), 4))

    @classmethod
    def from_string(cls, text: str) -> "TextBuffer":
        """Code points of text; a trailing '$' is taken as the sentinel and dropped."""
        if text.endswith("$"):
            text = text[:-1]
        if "$" in text:
            raise InvalidInputError("'$' is reserved for the sentinel", {"text": text})
        return cls(ord(ch) for ch in text)

    @property
    def user_length(self) -> int:
        return self.n - 1

    @property
    def symbols(self) -> Sequence[int]:
        """User symbols without the sentinel, 0-based."""
        return self._symbols

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if i == self.n:
            return SENTINEL
        if not 1 <= i < self.n:
            raise RangeError("text position out of range", {"i": i, "n": self.n})
        return self._symbols[i - 1]

    def substring(self, start: int, length: int) -> List[int]:
        return [self[i] for i in range(start, start + length)]

    def __repr__(self) -> str:
        preview = "".join(chr(s) if 32 <= s < 127 else "?" for s in self._symbols[:32])
        return f"TextBuffer({preview!r}$, n={self.n})"


def helper_cells(n: int, epsilon: Fraction) -> int:
    """Size of A_2: floor(eps * n), at least one cell."""
    return max(1, floor(epsilon * n))


class SuffixWorkspace:
    """The A_1/A_2 arena plus a tag naming what the cells currently hold."""

    def __init__(self, n: int, epsilon: Fraction):
        if n < 1:
            raise InvalidInputError("workspace needs n >= 1", {"n": n})
        epsilon = Fraction(epsilon)
        if not 0 < epsilon <= 1:
            raise InvalidInputError("epsilon must satisfy 0 < epsilon <= 1", {"epsilon": str(epsilon)})
        self.n = n
        self.epsilon = epsilon
        self.width = cell_width(n)
        self.a1 = PackedIntArray(n, self.width)
        self.a2 = PackedIntArray(helper_cells(n, epsilon), self.width)
        self.phase = Phase.EMPTY
        self._a2_owner: Optional[str] = None

    def require(self, *phases: Phase) -> None:
        if self.phase not in phases:
            raise StateError(
                "workspace in wrong phase",
                {"phase": self.phase.value, "expected": "|".join(p.value for p in phases)},
            )

    def advance(self, phase: Phase) -> None:
        logger.debug("Workspace phase change", previous=self.phase.value, phase=phase.value)
        self.phase = phase

    @property
    def a2_owner(self) -> Optional[str]:
        return self._a2_owner

    def claim_a2(self, owner: str) -> PackedIntArray:
        if self._a2_owner is not None:
            raise StateError("A_2 is occupied", {"owner": self._a2_owner, "requested_by": owner})
        self._a2_owner = owner
        self.a2.fill(0)
        return self.a2

    def release_a2(self) -> None:
        self._a2_owner = None

    def arena_bits(self) -> int:
        return self.a1.bit_cost() + self.a2.bit_cost()

    def arena_budget_bits(self) -> int:
        """(n + floor(eps n)) cells of ceil(lg(n + 1)) bits; A_2 never drops below one cell."""
        return (self.n + helper_cells(self.n, self.epsilon)) * self.width


# ---------------------------------------------------------------------------
# Induced sorting
# ---------------------------------------------------------------------------

_S = 1
_L = 0


def _classify(codes: Sequence[int]) -> bytearray:
    """Suffix types; the empty suffix at len(codes) is S."""
    kinds = bytearray(len(codes) + 1)
    kinds[-1] = _S
    if not codes:
        return kinds
    kinds[-2] = _L
    for i in range(len(codes) - 2, -1, -1):
        if codes[i] > codes[i + 1] or (codes[i] == codes[i + 1] and kinds[i + 1] == _L):
            kinds[i] = _L
        else:
            kinds[i] = _S
    return kinds


def _is_lms(i: int, kinds: bytearray) -> bool:
    return i > 0 and kinds[i] == _S and kinds[i - 1] == _L


def _lms_blocks_equal(codes: Sequence[int], kinds: bytearray, a: int, b: int) -> bool:
    if a == len(codes) or b == len(codes):
        return False
    k = 0
    while True:
        a_lms = _is_lms(a + k, kinds)
        b_lms = _is_lms(b + k, kinds)
        if k > 0 and a_lms and b_lms:
            return True
        if a_lms != b_lms or codes[a + k] != codes[b + k]:
            return False
        k += 1


def _bucket_bounds(codes: Sequence[int], alphabet: int, tails: bool) -> List[int]:
    sizes = [0] * alphabet
    for c in codes:
        sizes[c] += 1
    bounds = []
    offset = 1
    for size in sizes:
        if tails:
            offset += size
            bounds.append(offset - 1)
        else:
            bounds.append(offset)
            offset += size
    return bounds


def _induce(codes: Sequence[int], sa: List[int], kinds: bytearray, alphabet: int) -> None:
    heads = _bucket_bounds(codes, alphabet, tails=False)
    for i in range(len(sa)):
        j = sa[i] - 1
        if sa[i] == -1 or j < 0 or kinds[j] != _L:
            continue
        sa[heads[codes[j]]] = j
        heads[codes[j]] += 1

    tails = _bucket_bounds(codes, alphabet, tails=True)
    for i in range(len(sa) - 1, -1, -1):
        j = sa[i] - 1
        if j < 0 or kinds[j] != _S:
            continue
        sa[tails[codes[j]]] = j
        tails[codes[j]] -= 1


def induced_sort(codes: Sequence[int], alphabet: int) -> List[int]:
    """
    Suffix array of codes (values in 0..alphabet-1) by induced sorting.

    The result has len(codes) + 1 entries; entry 0 is the empty suffix.
    """
    kinds = _classify(codes)

    sa = [-1] * (len(codes) + 1)
    tails = _bucket_bounds(codes, alphabet, tails=True)
    for i in range(len(codes)):
        if _is_lms(i, kinds):
            sa[tails[codes[i]]] = i
            tails[codes[i]] -= 1
    sa[0] = len(codes)
    _induce(codes, sa, kinds, alphabet)

    # Name LMS substrings in sorted order and recurse on the reduced string.
    names = [-1] * (len(codes) + 1)
    name = 0
    names[sa[0]] = name
    previous = sa[0]
    for i in range(1, len(sa)):
        offset = sa[i]
        if not _is_lms(offset, kinds):
            continue
        if not _lms_blocks_equal(codes, kinds, previous, offset):
            name += 1
        previous = offset
        names[offset] = name

    reduced_offsets = [i for i, nm in enumerate(names) if nm != -1]
    reduced = [names[i] for i in reduced_offsets]
    reduced_alphabet = name + 1

    if reduced_alphabet == len(reduced):
        reduced_sa = [-1] * (len(reduced) + 1)
        reduced_sa[0] = len(reduced)
        for x, y in enumerate(reduced):
            reduced_sa[y + 1] = x
    else:
        reduced_sa = induced_sort(reduced, reduced_alphabet)

    sa = [-1] * (len(codes) + 1)
    tails = _bucket_bounds(codes, alphabet, tails=True)
    for i in range(len(reduced_sa) - 1, 1, -1):
        pos = reduced_offsets[reduced_sa[i]]
        sa[tails[codes[pos]]] = pos
        tails[codes[pos]] -= 1
    sa[0] = len(codes)
    _induce(codes, sa, kinds, alphabet)
    return sa


def build_suffix_array(t: TextBuffer, ws: SuffixWorkspace) -> None:
    """Write SA into A_1 (phase -> SA)."""
    if ws.n != t.n:
        raise StateError("workspace not sized for this text", {"workspace_n": ws.n, "text_n": t.n})
    ws.require(Phase.EMPTY)
    started = time.perf_counter()

    if t.n == 1:
        ws.a1[1] = 1
    else:
        ranks = {symbol: r for r, symbol in enumerate(sorted(set(t.symbols)))}
        codes = [ranks[s] for s in t.symbols]
        # Entry 0 is the empty user suffix, i.e. the sentinel suffix n.
        for i, offset in enumerate(induced_sort(codes, len(ranks)), start=1):
            ws.a1[i] = offset + 1

    ws.advance(Phase.SA)
    log_phase("suffix_array", (time.perf_counter() - started) * 1000, n=t.n, sigma=t.sigma)


def invert_in_place(ws: SuffixWorkspace) -> None:
    """Overwrite SA in A_1 by its inverse, one permutation cycle at a time (phase SA -> ISA)."""
    ws.require(Phase.SA)
    started = time.perf_counter()
    a1 = ws.a1
    visited = bitarray(ws.n)
    visited.setall(0)

    for start in range(1, ws.n + 1):
        if visited[start - 1]:
            continue
        prev = start
        cur = a1[start]
        while cur != start:
            nxt = a1[cur]
            a1[cur] = prev
            visited[cur - 1] = 1
            prev, cur = cur, nxt
        a1[start] = prev
        visited[start - 1] = 1

    ws.advance(Phase.ISA)
    log_phase("invert", (time.perf_counter() - started) * 1000, n=ws.n)


class SampledInverse:
    """
    SA access over the ISA resident in A_1.

    Every permutation cycle of length L >= t, t = ceil(1/eps), carries
    floor(L / t) samples spaced t apart. A sample stores the previous sample
    of its cycle in A_2, addressed by rank over an n-bit sample marker.
    SA[i] is the predecessor of i on its cycle: walk forward from i until the
    predecessor shows up, jumping back once when a sample is met. Gaps between
    samples are t except one gap below 2t per cycle, so an access takes at
    most 2t steps. With t = 1 every position is a sample whose back pointer
    is SA[i] itself, read in one step.
    """

    def __init__(
        self,
        perm: PackedIntArray,
        store: PackedIntArray,
        n: int,
        t: int,
        directory: Optional[RankDirectory] = None,
    ):
        self._perm = perm
        self._store = store
        self.n = n
        self.t = t
        self.directory = directory
        self.steps = 0
        self.samples = 0
        self._marker: Optional[BitVector] = None

    def build(self) -> "SampledInverse":
        n, t, perm = self.n, self.t, self._perm
        marker = BitVector(n)
        visited = bitarray(n)
        visited.setall(0)
        cycles = []

        for start in range(1, n + 1):
            if visited[start - 1]:
                continue
            length = 0
            cur = start
            while True:
                visited[cur - 1] = 1
                length += 1
                cur = perm[cur]
                if cur == start:
                    break
            if length >= t:
                cycles.append((start, length))
                cur = start
                for step in range((length // t) * t):
                    if step % t == 0:
                        marker.set(cur)
                    cur = perm[cur]

        index = marker.build_index(self.directory)
        self.samples = index.ones
        if self.samples > len(self._store):
            raise StateError("samples exceed A_2", {"samples": self.samples, "cells": len(self._store)})

        for start, length in cycles:
            first = None
            previous = None
            cur = start
            for _ in range(length):
                if marker[cur]:
                    if previous is not None:
                        self._store[index.rank1(cur)] = previous
                    else:
                        first = cur
                    previous = cur
                cur = perm[cur]
            self._store[index.rank1(first)] = previous

        self._marker = marker
        return self

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise RangeError("SA index out of range", {"i": i, "n": self.n})
        if self.t == 1:
            self.steps += 1
            return self._store[i]
        perm, marker = self._perm, self._marker
        j = i
        jumped = False
        while True:
            self.steps += 1
            nxt = perm[j]
            if nxt == i:
                return j
            if not jumped and marker[j]:
                j = self._store[marker.rank1(j)]
                jumped = True
                continue
            j = nxt

    def bit_cost(self) -> int:
        """Marker bits; the back pointers live in A_2 and count toward the arena."""
        return self._marker.bit_cost() if self._marker is not None else 0


def build_inverse_access(ws: SuffixWorkspace, directory: Optional[RankDirectory] = None) -> SampledInverse:
    """Sample the ISA cycles into A_2 so that SA[i] costs O(1/eps) steps."""
    ws.require(Phase.ISA)
    store = ws.claim_a2("sampled_inverse")
    started = time.perf_counter()
    t = ceil(1 / ws.epsilon)
    inverse = SampledInverse(ws.a1, store, ws.n, t, directory).build()
    log_phase("sampled_inverse", (time.perf_counter() - started) * 1000, samples=inverse.samples, t=t)
    return inverse


class LcpArray:
    """LCP[i] for 2 <= i <= n in packed cells; LCP[1] reads as 0."""

    def __init__(self, cells: PackedIntArray):
        self._cells = cells
        self.n = len(cells)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        return self._cells[i]

    def to_list(self) -> List[int]:
        return self._cells.to_list()

    def bit_cost(self) -> int:
        return self._cells.bit_cost()


def build_lcp(t: TextBuffer, sa_access: SaAccess, ws: SuffixWorkspace) -> LcpArray:
    """
    LCP by the permuted-LCP method.

    The output cells first hold Phi[SA[i]] = SA[i - 1], are overwritten in
    text order by PLCP, then permuted into suffix-array order along the
    cycles of SA with an n-bit visited vector.
    """
    ws.require(Phase.SA, Phase.ISA)
    started = time.perf_counter()
    n = t.n
    cells = PackedIntArray(n, cell_width(n))

    for i in range(2, n + 1):
        cells[sa_access[i]] = sa_access[i - 1]

    # Suffix n (the sentinel) has no predecessor; its PLCP is 0.
    matched = 0
    for j in range(1, n):
        k = cells[j]
        while t[j + matched] == t[k + matched]:
            matched += 1
        cells[j] = matched
        matched = max(matched - 1, 0)
    cells[n] = 0

    visited = bitarray(n)
    visited.setall(0)
    for start in range(1, n + 1):
        if visited[start - 1]:
            continue
        saved = cells[start]
        i = start
        while True:
            visited[i - 1] = 1
            j = sa_access[i]
            if j == start:
                cells[i] = saved
                break
            cells[i] = cells[j]
            i = j

    log_phase("lcp", (time.perf_counter() - started) * 1000, n=n)
    return LcpArray(cells)


class RmqIndex:
    """
    Leftmost range minimum over values[first..n]: block minima plus a sparse
    table over them. Values are read through the sequence on every query, so
    the index can be rebound to another view of the same numbers.
    """

    def __init__(self, values: SaAccess, n: int, block_size: int = 32, first: int = 1):
        self.n = n
        self.first = first
        self.block_size = block_size
        self._values = values

        blocks = (self.n + block_size - 1) // block_size
        minima = []
        for b in range(blocks):
            lo = b * block_size + 1
            hi = min(lo + block_size - 1, self.n)
            minima.append(self._scan(lo, hi))

        self._table = [minima]
        span = 1
        while 2 * span <= blocks:
            prev = self._table[-1]
            row = []
            for b in range(blocks - 2 * span + 1):
                left, right = prev[b], prev[b + span]
                row.append(right if values[right] < values[left] else left)
            self._table.append(row)
            span *= 2

    def _scan(self, lo: int, hi: int) -> int:
        values = self._values
        best = lo
        for p in range(lo + 1, hi + 1):
            if values[p] < values[best]:
                best = p
        return best

    def _blocks_min(self, first: int, last: int) -> int:
        level = (last - first + 1).bit_length() - 1
        row = self._table[level]
        left, right = row[first], row[last - (1 << level) + 1]
        return right if self._values[right] < self._values[left] else left

    def query(self, i: int, j: int) -> int:
        if not self.first <= i <= j <= self.n:
            raise RangeError("rmq range out of bounds", {"i": i, "j": j, "n": self.n})
        bs = self.block_size
        bi, bj = (i - 1) // bs, (j - 1) // bs
        if bi == bj:
            return self._scan(i, j)

        best = self._scan(i, (bi + 1) * bs)
        candidates = []
        if bj - bi > 1:
            candidates.append(self._blocks_min(bi + 1, bj - 1))
        candidates.append(self._scan(bj * bs + 1, j))
        for c in candidates:
            if self._values[c] < self._values[best]:
                best = c
        return best

    @property
    def block_count(self) -> int:
        return len(self._table[0])

    def rebind(self, values: SaAccess) -> None:
        """Read the same numbers through another accessor."""
        self._values = values

    def bit_cost(self) -> int:
        width = cell_width(self.n)
        return sum(len(row) for row in self._table) * width


def build_rmq(lcp: LcpArray, block_size: int = 32) -> RmqIndex:
    started = time.perf_counter()
    index = RmqIndex(lcp, len(lcp), block_size, first=2)
    log_phase("rmq", (time.perf_counter() - started) * 1000, blocks=index.block_count)
    return index


def rmq(idx: RmqIndex, i: int, j: int) -> int:
    """Leftmost position of a minimum in LCP[i..j]."""
    return idx.query(i, j)

