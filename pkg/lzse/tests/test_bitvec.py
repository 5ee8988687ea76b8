"""Tests for bit vectors, packed cells and the parentheses excess index."""

import random

import pytest

from lzse.src.structures.bitvec import DEFAULT_DIRECTORY, BitVector, RankDirectory, build_index
from lzse.src.structures.packed import PackedIntArray, cell_width
from lzse.src.structures.parentheses import ExcessIndex
from lzse.src.utils.errors import InvalidInputError, RangeError, StateError

RUNNING_B_D = "01001011011111011111"


def naive_rank(bits: str, i: int) -> int:
    return bits[:i].count("1")


def naive_select(bits: str, k: int, value: str) -> int:
    seen = 0
    for pos, bit in enumerate(bits, start=1):
        if bit == value:
            seen += 1
            if seen == k:
                return pos
    raise AssertionError("k out of range")


def test_running_b_d_counts():
    b = BitVector(RUNNING_B_D)
    build_index(b)
    assert b.rank1(20) == 14
    assert b.select1(2) == 5
    assert b.rank0(5) == 3


def test_traversal_block_bounds_from_b_d():
    """Start and end of the D entries of traversal j = 2."""
    b = BitVector(RUNNING_B_D)
    build_index(b)
    j = 2
    j_b = b.rank0(b.select1(j - 1)) + 1
    j_e = b.rank0(b.select1(j))
    assert (j_b, j_e) == (2, 3)


def test_all_zero_vector():
    b = BitVector(8)
    build_index(b)
    assert b.rank1(8) == 0
    assert b.rank0(8) == 8
    assert b.select0(8) == 8


def test_small_vectors():
    b = BitVector("10101")
    build_index(b)
    assert b.select1(2) == 3

    single = BitVector("1")
    build_index(single)
    assert single.rank1(1) == 1
    assert single.select1(1) == 1

    c = BitVector("0011")
    build_index(c)
    assert c.select0(2) == 2
    assert c.rank1(4) == 2


def test_rank_zero_is_accepted():
    b = BitVector("11")
    build_index(b)
    assert b.rank1(0) == 0


def test_empty_vector_is_rejected():
    with pytest.raises(InvalidInputError):
        build_index(BitVector())


def test_out_of_range_queries():
    b = BitVector("0110")
    build_index(b)
    with pytest.raises(RangeError):
        b.rank1(5)
    with pytest.raises(RangeError):
        b.select1(3)
    with pytest.raises(RangeError):
        b.select0(0)
    with pytest.raises(RangeError):
        b[0]


def test_vector_freezes_once_indexed():
    b = BitVector(4)
    b.set(2)
    build_index(b)
    with pytest.raises(StateError):
        b.set(3)
    with pytest.raises(StateError):
        b.append(1)


def test_unindexed_queries_fail():
    with pytest.raises(StateError):
        BitVector("1").rank1(1)


def test_directory_sizes_must_nest():
    with pytest.raises(InvalidInputError):
        RankDirectory(100, 64)


def test_index_keeps_its_own_block_sizes():
    b = BitVector("1011" * 10)
    build_index(b, RankDirectory(8, 4))
    assert (b.index.superblock_bits, b.index.block_bits) == (8, 4)
    c = BitVector("1011")
    build_index(c)
    assert (c.index.superblock_bits, c.index.block_bits) == \
        (DEFAULT_DIRECTORY.superblock_bits, DEFAULT_DIRECTORY.block_bits)


@pytest.mark.parametrize("superblock_bits,block_bits", [(512, 64), (8, 4), (4, 1)])
def test_rank_select_match_scan(superblock_bits, block_bits):
    rng = random.Random(superblock_bits * 31 + block_bits)
    for _ in range(200):
        length = rng.randint(1, 700)
        bits = "".join(rng.choice("01") for _ in range(length))
        b = BitVector(bits)
        b.build_index(RankDirectory(superblock_bits, block_bits))
        prefix = [0]
        for bit in bits:
            prefix.append(prefix[-1] + (bit == "1"))
        ones_at = [p for p, bit in enumerate(bits, start=1) if bit == "1"]
        zeros_at = [p for p, bit in enumerate(bits, start=1) if bit == "0"]
        for i in range(length + 1):
            assert b.rank1(i) == prefix[i]
            assert b.rank0(i) + b.rank1(i) == i
        for k, pos in enumerate(ones_at, start=1):
            assert b.select1(k) == pos
            assert b[b.select1(k)] == 1
        for k, pos in enumerate(zeros_at, start=1):
            assert b.select0(k) == pos


@pytest.mark.slow
def test_rank_select_match_scan_large():
    rng = random.Random(7)
    for _ in range(10_000):
        length = rng.randint(1, 2048)
        bits = "".join(rng.choice("01") for _ in range(length))
        b = BitVector(bits)
        build_index(b)
        i = rng.randint(0, length)
        assert b.rank1(i) == naive_rank(bits, i)
        ones = bits.count("1")
        if ones:
            k = rng.randint(1, ones)
            assert b.select1(k) == naive_select(bits, k, "1")
        if ones < length:
            k = rng.randint(1, length - ones)
            assert b.select0(k) == naive_select(bits, k, "0")


def test_cell_width():
    assert cell_width(1) == 1
    assert cell_width(14) == 4
    assert cell_width(15) == 4
    assert cell_width(16) == 5


def test_packed_cells_hold_their_width():
    cells = PackedIntArray(5, cell_width(14))
    cells[1] = 14
    cells[5] = 7
    assert cells.to_list() == [14, 0, 0, 0, 7]
    assert cells.bit_cost() == 20
    with pytest.raises(RangeError):
        cells[2] = 16
    with pytest.raises(RangeError):
        cells[6]


def naive_match(parens: str, p: int) -> int:
    """Matching position of the parenthesis at p (1-based)."""
    depth = 0
    step = 1 if parens[p - 1] == "1" else -1
    q = p
    while True:
        depth += 1 if parens[q - 1] == "1" else -1
        if depth == 0:
            return q
        q += step


def random_balanced(rng: random.Random, pairs: int) -> str:
    out = []
    open_count = 0
    remaining = pairs
    while remaining or open_count:
        if remaining and (not open_count or rng.random() < 0.5):
            out.append("1")
            open_count += 1
            remaining -= 1
        else:
            out.append("0")
            open_count -= 1
    return "".join(out)


def test_find_close_and_open_small():
    index = ExcessIndex(BitVector("11101000"), block_bits=2)
    assert index.find_close(1) == 8
    assert index.find_close(3) == 4
    assert index.find_open(8) == 1
    assert index.find_open(6) == 5
    assert index.excess(3) == 3


@pytest.mark.parametrize("block_bits", [1, 3, 16, 128])
def test_excess_searches_match_scan(block_bits):
    rng = random.Random(block_bits)
    for _ in range(60):
        parens = random_balanced(rng, rng.randint(1, 120))
        index = ExcessIndex(BitVector(parens), block_bits)
        for p, bit in enumerate(parens, start=1):
            if bit == "1":
                assert index.find_close(p) == naive_match(parens, p)
            else:
                assert index.find_open(p) == naive_match(parens, p)
