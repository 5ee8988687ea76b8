"""Tests for the factor stream codec."""

import random
from fractions import Fraction

import pytest

from lzse.src.factorizers.lz77 import factorize_lz77
from lzse.src.factorizers.lz78 import factorize_lz78
from lzse.src.models.schemas import Algorithm, CodecHeader
from lzse.src.services.codec_service import (
    HEADER,
    CodecService,
    decode_varint,
    encode_varint,
    pack_header,
    unpack_header,
)
from lzse.src.structures.suffix import SENTINEL, TextBuffer
from lzse.src.utils.config import CodecSettings
from lzse.src.utils.errors import CodecError
from lzse.tests.helpers import RUNNING_EXAMPLE, random_symbols

RUNNING_LZ77_STREAM = bytes.fromhex(
    "4c5a5345" "01" "01" "0001" "0008" "000000000000000e" "0000000000000006"
    "0062" "010102" "0063" "010205" "010304" "0000"
)


@pytest.fixture
def codec() -> CodecService:
    return CodecService(CodecSettings())


def factorize(algorithm: Algorithm, text: TextBuffer, epsilon: Fraction):
    if algorithm is Algorithm.LZ78:
        return factorize_lz78(text, epsilon)
    return factorize_lz77(text, epsilon, classic=algorithm is Algorithm.LZ77_CLASSIC)


def test_running_example_stream(codec, running_text):
    stream = codec.encode(factorize_lz77(running_text, Fraction(1, 8)), Algorithm.LZ77, Fraction(1, 8))
    assert stream == RUNNING_LZ77_STREAM
    header, symbols = codec.decode(stream)
    assert (header.n, header.z, header.eps_num, header.eps_den) == (14, 6, 1, 8)
    assert bytes(symbols) == RUNNING_EXAMPLE.encode()


def test_sentinel_record_is_always_written(codec, running_text):
    # The last LZ78 factor is "a$", not a lone sentinel.
    stream = codec.encode(factorize_lz78(running_text, Fraction(1)), Algorithm.LZ78, Fraction(1))
    assert unpack_header(stream).z == 7
    assert RUNNING_LZ77_STREAM.endswith(b"\x00\x00")


def test_decode_keeps_the_sentinel_on_request(codec):
    header, symbols = codec.decode(RUNNING_LZ77_STREAM, strip_sentinel=False)
    assert header.n == len(symbols) == 14
    assert symbols[-1] == SENTINEL
    assert codec.symbols_to_bytes(symbols) == RUNNING_EXAMPLE.encode() + b"\x00"
    assert bytes(codec.decode(RUNNING_LZ77_STREAM, strip_sentinel=True)[1]) == RUNNING_EXAMPLE.encode()


def test_settings_choose_whether_to_strip():
    keeping = CodecService(CodecSettings(strip_sentinel=False))
    assert keeping.decode(RUNNING_LZ77_STREAM)[1][-1] == SENTINEL
    wide = CodecService(CodecSettings(u32=True, strip_sentinel=False))
    assert wide.symbols_to_bytes(wide.decode(RUNNING_LZ77_STREAM)[1])[-4:] == bytes(4)


def test_stream_must_end_with_the_sentinel(codec):
    # Last record dropped, header shortened to match.
    header = pack_header(CodecHeader(algorithm=Algorithm.LZ77, eps_num=1, eps_den=8, n=13, z=5))
    with pytest.raises(CodecError):
        codec.decode(header + RUNNING_LZ77_STREAM[HEADER.size:-2])


def test_varints():
    assert encode_varint(0) == b"\x00"
    assert encode_varint(127) == b"\x7f"
    assert encode_varint(300) == b"\xac\x02"
    assert decode_varint(b"\xff\xac\x02", 1) == (300, 3)
    with pytest.raises(CodecError):
        encode_varint(-1)
    with pytest.raises(CodecError):
        decode_varint(b"\x80", 0)


@pytest.mark.parametrize("algorithm", list(Algorithm))
@pytest.mark.parametrize("text", ["a", "ab", "aaaaaaa", RUNNING_EXAMPLE, "mississippi"])
def test_streams_decode_to_their_input(codec, algorithm, text):
    t = TextBuffer.from_string(text)
    stream = codec.encode(factorize(algorithm, t, Fraction(1, 2)), algorithm, Fraction(1, 2))
    header, symbols = codec.decode(stream)
    assert header.algorithm is algorithm
    assert bytes(symbols) == text.encode()


def test_u32_symbols():
    rng = random.Random(5)
    codec = CodecService(CodecSettings(u32=True))
    symbols = random_symbols(rng, 60, 70000)
    data = b"".join(s.to_bytes(4, "big") for s in symbols)
    t = TextBuffer.from_u32(data)
    for algorithm in Algorithm:
        stream = codec.encode(factorize(algorithm, t, Fraction(1)), algorithm, Fraction(1))
        _, decoded = codec.decode(stream)
        assert codec.symbols_to_bytes(decoded) == data


def test_wide_symbols_need_u32(codec):
    with pytest.raises(CodecError):
        codec.symbols_to_bytes([300])


def test_header_validation():
    good = pack_header(CodecHeader(algorithm=Algorithm.LZ78, eps_num=1, eps_den=2, n=5, z=3))
    assert unpack_header(good).algorithm is Algorithm.LZ78
    with pytest.raises(CodecError):
        unpack_header(good[:10])
    with pytest.raises(CodecError):
        unpack_header(b"ZZZZ" + good[4:])
    with pytest.raises(CodecError):
        unpack_header(good[:4] + b"\x02" + good[5:])
    with pytest.raises(CodecError):
        unpack_header(good[:5] + b"\x09" + good[6:])


def test_epsilon_must_fit_the_header(codec, running_text):
    f = factorize_lz77(running_text, Fraction(1))
    with pytest.raises(CodecError):
        codec.encode(f, Algorithm.LZ77, Fraction(1, 70000))


@pytest.mark.parametrize("stream", [
    RUNNING_LZ77_STREAM + b"\x00",
    RUNNING_LZ77_STREAM[:-2],
    RUNNING_LZ77_STREAM[:HEADER.size] + b"\x02" + RUNNING_LZ77_STREAM[HEADER.size + 1:],
    # First reference points at position 2 before anything is decoded there.
    RUNNING_LZ77_STREAM[:HEADER.size + 3] + b"\x02" + RUNNING_LZ77_STREAM[HEADER.size + 4:],
    # Sentinel in place of the first letter.
    RUNNING_LZ77_STREAM[:HEADER.size + 1] + b"\x00" + RUNNING_LZ77_STREAM[HEADER.size + 2:],
])
def test_corrupt_lz77_streams(codec, stream):
    with pytest.raises(CodecError):
        codec.decode(stream)


def test_corrupt_lz78_reference(codec):
    header = pack_header(CodecHeader(algorithm=Algorithm.LZ78, eps_num=1, eps_den=1, n=3, z=2))
    with pytest.raises(CodecError):
        codec.decode(header + b"\x00\x62" + b"\x02\x00")
    assert codec.decode(header + b"\x00\x62" + b"\x01\x00")[1] == [ord("a"), ord("a")]
