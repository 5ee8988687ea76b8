"""
lzse - Factor stream codec

Serializes a factorization as a fixed big-endian header followed by one
record per factor, and decodes such a stream back to the original symbols.

Header: magic "LZSE", version, algorithm byte, epsilon numerator and
denominator (2 bytes each), n and z (8 bytes each).

Records:
    LZ77           flag byte 0, symbol          (free letter)
                   flag byte 1, position, length (reference)
    classic LZ77   as LZ77, references carry the fresh symbol after the length
    LZ78           referred index, symbol

Numbers are unsigned LEB128 varints. A symbol is stored as symbol + 1 so that
0 can stand for the sentinel.
"""

import struct
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

from pydantic import ValidationError

from lzse.src.factorizers.lz77 import Lz77Factorization
from lzse.src.factorizers.lz78 import Lz78Factorization
from lzse.src.models.schemas import Algorithm, CodecHeader
from lzse.src.structures.suffix import SENTINEL
from lzse.src.utils.config import CodecSettings
from lzse.src.utils.errors import CodecError
from lzse.src.utils.logging import log_error_with_context, logger

HEADER = struct.Struct(">4sBBHHQQ")
MAGIC = b"LZSE"
VERSION = 1

Factorization = Union[Lz77Factorization, Lz78Factorization]


def encode_varint(value: int) -> bytes:
    if value < 0:
        raise CodecError("varints are unsigned", {"value": value})
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def decode_varint(data: bytes, pos: int) -> Tuple[int, int]:
    """Value and the position after it."""
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise CodecError("truncated varint", {"offset": pos})
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def symbol_code(symbol: int) -> int:
    return 0 if symbol == SENTINEL else symbol + 1


def code_symbol(code: int) -> int:
    return SENTINEL if code == 0 else code - 1


def pack_header(header: CodecHeader) -> bytes:
    return HEADER.pack(
        header.magic, header.version, header.algorithm.code,
        header.eps_num, header.eps_den, header.n, header.z,
    )


def unpack_header(data: bytes) -> CodecHeader:
    if len(data) < HEADER.size:
        raise CodecError("stream shorter than its header", {"length": len(data)})
    magic, version, algo, eps_num, eps_den, n, z = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CodecError("bad magic", {"magic": magic.hex()})
    if version != VERSION:
        raise CodecError("unsupported stream version", {"version": version})
    try:
        algorithm = Algorithm.from_code(algo)
        return CodecHeader(magic=magic, version=version, algorithm=algorithm,
                           eps_num=eps_num, eps_den=eps_den, n=n, z=z)
    except ValueError as e:
        raise CodecError("invalid stream header", {"reason": str(e)}) from e


class CodecService:
    """Factor stream encoder and decoder."""

    def __init__(self, settings: CodecSettings):
        self.settings = settings
        logger.debug("Codec service initialized", u32=settings.u32)

    def encode(
        self,
        factorization: Factorization,
        algorithm: Algorithm,
        epsilon: Fraction,
    ) -> bytes:
        records = [self._record(f, algorithm) for f in factorization.factors()]

        try:
            header = CodecHeader(
                algorithm=algorithm,
                eps_num=epsilon.numerator,
                eps_den=epsilon.denominator,
                n=factorization.n,
                z=len(records),
            )
        except ValidationError as e:
            raise CodecError("factorization does not fit the stream header", {"epsilon": str(epsilon)}) from e
        stream = pack_header(header) + b"".join(records)
        logger.debug(
            "Factor stream encoded",
            algorithm=algorithm.value,
            n=header.n,
            z=header.z,
            stream_bytes=len(stream),
        )
        return stream

    @staticmethod
    def _record(f, algorithm: Algorithm) -> bytes:
        if algorithm is Algorithm.LZ78:
            return encode_varint(f.ref) + encode_varint(symbol_code(f.symbol))
        if f.ref is None:
            return b"\x00" + encode_varint(symbol_code(f.symbol))
        record = b"\x01" + encode_varint(f.ref) + encode_varint(f.length)
        if algorithm is Algorithm.LZ77_CLASSIC:
            record += encode_varint(symbol_code(f.symbol))
        return record

    def decode(self, data: bytes, strip_sentinel: Optional[bool] = None) -> Tuple[CodecHeader, List[int]]:
        """
        Header and the decoded symbols.

        The trailing sentinel is dropped when strip_sentinel is set, falling
        back to the codec settings.
        """
        if strip_sentinel is None:
            strip_sentinel = self.settings.strip_sentinel
        header = unpack_header(data)
        pos = HEADER.size
        if header.algorithm is Algorithm.LZ78:
            out, pos = self._decode_lz78(data, pos, header.z, header.n)
        else:
            out, pos = self._decode_lz77(
                data, pos, header.z, header.n, header.algorithm is Algorithm.LZ77_CLASSIC
            )

        if pos != len(data):
            raise CodecError("trailing bytes after the last record", {"offset": pos, "length": len(data)})
        if len(out) != header.n:
            raise CodecError("decoded length differs from the header", {"decoded": len(out), "n": header.n})
        if out[-1] != SENTINEL:
            raise CodecError("stream does not end with the sentinel")
        if SENTINEL in out[:-1]:
            raise CodecError("sentinel inside the text", {"offset": out.index(SENTINEL) + 1})
        if strip_sentinel:
            out.pop()
        return header, out

    @staticmethod
    def _decode_lz77(data: bytes, pos: int, z: int, n: int, classic: bool) -> Tuple[List[int], int]:
        out: List[int] = []
        for x in range(1, z + 1):
            if pos >= len(data):
                raise CodecError("stream ends before the last record", {"record": x})
            flag = data[pos]
            pos += 1
            if flag == 0:
                code, pos = decode_varint(data, pos)
                out.append(code_symbol(code))
                continue
            if flag != 1:
                raise CodecError("unknown record flag", {"record": x, "flag": flag})
            ref, pos = decode_varint(data, pos)
            length, pos = decode_varint(data, pos)
            copied = length - 1 if classic else length
            if not 1 <= ref <= len(out) or copied < 1 or len(out) + length > n:
                raise CodecError("reference out of range", {"record": x, "ref": ref, "length": length})
            for i in range(copied):
                out.append(out[ref - 1 + i])
            if classic:
                code, pos = decode_varint(data, pos)
                out.append(code_symbol(code))
        return out, pos

    @staticmethod
    def _decode_lz78(data: bytes, pos: int, z: int, n: int) -> Tuple[List[int], int]:
        out: List[int] = []
        spans: List[Tuple[int, int]] = [(0, 0)]
        for x in range(1, z + 1):
            ref, pos = decode_varint(data, pos)
            code, pos = decode_varint(data, pos)
            if ref >= x:
                raise CodecError("reference out of range", {"record": x, "ref": ref})
            start, length = spans[ref]
            if len(out) + length + 1 > n:
                raise CodecError("factor runs past the text length", {"record": x, "n": n})
            begin = len(out)
            out.extend(out[start:start + length])
            out.append(code_symbol(code))
            spans.append((begin, length + 1))
        return out, pos

    def symbols_to_bytes(self, symbols: Iterable[int]) -> bytes:
        """The sentinel, when kept, is written as a zero symbol."""
        symbols = [0 if s == SENTINEL else s for s in symbols]
        if self.settings.u32:
            return b"".join(s.to_bytes(4, "big") for s in symbols)
        try:
            return bytes(symbols)
        except ValueError as e:
            log_error_with_context("codec", "symbol does not fit a byte; decode with u32", {"error": str(e)})
            raise CodecError("symbol does not fit a byte; use u32 mode") from e
