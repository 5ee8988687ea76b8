"""
Shared preparation for both factorizers: SA in A_1, LCP, RMQ and the tree.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from lzse.src.models.schemas import LemmaCheck
from lzse.src.structures.sst import SuccinctSuffixTree, build_tree
from lzse.src.structures.suffix import (
    LcpArray,
    RmqIndex,
    SuffixWorkspace,
    TextBuffer,
    build_lcp,
    build_rmq,
    build_suffix_array,
)
from lzse.src.utils.config import StructureSettings
from lzse.src.utils.errors import InvalidInputError
from lzse.src.utils.logging import log_lemma_check


@dataclass
class FactorizationContext:
    text: TextBuffer
    ws: SuffixWorkspace
    lcp: LcpArray
    rmq: RmqIndex
    tree: SuccinctSuffixTree
    structures: StructureSettings
    timings_ms: Dict[str, float] = field(default_factory=dict)

    def timed(self, name: str, started: float) -> float:
        elapsed = (time.perf_counter() - started) * 1000
        self.timings_ms[name] = self.timings_ms.get(name, 0.0) + elapsed
        return elapsed


def prepare_context(
    text: TextBuffer,
    epsilon: Fraction,
    structures: Optional[StructureSettings] = None,
) -> FactorizationContext:
    """Build SA (phase SA), LCP, RMQ and the suffix-tree topology for text."""
    if text.user_length == 0:
        raise InvalidInputError("cannot factorize an empty text")
    structures = structures or StructureSettings()

    timings: Dict[str, float] = {}
    ws = SuffixWorkspace(text.n, epsilon)

    started = time.perf_counter()
    build_suffix_array(text, ws)
    timings["suffix_array"] = (time.perf_counter() - started) * 1000

    started = time.perf_counter()
    lcp = build_lcp(text, ws.a1, ws)
    timings["lcp"] = (time.perf_counter() - started) * 1000

    started = time.perf_counter()
    rmq = build_rmq(lcp, structures.rmq_block_size)
    tree = build_tree(ws.a1, lcp, rmq, structures.excess_block_bits, structures.directory)
    timings["tree"] = (time.perf_counter() - started) * 1000

    return FactorizationContext(text, ws, lcp, rmq, tree, structures, timings)


def bound_check(name: str, lhs: float, rhs: float, detail: str = "", equal: bool = False) -> LemmaCheck:
    """lhs <= rhs (or lhs == rhs), logged and returned as a LemmaCheck."""
    holds = lhs == rhs if equal else lhs <= rhs
    log_lemma_check(name, holds, lhs=lhs, rhs=rhs)
    return LemmaCheck(name=name, holds=holds, lhs=lhs, rhs=rhs, detail=detail)
