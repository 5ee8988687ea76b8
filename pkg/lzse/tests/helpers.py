"""Constants and generators shared by the test modules."""

import random
from fractions import Fraction
from typing import Iterator, List

RUNNING_EXAMPLE = "aaabaabaaabaa"

EPSILONS = [Fraction(1, 8), Fraction(1, 2), Fraction(1)]


def binary_strings(max_length: int) -> Iterator[str]:
    """Every string over {a, b} of length 1..max_length."""
    for length in range(1, max_length + 1):
        for mask in range(1 << length):
            yield "".join("b" if mask >> i & 1 else "a" for i in range(length))


def random_symbols(rng: random.Random, length: int, sigma: int) -> List[int]:
    return [rng.randrange(sigma) for _ in range(length)]


def de_bruijn(order: int) -> str:
    """Binary de Bruijn sequence over {a, b}: every word of length order appears once cyclically."""
    word = [0] * (order + 1)
    out: List[int] = []

    def extend(t: int, p: int) -> None:
        if t > order:
            if order % p == 0:
                out.extend(word[1:p + 1])
            return
        word[t] = word[t - p]
        extend(t + 1, p)
        for symbol in range(word[t - p] + 1, 2):
            word[t] = symbol
            extend(t + 1, t)

    extend(1, 1)
    return "".join("ab"[s] for s in out)
