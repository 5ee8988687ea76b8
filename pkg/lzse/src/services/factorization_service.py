"""
Factorization service.

Loads input texts, runs the succinct pipelines, and checks them against the
brute-force oracles. The CLI talks to the library only through this service.
"""

from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

from lzse.src.factorizers.context import prepare_context
from lzse.src.factorizers.lz77 import Lz77Factorization, Lz77Run, run_lz77, run_lz77_extra_output
from lzse.src.factorizers.lz78 import Lz78Factorization, Lz78Run, run_lz78
from lzse.src.models.schemas import Algorithm, FactorMismatch, OracleFactor, VerificationResult
from lzse.src.oracle.naive import easy_lz77, naive_lz77, naive_lz78, with_sentinel
from lzse.src.structures.suffix import TextBuffer
from lzse.src.utils.config import LzseSettings
from lzse.src.utils.errors import InvalidInputError
from lzse.src.utils.logging import log_error_with_context, logger

Run = Union[Lz77Run, Lz78Run]
Factorization = Union[Lz77Factorization, Lz78Factorization]

PIPELINES = ("three_round", "extra_output")


def to_oracle_factors(factorization: Factorization) -> List[OracleFactor]:
    """Pipeline factors in the oracle's record shape."""
    return [
        OracleFactor(start=f.start, length=f.length, ref=f.ref, literal=f.symbol)
        for f in factorization.factors()
    ]


def first_mismatch(expected: List[OracleFactor], actual: List[OracleFactor]) -> Optional[FactorMismatch]:
    for index in range(max(len(expected), len(actual))):
        want = expected[index] if index < len(expected) else None
        got = actual[index] if index < len(actual) else None
        if want != got:
            return FactorMismatch(index=index + 1, expected=want, actual=got)
    return None


class FactorizationService:
    """Runs factorizations and oracle comparisons with the configured structure sizes."""

    def __init__(self, settings: LzseSettings):
        self.settings = settings
        self.logger = logger

    def load_text(self, path: Path, u32: bool = False) -> TextBuffer:
        """Read a file as bytes or as big-endian 32-bit symbols."""
        data = Path(path).read_bytes()
        if not data:
            raise InvalidInputError("input file is empty", {"path": str(path)})
        text = TextBuffer.from_u32(data) if u32 else TextBuffer.from_bytes(data)
        self.logger.info("Input loaded", path=str(path), n=text.n, sigma=text.sigma, u32=u32)
        return text

    def run(
        self,
        text: TextBuffer,
        algorithm: Algorithm,
        epsilon: Fraction,
        pipeline: str = "three_round",
        keep_trail: bool = True,
    ) -> Run:
        """
        Factorize text.

        Args:
            text: Input text (the sentinel is implicit)
            algorithm: lz77, lz77c or lz78
            epsilon: Helper-arena fraction
            pipeline: "three_round" or, for LZ77, "extra_output"
            keep_trail: Keep the LZ78 witness trail needed by the audit

        Returns:
            The finished run with its context and intermediate figures
        """
        if pipeline not in PIPELINES:
            raise InvalidInputError("unknown pipeline", {"pipeline": pipeline})
        if pipeline == "extra_output" and algorithm is Algorithm.LZ78:
            raise InvalidInputError("the extra-output pipeline exists for LZ77 only")

        ctx = prepare_context(text, epsilon, self.settings.structures)
        if algorithm is Algorithm.LZ78:
            return run_lz78(ctx, keep_trail=keep_trail)
        classic = algorithm is Algorithm.LZ77_CLASSIC
        if pipeline == "extra_output":
            return run_lz77_extra_output(ctx, classic)
        return run_lz77(ctx, classic)

    def oracles(self, algorithm: Algorithm) -> Dict[str, Callable[[List[int]], List[OracleFactor]]]:
        if algorithm is Algorithm.LZ78:
            return {"naive_lz78": naive_lz78}
        classic = algorithm is Algorithm.LZ77_CLASSIC
        return {
            "naive_lz77": lambda t: naive_lz77(t, classic),
            "easy_lz77": lambda t: easy_lz77(t, classic),
        }

    def pipelines(self, algorithm: Algorithm) -> Tuple[str, ...]:
        return ("three_round",) if algorithm is Algorithm.LZ78 else PIPELINES

    def verify(
        self,
        text: TextBuffer,
        algorithm: Algorithm,
        epsilon: Fraction,
        inject_fault: bool = False,
    ) -> List[VerificationResult]:
        """
        Compare every pipeline for algorithm with every oracle.

        inject_fault corrupts the text the finished factorization reads its
        literals from; every comparison must then fail at factor 1.
        """
        reference = with_sentinel(text.symbols)
        expected = {name: oracle(reference) for name, oracle in self.oracles(algorithm).items()}

        results = []
        for pipeline in self.pipelines(algorithm):
            run = self.run(text, algorithm, epsilon, pipeline, keep_trail=False)
            if inject_fault:
                run.factorization.text = _corrupted(text)
            actual = to_oracle_factors(run.factorization)
            for oracle_name, factors in expected.items():
                mismatch = first_mismatch(factors, actual)
                results.append(VerificationResult(
                    algorithm=algorithm,
                    pipeline=pipeline,
                    oracle=oracle_name,
                    n=text.n,
                    z=len(actual),
                    matched=mismatch is None,
                    mismatch=mismatch,
                ))
                if mismatch is not None:
                    log_error_with_context(
                        "verification",
                        "pipeline and oracle disagree",
                        {"algorithm": algorithm.value, "pipeline": pipeline, "oracle": oracle_name,
                         "factor": mismatch.index},
                    )

        self.logger.info(
            "Verification finished",
            algorithm=algorithm.value,
            n=text.n,
            comparisons=len(results),
            matched=all(r.matched for r in results),
        )
        return results


def _corrupted(text: TextBuffer) -> TextBuffer:
    symbols = list(text.symbols)
    symbols[0] += 1
    return TextBuffer(symbols)
