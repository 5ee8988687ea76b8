"""
Audit service for factorization runs.

Collects factor counts, arena accounting, per-structure bit costs, phase
timings and the audited size bounds of a finished run into an AuditReport.
"""

from typing import Dict, List, Union

from lzse.src.factorizers.context import bound_check
from lzse.src.factorizers.lz77 import Lz77Run, audit_lz77
from lzse.src.factorizers.lz78 import Lz78Run, audit_lz78
from lzse.src.models.schemas import Algorithm, AuditReport, LemmaCheck
from lzse.src.utils.logging import logger

Run = Union[Lz77Run, Lz78Run]

# Bit vectors and marker vectors; packed tables and the LCP cells are reported but not summed here.
BIT_VECTOR_KEYS = frozenset({
    "b_f", "b_r", "b_d", "m_vr", "marks", "skip", "sample_marker",
    "tree", "leaf_flags", "m_vxi", "m_vdelta", "seen",
})
BIT_VECTOR_FACTOR = 40
# Fixed directory words per vector; they dominate only for tiny n.
BIT_VECTOR_SLACK = 64


class AuditService:
    """Space and bound accounting for finished runs."""

    def __init__(self):
        self.logger = logger

    def structure_bits(self, run: Run) -> Dict[str, int]:
        ctx = run.context
        bits = dict(run.structure_bits)
        bits["tree"] = ctx.tree.bit_cost()
        bits["lcp"] = ctx.lcp.bit_cost()
        bits["lcp_rmq"] = ctx.rmq.bit_cost()
        return bits

    def counts(self, run: Run) -> Dict[str, int]:
        f = run.factorization
        tree = run.context.tree
        counts = {"nodes": tree.node_count}
        if isinstance(run, Lz77Run):
            counts.update({
                "z_r": f.z_r,
                "v_r": run.state.m_vr.count,
                "v_r1": run.state.shallow_referred,
                "parent_steps": sum(run.state.parent_steps),
                "inverse_steps": run.inverse_steps,
            })
            if run.b_d is not None:
                counts.update({"d": run.d_size, "sparse_isa": run.survivors, "passes": run.passes})
        else:
            counts.update({
                "v_xi": run.m_vxi.count,
                "delta": run.counters.delta,
                "delta_edges": run.counters.delta_edges,
            })
        return counts

    def arena_checks(self, run: Run, bits: Dict[str, int]) -> List[LemmaCheck]:
        ws = run.context.ws
        vectors = {key: value for key, value in bits.items() if key in BIT_VECTOR_KEYS}
        vector_bits = sum(vectors.values())
        return [
            bound_check("arena_is_exact_budget", ws.arena_bits(), ws.arena_budget_bits(), equal=True),
            bound_check(
                "bit_vectors_within_40n",
                vector_bits,
                BIT_VECTOR_FACTOR * ws.n + BIT_VECTOR_SLACK * len(vectors),
                f"c={vector_bits / ws.n:.2f}",
            ),
        ]

    def report(self, run: Run, algorithm: Algorithm) -> AuditReport:
        """Full report; the bound checks come from the factorizer's own audit."""
        ws = run.context.ws
        bits = self.structure_bits(run)
        checks = audit_lz77(run) if isinstance(run, Lz77Run) else audit_lz78(run)
        checks.extend(self.arena_checks(run, bits))

        report = AuditReport(
            algorithm=algorithm,
            n=ws.n,
            epsilon=f"{ws.epsilon.numerator}/{ws.epsilon.denominator}",
            z=run.factorization.z,
            counts=self.counts(run),
            arena_bits=ws.arena_bits(),
            arena_budget_bits=ws.arena_budget_bits(),
            structure_bits=bits,
            timings_ms=dict(run.context.timings_ms),
            checks=checks,
        )
        failed = [check.name for check in checks if not check.holds]
        if failed:
            self.logger.warning("Audit found violated bounds", algorithm=algorithm.value, failed=failed)
        else:
            self.logger.info("Audit passed", algorithm=algorithm.value, n=ws.n, checks=len(checks))
        return report
