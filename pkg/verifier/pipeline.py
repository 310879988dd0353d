"""Construction pipelines: operand DFAs in, minimal result DFA out."""

import logging
from typing import Callable, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from automata.bounds import OperationId, Recipe
from automata.constructions import (
    BooleanOp,
    concat_nfa,
    dfa_to_nfa,
    product_dfa,
    reverse_nfa,
    star_eps_nfa,
    star_nfa,
    union_nfa,
)
from automata.core import Dfa, EpsNfa, complement
from automata.determinize import SubsetDfa, determinize, minimize
from automata.witnesses import build

logger = logging.getLogger(__name__)


class PipelineResult(BaseModel):
    """The minimal result plus the last subset construction, kept for audits."""

    model_config = ConfigDict(frozen=True)

    minimal: Dfa
    audit: Optional[SubsetDfa] = None


class _Run:
    """Carries the minimizer choice and cap through one pipeline and remembers its last subset DFA."""

    def __init__(self, minimizer: str, cap: Optional[int]):
        self.minimizer = minimizer
        self.cap = cap
        self.audit: Optional[SubsetDfa] = None

    def det_min(self, nfa: EpsNfa) -> Dfa:
        subsets = determinize(nfa, cap=self.cap)
        self.audit = subsets
        return minimize(subsets.base, self.minimizer)

    def minimize(self, d: Dfa) -> Dfa:
        return minimize(d, self.minimizer)

    def starred(self, d: Dfa) -> Dfa:
        return self.det_min(star_nfa(d))

    def restarted(self, d: Dfa) -> Dfa:
        """Star NFA of W_{0},m: ε-edges leave the last state, acceptance stays at the initial one."""
        return self.det_min(star_nfa(d, restart_from={d.size - 1}))


_Pipeline = Callable[[_Run, Optional[Dfa], Dfa], Dfa]

U, I, D, X = (
    BooleanOp.UNION,
    BooleanOp.INTERSECTION,
    BooleanOp.DIFFERENCE,
    BooleanOp.SYMMETRIC_DIFFERENCE,
)


def _boolean(op: BooleanOp) -> _Pipeline:
    return lambda run, k, l: run.minimize(product_dfa(k, l, op))


def _with_star(op: BooleanOp) -> _Pipeline:
    return lambda run, k, l: run.minimize(product_dfa(k, run.starred(l), op))


def _both_starred(op: BooleanOp) -> _Pipeline:
    return lambda run, k, l: run.minimize(product_dfa(run.starred(k), run.starred(l), op))


def _restarted_with_star(op: BooleanOp) -> _Pipeline:
    return lambda run, k, l: run.minimize(product_dfa(run.restarted(k), run.starred(l), op))


def _star_of(op: BooleanOp) -> _Pipeline:
    return lambda run, k, l: run.starred(run.minimize(product_dfa(k, l, op)))


PIPELINES: Dict[OperationId, _Pipeline] = {
    OperationId.STAR: lambda run, k, l: run.starred(l),
    OperationId.REVERSAL: lambda run, k, l: run.det_min(reverse_nfa(l)),
    OperationId.PRODUCT: lambda run, k, l: run.det_min(concat_nfa(dfa_to_nfa(k), dfa_to_nfa(l))),
    OperationId.BOOL_UNION: _boolean(U),
    OperationId.BOOL_INTERSECTION: _boolean(I),
    OperationId.BOOL_DIFFERENCE: _boolean(D),
    OperationId.BOOL_SYMDIFF: _boolean(X),
    OperationId.K_UNION_LSTAR: _with_star(U),
    OperationId.K_INTER_LSTAR: _with_star(I),
    OperationId.K_SYMDIFF_LSTAR: _with_star(X),
    OperationId.K_MINUS_LSTAR: _with_star(D),
    OperationId.LSTAR_MINUS_K: lambda run, k, l: run.minimize(product_dfa(run.starred(l), k, D)),
    OperationId.KSTAR_UNION_LSTAR: _both_starred(U),
    OperationId.KSTAR_INTER_LSTAR: _both_starred(I),
    OperationId.KSTAR_MINUS_LSTAR: _restarted_with_star(D),
    OperationId.KSTAR_SYMDIFF_LSTAR: _restarted_with_star(X),
    OperationId.K_LSTAR: lambda run, k, l: run.det_min(concat_nfa(dfa_to_nfa(k), star_nfa(l))),
    OperationId.KSTAR_L: lambda run, k, l: run.det_min(concat_nfa(star_nfa(k), dfa_to_nfa(l))),
    OperationId.KSTAR_LSTAR: lambda run, k, l: run.det_min(concat_nfa(star_nfa(k), star_nfa(l))),
    OperationId.KL_STAR: lambda run, k, l: run.det_min(star_eps_nfa(concat_nfa(dfa_to_nfa(k), dfa_to_nfa(l)))),
    OperationId.UNION_STAR: lambda run, k, l: run.det_min(star_eps_nfa(union_nfa(dfa_to_nfa(k), dfa_to_nfa(l)))),
    OperationId.INTER_STAR: _star_of(I),
    OperationId.MINUS_STAR: _star_of(D),
    OperationId.SYMDIFF_STAR: _star_of(X),
}


def operands(r: Recipe) -> Tuple[Optional[Dfa], Dfa]:
    left = build(r.left) if r.left is not None else None
    right = build(r.right)
    if r.complement_right:
        right = complement(right)
    return left, right


def run_pipeline(r: Recipe, minimizer: str = "hopcroft", cap: Optional[int] = None) -> PipelineResult:
    left, right = operands(r)
    run = _Run(minimizer, cap)
    minimal = PIPELINES[r.op](run, left, right)
    logger.debug(f"{r.op.label} on {r.witness_names}: {minimal.size} states")
    return PipelineResult(minimal=minimal, audit=run.audit)
