"""
Membership oracle: decides membership straight from the operand DFAs, without
any NFA or subset construction, and compares against the pipeline's minimal DFA.
"""

import itertools
import logging
import random
from functools import lru_cache
from typing import Callable, Iterator, List, Optional

from pydantic import BaseModel

from automata.bounds import OperationId, recipe
from automata.constructions import BooleanOp
from automata.core import Dfa, run
from verifier.pipeline import operands, run_pipeline

logger = logging.getLogger(__name__)

Member = Callable[[str], bool]


class OracleReport(BaseModel):
    op: OperationId
    m: Optional[int]
    n: int
    words_tested: int
    max_length: int
    seed: Optional[int]
    exhaustive: bool
    disagreements: int
    sample: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.disagreements == 0


# ------------------------------
#      Semantic Evaluators
# ------------------------------


def language(d: Dfa) -> Member:
    return lru_cache(maxsize=None)(lambda w: run(d, w))


def star(inner: Member) -> Member:
    """w ∈ L* iff position len(w) is reachable from 0 by hops over non-empty words of L."""

    @lru_cache(maxsize=None)
    def member(w: str) -> bool:
        reach = [True] + [False] * len(w)
        for j in range(1, len(w) + 1):
            reach[j] = any(reach[i] and inner(w[i:j]) for i in range(j))
        return reach[-1]

    return member


def concat(left: Member, right: Member) -> Member:
    @lru_cache(maxsize=None)
    def member(w: str) -> bool:
        return any(left(w[:i]) and right(w[i:]) for i in range(len(w) + 1))

    return member


def restart_star(d: Dfa) -> Member:
    """
    Star of W_{0},m as its NFA reads it: restarts fire on reaching the last state,
    and the word must end back in the initial state. That is (W_m)* followed by W_{0},m.
    """
    cycle = language(d.model_copy(update={"finals": frozenset({d.size - 1})}))
    return concat(star(cycle), language(d))


def boolean(op: BooleanOp, left: Member, right: Member) -> Member:
    return lambda w: op.combine(left(w), right(w))


def reversal(inner: Member) -> Member:
    return lambda w: inner(w[::-1])


U, I, D, X = (
    BooleanOp.UNION,
    BooleanOp.INTERSECTION,
    BooleanOp.DIFFERENCE,
    BooleanOp.SYMMETRIC_DIFFERENCE,
)

_SEMANTICS = {
    OperationId.STAR: lambda k, l: star(l),
    OperationId.REVERSAL: lambda k, l: reversal(l),
    OperationId.PRODUCT: lambda k, l: concat(k, l),
    OperationId.BOOL_UNION: lambda k, l: boolean(U, k, l),
    OperationId.BOOL_INTERSECTION: lambda k, l: boolean(I, k, l),
    OperationId.BOOL_DIFFERENCE: lambda k, l: boolean(D, k, l),
    OperationId.BOOL_SYMDIFF: lambda k, l: boolean(X, k, l),
    OperationId.K_UNION_LSTAR: lambda k, l: boolean(U, k, star(l)),
    OperationId.K_INTER_LSTAR: lambda k, l: boolean(I, k, star(l)),
    OperationId.K_SYMDIFF_LSTAR: lambda k, l: boolean(X, k, star(l)),
    OperationId.K_MINUS_LSTAR: lambda k, l: boolean(D, k, star(l)),
    OperationId.LSTAR_MINUS_K: lambda k, l: boolean(D, star(l), k),
    OperationId.KSTAR_UNION_LSTAR: lambda k, l: boolean(U, star(k), star(l)),
    OperationId.KSTAR_INTER_LSTAR: lambda k, l: boolean(I, star(k), star(l)),
    OperationId.K_LSTAR: lambda k, l: concat(k, star(l)),
    OperationId.KSTAR_L: lambda k, l: concat(star(k), l),
    OperationId.KSTAR_LSTAR: lambda k, l: concat(star(k), star(l)),
    OperationId.KL_STAR: lambda k, l: star(concat(k, l)),
    OperationId.UNION_STAR: lambda k, l: star(boolean(U, k, l)),
    OperationId.INTER_STAR: lambda k, l: star(boolean(I, k, l)),
    OperationId.MINUS_STAR: lambda k, l: star(boolean(D, k, l)),
    OperationId.SYMDIFF_STAR: lambda k, l: star(boolean(X, k, l)),
}


_RESTARTED = {
    OperationId.KSTAR_MINUS_LSTAR: D,
    OperationId.KSTAR_SYMDIFF_LSTAR: X,
}


def semantic_member(op: OperationId, left: Optional[Dfa], right: Dfa) -> Member:
    op = OperationId(op)
    if op in _RESTARTED:
        return boolean(_RESTARTED[op], restart_star(left), star(language(right)))
    k = language(left) if left is not None else None
    return _SEMANTICS[op](k, language(right))


# ------------------------------
#           Word Samples
# ------------------------------


def all_words(alphabet: List[str], maxlen: int) -> Iterator[str]:
    for length in range(maxlen + 1):
        for letters in itertools.product(alphabet, repeat=length):
            yield "".join(letters)


def random_words(alphabet: List[str], count: int, maxlen: int, seed: int) -> Iterator[str]:
    """Uniform letters, lengths uniform in [0, maxlen]."""
    rng = random.Random(seed)
    for _ in range(count):
        length = rng.randint(0, maxlen)
        yield "".join(rng.choice(alphabet) for _ in range(length))


def membership_oracle(
    op: OperationId,
    m: int,
    n: int,
    count: int = 500,
    maxlen: int = 12,
    seed: Optional[int] = 7,
    exhaustive: bool = False,
    minimizer: str = "hopcroft",
    cap: Optional[int] = None,
) -> OracleReport:
    r = recipe(op, m, n, measuring=True)
    left, right = operands(r)
    expected = semantic_member(r.op, left, right)
    result = run_pipeline(r, minimizer=minimizer, cap=cap).minimal

    alphabet = list(right.alphabet)
    words = all_words(alphabet, maxlen) if exhaustive else random_words(alphabet, count, maxlen, seed)

    tested = 0
    disagreements = 0
    sample = None
    for w in words:
        tested += 1
        if run(result, w) != expected(w):
            disagreements += 1
            if sample is None:
                sample = w
                logger.error(f"oracle disagreement for {r.op.label} at ({m}, {n}) on word {w!r}")

    report = OracleReport(
        op=r.op,
        m=m if left is not None else None,
        n=n,
        words_tested=tested,
        max_length=maxlen,
        seed=None if exhaustive else seed,
        exhaustive=exhaustive,
        disagreements=disagreements,
        sample=sample,
    )
    logger.info(f"oracle {r.op.label} ({m}, {n}): {tested} words, {disagreements} disagreements")
    return report
