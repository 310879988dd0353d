"""
Subset construction and minimization.

Subsets of NFA states are int bit masks; the hot path of the construction is one
table lookup per byte of the mask and letter.
"""

import logging
from collections import defaultdict, deque
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from automata.constructions import BooleanOp, product_dfa, reverse_nfa
from automata.core import Dfa, EpsNfa, Transformation

logger = logging.getLogger(__name__)

MINIMIZERS = ("hopcroft", "moore")


class SubsetCapExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"subset construction exceeded the cap of {cap} subsets")
        self.cap = cap


class SubsetDfa(BaseModel):
    """A determinized NFA: base[i] denotes the NFA state set encoded by masks[i]."""

    model_config = ConfigDict(frozen=True)

    base: Dfa
    masks: Tuple[int, ...]
    names: Tuple[str, ...]

    @property
    def subset_labels(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(_members(mask) for mask in self.masks)

    def label_text(self, state: int) -> str:
        return "{" + ",".join(self.names[p] for p in sorted(_members(self.masks[state]))) + "}"


def _members(mask: int) -> FrozenSet[int]:
    members = []
    bit = 0
    while mask:
        if mask & 1:
            members.append(bit)
        mask >>= 1
        bit += 1
    return frozenset(members)


def _mask(states) -> int:
    mask = 0
    for p in states:
        mask |= 1 << p
    return mask


# ------------------------------
#       Subset Construction
# ------------------------------


def _byte_tables(successors: Sequence[int]) -> List[List[int]]:
    """tables[c][b] is the union of successors[8c + i] over the bits i set in b."""
    padded = list(successors) + [0] * (-len(successors) % 8)
    tables = []
    for chunk in range(0, len(padded), 8):
        table = [0] * 256
        for b in range(1, 256):
            low = b & -b
            table[b] = table[b ^ low] | padded[chunk + low.bit_length() - 1]
        tables.append(table)
    return tables


def determinize(nfa: EpsNfa, cap: Optional[int] = None) -> SubsetDfa:
    """
    Breadth-first subset construction over ε-closed subsets. The empty subset,
    when reached, is kept as an explicit dead state so the result is complete.
    """
    closures = [_mask(nfa.closure({p})) for p in range(nfa.size)]
    tables = []
    for k in range(len(nfa.alphabet)):
        successors = []
        for p in range(nfa.size):
            target = 0
            for q in nfa.moves[p][k]:
                target |= closures[q]
            successors.append(target)
        tables.append(_byte_tables(successors))

    start = _mask(nfa.closure(nfa.initials))
    final_mask = _mask(nfa.finals)
    index: Dict[int, int] = {start: 0}
    masks: List[int] = [start]
    rows: List[List[int]] = [[] for _ in nfa.alphabet]

    i = 0
    while i < len(masks):
        subset = masks[i]
        for k, letter_tables in enumerate(tables):
            target = 0
            rest = subset
            chunk = 0
            while rest:
                target |= letter_tables[chunk][rest & 255]
                rest >>= 8
                chunk += 1
            j = index.get(target)
            if j is None:
                j = len(masks)
                if cap is not None and j >= cap:
                    logger.warning(f"subset construction stopped at {j} subsets (cap {cap})")
                    raise SubsetCapExceeded(cap)
                index[target] = j
                masks.append(target)
            rows[k].append(j)
        i += 1

    base = Dfa(
        size=len(masks),
        alphabet=nfa.alphabet,
        delta=tuple(Transformation(image=tuple(row)) for row in rows),
        initial=0,
        finals=frozenset(j for j, mask in enumerate(masks) if mask & final_mask),
    )
    names = nfa.names or tuple(str(p) for p in range(nfa.size))
    logger.debug(f"determinized {nfa.size}-state NFA into {len(masks)} subsets")
    return SubsetDfa(base=base, masks=tuple(masks), names=names)


# ------------------------------
#          Minimization
# ------------------------------


def _reachable(d: Dfa) -> Dfa:
    seen = {d.initial}
    queue = deque([d.initial])
    while queue:
        p = queue.popleft()
        for t in d.delta:
            q = t.image[p]
            if q not in seen:
                seen.add(q)
                queue.append(q)
    if len(seen) == d.size:
        return d
    order = sorted(seen)
    renumber = {p: i for i, p in enumerate(order)}
    return Dfa(
        size=len(order),
        alphabet=d.alphabet,
        delta=tuple(Transformation(image=tuple(renumber[t.image[p]] for p in order)) for t in d.delta),
        initial=renumber[d.initial],
        finals=frozenset(renumber[f] for f in d.finals if f in renumber),
    )


def hopcroft_blocks(d: Dfa) -> List[int]:
    """Partition refinement with a worklist of splitter blocks; returns a block id per state."""
    n = d.size
    inverse = []
    for t in d.delta:
        pre: List[List[int]] = [[] for _ in range(n)]
        for p, q in enumerate(t.image):
            pre[q].append(p)
        inverse.append(pre)

    finals = set(d.finals)
    others = set(range(n)) - finals
    blocks = [b for b in (finals, others) if b]
    block_of = [0] * n
    for b, members in enumerate(blocks):
        for p in members:
            block_of[p] = b

    waiting = set(range(len(blocks)))
    if len(blocks) == 2:
        waiting = {0 if len(blocks[0]) <= len(blocks[1]) else 1}

    while waiting:
        splitter = list(blocks[waiting.pop()])
        for pre in inverse:
            touched: Dict[int, set] = defaultdict(set)
            for q in splitter:
                for p in pre[q]:
                    touched[block_of[p]].add(p)
            for b, inside in touched.items():
                if len(inside) == len(blocks[b]):
                    continue
                blocks[b] -= inside
                new = len(blocks)
                blocks.append(inside)
                for p in inside:
                    block_of[p] = new
                if b in waiting or len(inside) <= len(blocks[b]):
                    waiting.add(new)
                else:
                    waiting.add(b)
    return block_of


def moore_blocks(d: Dfa) -> List[int]:
    """Moore refinement, vectorized: iterate state signatures until the class count stops growing."""
    delta = np.array([t.image for t in d.delta], dtype=np.int64)
    classes = np.zeros(d.size, dtype=np.int64)
    classes[list(d.finals)] = 1
    count = len(np.unique(classes))
    while True:
        signature = np.column_stack([classes] + [classes[row] for row in delta])
        _, inverse = np.unique(signature, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        new_count = int(inverse.max()) + 1
        classes = inverse
        if new_count == count:
            break
        count = new_count
    return classes.tolist()


def _quotient(d: Dfa, block_of: Sequence[int]) -> Dfa:
    """Collapse blocks, numbering them in BFS order from the initial block with alphabet-ordered expansion."""
    representative: Dict[int, int] = {}
    for p, b in enumerate(block_of):
        representative.setdefault(b, p)

    start = block_of[d.initial]
    number = {start: 0}
    order = [start]
    rows: List[List[int]] = [[] for _ in d.alphabet]
    i = 0
    while i < len(order):
        p = representative[order[i]]
        for k, t in enumerate(d.delta):
            b = block_of[t.image[p]]
            j = number.get(b)
            if j is None:
                j = len(order)
                number[b] = j
                order.append(b)
            rows[k].append(j)
        i += 1

    return Dfa(
        size=len(order),
        alphabet=d.alphabet,
        delta=tuple(Transformation(image=tuple(row)) for row in rows),
        initial=0,
        finals=frozenset(j for j, b in enumerate(order) if representative[b] in d.finals),
    )


def minimize(d: Dfa, algorithm: str = "hopcroft") -> Dfa:
    """Minimal complete DFA for L(d), canonically numbered."""
    if algorithm not in MINIMIZERS:
        raise ValueError(f"unknown minimizer {algorithm!r}, expected one of {', '.join(MINIMIZERS)}")
    reachable = _reachable(d)
    blocks = hopcroft_blocks(reachable) if algorithm == "hopcroft" else moore_blocks(reachable)
    result = _quotient(reachable, blocks)
    logger.debug(f"minimized {d.size} states to {result.size} ({algorithm})")
    return result


def brzozowski_minimize(d: Dfa) -> Dfa:
    """Double-reversal minimization; a cross-check for minimize, not the primary path."""
    once = determinize(reverse_nfa(d)).base
    twice = determinize(reverse_nfa(once)).base
    return _quotient(twice, list(range(twice.size)))


def state_complexity(nfa: EpsNfa, algorithm: str = "hopcroft", cap: Optional[int] = None) -> int:
    return minimize(determinize(nfa, cap=cap).base, algorithm).size


def equivalent(d1: Dfa, d2: Dfa) -> bool:
    """L(d1) = L(d2) iff no reachable pair of the symmetric-difference product is final."""
    return not product_dfa(d1, d2, BooleanOp.SYMMETRIC_DIFFERENCE).finals


def is_minimal(d: Dfa) -> bool:
    """Every state reachable and no further refinement possible."""
    return _reachable(d).size == d.size and len(set(moore_blocks(d))) == d.size
