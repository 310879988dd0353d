import logging
from collections import deque
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from automata.core import Dfa, EpsNfa, Transformation

logger = logging.getLogger(__name__)


class AlphabetMismatchError(ValueError):
    pass


class BooleanOp(str, Enum):
    UNION = "union"
    INTERSECTION = "intersection"
    DIFFERENCE = "difference"  # left \ right
    SYMMETRIC_DIFFERENCE = "symmetric-difference"

    def combine(self, left: bool, right: bool) -> bool:
        if self is BooleanOp.UNION:
            return left or right
        if self is BooleanOp.INTERSECTION:
            return left and right
        if self is BooleanOp.DIFFERENCE:
            return left and not right
        return left != right


def _require_same_alphabet(left: Tuple[str, ...], right: Tuple[str, ...]) -> None:
    if left != right:
        raise AlphabetMismatchError(f"alphabets differ: {' '.join(left)} vs {' '.join(right)}")


def _default_names(size: int) -> Tuple[str, ...]:
    return tuple(str(i) for i in range(size))


def _names(nfa: EpsNfa) -> Tuple[str, ...]:
    return nfa.names or _default_names(nfa.size)


# ------------------------------
#        ε-NFA Constructions
# ------------------------------


def dfa_to_nfa(d: Dfa) -> EpsNfa:
    moves = tuple(tuple(frozenset({t.image[p]}) for t in d.delta) for p in range(d.size))
    return EpsNfa(
        size=d.size,
        alphabet=d.alphabet,
        moves=moves,
        epsilon=tuple(frozenset() for _ in range(d.size)),
        initials=frozenset({d.initial}),
        finals=d.finals,
        names=_default_names(d.size),
    )


def star_nfa(d: Dfa, restart_from: Optional[Iterable[int]] = None) -> EpsNfa:
    """
    NFA for L(d)*: a new state s (index n) is the only initial state and is final,
    leaves on the same letters as the initial state of d, and every final state of d
    gets an ε-edge back to the initial state of d (not to s).

    With `restart_from`, the ε-edges leave those states instead of the finals of d,
    while d's finals still decide acceptance. W_{0},m with restart_from={m-1} is the
    left operand of K*\\L* and K*⊕L*.
    """
    n = d.size
    restarts = d.finals if restart_from is None else frozenset(restart_from)
    for p in restarts:
        if not 0 <= p < n:
            raise ValueError(f"restart state {p} is outside [0, {n})")
    moves = [tuple(frozenset({t.image[p]}) for t in d.delta) for p in range(n)]
    moves.append(moves[d.initial])
    epsilon = [frozenset({d.initial}) if p in restarts else frozenset() for p in range(n)]
    epsilon.append(frozenset())
    return EpsNfa(
        size=n + 1,
        alphabet=d.alphabet,
        moves=tuple(moves),
        epsilon=tuple(epsilon),
        initials=frozenset({n}),
        finals=d.finals | {n},
        names=_default_names(n) + ("s",),
    )


def _concat_names(left: EpsNfa, right: EpsNfa) -> Tuple[str, ...]:
    left_names = [f"q{name}" if name.isdigit() else name for name in _names(left)]
    right_names = list(_names(right))
    if "s" in left_names and "s" in right_names:
        left_names = ["s1" if name == "s" else name for name in left_names]
        right_names = ["s2" if name == "s" else name for name in right_names]
    return tuple(left_names + right_names)


def concat_nfa(left: EpsNfa, right: EpsNfa) -> EpsNfa:
    """
    NFA for L(left)L(right). Right states are shifted by left.size, every final state
    of left gets ε-edges to every initial state of right, and left finals stop being final.
    """
    _require_same_alphabet(left.alphabet, right.alphabet)
    shift = left.size
    bridge = frozenset(q + shift for q in right.initials)

    moves = list(left.moves)
    moves.extend(tuple(frozenset(q + shift for q in targets) for targets in row) for row in right.moves)
    epsilon = [targets | bridge if p in left.finals else targets for p, targets in enumerate(left.epsilon)]
    epsilon.extend(frozenset(q + shift for q in targets) for targets in right.epsilon)

    return EpsNfa(
        size=left.size + right.size,
        alphabet=left.alphabet,
        moves=tuple(moves),
        epsilon=tuple(epsilon),
        initials=left.initials,
        finals=frozenset(q + shift for q in right.finals),
        names=_concat_names(left, right),
    )


def union_nfa(left: EpsNfa, right: EpsNfa) -> EpsNfa:
    """Disjoint union: both initial sets stay initial, both final sets stay final."""
    _require_same_alphabet(left.alphabet, right.alphabet)
    shift = left.size
    moves = list(left.moves)
    moves.extend(tuple(frozenset(q + shift for q in targets) for targets in row) for row in right.moves)
    epsilon = list(left.epsilon)
    epsilon.extend(frozenset(q + shift for q in targets) for targets in right.epsilon)
    return EpsNfa(
        size=left.size + right.size,
        alphabet=left.alphabet,
        moves=tuple(moves),
        epsilon=tuple(epsilon),
        initials=left.initials | frozenset(q + shift for q in right.initials),
        finals=left.finals | frozenset(q + shift for q in right.finals),
        names=_concat_names(left, right),
    )


def star_eps_nfa(nfa: EpsNfa) -> EpsNfa:
    """
    NFA for L(nfa)*, built on the NFA itself: a new initial and final state s with
    ε-edges to the old initials, and ε-edges from every old final to the old initials.
    """
    names = _names(nfa)
    fresh = "s" if "s" not in names else "s*"
    epsilon = [targets | nfa.initials if p in nfa.finals else targets for p, targets in enumerate(nfa.epsilon)]
    epsilon.append(nfa.initials)
    moves = list(nfa.moves)
    moves.append(tuple(frozenset() for _ in nfa.alphabet))
    return EpsNfa(
        size=nfa.size + 1,
        alphabet=nfa.alphabet,
        moves=tuple(moves),
        epsilon=tuple(epsilon),
        initials=frozenset({nfa.size}),
        finals=nfa.finals | {nfa.size},
        names=tuple(names) + (fresh,),
    )


def reverse_nfa(d: Dfa) -> EpsNfa:
    reversed_moves: List[List[set]] = [[set() for _ in d.alphabet] for _ in range(d.size)]
    for k, t in enumerate(d.delta):
        for p, q in enumerate(t.image):
            reversed_moves[q][k].add(p)
    return EpsNfa(
        size=d.size,
        alphabet=d.alphabet,
        moves=tuple(tuple(frozenset(targets) for targets in row) for row in reversed_moves),
        epsilon=tuple(frozenset() for _ in range(d.size)),
        initials=d.finals,
        finals=frozenset({d.initial}),
        names=_default_names(d.size),
    )


def accepts(nfa: EpsNfa, word: Sequence[str]) -> bool:
    """Direct simulation of the ε-NFA on a word."""
    index = {letter: k for k, letter in enumerate(nfa.alphabet)}
    current: FrozenSet[int] = nfa.closure(nfa.initials)
    for letter in word:
        if letter not in index:
            raise ValueError(f"unknown letter {letter!r}")
        k = index[letter]
        step = set()
        for p in current:
            step |= nfa.moves[p][k]
        current = nfa.closure(step)
        if not current:
            return False
    return bool(current & nfa.finals)


# ------------------------------
#         Direct Product
# ------------------------------


def product_dfa(d1: Dfa, d2: Dfa, op: BooleanOp) -> Dfa:
    """Reachable part of the direct product; pair (p, q) is final per op."""
    _require_same_alphabet(d1.alphabet, d2.alphabet)
    op = BooleanOp(op)

    start = (d1.initial, d2.initial)
    index: Dict[Tuple[int, int], int] = {start: 0}
    pairs: List[Tuple[int, int]] = [start]
    rows: List[List[int]] = [[] for _ in d1.alphabet]
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for k, (t1, t2) in enumerate(zip(d1.delta, d2.delta)):
            target = (t1.image[p], t2.image[q])
            j = index.get(target)
            if j is None:
                j = len(pairs)
                index[target] = j
                pairs.append(target)
                queue.append(target)
            rows[k].append(j)

    finals = frozenset(
        i for i, (p, q) in enumerate(pairs) if op.combine(p in d1.finals, q in d2.finals)
    )
    logger.debug(f"product ({op.value}) has {len(pairs)} reachable pairs of {d1.size * d2.size}")
    return Dfa(
        size=len(pairs),
        alphabet=d1.alphabet,
        delta=tuple(Transformation(image=tuple(row)) for row in rows),
        initial=0,
        finals=finals,
    )
