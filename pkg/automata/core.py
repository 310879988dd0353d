import logging
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Mapping, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

logger = logging.getLogger(__name__)


class DfaFormatError(ValueError):
    """Raised when DFA text cannot be parsed. Carries the offending line number."""

    def __init__(self, line: int, cause: str):
        super().__init__(f"line {line}: {cause}")
        self.line = line
        self.cause = cause


# ------------------------------
#        Transformations
# ------------------------------


class TransformationKind(str, Enum):
    CYCLE = "cycle"
    TRANSPOSITION = "transposition"
    SINGULAR = "singular"
    IDENTITY = "identity"
    CONSTANT = "constant"
    SUBCYCLE = "subcycle"


class Transformation(BaseModel):
    """A total map of {0, ..., n-1} into itself; image[i] is the target of state i."""

    model_config = ConfigDict(frozen=True)

    image: Tuple[int, ...]

    @field_validator("image")
    @classmethod
    def check_range(cls, image: Tuple[int, ...]) -> Tuple[int, ...]:
        if not image:
            raise ValueError("a transformation needs at least one state")
        degree = len(image)
        for state, target in enumerate(image):
            if not 0 <= target < degree:
                raise ValueError(f"image[{state}] = {target} is outside [0, {degree})")
        return image

    @property
    def degree(self) -> int:
        return len(self.image)

    def __str__(self) -> str:
        return " ".join(str(t) for t in self.image)


def _check_index(name: str, value: int, degree: int) -> None:
    if not 0 <= value < degree:
        raise ValueError(f"{name} = {value} is outside [0, {degree})")


def make_transformation(kind: TransformationKind, degree: int, *indices: int) -> Transformation:
    """
    Build one of the named transformations of {0, ..., degree-1}.

    cycle                 0 -> 1 -> ... -> n-1 -> 0
    transposition i j     swaps i and j
    singular i j          sends i to j, fixes the rest
    identity
    constant k            everything to k
    subcycle lo hi        lo -> lo+1 -> ... -> hi -> lo, fixes the rest
    """
    kind = TransformationKind(kind)
    if degree < 1:
        raise ValueError(f"degree must be positive, got {degree}")

    expected = {
        TransformationKind.CYCLE: 0,
        TransformationKind.IDENTITY: 0,
        TransformationKind.CONSTANT: 1,
        TransformationKind.TRANSPOSITION: 2,
        TransformationKind.SINGULAR: 2,
        TransformationKind.SUBCYCLE: 2,
    }[kind]
    if len(indices) != expected:
        raise ValueError(f"{kind.value} takes {expected} indices, got {len(indices)}")
    for position, value in enumerate(indices):
        _check_index(f"{kind.value} index {position}", value, degree)

    image = list(range(degree))
    if kind is TransformationKind.CYCLE:
        image = [(s + 1) % degree for s in range(degree)]
    elif kind is TransformationKind.TRANSPOSITION:
        i, j = indices
        image[i], image[j] = j, i
    elif kind is TransformationKind.SINGULAR:
        i, j = indices
        image[i] = j
    elif kind is TransformationKind.CONSTANT:
        image = [indices[0]] * degree
    elif kind is TransformationKind.SUBCYCLE:
        lo, hi = indices
        if lo > hi:
            raise ValueError(f"subcycle needs lo <= hi, got ({lo}, {hi})")
        for s in range(lo, hi):
            image[s] = s + 1
        image[hi] = lo
    return Transformation(image=tuple(image))


def cycle(degree: int) -> Transformation:
    return make_transformation(TransformationKind.CYCLE, degree)


def transposition(degree: int, i: int, j: int) -> Transformation:
    return make_transformation(TransformationKind.TRANSPOSITION, degree, i, j)


def singular(degree: int, i: int, j: int) -> Transformation:
    return make_transformation(TransformationKind.SINGULAR, degree, i, j)


def identity(degree: int) -> Transformation:
    return make_transformation(TransformationKind.IDENTITY, degree)


def constant(degree: int, k: int) -> Transformation:
    return make_transformation(TransformationKind.CONSTANT, degree, k)


def subcycle(degree: int, lo: int, hi: int) -> Transformation:
    return make_transformation(TransformationKind.SUBCYCLE, degree, lo, hi)


def apply(t: Transformation, state: int) -> int:
    _check_index("state", state, t.degree)
    return t.image[state]


def compose(t1: Transformation, t2: Transformation) -> Transformation:
    """First t1, then t2: the result sends s to t2(t1(s))."""
    if t1.degree != t2.degree:
        raise ValueError(f"degree mismatch: {t1.degree} vs {t2.degree}")
    second = t2.image
    return Transformation(image=tuple(second[s] for s in t1.image))


# ------------------------------
#        Automata Models
# ------------------------------


def _check_alphabet(alphabet: Tuple[str, ...]) -> Tuple[str, ...]:
    for letter in alphabet:
        if len(letter) != 1 or not letter.isprintable() or letter.isspace():
            raise ValueError(f"letter {letter!r} is not a single printable symbol")
    if len(set(alphabet)) != len(alphabet):
        raise ValueError(f"duplicate letters in alphabet {' '.join(alphabet)}")
    return alphabet


class Dfa(BaseModel):
    """Complete deterministic automaton; delta[k] is the transformation of alphabet[k]."""

    model_config = ConfigDict(frozen=True)

    size: int = Field(gt=0)
    alphabet: Tuple[str, ...]
    delta: Tuple[Transformation, ...]
    initial: int
    finals: FrozenSet[int]

    @field_validator("alphabet")
    @classmethod
    def check_alphabet(cls, alphabet: Tuple[str, ...]) -> Tuple[str, ...]:
        return _check_alphabet(alphabet)

    @model_validator(mode="after")
    def check_complete(self) -> "Dfa":
        if len(self.delta) != len(self.alphabet):
            raise ValueError(
                f"incomplete delta: {len(self.alphabet)} letters but {len(self.delta)} transformations"
            )
        for letter, t in zip(self.alphabet, self.delta):
            if t.degree != self.size:
                raise ValueError(f"letter {letter} has degree {t.degree}, expected {self.size}")
        _check_index("initial", self.initial, self.size)
        for f in self.finals:
            _check_index("final state", f, self.size)
        return self

    def letter_index(self, letter: str) -> int:
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise ValueError(f"unknown letter {letter!r}") from None

    def transition(self, letter: str) -> Transformation:
        return self.delta[self.letter_index(letter)]


class EpsNfa(BaseModel):
    """
    Nondeterministic automaton with ε-edges.

    moves[p][k] is the set of targets of state p on alphabet[k]; epsilon[p] the ε-targets of p.
    names are display labels used for subset audits ("s", "q0", ...).
    """

    model_config = ConfigDict(frozen=True)

    size: int = Field(gt=0)
    alphabet: Tuple[str, ...]
    moves: Tuple[Tuple[FrozenSet[int], ...], ...]
    epsilon: Tuple[FrozenSet[int], ...]
    initials: FrozenSet[int]
    finals: FrozenSet[int]
    names: Tuple[str, ...] = ()

    @field_validator("alphabet")
    @classmethod
    def check_alphabet(cls, alphabet: Tuple[str, ...]) -> Tuple[str, ...]:
        return _check_alphabet(alphabet)

    @model_validator(mode="after")
    def check_shape(self) -> "EpsNfa":
        if len(self.moves) != self.size or len(self.epsilon) != self.size:
            raise ValueError(f"moves and epsilon need one row per state ({self.size})")
        if self.names and len(self.names) != self.size:
            raise ValueError(f"expected {self.size} state names, got {len(self.names)}")
        for p, row in enumerate(self.moves):
            if len(row) != len(self.alphabet):
                raise ValueError(f"state {p} has {len(row)} letter rows, expected {len(self.alphabet)}")
            for targets in row:
                for q in targets:
                    _check_index(f"target of state {p}", q, self.size)
        for p, targets in enumerate(self.epsilon):
            for q in targets:
                _check_index(f"ε-target of state {p}", q, self.size)
        for q in self.initials | self.finals:
            _check_index("initial/final state", q, self.size)
        return self

    def state_name(self, state: int) -> str:
        return self.names[state] if self.names else str(state)

    def closure(self, states: Iterable[int]) -> FrozenSet[int]:
        """States reachable from `states` through ε-edges only, `states` included."""
        closure = set(states)
        stack = list(closure)
        while stack:
            current = stack.pop()
            for target in self.epsilon[current]:
                if target not in closure:
                    closure.add(target)
                    stack.append(target)
        return frozenset(closure)


# ------------------------------
#      Elementary Operations
# ------------------------------


def run(d: Dfa, word: Sequence[str]) -> bool:
    state = d.initial
    for letter in word:
        state = d.delta[d.letter_index(letter)].image[state]
    return state in d.finals


def complement(d: Dfa) -> Dfa:
    return d.model_copy(update={"finals": frozenset(range(d.size)) - d.finals})


def permute_letters(d: Dfa, pi: Mapping[str, str]) -> Dfa:
    """Rename letters: the returned DFA acts on pi(x) the way d acts on x."""
    if set(pi.keys()) != set(d.alphabet) or set(pi.values()) != set(d.alphabet):
        raise ValueError(f"{dict(pi)} is not a bijection on the alphabet {' '.join(d.alphabet)}")
    inverse: Dict[str, str] = {target: source for source, target in pi.items()}
    delta = tuple(d.transition(inverse[letter]) for letter in d.alphabet)
    return d.model_copy(update={"delta": delta})


def project(d: Dfa, letters: Iterable[str]) -> Dfa:
    """Restrict d to a sub-alphabet, keeping declaration order."""
    keep = set(letters)
    unknown = keep - set(d.alphabet)
    if unknown:
        raise ValueError(f"cannot restrict to unknown letters {sorted(unknown)}")
    alphabet = tuple(x for x in d.alphabet if x in keep)
    return Dfa(
        size=d.size,
        alphabet=alphabet,
        delta=tuple(d.transition(x) for x in alphabet),
        initial=d.initial,
        finals=d.finals,
    )


# ------------------------------
#          Text Format
# ------------------------------


def write_dfa(d: Dfa) -> str:
    lines = [
        f"dfa {d.size}",
        " ".join(["alphabet", *d.alphabet]),
        f"initial {d.initial}",
        " ".join(["finals", *(str(f) for f in sorted(d.finals))]),
    ]
    for letter, t in zip(d.alphabet, d.delta):
        lines.append(f"{letter} {t}")
    return "\n".join(lines) + "\n"


def _parse_ints(line_no: int, fields: Sequence[str]) -> Tuple[int, ...]:
    try:
        return tuple(int(f) for f in fields)
    except ValueError:
        raise DfaFormatError(line_no, f"expected integers, got {' '.join(fields)!r}") from None


def _keyword_line(lines: Sequence[str], index: int, keyword: str) -> Sequence[str]:
    if index >= len(lines):
        raise DfaFormatError(index + 1, f"missing '{keyword}' line")
    fields = lines[index].split(" ")
    if fields[0] != keyword:
        raise DfaFormatError(index + 1, f"expected '{keyword}', got {fields[0]!r}")
    return [f for f in fields[1:] if f != ""]


def read_dfa(text: str) -> Dfa:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    header = _keyword_line(lines, 0, "dfa")
    if len(header) != 1:
        raise DfaFormatError(1, "expected 'dfa <n>'")
    (size,) = _parse_ints(1, header)
    if size < 1:
        raise DfaFormatError(1, f"state count must be positive, got {size}")

    alphabet = tuple(_keyword_line(lines, 1, "alphabet"))
    try:
        _check_alphabet(alphabet)
    except ValueError as e:
        raise DfaFormatError(2, str(e)) from None

    initial_fields = _keyword_line(lines, 2, "initial")
    if len(initial_fields) != 1:
        raise DfaFormatError(3, "expected 'initial <state>'")
    (initial,) = _parse_ints(3, initial_fields)
    finals = _parse_ints(4, _keyword_line(lines, 3, "finals"))

    rows: Dict[str, Tuple[int, ...]] = {}
    for index in range(4, len(lines)):
        line_no = index + 1
        fields = lines[index].split(" ")
        letter = fields[0]
        if letter not in alphabet:
            raise DfaFormatError(line_no, f"row for unknown letter {letter!r}")
        if letter in rows:
            raise DfaFormatError(line_no, f"duplicate row for letter {letter!r}")
        expected_letter = alphabet[len(rows)]
        if letter != expected_letter:
            raise DfaFormatError(line_no, f"rows must follow alphabet order, expected {expected_letter!r}")
        targets = _parse_ints(line_no, fields[1:])
        if len(targets) != size:
            raise DfaFormatError(line_no, f"letter {letter!r} has {len(targets)} targets, expected {size}")
        rows[letter] = targets

    if len(rows) != len(alphabet):
        missing = [x for x in alphabet if x not in rows]
        raise DfaFormatError(len(lines) + 1, f"incomplete delta: no row for {' '.join(missing)}")

    try:
        return Dfa(
            size=size,
            alphabet=alphabet,
            delta=tuple(Transformation(image=rows[x]) for x in alphabet),
            initial=initial,
            finals=frozenset(finals),
        )
    except ValueError as e:
        logger.error(f"DFA text is well-formed but invalid: {e}")
        raise DfaFormatError(len(lines), str(e)) from e
