import logging
from collections import deque
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from automata.core import (
    Dfa,
    Transformation,
    cycle,
    identity,
    permute_letters,
    project,
    singular,
    subcycle,
    transposition,
)

logger = logging.getLogger(__name__)


class WitnessNameError(ValueError):
    pass


class WitnessFamily(str, Enum):
    U3 = "U3"
    U0_3 = "U0_3"
    T3 = "T3"
    S2 = "S2"
    U4 = "U4"
    U0_4 = "U0_4"
    W4 = "W4"
    W0_4 = "W0_4"
    U5 = "U5"
    JO6_K = "JO6_K"
    JO6_L = "JO6_L"


CANONICAL_LETTERS = "abcdef"


def canonical_letters(family: WitnessFamily) -> Tuple[str, ...]:
    arity = {
        WitnessFamily.S2: 2,
        WitnessFamily.U3: 3,
        WitnessFamily.U0_3: 3,
        WitnessFamily.T3: 3,
        WitnessFamily.U4: 4,
        WitnessFamily.U0_4: 4,
        WitnessFamily.W4: 4,
        WitnessFamily.W0_4: 4,
        WitnessFamily.U5: 5,
        WitnessFamily.JO6_K: 6,
        WitnessFamily.JO6_L: 6,
    }[WitnessFamily(family)]
    return tuple(CANONICAL_LETTERS[:arity])


# ------------------------------
#      Canonical Families
# ------------------------------

# Each family lists its letters' transformations in canonical order, as a function of n.
_Letters = Callable[[int], List[Transformation]]


def _universal(n: int) -> List[Transformation]:
    return [cycle(n), transposition(n, 0, 1), singular(n, n - 1, 0)]


_FAMILIES: Dict[WitnessFamily, Tuple[_Letters, str]] = {
    WitnessFamily.U3: (_universal, "last"),
    WitnessFamily.U0_3: (_universal, "zero"),
    WitnessFamily.T3: (lambda n: [cycle(n), transposition(n, 0, 1), singular(n, 1, 0)], "last"),
    WitnessFamily.S2: (lambda n: [cycle(n), singular(n, 0, 1)], "zero"),
    WitnessFamily.U4: (lambda n: _universal(n) + [identity(n)], "last"),
    WitnessFamily.U0_4: (lambda n: _universal(n) + [identity(n)], "zero"),
    WitnessFamily.W4: (
        lambda n: [cycle(n), transposition(n, n - 2, n - 1), singular(n, 1, 0), identity(n)],
        "last",
    ),
    WitnessFamily.W0_4: (
        lambda n: [cycle(n), transposition(n, n - 2, n - 1), singular(n, 1, 0), identity(n)],
        "zero",
    ),
    WitnessFamily.U5: (lambda n: _universal(n) + [identity(n), subcycle(n, 1, n - 1)], "last"),
    WitnessFamily.JO6_K: (
        lambda n: [cycle(n), identity(n), subcycle(n, 1, n - 1), identity(n), singular(n, 1, 0), identity(n)],
        "last",
    ),
    WitnessFamily.JO6_L: (
        lambda n: [cycle(n), cycle(n), identity(n), subcycle(n, 1, n - 1), identity(n), singular(n, 1, 0)],
        "last",
    ),
}


class WitnessSpec(BaseModel):
    """
    One member of a witness stream: family, size, letter renaming and optional
    final-set override or alphabet restriction.

    letter_order[i] is the new name of the i-th canonical letter, so order "bac" on U3
    gives U_n(b,a,c), where b is the cycle and a the transposition.
    """

    model_config = ConfigDict(frozen=True)

    family: WitnessFamily
    n: int = Field(ge=3)
    letter_order: Tuple[str, ...] = ()
    finals_override: Optional[FrozenSet[int]] = None
    restrict_to: Optional[Tuple[str, ...]] = None

    @model_validator(mode="before")
    @classmethod
    def default_order(cls, values: Any) -> Any:
        """An empty letter order means the family's canonical order."""
        if isinstance(values, dict) and not values.get("letter_order"):
            values = {**values, "letter_order": canonical_letters(values.get("family"))}
        return values

    @model_validator(mode="after")
    def check_spec(self) -> "WitnessSpec":
        canonical = canonical_letters(self.family)
        if sorted(self.letter_order) != sorted(canonical):
            raise ValueError(
                f"letter order {''.join(self.letter_order)} is not a permutation of {''.join(canonical)}"
            )
        if self.finals_override is not None and self.finals_override not in (
            frozenset({self.n - 1}),
            frozenset({0}),
        ):
            raise ValueError(f"final set override must be {{{self.n - 1}}} or {{0}} in witness mode")
        if self.restrict_to is not None and not set(self.restrict_to) <= set(canonical):
            raise ValueError(f"cannot restrict {self.family.value} to letters {''.join(self.restrict_to)}")
        return self


def build(spec: WitnessSpec) -> Dfa:
    letters, final_kind = _FAMILIES[spec.family]
    n = spec.n
    finals = frozenset({n - 1}) if final_kind == "last" else frozenset({0})
    if spec.finals_override is not None:
        finals = spec.finals_override

    canonical = canonical_letters(spec.family)
    dfa = Dfa(size=n, alphabet=canonical, delta=tuple(letters(n)), initial=0, finals=finals)
    if spec.letter_order != canonical:
        dfa = permute_letters(dfa, dict(zip(canonical, spec.letter_order)))
    if spec.restrict_to is not None:
        dfa = project(dfa, spec.restrict_to)
    return dfa


def monoid_size(d: Dfa, letters: Iterable[str]) -> int:
    """Size of the transition monoid generated by the given letters, identity included."""
    generators = [d.transition(x).image for x in dict.fromkeys(letters)]
    if not generators:
        raise ValueError("monoid needs at least one generating letter")
    start = tuple(range(d.size))
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for g in generators:
            product = tuple(g[s] for s in t)
            if product not in seen:
                seen.add(product)
                queue.append(product)
    logger.debug(f"monoid of {len(generators)} letters on {d.size} states has {len(seen)} elements")
    return len(seen)


# ------------------------------
#         Witness Names
# ------------------------------

_PREFIXES = {
    "U": None,
    "U0": None,
    "T": WitnessFamily.T3,
    "W": WitnessFamily.W4,
    "W0": WitnessFamily.W0_4,
    "S": WitnessFamily.S2,
    "U5L": WitnessFamily.U5,
    "JO6K": WitnessFamily.JO6_K,
    "JO6L": WitnessFamily.JO6_L,
}

_UNIVERSAL_BY_ARITY = {
    ("U", 3): WitnessFamily.U3,
    ("U", 4): WitnessFamily.U4,
    ("U", 5): WitnessFamily.U5,
    ("U0", 3): WitnessFamily.U0_3,
    ("U0", 4): WitnessFamily.U0_4,
}


def parse_witness(name: str) -> WitnessSpec:
    """Parse names such as U:n=5:order=dcba, W0:n=4, S:n=6:order=ba or U:n=4:restrict=ab."""
    prefix, *fields = name.strip().split(":")
    if prefix not in _PREFIXES:
        raise WitnessNameError(f"unknown witness family {prefix!r} in {name!r}")
    options: Dict[str, str] = {}
    for field in fields:
        key, sep, value = field.partition("=")
        if not sep or key not in ("n", "order", "finals", "restrict"):
            raise WitnessNameError(f"bad witness field {field!r} in {name!r}")
        options[key] = value
    if "n" not in options:
        raise WitnessNameError(f"witness {name!r} has no size (n=...)")
    try:
        n = int(options["n"])
    except ValueError:
        raise WitnessNameError(f"size {options['n']!r} is not an integer") from None

    order = tuple(options.get("order", ""))
    family = _PREFIXES[prefix]
    if family is None:
        arity = len(order) or 3
        family = _UNIVERSAL_BY_ARITY.get((prefix, arity))
        if family is None:
            raise WitnessNameError(f"{prefix} has no {arity}-letter variant")

    finals = None
    if "finals" in options:
        try:
            finals = frozenset({int(options["finals"])})
        except ValueError:
            raise WitnessNameError(f"finals {options['finals']!r} is not a state") from None
    restrict = tuple(options["restrict"]) if "restrict" in options else None

    return WitnessSpec(family=family, n=n, letter_order=order, finals_override=finals, restrict_to=restrict)


def display_name(spec: WitnessSpec) -> str:
    """Human-readable name, e.g. U_5(d,c,b,a), U_{0},4(a,b,c) or U_4(a,b,∅)."""
    base = {
        WitnessFamily.U3: "U_{n}",
        WitnessFamily.U4: "U_{n}",
        WitnessFamily.U5: "U_{n}",
        WitnessFamily.U0_3: "U_{{0}},{n}",
        WitnessFamily.U0_4: "U_{{0}},{n}",
        WitnessFamily.T3: "T_{n}",
        WitnessFamily.S2: "S_{n}",
        WitnessFamily.W4: "W_{n}",
        WitnessFamily.W0_4: "W_{{0}},{n}",
        WitnessFamily.JO6_K: "JO6K_{n}",
        WitnessFamily.JO6_L: "JO6L_{n}",
    }[spec.family].format(n=spec.n)
    letters = list(spec.letter_order)
    if spec.restrict_to is not None:
        letters = [x if x in spec.restrict_to else "∅" for x in letters]
    name = f"{base}({','.join(letters)})"
    if spec.finals_override is not None:
        name += "[F=" + ",".join(str(f) for f in sorted(spec.finals_override)) + "]"
    return name
