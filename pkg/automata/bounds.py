import ast
import csv
import logging
from enum import Enum
from typing import Dict, IO, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from automata.witnesses import WitnessFamily, WitnessSpec, display_name

logger = logging.getLogger(__name__)


class NoKnownBoundError(ValueError):
    pass


class OperationId(str, Enum):
    STAR = "star"
    REVERSAL = "reversal"
    PRODUCT = "product"
    BOOL_UNION = "bool-union"
    BOOL_INTERSECTION = "bool-intersection"
    BOOL_DIFFERENCE = "bool-difference"
    BOOL_SYMDIFF = "bool-symdiff"
    K_UNION_LSTAR = "k-union-lstar"
    K_INTER_LSTAR = "k-inter-lstar"
    K_SYMDIFF_LSTAR = "k-symdiff-lstar"
    K_MINUS_LSTAR = "k-minus-lstar"
    LSTAR_MINUS_K = "lstar-minus-k"
    KSTAR_UNION_LSTAR = "kstar-union-lstar"
    KSTAR_INTER_LSTAR = "kstar-inter-lstar"
    KSTAR_MINUS_LSTAR = "kstar-minus-lstar"
    KSTAR_SYMDIFF_LSTAR = "kstar-symdiff-lstar"
    K_LSTAR = "k-lstar"
    KSTAR_L = "kstar-l"
    KSTAR_LSTAR = "kstar-lstar"
    KL_STAR = "kl-star"
    UNION_STAR = "union-star"
    INTER_STAR = "inter-star"
    MINUS_STAR = "minus-star"
    SYMDIFF_STAR = "symdiff-star"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "OperationId":
        """Accept the slug or the printed label (K∪L*, (KL)*, ...)."""
        for op in cls:
            if text in (op.value, op.label):
                return op
        raise ValueError(f"unknown operation {text!r}")


_LABELS = {
    OperationId.STAR: "L*",
    OperationId.REVERSAL: "L^R",
    OperationId.PRODUCT: "KL",
    OperationId.BOOL_UNION: "K∪L",
    OperationId.BOOL_INTERSECTION: "K∩L",
    OperationId.BOOL_DIFFERENCE: "K\\L",
    OperationId.BOOL_SYMDIFF: "K⊕L",
    OperationId.K_UNION_LSTAR: "K∪L*",
    OperationId.K_INTER_LSTAR: "K∩L*",
    OperationId.K_SYMDIFF_LSTAR: "K⊕L*",
    OperationId.K_MINUS_LSTAR: "K\\L*",
    OperationId.LSTAR_MINUS_K: "L*\\K",
    OperationId.KSTAR_UNION_LSTAR: "K*∪L*",
    OperationId.KSTAR_INTER_LSTAR: "K*∩L*",
    OperationId.KSTAR_MINUS_LSTAR: "K*\\L*",
    OperationId.KSTAR_SYMDIFF_LSTAR: "K*⊕L*",
    OperationId.K_LSTAR: "KL*",
    OperationId.KSTAR_L: "K*L",
    OperationId.KSTAR_LSTAR: "K*L*",
    OperationId.KL_STAR: "(KL)*",
    OperationId.UNION_STAR: "(K∪L)*",
    OperationId.INTER_STAR: "(K∩L)*",
    OperationId.MINUS_STAR: "(K\\L)*",
    OperationId.SYMDIFF_STAR: "(K⊕L)*",
}

COMBINED_OPS = (
    OperationId.K_UNION_LSTAR,
    OperationId.K_INTER_LSTAR,
    OperationId.K_SYMDIFF_LSTAR,
    OperationId.K_MINUS_LSTAR,
    OperationId.LSTAR_MINUS_K,
    OperationId.KSTAR_UNION_LSTAR,
    OperationId.KSTAR_INTER_LSTAR,
    OperationId.KSTAR_SYMDIFF_LSTAR,
    OperationId.KSTAR_MINUS_LSTAR,
    OperationId.K_LSTAR,
    OperationId.KSTAR_L,
    OperationId.KSTAR_LSTAR,
    OperationId.KL_STAR,
)


class BoundStatus(str, Enum):
    THEOREM = "theorem"
    CONJECTURE = "conjecture"
    OPEN = "open"


class WitnessTemplate(BaseModel):
    """A witness stream without its size; `at(size)` picks one member."""

    model_config = ConfigDict(frozen=True)

    family: WitnessFamily
    order: str = ""
    restrict_to: Optional[str] = None

    def at(self, size: int) -> WitnessSpec:
        return WitnessSpec(
            family=self.family,
            n=size,
            letter_order=tuple(self.order),
            restrict_to=tuple(self.restrict_to) if self.restrict_to is not None else None,
        )


class AlternatePair(BaseModel):
    """A second witness pair measured on request, e.g. the non-dialect pair for K∩L*."""

    model_config = ConfigDict(frozen=True)

    left: WitnessTemplate
    right: WitnessTemplate
    complement_right: bool = False
    expect: str  # "shortfall": measured < bound is expected and not asserted; "match": should meet the bound
    status: BoundStatus = BoundStatus.THEOREM
    only_if_sizes_differ: bool = False


class BoundEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: OperationId
    formula: Optional[str]
    status: BoundStatus
    arity: int
    symmetric: bool = False
    left: Optional[WitnessTemplate]
    right: WitnessTemplate
    complement_right: bool = False
    pipeline: str
    alternate: Optional[AlternatePair] = None


def _w(family: WitnessFamily, order: str = "", restrict_to: Optional[str] = None) -> WitnessTemplate:
    return WitnessTemplate(family=family, order=order, restrict_to=restrict_to)


U_ABC = _w(WitnessFamily.U3, "abc")
U_BAC = _w(WitnessFamily.U3, "bac")
U0_ABC = _w(WitnessFamily.U0_3, "abc")
W_ABCD = _w(WitnessFamily.W4, "abcd")
W_DCBA = _w(WitnessFamily.W4, "dcba")
W0_ABCD = _w(WitnessFamily.W0_4, "abcd")
U4_ABCD = _w(WitnessFamily.U4, "abcd")
U4_DCBA = _w(WitnessFamily.U4, "dcba")
U5_ABCDE = _w(WitnessFamily.U5, "abcde")
U5_ECBAD = _w(WitnessFamily.U5, "ecbad")

K_CIRC_LSTAR = "m*(2**(n-1) + 2**(n-2) - 1) + 1"
KSTAR_CIRC_LSTAR = "(2**(m-1) + 2**(m-2) - 1)*(2**(n-1) + 2**(n-2) - 1) + 1"
STAR_OF_PRODUCT = "2**(m*n-1) + 2**(m*n-2)"

_SHORTFALL = AlternatePair(left=U_ABC, right=U_BAC, expect="shortfall")
_PLAIN_STREAMS = AlternatePair(left=U_ABC, right=U_ABC, expect="match", only_if_sizes_differ=True)


def _entry(op: OperationId, formula: Optional[str], left, right, pipeline: str, **extra) -> BoundEntry:
    status = extra.pop("status", BoundStatus.THEOREM)
    arity = 1 if left is None else 2
    return BoundEntry(op=op, formula=formula, status=status, arity=arity, left=left, right=right, pipeline=pipeline, **extra)


def _boolean(op: OperationId, tag: str) -> BoundEntry:
    return _entry(
        op, "m*n", U_ABC, U_BAC, f"minimize(product_dfa(K, L, {tag}))",
        symmetric=tag != "difference", alternate=_PLAIN_STREAMS,
    )


def _one_star(op: OperationId, left: WitnessTemplate, tag: str, **extra) -> BoundEntry:
    pipeline = (
        "product_dfa(minimize(determinize(star_nfa(L))), K, difference)"
        if op is OperationId.LSTAR_MINUS_K
        else f"product_dfa(K, minimize(determinize(star_nfa(L))), {tag})"
    )
    return _entry(op, K_CIRC_LSTAR, left, U_BAC, pipeline, **extra)


def _two_stars(op: OperationId, left: WitnessTemplate, tag: str, symmetric: bool) -> BoundEntry:
    # W_{0},m keeps the ε-edges of W_m, leaving its last state
    star_k = "star_nfa(K, restart_from={m-1})" if left is W0_ABCD else "star_nfa(K)"
    pipeline = f"product_dfa(minimize(determinize({star_k})), minimize(determinize(star_nfa(L))), {tag})"
    return _entry(op, KSTAR_CIRC_LSTAR, left, W_DCBA, pipeline, symmetric=symmetric)


def _star_of(op: OperationId, tag: str, left, right, **extra) -> BoundEntry:
    pipeline = extra.pop("pipeline", f"minimize(determinize(star_nfa(minimize(product_dfa(K, L, {tag})))))")
    return _entry(op, extra.pop("formula", STAR_OF_PRODUCT), left, right, pipeline, **extra)


BOUND_TABLE: Dict[OperationId, BoundEntry] = {
    entry.op: entry
    for entry in [
        _entry(OperationId.STAR, "2**(n-1) + 2**(n-2)", None, _w(WitnessFamily.U3, "abc", "ab"),
               "minimize(determinize(star_nfa(L)))"),
        _entry(OperationId.REVERSAL, "2**n", None, U_ABC, "minimize(determinize(reverse_nfa(L)))"),
        _entry(OperationId.PRODUCT, "(m-1)*2**n + 2**(n-1)", U_ABC, U_ABC,
               "minimize(determinize(concat_nfa(dfa_to_nfa(K), dfa_to_nfa(L))))"),
        _boolean(OperationId.BOOL_UNION, "union"),
        _boolean(OperationId.BOOL_INTERSECTION, "intersection"),
        _boolean(OperationId.BOOL_DIFFERENCE, "difference"),
        _boolean(OperationId.BOOL_SYMDIFF, "symmetric-difference"),
        _one_star(OperationId.K_UNION_LSTAR, U_ABC, "union"),
        _one_star(OperationId.K_INTER_LSTAR, U0_ABC, "intersection", alternate=_SHORTFALL),
        _one_star(OperationId.K_SYMDIFF_LSTAR, U_ABC, "symmetric-difference"),
        _one_star(OperationId.K_MINUS_LSTAR, U0_ABC, "difference", alternate=_SHORTFALL),
        _one_star(OperationId.LSTAR_MINUS_K, U_ABC, "difference"),
        _two_stars(OperationId.KSTAR_UNION_LSTAR, W_ABCD, "union", True),
        _two_stars(OperationId.KSTAR_INTER_LSTAR, W_ABCD, "intersection", True),
        _two_stars(OperationId.KSTAR_MINUS_LSTAR, W0_ABCD, "difference", False),
        _two_stars(OperationId.KSTAR_SYMDIFF_LSTAR, W0_ABCD, "symmetric-difference", True),
        _entry(OperationId.K_LSTAR, "m*(2**(n-1) + 2**(n-2)) - 2**(n-2)",
               _w(WitnessFamily.T3, "abc"), _w(WitnessFamily.T3, "bac"),
               "minimize(determinize(concat_nfa(dfa_to_nfa(K), star_nfa(L))))"),
        _entry(OperationId.KSTAR_L, "5*2**(m+n-3) - 2**(m-1) - 2**n + 1", U4_ABCD, U4_DCBA,
               "minimize(determinize(concat_nfa(star_nfa(K), dfa_to_nfa(L))))"),
        _entry(OperationId.KSTAR_LSTAR, "2**(m+n-1) - 2**(m-1) - 3*2**(n-2) + 2", U4_ABCD, U4_DCBA,
               "minimize(determinize(concat_nfa(star_nfa(K), star_nfa(L))))"),
        _entry(OperationId.KL_STAR, "2**(m+n-1) + 2**(m+n-4) - (2**(m-1) + 2**(n-1) - m - 1)", W_ABCD, W_DCBA,
               "minimize(determinize(star_eps_nfa(concat_nfa(dfa_to_nfa(K), dfa_to_nfa(L)))))"),
        _star_of(OperationId.UNION_STAR, "union", _w(WitnessFamily.S2, "ab"), _w(WitnessFamily.S2, "ba"),
                 formula="2**(m+n-1) - (2**(m-1) + 2**(n-1) - 1)", symmetric=True,
                 pipeline="minimize(determinize(star_eps_nfa(union_nfa(dfa_to_nfa(K), dfa_to_nfa(L)))))"),
        _star_of(OperationId.INTER_STAR, "intersection", U5_ABCDE, U5_ECBAD,
                 status=BoundStatus.CONJECTURE, symmetric=True),
        _star_of(OperationId.MINUS_STAR, "difference", _w(WitnessFamily.JO6_K), _w(WitnessFamily.JO6_L),
                 complement_right=True,
                 alternate=AlternatePair(left=U5_ABCDE, right=U5_ECBAD, complement_right=True,
                                         expect="match", status=BoundStatus.CONJECTURE)),
        _star_of(OperationId.SYMDIFF_STAR, "symmetric-difference", U5_ABCDE, U5_ECBAD,
                 status=BoundStatus.OPEN, formula=None),
    ]
}


# ------------------------------
#        Formula Evaluation
# ------------------------------

_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load,
                  ast.Add, ast.Sub, ast.Mult, ast.Pow, ast.USub)


def evaluate_formula(formula: str, m: int, n: int) -> int:
    """Integer-exact evaluation of a bound formula over m and n."""
    tree = ast.parse(formula, mode="eval")
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ValueError(f"unsupported syntax {type(node).__name__} in formula {formula!r}")
        if isinstance(node, ast.Name) and node.id not in ("m", "n"):
            raise ValueError(f"unknown variable {node.id!r} in formula {formula!r}")
        if isinstance(node, ast.Constant) and type(node.value) is not int:
            raise ValueError(f"non-integer constant {node.value!r} in formula {formula!r}")
    return _eval(tree.body, {"m": m, "n": n})


def _eval(node: ast.AST, env: Dict[str, int]) -> int:
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.UnaryOp):
        return -_eval(node.operand, env)
    left, right = _eval(node.left, env), _eval(node.right, env)
    if isinstance(node.op, ast.Add):
        return left + right
    if isinstance(node.op, ast.Sub):
        return left - right
    if isinstance(node.op, ast.Mult):
        return left * right
    if right < 0:
        raise ValueError(f"negative exponent {right} would leave the integers")
    return left**right


def _check_sizes(m: int, n: int, arity: int) -> None:
    if n < 3 or (arity == 2 and m < 3):
        raise ValueError(f"bounds are stated for m, n >= 3, got m={m}, n={n}")


def evaluate(op: OperationId, m: int, n: int) -> int:
    entry = BOUND_TABLE[OperationId(op)]
    if entry.formula is None:
        raise NoKnownBoundError(f"no known bound for {entry.op.label}")
    _check_sizes(m, n, entry.arity)
    return evaluate_formula(entry.formula, m, n)


# ------------------------------
#            Recipes
# ------------------------------


class Recipe(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: OperationId
    left: Optional[WitnessSpec]
    right: WitnessSpec
    complement_right: bool = False
    pipeline: str
    status: BoundStatus
    alternate: bool = False

    @property
    def witness_names(self) -> str:
        right = display_name(self.right)
        if self.complement_right:
            right = f"complement({right})"
        return right if self.left is None else f"{display_name(self.left)} / {right}"


def recipe(op: OperationId, m: int, n: int, measuring: bool = False, alternate: bool = False) -> Recipe:
    """
    Witness pair and pipeline for op at sizes (m, n). The open entry only yields its
    measurement candidates when `measuring` is set; `alternate` selects the entry's second pair.
    """
    entry = BOUND_TABLE[OperationId(op)]
    if entry.status is BoundStatus.OPEN and not measuring:
        raise NoKnownBoundError(f"no known bound for {entry.op.label}; pass measuring=True to measure candidates")
    _check_sizes(m, n, entry.arity)

    left, right, complement_right, status = entry.left, entry.right, entry.complement_right, entry.status
    if alternate:
        pair = entry.alternate
        if pair is None:
            raise ValueError(f"{entry.op.label} has no alternate witness pair")
        if pair.only_if_sizes_differ and m == n:
            raise ValueError(f"the alternate pair for {entry.op.label} needs m != n")
        left, right, complement_right, status = pair.left, pair.right, pair.complement_right, pair.status

    return Recipe(
        op=entry.op,
        left=left.at(m) if left is not None else None,
        right=right.at(n),
        complement_right=complement_right,
        pipeline=entry.pipeline,
        status=status,
        alternate=alternate,
    )


def has_alternate(op: OperationId, m: int, n: int) -> bool:
    pair = BOUND_TABLE[OperationId(op)].alternate
    return pair is not None and not (pair.only_if_sizes_differ and m == n)


# ------------------------------
#          Bound Table
# ------------------------------

BOUND_CSV_FIELDS = ["op", "status", "formula", "m", "n", "value"]


def bound_table(ops: Iterable[OperationId], m_values: Iterable[int], n_values: Iterable[int]) -> List[Dict]:
    rows = []
    m_values, n_values = list(m_values), list(n_values)
    for op in ops:
        entry = BOUND_TABLE[OperationId(op)]
        sizes: List[Tuple[Optional[int], int]] = (
            [(None, n) for n in n_values] if entry.arity == 1 else [(m, n) for m in m_values for n in n_values]
        )
        for m, n in sizes:
            value = "" if entry.formula is None else evaluate(entry.op, m or 3, n)
            rows.append({
                "op": entry.op.value,
                "status": entry.status.value,
                "formula": entry.formula or "",
                "m": "" if m is None else m,
                "n": n,
                "value": value,
            })
    return rows


def write_bound_csv(rows: List[Dict], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=BOUND_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
