import random

import pytest

from automata.constructions import accepts, concat_nfa, dfa_to_nfa, reverse_nfa, star_nfa
from automata.core import Dfa, Transformation, complement, project, run
from automata.determinize import (
    SubsetCapExceeded,
    brzozowski_minimize,
    determinize,
    equivalent,
    hopcroft_blocks,
    is_minimal,
    minimize,
    moore_blocks,
    state_complexity,
)
from automata.witnesses import WitnessFamily, WitnessSpec, build
from verifier.oracle import random_words


def witness(family, n, order=""):
    return build(WitnessSpec(family=family, n=n, letter_order=tuple(order)))


def random_dfa(rng, size=8, alphabet=("a", "b")):
    return Dfa(
        size=size,
        alphabet=alphabet,
        delta=tuple(Transformation(image=tuple(rng.randrange(size) for _ in range(size))) for _ in alphabet),
        initial=0,
        finals=frozenset(p for p in range(size) if rng.random() < 0.4),
    )


def same_partition(left, right):
    pairs = set(zip(left, right))
    return len(pairs) == len(set(left)) == len(set(right))


def test_star_of_binary_universal_witness():
    d = project(witness(WitnessFamily.U3, 3), "ab")
    assert state_complexity(star_nfa(d)) == 6
    assert state_complexity(star_nfa(project(witness(WitnessFamily.U3, 4), "ab"))) == 12


def test_reversal_of_universal_witness():
    assert state_complexity(reverse_nfa(witness(WitnessFamily.U3, 3))) == 8


def test_witnesses_are_minimal():
    for family in WitnessFamily:
        for n in range(3, 9):
            d = witness(family, n)
            assert state_complexity(dfa_to_nfa(d)) == n, (family, n)


def test_determinizing_a_dfa_gives_it_back():
    d = witness(WitnessFamily.W4, 5, "dcba")
    result = minimize(determinize(dfa_to_nfa(d)).base)
    assert result.size == d.size
    assert equivalent(result, d)


def test_subset_labels():
    nfa = concat_nfa(star_nfa(witness(WitnessFamily.U4, 4)), dfa_to_nfa(witness(WitnessFamily.U4, 5, "dcba")))
    subsets = determinize(nfa)
    assert subsets.label_text(0) == "{s,0}"
    assert subsets.subset_labels[0] == nfa.closure(nfa.initials)
    assert len(set(subsets.masks)) == len(subsets.masks)
    for state, label in enumerate(subsets.subset_labels):
        assert (state in subsets.base.finals) == bool(label & nfa.finals)


def test_empty_subset_becomes_dead_state():
    nfa = reverse_nfa(witness(WitnessFamily.U3, 3))
    subsets = determinize(nfa)
    assert 0 in subsets.masks
    assert subsets.base.size <= 2**3 + 1


def test_subset_cap():
    with pytest.raises(SubsetCapExceeded):
        determinize(reverse_nfa(witness(WitnessFamily.U3, 6)), cap=10)


def test_minimize_merges_duplicate_sinks():
    d = Dfa(
        size=3,
        alphabet=("a",),
        delta=(Transformation(image=(1, 2, 1)),),
        initial=0,
        finals=frozenset({1, 2}),
    )
    assert minimize(d).size == 2


def test_minimize_empty_language():
    d = witness(WitnessFamily.U3, 5)
    assert minimize(complement(complement(d))).size == 5
    empty = d.model_copy(update={"finals": frozenset()})
    assert minimize(empty).size == 1


def test_unknown_minimizer():
    with pytest.raises(ValueError):
        minimize(witness(WitnessFamily.U3, 3), "brzozowski")


def test_minimization_idempotent_and_canonical():
    rng = random.Random(2024)
    for _ in range(100):
        d = random_dfa(rng)
        once = minimize(d)
        assert minimize(once) == once
        assert is_minimal(once)
        assert equivalent(once, d)
        # a relabelled copy of d minimizes to the same fields
        order = list(range(1, d.size))
        rng.shuffle(order)
        perm = [0] + order
        shuffled = Dfa(
            size=d.size,
            alphabet=d.alphabet,
            delta=tuple(
                Transformation(image=tuple(perm[t.image[perm.index(p)]] for p in range(d.size))) for t in d.delta
            ),
            initial=0,
            finals=frozenset(perm[f] for f in d.finals),
        )
        assert minimize(shuffled) == once


def test_hopcroft_and_moore_agree():
    rng = random.Random(5)
    for _ in range(50):
        d = random_dfa(rng, size=10, alphabet=("a", "b", "c"))
        assert same_partition(hopcroft_blocks(d), moore_blocks(d))
        assert minimize(d, "moore") == minimize(d, "hopcroft")


def test_brzozowski_cross_check():
    rng = random.Random(9)
    for _ in range(20):
        d = random_dfa(rng)
        assert brzozowski_minimize(d) == minimize(d)


def test_language_preserved_through_pipeline():
    rng = random.Random(3)
    for _ in range(10):
        nfa = concat_nfa(star_nfa(random_dfa(rng, size=4)), dfa_to_nfa(random_dfa(rng, size=4)))
        result = minimize(determinize(nfa).base)
        assert result.size <= determinize(nfa).base.size <= 2**nfa.size + 1
        for w in random_words(["a", "b"], 1000, 15, seed=rng.randrange(10_000)):
            assert accepts(nfa, w) == run(result, w)


def test_equivalent():
    d = witness(WitnessFamily.U4, 4)
    assert equivalent(d, minimize(d))
    assert not equivalent(d, complement(d))
    assert not equivalent(witness(WitnessFamily.U3, 4), witness(WitnessFamily.U3, 4, "bac"))
