import pytest

from automata.bounds import COMBINED_OPS, OperationId
from automata.core import Dfa, Transformation
from verifier.oracle import all_words, concat, language, membership_oracle, random_words, star


def test_random_words_are_seeded():
    first = list(random_words(["a", "b", "c"], 50, 12, seed=7))
    assert first == list(random_words(["a", "b", "c"], 50, 12, seed=7))
    assert first != list(random_words(["a", "b", "c"], 50, 12, seed=8))
    assert all(len(w) <= 12 for w in first)


def test_all_words_counts():
    assert len(list(all_words(["a", "b"], 3))) == 1 + 2 + 4 + 8
    assert next(all_words(["a"], 2)) == ""


def test_star_and_concat_evaluators():
    # L = {a}
    d = Dfa(
        size=3,
        alphabet=("a", "b"),
        delta=(Transformation(image=(1, 2, 2)), Transformation(image=(2, 2, 2))),
        initial=0,
        finals=frozenset({1}),
    )
    single_a = language(d)
    assert star(single_a)("")
    assert star(single_a)("aaa")
    assert not star(single_a)("aba")
    assert concat(single_a, star(single_a))("aa")
    assert not concat(single_a, star(single_a))("")


def test_k_star_l_sampled():
    report = membership_oracle(OperationId.KSTAR_L, 4, 5, count=500, maxlen=12, seed=7)
    assert report.ok
    assert report.words_tested == 500
    assert report.seed == 7
    assert not report.exhaustive


def test_star_exhaustive():
    report = membership_oracle(OperationId.STAR, 3, 3, maxlen=8, exhaustive=True)
    assert report.disagreements == 0
    assert report.words_tested == sum(2**k for k in range(9))
    assert report.m is None
    assert report.seed is None


def test_empty_word_in_k_union_lstar():
    report = membership_oracle(OperationId.K_UNION_LSTAR, 4, 5, maxlen=0, exhaustive=True)
    assert report.words_tested == 1
    assert report.ok


@pytest.mark.parametrize("op", COMBINED_OPS)
def test_combined_ops_exhaustive_short_words(op):
    report = membership_oracle(op, 3, 3, maxlen=5, exhaustive=True)
    assert report.disagreements == 0, report.sample


@pytest.mark.parametrize(
    "op", [OperationId.UNION_STAR, OperationId.INTER_STAR, OperationId.MINUS_STAR, OperationId.SYMDIFF_STAR]
)
def test_star_of_boolean_short_words(op):
    report = membership_oracle(op, 3, 3, maxlen=4, exhaustive=True)
    assert report.disagreements == 0, report.sample


@pytest.mark.slow
@pytest.mark.parametrize("op", COMBINED_OPS)
def test_combined_ops_exhaustive(op):
    report = membership_oracle(op, 3, 3, maxlen=8, exhaustive=True)
    assert report.disagreements == 0, report.sample


@pytest.mark.slow
@pytest.mark.parametrize("op", COMBINED_OPS)
def test_combined_ops_sampled_at_four_five(op):
    report = membership_oracle(op, 4, 5, count=500, maxlen=12, seed=7)
    assert report.disagreements == 0, report.sample
