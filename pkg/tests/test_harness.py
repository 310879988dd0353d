import json

import pytest

from automata.bounds import BOUND_TABLE, COMBINED_OPS, BoundStatus, OperationId, recipe
from verifier.harness import (
    Verdict,
    VerificationCell,
    _diagnostics,
    conjecture_scan,
    exit_code,
    render_csv,
    render_json,
    render_text,
    verify_cell,
    verify_table,
)
from verifier.pipeline import run_pipeline
from verifier.settings import load_settings

THEOREM_OPS = [op for op, entry in BOUND_TABLE.items() if entry.status is BoundStatus.THEOREM]
# (K\L)* grows as 2**(m*n); it is measured at small sizes only
GRID_OPS = [op for op in THEOREM_OPS if op is not OperationId.MINUS_STAR]
CAP = load_settings().cap


def cell(verdict, status=BoundStatus.THEOREM, alternate=False, expect=None):
    return VerificationCell(
        op=OperationId.K_LSTAR, status=status, m=3, n=3, expected=10, measured=9,
        verdict=verdict, millis=5, witnesses="x / y", alternate=alternate, expect=expect,
    )


@pytest.mark.parametrize(
    "op, expected",
    [
        (OperationId.K_UNION_LSTAR, 93),
        (OperationId.K_INTER_LSTAR, 93),
        (OperationId.KSTAR_UNION_LSTAR, 254),
        (OperationId.KSTAR_MINUS_LSTAR, 254),
        (OperationId.KSTAR_SYMDIFF_LSTAR, 254),
        (OperationId.K_LSTAR, 88),
        (OperationId.KSTAR_L, 281),
        (OperationId.KSTAR_LSTAR, 226),
        (OperationId.KL_STAR, 269),
        (OperationId.UNION_STAR, 233),
        (OperationId.BOOL_UNION, 20),
    ],
)
def test_cells_at_four_five(op, expected):
    result = verify_cell(op, 4, 5)
    assert result.expected == expected
    assert result.measured == expected
    assert result.verdict is Verdict.MATCH
    assert not result.failing


def test_unary_cells_hide_m():
    result = verify_cell(OperationId.STAR, 3, 4)
    assert result.m is None
    assert result.measured == 12
    assert result.witnesses == "U_4(a,b,∅)"


def test_star_of_product_smallest_cell():
    result = verify_cell(OperationId.KL_STAR, 3, 3)
    assert (result.expected, result.measured) == (32, 32)


@pytest.mark.parametrize(
    "op, m, n, expected",
    [
        (OperationId.KSTAR_MINUS_LSTAR, 3, 3, 26),
        (OperationId.KSTAR_SYMDIFF_LSTAR, 3, 3, 26),
        (OperationId.KSTAR_SYMDIFF_LSTAR, 3, 5, 116),
    ],
)
def test_starred_left_dialect_meets_bound(op, m, n, expected):
    result = verify_cell(op, m, n)
    assert (result.expected, result.measured) == (expected, expected)


@pytest.mark.parametrize(
    "op, m, n, expected",
    [
        (OperationId.KL_STAR, 3, 5, 128),
        (OperationId.KL_STAR, 5, 5, 550),
        (OperationId.UNION_STAR, 5, 7, 1969),
    ],
)
def test_star_of_concatenation_and_union_within_cap(op, m, n, expected):
    result = verify_cell(op, m, n, cap=CAP)
    assert result.verdict is Verdict.MATCH
    assert result.measured == expected


def test_conjecture_smallest_cells():
    assert verify_cell(OperationId.INTER_STAR, 3, 3).measured == 384
    assert verify_cell(OperationId.INTER_STAR, 3, 4).measured == 3072


def test_difference_star_with_six_letters():
    result = verify_cell(OperationId.MINUS_STAR, 3, 3)
    assert result.measured == 384
    assert result.verdict is Verdict.MATCH


def test_open_entry_is_measured_not_asserted():
    result = verify_cell(OperationId.SYMDIFF_STAR, 3, 3, measuring=True)
    assert result.expected is None
    assert result.measured is not None
    assert result.verdict is Verdict.OPEN
    assert not result.failing


@pytest.mark.parametrize("m, n", [(3, 3), (4, 5), (5, 4)])
def test_intersection_with_union_witnesses_falls_short(m, n):
    result = verify_cell(OperationId.K_INTER_LSTAR, m, n, alternate=True)
    assert result.alternate
    assert result.measured < result.expected
    assert result.verdict is Verdict.BELOW
    assert not result.failing
    assert not result.finding
    assert result.diagnostics is None


def test_difference_with_union_witnesses_is_not_a_failure():
    result = verify_cell(OperationId.K_MINUS_LSTAR, 4, 5, alternate=True)
    assert result.alternate
    assert result.measured <= result.expected
    assert not result.failing
    assert result.diagnostics is None


def test_plain_streams_for_boolean_ops():
    result = verify_cell(OperationId.BOOL_UNION, 3, 4, alternate=True)
    assert result.measured == 12


def test_cap_marks_cell_skipped():
    result = verify_cell(OperationId.INTER_STAR, 3, 3, cap=100)
    assert result.verdict is Verdict.SKIPPED
    assert result.measured is None
    assert "cap of 100" in result.note
    assert not result.failing
    assert exit_code([result]) == 0


def test_failing_and_finding():
    assert cell(Verdict.ABOVE).failing
    assert cell(Verdict.ABOVE, status=BoundStatus.CONJECTURE).failing
    assert cell(Verdict.BELOW).failing
    assert not cell(Verdict.BELOW, status=BoundStatus.CONJECTURE).failing
    assert cell(Verdict.BELOW, status=BoundStatus.CONJECTURE).finding
    assert not cell(Verdict.BELOW, alternate=True, expect="shortfall").failing
    assert not cell(Verdict.BELOW, alternate=True, expect="shortfall").finding
    assert cell(Verdict.BELOW, alternate=True, expect="match").finding
    assert exit_code([cell(Verdict.MATCH), cell(Verdict.ABOVE)]) == 1


def test_diagnostics_show_subset_labels():
    result = run_pipeline(recipe(OperationId.STAR, 3, 3))
    text = _diagnostics(result, 3)
    assert text.startswith("minimal result:\ndfa 6\n")
    assert "0: {s} final" in text
    assert "subset labels (first 3 of" in text


def test_table_ordering_and_summary():
    table = verify_table([OperationId.K_LSTAR, OperationId.STAR], [3, 4], [3])
    assert [(c.op, c.m, c.n) for c in table.cells] == [
        (OperationId.STAR, None, 3),
        (OperationId.K_LSTAR, 3, 3),
        (OperationId.K_LSTAR, 4, 3),
    ]
    assert table.summary["match"] == 3
    assert table.exit_code == 0


def test_table_with_alternates():
    table = verify_table([OperationId.BOOL_INTERSECTION], [3, 4], [4], alternates=True)
    assert [(c.m, c.alternate) for c in table.cells] == [(3, False), (3, True), (4, False)]


def test_table_rejects_sizes_out_of_range():
    with pytest.raises(ValueError):
        verify_table([OperationId.STAR], [3], [2])
    with pytest.raises(ValueError):
        verify_table([OperationId.PRODUCT], [13], [3])


def test_worker_pool_matches_sequential_run():
    ops = [OperationId.K_UNION_LSTAR, OperationId.KSTAR_L]
    sequential = verify_table(ops, [3, 4], [3, 4])
    pooled = verify_table(ops, [3, 4], [3, 4], jobs=2)
    assert render_csv(pooled.cells, timing=False) == render_csv(sequential.cells, timing=False)


def test_conjecture_scan_respects_bit_cap():
    cells = conjecture_scan([(3, 3), (3, 4)], bit_cap=9, difference=True)
    assert [(c.op, c.n, c.verdict) for c in cells] == [
        (OperationId.INTER_STAR, 3, Verdict.MATCH),
        (OperationId.MINUS_STAR, 3, Verdict.MATCH),
        (OperationId.INTER_STAR, 4, Verdict.SKIPPED),
        (OperationId.MINUS_STAR, 4, Verdict.SKIPPED),
    ]
    assert cells[2].expected == 3072
    assert "bit cap 9" in cells[2].note


def test_reports_are_deterministic_without_timing():
    cells = verify_table([OperationId.REVERSAL, OperationId.PRODUCT], [3], [3]).cells
    again = verify_table([OperationId.REVERSAL, OperationId.PRODUCT], [3], [3]).cells
    assert render_text(cells, timing=False) == render_text(again, timing=False)
    assert render_json(cells, timing=False) == render_json(again, timing=False)

    lines = render_csv(cells, timing=False).splitlines()
    assert lines == [
        "op,status,m,n,expected,measured,verdict,millis",
        "reversal,theorem,,3,8,8,match,0",
        "product,theorem,3,3,20,20,match,0",
    ]
    objects = json.loads(render_json(cells, timing=False))
    assert objects[0]["verdict"] == "match"
    assert objects[1]["witnesses"] == "U_3(a,b,c) / U_3(a,b,c)"


def test_open_cells_render_open():
    cells = verify_table([OperationId.SYMDIFF_STAR], [3], [3]).cells
    assert render_csv(cells, timing=False).splitlines()[1].startswith("symdiff-star,open,3,3,open,")


@pytest.mark.slow
def test_theorem_ops_meet_their_bounds():
    table = verify_table(GRID_OPS, range(3, 7), range(3, 7), cap=CAP)
    assert [c for c in table.cells if c.verdict is not Verdict.MATCH] == []


@pytest.mark.slow
def test_basic_bounds_on_wider_range():
    table = verify_table([OperationId.STAR, OperationId.REVERSAL], [3], range(3, 9), cap=CAP)
    assert all(c.verdict is Verdict.MATCH for c in table.cells)


@pytest.mark.slow
def test_concatenation_family_up_to_seven():
    ops = [OperationId.K_LSTAR, OperationId.KSTAR_L, OperationId.KSTAR_LSTAR, OperationId.KL_STAR, OperationId.UNION_STAR]
    table = verify_table(ops, range(3, 8), range(3, 8), cap=CAP)
    assert len(table.cells) == len(ops) * 25
    assert all(c.verdict is Verdict.MATCH for c in table.cells)


@pytest.mark.slow
def test_conjecture_at_three_five():
    result = verify_cell(OperationId.INTER_STAR, 3, 5)
    assert result.measured == 24576


def test_combined_ops_are_theorems():
    assert set(COMBINED_OPS) <= set(THEOREM_OPS)
