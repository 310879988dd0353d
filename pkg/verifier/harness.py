import csv
import io
import json
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from automata.bounds import BOUND_TABLE, BoundStatus, OperationId, evaluate, has_alternate, recipe
from automata.core import write_dfa
from automata.determinize import SubsetCapExceeded
from verifier.pipeline import PipelineResult, run_pipeline

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    MATCH = "match"
    BELOW = "below-bound"
    ABOVE = "ABOVE-BOUND"
    OPEN = "open-measured"
    SKIPPED = "skipped: cap"


class VerificationCell(BaseModel):
    op: OperationId
    status: BoundStatus
    m: Optional[int]
    n: int
    expected: Optional[int]
    measured: Optional[int]
    verdict: Verdict
    millis: int
    witnesses: str
    alternate: bool = False
    expect: Optional[str] = None
    note: Optional[str] = None
    diagnostics: Optional[str] = None

    @property
    def failing(self) -> bool:
        """ABOVE-BOUND always fails; a theorem cell falling short fails unless it is an alternate pair."""
        if self.verdict is Verdict.ABOVE:
            return True
        return self.verdict is Verdict.BELOW and self.status is BoundStatus.THEOREM and not self.alternate

    @property
    def finding(self) -> bool:
        """A shortfall that refutes a conjecture or an alternate pair expected to match."""
        if self.verdict is not Verdict.BELOW:
            return False
        if self.alternate:
            return self.expect == "match"
        return self.status is BoundStatus.CONJECTURE


# ------------------------------
#         Single Cells
# ------------------------------


def _diagnostics(result: PipelineResult, labels: int) -> str:
    lines = ["minimal result:", write_dfa(result.minimal).rstrip("\n")]
    audit = result.audit
    if audit is not None and labels:
        lines.append(f"subset labels (first {min(labels, audit.base.size)} of {audit.base.size}):")
        for state in range(min(labels, audit.base.size)):
            final = " final" if state in audit.base.finals else ""
            lines.append(f"  {state}: {audit.label_text(state)}{final}")
    return "\n".join(lines)


def _verdict(measured: int, expected: Optional[int]) -> Verdict:
    if expected is None:
        return Verdict.OPEN
    if measured == expected:
        return Verdict.MATCH
    return Verdict.ABOVE if measured > expected else Verdict.BELOW


def _log_cell(cell: VerificationCell) -> None:
    where = f"{cell.op.label} ({cell.m if cell.m is not None else '-'}, {cell.n})"
    if cell.alternate:
        where += " [alternate]"
    message = (
        f"{where}: measured {cell.measured}, expected {cell.expected}, "
        f"{cell.verdict.value} in {cell.millis} ms"
    )
    if cell.verdict is Verdict.ABOVE:
        logger.error(f"ABOVE-BOUND {message}; witnesses {cell.witnesses}")
    elif cell.verdict is Verdict.SKIPPED:
        logger.warning(f"{where}: skipped ({cell.note})")
    elif cell.failing:
        logger.error(message)
    elif cell.finding:
        logger.warning(f"finding: {message}")
    elif cell.verdict is Verdict.BELOW:
        logger.warning(f"expected shortfall: {message}")
    else:
        logger.info(message)


def verify_cell(
    op: OperationId,
    m: int,
    n: int,
    cap: Optional[int] = None,
    minimizer: str = "hopcroft",
    measuring: bool = False,
    alternate: bool = False,
    diagnostic_labels: int = 20,
) -> VerificationCell:
    """Run op's pipeline on its witnesses at (m, n) and compare the minimal size with the bound."""
    entry = BOUND_TABLE[OperationId(op)]
    r = recipe(entry.op, m, n, measuring=measuring, alternate=alternate)
    expected = None if entry.formula is None else evaluate(entry.op, m, n)
    shown_m = m if entry.arity == 2 else None
    expect = entry.alternate.expect if alternate and entry.alternate is not None else None

    start = time.perf_counter()
    try:
        result = run_pipeline(r, minimizer=minimizer, cap=cap)
    except SubsetCapExceeded as e:
        cell = VerificationCell(
            op=entry.op, status=r.status, m=shown_m, n=n, expected=expected, measured=None,
            verdict=Verdict.SKIPPED, millis=int((time.perf_counter() - start) * 1000),
            witnesses=r.witness_names, alternate=alternate, expect=expect, note=str(e),
        )
        _log_cell(cell)
        return cell
    millis = int((time.perf_counter() - start) * 1000)

    measured = result.minimal.size
    verdict = _verdict(measured, expected)
    diagnostics = None
    if verdict in (Verdict.ABOVE, Verdict.BELOW) and not (alternate and expect == "shortfall"):
        diagnostics = _diagnostics(result, diagnostic_labels)

    cell = VerificationCell(
        op=entry.op, status=r.status, m=shown_m, n=n, expected=expected, measured=measured,
        verdict=verdict, millis=millis, witnesses=r.witness_names, alternate=alternate,
        expect=expect, diagnostics=diagnostics,
    )
    _log_cell(cell)
    return cell


# ------------------------------
#            Tables
# ------------------------------

_Task = Tuple[OperationId, int, int, Optional[int], str, bool, bool, int]


def _run_task(task: _Task) -> VerificationCell:
    op, m, n, cap, minimizer, measuring, alternate, labels = task
    return verify_cell(op, m, n, cap=cap, minimizer=minimizer, measuring=measuring,
                       alternate=alternate, diagnostic_labels=labels)


class TableResult(BaseModel):
    cells: List[VerificationCell]
    summary: Dict[str, int]

    @property
    def exit_code(self) -> int:
        return exit_code(self.cells)


def summarize(cells: Sequence[VerificationCell]) -> Dict[str, int]:
    counts = Counter(cell.verdict.value for cell in cells)
    summary = {verdict.value: counts.get(verdict.value, 0) for verdict in Verdict}
    summary["failing"] = sum(cell.failing for cell in cells)
    summary["findings"] = sum(cell.finding for cell in cells)
    return summary


def exit_code(cells: Iterable[VerificationCell]) -> int:
    return 1 if any(cell.failing for cell in cells) else 0


def _sorted_ops(ops: Iterable[OperationId]) -> List[OperationId]:
    chosen = {OperationId(op) for op in ops}
    return [op for op in OperationId if op in chosen]


def verify_table(
    ops: Iterable[OperationId],
    m_values: Iterable[int],
    n_values: Iterable[int],
    jobs: int = 1,
    cap: Optional[int] = None,
    minimizer: str = "hopcroft",
    alternates: bool = False,
    diagnostic_labels: int = 20,
) -> TableResult:
    """All cells for ops over the size ranges, ordered by (op, m, n); alternates follow their main cell."""
    m_values, n_values = list(m_values), list(n_values)
    for size in m_values + n_values:
        if not 3 <= size <= 12:
            raise ValueError(f"sizes must lie in [3, 12], got {size}")

    tasks: List[_Task] = []
    for op in _sorted_ops(ops):
        entry = BOUND_TABLE[op]
        measuring = entry.status is BoundStatus.OPEN
        sizes = [(n, n) for n in n_values] if entry.arity == 1 else [(m, n) for m in m_values for n in n_values]
        for m, n in sizes:
            tasks.append((op, m, n, cap, minimizer, measuring, False, diagnostic_labels))
            if alternates and has_alternate(op, m, n):
                tasks.append((op, m, n, cap, minimizer, measuring, True, diagnostic_labels))

    logger.info(f"verifying {len(tasks)} cells with {jobs} job(s)")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_run_task, tasks))
    else:
        cells = [_run_task(task) for task in tasks]

    summary = summarize(cells)
    logger.info(f"summary: {summary}")
    return TableResult(cells=cells, summary=summary)


def conjecture_scan(
    pairs: Iterable[Tuple[int, int]],
    bit_cap: int = 26,
    cap: Optional[int] = None,
    minimizer: str = "hopcroft",
    difference: bool = False,
) -> List[VerificationCell]:
    """
    (K∩L)* with the five-letter witnesses at each (m, n); with `difference`, also
    (K\\L)* with the six-letter pair. Pairs with m*n above the bit cap are skipped.
    """
    ops = [OperationId.INTER_STAR] + ([OperationId.MINUS_STAR] if difference else [])
    cells = []
    for m, n in pairs:
        for op in ops:
            if m * n > bit_cap:
                r = recipe(op, m, n)
                cell = VerificationCell(
                    op=op, status=r.status, m=m, n=n, expected=evaluate(op, m, n), measured=None,
                    verdict=Verdict.SKIPPED, millis=0, witnesses=r.witness_names,
                    note=f"m*n = {m * n} exceeds the bit cap {bit_cap}",
                )
                _log_cell(cell)
                cells.append(cell)
                continue
            cells.append(verify_cell(op, m, n, cap=cap, minimizer=minimizer))
    return cells


# ------------------------------
#            Reports
# ------------------------------

CSV_FIELDS = ["op", "status", "m", "n", "expected", "measured", "verdict", "millis"]


def _csv_row(cell: VerificationCell, timing: bool) -> Dict[str, object]:
    return {
        "op": cell.op.value + (" [alternate]" if cell.alternate else ""),
        "status": cell.status.value,
        "m": "" if cell.m is None else cell.m,
        "n": cell.n,
        "expected": "open" if cell.expected is None else cell.expected,
        "measured": "" if cell.measured is None else cell.measured,
        "verdict": cell.verdict.value,
        "millis": cell.millis if timing else 0,
    }


def render_csv(cells: Sequence[VerificationCell], timing: bool = True) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for cell in cells:
        writer.writerow(_csv_row(cell, timing))
    return out.getvalue()


def render_json(cells: Sequence[VerificationCell], timing: bool = True) -> str:
    objects = []
    for cell in cells:
        data = cell.model_dump(mode="json")
        if not timing:
            data["millis"] = 0
        objects.append(data)
    return json.dumps(objects, indent=2, ensure_ascii=False) + "\n"


def render_text(cells: Sequence[VerificationCell], timing: bool = True) -> str:
    lines = [f"{'op':<22} {'status':<10} {'m':>3} {'n':>3} {'expected':>10} {'measured':>10}  verdict"]
    for cell in cells:
        row = _csv_row(cell, timing)
        label = cell.op.label + (" [alt]" if cell.alternate else "")
        line = (
            f"{label:<22} {row['status']:<10} {str(row['m']):>3} {row['n']:>3} "
            f"{str(row['expected']):>10} {str(row['measured']):>10}  {row['verdict']}"
        )
        if timing:
            line += f" ({row['millis']} ms)"
        if cell.verdict is Verdict.ABOVE:
            line = "!!! " + line
        if cell.finding:
            line += "  [finding]"
        if cell.note:
            line += f"  ({cell.note})"
        lines.append(line)
        if cell.diagnostics:
            lines.extend("    " + d for d in cell.diagnostics.splitlines())
    summary = summarize(cells)
    lines.append(", ".join(f"{key}: {value}" for key, value in summary.items()))
    return "\n".join(lines) + "\n"


RENDERERS = {"text": render_text, "csv": render_csv, "json": render_json}
