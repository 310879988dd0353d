import logging

from flask import Flask, jsonify, request

from automata.bounds import BOUND_TABLE, NoKnownBoundError, OperationId, evaluate
from automata.core import write_dfa
from automata.witnesses import build, monoid_size, parse_witness
from verifier.harness import verify_cell
from verifier.settings import load_settings

logger = logging.getLogger(__name__)

settings = load_settings()
app = Flask(__name__)


def _sizes():
    """Read op, m and n from the query string; m defaults to 3 for unary operations."""
    op = OperationId.parse(request.args.get("op", ""))
    m = request.args.get("m", "3")
    n = request.args.get("n")
    if n is None or not m.isdigit() or not n.isdigit():
        raise ValueError("m and n must be non-negative integers")
    return op, int(m), int(n)


@app.route("/api/witness", methods=["GET"])
def get_witness():
    spec = request.args.get("spec")
    if not spec:
        return jsonify({"error": "Missing witness spec"}), 400
    try:
        dfa = build(parse_witness(spec))
    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    return jsonify({"spec": spec, "size": dfa.size, "dfa": write_dfa(dfa)}), 200


@app.route("/api/bound", methods=["GET"])
def get_bound():
    try:
        op, m, n = _sizes()
        entry = BOUND_TABLE[op]
        value = evaluate(op, m, n)
    except NoKnownBoundError as e:
        return jsonify({"error": str(e), "status": "open"}), 400
    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    return jsonify({
        "op": op.value,
        "label": op.label,
        "status": entry.status.value,
        "formula": entry.formula,
        "m": m,
        "n": n,
        "value": value,
    }), 200


@app.route("/api/complexity", methods=["GET"])
def get_complexity():
    try:
        op, m, n = _sizes()
    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    if not (3 <= m <= 12 and 3 <= n <= 12):
        return jsonify({"error": "m and n must lie in [3, 12]"}), 400

    try:
        cell = verify_cell(op, m, n, cap=settings.cap, minimizer=settings.minimizer, measuring=True)
    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        logger.error(f"complexity {op.value} ({m}, {n}) failed: {e}")
        return jsonify({"error": f"Unexpected error: {str(e)}"}), 500
    return jsonify(cell.model_dump(mode="json")), 200


@app.route("/api/monoid", methods=["GET"])
def get_monoid():
    spec = request.args.get("spec")
    if not spec:
        return jsonify({"error": "Missing witness spec"}), 400
    try:
        dfa = build(parse_witness(spec))
        letters = request.args.get("letters") or "".join(dfa.alphabet)
        size = monoid_size(dfa, letters)
    except ValueError as e:
        return jsonify({"error": str(e)}), 400
    return jsonify({"spec": spec, "letters": letters, "size": size}), 200


if __name__ == "__main__":
    logging.basicConfig(level=settings.log_level)
    app.run(debug=True, port=3000)
