"""JSON instance documents and report documents.

Instance document keys: ``points``, ``metric``, ``relation``, ``map``,
``phi`` and optional ``start``.  Finite metric tables are written as decimal
strings (``repr`` of the float) so they read back bit for bit.  All
user-facing output names points by label.
"""

from __future__ import annotations

import json
from pathlib import Path as FsPath
from typing import Any

from . import __version__
from .certifier import HypothesisReport, UniquenessCertificate
from .control import ControlFunction, from_spec
from .metric import LineRelation, MetricTable, NumericLine
from .relations import Carrier, FiniteRelation, SelfMap, Witness
from .solver import ContractionReport, LineMap, ProblemInstance, SolveResult


class InstanceError(ValueError):
    """Malformed instance document; ``key`` is the path of the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _req(doc: dict, key: str, where: str = "") -> Any:
    path = f"{where}.{key}" if where else key
    if not isinstance(doc, dict):
        raise InstanceError(where or "<root>", "expected an object")
    if key not in doc:
        raise InstanceError(path, "missing required key")
    return doc[key]


def _label_index(carrier: Carrier, label: Any, key: str) -> int:
    if not isinstance(label, str):
        raise InstanceError(key, f"expected a point label, got {label!r}")
    try:
        return carrier.index(label)
    except KeyError:
        raise InstanceError(key, f"unknown point label {label!r}") from None


def _float(v: Any, key: str) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        raise InstanceError(key, f"expected a number or decimal string, got {v!r}") from None


def parse_instance(doc: dict) -> ProblemInstance:
    if not isinstance(doc, dict):
        raise InstanceError("<root>", "instance document must be a JSON object")
    metric = _req(doc, "metric")
    kind = _req(metric, "kind", "metric")
    phi_doc = _req(doc, "phi")
    relation_doc = _req(doc, "relation")
    map_doc = _req(doc, "map")
    try:
        phi = from_spec(_req(phi_doc, "family", "phi"), phi_doc.get("params", {}))
    except (TypeError, ValueError) as exc:
        raise InstanceError("phi", str(exc)) from None

    if kind == "interval":
        line = NumericLine(_float(_req(metric, "lower", "metric"), "metric.lower"),
                           _float(_req(metric, "upper", "metric"), "metric.upper"))
        rkind = _req(relation_doc, "kind", "relation")
        try:
            pairs = tuple(
                (_float(a, f"relation.pairs[{i}][0]"), _float(b, f"relation.pairs[{i}][1]"))
                for i, (a, b) in enumerate(relation_doc.get("pairs", []))
            )
            rel = LineRelation(rkind, pairs)
        except ValueError as exc:
            raise InstanceError("relation.kind", str(exc)) from None
        if _req(map_doc, "kind", "map") != "formula":
            raise InstanceError("map.kind", "an interval needs a formula map")
        try:
            fmap = LineMap(
                _req(map_doc, "formula", "map"),
                _float(map_doc.get("alpha", 0.5), "map.alpha"),
                _float(map_doc.get("jump", 0.5), "map.jump"),
            )
        except ValueError as exc:
            raise InstanceError("map.formula", str(exc)) from None
        start = doc.get("start")
        start = None if start is None else _float(start, "start")
        try:
            return ProblemInstance(line, rel, fmap, phi, start)
        except ValueError as exc:
            raise InstanceError("start", str(exc)) from None

    labels = _req(doc, "points")
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise InstanceError("points", "expected a list of label strings")
    try:
        carrier = Carrier(tuple(labels))
    except ValueError as exc:
        raise InstanceError("points", str(exc)) from None
    n = carrier.size

    if kind == "path":
        space = MetricTable.path(carrier)
    elif kind == "uniform":
        space = MetricTable.uniform(carrier)
    elif kind == "table":
        rows = _req(metric, "rows", "metric")
        if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
            raise InstanceError("metric.rows", f"expected a {n}x{n} matrix")
        space = MetricTable.from_matrix(
            carrier, [[_float(v, f"metric.rows[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(rows)]
        )
    else:
        raise InstanceError("metric.kind", f"unknown metric kind {kind!r}")

    rkind = _req(relation_doc, "kind", "relation")
    if rkind == "universal":
        rel = FiniteRelation.universal(carrier)
    elif rkind == "pairs":
        raw = _req(relation_doc, "pairs", "relation")
        pairs = []
        for i, p in enumerate(raw):
            if not isinstance(p, list) or len(p) != 2:
                raise InstanceError(f"relation.pairs[{i}]", "expected a [label, label] pair")
            pairs.append((_label_index(carrier, p[0], f"relation.pairs[{i}][0]"),
                          _label_index(carrier, p[1], f"relation.pairs[{i}][1]")))
        rel = FiniteRelation.from_pairs(carrier, pairs)
    elif rkind in ("leq", "geq"):
        # order of the point list
        rel = FiniteRelation.from_pairs(
            carrier, [(i, j) for i in range(n) for j in range(n) if (i <= j if rkind == "leq" else i >= j)]
        )
    else:
        raise InstanceError("relation.kind", f"unknown relation kind {rkind!r}")

    if _req(map_doc, "kind", "map") != "table":
        raise InstanceError("map.kind", "a finite space needs a table map")
    image = _req(map_doc, "image", "map")
    if isinstance(image, dict):
        missing = [s for s in labels if s not in image]
        if missing:
            raise InstanceError(f"map.image.{missing[0]}", "missing image")
        img = [_label_index(carrier, image[s], f"map.image.{s}") for s in labels]
    elif isinstance(image, list) and len(image) == n:
        img = [_label_index(carrier, v, f"map.image[{i}]") for i, v in enumerate(image)]
    else:
        raise InstanceError("map.image", f"expected {n} images")
    start = doc.get("start")
    start = None if start is None else _label_index(carrier, start, "start")
    return ProblemInstance(space, rel, SelfMap(carrier, tuple(img)), phi, start)


def load_instance(path: str | FsPath) -> ProblemInstance:
    """Read and parse an instance file.

    JSON syntax errors are re-raised as ``InstanceError`` keyed by line/column.
    """
    text = FsPath(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return parse_instance(doc)


def _phi_doc(phi: ControlFunction) -> dict:
    return {"family": phi.family, "params": phi.params()}


def instance_document(inst: ProblemInstance) -> dict:
    if not inst.finite:
        doc: dict[str, Any] = {
            "metric": {"kind": "interval", "lower": inst.space.lower, "upper": inst.space.upper},
            "relation": {"kind": inst.relation.kind},
            "map": {"kind": "formula", "formula": inst.map.formula},
            "phi": _phi_doc(inst.phi),
        }
        if inst.relation.kind == "pairs":
            doc["relation"]["pairs"] = [list(p) for p in inst.relation.pairs]
        if inst.map.formula == "alpha*x":
            doc["map"]["alpha"] = inst.map.alpha
        if inst.map.formula == "step":
            doc["map"]["jump"] = inst.map.jump
        if inst.start is not None:
            doc["start"] = inst.start
        return doc
    labels = list(inst.space.carrier.labels)
    doc = {
        "points": labels,
        "metric": {"kind": "table", "rows": [[repr(v) for v in row] for row in inst.space.dist]},
        "relation": {"kind": "pairs", "pairs": [[labels[i], labels[j]] for i, j in sorted(inst.relation.pairs)]},
        "map": {"kind": "table", "image": {labels[i]: labels[v] for i, v in enumerate(inst.map.image)}},
        "phi": _phi_doc(inst.phi),
    }
    if inst.start is not None:
        doc["start"] = labels[inst.start]
    return doc


def dump_instance(inst: ProblemInstance, path: str | FsPath) -> None:
    FsPath(path).write_text(json.dumps(instance_document(inst), indent=2) + "\n")


# --- reports -------------------------------------------------------------------


def _labeler(inst: ProblemInstance):
    if inst.finite:
        labels = inst.space.carrier.labels
        return lambda i: labels[i]
    return lambda x: x


def _witness_doc(w: Any, lab) -> Any:
    if w is None:
        return None
    if isinstance(w, Witness):
        return {
            "verdict": w.verdict,
            "counterexample": None if w.counterexample is None else [lab(i) for i in w.counterexample],
            "reason": w.reason,
            "support": None if w.support is None else [lab(i) for i in w.support],
        }
    if isinstance(w, ContractionReport):
        return {
            "verdict": w.verdict,
            "worst_pair": None if w.worst_pair is None else [lab(i) for i in w.worst_pair],
            "worst_margin": w.worst_margin,
            "checked_pairs": w.checked_pairs,
        }
    if isinstance(w, tuple):
        return [lab(i) for i in w]
    return str(w)


def hypotheses_section(report: HypothesisReport, inst: ProblemInstance) -> dict:
    lab = _labeler(inst)
    return {
        "passed": report.passed,
        "failed": list(report.failed),
        "conditions": [
            {
                "id": c.id,
                "verdict": c.verdict,
                "justification": c.justification,
                "detail": c.detail,
                "witness": _witness_doc(c.witness, lab),
            }
            for c in report.conditions
        ],
        "diagnostics": list(report.diagnostics),
    }


def solve_section(res: SolveResult, inst: ProblemInstance) -> dict:
    lab = _labeler(inst)
    out = {
        "status": res.status.value,
        "fixed_point": None if res.fixed_point is None else lab(res.fixed_point),
        "start": None if res.start is None else lab(res.start),
        "steps": res.steps,
        "trace": [lab(x) for x in res.trace],
        "residuals": list(res.residuals),
        "trace_exit": res.trace_exit,
        "warnings": list(res.warnings),
    }
    return out


def _pair_key(lab, pair: tuple) -> str:
    return f"{lab(pair[0])}->{lab(pair[1])}"


def uniqueness_section(cert: UniquenessCertificate, inst: ProblemInstance) -> dict:
    lab = _labeler(inst)
    return {
        "unique": cert.unique,
        "fixed_points": [lab(p) for p in cert.fixed_points],
        "image": [lab(p) for p in cert.image],
        "connected": cert.connected,
        "unreachable": None if cert.unreachable is None else [lab(p) for p in cert.unreachable],
        "paths": {_pair_key(lab, k): [lab(z) for z in p.nodes] for k, p in cert.paths.items()},
        "chain_tables": {_pair_key(lab, k): t for k, t in cert.chain_tables.items()},
        "collapse_steps": {_pair_key(lab, k): s for k, s in cert.collapse_steps.items()},
        "alarms": list(cert.alarms),
        "notes": list(cert.notes),
    }


def report_document(
    inst: ProblemInstance,
    report: HypothesisReport | None = None,
    result: SolveResult | None = None,
    cert: UniquenessCertificate | None = None,
    extra: dict | None = None,
    timings: dict | None = None,
) -> dict:
    doc: dict[str, Any] = {}
    if report is not None:
        doc["hypotheses"] = hypotheses_section(report, inst)
    if result is not None:
        doc["solve"] = solve_section(result, inst)
    if cert is not None:
        doc["uniqueness"] = uniqueness_section(cert, inst)
    if extra:
        doc.update(extra)
    meta: dict[str, Any] = {"version": __version__}
    if timings:
        meta["timings"] = timings
    doc["meta"] = meta
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


__all__ = [
    "InstanceError",
    "dump_instance",
    "dumps",
    "hypotheses_section",
    "instance_document",
    "load_instance",
    "parse_instance",
    "report_document",
    "solve_section",
    "uniqueness_section",
]
