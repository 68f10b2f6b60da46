"""Structured reports and their JSON / text renderings."""
from __future__ import annotations

import json

import numpy as np

from .criterion import ExpectedWreath, Inconclusive, StrictlySmaller, criterion, expected_group
from .errors import NotAnalogous, SparseGaloisError
from .polytope import lattice_mixed_volume
from .tuples import SupportTuple, essential_vectors, is_ample, is_analogous, normalize, reduction

SCHEMA_VERSION = 1
SAFE_INT = 2 ** 53


def _safe(obj):
    """Plain JSON types; integers beyond 53 bits become decimal strings."""
    if isinstance(obj, dict):
        return {str(k): _safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        v = int(obj)
        return str(v) if abs(v) >= SAFE_INT else v
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_safe(report), sort_keys=True, indent=2) + "\n"


def from_json(text: str) -> dict:
    return json.loads(text)


def to_text(report: dict) -> str:
    lines: list[str] = []

    def emit(key, value, indent):
        pad = "  " * indent
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            for k in sorted(value):
                emit(k, value[k], indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{pad}{key}:")
            for i, item in enumerate(value):
                emit(f"- [{i}]", item, indent + 1)
        else:
            lines.append(f"{pad}{key}: {json.dumps(value)}")

    safe = _safe(report)
    for k in sorted(safe):
        emit(k, safe[k], 0)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- sections


def _verdict_section(v) -> dict:
    out = {"kind": v.kind, "expected_order": v.group.order}
    if isinstance(v, ExpectedWreath):
        out["condition"] = v.condition
    elif isinstance(v, StrictlySmaller):
        out.update(witness_b=list(v.b), witness_p=v.p, per_vector=v.per_vector)
    elif isinstance(v, Inconclusive):
        out.update(lower=[list(x) for x in v.lower.basis()], upper=[list(x) for x in v.upper.basis()],
                   note=v.note)
    return out


def analyze_report(t: SupportTuple) -> dict:
    nt = normalize(t)
    red = reduction(nt)
    group = expected_group(nt)
    verdict = criterion(nt)
    data = essential_vectors(red.reduced)
    try:
        analogous = is_analogous(nt)
        ample = is_ample(nt) if analogous else None
    except (NotAnalogous, SparseGaloisError):
        analogous, ample = False, None
    table = [{"gamma": list(r.gamma), "K": list(r.K), "d_prime": r.d_prime, "d_second": r.d_second,
              "d": r.d, "in_E0": r.in_E0, "tuple_id": r.tuple_id} for r in data.records]
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "input": {"n": t.dim, "supports": t.to_lists()},
        "reduction": {
            "normalized": nt.to_lists(),
            "invariants": list(red.invariants),
            "m": red.index,
            "L": red.L.to_rows(),
            "reduced": red.reduced.to_lists(),
        },
        "mixed_volume": lattice_mixed_volume(*nt.sets),
        "d": group.d,
        "analogous": analogous,
        "ample": ample,
        "essential": table,
        "verdict": _verdict_section(verdict),
    }


def monodromy_section(run, wreath, poisson: list) -> dict:
    statuses = [r.status for r in run.records]
    return {
        "loops_used": run.loops_used,
        "loops_rejected": statuses.count("rejected"),
        "signature_mismatches": statuses.count("signature-mismatch"),
        "group_order": run.order(),
        "expected_order": run.expected.order,
        "index": wreath.index,
        "generators": [list(g) for g in run.group.generators if g != tuple(range(run.degree))],
        "blocks": [list(b) for b in wreath.blocks],
        "block_sizes": wreath.block_sizes,
        "contained_in_wreath": wreath.contained,
        "all_generators_even": wreath.all_even,
        "solution_lattice_status": run.lattice_status,
        "solution_lattice_generators": len(run.lattice_generators),
        "poisson": [{"b": list(p.b), "modulus": p.modulus, "loops_checked": p.checked} for p in poisson],
        "budget_exhausted": run.budget_exhausted,
    }
