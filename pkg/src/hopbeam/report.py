"""Deterministic serialization of pipeline and sweep results."""

from __future__ import annotations

import json
import math

from .pipeline import PipelineResult, ResultRow

CSV_HEADER = ("scheme,variable,value,min_rate_bits,gamma_star_bits,groups,"
              "outer_iterations,bisection_probes,fixed_point_iterations,"
              "user_rates,error")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "cont"
        return format(x, ".17e")
    return str(x)


def _fmt_rates(rates) -> str:
    if not rates:
        return ""
    return ";".join(f"{k}:{format(v, '.17e')}" for k, v in sorted(rates.items()))


def rows_to_csv(rows: list[ResultRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.scheme, r.variable, _fmt(r.value), _fmt(r.objective),
            _fmt(r.gamma_star), _fmt(r.groups), _fmt(r.outer_iterations),
            _fmt(r.bisection_probes), _fmt(r.fixed_point_iterations),
            _fmt_rates(r.user_rates), r.error or ""]))
    return "\n".join(lines) + "\n"


def result_to_row(result: PipelineResult, variable: str = "none",
                  value: float = 0.0) -> ResultRow:
    return ResultRow(result.scheme, variable, value, result.objective,
                     result.report.gamma_star, result.cover.count,
                     result.report.counters.outer_iterations,
                     result.report.counters.bisection_probes,
                     result.report.counters.fixed_point_iterations,
                     result.user_rates, result.wall_ms)


def paths_document(result: PipelineResult) -> dict:
    doc = {}
    for k in sorted(result.paths):
        p = result.paths[k]
        if p is None:
            doc[str(k)] = None
        else:
            doc[str(k)] = {
                "ris_sequence": list(p.ris_sequence),
                "total_weight": p.total_weight,
                "predicted_gain": p.predicted_gain,
            }
    return {"scheme": result.scheme, "paths": doc,
            "unreachable_users": result.unreachable}


def groups_document(result: PipelineResult) -> dict:
    counts = result.cover.membership_counts()
    return {
        "groups": [list(g) for g in result.cover.groups],
        "membership_counts": {str(k): counts[k] for k in sorted(counts)},
    }


def schedule_document(result: PipelineResult) -> dict:
    return {
        "time_shares": [float(t) for t in result.schedule],
        "gamma_star_bits": result.report.gamma_star,
        "min_rate_bits": result.objective,
        "user_rates_bits": {str(k): v for k, v in sorted(result.user_rates.items())},
        "objective_history": result.objective_history,
    }


def dump_json(doc: dict, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
