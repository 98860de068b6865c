#!/usr/bin/env python3
"""Diagnostic harness: runs the shipped scenario through every scheme and
prints the quantities the acceptance checks care about."""

import sys
import time

import numpy as np

sys.path.insert(0, "src")

from hopbeam import load_scenario, run_pipeline, RunOptions
from hopbeam.pipeline import SweepSpec, run_sweep


def show_structure(scn):
    from hopbeam.pathsel import all_best_paths, build_connection_graph
    from hopbeam.grouping import build_groups
    from hopbeam import baselines

    graph = build_connection_graph(scn)
    paths = all_best_paths(graph)
    print("== multi paths ==")
    for k in sorted(paths):
        p = paths[k]
        seq = p.ris_sequence if p else None
        gain = p.predicted_gain if p else 0.0
        print(f"  user {k:2d}: ris={seq} gain={gain:.3e}")
    conf, cover = build_groups(paths, scn)
    print(f"== multi groups (Q={cover.count}) ==")
    for q, g in enumerate(cover.groups):
        print(f"  G{q}: {g}")
    counts = cover.membership_counts()
    print("  v_k:", {k: v for k, v in sorted(counts.items()) if v > 1})

    spaths = baselines.single_reflection_paths(scn)
    print("== single paths ==")
    for k in sorted(spaths):
        p = spaths[k]
        print(f"  user {k:2d}: ris={p.ris_sequence if p else None} "
              f"gain={p.predicted_gain if p else 0.0:.3e}")
    sconf, scover = build_groups(spaths, scn)
    print(f"== single groups (Q={scover.count}) ==")
    for q, g in enumerate(scover.groups):
        print(f"  G{q}: {g}")
    print("  v_k:", {k: v for k, v in sorted(scover.membership_counts().items())
                     if v > 1})


def run_all(scn, label=""):
    print(f"== objectives {label} ==")
    out = {}
    for scheme in ("multi", "single", "non_ris", "mrt"):
        t0 = time.perf_counter()
        res = run_pipeline(scn, scheme, RunOptions())
        dt = time.perf_counter() - t0
        out[scheme] = res
        rates = res.user_rates
        kmin = min(rates, key=rates.get)
        print(f"  {scheme:8s}: obj={res.objective:8.4f} Q={res.cover.count} "
              f"binding_user={kmin} outer={res.report.counters.outer_iterations} "
              f"[{dt:5.1f}s]")
    return out


def power_sweep(scn, schemes=("multi", "single", "non_ris", "mrt"),
                values=(0, 10, 20, 30, 40, 50)):
    rows = run_sweep(scn, SweepSpec("tx_power_dB", list(values), list(schemes)),
                     RunOptions())
    table = {}
    for r in rows:
        if r.error:
            print(f"  ERROR {r.scheme}@{r.value}: {r.error}")
        table[(r.scheme, r.value)] = r.objective
    print("== P_T sweep (min rate, bits) ==")
    header = "  P_T   " + "".join(f"{s:>10s}" for s in schemes)
    print(header)
    for v in values:
        line = f"  {v:4.0f}  " + "".join(
            f"{table.get((s, v), float('nan')) or 0.0:10.4f}" for s in schemes)
        print(line)
    return table


def element_sweep(scn, values=(10, 20, 40, 80), p_dB=30.0):
    scn_p = scn.replaced(tx_power=10 ** (p_dB / 10))
    rows = run_sweep(scn_p, SweepSpec("elements_per_ris", list(values),
                                      ["multi"]), RunOptions())
    print(f"== element sweep at P_T={p_dB} dBW ==")
    prev = None
    for r in rows:
        inc = "" if prev is None else f"  (+{r.objective - prev:.4f})"
        print(f"  M={int(r.value):3d}: {r.objective:8.4f}{inc}"
              + (f"  ERROR {r.error}" if r.error else ""))
        prev = r.objective
    return rows


def bits_sweep(scn, values=(1, 2, 3, 4, float("inf"))):
    rows = run_sweep(scn, SweepSpec("quantization_bits", list(values),
                                    ["multi"]), RunOptions())
    print("== quantization sweep ==")
    for r in rows:
        print(f"  b={r.value}: {r.objective:8.6f}"
              + (f"  ERROR {r.error}" if r.error else ""))
    return rows


if __name__ == "__main__":
    scn = load_scenario("src/hopbeam/data/paper16.json")
    what = sys.argv[1] if len(sys.argv) > 1 else "all"
    if what in ("all", "structure"):
        show_structure(scn)
    if what in ("all", "obj"):
        run_all(scn)
    if what in ("all", "power"):
        power_sweep(scn)
    if what in ("all", "elements"):
        element_sweep(scn)
    if what in ("all", "bits"):
        bits_sweep(scn)
