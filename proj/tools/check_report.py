#!/usr/bin/env python3
"""Recompute a bench report's summary from its per-page CSV and compare."""

import argparse
import csv
import json
import math
import statistics
import sys
from collections import defaultdict


def recompute(rows):
    html = {r["page"]: r for r in rows if r["variant"] == "html"}
    groups = defaultdict(list)
    for r in rows:
        label = r["variant"] if not r["fidelity"] else f'{r["variant"]}-{r["fidelity"]}'
        groups[label].append(r)
    variants = {}
    for label, rs in groups.items():
        plt = [float(r["plt_s"]) for r in rs]
        variants[label] = {
            "pages": len(rs),
            "median_plt_s": statistics.median(plt),
            "median_size_bytes": statistics.median(int(r["size_bytes"]) for r in rs),
            "median_requests": statistics.median(int(r["requests"]) for r in rs),
        }

    def red(h, m):
        return 0.0 if h == 0 else (h - m) / h

    reductions = {}
    for fid in ("low", "medium", "high"):
        rs = [r for r in rows if r["fidelity"] == fid]
        if not rs:
            continue
        req, size, plt = [], [], []
        for r in rs:
            h = html[r["page"]]
            req.append(red(int(h["requests"]), int(r["requests"])))
            size.append(red(int(h["size_bytes"]), int(r["size_bytes"])))
            plt.append(red(float(h["plt_s"]), float(r["plt_s"])))
        reductions[fid] = {
            "median_requests": statistics.median(req),
            "median_size": statistics.median(size),
            "median_plt": statistics.median(plt),
            "min_plt": min(plt),
        }
    return variants, reductions


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("report_dir")
    args = ap.parse_args()
    with open(f"{args.report_dir}/pages.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    with open(f"{args.report_dir}/summary.json") as f:
        summary = json.load(f)
    variants, reductions = recompute(rows)

    problems = []

    def close(a, b):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)

    got_variants = {v["label"]: v for v in summary["variants"]}
    if set(got_variants) != set(variants):
        problems.append(f"variant labels {sorted(got_variants)} != {sorted(variants)}")
    for label, want in variants.items():
        got = got_variants.get(label, {})
        for key, value in want.items():
            if key not in got or not close(got[key], value):
                problems.append(f"{label}.{key}: summary {got.get(key)} != recomputed {value}")
    got_red = {r["fidelity"]: r for r in summary["reductions"]}
    if set(got_red) != set(reductions):
        problems.append(f"reduction fidelities {sorted(got_red)} != {sorted(reductions)}")
    for fid, want in reductions.items():
        got = got_red.get(fid, {})
        for key, value in want.items():
            if key not in got or not close(got[key], value):
                problems.append(f"{fid}.{key}: summary {got.get(key)} != recomputed {value}")
    if summary["pages"] != len({r["page"] for r in rows}):
        problems.append("page count differs")

    for p in problems:
        print(p, file=sys.stderr)
    print(f"{len(rows)} rows, {len(variants)} variants: {'mismatch' if problems else 'summary matches'}")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
