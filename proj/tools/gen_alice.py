#!/usr/bin/env python3
"""Writes the intersection-queue fixtures: a two-step perception / planner /
tracker pipeline, with and without 100 pass-through signals per component."""

import argparse
import csv
import json
import random
from pathlib import Path

CARS = (1, 2, 3)
SLOTS = (1, 2, 3, 4)
FILLER = 100


def same(j):
    return f"(c_P{j}@k <=> c_P{j}@k-1)"


def left(j):
    return f"(!c_P{j}@k & c_P{j}@k-1)"


def onehot(step):
    rows = []
    for s in SLOTS:
        lits = [f"q{t}@{step}" if t == s else f"!q{t}@{step}" for t in SLOTS]
        rows.append("(" + " & ".join(lits) + ")")
    return " | ".join(rows)


def planner_guarantees():
    g = []
    stay = " & ".join(same(j) for j in CARS)
    for s in (4, 3, 2, 1):
        g.append(f"{stay} & q{s}@k-1 => q{s}@k")
    for gone in CARS:
        cond = " & ".join(left(j) if j == gone else same(j) for j in CARS)
        for s in (4, 3, 2):
            g.append(f"{cond} & q{s}@k-1 => q{s - 1}@k")
    for kept in CARS:
        cond = " & ".join(same(j) if j == kept else left(j) for j in CARS)
        g.append(f"{cond} & q4@k-1 => q2@k")
        g.append(f"{cond} & q3@k-1 => q1@k")
    all_gone = " & ".join(left(j) for j in CARS)
    g.append(f"{all_gone} & q4@k-1 => q1@k")
    g.append("q1@k-1 => q1@k")
    g.append(onehot("k"))
    return g


def components(filler):
    perception = {
        "name": "Perception@k",
        "inputs": ["poor_visibility@k"] + [f"c_T{j}@k" for j in CARS],
        "outputs": [f"c_P{j}@k" for j in CARS],
        "assumptions": ["!poor_visibility@k"],
        "guarantees": [f"c_T{j}@k <=> c_P{j}@k" for j in CARS],
        "replicate": {"count": 2, "start": 1},
    }
    planner = {
        "name": "Planner@k",
        "inputs": [f"c_P{j}@k" for j in CARS] + [f"c_P{j}@k-1" for j in CARS] + [f"q{s}@k-1" for s in SLOTS],
        "outputs": [f"q{s}@k" for s in SLOTS],
        "assumptions": [onehot("k-1")],
        "guarantees": planner_guarantees(),
        "replicate": {"count": 2, "start": 1},
    }
    tracker = {
        "name": "Tracker@k",
        "inputs": ["q1@k", "icy_roads@k"],
        "outputs": ["v@k"],
        "assumptions": ["!icy_roads@k"],
        "guarantees": ["q1@k <=> v@k"],
        "replicate": {"count": 2, "start": 1},
    }
    if filler:
        for comp, src, dst in ((perception, "w", "x"), (planner, "x", "y"), (tracker, "y", "z")):
            comp["inputs"] += [f"{src}{n}@k" for n in range(1, FILLER + 1)]
            comp["outputs"] += [f"{dst}{n}@k" for n in range(1, FILLER + 1)]
            comp["guarantees"] += [f"{dst}{n}@k <=> {src}{n}@k" for n in range(1, FILLER + 1)]
    return [perception, planner, tracker]


def spec(filler):
    order = [f"{c}@{k}" for k in (1, 2) for c in ("Perception", "Planner", "Tracker")]
    return {"theory": "prop", "components": components(filler), "composition_order": order, "keep": "auto"}


# Observed trace: perception drops car 1 at step 1, the planner reads that as a
# departure, and the tracker moves at step 2 although no car has left.
TRACE = [
    {"poor_visibility": 0, "icy_roads": 0, "c_T": (1, 1, 1), "c_P": (1, 1, 1), "q": (0, 0, 0, 1), "v": 0},
    {"poor_visibility": 0, "icy_roads": 0, "c_T": (1, 1, 1), "c_P": (0, 1, 1), "q": (0, 0, 1, 0), "v": 0},
    {"poor_visibility": 0, "icy_roads": 0, "c_T": (1, 1, 1), "c_P": (1, 1, 1), "q": (1, 0, 0, 0), "v": 1},
]


def rows(masked, filler, seed):
    rng = random.Random(seed)
    header = ["step", "poor_visibility", "icy_roads"]
    header += [f"c_T{j}" for j in CARS] + [f"c_P{j}" for j in CARS] + [f"q{s}" for s in SLOTS] + ["v"]
    if filler:
        for prefix in "wxyz":
            header += [f"{prefix}{n}" for n in range(1, FILLER + 1)]
    out = [header]
    for step, r in enumerate(TRACE):
        hidden = masked and step > 0
        row = [str(step), str(r["poor_visibility"]), str(r["icy_roads"])]
        row += [str(b) for b in r["c_T"]]
        row += ["--" if hidden else str(b) for b in r["c_P"] + r["q"]]
        row += [str(r["v"])]
        if filler:
            bits = [rng.randint(0, 1) for _ in range(FILLER)]
            for prefix in "wxyz":
                internal = prefix in "xy"
                for b in bits:
                    row.append("--" if step == 0 or (hidden and internal) else str(b))
        out.append(row)
    return out


def write_csv(path, table):
    with open(path, "w", newline="") as f:
        csv.writer(f, lineterminator="\n").writerows(table)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, filler in (("alice_core", False), ("alice_scaled", True)):
        (out / f"{name}.json").write_text(json.dumps(spec(filler), indent=2) + "\n")
        write_csv(out / f"{name}_full.csv", rows(False, filler, args.seed))
        write_csv(out / f"{name}_masked.csv", rows(True, filler, args.seed))


if __name__ == "__main__":
    main()
