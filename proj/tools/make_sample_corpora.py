#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes the small sample corpora under data/samples.

The texts are templated stand-ins; only the label structure follows the
published statistics of the online-discussion test set (692 instances,
67 with more than one frame) and of the argument-quality data before
balancing (1350 high / 2435 low).
"""
import json
import random
import sys
from pathlib import Path

PHRASES = {
    1: ["the cost to taxpayers", "jobs and wages", "the budget deficit", "market prices",
        "economic growth", "insurance premiums"],
    5: ["the constitution", "the supreme court ruling", "equal protection under the law",
        "the second amendment", "a legal right", "the court decision"],
    6: ["the new policy", "this proposal would work", "the program failed",
        "better regulation", "the reform plan", "a background check system"],
    7: ["violent crime", "the death penalty", "prison sentences", "criminals with guns",
        "police enforcement", "punishment for offenders"],
    13: ["the republicans", "democrats in congress", "the election campaign",
         "partisan politics", "the president", "lobbyists and voters"],
}
OPENERS = ["I think", "Honestly,", "People forget that", "The point is", "We should consider",
           "It is clear that", "My view is that"]
CLOSERS = ["matters most here.", "is the real issue.", "should decide this.",
           "keeps coming up.", "cannot be ignored.", "changes everything."]


def sentence(rng, labels):
    parts = [rng.choice(PHRASES[label]) for label in labels]
    return f"{rng.choice(OPENERS)} {' and '.join(parts)} {rng.choice(CLOSERS)}"


def online_disc(rng):
    # 66 two-frame instances and one three-frame instance.
    multi = ([[5, 6]] * 20 + [[5, 7]] * 20 + [[6, 7]] * 10 + [[1, 5]] * 8 + [[7, 13]] * 8 +
             [[5, 6, 7]])
    singles = [[1]] * 70 + [[13]] * 88 + [[5]] * 185 + [[6]] * 135 + [[7]] * 147
    rows = multi + singles
    rng.shuffle(rows)
    out = []
    for i, labels in enumerate(rows, 1):
        out.append({"id": f"od-{i:03d}", "text": sentence(rng, labels), "labels": sorted(labels),
                    "domain": "online_disc", "split": "test"})
    return out


def quality(rng):
    out = []
    for i in range(1350 + 2435):
        high = i < 1350
        while True:
            scores = [round(rng.random(), 2) for _ in range(7)]
            if (sum(scores) / 7 >= 0.5) == high:
                break
        label = rng.choice(list(PHRASES))
        out.append({"id": f"aq-{i + 1:04d}", "text": sentence(rng, [label]), "scores": scores})
    rng.shuffle(out)
    return out


def write(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, separators=(",", ":")) + "\n")


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent
    target = root / "data" / "samples"
    target.mkdir(parents=True, exist_ok=True)
    write(target / "online_disc_test.jsonl", online_disc(random.Random(13)))
    write(target / "argument_quality.jsonl", quality(random.Random(7)))


if __name__ == "__main__":
    main()
