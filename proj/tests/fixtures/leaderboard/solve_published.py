#!/usr/bin/env python3
# Copyright 2026 The storyeval Authors
# SPDX-License-Identifier: Apache-2.0
"""Builds per-story score triples whose corpus statistics equal the
published leaderboard.

For every model the per-dimension story means equal its published G/C/R and
the mean per-story d_HM equals its published distance. The human triple is
held constant across stories; each model dimension alternates M+a, M+a, M-a,
M-a so that the mean stays at M while the mean absolute gap to the human
value becomes max(|H-M|, a). Writes published_scores.json and the golden
Markdown leaderboard next to this script.
"""

import itertools
import json
import os

PUBLISHED = [
    # model, G, C, R, d_HM
    ("AREL", 0.6001, 0.5692, 0.8325, 0.2403),
    ("GLACNET", 0.5158, 0.6875, 0.9506, 0.1896),
    ("KG Story", 0.7325, 0.6493, 0.9991, 0.1457),
    ("MCSM+BART", 0.8648, 0.6651, 0.8999, 0.0976),
    ("VIST-GPT v1", 0.9401, 0.7495, 0.8821, 0.0546),
    ("VIST-GPT v2", 0.9962, 0.7837, 0.9301, 0.0459),
]
STORIES = ["fx-001", "fx-002", "fx-003", "fx-004"]
SIGNS = [1, 1, -1, -1]


def room(m):
    return min(m, 1.0 - m)


def slack(human):
    worst = None
    for _, g, c, r, d in PUBLISHED:
        gaps = [abs(h - m) for h, m in zip(human, (g, c, r))]
        reach = sum(max(x, room(m)) for x, m in zip(gaps, (g, c, r)))
        need = 3 * d
        s = min(need - sum(gaps), reach - need)
        worst = s if worst is None else min(worst, s)
    return worst


def best_human():
    grid = [i / 100 for i in range(1, 100)]
    best = max(itertools.product(grid, grid, grid), key=slack)
    assert slack(best) > 0.01, "no feasible human triple"
    return best


def spreads(human, means, target):
    """Per-dimension amplitudes a_d with sum(max(|x_d|, a_d)) = 3*target."""
    gaps = [abs(h - m) for h, m in zip(human, means)]
    extra = 3 * target - sum(gaps)
    amps = [0.0, 0.0, 0.0]
    order = sorted(range(3), key=lambda k: -(room(means[k]) - gaps[k]))
    for k in order:
        if extra <= 0:
            break
        headroom = room(means[k]) - gaps[k]
        if headroom <= 0:
            continue
        take = min(extra, headroom * 0.95)
        amps[k] = gaps[k] + take
        extra -= take
    assert abs(extra) < 1e-12, "could not place the distance"
    return amps


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    human = tuple(round(x, 6) for x in best_human())
    rows = {"human": [{"story_id": s, "G": human[0], "C": human[1], "R": human[2]} for s in STORIES]}
    for model, g, c, r, d in PUBLISHED:
        means = (g, c, r)
        amps = spreads(human, means, d)
        rows[model] = [
            {"story_id": s, **{k: round(m + sign * a, 12) for k, m, a in zip("GCR", means, amps)}}
            for s, sign in zip(STORIES, SIGNS)
        ]

    # Independent check of the construction before freezing it.
    for model, g, c, r, d in PUBLISHED:
        ms = rows[model]
        for k, target in zip("GCR", (g, c, r)):
            mean = sum(x[k] for x in ms) / len(ms)
            assert abs(mean - target) < 1e-9 and "%.4f" % mean == "%.4f" % target
        dist = sum(sum(abs(x[k] - h[k]) for k in "GCR") / 3 for x, h in zip(ms, rows["human"])) / len(ms)
        assert abs(dist - d) < 1e-9 and "%.4f" % dist == "%.4f" % d, (model, dist, d)
        assert all(0.0 <= x[k] <= 1.0 for x in ms for k in "GCR")

    with open(os.path.join(here, "published_scores.json"), "w") as f:
        json.dump({"stories": STORIES, "scores": rows}, f, indent=1)
        f.write("\n")

    ranked = sorted(PUBLISHED, key=lambda p: p[4])
    lines = ["| Model | Visual Grounding | Coherence | Non-Redundancy | d_HM |", "|---|---:|---:|---:|---:|"]
    for model, g, c, r, d in ranked:
        lines.append("| %s | %.4f | %.4f | %.4f | %.4f |" % (model, g, c, r, d))
    with open(os.path.join(here, "leaderboard.golden.md"), "w") as f:
        f.write("\n".join(lines) + "\n")
        f.write("\nd_HM: mean of per-story distances (per-story); lower is closer to human. Stories: %d, excluded: 0.\n"
                % len(STORIES))


if __name__ == "__main__":
    main()
