# Copyright (c) 2026 The bimhar Authors. All Rights Reserved
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Construct label assignments whose weighted metrics round to a Table 2 row.

Test-only oracle. Weighted precision/recall/F1 depend only on, per truth
class c: support s_c, hits k_c and false positives f_c (wrong predictions of
c). Those counts are enumerated exhaustively, the first combination rounding
to the target row is turned into concrete (truth, predicted) pairs, and the
pairs are re-checked with scikit-learn before being printed as JSON.
"""
import itertools
import json
import sys

from sklearn.metrics import accuracy_score, precision_recall_fscore_support

TASK1 = ["clamping", "grinding", "drilling", "measuring", "marking", "cutting"]
TASK2 = ["drilling", "measuring", "marking", "cutting", "nail-gunning"]
FULL = TASK1 + ["nail-gunning", "sawing", "picking-up-trash", "shoveling",
                "using-a-screwdriver", "hammering", "mixing-cement", "driving",
                "blowtorching", "laying-bricks", "soldering", "painting"]

ROWS = {
    "task1_off": (TASK1, FULL, 14, 5, (0.35, 0.36, 0.35)),
    "task1_hard": (TASK1, TASK1, 14, 8, (0.41, 0.57, 0.48)),
    "task2_off": (TASK2, FULL, 13, 3, (0.71, 0.23, 0.35)),
    "task2_hard": (TASK2, TASK2, 13, 7, (0.59, 0.54, 0.57)),
}


def compositions(total, parts, low=0):
    if parts == 1:
        if total >= low:
            yield (total,)
        return
    for first in range(low, total + 1):
        for rest in compositions(total - first, parts - 1, low):
            yield (first,) + rest


def rounds_to(prf, target):
    return all(abs(v - t) < 0.005 for v, t in zip(prf, target))


def metrics(support, hits, false_pos, n):
    wp = wr = wf = 0.0
    for s, k, f in zip(support, hits, false_pos):
        if s == 0:
            continue
        p = k / (k + f) if k + f else 0.0
        r = k / s
        wp += s * p
        wr += s * r
        wf += s * (2 * p * r / (p + r) if p + r else 0.0)
    return wp / n, wr / n, wf / n


def realize(space, pred_space, support, hits, false_pos):
    """Turn class counts into concrete pairs; None if infeasible."""
    truth, pred = [], []
    misses = []  # truth labels of clips predicted wrong
    for label, s, k in zip(space, support, hits):
        truth += [label] * k
        pred += [label] * k
        misses += [label] * (s - k)
    wanted = [label for label, f in zip(space, false_pos) for _ in range(f)]
    if len(wanted) > len(misses):
        return None
    outside = [c for c in pred_space if c not in space]
    # assign false positives greedily to misses of a different class
    remaining = list(misses)
    for target in wanted:
        for i, t in enumerate(remaining):
            if t != target:
                truth.append(t)
                pred.append(target)
                del remaining[i]
                break
        else:
            return None
    for t in remaining:
        others = outside or [c for c in space if c != t]
        choice = [c for c in others if c != t]
        if not outside:
            # wrong predictions must then land on a class without adding FPs
            return None if remaining else (truth, pred)
        truth.append(t)
        pred.append(choice[0])
    return truth, pred


def search(name):
    space, pred_space, n, correct, target = ROWS[name]
    m = len(space)
    for support in compositions(n, m):
        for hits in compositions(correct, m):
            if any(k > s for k, s in zip(hits, support)):
                continue
            if abs(correct / n - target[1]) >= 0.005:
                continue
            wrong = n - correct
            max_fp = wrong if pred_space != space else wrong
            for fp_total in range(0 if pred_space != space else wrong, max_fp + 1):
                for false_pos in compositions(fp_total, m):
                    if not rounds_to(metrics(support, hits, false_pos, n), target):
                        continue
                    pairs = realize(space, pred_space, support, hits, false_pos)
                    if pairs is None:
                        continue
                    return finish(*pairs, target, correct, n)
    raise SystemExit(f"no assignment found for {name}")


def finish(truth, pred, target, correct, n):
    order = sorted(range(n), key=lambda i: (FULL.index(truth[i]), FULL.index(pred[i])))
    truth = [truth[i] for i in order]
    pred = [pred[i] for i in order]
    p, r, f, _ = precision_recall_fscore_support(
        truth, pred, average="weighted", zero_division=0)
    assert accuracy_score(truth, pred) == correct / n
    assert rounds_to((p, r, f), target), (p, r, f)
    return {"truth": truth, "pred": pred, "weighted_prf": [p, r, f]}


if __name__ == "__main__":
    out = {name: search(name) for name in (sys.argv[1:] or ROWS)}
    print(json.dumps(out, indent=1))
