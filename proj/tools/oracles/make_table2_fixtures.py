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

"""Write the Table 2 metric fixtures under fixtures/table2/.

Per-class counts (support, hits, false positives) come from
table2_search.py. Expected metrics are computed here with scikit-learn and
stored in expected.json; the C++ tests compare against that file.
"""
import json
import pathlib
from datetime import datetime, timedelta, timezone

from sklearn.metrics import accuracy_score, precision_recall_fscore_support

import table2_search as search

ROOT = pathlib.Path(__file__).resolve().parents[2]
OUT = ROOT / "fixtures" / "table2"
OUTSIDE = ["sawing", "hammering", "painting", "shoveling", "soldering"]

# task -> (space, per-class support, {mode: (hits, false_pos)}, day)
TASKS = {
    "task1": (search.TASK1, (0, 0, 0, 2, 8, 4), {
        "off": ((0, 0, 0, 0, 4, 1), (0, 0, 0, 0, 5, 2)),
        "hard": ((0, 0, 0, 1, 7, 0), (0, 0, 0, 2, 4, 0)),
    }, 5),
    "task2": (search.TASK2, (0, 0, 1, 4, 8), {
        "off": ((0, 0, 0, 1, 2), (0, 0, 0, 0, 1)),
        "hard": ((0, 0, 1, 1, 5), (0, 1, 0, 3, 2)),
    }, 6),
}


def realize(space, support, hits, false_pos, restricted):
    """Concrete (truth, predicted) pairs, truths in canonical order."""
    misses = {c: s - k for c, s, k in zip(space, support, hits)}
    fp_left = dict(zip(space, false_pos))
    pairs = []
    for c, k in zip(space, hits):
        pairs += [(c, c)] * k
    outside = iter(OUTSIDE * 4)
    for truth in space:
        for _ in range(misses[truth]):
            target = next((c for c in space if c != truth and fp_left[c] > 0), None)
            if target is None:
                assert not restricted, "restricted run cannot predict outside its space"
                target = next(outside)
            else:
                fp_left[target] -= 1
            pairs.append((truth, target))
    assert not any(fp_left.values()), fp_left
    return sorted(pairs, key=lambda p: (search.FULL.index(p[0]), search.FULL.index(p[1])))


def truth_order(space, support):
    return [c for c, s in zip(space, support) for _ in range(s)]


def records(task, space, support, mode, pairs, day):
    labels = list(space) if mode == "hard" else list(search.FULL)
    # pair each truth slot with a prediction, keeping clip ids stable across modes
    slots = {c: [] for c in space}
    for truth, pred in pairs:
        slots[truth].append(pred)
    rows = []
    start = datetime(2023, 6, day, 14, 30, tzinfo=timezone.utc)
    for i, truth in enumerate(truth_order(space, support)):
        pred = slots[truth].pop(0)
        conf = (0.45 + 0.02 * i) if mode == "hard" else (0.25 + 0.01 * i)
        rest = (1.0 - conf) / (len(labels) - 1)
        dist = [conf if c == pred else rest for c in labels]
        space_json = {
            "provenance": "task" if mode == "hard" else "full",
            "tasks": [task.replace("task", "task-")] if mode == "hard" else [],
            "labels": labels,
        }
        rows.append({
            "clip_id": f"{task}-clip-{i + 1:02d}",
            "timestamp": (start + timedelta(minutes=20 * i)).strftime("%Y-%m-%dT%H:%M:%SZ"),
            "ground_truth": truth,
            "label_space": space_json,
            "restriction": space_json if mode == "hard" else None,
            "distribution": dist,
            "predicted": pred,
            "confidence": conf,
            "config": {"mode": mode, "tau": 0.01, "lambda": 0.0, "fallback": "full_space"},
        })
    return rows


def expected(pairs):
    truth = [t for t, _ in pairs]
    pred = [p for _, p in pairs]
    out = {"accuracy": accuracy_score(truth, pred)}
    for avg in ("weighted", "macro", "micro"):
        p, r, f, _ = precision_recall_fscore_support(
            truth, pred, average=avg, zero_division=0)
        out[avg] = {"precision": p, "recall": r, "f1": f}
    return out


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    frozen = {}
    for task, (space, support, modes, day) in TASKS.items():
        for mode, (hits, false_pos) in modes.items():
            pairs = realize(space, support, hits, false_pos, mode == "hard")
            rows = records(task, space, support, mode, pairs, day)
            with open(OUT / f"{task}_{mode}.jsonl", "w") as fh:
                for row in rows:
                    fh.write(json.dumps(row, separators=(",", ":")) + "\n")
            frozen[f"{task}_{mode}"] = expected(
                [(r["ground_truth"], r["predicted"]) for r in rows])
    (OUT / "expected.json").write_text(json.dumps(frozen, indent=2) + "\n")
    for name, m in frozen.items():
        w = m["weighted"]
        print(f"{name}: acc {m['accuracy']:.4%} P {w['precision']:.4f} "
              f"R {w['recall']:.4f} F1 {w['f1']:.4f}")


if __name__ == "__main__":
    main()
