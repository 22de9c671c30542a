#!/usr/bin/env python3
"""Hand-count oracle for the corpus statistics goldens (independent of the C++ code)."""

import json
import math
import re
import sys
from pathlib import Path


def tokenize(text):
    out = []
    for word in text.lower().split():
        out.extend(t for t in re.findall(r"<[a-z]+>|[a-z0-9_]+|[^\sa-z0-9_]|[^\x00-\x7f]+", word))
    return out


def length(values):
    if not values:
        return {"mean": 0.0, "sd": 0.0}
    m = sum(values) / len(values)
    sd = math.sqrt(sum((v - m) ** 2 for v in values) / (len(values) - 1)) if len(values) > 1 else 0.0
    return {"mean": round(m, 2), "sd": round(sd, 2)}


def partition(name, rows):
    return {
        "name": name,
        "empty": not rows,
        "phrases": len({" ".join(tokenize(r["phrase"])) for r in rows}),
        "examples": len(rows),
        "phrase_length": length([len(tokenize(r["phrase"])) for r in rows]),
        "context_length": length([len(tokenize(r["context"])) for r in rows]),
        "definition_length": length([len(tokenize(r["definition"])) for r in rows]),
    }


def main(data_dir):
    parts = {}
    for name in ("train", "valid", "test"):
        with open(Path(data_dir) / f"{name}.jsonl", encoding="utf-8") as f:
            parts[name] = [json.loads(l) for l in f if l.strip()]
    everything = parts["train"] + parts["valid"] + parts["test"]
    report = {"partitions": [partition(n, parts[n]) for n in ("train", "valid", "test")],
              "overall": partition("overall", everything)}
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main(sys.argv[1])
