#!/usr/bin/env python3
"""Regenerates the synthetic corpora under data/fixtures/.

tiny/     2 train, 2 valid, 2 test examples (smoke tests).
overfit/  50 train examples over a < 200 token vocabulary; eight phrases
          carry two senses told apart by their contexts.
"""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "fixtures"


def write(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def tiny():
    train = [
        {"phrase": "river bank", "context": "they sat on the river bank at dusk .",
         "definition": "the land beside a river", "sense_id": "river_bank%1"},
        {"phrase": "bank", "context": "she opened an account at the bank .",
         "definition": "an institution that keeps money", "sense_id": "bank%1"},
    ]
    valid = [
        {"phrase": "shore", "context": "waves broke on the shore .",
         "definition": "the land along the sea", "sense_id": "shore%1"},
        {"phrase": "vault", "context": "the gold sat in the vault .",
         "definition": "a room that keeps money safe", "sense_id": "vault%1"},
    ]
    test = [
        {"phrase": "coast", "context": "we drove along the coast .",
         "definition": "the land next to the sea", "sense_id": "coast%1"},
        {"phrase": "teller", "context": "the teller counted the notes .",
         "definition": "a person who handles money in a bank", "sense_id": "teller%1"},
    ]
    write(ROOT / "tiny" / "train.jsonl", train)
    write(ROOT / "tiny" / "valid.jsonl", valid)
    write(ROOT / "tiny" / "test.jsonl", test)


def overfit():
    rng = random.Random(20240605)
    syllables = ["bl", "dr", "fl", "gr", "kr", "pl", "sk", "sp", "tr", "zw"]
    vowels = ["a", "e", "i", "o", "u"]
    codas = ["ck", "m", "n", "p", "sh", "t", "x"]
    phrases = set()
    while len(phrases) < 50:
        phrases.add(rng.choice(syllables) + rng.choice(vowels) + rng.choice(codas))
    phrases = sorted(phrases)

    heads = ["a", "an", "the", "one"]
    nouns = ["tool", "animal", "plant", "place", "person", "feeling", "sound", "container", "color", "game",
             "dish", "garment", "vehicle", "song", "rock", "tree"]
    adjs = ["small", "large", "red", "quiet", "soft", "sharp", "old", "bright", "heavy", "round", "wild",
            "sweet"]
    tails = ["used for cutting", "found near rivers", "kept at home", "seen at night", "made of wood",
             "grown in gardens", "worn in winter", "played by children", "eaten in summer", "heard in forests"]
    frames = ["the {p} was on the table .", "i saw a {p} yesterday .", "they talked about the {p} .",
              "he found the {p} outside .", "we need another {p} ."]
    sense_frames = [("the {p} sang in the morning .", "she cooked the {p} for dinner ."),
                    ("the {p} cut the rope .", "the {p} grew by the wall .")]

    def definition():
        return " ".join([rng.choice(heads), rng.choice(adjs), rng.choice(nouns), rng.choice(tails)])

    train = []
    two_sense = set(phrases[:8])
    for p in phrases[:42]:
        if p in two_sense:
            first, second = rng.choice(sense_frames)
            train.append({"phrase": p, "context": first.format(p=p), "definition": definition(),
                          "sense_id": p + "%1"})
            train.append({"phrase": p, "context": second.format(p=p), "definition": definition(),
                          "sense_id": p + "%2"})
        else:
            train.append({"phrase": p, "context": rng.choice(frames).format(p=p), "definition": definition(),
                          "sense_id": p + "%1"})
    assert len(train) == 50, len(train)
    valid = [{"phrase": p, "context": rng.choice(frames).format(p=p), "definition": definition(),
              "sense_id": p + "%1"} for p in phrases[42:46]]
    test = [{"phrase": p, "context": rng.choice(frames).format(p=p), "definition": definition(),
             "sense_id": p + "%1"} for p in phrases[46:50]]
    write(ROOT / "overfit" / "train.jsonl", train)
    write(ROOT / "overfit" / "valid.jsonl", valid)
    write(ROOT / "overfit" / "test.jsonl", test)


if __name__ == "__main__":
    tiny()
    overfit()
