#!/usr/bin/env python3
"""Regenerate the bundled synthetic mini corpus under data/mini/.

Produces a 200-tweet corpus (140 train / 60 test, imbalanced like the real
task), a 20-token 8-dim toy word-vector table, and a 16-dim precomputed
sentence-vector table covering every tweet id.  Everything is seeded, so
re-running reproduces the committed files byte-for-byte.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

NEUTRAL = [
    "sunshine", "coffee", "weekend", "music", "garden",
    "friends", "morning", "team", "game", "pizza",
]
HOSTILE = [
    "loser", "idiot", "stupid", "trash", "hate",
    "awful", "dumb", "jerk", "gross", "nasty",
]
FILLERS = ["the", "is", "so", "you", "very", "now"]
HASHTAGS = ["#fun", "#mood", "#game", "#mondays"]
URLS = ["http://t.co/abc123", "https://example.com/post/9", "www.pics.example.net/1"]
OOV = ["qwumbl", "zorblat"]
PUNCT = ["!!", "?", "...", "!?"]


def make_tweet(rng: np.random.Generator, offensive: bool) -> str:
    vocab_bias = 0.78 if offensive else 0.08
    n_words = int(rng.integers(4, 10))
    words = []
    for _ in range(n_words):
        pool = HOSTILE if rng.random() < vocab_bias else NEUTRAL
        word = pool[int(rng.integers(0, len(pool)))]
        roll = rng.random()
        if roll < 0.08:
            word = word.upper()
        elif roll < 0.22:
            word = word.capitalize()
        words.append(word)
    if rng.random() < 0.55:
        for _ in range(int(rng.integers(1, 3))):
            pos = int(rng.integers(0, len(words) + 1))
            words.insert(pos, FILLERS[int(rng.integers(0, len(FILLERS)))])
    if rng.random() < 0.12:
        words.insert(int(rng.integers(0, len(words) + 1)), OOV[int(rng.integers(0, 2))])
    if rng.random() < 0.2:
        words.insert(int(rng.integers(0, len(words) + 1)), str(rng.integers(10, 9999)))
    parts = []
    if rng.random() < 0.3:
        parts.extend(f"@user{rng.integers(10, 99)}" for _ in range(int(rng.integers(1, 3))))
    parts.extend(words)
    if rng.random() < 0.35:
        parts.extend(
            HASHTAGS[int(rng.integers(0, len(HASHTAGS)))] for _ in range(int(rng.integers(1, 3)))
        )
    if rng.random() < 0.25:
        parts.append(URLS[int(rng.integers(0, len(URLS)))])
    text = " ".join(parts)
    if rng.random() < 0.3:
        text += PUNCT[int(rng.integers(0, len(PUNCT)))]
    return text


def write_corpus(out_dir: Path, seed: int = 20190406) -> None:
    rng = np.random.default_rng(seed)
    out_dir.mkdir(parents=True, exist_ok=True)

    train_labels = ["NOT"] * 93 + ["OFF"] * 47
    test_labels = ["NOT"] * 40 + ["OFF"] * 20
    rng.shuffle(train_labels)
    rng.shuffle(test_labels)

    train_rows = []
    for i, label in enumerate(train_labels, start=1):
        train_rows.append((f"1{i:04d}", make_tweet(rng, label == "OFF"), label))
    test_rows = []
    for i, label in enumerate(test_labels, start=1):
        test_rows.append((f"9{i:04d}", make_tweet(rng, label == "OFF"), label))

    with open(out_dir / "train.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id\ttweet\tsubtask_a\n")
        for tweet_id, text, label in train_rows:
            fh.write(f"{tweet_id}\t{text}\t{label}\n")
    with open(out_dir / "test.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id\ttweet\n")
        for tweet_id, text, _ in test_rows:
            fh.write(f"{tweet_id}\t{text}\n")
    with open(out_dir / "test_labels.csv", "w", encoding="utf-8", newline="\n") as fh:
        for tweet_id, _, label in test_rows:
            fh.write(f"{tweet_id},{label}\n")

    # toy word vectors: the two vocabulary halves sit on opposite sides of
    # the first axis, with enough per-token scatter for transition dynamics
    dim = 8
    with open(out_dir / "toy.vec", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(NEUTRAL) + len(HOSTILE)} {dim}\n")
        for words, center in ((NEUTRAL, 1.2), (HOSTILE, -1.2)):
            for word in words:
                vec = rng.normal(0.0, 0.45, size=dim)
                vec[0] += center
                fh.write(word + " " + " ".join(f"{v:.4f}" for v in vec) + "\n")

    # precomputed sentence vectors for every id (stand-in for an external
    # sentence encoder): class-dependent mean plus noise
    pdim = 16
    with open(out_dir / "precomputed.txt", "w", encoding="utf-8", newline="\n") as fh:
        for tweet_id, _, label in train_rows + test_rows:
            center = -0.9 if label == "OFF" else 0.9
            vec = rng.normal(0.0, 0.7, size=pdim)
            vec[:3] += center
            fh.write(tweet_id + " " + " ".join(f"{v:.5f}" for v in vec) + "\n")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", default=Path(__file__).resolve().parent.parent / "data" / "mini", type=Path
    )
    parser.add_argument("--seed", default=20190406, type=int)
    args = parser.parse_args()
    write_corpus(args.out, args.seed)
    print(f"mini corpus written to {args.out}")


if __name__ == "__main__":
    main()
