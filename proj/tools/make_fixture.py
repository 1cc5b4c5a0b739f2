#!/usr/bin/env python3
#
# Copyright 2026 The detectbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Generates the bundled desk-scale fixture corpora under data/fixture/.

Human and synthetic-AI documents come from different template grammars and
word pools with partial overlap, so a small n-gram model trained on AI-style
reference text separates them imperfectly. Output is deterministic.
"""

import argparse
import json
import os
import random

STYLES = ["news", "review", "science"]
GENERATORS = ["gen-a", "gen-b"]

AI_WORDS = {
    "adj": ["crucial", "pivotal", "comprehensive", "robust", "seamless",
            "intricate", "vibrant", "multifaceted", "innovative", "remarkable",
            "nuanced", "transformative", "meticulous", "profound"],
    "noun": ["landscape", "tapestry", "framework", "realm", "journey",
             "insight", "ecosystem", "paradigm", "synergy", "testament",
             "dynamics", "interplay", "narrative", "trajectory"],
    "verb": ["underscores", "fosters", "enhances", "leverages", "navigates",
             "showcases", "highlights", "embodies", "illuminates", "elevates"],
    "adv": ["notably", "ultimately", "seamlessly", "significantly",
            "furthermore", "moreover", "additionally", "importantly"],
}

HUMAN_WORDS = {
    "adj": ["weird", "cheap", "old", "big", "broken", "nice", "decent",
            "funny", "messy", "quick", "loud", "tiny", "rough", "solid",
            "sketchy", "handy", "odd", "plain", "fine", "sturdy", "clunky",
            "shiny", "dull", "crowded"],
    "noun": ["stuff", "thing", "folks", "guy", "mess", "deal", "bit", "lot",
             "town", "shop", "trip", "box", "kid", "neighbor", "bill",
             "game", "road", "garage", "kitchen", "weekend", "truck",
             "paycheck", "coffee", "mayor"],
    "verb": ["grabbed", "tossed", "fixed", "broke", "bought", "tried",
             "figured", "yelled", "dropped", "checked", "liked", "hated",
             "borrowed", "dumped", "spotted", "missed"],
    "adv": ["honestly", "basically", "pretty", "kinda", "really", "anyway",
            "probably", "still", "actually", "maybe"],
}

STYLE_NOUNS = {
    "news": ["council", "city", "election", "budget", "police", "report",
             "vote", "court", "school", "market"],
    "review": ["product", "battery", "screen", "price", "seller", "blender",
               "charger", "headphones", "shoes", "case"],
    "science": ["model", "data", "experiment", "sample", "method", "result",
                "signal", "protein", "network", "theory"],
}

AI_TEMPLATES = [
    "{Adv}, the {adj} {snoun} {verb} a {adj} {noun} of {snoun}.",
    "This {adj} {noun} {verb} the {adj} {snoun} and its {noun}.",
    "The {snoun} {verb} a {adj} {noun}, {adv} shaping the {noun}.",
    "{Adv}, this {noun} {verb} how the {snoun} {verb} the {adj} {noun}.",
    "In the {adj} {noun} of {snoun}, the {snoun} {verb} a {adj} {noun}.",
]

HUMAN_TEMPLATES = [
    "So the {snoun} was {adv} {adj} and my {noun} {verb} it.",
    "I {verb} the {adj} {snoun} last {noun}, {adv} not a {adj} {noun}.",
    "The {noun} {verb} our {snoun} and {adv} nobody cared.",
    "My {noun} said the {snoun} is {adj}, {adv} a {adj} {noun} for the {noun}.",
    "We {verb} a {adj} {snoun} near the {noun} and it was {adv} {adj}.",
    "That {snoun} {verb} the {noun}, which {adv} felt {adj}.",
]


def pick(rng, pools, kind, mix):
    """Draws a word of `kind`, taking it from the other class's pool with
    probability `mix`."""
    primary, other = pools
    pool = other if rng.random() < mix else primary
    return rng.choice(pool[kind])


def sentence(rng, templates, pools, style, mix):
    own, other = templates
    tpl = rng.choice(other if rng.random() < mix / 2 else own)
    out = tpl
    while "{" in out:
        start = out.index("{")
        end = out.index("}", start)
        slot = out[start + 1:end]
        kind = slot.lower()
        if kind == "snoun":
            word = rng.choice(STYLE_NOUNS[style])
        else:
            word = pick(rng, pools, kind, mix)
        if slot[0].isupper():
            word = word[0].upper() + word[1:]
        out = out[:start] + word + out[end + 1:]
    return out[0].upper() + out[1:]


def document(rng, templates, pools, style, mix):
    n = rng.randint(3, 5)
    return " ".join(sentence(rng, templates, pools, style, mix)
                    for _ in range(n))


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=os.path.join(
        os.path.dirname(__file__), "..", "data", "fixture"))
    parser.add_argument("--per-cell", type=int, default=40)
    parser.add_argument("--reference", type=int, default=300)
    parser.add_argument("--seed", type=int, default=20261015)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)

    ai_pools = (AI_WORDS, HUMAN_WORDS)
    human_pools = (HUMAN_WORDS, AI_WORDS)
    # Generators differ in how often they borrow human vocabulary.
    ai_mix = {"gen-a": 0.35, "gen-b": 0.50}
    human_mix = {"gen-a": 0.20, "gen-b": 0.30}

    human, ai = [], []
    for style in STYLES:
        for gen in GENERATORS:
            for i in range(args.per_cell):
                human.append({
                    "id": f"h-{style}-{gen}-{i:03d}",
                    "text": document(rng, (HUMAN_TEMPLATES, AI_TEMPLATES), human_pools, style,
                                     human_mix[gen]),
                    "label": "human", "style": style, "generator": gen,
                    "attack": "none", "hardness": "0"})
                ai.append({
                    "id": f"a-{style}-{gen}-{i:03d}",
                    "text": document(rng, (AI_TEMPLATES, HUMAN_TEMPLATES), ai_pools, style,
                                     ai_mix[gen]),
                    "label": "ai", "style": style, "generator": gen,
                    "attack": "none", "hardness": "0"})
    reference = []
    for i in range(args.reference):
        style = STYLES[i % len(STYLES)]
        reference.append({
            "id": f"r-{i:04d}",
            "text": document(rng, (AI_TEMPLATES, HUMAN_TEMPLATES), ai_pools, style, 0.25),
            "label": "ai", "style": style, "generator": "reference",
            "attack": "none", "hardness": "0"})

    write_jsonl(os.path.join(args.out, "human.jsonl"), human)
    write_jsonl(os.path.join(args.out, "ai.jsonl"), ai)
    write_jsonl(os.path.join(args.out, "reference.jsonl"), reference)


if __name__ == "__main__":
    main()
