#!/usr/bin/env python3
"""Regenerate data/toy_corpus.txt and data/toy_triples.jsonl.

Every metaphorical verb gets a literal topic (shared with its inapt
paraphrase) and a figurative topic (shared with its apt paraphrase and the
fragment's nouns), so trained matrices for the target verbs are two-sense
mixtures. The lemma "bourse" is deliberately left out of the corpus.
"""

import argparse
import json
import random
from pathlib import Path

# id, form, (apt, inapt) ratings, pattern, subj, obj, target verb, apt verb,
# inapt verb, literal topic words, figurative topic words
TRIPLES = [
    ("t01", "long", (6.4, 1.8), "SVO", "he", "present", "shower", "give", "sprinkle",
     ["water", "rain", "garden", "bath", "drop", "wet"], ["gift", "birthday", "party", "wrap", "generous"]),
    ("t02", "short", (6.1, 2.3), "SVO", "student", "idea", "grasp", "understand", "clutch",
     ["hand", "rope", "handle", "grip", "finger"], ["lesson", "concept", "teacher", "class", "theory"]),
    ("t03", "short", (5.2, 2.9), "SVO", "critic", "argument", "attack", "criticize", "assault",
     ["soldier", "enemy", "army", "weapon", "wound"], ["review", "essay", "debate", "claim", "opinion"]),
    ("t04", "long", (5.9, 1.5), "SVO", "reader", "book", "devour", "read", "eat",
     ["meal", "hungry", "plate", "dinner", "lion"], ["novel", "page", "chapter", "library", "story"]),
    ("t05", "short", (5.5, 2.0), "SV", "price", None, "soar", "rise", "glide",
     ["bird", "wing", "sky", "eagle", "cloud"], ["cost", "inflation", "market", "percent", "sale"]),
    ("t06", "short", (4.8, 3.1), "SV", "anger", None, "boil", "increase", "cook",
     ["pot", "kettle", "stove", "steam", "soup"], ["rage", "temper", "fury", "insult", "shout"]),
    ("t07", "short", (5.0, 1.2), "VO", None, "plan", "kill", "abandon", "murder",
     ["knife", "victim", "police", "crime", "body"], ["project", "proposal", "budget", "committee", "scheme"]),
    ("t08", "long", (4.5, 2.6), "VO", None, "doubt", "plant", "cause", "bury",
     ["seed", "soil", "spade", "flower", "root"], ["suspicion", "mind", "rumour", "worry", "trust"]),
    ("t09", "short", (6.6, 1.6), "SV", "time", None, "fly", "pass", "flutter",
     ["butterfly", "moth", "leaf", "breeze", "petal"], ["hour", "minute", "week", "holiday", "summer"]),
    ("t10", "short", (5.7, 2.2), "VO", None, "sorrow", "drown", "forget", "submerge",
     ["lake", "sea", "swimmer", "wave", "sink"], ["grief", "sadness", "drink", "memory", "loss"]),
    ("t11", "long", (4.9, 2.8), "VO", None, "pride", "swallow", "suppress", "gulp",
     ["throat", "pill", "sip", "mouthful", "chew"], ["ego", "shame", "apology", "humble", "admit"]),
    ("t12", "short", (5.3, 1.4), "SV", "bourse", None, "crash", "collapse", "collide",
     ["car", "truck", "road", "driver", "accident"], ["stock", "share", "investor", "bank", "economy"]),
]

FUNCTION_WORDS = ["the", "a", "his", "her", "with", "of", "and", "to"]
OOV = {"bourse"}

# surface forms for long-form sentences: (target, apt, inapt) token lists
LONG_SURFACES = {
    "t01": ([("He", "he", "subj"), ("showered", "shower", "verb"), ("her", "her", "function"), ("with", "with", "function"),
             ("presents", "present", "obj")],
            [("He", "he", "subj"), ("gave", "give", "verb"), ("her", "her", "function"), ("presents", "present", "obj")],
            [("He", "he", "subj"), ("sprinkled", "sprinkle", "verb"), ("her", "her", "function"), ("with", "with", "function"),
             ("presents", "present", "obj")]),
    "t04": ([("The", "the", "function"), ("reader", "reader", "subj"), ("devoured", "devour", "verb"), ("the", "the", "function"),
             ("book", "book", "obj")],
            [("The", "the", "function"), ("reader", "reader", "subj"), ("read", "read", "verb"), ("the", "the", "function"),
             ("book", "book", "obj")],
            [("The", "the", "function"), ("reader", "reader", "subj"), ("ate", "eat", "verb"), ("the", "the", "function"),
             ("book", "book", "obj")]),
    "t08": ([("planted", "plant", "verb"), ("a", "a", "function"), ("doubt", "doubt", "obj")],
            [("caused", "cause", "verb"), ("a", "a", "function"), ("doubt", "doubt", "obj")],
            [("buried", "bury", "verb"), ("a", "a", "function"), ("doubt", "doubt", "obj")]),
    "t11": ([("swallowed", "swallow", "verb"), ("his", "his", "function"), ("pride", "pride", "obj")],
            [("suppressed", "suppress", "verb"), ("his", "his", "function"), ("pride", "pride", "obj")],
            [("gulped", "gulp", "verb"), ("his", "his", "function"), ("pride", "pride", "obj")]),
}


def short_fragment(subj, verb, obj):
    toks = []
    if subj:
        toks.append({"surface": subj, "lemma": subj, "role": "subj"})
    toks.append({"surface": verb, "lemma": verb, "role": "verb"})
    if obj:
        toks.append({"surface": obj, "lemma": obj, "role": "obj"})
    return {"tokens": toks}


def triples_jsonl():
    lines = []
    for tid, form, (h_apt, h_inapt), _, subj, obj, target, apt, inapt, _, _ in TRIPLES:
        if form == "long":
            frags = [{"tokens": [{"surface": s, "lemma": l, "role": r} for s, l, r in toks]} for toks in LONG_SURFACES[tid]]
        else:
            frags = [short_fragment(subj, v, obj) for v in (target, apt, inapt)]
        row = {"id": tid, "form": form, "human": {"apt": h_apt, "inapt": h_inapt},
               "target": frags[0], "apt": frags[1], "inapt": frags[2]}
        lines.append(json.dumps(row, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def corpus(seed, n_sentences):
    rng = random.Random(seed)
    topics = []
    for _, _, _, _, subj, obj, target, apt, inapt, literal, figurative in TRIPLES:
        nouns = [w for w in (subj, obj) if w and w not in OOV]
        topics.append([target, inapt] + literal)
        topics.append([target, apt] + nouns + figurative)
    out = []
    for _ in range(n_sentences):
        words = rng.choice(topics)
        sentence = [rng.choice(words) for _ in range(rng.randint(6, 10))]
        for _ in range(rng.randint(1, 3)):
            sentence.insert(rng.randrange(len(sentence) + 1), rng.choice(FUNCTION_WORDS))
        out.append(" ".join(sentence))
    return "\n".join(out) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    ap.add_argument("--seed", type=int, default=20211)
    ap.add_argument("--sentences", type=int, default=6000)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "toy_corpus.txt").write_text(corpus(args.seed, args.sentences))
    (args.out / "toy_triples.jsonl").write_text(triples_jsonl())


if __name__ == "__main__":
    main()
