"""Writes bleu_cases.tsv: candidate, references (joined by " ||| "), expected.

Tokens are space separated. Clipped n-gram counts, the closest reference
length and the brevity penalty come from nltk. Orders 2 to 4 are smoothed as
(matched + 1) / (candidate n-grams + 1); unigram precision is unsmoothed and
a zero unigram match scores 0.
"""
import math
import random
import sys
from fractions import Fraction

from nltk.translate.bleu_score import brevity_penalty, closest_ref_length, modified_precision

VOCAB = ["find", ".", "-type", "f", "-name", "*.txt", "|", "xargs", "grep", "-l",
         "sort", "-n", "head", "wc", "ls", "-la"]


def score(cand, refs):
    if not cand:
        return 0.0
    logs = []
    for n in range(1, 5):
        matched = modified_precision(refs, cand, n).numerator
        total = max(len(cand) - n + 1, 0)
        if n == 1:
            if matched == 0:
                return 0.0
            logs.append(math.log(Fraction(matched, total)))
        else:
            logs.append(math.log(Fraction(matched + 1, total + 1)))
    bp = brevity_penalty(closest_ref_length(refs, len(cand)), len(cand))
    return bp * math.exp(math.fsum(logs) / 4)


def main():
    rng = random.Random(20240601)
    cases = [
        ("find . -type f", ["find . -type f"]),
        ("ls -la", ["find . -type f"]),
        ("ls -la", ["ls -la"]),
        ("a b c", ["a b x y z"]),
        ("a b c", ["b c", "a b c d e f"]),
        ("x", ["x y z w"]),
        ("find . -type f | sort", ["find . -type f | sort -n | head"]),
        ("a a a a", ["a b", "a a c"]),
        ("a b c d e", ["a b c", "a b c d e f g"]),
    ]
    while len(cases) < 50:
        cand = [rng.choice(VOCAB) for _ in range(rng.randint(1, 12))]
        refs = []
        for _ in range(rng.randint(1, 3)):
            ref = list(cand) if rng.random() < 0.5 else []
            ref = [t for t in ref if rng.random() < 0.8]
            ref += [rng.choice(VOCAB) for _ in range(rng.randint(0, 5))]
            if rng.random() < 0.3:
                rng.shuffle(ref)
            if not ref:
                ref = [rng.choice(VOCAB)]
            refs.append(" ".join(ref))
        cases.append((" ".join(cand), refs))
    for cand, refs in cases:
        value = score(cand.split(), [r.split() for r in refs])
        sys.stdout.write(f"{cand}\t{' ||| '.join(refs)}\t{value!r}\n")


if __name__ == "__main__":
    main()
