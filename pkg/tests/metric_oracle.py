"""Hand-coded reference for the ordinal closeness score, written from the definition."""

import math


def prox(a, b, counts):
    n = sum(counts)
    if a == b:
        return -math.log2(counts[a] / 2 / n)
    step = 1 if b > a else -1
    mass = counts[a] / 2
    c = a + step
    while True:
        mass += counts[c]
        if c == b:
            break
        c += step
    return -math.log2(mass / n)


def cem(gold, pred):
    counts = [0] * (max(max(gold), max(pred)) + 1)
    for g in gold:
        counts[g] += 1
    num = sum(prox(p, g, counts) for g, p in zip(gold, pred))
    den = sum(prox(g, g, counts) for g in gold)
    return num / den
