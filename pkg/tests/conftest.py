"""Shared deterministic generators for the property-style tests."""
import random
from fractions import Fraction

import pytest

from psinv.core import Alphabet, JumpRateMatrix, MarkovKernel


def rational(rng, lo=1, hi=9):
    return Fraction(rng.randint(lo, hi), rng.randint(lo, hi))


def random_jrm(rng, kappa=2, range_=2, max_entries=6) -> JumpRateMatrix:
    alphabet = Alphabet(kappa)
    words = list(alphabet.words(range_))
    pairs = [(u, v) for u in words for v in words if u != v]
    count = rng.randint(1, min(max_entries, len(pairs)))
    chosen = rng.sample(pairs, count)
    return JumpRateMatrix(alphabet, range_, {key: rational(rng) for key in chosen})


def random_kernel(rng, kappa=2, memory=1) -> MarkovKernel:
    alphabet = Alphabet(kappa)
    entries = {}
    for ctx in alphabet.words(memory):
        raw = [Fraction(rng.randint(1, 9)) for _ in range(kappa)]
        total = sum(raw)
        for y in alphabet.letters:
            entries[(ctx, y)] = raw[y] / total
    return MarkovKernel(alphabet, memory, entries)


def random_marginal(rng, kappa=2):
    raw = [Fraction(rng.randint(1, 9)) for _ in range(kappa)]
    total = sum(raw)
    return [v / total for v in raw]


@pytest.fixture
def rng():
    return random.Random(20260809)
