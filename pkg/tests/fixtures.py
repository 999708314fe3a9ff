"""Fixture corpora shared by unit and acceptance tests."""

import random
from functools import lru_cache

from autoredux.universe import BitVector
from autoredux.witness import gen_threshold_uie, gen_trivial_uie

from conftest import random_set


@lru_cache(maxsize=None)
def uie_sets():
    """(A, Gamma) pairs: Gamma is a uniform introenumerator for A."""
    rng = random.Random(256)
    out = [(BitVector.evens(16), gen_trivial_uie(BitVector.evens(16)))]
    for size, count in [(32, 3), (64, 3), (128, 3), (256, 3)]:
        tau = size // 2
        for _ in range(count):
            a = random_set(rng, size, 0.4).union(BitVector.from_elements(size, [tau]))
            out.append((a, gen_threshold_uie(a, tau)))
    return tuple(out)


@lru_cache(maxsize=None)
def uie_corpus():
    """At least 50 (A, Gamma, m) triples with m up to 64 and N up to 256."""
    triples = []
    for a, gamma in uie_sets():
        room = a.size // 2 if a.size > 16 else 4
        for m in sorted({1, 2, 3, 5, 8, 16, 32, 48, 64}):
            if m <= room:
                triples.append((a, gamma, m))
    return tuple(triples)


def random_diag_family(rng, size=16, n_ops=3):
    """A random set with operators of at most ``size`` axioms each.

    Kinds: random noise, partial introenumerators keyed on a few elements,
    and a top-keyed exact one ``{(x, {max A}) : x in A}``.
    """
    from autoredux.enumop import EnumerationOperator
    from conftest import random_operator

    tau = (3 * size + 3) // 4
    a = random_set(rng, size, 0.5).union(BitVector.from_elements(size, [rng.randrange(tau, size)]))
    elems = list(a)
    ops = []
    for _ in range(n_ops):
        kind = rng.choice(["noise", "partial", "exact"])
        if kind == "noise":
            ops.append(random_operator(rng, size, rng.randint(1, size), 2))
        elif kind == "partial":
            keys = rng.sample(elems, min(len(elems), rng.randint(1, 2)))
            heads = [x for x in elems if rng.random() < 0.8]
            pairs = [(x, [y]) for y in keys for x in heads][:size]
            ops.append(EnumerationOperator.from_pairs(size, pairs))
        else:
            ops.append(EnumerationOperator.from_pairs(size, [(x, [elems[-1]]) for x in elems]))
    return a, ops
