import random

import pytest

from autoredux.enumop import EnumerationOperator
from autoredux.universe import BitVector


def random_operator(rng: random.Random, size: int, n_axioms: int | None = None,
                    max_body: int = 3, heads=None, name: str = "") -> EnumerationOperator:
    if n_axioms is None:
        n_axioms = rng.randint(0, 8)
    heads = list(range(size)) if heads is None else list(heads)
    axioms = []
    for _ in range(n_axioms):
        h = rng.choice(heads)
        body = 0
        for _ in range(rng.randint(0, max_body)):
            body |= 1 << rng.randrange(size)
        axioms.append((h, body))
    return EnumerationOperator(size, tuple(axioms), name)


def random_set(rng: random.Random, size: int, p: float = 0.5) -> BitVector:
    return BitVector.from_elements(size, [i for i in range(size) if rng.random() < p])


def set_apply(op: EnumerationOperator, b: set[int]) -> set[int]:
    """Set-semantics oracle, independent of the bitmask path."""
    out = set()
    for head, body in op.pairs():
        if set(body) <= b:
            out.add(head)
    return out


@pytest.fixture
def rng():
    return random.Random(20261016)
