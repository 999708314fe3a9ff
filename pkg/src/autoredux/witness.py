"""Finite-universe witness checkers and fixture generators."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .enumop import EnumerationOperator, apply
from .universe import BitVector, default_tau, range_mask

EXHAUSTIVE_SUBSETS = 1 << 20
DEFAULT_SAMPLES = 2000
_BATCH = 1 << 15


@dataclass(frozen=True)
class WitnessReport:
    holds: bool
    counterexample: BitVector | int | None = None
    mode: str = "exhaustive"
    checked: int = 0
    seed: int | None = None

    def __str__(self) -> str:
        if self.counterexample is None:
            ce = "-"
        elif isinstance(self.counterexample, BitVector):
            ce = str(self.counterexample)
        else:
            ce = str(self.counterexample)
        mode = self.mode if self.seed is None else f"{self.mode}({self.checked},{self.seed})"
        return "\n".join([
            f"holds: {'true' if self.holds else 'false'}",
            f"counterexample: {ce}",
            f"mode: {mode}",
            f"checked: {self.checked}",
        ]) + "\n"


def is_cototal_witness(a: BitVector, gamma: EnumerationOperator) -> WitnessReport:
    """``gamma(complement A) == A``; the counterexample is the least disagreement."""
    out = apply(gamma, a.complement())
    diff = out.mask ^ a.mask
    if diff == 0:
        return WitnessReport(True, checked=1)
    return WitnessReport(False, (diff & -diff).bit_length() - 1, checked=1)


def _submasks(x: int) -> Iterator[int]:
    sub = x
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & x


def _batch_apply(op: EnumerationOperator, ys: np.ndarray) -> np.ndarray:
    """Apply ``op`` to many sets at once (universe of at most 64 points)."""
    if not op.axioms:
        return np.zeros(len(ys), dtype=np.uint64)
    bodies = np.array([b for _, b in op.axioms], dtype=np.uint64)
    heads = np.array([1 << h for h, _ in op.axioms], dtype=np.uint64)
    fired = (bodies[None, :] & ~ys[:, None]) == 0
    return np.bitwise_or.reduce(np.where(fired, heads[None, :], np.uint64(0)), axis=1)


def _first_failure(gamma: EnumerationOperator, x: int, ys: list[int]) -> int | None:
    if gamma.size <= 64:
        for lo in range(0, len(ys), _BATCH):
            chunk = np.array(ys[lo:lo + _BATCH], dtype=np.uint64)
            bad = np.nonzero(_batch_apply(gamma, chunk) != np.uint64(x))[0]
            if len(bad):
                return int(chunk[bad[0]])
        return None
    for y in ys:
        if apply(gamma, BitVector(gamma.size, y)).mask != x:
            return y
    return None


def is_uie_witness(
    x: BitVector,
    gamma: EnumerationOperator,
    tau: int | None = None,
    mode: str = "auto",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> WitnessReport:
    """Does ``gamma`` send every infinite-like subset of ``X`` back to ``X``?

    ``auto`` is exhaustive when ``X`` has at most 2**20 subsets.  Sampled mode
    always includes ``X`` and the singletons above ``tau``; together with
    monotonicity those already decide the question, the random subsets are a
    cross-check.
    """
    size = x.size
    tau = default_tau(size) if tau is None else tau
    if not x.infinite_like(tau):
        raise ValueError(f"X has no element >= tau={tau}")
    high = x.mask & range_mask(tau, size)
    if mode == "auto":
        mode = "exhaustive" if (1 << x.count()) <= EXHAUSTIVE_SUBSETS else "sampled"

    if mode == "exhaustive":
        ys = [y for y in _submasks(x.mask) if y & high]
        bad = _first_failure(gamma, x.mask, ys)
        ce = None if bad is None else BitVector(size, bad)
        return WitnessReport(bad is None, ce, "exhaustive", len(ys))

    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    ys = [x.mask] + [1 << h for h in BitVector(size, high)]
    highs = list(BitVector(size, high))
    elems = list(x)
    for _ in range(samples):
        y = 1 << rng.choice(highs)
        for e in elems:
            if rng.random() < 0.5:
                y |= 1 << e
        ys.append(y)
    bad = _first_failure(gamma, x.mask, ys)
    ce = None if bad is None else BitVector(size, bad)
    return WitnessReport(bad is None, ce, "sampled", len(ys), seed)


def gen_trivial_uie(x: BitVector) -> EnumerationOperator:
    """Axioms ``(a, {b})`` for all ``a, b`` in ``X``, ordered by ``a`` then ``b``."""
    if x.mask == 0:
        raise ValueError("gen_trivial_uie needs a nonempty set")
    elems = list(x)
    axioms = tuple((a, 1 << b) for a in elems for b in elems)
    return EnumerationOperator(x.size, axioms, "trivial-uie")


def gen_threshold_uie(x: BitVector, tau: int | None = None) -> EnumerationOperator:
    """Axioms ``(a, {b})`` for ``a`` in ``X`` and ``b`` in ``X`` above ``tau``, ordered by ``b``.

    Smallest introenumerator whose bodies all sit at or above ``tau``; every
    head is available after the first ``|X|`` stages.
    """
    tau = default_tau(x.size) if tau is None else tau
    highs = [b for b in x if b >= tau]
    if not highs:
        raise ValueError(f"X has no element >= tau={tau}")
    axioms = tuple((a, 1 << b) for b in highs for a in x)
    return EnumerationOperator(x.size, axioms, "threshold-uie")


def gen_cototal_example(size: int) -> tuple[BitVector, EnumerationOperator]:
    """The even numbers, enumerated from the odd ones via ``(2k, {2k+1})``."""
    if size < 2 or size % 2:
        raise ValueError(f"gen_cototal_example needs an even N >= 2, got {size}")
    a = BitVector.evens(size)
    gamma = EnumerationOperator(
        size, tuple((2 * k, 1 << (2 * k + 1)) for k in range(size // 2)), "evens-from-odds"
    )
    return a, gamma


def uie_witness_for(a: BitVector) -> EnumerationOperator:
    """An introenumerator for a generated cototal fixture."""
    return gen_trivial_uie(a)
