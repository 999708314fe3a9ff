"""Autoreduction procedures, autoreducibility checks and measure experiments.

A procedure maps ``(n, Z)`` to a bit.  Every evaluation goes through
``mask(Z, n)`` first, so no procedure can look at the bit it is predicting.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Callable, Mapping

from .enumop import EnumerationOperator, _apply_mask
from .universe import BitVector, default_tau, infinite_like, low_mask, range_mask

EXHAUSTIVE_LIMIT = 24
SAMPLE_CHUNK = 4096
EPSILON = Fraction(1, 4)
MAJORITY = (1 - EPSILON) / 2

Rule = Callable[[int, int], int]


class NotAutoreducible(ValueError):
    pass


@dataclass(frozen=True)
class AutoreductionProcedure:
    """``kind`` is one of ``cototal``, ``uie``, ``diag``, ``custom``.

    ``rule(n, z)`` receives ``z`` as an int bitmask with bit ``n`` already
    cleared.
    """

    kind: str
    size: int
    rule: Rule = field(repr=False, compare=False)
    tau: int | None = None
    label: str = ""

    def __call__(self, n: int, a: BitVector) -> int:
        return psi_eval(self, n, a)


def psi_eval(psi: AutoreductionProcedure, n: int, a: BitVector) -> int:
    if not 0 <= n < psi.size:
        raise IndexError(f"position {n} outside universe of size {psi.size}")
    return psi.rule(n, a.mask & ~(1 << n)) & 1


def make_cototal_psi(delta: EnumerationOperator) -> AutoreductionProcedure:
    """``Psi(n, Z) = 1`` iff ``n`` is enumerated by ``delta`` from the complement of ``Z``."""
    full = low_mask(delta.size)
    axioms = delta.axioms

    def rule(n: int, z: int) -> int:
        return (_apply_mask(axioms, full & ~z) >> n) & 1

    return AutoreductionProcedure("cototal", delta.size, rule, label=delta.name)


def make_uie_psi(
    phi: EnumerationOperator,
    gamma: EnumerationOperator,
    delta: EnumerationOperator,
    tau: int | None = None,
) -> AutoreductionProcedure:
    """1 if ``n`` is in ``delta(gamma(phi(Z)))`` or ``phi(Z)`` has nothing at or above ``tau``."""
    size = phi.size
    tau = default_tau(size) if tau is None else tau
    if not 0 <= tau < size:
        raise ValueError(f"tau={tau} must lie in 0..{size - 1}")

    def rule(n: int, z: int) -> int:
        out = _apply_mask(phi.axioms, z)
        if not infinite_like(out, tau):
            return 1
        return (_apply_mask(delta.axioms, _apply_mask(gamma.axioms, out)) >> n) & 1

    return AutoreductionProcedure("uie", size, rule, tau=tau)


def make_diag_psi(
    gamma: EnumerationOperator,
    phi: EnumerationOperator,
    delta: EnumerationOperator,
    anchor: BitVector,
    excluded: BitVector,
    tau: int | None = None,
) -> AutoreductionProcedure:
    """Procedure for the degree-level diagonalization fallback.

    With ``T = phi(Z - excluded)``: 1 if ``T`` has nothing at or above ``tau``,
    otherwise 1 iff ``n`` is in ``delta(gamma(anchor . T|[|anchor|, N)))``.
    ``anchor`` is a string prefix; the tail of ``T`` starts where it ends.
    """
    size = phi.size
    tau = default_tau(size) if tau is None else tau
    if not 0 <= tau < size:
        raise ValueError(f"tau={tau} must lie in 0..{size - 1}")
    head = anchor.mask
    tail = range_mask(anchor.size, size)
    drop = excluded.mask

    def rule(n: int, z: int) -> int:
        t = _apply_mask(phi.axioms, z & ~drop)
        if not infinite_like(t, tau):
            return 1
        g = _apply_mask(gamma.axioms, head | (t & tail))
        return (_apply_mask(delta.axioms, g) >> n) & 1

    return AutoreductionProcedure("diag", size, rule, tau=tau)


def make_table_psi(
    size: int, table: Mapping[tuple[int, int], int], default: int = 0, label: str = ""
) -> AutoreductionProcedure:
    """Look ``(n, masked set as int)`` up in ``table``."""
    for n, z in table:
        if (z >> n) & 1:
            raise ValueError(f"table key ({n}, {z:#x}) has bit {n} set")

    def rule(n: int, z: int) -> int:
        return table.get((n, z), default)

    return AutoreductionProcedure("custom", size, rule, label=label)


def make_rule_psi(size: int, rule: Rule, label: str = "") -> AutoreductionProcedure:
    """Custom procedure from a function of ``(n, masked int)``."""
    return AutoreductionProcedure("custom", size, rule, label=label)


def constant_psi(size: int, bit: int = 0) -> AutoreductionProcedure:
    return make_rule_psi(size, lambda n, z: bit, label=f"const{bit}")


def is_autoreducible(psi: AutoreductionProcedure, a: BitVector) -> tuple[bool, int | None]:
    """Check ``A(n) == Psi(n, A - {n})`` for every ``n``; report the least failure."""
    if a.size != psi.size:
        raise ValueError(f"set of size {a.size} for procedure of size {psi.size}")
    m = a.mask
    rule = psi.rule
    for n in range(psi.size):
        bit = 1 << n
        if (rule(n, m & ~bit) & 1) != ((m >> n) & 1):
            return False, n
    return True, None


def _autoreducible_mask(psi: AutoreductionProcedure, m: int) -> bool:
    rule = psi.rule
    for n in range(psi.size):
        if (rule(n, m & ~(1 << n)) & 1) != ((m >> n) & 1):
            return False
    return True


def flip_refute(psi: AutoreductionProcedure, a: BitVector, n: int) -> BitVector:
    """Flip bit ``n`` of an autoreducible ``A``; the result fails at ``n``.

    The masked view at ``n`` is unchanged, so the procedure still predicts the
    old bit.
    """
    ok, where = is_autoreducible(psi, a)
    if not ok:
        raise NotAutoreducible(f"set is not autoreducible (fails at {where})")
    if not 0 <= n < a.size:
        raise IndexError(f"position {n} outside universe of size {a.size}")
    return BitVector(a.size, a.mask ^ (1 << n))


def worker_count() -> int:
    """Worker cap from ``AUTOREDUX_THREADS`` (default 1)."""
    raw = os.environ.get("AUTOREDUX_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _count_range(psi: AutoreductionProcedure, lo: int, hi: int) -> int:
    return sum(1 for m in range(lo, hi) if _autoreducible_mask(psi, m))


def count_autoreducible(psi: AutoreductionProcedure, size: int | None = None,
                        workers: int | None = None) -> int:
    size = psi.size if size is None else size
    if size != psi.size:
        raise ValueError(f"procedure is defined on size {psi.size}, not {size}")
    if size > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive count limited to N <= {EXHAUSTIVE_LIMIT}, got {size}")
    total = 1 << size
    workers = worker_count() if workers is None else workers
    if workers <= 1 or total < 1 << 12:
        return _count_range(psi, 0, total)
    step = max(1, total // (workers * 4))
    bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(lambda b: _count_range(psi, *b), bounds))


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * ((p * (1 - p) / trials + z2 / (4 * trials * trials)) ** 0.5) / denom
    # the endpoints are exact at the boundary; keep rounding from moving them
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def _sample_chunk(psi: AutoreductionProcedure, seed: int, chunk: int, count: int) -> int:
    # chunk streams are keyed by (seed, chunk index), never by worker
    rng = random.Random(f"{seed}:{chunk}")
    size = psi.size
    return sum(1 for _ in range(count) if _autoreducible_mask(psi, rng.getrandbits(size)))


def sample_fraction(
    psi: AutoreductionProcedure,
    size: int | None = None,
    samples: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
) -> tuple[float, tuple[float, float]]:
    """Monte-Carlo fraction of autoreducible sets with a 95% Wilson interval."""
    size = psi.size if size is None else size
    if size != psi.size:
        raise ValueError(f"procedure is defined on size {psi.size}, not {size}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    jobs = [(c, min(SAMPLE_CHUNK, samples - lo)) for c, lo in enumerate(range(0, samples, SAMPLE_CHUNK))]
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        hits = sum(_sample_chunk(psi, seed, c, k) for c, k in jobs)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(lambda j: _sample_chunk(psi, seed, *j), jobs))
    return hits / samples, wilson_interval(hits, samples)


@dataclass(frozen=True)
class DensityReport:
    """Exact measures for one run of the partition/flip argument.

    Measures are conditional on the cylinder: a count divided by
    ``2**(N - |sigma|)``.
    """

    sigma: BitVector
    n: int
    s_in_cylinder: Fraction
    s_total: Fraction
    p0: Fraction
    p1: Fraction
    larger: int
    p2: Fraction
    p2_meets_s: bool

    @property
    def density(self) -> Fraction:
        """``mu(S & [sigma]) / mu(S)`` in absolute measure."""
        if self.s_total == 0:
            return Fraction(0)
        cyl = Fraction(1, 1 << self.sigma.size)
        return self.s_in_cylinder * cyl / self.s_total

    @property
    def larger_share(self) -> Fraction:
        """Absolute measure of the larger part over ``mu(S)``."""
        if self.s_total == 0:
            return Fraction(0)
        cyl = Fraction(1, 1 << self.sigma.size)
        return max(self.p0, self.p1) * cyl / self.s_total


def density_experiment(
    psi: AutoreductionProcedure,
    in_class: Callable[[BitVector], bool],
    sigma: BitVector,
    n: int,
) -> DensityReport:
    size = psi.size
    if not sigma.size <= n < size:
        raise ValueError(f"need |sigma| <= n < N, got |sigma|={sigma.size}, n={n}, N={size}")
    if size > EXHAUSTIVE_LIMIT:
        raise ValueError(f"density survey limited to N <= {EXHAUSTIVE_LIMIT}")
    members = {m for m in range(1 << size) if in_class(BitVector(size, m))}
    k = sigma.size
    head = sigma.mask
    parts: tuple[list[int], list[int]] = ([], [])
    for m in members:
        if m & low_mask(k) == head:
            parts[psi.rule(n, m & ~(1 << n)) & 1].append(m)
    larger = 0 if len(parts[0]) >= len(parts[1]) else 1
    image = [m ^ (1 << n) for m in parts[larger]]
    scale = Fraction(1, 1 << (size - k))
    return DensityReport(
        sigma=sigma,
        n=n,
        s_in_cylinder=(len(parts[0]) + len(parts[1])) * scale,
        s_total=Fraction(len(members), 1 << size),
        p0=len(parts[0]) * scale,
        p1=len(parts[1]) * scale,
        larger=larger,
        p2=len(set(image)) * scale,
        p2_meets_s=any(m in members for m in image),
    )


CSV_FIELDS = ("psi_kind", "N", "samples", "seed", "fraction", "ci_low", "ci_high", "exact_count")
