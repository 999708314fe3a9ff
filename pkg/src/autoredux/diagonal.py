"""Finite-stage diagonalization against a list of enumeration operators.

Two engines:

* subset engine -- build ``B = U b_i`` inside ``A`` with ``Gamma_i(B) != A``;
* degree engine -- build ``C = U c_i`` inside ``B`` (where ``A = Delta(B)``,
  ``B = Phi(A)``) with ``Gamma_i(C) != B``, shrinking ``Phi``'s input by a
  growing exclusion set ``D_i``.

A stage where neither case applies is reported as ``Compressible``; the
subset engine hands it to the prefix-free machine, the degree engine to an
autoreduction procedure.

Unbounded searches are cut off at ``N`` and scanned in increasing order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .autoreduce import AutoreductionProcedure, make_diag_psi
from .enumop import EnumerationOperator, _apply_mask
from .universe import BitVector, default_tau, infinite_like, range_mask


class DiagonalError(ValueError):
    pass


@dataclass(frozen=True)
class StageOutcome:
    stage: int
    case: str  # "1", "2" or "C"
    n: int | None = None
    m: int | None = None
    e: str | None = None

    def __str__(self) -> str:
        parts = [f"stage {self.stage}", f"case{self.case}"]
        if self.e is not None:
            parts.append(f"e={self.e or '-'}")
        if self.m is not None:
            parts.append(f"m={self.m}")
        if self.n is not None:
            parts.append(f"n={self.n}")
        return " ".join(parts)


@dataclass(frozen=True)
class DiagonalState:
    stage: int = 0
    prefix: BitVector = field(default_factory=lambda: BitVector(0))
    excluded: int = 0
    log: tuple[StageOutcome, ...] = ()

    def excluded_set(self, size: int) -> BitVector:
        return BitVector(size, self.excluded)


@dataclass(frozen=True)
class Compressible:
    stage: int
    state: DiagonalState
    anchor: BitVector | None = None  # degree engine only


@dataclass(frozen=True)
class DiagResult:
    state: DiagonalState
    subset: BitVector | None = None
    compressible: Compressible | None = None

    @property
    def ok(self) -> bool:
        return self.subset is not None

    def log_lines(self) -> list[str]:
        lines = [str(o) for o in self.state.log]
        if self.compressible is not None:
            lines.append(f"stage {self.compressible.stage} caseC")
        return lines


def _tau(size: int, tau: int | None) -> int:
    return default_tau(size) if tau is None else tau


# subset engine -------------------------------------------------------------


def diag_step_subset(
    a: BitVector,
    gamma: EnumerationOperator,
    state: DiagonalState,
    tau: int | None = None,
) -> DiagonalState | Compressible:
    size = a.size
    tau = _tau(size, tau)
    b, k = state.prefix.mask, state.prefix.size
    if b & ~a.mask:
        raise DiagonalError("prefix is not a subset of A")
    if not infinite_like(a.mask & range_mask(k + 1, size), tau):
        raise DiagonalError(f"universe too small: A has nothing >= tau above position {k}")
    axioms, target = gamma.axioms, a.mask

    for n in range(k + 1, size + 1):
        s = b | (target & range_mask(k, n))
        if _apply_mask(axioms, s) & ~target:
            return DiagonalState(
                state.stage + 1, BitVector(n, s), state.excluded,
                state.log + (StageOutcome(state.stage, "1", n=n),),
            )

    for m in range(1, size - k + 1):
        tail = target & range_mask(k + m, size)
        if not infinite_like(tail, tau):
            break
        out = _apply_mask(axioms, b | tail)
        if out & ~target == 0 and out != target:
            return DiagonalState(
                state.stage + 1, BitVector(k + m, b), state.excluded,
                state.log + (StageOutcome(state.stage, "2", m=m),),
            )

    return Compressible(state.stage, state)


def diag_run(
    a: BitVector, ops: Sequence[EnumerationOperator], tau: int | None = None
) -> DiagResult:
    tau = _tau(a.size, tau)
    if not a.infinite_like(tau):
        raise DiagonalError("A has no element >= tau")
    state = DiagonalState()
    for gamma in ops:
        step = diag_step_subset(a, gamma, state, tau)
        if isinstance(step, Compressible):
            return DiagResult(state, compressible=step)
        state = step
    k = state.prefix.size
    subset = BitVector(a.size, state.prefix.mask | (a.mask & range_mask(k, a.size)))
    return DiagResult(state, subset=subset)


def verify_diag(
    target: BitVector,
    ops: Sequence[EnumerationOperator],
    subset: BitVector,
    tau: int | None = None,
) -> bool:
    tau = _tau(target.size, tau)
    if subset.size != target.size or not subset.issubset(target):
        return False
    if not subset.infinite_like(tau):
        return False
    return all(_apply_mask(op.axioms, subset.mask) != target.mask for op in ops)


# degree engine -------------------------------------------------------------


def check_degree_equations(
    a: BitVector, b: BitVector, phi: EnumerationOperator, delta: EnumerationOperator
) -> None:
    if _apply_mask(delta.axioms, b.mask) != a.mask:
        raise DiagonalError("witness equation A = Delta(B) fails")
    if _apply_mask(phi.axioms, a.mask) != b.mask:
        raise DiagonalError("witness equation B = Phi(A) fails")


def diag_step_degree(
    a: BitVector,
    b: BitVector,
    phi: EnumerationOperator,
    delta: EnumerationOperator,
    gamma: EnumerationOperator,
    state: DiagonalState,
    tau: int | None = None,
) -> DiagonalState | Compressible:
    size = a.size
    tau = _tau(size, tau)
    check_degree_equations(a, b, phi, delta)
    c, k, d = state.prefix.mask, state.prefix.size, state.excluded
    t = _apply_mask(phi.axioms, a.mask & ~d)
    if not infinite_like(t, tau):
        raise DiagonalError("Phi(A - D) has no element >= tau")
    ahead = t & range_mask(k, size)
    if not ahead:
        raise DiagonalError(f"universe too small: Phi(A - D) is empty above position {k}")
    first = (ahead & -ahead).bit_length()  # shortest extension with a new element
    anchor = BitVector(first, c | (t & range_mask(k, first)))
    axioms, target = gamma.axioms, b.mask

    def ext(length: int) -> int:
        return c | (t & range_mask(k, length))

    for length in range(first, size + 1):
        e = ext(length)
        if _apply_mask(axioms, e) & ~target:
            return DiagonalState(
                state.stage + 1, BitVector(length, e), d,
                state.log + (StageOutcome(state.stage, "1", e=str(BitVector(length, e))),),
            )

    shrunk = {}
    for n in range(size):
        tn = _apply_mask(phi.axioms, a.mask & ~(d | 1 << n))
        if infinite_like(tn, tau):
            shrunk[n] = tn
    for length in range(first, size + 1):
        e = ext(length)
        for n, tn in shrunk.items():
            out = _apply_mask(axioms, e | (tn & range_mask(length, size)))
            if out & ~target == 0 and out != target:
                return DiagonalState(
                    state.stage + 1, BitVector(length, e), d | 1 << n,
                    state.log + (StageOutcome(state.stage, "2", n=n, e=str(BitVector(length, e))),),
                )

    return Compressible(state.stage, state, anchor)


def diag_run_degree(
    a: BitVector,
    b: BitVector,
    phi: EnumerationOperator,
    delta: EnumerationOperator,
    ops: Sequence[EnumerationOperator],
    tau: int | None = None,
) -> DiagResult:
    tau = _tau(a.size, tau)
    state = DiagonalState()
    for gamma in ops:
        step = diag_step_degree(a, b, phi, delta, gamma, state, tau)
        if isinstance(step, Compressible):
            return DiagResult(state, compressible=step)
        state = step
    k = state.prefix.size
    t = _apply_mask(phi.axioms, a.mask & ~state.excluded)
    subset = BitVector(a.size, state.prefix.mask | (t & range_mask(k, a.size)))
    return DiagResult(state, subset=subset)


def fallback_psi(
    phi: EnumerationOperator,
    delta: EnumerationOperator,
    gamma: EnumerationOperator,
    comp: Compressible,
    tau: int | None = None,
) -> AutoreductionProcedure:
    """Autoreduction procedure for a degree-engine stage where both cases failed.

    Anchored at the shortest one-new-element extension of ``c_i``; with the
    bare ``c_i`` the procedure can miss ``n`` when dropping ``n`` from the
    input also removes the element that extension adds.
    """
    if comp.anchor is None:
        raise ValueError("fallback_psi needs a degree-engine Compressible")
    size = phi.size
    return make_diag_psi(gamma, phi, delta, comp.anchor, comp.state.excluded_set(size), tau)


# fixtures ------------------------------------------------------------------


def example_family(size: int = 16) -> tuple[BitVector, list[EnumerationOperator]]:
    """``A = evens`` with one operator per outcome, run in order:

    * ``{(5, {0})}`` -- any set containing 0 yields an odd number (case 1, n=1);
    * ``{(x, {2}) : x even}`` -- dropping 2 silences it (case 2, m=2);
    * all ``(x, {y})`` for even ``x, y`` -- regenerates A from anything (compressible).
    """
    from .witness import gen_trivial_uie

    a = BitVector.evens(size)
    g0 = EnumerationOperator.from_pairs(size, [(5, [0])], "G0")
    g1 = EnumerationOperator.from_pairs(size, [(x, [2]) for x in a], "G1")
    g2 = replace(gen_trivial_uie(a), name="G2")
    return a, [g0, g1, g2]
