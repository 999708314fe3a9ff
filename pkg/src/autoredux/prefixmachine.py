"""Self-delimiting headers and the compressing prefix-free machine.

Input layout::

    0^|s| 1 s  0^|t| 1 t  payload

where ``s`` is the minimal binary form of ``m`` and ``t`` that of ``c_m``.  The
machine rebuilds the low window of ``A`` by running an introenumerator on the
payload, then copies the payload through.  It stops reading exactly at
``n_m``, which is what makes the set of halting inputs prefix-free.

Everything is written for a hardwired prefix ``b`` (possibly empty): the
window is ``[|b|, |b| + m)`` and the enumeration runs on ``b`` plus the payload.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .enumop import EnumerationOperator, stage_apply_mask
from .universe import BitVector, low_mask, range_mask


class MachineError(ValueError):
    pass


class InsufficientPayload(MachineError):
    pass


class UniverseTooSmall(MachineError):
    pass


def encode_header(v: int) -> str:
    if v < 0:
        raise ValueError(f"header value must be natural, got {v}")
    s = format(v, "b") if v else ""
    return "0" * len(s) + "1" + s


def decode_header(bits: str, pos: int = 0) -> tuple[int, int]:
    """Return ``(value, position after the header)``."""
    k = 0
    while True:
        if pos + k >= len(bits):
            raise InsufficientPayload("header truncated in length prefix")
        c = bits[pos + k]
        if c == "1":
            break
        if c != "0":
            raise MachineError(f"non-binary character {c!r}")
        k += 1
    start = pos + k + 1
    if start + k > len(bits):
        raise InsufficientPayload("header truncated in value")
    s = bits[start:start + k]
    if any(c not in "01" for c in s):
        raise MachineError("non-binary character in header")
    return (int(s, 2) if s else 0), start + k


@dataclass(frozen=True)
class MachineInput:
    gamma: str
    m: int
    c_m: int
    n_m: int
    payload: str

    def __len__(self) -> int:
        return len(self.gamma)

    @classmethod
    def build(cls, m: int, c_m: int, payload: str, base: int = 0) -> "MachineInput":
        gamma = encode_header(m) + encode_header(c_m) + payload
        return cls(gamma, m, c_m, base + m + len(payload), payload)


def _holds(op: EnumerationOperator, a: int, head: int, base: int, p: int, n: int) -> bool:
    """Does stage ``n`` of ``op`` on ``head + a|[base+p, n)`` recover ``a|(base+p)``?"""
    top = base + p
    found = stage_apply_mask(op, head | (a & range_mask(top, n)), n)
    return found & low_mask(top) == a & low_mask(top)


def _chain(op: EnumerationOperator, a: int, head: int, base: int, m: int, limit: int) -> int:
    """Least strictly increasing ``n_1 < ... < n_m`` (with ``n_0 = base``); returns ``n_m``."""
    n = base
    for p in range(1, m + 1):
        n += 1
        while n <= limit and not _holds(op, a, head, base, p, n):
            n += 1
        if n > limit:
            raise UniverseTooSmall(f"no n_{p} <= {limit}; universe too small for m={m}")
    return n


def machine_encode_rel(
    a: BitVector,
    gamma: EnumerationOperator,
    b: BitVector,
    m: int,
    check_cases: bool = False,
    tau: int | None = None,
) -> MachineInput:
    """Encode ``A|n_m`` relative to the hardwired prefix ``b``.

    ``check_cases`` first confirms that neither diagonalization case fires for
    ``gamma`` at ``b`` (the hypothesis under which the decoder is sound).
    """
    if a.size != gamma.size:
        raise ValueError("set and operator live on different universes")
    base = b.size
    if not 1 <= m or base + m > a.size:
        raise ValueError(f"need 1 <= m and |b| + m <= N, got m={m}, |b|={base}, N={a.size}")
    if check_cases:
        from .diagonal import Compressible, DiagonalState, diag_step_subset

        state = DiagonalState(prefix=b)
        if not isinstance(diag_step_subset(a, gamma, state, tau), Compressible):
            raise MachineError("stage-i cases not failed")
    n_m = _chain(gamma, a.mask, b.mask, base, m, a.size)
    c_m = BitVector(a.size, a.mask & range_mask(base, base + m)).count()
    payload = str(a.window(base + m, n_m))
    return MachineInput.build(m, c_m, payload, base)


def machine_encode(a: BitVector, gamma: EnumerationOperator, m: int) -> MachineInput:
    return machine_encode_rel(a, gamma, BitVector(0), m)


def _bits_source(gamma_bits: str) -> Iterator[str]:
    yield from gamma_bits


def run_machine(
    bits: str,
    gamma: EnumerationOperator,
    b: BitVector | None = None,
    ones_below: int = 0,
) -> tuple[BitVector, int]:
    """Run the machine on ``bits``; return ``(A|n_m, bits consumed)``.

    Raises ``InsufficientPayload`` if the input ends before the machine halts.
    """
    b = BitVector(0) if b is None else b
    base, head = b.size, b.mask
    m, pos = decode_header(bits, 0)
    c_m, pos = decode_header(bits, pos)
    if m < 1:
        raise MachineError("m must be >= 1")
    if c_m > m or ones_below > base:
        raise MachineError("one-count exceeds window")
    top = base + m

    known = 0        # payload bits, at their absolute positions
    length = top     # positions below `length` are determined once `low` is known
    low: int | None = None
    # chain state: next index p, and the candidate n to try for it
    p, cand = 1, base + 1

    def window_ones(x: int) -> tuple[int, int]:
        return (
            bin(x & low_mask(base)).count("1"),
            bin(x & range_mask(base, top)).count("1"),
        )

    while True:
        if low is None:
            found = stage_apply_mask(gamma, head | known, length) & low_mask(top)
            if window_ones(found) == (ones_below, c_m):
                low = found
        if low is not None:
            a = low | known
            while p <= m and cand <= length:
                if _holds(gamma, a, head, base, p, cand):
                    if p == m:
                        break
                    p += 1
                cand += 1
            if p == m and cand == length:
                return BitVector(length, a & low_mask(length)), pos
        if pos >= len(bits):
            raise InsufficientPayload(f"payload exhausted at position {length}")
        c = bits[pos]
        if c not in "01":
            raise MachineError(f"non-binary character {c!r}")
        if length >= gamma.size:
            raise InsufficientPayload("payload runs past the universe")
        if c == "1":
            known |= 1 << length
        pos += 1
        length += 1


def machine_decode_rel(
    gamma_input: MachineInput | str,
    gamma: EnumerationOperator,
    b: BitVector,
    ones_below: int,
) -> BitVector:
    bits = gamma_input.gamma if isinstance(gamma_input, MachineInput) else gamma_input
    out, used = run_machine(bits, gamma, b, ones_below)
    if used != len(bits):
        raise MachineError(f"machine halts after {used} of {len(bits)} bits")
    return out


def machine_decode(gamma_input: MachineInput | str, gamma: EnumerationOperator) -> BitVector:
    return machine_decode_rel(gamma_input, gamma, BitVector(0), 0)


def log_bound(m: int) -> int:
    """``4 * ceil(log2(m + 1)) + 2``: the header budget."""
    return 4 * math.ceil(math.log2(m + 1)) + 2


@dataclass(frozen=True)
class CompressionReport:
    m: int
    c_m: int
    n_m: int
    input_length: int
    bound: int

    @property
    def slack(self) -> int:
        return self.bound - self.input_length

    def row(self) -> list[int]:
        return [self.m, self.c_m, self.n_m, self.input_length, self.bound, self.slack]


REPORT_FIELDS = ("m", "c_m", "n_m", "input_len", "bound", "slack")


def report_for(gi: MachineInput, base: int = 0) -> CompressionReport:
    bound = gi.n_m - base - gi.m + log_bound(gi.m)
    rep = CompressionReport(gi.m, gi.c_m, gi.n_m, len(gi.gamma), bound)
    if rep.slack < 0:
        raise AssertionError(f"length bound violated: {rep}")
    return rep


def compression_report(a: BitVector, gamma: EnumerationOperator, m: int) -> CompressionReport:
    return report_for(machine_encode(a, gamma, m))
