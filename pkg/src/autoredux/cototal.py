"""Left-c.e. reals over dyadic rationals, and enumerating a real's 1-bits from
an enumeration of its 0-bits.

All values are numerators over ``2**width``; nothing here touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .universe import BitVector, SetEnumeration


class RealFormatError(ValueError):
    pass


class UnresolvedBit(RuntimeError):
    def __init__(self, position: int) -> None:
        super().__init__(f"unresolved at {position}")
        self.position = position


@dataclass(frozen=True)
class LeftCEReal:
    """Non-descending dyadic approximations; the last one is the exact limit."""

    width: int
    approximations: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError("width must be >= 1")
        if not self.approximations:
            raise ValueError("need at least one approximation")
        top = 1 << self.width
        prev = -1
        for q in self.approximations:
            if not 0 <= q < top:
                raise ValueError(f"approximation {q} outside [0, 2**{self.width})")
            if q < prev:
                raise ValueError("approximations must be non-descending")
            prev = q

    @property
    def limit(self) -> int:
        return self.approximations[-1]

    def as_fraction(self, q: int | None = None) -> Fraction:
        return Fraction(self.limit if q is None else q, 1 << self.width)

    def expansion(self, q: int) -> str:
        return format(q, f"0{self.width}b")

    def bit(self, q: int, k: int) -> int:
        return (q >> (self.width - 1 - k)) & 1


def make_toy_omega(
    programs: Sequence[tuple[int, int | None]], width: int | None = None
) -> LeftCEReal:
    """Halting probability of a finite list of ``(length, halts_at)`` programs.

    One approximation per distinct halting stage, in stage order.
    """
    halting = [(length, stage) for length, stage in programs if stage is not None]
    for length, _ in programs:
        if length < 1:
            raise ValueError(f"program length must be >= 1, got {length}")
    if width is None:
        width = max((length for length, _ in programs), default=1)
    for length, _ in halting:
        if length > width:
            raise ValueError(f"program of length {length} does not fit width {width}")
    if sum(Fraction(1, 1 << length) for length, _ in halting) >= 1:
        raise ValueError("Kraft violation: halting weights sum to >= 1")
    if not halting:
        return LeftCEReal(width, (0,))
    q, total = [], 0
    for stage in sorted({s for _, s in halting}):
        total += sum(1 << (width - length) for length, s in halting if s == stage)
        q.append(total)
    return LeftCEReal(width, tuple(q))


def true_bits(real: LeftCEReal) -> BitVector:
    return BitVector.from_string(real.expansion(real.limit))


@dataclass(frozen=True)
class Resolution:
    position: int
    bit: int
    source: str  # "comp" or "q"
    stage: int | None = None

    def __str__(self) -> str:
        via = "comp" if self.source == "comp" else f"q@{self.stage}"
        return f"resolved {self.position} {self.bit} via {via}"


def trace_enumeration(
    real: LeftCEReal,
    comp: Iterable[int],
    schedule: Sequence[str] = ("comp", "q"),
) -> Iterator[Resolution]:
    """Resolve bits left to right from positive information only.

    Bit ``k`` is 0 once ``k`` shows up in ``comp``; it is 1 once the latest
    approximation read agrees with the resolved prefix and has a 1 at ``k``.
    The two sources are read round-robin in ``schedule`` order.  Only the
    latest approximation is checked: it dominates every earlier one.
    """
    if sorted(schedule) != ["comp", "q"]:
        raise ValueError(f"schedule must order 'comp' and 'q', got {schedule!r}")
    width = real.width
    comp_iter = iter(comp)
    comp_done = False
    seen_zero: set[int] = set()
    q_index = -1
    prefix = 0  # resolved bits, most significant first
    k = 0

    def current_fires() -> bool:
        if q_index < 0:
            return False
        q = real.approximations[q_index]
        return (q >> (width - k)) == prefix and real.bit(q, k) == 1

    while k < width:
        if k in seen_zero:
            yield Resolution(k, 0, "comp")
            prefix <<= 1
            k += 1
            continue
        if current_fires():
            yield Resolution(k, 1, "q", q_index)
            prefix = (prefix << 1) | 1
            k += 1
            continue
        progressed = False
        for source in schedule:
            if source == "comp" and not comp_done:
                try:
                    x = next(comp_iter)
                except StopIteration:
                    comp_done = True
                else:
                    seen_zero.add(x)
                    progressed = True
            elif source == "q" and q_index + 1 < len(real.approximations):
                q_index += 1
                progressed = True
        if not progressed:
            raise UnresolvedBit(k)


def enumerate_from_complement(
    real: LeftCEReal,
    comp: Iterable[int],
    schedule: Sequence[str] = ("comp", "q"),
) -> SetEnumeration:
    emitted = tuple(r.position for r in trace_enumeration(real, comp, schedule) if r.bit == 1)
    return SetEnumeration(real.width, emitted)


# text format ---------------------------------------------------------------


def parse_real(text: str) -> LeftCEReal:
    width = None
    qs: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "width" and len(toks) == 2 and width is None and not qs:
            width = int(toks[1])
        elif toks[0] == "q" and len(toks) == 2 and width is not None:
            digits = toks[1][2:] if toks[1].startswith("0.") else toks[1]
            if len(digits) != width or any(c not in "01" for c in digits):
                raise RealFormatError(f"line {lineno}: expected {width} binary digits")
            qs.append(int(digits, 2))
        else:
            raise RealFormatError(f"line {lineno}: cannot parse {line!r}")
    if width is None:
        raise RealFormatError("missing 'width <W>' header")
    try:
        return LeftCEReal(width, tuple(qs))
    except ValueError as exc:
        raise RealFormatError(str(exc)) from None


def format_real(real: LeftCEReal) -> str:
    lines = [f"width {real.width}"] + [f"q {real.expansion(q)}" for q in real.approximations]
    return "\n".join(lines) + "\n"
