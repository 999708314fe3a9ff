"""Enumeration operators as explicit, ordered axiom lists.

An axiom ``(x, D)`` says: once every element of ``D`` has been seen, ``x`` may
be enumerated.  Axiom order is stage order -- axiom ``k`` becomes visible at
stage ``k + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Iterator, Sequence

from .universe import BitVector, SetEnumeration

REIFY_LIMIT = 1 << 20


class OperatorFormatError(ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class CompositionTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationOperator:
    size: int
    axioms: tuple[tuple[int, int], ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        for head, body in self.axioms:
            if not 0 <= head < self.size:
                raise IndexError(f"axiom head {head} outside universe of size {self.size}")
            if body < 0 or body >> self.size:
                raise IndexError(f"axiom body {body:#x} outside universe of size {self.size}")

    @classmethod
    def from_pairs(
        cls, size: int, pairs: Iterable[tuple[int, Iterable[int]]], name: str = ""
    ) -> "EnumerationOperator":
        """Build from ``(head, [body elements])`` pairs."""
        axioms = []
        for head, body in pairs:
            axioms.append((head, BitVector.from_elements(size, body).mask))
        return cls(size, tuple(axioms), name)

    @classmethod
    def identity(cls, size: int) -> "EnumerationOperator":
        return cls(size, tuple((x, 1 << x) for x in range(size)), "id")

    def __len__(self) -> int:
        return len(self.axioms)

    def pairs(self) -> list[tuple[int, list[int]]]:
        return [(h, list(BitVector(self.size, b))) for h, b in self.axioms]


def _apply_mask(axioms: Sequence[tuple[int, int]], b: int) -> int:
    out = 0
    for head, body in axioms:
        if body & ~b == 0:
            out |= 1 << head
    return out


def apply(op: EnumerationOperator, b: BitVector) -> BitVector:
    return BitVector(op.size, _apply_mask(op.axioms, b.mask))


def stage_apply(op: EnumerationOperator, b: BitVector, s: int) -> BitVector:
    """``apply`` using only the first ``s`` axioms."""
    if s < 0:
        raise ValueError(f"stage must be >= 0, got {s}")
    return BitVector(op.size, _apply_mask(op.axioms[:s], b.mask))


def stage_apply_mask(op: EnumerationOperator, b: int, s: int) -> int:
    return _apply_mask(op.axioms[:s], b)


def iter_stream(op: EnumerationOperator, source: Iterable[int]) -> Iterator[tuple[int, int]]:
    """Simulate ``op`` on an enumeration, yielding ``(reads_so_far, head)``.

    Heads with empty bodies come out before anything is read.  Within one read,
    newly enabled heads are emitted in axiom order.
    """
    seen = 0
    emitted = 0
    pending = list(op.axioms)

    def fire(reads: int) -> Iterator[tuple[int, int]]:
        nonlocal emitted, pending
        keep = []
        for head, body in pending:
            if body & ~seen == 0:
                if not (emitted >> head) & 1:
                    emitted |= 1 << head
                    yield reads, head
            else:
                keep.append((head, body))
        pending = keep

    yield from fire(0)
    for reads, x in enumerate(source, start=1):
        seen |= 1 << x
        yield from fire(reads)


def apply_stream(op: EnumerationOperator, e: SetEnumeration) -> SetEnumeration:
    return SetEnumeration(op.size, tuple(head for _, head in iter_stream(op, e)))


def apply_composed(ops: Sequence[EnumerationOperator], b: BitVector) -> BitVector:
    """Right-to-left composition: ``[D, G, F]`` means ``D(G(F(b)))``."""
    if not ops:
        raise ValueError("apply_composed needs at least one operator")
    return reduce(lambda acc, op: apply(op, acc), reversed(ops), b)


def reify_composition(
    op2: EnumerationOperator, op1: EnumerationOperator, limit: int = REIFY_LIMIT
) -> EnumerationOperator:
    """Explicit axioms for ``op2 . op1``.

    For each axiom ``(x, E)`` of ``op2`` and each choice of one ``op1``-axiom per
    element of ``E``, emit ``(x, union of the chosen bodies)``.  Duplicate
    axioms are dropped, first occurrence wins.
    """
    if op1.size != op2.size:
        raise ValueError("operators live on different universes")
    by_head: dict[int, list[int]] = {}
    for head, body in op1.axioms:
        by_head.setdefault(head, []).append(body)

    space = 0
    for _, e in op2.axioms:
        n = 1
        for y in BitVector(op2.size, e):
            n *= len(by_head.get(y, ()))
        space += n
    if space > limit:
        raise CompositionTooLarge(
            f"composition search space {space} exceeds {limit}; use apply_composed"
        )

    out: list[tuple[int, int]] = []
    seen = set()
    for x, e in op2.axioms:
        choices = [by_head.get(y, []) for y in BitVector(op2.size, e)]
        for pick in product(*choices):
            body = reduce(int.__or__, pick, 0)
            if (x, body) not in seen:
                seen.add((x, body))
                out.append((x, body))
    label = f"{op2.name}.{op1.name}" if op1.name or op2.name else ""
    return EnumerationOperator(op2.size, tuple(out), label)


# text format ---------------------------------------------------------------


def parse_operator(text: str, size: int | None = None, name: str = "") -> EnumerationOperator:
    """Read the ``universe N`` / ``axiom h b1 b2 ...`` format.

    ``size`` stands in for a missing header (useful for fragments); a header
    that disagrees with ``size`` is an error.
    """
    header: int | None = None
    raw: list[tuple[int, int, list[int]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            nums = [int(t) for t in toks[1:]]
        except ValueError:
            raise OperatorFormatError(lineno, f"non-integer token in {line!r}") from None
        if toks[0] == "universe":
            if len(nums) != 1 or nums[0] < 1:
                raise OperatorFormatError(lineno, "expected 'universe <N>' with N >= 1")
            if header is not None:
                raise OperatorFormatError(lineno, "duplicate universe header")
            if raw:
                raise OperatorFormatError(lineno, "universe header must precede axioms")
            header = nums[0]
        elif toks[0] == "axiom":
            if not nums:
                raise OperatorFormatError(lineno, "axiom without head")
            if any(v < 0 for v in nums):
                raise OperatorFormatError(lineno, "negative element")
            raw.append((lineno, nums[0], nums[1:]))
        else:
            raise OperatorFormatError(lineno, f"unknown directive {toks[0]!r}")

    if header is not None and size is not None and header != size:
        raise OperatorFormatError(0, f"header says universe {header}, caller expects {size}")
    n = header if header is not None else size
    if n is None:
        raise OperatorFormatError(0, "missing 'universe <N>' header")

    axioms = []
    for lineno, head, body in raw:
        if head >= n:
            raise OperatorFormatError(lineno, f"head {head} outside universe of size {n}")
        bad = [b for b in body if b >= n]
        if bad:
            raise OperatorFormatError(lineno, f"body element {bad[0]} outside universe of size {n}")
        m = 0
        for b in body:
            m |= 1 << b
        axioms.append((head, m))
    return EnumerationOperator(n, tuple(axioms), name)


def format_operator(op: EnumerationOperator) -> str:
    lines = [f"universe {op.size}"]
    for head, body in op.axioms:
        elems = " ".join(str(b) for b in BitVector(op.size, body))
        lines.append(f"axiom {head} {elems}".rstrip())
    return "\n".join(lines) + "\n"


def restrict_heads(op: EnumerationOperator, keep: BitVector) -> EnumerationOperator:
    """Drop every axiom whose head is not in ``keep``."""
    return EnumerationOperator(
        op.size, tuple((h, b) for h, b in op.axioms if (keep.mask >> h) & 1), op.name
    )
