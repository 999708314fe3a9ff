"""Acceptance suite: one test per criterion, each a single pass/fail line under
``pytest -v``.  Failure messages carry the measured numbers."""

import os
import random
import subprocess
import sys
import time

from autoredux.autoreduce import (
    count_autoreducible,
    flip_refute,
    is_autoreducible,
    make_cototal_psi,
    sample_fraction,
)
from autoredux.cototal import LeftCEReal, enumerate_from_complement, true_bits
from autoredux.diagonal import (
    Compressible,
    DiagonalError,
    DiagonalState,
    diag_step_degree,
    diag_step_subset,
    example_family,
    fallback_psi,
    verify_diag,
)
from autoredux.enumop import (
    EnumerationOperator,
    apply,
    apply_composed,
    apply_stream,
    reify_composition,
)
from autoredux.prefixmachine import (
    log_bound,
    machine_decode,
    machine_decode_rel,
    machine_encode,
    machine_encode_rel,
)
from autoredux.universe import BitVector, SetEnumeration, default_tau
from autoredux.witness import gen_cototal_example

from conftest import random_operator, set_apply
from fixtures import random_diag_family, uie_corpus
from psi_family import psi_family


# 1 ---------------------------------------------------------------------------


def test_c1_falsifier_totality():
    start = time.perf_counter()
    checked, exceptions = 0, []
    for size in range(1, 13):
        for psi in psi_family(size, seed=size):
            for m in range(1 << size):
                a = BitVector(size, m)
                if not is_autoreducible(psi, a)[0]:
                    continue
                for n in range(size):
                    checked += 1
                    if is_autoreducible(psi, flip_refute(psi, a, n))[0]:
                        exceptions.append((psi.label, size, m, n))
    elapsed = time.perf_counter() - start
    assert checked > 0
    assert not exceptions, f"{len(exceptions)} exceptions, first {exceptions[:3]}"
    assert elapsed < 10, f"took {elapsed:.1f}s"


# 2 ---------------------------------------------------------------------------


def test_c2_half_measure_pairing():
    exceptions = []
    for size in range(1, 13):
        half = 1 << (size - 1)
        for psi in psi_family(size, seed=100 + size):
            for n in range(size):
                bit = 1 << n
                hits = sum(1 for m in range(1 << size) if psi.rule(n, m & ~bit) & 1 == (m >> n) & 1)
                if hits != half:
                    exceptions.append((psi.label, size, n, hits))
            if count_autoreducible(psi, size) > half:
                exceptions.append((psi.label, size, "count"))
    assert not exceptions, f"{len(exceptions)} exceptions, first {exceptions[:3]}"


# 3 ---------------------------------------------------------------------------


def test_c3_measure_decay():
    start = time.perf_counter()
    exact = {}
    for size in range(6, 17, 2):
        psi = make_cototal_psi(gen_cototal_example(size)[1])
        exact[size] = count_autoreducible(psi, size) / (1 << size)
    problems = [n for n in range(8, 17, 2) if not exact[n] < exact[n - 2]]
    anchor = exact[16]
    for size in (20, 24):
        psi = make_cototal_psi(gen_cototal_example(size)[1])
        frac, (lo, hi) = sample_fraction(psi, size, 100_000, seed=0)
        if not frac < anchor:
            problems.append(f"N={size}: fraction {frac} not below {anchor}")
        if lo <= anchor <= hi:
            problems.append(f"N={size}: Wilson [{lo:.3g}, {hi:.3g}] contains {anchor:.3g}")
    elapsed = time.perf_counter() - start
    assert not problems, "; ".join(map(str, problems))
    assert elapsed < 60, f"took {elapsed:.1f}s"


# 4 ---------------------------------------------------------------------------


def test_c4_operator_semantics_oracle():
    rng = random.Random(4)
    corpus = [random_operator(rng, rng.randint(1, 10), rng.randint(0, 12), 3) for _ in range(50)]
    exceptions = []
    for op in corpus:
        size = op.size
        for m in range(1 << size):
            b = BitVector(size, m)
            order = list(b)
            rng.shuffle(order)
            if apply_stream(op, SetEnumeration(size, tuple(order))).as_set() != apply(op, b):
                exceptions.append(("stream", op.axioms, m))
            if set(apply(op, b)) != set_apply(op, set(b)):
                exceptions.append(("apply", op.axioms, m))
    for i in range(0, 50, 2):
        size = 10
        op1 = random_operator(rng, size, rng.randint(0, 12), 3)
        op2 = random_operator(rng, size, rng.randint(0, 12), 3)
        g = reify_composition(op2, op1)
        for m in range(1 << size):
            b = BitVector(size, m)
            if apply(g, b) != apply_composed([op2, op1], b):
                exceptions.append(("reify", i, m))
    assert not exceptions, f"{len(exceptions)} exceptions, first {exceptions[:3]}"


# 5 ---------------------------------------------------------------------------


def test_c5_cototal_enumeration():
    start = time.perf_counter()
    rng = random.Random(5)
    exceptions = 0
    for width in range(1, 11):
        for limit in range(1 << width):
            qs = sorted(rng.randrange(limit + 1) for _ in range(rng.randint(0, 4)))
            real = LeftCEReal(width, tuple(qs) + (limit,))
            bits = true_bits(real)
            zeros = list(bits.complement())
            ones = bits.elements()
            for _ in range(20):
                rng.shuffle(zeros)
                if sorted(enumerate_from_complement(real, zeros).items) != ones:
                    exceptions += 1
    elapsed = time.perf_counter() - start
    assert exceptions == 0, f"{exceptions} exceptions"
    assert elapsed < 30, f"took {elapsed:.1f}s"


# 6 ---------------------------------------------------------------------------


def test_c6_codec_bound():
    start = time.perf_counter()
    corpus = uie_corpus()
    assert len(corpus) >= 50
    assert max(m for _, _, m in corpus) == 64 and max(a.size for a, _, _ in corpus) == 256
    violations = []
    for a, gamma, m in corpus:
        gi = machine_encode(a, gamma, m)
        if machine_decode(gi, gamma) != a.prefix(gi.n_m):
            violations.append(("round-trip", a.size, m))
        if len(gi.gamma) > gi.n_m - m + log_bound(m):
            violations.append(("bound", a.size, m, len(gi.gamma)))
        if m >= 32 and not len(gi.gamma) < gi.n_m:
            violations.append(("strict", a.size, m, len(gi.gamma), gi.n_m))
    elapsed = time.perf_counter() - start
    assert not violations, f"{violations[:3]}"
    assert elapsed < 30, f"took {elapsed:.1f}s"


# 7 ---------------------------------------------------------------------------


def oracle_subset_outcome(a, gamma, b, tau):
    """Least witness for each case, recomputed with plain sets."""
    size, k = a.size, b.size
    elems = set(a)
    for n in range(k + 1, size + 1):
        out = set_apply(gamma, set(b) | {x for x in elems if k <= x < n})
        if not out <= elems:
            return ("1", n)
    for m in range(1, size - k + 1):
        tail = {x for x in elems if x >= k + m}
        if not any(x >= tau for x in tail):
            break
        out = set_apply(gamma, set(b) | tail)
        if out < elems:
            return ("2", m)
    return ("C", None)


def oracle_degree_outcome(a, b, phi, gamma, c, d, tau):
    size, k = a.size, c.size
    t = set_apply(phi, set(a) - d)
    ahead = sorted(x for x in t if x >= k)
    first = ahead[0] + 1
    target = set(b)

    def ext(length):
        return set(c) | {x for x in t if k <= x < length}

    for length in range(first, size + 1):
        if not set_apply(gamma, ext(length)) <= target:
            return ("1", length, None)
    shrunk = {}
    for n in range(size):
        tn = set_apply(phi, set(a) - d - {n})
        if any(x >= tau for x in tn):
            shrunk[n] = tn
    for length in range(first, size + 1):
        for n, tn in shrunk.items():
            out = set_apply(gamma, ext(length) | {x for x in tn if x >= length})
            if out < target:
                return ("2", length, n)
    return ("C", None, None)


def permuted_pair(rng, size, b):
    perm = list(range(size))
    rng.shuffle(perm)
    phi = EnumerationOperator(size, tuple((perm[x], 1 << x) for x in range(size)))
    delta = EnumerationOperator(size, tuple((x, 1 << perm[x]) for x in range(size)))
    a = BitVector.from_elements(size, [x for x in range(size) if perm[x] in b])
    return a, phi, delta


def run_subset_checked(a, ops, tau, problems, tag):
    state = DiagonalState()
    for gamma in ops:
        want = oracle_subset_outcome(a, gamma, state.prefix, tau)
        step = diag_step_subset(a, gamma, state, tau)
        if isinstance(step, Compressible):
            if want[0] != "C":
                problems.append((tag, "subset", state.stage, want, "C"))
            b = state.prefix
            gi = machine_encode_rel(a, gamma, b, 1)
            if machine_decode_rel(gi, gamma, b, a.prefix(b.size).count()) != a.prefix(gi.n_m):
                problems.append((tag, "encode", state.stage))
            return "C"
        got = step.log[-1]
        if (got.case, got.n if got.case == "1" else got.m) != want:
            problems.append((tag, "subset", state.stage, want, str(got)))
        state = step
    subset = BitVector(a.size, state.prefix.mask | (a.mask & ~((1 << state.prefix.size) - 1)))
    if not verify_diag(a, ops, subset, tau):
        problems.append((tag, "verify", "subset"))
    return "ok"


def run_degree_checked(a, b, phi, delta, ops, tau, problems, tag):
    state = DiagonalState()
    for gamma in ops:
        want = oracle_degree_outcome(a, b, phi, gamma, state.prefix, set(state.excluded_set(a.size)), tau)
        step = diag_step_degree(a, b, phi, delta, gamma, state, tau)
        if isinstance(step, Compressible):
            if want[0] != "C":
                problems.append((tag, "degree", state.stage, want, "C"))
            psi = fallback_psi(phi, delta, gamma, step, tau)
            if not is_autoreducible(psi, a)[0]:
                problems.append((tag, "psi", state.stage))
            return "C"
        got = step.log[-1]
        if (got.case, got.e is not None and len(got.e), got.n if got.case == "2" else None) != want:
            problems.append((tag, "degree", state.stage, want, str(got)))
        state = step
    t = apply(phi, BitVector(a.size, a.mask & ~state.excluded)).mask
    k = state.prefix.size
    subset = BitVector(a.size, state.prefix.mask | (t & ~((1 << k) - 1)))
    if not verify_diag(b, ops, subset, tau):
        problems.append((tag, "verify", "degree"))
    return "ok"


def test_c7_diagonalization_trichotomy():
    problems = []
    outcomes = {"ok": 0, "C": 0}
    size = 16
    tau = default_tau(size)
    ident = EnumerationOperator.identity(size)

    a, ops = example_family(size)
    outcomes[run_subset_checked(a, ops, tau, problems, "fixture")] += 1
    outcomes[run_degree_checked(a, a, ident, ident, ops, tau, problems, "fixture")] += 1

    rng = random.Random(7)
    families, redraws = 0, 0
    while families < 100:
        b, ops = random_diag_family(rng, size)
        a, phi, delta = permuted_pair(rng, size, b) if rng.random() < 0.5 else (b, ident, ident)
        try:
            subset_result = run_subset_checked(b, ops, tau, problems, families)
            degree_result = run_degree_checked(a, b, phi, delta, ops, tau, problems, families)
        except DiagonalError:
            redraws += 1  # universe exhausted: not a stage outcome
            continue
        outcomes[subset_result] += 1
        outcomes[degree_result] += 1
        families += 1
    assert outcomes["C"] > 0 and outcomes["ok"] > 0
    assert redraws < 25, f"{redraws} families exhausted the universe"
    assert not problems, f"{len(problems)} problems, first {problems[:3]}"


# 8 ---------------------------------------------------------------------------


def cli(args, threads, cwd):
    env = dict(os.environ, AUTOREDUX_THREADS=str(threads))
    proc = subprocess.run(
        [sys.executable, "-m", "autoredux.cli", *args],
        capture_output=True, env=env, cwd=cwd, check=False,
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_c8_cli_determinism(tmp_path):
    d = str(tmp_path)
    for kind, n in (("diag", "16"), ("real", "4"), ("uie", "48")):
        sub = tmp_path / kind
        assert cli(["gen", "--kind", kind, "--universe", n, "--out", str(sub)], 1, d)[0] == 0
    ident = tmp_path / "id.op"
    ident.write_text("universe 16\n" + "".join(f"axiom {x} {x}\n" for x in range(16)))
    diag = tmp_path / "diag"
    commands = [
        ["gen", "--kind", "cototal", "--universe", "4"],
        ["gen", "--kind", "diag"],
        ["measure", "--sweep", "8,12,18,20", "--samples", "20000", "--seed", "7"],
        ["measure", "--family", "uie", "--sweep", "16,20", "--samples", "5000", "--seed", "2"],
        ["diag", "--in", str(diag / "A.set"), str(diag / "G0.op"), str(diag / "G1.op"), str(diag / "G2.op")],
        ["diag", "--engine", "degree", "--in", str(diag / "A.set"), str(diag / "A.set"),
         str(ident), str(ident), str(diag / "G2.op")],
        ["compress", "--m", "1:6", "--in", str(tmp_path / "uie" / "X.set"), str(tmp_path / "uie" / "gamma.op")],
        ["cototal", "--shuffle", "--seed", "3", "--in", str(tmp_path / "real" / "omega.txt")],
        ["check", "--kind", "uie", "--samples", "500", "--seed", "5",
         "--in", str(tmp_path / "uie" / "X.set"), str(tmp_path / "uie" / "gamma.op")],
    ]
    mismatched = []
    for args in commands:
        runs = [cli(args, t, d) for t in (1, 4, 1, 4)]
        if runs[0][0] != 0:
            mismatched.append((args[0], "exit", runs[0][2].decode()))
        if any(r != runs[0] for r in runs[1:]):
            mismatched.append((args[0], "bytes differ"))
    assert not mismatched, f"{mismatched}"
