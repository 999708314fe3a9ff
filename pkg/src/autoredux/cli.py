"""Command-line experiment driver.

Every output byte is a function of the command line; randomness comes only
from ``--seed`` and ``AUTOREDUX_THREADS`` changes scheduling, not results.
"""

from __future__ import annotations

import argparse
import csv
import io
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import autoreduce as ar
from .cototal import RealFormatError, UnresolvedBit, format_real, make_toy_omega, parse_real, trace_enumeration, true_bits
from .diagonal import DiagonalError, diag_run, diag_run_degree, example_family, fallback_psi, verify_diag
from .enumop import EnumerationOperator, OperatorFormatError, format_operator, parse_operator
from .prefixmachine import REPORT_FIELDS, MachineError, machine_encode, machine_encode_rel, report_for
from .universe import BitVector, default_tau, format_set, parse_set
from .witness import gen_cototal_example, gen_threshold_uie, is_cototal_witness, is_uie_witness


class CliError(Exception):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    universe: int | None = None
    seed: int = 0
    tau: int | None = None
    samples: int = 100_000
    inputs: list[str] = field(default_factory=list)
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def tau_for(self, size: int) -> int:
        return default_tau(size) if self.tau is None else self.tau


# io helpers ----------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError("io-error", f"{path}: {exc.strerror}") from None


def _load_set(path: str, size: int | None) -> BitVector:
    try:
        return parse_set(_read(path), size)
    except (ValueError, IndexError) as exc:
        raise CliError("parse-error", f"{path}: {exc}") from None


def _load_op(path: str) -> EnumerationOperator:
    try:
        return parse_operator(_read(path), name=Path(path).stem)
    except OperatorFormatError as exc:
        raise CliError("parse-error", f"{path}: {exc}") from None


def _need(cfg: RunConfig, count: int, what: str) -> None:
    if len(cfg.inputs) < count:
        raise CliError("usage", f"{cfg.command} needs --in {what}")


def _csv(header: Sequence[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# commands ------------------------------------------------------------------


def _parse_sweep(text: str) -> list[int]:
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            return list(range(lo, hi + 1, step))
        return [int(p) for p in text.split(",")]
    except (ValueError, IndexError):
        raise CliError("usage", f"bad sweep {text!r}") from None


def _family_psi(cfg: RunConfig, size: int) -> ar.AutoreductionProcedure:
    family = cfg.extra.get("family", "cototal")
    if family == "cototal":
        if size % 2:
            raise CliError("guard", f"cototal family needs even N, got {size}")
        return ar.make_cototal_psi(gen_cototal_example(size)[1])
    if family == "zero":
        return ar.constant_psi(size, 0)
    if family == "uie":
        ident = EnumerationOperator.identity(size)
        tau = cfg.tau_for(size)
        evens = BitVector.evens(size)
        if not evens.infinite_like(tau):
            raise CliError("guard", f"uie family needs an even number >= tau at N={size}")
        return ar.make_uie_psi(ident, gen_threshold_uie(evens, tau), ident, tau)
    if family == "file":
        _need(cfg, 1, "DELTA.op")
        op = _load_op(cfg.inputs[0])
        if op.size != size:
            raise CliError("guard", f"operator universe {op.size} != N={size}")
        return ar.make_cototal_psi(op)
    raise CliError("usage", f"unknown family {family!r}")


def cmd_measure(cfg: RunConfig) -> str:
    sweep = _parse_sweep(cfg.extra.get("sweep") or str(cfg.universe or 8))
    exact_max = cfg.extra.get("exact_max", 16)
    kind = cfg.extra.get("family", "cototal")
    rows = []
    for size in sweep:
        psi = _family_psi(cfg, size)
        if size <= exact_max:
            if size > ar.EXHAUSTIVE_LIMIT:
                raise CliError("guard", f"exhaustive count limited to N <= {ar.EXHAUSTIVE_LIMIT}")
            count = ar.count_autoreducible(psi, size)
            frac = count / (1 << size)
            rows.append([kind, size, 1 << size, cfg.seed, repr(frac), repr(frac), repr(frac), count])
        else:
            frac, (lo, hi) = ar.sample_fraction(psi, size, cfg.samples, cfg.seed)
            rows.append([kind, size, cfg.samples, cfg.seed, repr(frac), repr(lo), repr(hi), ""])
    return _csv(ar.CSV_FIELDS, rows)


def cmd_diag(cfg: RunConfig) -> str:
    engine = cfg.extra.get("engine", "subset")
    lines = []
    try:
        if engine == "subset":
            _need(cfg, 1, "A.set OP...")
            a = _load_set(cfg.inputs[0], cfg.universe)
            ops = [_load_op(p) for p in cfg.inputs[1:]]
            tau = cfg.tau_for(a.size)
            res = diag_run(a, ops, tau)
            lines += res.log_lines()
            if res.ok:
                lines.append(f"subset {format_set(res.subset)}")
                lines.append(f"verified {str(verify_diag(a, ops, res.subset, tau)).lower()}")
            else:
                comp = res.compressible
                gi = machine_encode_rel(a, ops[comp.stage], comp.state.prefix, 1)
                rep = report_for(gi, comp.state.prefix.size)
                lines.append("compress " + " ".join(f"{k}={v}" for k, v in zip(REPORT_FIELDS, rep.row())))
                lines.append(f"gamma {gi.gamma}")
        elif engine == "degree":
            _need(cfg, 4, "A.set B.set PHI.op DELTA.op OP...")
            a = _load_set(cfg.inputs[0], cfg.universe)
            b = _load_set(cfg.inputs[1], a.size)
            phi, delta = _load_op(cfg.inputs[2]), _load_op(cfg.inputs[3])
            ops = [_load_op(p) for p in cfg.inputs[4:]]
            tau = cfg.tau_for(a.size)
            res = diag_run_degree(a, b, phi, delta, ops, tau)
            lines += res.log_lines()
            if res.ok:
                lines.append(f"subset {format_set(res.subset)}")
                lines.append(f"verified {str(verify_diag(b, ops, res.subset, tau)).lower()}")
            else:
                comp = res.compressible
                psi = fallback_psi(phi, delta, ops[comp.stage], comp, tau)
                ok, where = ar.is_autoreducible(psi, a)
                lines.append(f"anchor {format_set(comp.anchor)}")
                lines.append(f"autoreducible {str(ok).lower()}" + ("" if ok else f" fails={where}"))
        else:
            raise CliError("usage", f"unknown engine {engine!r}")
    except DiagonalError as exc:
        raise CliError("precondition", str(exc)) from None
    except MachineError as exc:
        raise CliError("machine-error", str(exc)) from None
    return "\n".join(lines) + "\n"


def cmd_compress(cfg: RunConfig) -> str:
    _need(cfg, 2, "A.set GAMMA.op")
    a = _load_set(cfg.inputs[0], cfg.universe)
    gamma = _load_op(cfg.inputs[1])
    rows = []
    for m in _parse_sweep(cfg.extra.get("m") or "1"):
        try:
            rows.append(report_for(machine_encode(a, gamma, m)).row())
        except MachineError as exc:
            raise CliError("machine-error", f"m={m}: {exc}") from None
        except ValueError as exc:
            raise CliError("usage", f"m={m}: {exc}") from None
    return _csv(REPORT_FIELDS, rows)


def cmd_cototal(cfg: RunConfig) -> str:
    _need(cfg, 1, "REAL.txt")
    try:
        real = parse_real(_read(cfg.inputs[0]))
    except RealFormatError as exc:
        raise CliError("parse-error", str(exc)) from None
    zeros = list(true_bits(real).complement())
    if cfg.extra.get("shuffle"):
        random.Random(cfg.seed).shuffle(zeros)
    lines = []
    try:
        for res in trace_enumeration(real, zeros):
            lines.append(str(res))
    except UnresolvedBit as exc:
        raise CliError("unresolved", str(exc)) from None
    ones = [str(r.split()[1]) for r in lines if r.split()[2] == "1"]
    lines.append("emitted " + ",".join(ones))
    return "\n".join(lines) + "\n"


def cmd_check(cfg: RunConfig) -> str:
    _need(cfg, 2, "A.set GAMMA.op")
    a = _load_set(cfg.inputs[0], cfg.universe)
    gamma = _load_op(cfg.inputs[1])
    kind = cfg.extra.get("kind", "cototal")
    if kind == "cototal":
        rep = is_cototal_witness(a, gamma)
    elif kind == "uie":
        try:
            rep = is_uie_witness(a, gamma, cfg.tau_for(a.size), seed=cfg.seed)
        except ValueError as exc:
            raise CliError("precondition", str(exc)) from None
    else:
        raise CliError("usage", f"unknown witness kind {kind!r}")
    return f"kind: {kind}\n" + str(rep)


def cmd_gen(cfg: RunConfig) -> str:
    size = cfg.universe or 16
    kind = cfg.extra.get("kind", "cototal")
    files: dict[str, str] = {}
    try:
        if kind == "cototal":
            a, gamma = gen_cototal_example(size)
            files = {"A.set": str(a) + "\n", "gamma.op": format_operator(gamma)}
        elif kind == "uie":
            x = BitVector.evens(size)
            files = {"X.set": str(x) + "\n", "gamma.op": format_operator(gen_threshold_uie(x, cfg.tau_for(size)))}
        elif kind == "diag":
            a, ops = example_family(size)
            files = {"A.set": str(a) + "\n"}
            files.update({f"{op.name}.op": format_operator(op) for op in ops})
        elif kind == "real":
            real = make_toy_omega([(4, 0), (4, 1), (3, 1), (3, 2), (4, 3)])
            files = {"omega.txt": format_real(real)}
        else:
            raise CliError("usage", f"unknown fixture kind {kind!r}")
    except ValueError as exc:
        raise CliError("guard", str(exc)) from None
    if cfg.out is None:
        return "".join(f"== {name}\n{body}" for name, body in files.items())
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, body in files.items():
        (outdir / name).write_text(body, encoding="utf-8")
    return "".join(f"wrote {outdir / name}\n" for name in files)


COMMANDS: dict[str, Callable[[RunConfig], str]] = {
    "measure": cmd_measure,
    "diag": cmd_diag,
    "compress": cmd_compress,
    "cototal": cmd_cototal,
    "check": cmd_check,
    "gen": cmd_gen,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autoredux", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--universe", type=int, help="universe size N")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tau", type=int, help="largeness threshold (default ceil(3N/4))")
        p.add_argument("--samples", type=int, default=100_000)
        p.add_argument("--in", dest="inputs", nargs="+", default=[], metavar="PATH")
        p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("measure", help="fraction of autoreducible sets per N")
    common(p)
    p.add_argument("--family", choices=["cototal", "zero", "uie", "file"], default="cototal")
    p.add_argument("--sweep", help="N values, 'lo:hi[:step]' or comma list")
    p.add_argument("--exact-max", type=int, default=16, help="count exhaustively up to this N")

    p = sub.add_parser("diag", help="run a diagonalization")
    common(p)
    p.add_argument("--engine", choices=["subset", "degree"], default="subset")

    p = sub.add_parser("compress", help="prefix-free machine report")
    common(p)
    p.add_argument("--m", help="window sizes, 'lo:hi[:step]' or comma list")

    p = sub.add_parser("cototal", help="enumerate a left-c.e. real from its complement")
    common(p)
    p.add_argument("--shuffle", action="store_true", help="enumerate the complement in seeded random order")

    p = sub.add_parser("check", help="check a witness")
    common(p)
    p.add_argument("--kind", choices=["cototal", "uie"], default="cototal")

    p = sub.add_parser("gen", help="write fixture files")
    common(p)
    p.add_argument("--kind", choices=["cototal", "uie", "diag", "real"], default="cototal")
    return parser


_EXTRA = ("family", "sweep", "exact_max", "engine", "m", "shuffle", "kind")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    extra = {k: getattr(ns, k) for k in _EXTRA if hasattr(ns, k)}
    return RunConfig(ns.command, ns.universe, ns.seed, ns.tau, ns.samples, ns.inputs, ns.out, extra)


def run(cfg: RunConfig) -> str:
    return COMMANDS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        text = run(cfg)
        if cfg.out is not None and cfg.command != "gen":
            Path(cfg.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except CliError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
