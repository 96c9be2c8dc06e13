"""Command-line interface.

Exit codes: 0 success, 1 check failed, 2 usage error, 3 invalid input,
4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import analysis, axioms, constructors, lpd
from .core import CheckReport, StructureError, StructureTable

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3, 4


class InputError(Exception):
    """Invalid input file or parameters; reported with exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pairs(text: str) -> dict[int, int]:
    out = {}
    for item in filter(None, text.split(",")):
        src, sep, dst = item.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected h:k pairs, got {item!r}")
        out[int(src)] = int(dst)
    return out


def _read_structure(path: str) -> StructureTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return lpd.parse(text)
    except lpd.LpdError as exc:
        raise InputError(f"{path}:{exc.line}:{exc.col}: {exc.message}") from exc


def _write(text: str, path: Optional[str], out: TextIO) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


class _Emitter:
    """Human text or ``key<TAB>value`` lines."""

    def __init__(self, out: TextIO, machine: bool):
        self.out, self.machine = out, machine

    def kv(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.out.write(f"{key}\t{value}\n")

    def text(self, line: str) -> None:
        self.out.write(line + "\n")

    def report(self, report: CheckReport, G: Optional[StructureTable] = None) -> None:
        if not self.machine:
            self.text(report.format(G))
            return
        self.kv("class", report.name)
        self.kv("passed", report.passed)
        for axiom, ok in report.flags.items():
            self.kv(f"flag.{axiom}", ok)
        for axiom in report.flags:
            for i, w in enumerate(report.witnesses_for(axiom)):
                elems = " ".join(G.label(e) if G is not None else str(e) for e in w.elements)
                self.kv(f"witness.{axiom}.{i}", elems)
                if w.detail:
                    self.kv(f"witness.{axiom}.{i}.detail", w.detail)


# -- subcommands --


def cmd_check(args, em: _Emitter) -> int:
    G = _read_structure(args.file)
    if args.cls is None:
        flags = axioms.classify(G)
        for name, ok in flags.items():
            if em.machine:
                em.kv(f"class.{name}", ok)
            else:
                em.text(f"{name}: {'yes' if ok else 'no'}")
        return EXIT_OK
    try:
        report = axioms.run_check(G, args.cls)
    except axioms.MissingInversion as exc:
        raise InputError(str(exc)) from exc
    em.report(report, G)
    return EXIT_OK if report.passed else EXIT_FAILED


def _group(spec: str) -> constructors.GroupTable:
    kind, size = spec[:1].upper(), spec[1:]
    if kind not in "SZ" or not size.isdigit():
        raise InputError(f"group must be S<k> or Z<n>, got {spec!r}")
    k = int(size)
    if k < 1 or (kind == "S" and k > 5):
        raise InputError(f"unsupported group {spec!r}")
    return constructors.symmetric_group(k) if kind == "S" else constructors.cyclic_group(k)


def _group_elements(G: constructors.GroupTable, text: str) -> list[int]:
    out = []
    for tok in filter(None, text.split(",")):
        if tok in G.labels:
            out.append(G.labels.index(tok))
        elif tok.isdigit() and int(tok) < G.n:
            out.append(int(tok))
        else:
            raise InputError(f"unknown group element {tok!r}")
    return out


_REQUIRED = {
    "trivial": ("units", "alpha", "beta"),
    "extended": ("units", "alpha", "beta", "g0", "A", "l0"),
    "phi": ("phi",),
}


def cmd_construct(args, em: _Emitter) -> int:
    kind = args.kind
    missing = [name for name in _REQUIRED.get(kind, ()) if getattr(args, name) is None]
    if missing:
        raise InputError(f"{kind} needs " + ", ".join(f"--{m}" for m in missing))
    if kind == "pair-groupoid":
        G = constructors.pair_groupoid(args.n)
    elif kind == "trivial":
        G = constructors.trivial_semiloopoid(args.n, args.units, args.alpha, args.beta)
    elif kind == "extended":
        G = constructors.extended_trivial_semiloopoid(
            args.n, args.units, args.alpha, args.beta, args.g0, args.A, args.l0
        )
    elif kind == "baer":
        group = _group(args.group)
        G = constructors.baer_transversal_loop(
            group, _group_elements(group, args.subgroup), _group_elements(group, args.transversal)
        )
    elif kind == "product":
        if (args.loop is None) == (args.cyclic is None):
            raise InputError("product needs exactly one of --loop FILE or --cyclic K")
        if args.loop is not None:
            X = _read_structure(args.loop)
        else:
            X = constructors.group_structure(constructors.cyclic_group(args.cyclic))
        G = constructors.product_loop_pair_groupoid(X, args.n)
    elif kind == "phi":
        phi = constructors.OddPermutation(args.n, tuple(args.phi))
        if args.ambient:
            G = constructors.phi_ambient(args.n)
        else:
            G = constructors.phi_left_loopoid(args.n, phi)
        if args.transversal_out:
            T = constructors.phi_projection(args.n, phi)
            Path(args.transversal_out).write_text(lpd.format_transversal(T), encoding="utf-8")
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown kind {kind!r}")
    _write(lpd.format_structure(G), args.output, em.out)
    return EXIT_OK


def _resolve(G: StructureTable, label: str) -> int:
    try:
        return G.index(label)
    except KeyError:
        raise InputError(f"no element labelled {label!r}") from None


def cmd_isotropy(args, em: _Emitter) -> int:
    G = _read_structure(args.file)
    u = _resolve(G, args.unit)
    L = constructors.isotropy_loop(G, u)
    _write(lpd.format_structure(L), args.output, em.out)
    return EXIT_OK


def cmd_reduce(args, em: _Emitter) -> int:
    G = _read_structure(args.file)
    try:
        T = lpd.parse_transversal(Path(args.transversal).read_text(encoding="utf-8"), G.n)
    except OSError as exc:
        raise InputError(f"{args.transversal}: {exc.strerror or exc}") from exc
    except lpd.LpdError as exc:
        raise InputError(f"{args.transversal}:{exc.line}:{exc.col}: {exc.message}") from exc
    try:
        R = constructors.transversal_reduce(G, T, side=args.side)
    except constructors.TransversalityViolated as exc:
        em.report(exc.report, G)
        return EXIT_FAILED
    _write(lpd.format_structure(R), args.output, em.out)
    return EXIT_OK


def cmd_enumerate(args, em: _Emitter) -> int:
    spec = analysis.EnumerationSpec(
        n=args.size,
        mode=args.mode,
        units=frozenset(args.units) if args.units is not None else None,
        up_to_iso=args.up_to_iso,
        node_budget=args.budget,
        max_size=args.max_size,
        workers=args.workers,
    )
    try:
        found = analysis.enumerate_structures(spec)
    except analysis.BudgetExceeded as exc:
        if em.machine:
            em.kv("error", "budget-exceeded")
            em.kv("nodes", exc.nodes)
            em.kv("partial", len(exc.partial))
        else:
            em.text(f"budget exceeded after {exc.nodes} nodes; {len(exc.partial)} partial results discarded")
        return EXIT_BUDGET
    if args.count_only:
        if em.machine:
            em.kv("count", len(found))
        else:
            em.text(str(len(found)))
        return EXIT_OK
    em.out.write("\n".join(lpd.format_structure(G) for G in found))
    return EXIT_OK


def cmd_iso(args, em: _Emitter) -> int:
    G, H = _read_structure(args.file1), _read_structure(args.file2)
    F = analysis.isomorphic(G, H)
    if em.machine:
        em.kv("isomorphic", F is not None)
    else:
        em.text("isomorphic" if F is not None else "not isomorphic")
    if F is None:
        return EXIT_FAILED
    for g, h in enumerate(F.element_map):
        if em.machine:
            em.kv(f"map.{G.label(g)}", H.label(h))
        else:
            em.text(f"  {G.label(g)} -> {H.label(h)}")
    return EXIT_OK


def cmd_verify(args, em: _Emitter) -> int:
    n_max = args.max_size
    examined = failures = 0
    for G in analysis.inverse_semiloopoid_census(n_max, args.budget):
        examined += 1
        if not axioms.verify_inverse_identities(G, limit=1):
            failures += 1
    eq = analysis.equivalence_experiment(n_max, args.budget)
    full = len(eq.witnesses_for("equivalence")) if not eq.flags["equivalence"] else 0
    ok = failures == 0 and eq.passed
    if em.machine:
        em.kv("inverse-identities.examined", examined)
        em.kv("inverse-identities.passed", failures == 0)
        em.kv("equivalence.examined", eq.examined)
        em.kv("equivalence.passed", eq.flags["equivalence"])
        em.kv("equivalence-inclusion.passed", eq.flags["equivalence-inclusion"])
        for i, w in enumerate(eq.witnesses):
            em.kv(f"witness.{w.axiom}.{i}", w.detail)
        em.kv("passed", ok)
    else:
        em.text(f"inverse identities: {examined} inverse semiloopoids, {failures} failures")
        em.text(
            f"unities associativity vs anchor compatibility: {eq.examined} semiloopoids, "
            f"equal flags: {'yes' if eq.flags['equivalence'] else 'no'}"
        )
        for w in eq.witnesses_for("equivalence")[:full]:
            em.text(f"  discrepancy: pair {' '.join(map(str, w.elements))} in {w.detail}")
        em.text(
            "unities associativity vs (composable only if matching + anchor multiplicative): "
            f"equal flags: {'yes' if eq.flags['equivalence-inclusion'] else 'no'}"
        )
    return EXIT_OK if ok else EXIT_FAILED


# -- parser --


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")

    parser = _Parser(prog="loopoids", description="Finite semiloopoids, loopoids and loops.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="classify a structure or run one checker")
    p.add_argument("file")
    p.add_argument("--class", dest="cls", choices=axioms.CLASS_NAMES)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", parents=[common], help="build a standard structure")
    p.add_argument("kind", choices=("pair-groupoid", "trivial", "extended", "baer", "product", "phi"))
    p.add_argument("-o", "--output")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--units", type=_ints)
    p.add_argument("--alpha", type=_ints)
    p.add_argument("--beta", type=_ints)
    p.add_argument("--g0", type=int)
    p.add_argument("--A", type=_ints)
    p.add_argument("--l0", type=_pairs)
    p.add_argument("--group", default="S3")
    p.add_argument("--subgroup", default="")
    p.add_argument("--transversal", default="")
    p.add_argument("--loop")
    p.add_argument("--cyclic", type=int)
    p.add_argument("--phi", type=_ints)
    p.add_argument("--ambient", action="store_true", help="phi: write the ambient pair groupoid")
    p.add_argument("--transversal-out", help="phi: also write the projection as a transversal file")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("isotropy", parents=[common], help="isotropy loop at a unit")
    p.add_argument("file")
    p.add_argument("--unit", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_isotropy)

    p = sub.add_parser("reduce", parents=[common], help="structure induced on a transversal")
    p.add_argument("file")
    p.add_argument("--transversal", required=True)
    p.add_argument("--side", choices=("both", "left", "right"), default="both")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("enumerate", parents=[common], help="exhaustive enumeration")
    p.add_argument("--mode", choices=analysis.MODES, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--units", type=_ints)
    p.add_argument("--up-to-iso", action="store_true")
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--budget", type=int)
    p.add_argument("--max-size", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("iso", parents=[common], help="test two structures for isomorphism")
    p.add_argument("file1")
    p.add_argument("file2")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("verify-propositions", parents=[common], help="run the census experiments")
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def run_cli(argv: Sequence[str], out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        err.write(parser.format_usage())
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    em = _Emitter(out, args.format == "machine")
    try:
        return args.func(args, em)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except analysis.SizeCapExceeded as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (StructureError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
