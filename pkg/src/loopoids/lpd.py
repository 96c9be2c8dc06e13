"""Reading and writing the ``.lpd`` text format.

A document is a sequence of lines::

    # comment
    elements N
    labels L0 L1 ...        (optional)
    units i j ...           (optional when alpha and beta are given or inferred)
    alpha i:j ...           (optional; inferred from the triples when absent)
    beta i:j ...            (optional; inferred from the triples when absent)
    inv i:j ...             (optional, likewise linv and rinv)
    triples
    i j k
    ...
    end

Transversals use the same conventions in a small companion format::

    subset i j ...
    projection i:j ...
    end
"""

from __future__ import annotations

from typing import Iterator, Optional

from .constructors import TransversalData
from .core import StructureError, StructureTable, default_labels, infer_structure

MAP_KEYS = ("alpha", "beta", "inv", "linv", "rinv")
HEADER_KEYS = ("elements", "labels", "units", *MAP_KEYS, "triples")


class LpdError(StructureError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line, self.col, self.message = line, col, message


class LpdSyntaxError(LpdError):
    pass


class LpdSemanticError(LpdError):
    pass


def _tokens(text: str) -> Iterator[tuple[int, list[tuple[int, str]]]]:
    """Non-blank, non-comment lines as (line number, [(column, token)])."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.lstrip().startswith("#") or not raw.strip():
            continue
        toks, col, i = [], 0, 0
        while i < len(raw):
            if raw[i].isspace():
                i += 1
                continue
            j = i
            while j < len(raw) and not raw[j].isspace():
                j += 1
            toks.append((i + 1, raw[i:j]))
            i = j
        yield lineno, toks


def _int(lineno: int, col: int, tok: str) -> int:
    if not tok.isdigit() or not tok.isascii():
        raise LpdSyntaxError(lineno, col, f"expected a non-negative integer, got {tok!r}")
    return int(tok)


def _index(lineno: int, col: int, tok: str, n: int) -> int:
    i = _int(lineno, col, tok)
    if i >= n:
        raise LpdSemanticError(lineno, col, f"index {i} out of range for {n} elements")
    return i


def parse(text: str) -> StructureTable:
    """Parse one ``.lpd`` document; diagnostics carry line and column."""
    lines = list(_tokens(text))
    n: Optional[int] = None
    seen: dict[str, int] = {}
    labels: tuple[str, ...] = ()
    units: Optional[set[int]] = None
    maps: dict[str, tuple[int, ...]] = {}
    triples: set[tuple[int, int, int]] = set()
    pos = 0
    in_triples = False
    ended = False
    while pos < len(lines):
        lineno, toks = lines[pos]
        pos += 1
        col, key = toks[0]
        if ended:
            raise LpdSyntaxError(lineno, col, "content after 'end'")
        if key == "end":
            if len(toks) > 1:
                raise LpdSyntaxError(lineno, toks[1][0], "unexpected token after 'end'")
            ended = True
            continue
        if in_triples:
            if len(toks) != 3:
                raise LpdSyntaxError(lineno, col, "a triple line needs exactly three indices")
            t = tuple(_index(lineno, c, tok, n) for c, tok in toks)
            if t in triples:
                raise LpdSemanticError(lineno, col, f"duplicate triple {' '.join(map(str, t))}")
            triples.add(t)
            continue
        if key not in HEADER_KEYS:
            raise LpdSyntaxError(lineno, col, f"unknown key {key!r}")
        if key in seen:
            raise LpdSyntaxError(lineno, col, f"duplicate '{key}' section (first on line {seen[key]})")
        seen[key] = lineno
        args = toks[1:]
        if key == "elements":
            if len(args) != 1:
                raise LpdSyntaxError(lineno, col, "'elements' takes one integer")
            n = _int(lineno, args[0][0], args[0][1])
            if n < 1:
                raise LpdSemanticError(lineno, args[0][0], "a structure needs at least one element")
            continue
        if n is None:
            raise LpdSyntaxError(lineno, col, "'elements' must come first")
        if key == "labels":
            if len(args) != n:
                raise LpdSemanticError(lineno, col, f"expected {n} labels, got {len(args)}")
            labels = tuple(tok for _, tok in args)
            if len(set(labels)) != n:
                raise LpdSemanticError(lineno, col, "labels are not distinct")
        elif key == "units":
            units = set()
            for c, tok in args:
                units.add(_index(lineno, c, tok, n))
        elif key in MAP_KEYS:
            m: dict[int, int] = {}
            for c, tok in args:
                src, sep, dst = tok.partition(":")
                if not sep:
                    raise LpdSyntaxError(lineno, c, f"expected i:j, got {tok!r}")
                i = _index(lineno, c, src, n)
                if i in m:
                    raise LpdSemanticError(lineno, c, f"{key} given twice for {i}")
                m[i] = _index(lineno, c + len(src) + 1, dst, n)
            if set(m) != set(range(n)):
                missing = min(set(range(n)) - set(m))
                raise LpdSemanticError(lineno, col, f"{key} is not total: no entry for {missing}")
            maps[key] = tuple(m[i] for i in range(n))
        elif key == "triples":
            if args:
                raise LpdSyntaxError(lineno, args[0][0], "'triples' takes no arguments")
            in_triples = True
    last = lines[-1][0] if lines else 1
    if n is None:
        raise LpdSyntaxError(last, 1, "missing 'elements'")
    if not ended:
        raise LpdSyntaxError(last, 1, "missing 'end'")
    if "triples" not in seen:
        raise LpdSyntaxError(last, 1, "missing 'triples'")
    return _build(n, labels, units, maps, triples, seen)


def _build(n, labels, units, maps, triples, seen) -> StructureTable:
    extra = {k: maps[k] for k in ("inv", "linv", "rinv") if k in maps}
    where = seen.get("alpha") or seen.get("beta") or seen.get("units") or seen["triples"]
    try:
        if "alpha" not in maps or "beta" not in maps:
            inferred = infer_structure(triples, n, labels, **extra)
            alpha = maps.get("alpha", inferred.alpha)
            beta = maps.get("beta", inferred.beta)
        else:
            alpha, beta = maps["alpha"], maps["beta"]
        image = set(alpha) | set(beta)
        if units is None:
            units = image
        elif not image <= units:
            raise StructureError("alpha/beta take values outside the declared units")
        return StructureTable(
            n=n, units=frozenset(units), alpha=alpha, beta=beta, triples=frozenset(triples),
            labels=labels, **extra,
        )
    except LpdError:
        raise
    except StructureError as exc:
        raise LpdSemanticError(where, 1, str(exc)) from exc


def format_structure(G: StructureTable) -> str:
    """Deterministic text for ``G``; labels are written only when non-default."""
    out = [f"elements {G.n}"]
    if G.labels != default_labels(G.n):
        out.append("labels " + " ".join(G.labels))
    out.append("units " + " ".join(str(u) for u in sorted(G.units)))
    for key in MAP_KEYS:
        m = getattr(G, key)
        if m is not None:
            out.append(key + " " + " ".join(f"{i}:{j}" for i, j in enumerate(m)))
    out.append("triples")
    out.extend(f"{a} {b} {c}" for a, b, c in sorted(G.triples))
    out.append("end")
    return "\n".join(out) + "\n"


def parse_transversal(text: str, n: Optional[int] = None) -> TransversalData:
    subset: Optional[set[int]] = None
    projection: dict[int, int] = {}
    seen_projection = False
    ended = False
    size = n if n is not None else 1 << 62
    last = 1
    for lineno, toks in _tokens(text):
        last = lineno
        col, key = toks[0]
        if ended:
            raise LpdSyntaxError(lineno, col, "content after 'end'")
        if key == "end":
            ended = True
        elif key == "subset":
            if subset is not None:
                raise LpdSyntaxError(lineno, col, "duplicate 'subset'")
            subset = {_index(lineno, c, tok, size) for c, tok in toks[1:]}
        elif key == "projection":
            if seen_projection:
                raise LpdSyntaxError(lineno, col, "duplicate 'projection'")
            seen_projection = True
            for c, tok in toks[1:]:
                src, sep, dst = tok.partition(":")
                if not sep:
                    raise LpdSyntaxError(lineno, c, f"expected i:j, got {tok!r}")
                projection[_index(lineno, c, src, size)] = _index(lineno, c, dst, size)
        else:
            raise LpdSyntaxError(lineno, col, f"unknown key {key!r}")
    if subset is None or not seen_projection or not ended:
        raise LpdSyntaxError(last, 1, "a transversal needs 'subset', 'projection' and 'end'")
    total = n if n is not None else len(projection)
    if set(projection) != set(range(total)):
        raise LpdSemanticError(last, 1, "projection is not total on the carrier")
    try:
        return TransversalData(frozenset(subset), tuple(projection[i] for i in range(total)))
    except StructureError as exc:
        raise LpdSemanticError(last, 1, str(exc)) from exc


def format_transversal(T: TransversalData) -> str:
    return (
        "subset " + " ".join(str(t) for t in sorted(T.subset)) + "\n"
        + "projection " + " ".join(f"{i}:{j}" for i, j in enumerate(T.projection)) + "\n"
        + "end\n"
    )
