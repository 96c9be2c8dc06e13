"""Decision procedures for the structure classes.

Every checker returns a :class:`~loopoids.core.CheckReport`; failures are
reported with counterexamples, never raised.  Conditional equalities
("if one side is defined, so is the other, and they agree") are checked in
both directions, and a definedness gap is reported with a different detail
string (``left-only`` / ``right-only``) from a plain inequality (``unequal``).

Checkers that need the product table only run once the relation is known
to be single-valued; otherwise just the ``single-valued`` flag is reported.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable, Optional

from .core import (
    CheckReport,
    MorphismData,
    StructureError,
    StructureTable,
    product,
)

WITNESS_LIMIT = 8

CLASS_NAMES = (
    "left-semiloopoid",
    "right-semiloopoid",
    "semiloopoid",
    "left-inverse-semiloopoid",
    "right-inverse-semiloopoid",
    "inverse-semiloopoid",
    "unities-associative",
    "anchor-compatible",
    "left-loopoid",
    "right-loopoid",
    "loopoid",
    "groupoid",
    "loop",
    "left-loop",
    "inverse-loop",
    "quasigroup",
)


class MissingInversion(StructureError):
    def __init__(self, which: str):
        super().__init__(f"structure has no {which} inversion map")
        self.which = which


class RangeError(StructureError):
    pass


# -- shared scans --


def _unit_failures(G: StructureTable):
    for g in range(G.n):
        if (G.alpha[g], g, g) not in G.triples:
            yield (g,), "left"
        if (g, G.beta[g], g) not in G.triples:
            yield (g,), "right"


def _injectivity_failures(G: StructureTable, rows: Callable[[int], Iterable[tuple[int, int]]]):
    for g in range(G.n):
        preimages: dict[int, list[int]] = defaultdict(list)
        for h, k in rows(g):
            preimages[k].append(h)
        for k, hs in sorted(preimages.items()):
            hs = sorted(set(hs))
            if len(hs) > 1:
                yield (g, hs[0], hs[1])


def _single_valued(report: CheckReport, G: StructureTable, limit: int) -> bool:
    return report.record("single-valued", G.multivalued_pairs, limit)


def _semiloopoid_flags(report: CheckReport, G: StructureTable, left: bool, right: bool, limit: int):
    report.record("units", _unit_failures(G), limit)
    _single_valued(report, G, limit)
    if left:
        report.record("left-injective", _injectivity_failures(G, G.left_row), limit)
    if right:
        report.record("right-injective", _injectivity_failures(G, G.right_row), limit)
    return report


def _rows(tab: dict[tuple[int, int], int]):
    rows: dict[int, dict[int, int]] = defaultdict(dict)
    cols: dict[int, dict[int, int]] = defaultdict(dict)
    for (g, h), k in tab.items():
        rows[g][h] = k
        cols[h][g] = k
    return rows, cols


def _associativity_failures(G: StructureTable, only_with_unit: bool):
    """Triples (x, y, z) where (xy)z and x(yz) disagree in definedness or value."""
    tab = G.table
    rows, cols = _rows(tab)
    candidates = set()
    for (x, y), xy in tab.items():
        for z in rows.get(xy, ()):
            candidates.add((x, y, z))
    for (y, z), yz in tab.items():
        for x in cols.get(yz, ()):
            candidates.add((x, y, z))
    units = G.units
    for x, y, z in candidates:
        if only_with_unit and x not in units and y not in units and z not in units:
            continue
        xy = tab.get((x, y))
        lhs = None if xy is None else tab.get((xy, z))
        yz = tab.get((y, z))
        rhs = None if yz is None else tab.get((x, yz))
        if lhs is None and rhs is None:
            continue
        if rhs is None:
            yield (x, y, z), "left-only"
        elif lhs is None:
            yield (x, y, z), "right-only"
        elif lhs != rhs:
            yield (x, y, z), "unequal"


def _matching_failures(G: StructureTable):
    tab = G.table
    outside, missing = [], []
    for (g, h) in tab:
        if G.beta[g] != G.alpha[h]:
            outside.append((g, h))
    by_alpha: dict[int, list[int]] = defaultdict(list)
    for h in range(G.n):
        by_alpha[G.alpha[h]].append(h)
    for g in range(G.n):
        for h in by_alpha[G.beta[g]]:
            if (g, h) not in tab:
                missing.append((g, h))
    return outside, missing


def _fiber_bijection_failures(G: StructureTable, side: str):
    """Translations as bijections between alpha fibres (left) or beta fibres (right)."""
    tab = G.table
    rows, cols = _rows(tab)
    fib_a: dict[int, set[int]] = defaultdict(set)
    fib_b: dict[int, set[int]] = defaultdict(set)
    for g in range(G.n):
        fib_a[G.alpha[g]].add(g)
        fib_b[G.beta[g]].add(g)
    for g in range(G.n):
        if side == "left":
            mapping = rows.get(g, {})
            domain, codomain = fib_a[G.beta[g]], fib_a[G.alpha[g]]
        else:
            mapping = cols.get(g, {})
            domain, codomain = fib_b[G.alpha[g]], fib_b[G.beta[g]]
        for h in sorted(domain - mapping.keys()):
            yield (g, h), "undefined"
        for h in sorted(mapping.keys() - domain):
            yield (g, h), "outside-domain"
        images: dict[int, int] = {}
        for h in sorted(mapping):
            k = mapping[h]
            if k not in codomain:
                yield (g, h), "image-outside"
            if k in images:
                yield (g, images[k], h), "not-injective"
            images.setdefault(k, h)
        for k in sorted(codomain - images.keys()):
            yield (g, k), "not-hit"


# -- semiloopoids --


def check_semiloopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    return _semiloopoid_flags(CheckReport("semiloopoid"), G, True, True, limit)


def check_left_semiloopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    return _semiloopoid_flags(CheckReport("left-semiloopoid"), G, True, False, limit)


def check_right_semiloopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    return _semiloopoid_flags(CheckReport("right-semiloopoid"), G, False, True, limit)


def check_morphism(
    G: StructureTable, H: StructureTable, F: MorphismData, limit: int = WITNESS_LIMIT
) -> CheckReport:
    """Check that ``F`` is a semiloopoid morphism ``G -> H``."""
    phi, base = F.element_map, F.base_map
    if len(phi) != G.n or any(not 0 <= x < H.n for x in phi):
        raise RangeError("element map is not a total map into the codomain carrier")
    if set(base) != set(G.units) or any(not 0 <= x < H.n for x in base.values()):
        raise RangeError("base map is not a total map on the units into the codomain carrier")

    report = CheckReport("morphism")
    restriction = []
    for u in sorted(G.units):
        if phi[u] != base[u]:
            restriction.append(((u,), "element-map-differs"))
        if base[u] not in H.units:
            restriction.append(((u,), "not-a-unit"))
    report.record("restriction", restriction, limit)

    equivariance = []
    for g in range(G.n):
        if H.alpha[phi[g]] != base[G.alpha[g]]:
            equivariance.append(((g,), "alpha"))
        if H.beta[phi[g]] != base[G.beta[g]]:
            equivariance.append(((g,), "beta"))
    report.record("equivariance", equivariance, limit)

    report.record(
        "multiplicative",
        (t for t in G.triples if (phi[t[0]], phi[t[1]], phi[t[2]]) not in H.triples),
        limit,
    )
    return report


# -- inverse semiloopoids --


def _cancellation_failures(G: StructureTable, inv: tuple[int, ...], side: str):
    tab = G.table
    for (g, h), gh in sorted(tab.items()):
        if side == "left":
            # g^-1 (g h) = h
            back = tab.get((inv[g], gh))
            if back is None:
                yield (g, h), "undefined"
            elif back != h:
                yield (g, h), "unequal"
        else:
            # (u g) g^-1 = u, with (u, g) = (g, h) renamed
            back = tab.get((gh, inv[h]))
            if back is None:
                yield (g, h), "undefined"
            elif back != g:
                yield (g, h), "unequal"


def _inverse_report(G, name, inv, sides, limit):
    report = check_semiloopoid(G, limit)
    report.name = name
    if not G.is_single_valued:
        return report
    for side in sides:
        report.record(f"{side}-cancellation", _cancellation_failures(G, inv, side), limit)
    return report


def check_inverse_semiloopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    if G.inv is None:
        raise MissingInversion("two-sided")
    return _inverse_report(G, "inverse-semiloopoid", G.inv, ("left", "right"), limit)


def check_left_inverse_semiloopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    """Uses ``G.linv``, falling back to a two-sided ``G.inv``."""
    inv = G.linv if G.linv is not None else G.inv
    if inv is None:
        raise MissingInversion("left")
    return _inverse_report(G, "left-inverse-semiloopoid", inv, ("left",), limit)


def check_right_inverse_semiloopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    """Uses ``G.rinv``, falling back to a two-sided ``G.inv``."""
    inv = G.rinv if G.rinv is not None else G.inv
    if inv is None:
        raise MissingInversion("right")
    return _inverse_report(G, "right-inverse-semiloopoid", inv, ("right",), limit)


def verify_inverse_identities(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    """Consequences of the inverse axioms; must pass on every inverse semiloopoid."""
    if G.inv is None:
        raise MissingInversion("two-sided")
    report = CheckReport("inverse-identities")
    if not _single_valued(report, G, limit):
        return report
    inv, tab = G.inv, G.table
    source, target, involution = [], [], []
    for g in range(G.n):
        if tab.get((inv[g], g)) != G.beta[g] or G.alpha[inv[g]] != G.beta[g]:
            source.append((g,))
        if tab.get((g, inv[g])) != G.alpha[g] or G.beta[inv[g]] != G.alpha[g]:
            target.append((g,))
        if inv[inv[g]] != g:
            involution.append((g,))
    report.record("inverse-source", source, limit)
    report.record("inverse-target", target, limit)
    report.record("involution", involution, limit)

    anti = []
    for g in range(G.n):
        for h in range(G.n):
            lhs = tab.get((g, h))
            rhs = tab.get((inv[h], inv[g]))
            if lhs is None and rhs is None:
                continue
            if lhs is None:
                anti.append(((g, h), "right-only"))
            elif rhs is None:
                anti.append(((g, h), "left-only"))
            elif inv[lhs] != rhs:
                anti.append(((g, h), "unequal"))
    report.record("antiautomorphism", anti, limit)
    return report


# -- unities associativity, anchor, loopoids --


def check_unities_associativity(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    report = CheckReport("unities-associative")
    if _single_valued(report, G, limit):
        report.record("unities-associativity", _associativity_failures(G, True), limit)
    return report


def check_anchor_compatibility(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    """Composable exactly when beta(g) = alpha(h), and the anchor g -> (alpha g, beta g)
    is multiplicative.  The set equality is reported as two inclusions."""
    report = CheckReport("anchor-compatible")
    if not _single_valued(report, G, limit):
        return report
    outside, missing = _matching_failures(G)
    report.record("composable-implies-matching", outside, limit)
    report.record("matching-implies-composable", missing, limit)
    anchor = []
    for (g, h), gh in G.table.items():
        if G.alpha[gh] != G.alpha[g]:
            anchor.append(((g, h), "alpha"))
        if G.beta[gh] != G.beta[h]:
            anchor.append(((g, h), "beta"))
    report.record("anchor-morphism", anchor, limit)
    return report


def check_loopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    report = check_semiloopoid(G, limit)
    report.name = "loopoid"
    if not G.is_single_valued:
        return report
    report.merge(check_unities_associativity(G, limit))
    report.record("left-fiber-bijection", _fiber_bijection_failures(G, "left"), limit)
    report.record("right-fiber-bijection", _fiber_bijection_failures(G, "right"), limit)
    return report


def _one_sided_loopoid(G: StructureTable, side: str, limit: int) -> CheckReport:
    report = check_semiloopoid(G, limit)
    report.name = f"{side}-loopoid"
    if not G.is_single_valued:
        return report
    outside, missing = _matching_failures(G)
    report.record("composable-implies-matching", outside, limit)
    report.record("matching-implies-composable", missing, limit)
    report.record(f"{side}-fiber-bijection", _fiber_bijection_failures(G, side), limit)
    return report


def check_left_loopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    return _one_sided_loopoid(G, "left", limit)


def check_right_loopoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    return _one_sided_loopoid(G, "right", limit)


def check_groupoid(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    if G.inv is None:
        raise MissingInversion("two-sided")
    report = check_semiloopoid(G, limit)
    report.name = "groupoid"
    if not G.is_single_valued:
        return report
    report.merge(check_anchor_compatibility(G, limit))
    report.record("associativity", _associativity_failures(G, False), limit)
    tab, inv = G.table, G.inv
    report.record(
        "inverse-left-unit", ((g,) for g in range(G.n) if tab.get((g, inv[g])) != G.alpha[g]), limit
    )
    report.record(
        "inverse-right-unit", ((g,) for g in range(G.n) if tab.get((inv[g], g)) != G.beta[g]), limit
    )
    return report


# -- loops --


def _totality_failures(G: StructureTable):
    tab = G.table
    return [(g, h) for g in range(G.n) for h in range(G.n) if (g, h) not in tab]


def _latin_failures(G: StructureTable, side: str):
    tab = G.table
    n = G.n
    for g in range(n):
        seen: dict[int, int] = {}
        complete = True
        for h in range(n):
            k = tab.get((g, h) if side == "rows" else (h, g))
            if k is None:
                complete = False
                continue
            if k in seen:
                yield (g, seen[k], h), "repeated"
            else:
                seen[k] = h
        if not complete:
            yield (g,), "incomplete"


def _loop_base(G: StructureTable, name: str, limit: int) -> Optional[CheckReport]:
    report = CheckReport(name)
    if not _single_valued(report, G, limit):
        return report
    report.record("totality", _totality_failures(G), limit)
    return report


def _identity_failures(G: StructureTable, left: bool, right: bool):
    if len(G.units) != 1:
        yield tuple(sorted(G.units)), "unit-count"
        return
    (e,) = G.units
    tab = G.table
    for x in range(G.n):
        if left and tab.get((e, x)) != x:
            yield (x,), "left"
        if right and tab.get((x, e)) != x:
            yield (x,), "right"


def check_loop(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    report = _loop_base(G, "loop", limit)
    if not G.is_single_valued:
        return report
    report.record("identity", _identity_failures(G, True, True), limit)
    report.record("latin-rows", _latin_failures(G, "rows"), limit)
    report.record("latin-columns", _latin_failures(G, "columns"), limit)
    return report


def check_left_loop(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    """Left translations bijective and the unit is a right identity (x e = x)."""
    report = _loop_base(G, "left-loop", limit)
    if not G.is_single_valued:
        return report
    report.record("right-identity", _identity_failures(G, False, True), limit)
    report.record("latin-rows", _latin_failures(G, "rows"), limit)
    return report


def check_quasigroup(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    report = _loop_base(G, "quasigroup", limit)
    if not G.is_single_valued:
        return report
    report.record("latin-rows", _latin_failures(G, "rows"), limit)
    report.record("latin-columns", _latin_failures(G, "columns"), limit)
    return report


def check_inverse_loop(G: StructureTable, limit: int = WITNESS_LIMIT) -> CheckReport:
    if G.inv is None:
        raise MissingInversion("two-sided")
    report = check_loop(G, limit)
    report.name = "inverse-loop"
    if not G.is_single_valued:
        return report
    tab, inv, n = G.table, G.inv, G.n
    cancel, unit, involution, anti = [], [], [], []
    for a in range(n):
        for b in range(n):
            ab, ba = tab.get((a, b)), tab.get((b, a))
            if ab is None or tab.get((inv[a], ab)) != b:
                cancel.append(((a, b), "left"))
            if ba is None or tab.get((ba, inv[a])) != b:
                cancel.append(((a, b), "right"))
            if ab is None or tab.get((inv[b], inv[a])) != inv[ab]:
                anti.append((a, b))
    if len(G.units) == 1:
        (e,) = G.units
        unit = [(a,) for a in range(n) if tab.get((a, inv[a])) != e or tab.get((inv[a], a)) != e]
    else:
        unit = [(tuple(sorted(G.units)), "unit-count")]
    involution = [(a,) for a in range(n) if inv[inv[a]] != a]
    report.record("inverse-cancellation", cancel, limit)
    report.record("inverse-unit", unit, limit)
    report.record("inverse-involution", involution, limit)
    report.record("inverse-antiautomorphism", anti, limit)
    return report


CHECKERS: dict[str, Callable[..., CheckReport]] = {
    "left-semiloopoid": check_left_semiloopoid,
    "right-semiloopoid": check_right_semiloopoid,
    "semiloopoid": check_semiloopoid,
    "left-inverse-semiloopoid": check_left_inverse_semiloopoid,
    "right-inverse-semiloopoid": check_right_inverse_semiloopoid,
    "inverse-semiloopoid": check_inverse_semiloopoid,
    "unities-associative": check_unities_associativity,
    "anchor-compatible": check_anchor_compatibility,
    "left-loopoid": check_left_loopoid,
    "right-loopoid": check_right_loopoid,
    "loopoid": check_loopoid,
    "groupoid": check_groupoid,
    "loop": check_loop,
    "left-loop": check_left_loop,
    "inverse-loop": check_inverse_loop,
    "quasigroup": check_quasigroup,
}

# (stronger, weaker): a pass of the first must imply a pass of the second
IMPLICATIONS = (
    ("groupoid", "loopoid"),
    ("loopoid", "left-loopoid"),
    ("loopoid", "right-loopoid"),
    ("left-loopoid", "semiloopoid"),
    ("right-loopoid", "semiloopoid"),
    ("semiloopoid", "left-semiloopoid"),
    ("semiloopoid", "right-semiloopoid"),
    ("loop", "left-loop"),
    ("loop", "quasigroup"),
    ("inverse-loop", "loop"),
    ("inverse-semiloopoid", "semiloopoid"),
)


def run_check(G: StructureTable, name: str, limit: int = WITNESS_LIMIT) -> CheckReport:
    """Run the checker for a class name.  Unities associativity and anchor
    compatibility are reported together with the semiloopoid axioms."""
    try:
        checker = CHECKERS[name]
    except KeyError:
        raise ValueError(f"unknown class {name!r}; expected one of {', '.join(CLASS_NAMES)}") from None
    report = checker(G, limit)
    if name in ("unities-associative", "anchor-compatible"):
        full = check_semiloopoid(G, limit)
        full.name = report.name
        report = full.merge(report)
    return report


def classify(G: StructureTable) -> dict[str, bool]:
    """Flag map over every class name.  A missing inversion map counts as a failure."""
    result = {}
    for name in CLASS_NAMES:
        try:
            result[name] = run_check(G, name, limit=1).passed
        except MissingInversion:
            result[name] = False
    for strong, weak in IMPLICATIONS:
        if result[strong] and not result[weak]:
            raise RuntimeError(f"implication {strong} => {weak} violated; checker bug")
    return result
