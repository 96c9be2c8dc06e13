"""Isomorphism, canonical forms and exhaustive enumeration of small structures."""

from __future__ import annotations

import itertools
import os
import struct
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from . import axioms
from .core import (
    CheckReport,
    MorphismData,
    StructureError,
    StructureTable,
    default_labels,
    relabel,
)

CANONICAL_MAX_N = 64
CANONICAL_MAX_LEAVES = 200_000
SIZE_CAPS = {"semiloopoid": 4, "loopoid": 4, "loop": 6}
DEFAULT_NODE_BUDGET = 20_000_000
MODES = tuple(SIZE_CAPS)


class SizeCapExceeded(StructureError):
    pass


class BudgetExceeded(StructureError):
    """The search ran out of nodes; ``partial`` holds what was found so far."""

    def __init__(self, nodes: int, partial: list):
        super().__init__(f"node budget exhausted after {nodes} nodes ({len(partial)} partial results)")
        self.nodes = nodes
        self.partial = partial


def default_budget() -> int:
    value = os.environ.get("LPD_BUDGET_NODES")
    return int(value) if value else DEFAULT_NODE_BUDGET


# -- colour refinement --


def _incidence(G: StructureTable) -> list[list[tuple[int, int, int]]]:
    inc: list[list[tuple[int, int, int]]] = [[] for _ in range(G.n)]
    for a, b, c in G.triples:
        inc[a].append((0, b, c))
        inc[b].append((1, a, c))
        inc[c].append((2, a, b))
    return inc


def _normalize(keys: Sequence) -> list[int]:
    rank = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [rank[k] for k in keys]


def _initial_colors(G: StructureTable, inc) -> list[int]:
    keys = []
    for x in range(G.n):
        counts = [0, 0, 0]
        for pos, _, _ in inc[x]:
            counts[pos] += 1
        keys.append((x not in G.units, tuple(counts)))
    return _normalize(keys)


def _refine(G: StructureTable, inc, colors: list[int]) -> list[int]:
    """Iterated neighbourhood refinement; colour numbers come from sorted
    signatures, so equal inputs up to relabeling give equal colourings."""
    while True:
        keys = []
        for x in range(G.n):
            nbrs = sorted((pos, colors[p], colors[q]) for pos, p, q in inc[x])
            keys.append((colors[x], colors[G.alpha[x]], colors[G.beta[x]], tuple(nbrs)))
        new = _normalize(keys)
        if max(new) == max(colors):
            return new
        colors = new


def refined_colors(G: StructureTable) -> list[int]:
    inc = _incidence(G)
    return _refine(G, inc, _initial_colors(G, inc))


def _encode(G: StructureTable, perm: Sequence[int]) -> tuple[int, ...]:
    n = G.n
    inverse = [0] * n
    for old, new in enumerate(perm):
        inverse[new] = old
    units = sorted(perm[u] for u in G.units)
    triples = sorted((perm[a], perm[b], perm[c]) for a, b, c in G.triples)
    out = [n, len(units), *units, len(triples)]
    for t in triples:
        out.extend(t)
    out.extend(perm[G.alpha[inverse[i]]] for i in range(n))
    out.extend(perm[G.beta[inverse[i]]] for i in range(n))
    return tuple(out)


def _canonical_search(G: StructureTable, max_leaves: int) -> tuple[tuple[int, ...], list[int]]:
    inc = _incidence(G)
    best: list = [None, None]
    leaves = 0

    def visit(colors: list[int]) -> None:
        nonlocal leaves
        cells: dict[int, list[int]] = defaultdict(list)
        for x, c in enumerate(colors):
            cells[c].append(x)
        open_cells = [(len(xs), c) for c, xs in cells.items() if len(xs) > 1]
        if not open_cells:
            leaves += 1
            if leaves > max_leaves:
                raise SizeCapExceeded(f"canonical search exceeded {max_leaves} leaves")
            code = _encode(G, colors)
            if best[0] is None or code < best[0]:
                best[0], best[1] = code, list(colors)
            return
        _, target = min(open_cells)
        for x in cells[target]:
            keys = [(c, 0 if y == x else 1) if c == target else (c, 0) for y, c in enumerate(colors)]
            visit(_refine(G, inc, _normalize(keys)))

    visit(_refine(G, inc, _initial_colors(G, inc)))
    return best[0], best[1]


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Relabeling-invariant encoding of units, triples, alpha and beta."""

    code: tuple[int, ...]

    def to_bytes(self) -> bytes:
        return struct.pack(f">{len(self.code)}I", *self.code)

    def hex(self) -> str:
        return self.to_bytes().hex()


def canonical_labeling(G: StructureTable, max_leaves: int = CANONICAL_MAX_LEAVES) -> list[int]:
    """A permutation ``old -> new`` taking G to its canonical representative."""
    if G.n > CANONICAL_MAX_N:
        raise SizeCapExceeded(f"canonical form limited to {CANONICAL_MAX_N} elements")
    return _canonical_search(G, max_leaves)[1]


def canonical_form(G: StructureTable, max_leaves: int = CANONICAL_MAX_LEAVES) -> CanonicalForm:
    if G.n > CANONICAL_MAX_N:
        raise SizeCapExceeded(f"canonical form limited to {CANONICAL_MAX_N} elements")
    return CanonicalForm(_canonical_search(G, max_leaves)[0])


def canonical_representative(G: StructureTable) -> StructureTable:
    """G relabeled canonically, with default labels and inversion maps dropped."""
    perm = canonical_labeling(G)
    H = relabel(G.replace(inv=None, linv=None, rinv=None), perm)
    return H.replace(labels=default_labels(G.n))


# -- isomorphism --


def isomorphic(G: StructureTable, H: StructureTable) -> Optional[MorphismData]:
    """An isomorphism G -> H preserving units, alpha, beta and triples, or None."""
    if (G.n, len(G.units), len(G.triples)) != (H.n, len(H.units), len(H.triples)):
        return None
    cg, ch = refined_colors(G), refined_colors(H)
    if sorted(cg) != sorted(ch):
        return None
    by_color: dict[int, list[int]] = defaultdict(list)
    for y, c in enumerate(ch):
        by_color[c].append(y)
    size = {c: len(ys) for c, ys in by_color.items()}
    order = sorted(range(G.n), key=lambda x: (x not in G.units, size[cg[x]], cg[x], x))
    inc_g: list[list[tuple[int, int, int]]] = [[] for _ in range(G.n)]
    for t in G.triples:
        for x in set(t):
            inc_g[x].append(t)
    inc_h: list[list[tuple[int, int, int]]] = [[] for _ in range(H.n)]
    for t in H.triples:
        for y in set(t):
            inc_h[y].append(t)
    fwd: dict[int, int] = {}
    back: dict[int, int] = {}

    def consistent(x: int, y: int) -> bool:
        if G.alpha[x] in fwd and fwd[G.alpha[x]] != H.alpha[y]:
            return False
        if G.beta[x] in fwd and fwd[G.beta[x]] != H.beta[y]:
            return False
        for a, b, c in inc_g[x]:
            if a in fwd and b in fwd and c in fwd:
                if (fwd[a], fwd[b], fwd[c]) not in H.triples:
                    return False
        for a, b, c in inc_h[y]:
            if a in back and b in back and c in back:
                if (back[a], back[b], back[c]) not in G.triples:
                    return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        x = order[i]
        for y in by_color[cg[x]]:
            if y in back:
                continue
            fwd[x], back[y] = y, x
            if consistent(x, y) and extend(i + 1):
                return True
            del fwd[x], back[y]
        return False

    if not extend(0):
        return None
    return MorphismData.from_element_map(G, [fwd[x] for x in range(G.n)])


# -- enumeration --


@dataclass(frozen=True)
class EnumerationSpec:
    n: int
    mode: str = "semiloopoid"
    units: Optional[frozenset[int]] = None
    up_to_iso: bool = False
    node_budget: Optional[int] = None
    max_size: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.mode not in SIZE_CAPS:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        if self.units is not None:
            object.__setattr__(self, "units", frozenset(self.units))
        cap = self.max_size if self.max_size is not None else SIZE_CAPS[self.mode]
        if not 1 <= self.n <= cap:
            raise SizeCapExceeded(f"{self.mode} enumeration is capped at n <= {cap}")
        if self.units is not None:
            if not self.units or any(not 0 <= u < self.n for u in self.units):
                raise ValueError("units must be a non-empty subset of range(n)")
            if self.mode == "loop" and len(self.units) != 1:
                raise ValueError("a loop has exactly one unit")


def _unit_subsets(spec: EnumerationSpec) -> list[tuple[int, ...]]:
    if spec.units is not None:
        return [tuple(sorted(spec.units))]
    if spec.mode == "loop":
        # every loop is isomorphic to one with identity 0
        return [(0,)] if spec.up_to_iso else [(e,) for e in range(spec.n)]
    return [c for k in range(1, spec.n + 1) for c in itertools.combinations(range(spec.n), k)]


def _configs(spec: EnumerationSpec) -> list[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]:
    """All (units, alpha, beta) with alpha, beta projections onto the units."""
    out = []
    n = spec.n
    for units in _unit_subsets(spec):
        others = [g for g in range(n) if g not in units]
        maps = []
        for choice in itertools.product(units, repeat=len(others)):
            m = list(range(n))
            for g, u in zip(others, choice):
                m[g] = u
            maps.append(tuple(m))
        for alpha in maps:
            for beta in maps:
                out.append((units, alpha, beta))
    return out


class _Counter:
    def __init__(self, budget: int):
        self.budget = budget
        self.nodes = 0


def _search_config(n, mode, units, alpha, beta, counter: _Counter, found: list) -> None:
    """Fill the partial table cell by cell with row/column injectivity pruning."""
    unit_set = set(units)
    forced: dict[tuple[int, int], Optional[int]] = {}
    for g in range(n):
        forced[(alpha[g], g)] = g
        forced[(g, beta[g])] = g
    cells = [(g, h) for g in range(n) for h in range(n)]
    domains: dict[tuple[int, int], list[Optional[int]]] = {}
    for g, h in cells:
        if (g, h) in forced:
            domains[(g, h)] = [forced[(g, h)]]
        elif mode == "semiloopoid":
            domains[(g, h)] = [None, *range(n)]
        elif mode == "loopoid":
            if beta[g] == alpha[h]:
                domains[(g, h)] = [k for k in range(n) if alpha[k] == alpha[g] and beta[k] == beta[h]]
            else:
                domains[(g, h)] = [None]
        else:
            domains[(g, h)] = list(range(n))
    row_used = [set() for _ in range(n)]
    col_used = [set() for _ in range(n)]
    table: dict[tuple[int, int], int] = {}

    def emit() -> None:
        G = StructureTable(
            n=n, units=frozenset(unit_set), alpha=alpha, beta=beta,
            triples=frozenset((g, h, k) for (g, h), k in table.items()),
        )
        if mode == "loopoid" and not axioms.check_loopoid(G, limit=1):
            return
        if mode == "loop" and not axioms.check_loop(G, limit=1):
            return
        found.append(G)

    def fill(i: int) -> None:
        if i == len(cells):
            emit()
            return
        g, h = cells[i]
        for k in domains[(g, h)]:
            counter.nodes += 1
            if counter.nodes > counter.budget:
                raise BudgetExceeded(counter.nodes, found)
            if k is None:
                fill(i + 1)
                continue
            if k in row_used[g] or k in col_used[h]:
                continue
            row_used[g].add(k)
            col_used[h].add(k)
            table[(g, h)] = k
            fill(i + 1)
            del table[(g, h)]
            row_used[g].discard(k)
            col_used[h].discard(k)

    fill(0)


def _run_configs(n, mode, configs, budget) -> tuple[list[StructureTable], int]:
    counter = _Counter(budget)
    found: list[StructureTable] = []
    for units, alpha, beta in configs:
        _search_config(n, mode, units, alpha, beta, counter, found)
    return found, counter.nodes


def enumerate_structures(spec: EnumerationSpec) -> list[StructureTable]:
    """All structures of the requested class, in a deterministic order.

    With ``up_to_iso`` one canonical representative per isomorphism class is
    returned, sorted by canonical form.  Running out of budget raises
    :class:`BudgetExceeded`, which carries the partial result.
    """
    budget = spec.node_budget if spec.node_budget is not None else default_budget()
    configs = _configs(spec)
    if spec.workers > 1 and len(configs) > 1:
        chunks = [configs[i::spec.workers] for i in range(spec.workers)]
        with ProcessPoolExecutor(spec.workers) as pool:
            results = list(pool.map(_run_configs, *zip(*[(spec.n, spec.mode, c, budget) for c in chunks])))
        nodes = sum(r[1] for r in results)
        position = {cfg: i for i, cfg in enumerate(configs)}
        found = sorted(
            (G for r in results for G in r[0]),
            key=lambda G: position[(tuple(sorted(G.units)), G.alpha, G.beta)],
        )
        # within one config the search order is preserved by the stable sort
        if nodes > budget:
            raise BudgetExceeded(nodes, found)
    else:
        found, nodes = _run_configs(spec.n, spec.mode, configs, budget)
    if not spec.up_to_iso:
        return found
    classes: dict[CanonicalForm, StructureTable] = {}
    for G in found:
        form = canonical_form(G)
        if form not in classes:
            classes[form] = canonical_representative(G)
    return [classes[f] for f in sorted(classes)]


def inversions(G: StructureTable) -> Iterator[tuple[int, ...]]:
    """Every map satisfying g^-1 (g h) = h and (u g) g^-1 = u on a semiloopoid."""
    tab = G.table
    rows: dict[int, list[tuple[int, int]]] = defaultdict(list)
    cols: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for (g, h), k in tab.items():
        rows[g].append((h, k))
        cols[h].append((g, k))
    candidates = []
    for g in range(G.n):
        ok = [
            x for x in range(G.n)
            if all(tab.get((x, gh)) == h for h, gh in rows[g])
            and all(tab.get((ug, x)) == u for u, ug in cols[g])
        ]
        if not ok:
            return
        candidates.append(ok)
    yield from itertools.product(*candidates)


def semiloopoid_census(n_max: int, budget: Optional[int] = None) -> Iterator[StructureTable]:
    """All labeled semiloopoids with 1..n_max elements and every unit subset."""
    for n in range(1, n_max + 1):
        spec = EnumerationSpec(n, "semiloopoid", node_budget=budget, max_size=max(n_max, 4))
        yield from enumerate_structures(spec)


def inverse_semiloopoid_census(n_max: int, budget: Optional[int] = None) -> Iterator[StructureTable]:
    for G in semiloopoid_census(n_max, budget):
        for inv in inversions(G):
            yield G.replace(inv=inv)


@dataclass
class EquivalenceReport(CheckReport):
    examined: int = 0
    counterexamples: list[StructureTable] = field(default_factory=list)


def equivalence_experiment(
    n_max: int = 3, budget: Optional[int] = None, keep: int = 8
) -> EquivalenceReport:
    """Compare unities associativity with anchor compatibility on the census.

    ``equivalence`` compares against the full anchor check (composable exactly
    when beta(g) = alpha(h)); ``equivalence-inclusion`` compares against
    "composable only when beta(g) = alpha(h)" plus the anchor being
    multiplicative.
    """
    if n_max > 3 and budget is None:
        raise SizeCapExceeded("n_max > 3 needs an explicit node budget")
    report = EquivalenceReport("equivalence")
    full, inclusion = [], []
    for G in semiloopoid_census(n_max, budget):
        report.examined += 1
        ua = axioms.check_unities_associativity(G, limit=1)
        anchor = axioms.check_anchor_compatibility(G, limit=1)
        tag = (
            f"n={G.n} units={sorted(G.units)} alpha={list(G.alpha)} beta={list(G.beta)}"
            f" triples={sorted(G.triples)}"
        )
        if ua.passed != anchor.passed:
            elems = anchor.witnesses[0].elements if anchor.witnesses else ua.witnesses[0].elements
            full.append((elems, tag))
            if len(report.counterexamples) < keep:
                report.counterexamples.append(G)
        weak = anchor.flags["composable-implies-matching"] and anchor.flags["anchor-morphism"]
        if ua.passed != weak:
            inclusion.append((ua.witnesses[0].elements if ua.witnesses else (), tag))
    report.record("equivalence", full, keep)
    report.record("equivalence-inclusion", inclusion, keep)
    return report
