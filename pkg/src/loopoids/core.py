"""Finite structures with a partially defined multiplication.

A structure is stored as its multiplication relation (a set of triples
``(g, h, k)`` meaning ``g * h = k``) together with a unit subset and the
source/target projections onto it.  Elements are dense integer indices;
labels are for display only.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

Triple = tuple[int, int, int]


class StructureError(ValueError):
    """Base class for errors raised on malformed structures or bad queries."""


class InvariantViolation(StructureError):
    pass


class MultiValued(StructureError):
    def __init__(self, g: int, h: int, values: Sequence[int]):
        super().__init__(f"pair ({g}, {h}) has several products: {sorted(values)}")
        self.g, self.h, self.values = g, h, tuple(sorted(values))


class NotAUnit(StructureError):
    def __init__(self, u: int):
        super().__init__(f"element {u} is not a unit")
        self.u = u


class MissingUnit(StructureError):
    def __init__(self, g: int, side: str):
        super().__init__(f"no {side} unit for element {g}")
        self.g, self.side = g, side


class AmbiguousUnit(StructureError):
    def __init__(self, g: int, side: str, candidates: Sequence[int]):
        super().__init__(f"several {side} units for element {g}: {sorted(candidates)}")
        self.g, self.side, self.candidates = g, side, tuple(sorted(candidates))


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(n))


def format_label(obj) -> str:
    """Compact, whitespace-free label for ints and nested tuples."""
    if isinstance(obj, tuple):
        return "(" + ",".join(format_label(x) for x in obj) + ")"
    return str(obj)


@dataclass(frozen=True)
class StructureTable:
    """A candidate structure: carrier ``range(n)``, units, alpha, beta, triples.

    Only well-formedness is enforced here (indices in range, alpha/beta land
    in the units and fix them, distinct labels).  Whether the triples form a
    semiloopoid, loop, ... is decided by :mod:`loopoids.axioms`.
    """

    n: int
    units: frozenset[int]
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    triples: frozenset[Triple]
    labels: tuple[str, ...] = field(default=(), compare=False)
    inv: Optional[tuple[int, ...]] = None
    linv: Optional[tuple[int, ...]] = None
    rinv: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "units", frozenset(self.units))
        set_(self, "alpha", tuple(self.alpha))
        set_(self, "beta", tuple(self.beta))
        set_(self, "triples", frozenset(tuple(t) for t in self.triples))
        set_(self, "labels", tuple(self.labels) if self.labels else default_labels(self.n))
        for name in ("inv", "linv", "rinv"):
            value = getattr(self, name)
            if value is not None:
                set_(self, name, tuple(value))
        self._validate()

    def _validate(self) -> None:
        n = self.n
        if not isinstance(n, int) or n < 1:
            raise InvariantViolation(f"carrier size must be a positive integer, got {n!r}")

        def in_range(i) -> bool:
            return isinstance(i, int) and 0 <= i < n

        if len(self.labels) != n:
            raise InvariantViolation(f"expected {n} labels, got {len(self.labels)}")
        if len(set(self.labels)) != n:
            raise InvariantViolation("labels are not pairwise distinct")
        if not self.units:
            raise InvariantViolation("unit set is empty")
        bad = [u for u in self.units if not in_range(u)]
        if bad:
            raise InvariantViolation(f"unit index out of range: {bad[0]}")
        for name in ("alpha", "beta", "inv", "linv", "rinv"):
            m = getattr(self, name)
            if m is None:
                continue
            if len(m) != n:
                raise InvariantViolation(f"{name} must have {n} entries, got {len(m)}")
            for g, x in enumerate(m):
                if not in_range(x):
                    raise InvariantViolation(f"{name}({g}) = {x} out of range")
        for g in range(n):
            if self.alpha[g] not in self.units:
                raise InvariantViolation(f"alpha({g}) = {self.alpha[g]} is not a unit")
            if self.beta[g] not in self.units:
                raise InvariantViolation(f"beta({g}) = {self.beta[g]} is not a unit")
        for u in self.units:
            if self.alpha[u] != u or self.beta[u] != u:
                raise InvariantViolation(f"unit {u} is not fixed by alpha and beta")
        for t in self.triples:
            if len(t) != 3 or not all(in_range(i) for i in t):
                raise InvariantViolation(f"triple {t} has an index out of range")

    # -- derived indexes (pure functions of the fields, computed once) --

    @cached_property
    def _products(self) -> dict[tuple[int, int], tuple[int, ...]]:
        out: dict[tuple[int, int], list[int]] = defaultdict(list)
        for g, h, k in sorted(self.triples):
            out[(g, h)].append(k)
        return {pair: tuple(ks) for pair, ks in out.items()}

    @cached_property
    def _left_rows(self) -> dict[int, tuple[tuple[int, int], ...]]:
        rows: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for g, h, k in sorted(self.triples):
            rows[g].append((h, k))
        return {g: tuple(v) for g, v in rows.items()}

    @cached_property
    def _right_rows(self) -> dict[int, tuple[tuple[int, int], ...]]:
        rows: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for h, g, k in sorted(self.triples):
            rows[g].append((h, k))
        return {g: tuple(v) for g, v in rows.items()}

    @cached_property
    def multivalued_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(p for p, ks in self._products.items() if len(ks) > 1))

    @property
    def is_single_valued(self) -> bool:
        return not self.multivalued_pairs

    @cached_property
    def table(self) -> dict[tuple[int, int], int]:
        """The partial multiplication as a dict; requires single-valuedness."""
        if self.multivalued_pairs:
            g, h = self.multivalued_pairs[0]
            raise MultiValued(g, h, self._products[(g, h)])
        return {pair: ks[0] for pair, ks in self._products.items()}

    def left_row(self, g: int) -> tuple[tuple[int, int], ...]:
        """Pairs ``(h, k)`` with ``(g, h, k)`` a triple, sorted."""
        return self._left_rows.get(g, ())

    def right_row(self, g: int) -> tuple[tuple[int, int], ...]:
        """Pairs ``(h, k)`` with ``(h, g, k)`` a triple, sorted."""
        return self._right_rows.get(g, ())

    def label(self, g: int) -> str:
        return self.labels[g]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(label) from None

    def replace(self, **changes) -> "StructureTable":
        fields = dict(
            n=self.n, units=self.units, alpha=self.alpha, beta=self.beta,
            triples=self.triples, labels=self.labels,
            inv=self.inv, linv=self.linv, rinv=self.rinv,
        )
        fields.update(changes)
        return StructureTable(**fields)


class Witness(NamedTuple):
    axiom: str
    elements: tuple[int, ...]
    detail: str = ""


@dataclass
class CheckReport:
    """Outcome of a checker: one flag per axiom, counterexamples for failures."""

    name: str
    flags: dict[str, bool] = field(default_factory=dict)
    witnesses: list[Witness] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def __bool__(self) -> bool:
        return self.passed

    def failed_axioms(self) -> list[str]:
        return [a for a, ok in self.flags.items() if not ok]

    def witnesses_for(self, axiom: str) -> list[Witness]:
        return [w for w in self.witnesses if w.axiom == axiom]

    def record(self, axiom: str, failures: Iterable, limit: int = 8) -> bool:
        """Set ``axiom`` from a list of failures, keeping the ``limit`` smallest.

        Each failure is either an element tuple or ``(elements, detail)``.
        """
        items = []
        for f in failures:
            if len(f) == 2 and isinstance(f[0], tuple) and isinstance(f[1], str):
                items.append(Witness(axiom, tuple(f[0]), f[1]))
            else:
                items.append(Witness(axiom, tuple(f)))
        items.sort()
        ok = not items
        self.flags[axiom] = ok
        self.witnesses.extend(items[:limit])
        return ok

    def merge(self, other: "CheckReport") -> "CheckReport":
        for axiom, ok in other.flags.items():
            if axiom in self.flags:
                continue
            self.flags[axiom] = ok
            self.witnesses.extend(other.witnesses_for(axiom))
        return self

    def format(self, G: Optional[StructureTable] = None) -> str:
        lines = [f"{self.name}: {'pass' if self.passed else 'FAIL'}"]
        for axiom, ok in self.flags.items():
            lines.append(f"  {axiom}: {'pass' if ok else 'FAIL'}")
            for w in self.witnesses_for(axiom):
                elems = " ".join(G.label(e) if G is not None else str(e) for e in w.elements)
                suffix = f"  [{w.detail}]" if w.detail else ""
                lines.append(f"    witness: {elems}{suffix}")
        return "\n".join(lines)


@dataclass(frozen=True)
class MorphismData:
    """A pair of maps ``(element_map, base_map)`` between two structures."""

    element_map: tuple[int, ...]
    base_map: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(self, "element_map", tuple(self.element_map))
        object.__setattr__(self, "base_map", dict(self.base_map))

    @classmethod
    def from_element_map(cls, G: StructureTable, element_map: Sequence[int]) -> "MorphismData":
        return cls(tuple(element_map), {u: element_map[u] for u in G.units})


# -- primitive queries --


def product(G: StructureTable, g: int, h: int) -> Optional[int]:
    """``g * h`` if defined, else None.  Raises MultiValued on non-functional tables."""
    ks = G._products.get((g, h))
    if ks is None:
        return None
    if len(ks) > 1:
        raise MultiValued(g, h, ks)
    return ks[0]


def composable_pairs(G: StructureTable) -> frozenset[tuple[int, int]]:
    return frozenset(G._products)


def _require_unit(G: StructureTable, u: int) -> None:
    if u not in G.units:
        raise NotAUnit(u)


def alpha_fiber(G: StructureTable, u: int) -> frozenset[int]:
    _require_unit(G, u)
    return frozenset(g for g in range(G.n) if G.alpha[g] == u)


def beta_fiber(G: StructureTable, u: int) -> frozenset[int]:
    _require_unit(G, u)
    return frozenset(g for g in range(G.n) if G.beta[g] == u)


def left_translation(G: StructureTable, g: int) -> dict[int, int]:
    """``h -> g*h`` on the left domain of ``g``."""
    out = {}
    for h, _ in G.left_row(g):
        out[h] = product(G, g, h)
    return out


def right_translation(G: StructureTable, g: int) -> dict[int, int]:
    """``h -> h*g`` on the right domain of ``g``."""
    out = {}
    for h, _ in G.right_row(g):
        out[h] = product(G, h, g)
    return out


def infer_structure(
    triples: Iterable[Sequence[int]],
    n: int,
    labels: Sequence[str] = (),
    **maps,
) -> StructureTable:
    """Rebuild alpha, beta and the units from the multiplication relation alone.

    ``alpha(g)`` is the unique ``e`` with ``(e, g, g)`` a triple and ``beta(g)``
    the unique ``e`` with ``(g, e, g)``.  Extra keyword maps (``inv`` etc.) are
    passed through.
    """
    triples = frozenset(tuple(t) for t in triples)
    lefts: dict[int, list[int]] = defaultdict(list)
    rights: dict[int, list[int]] = defaultdict(list)
    for a, b, c in triples:
        if b == c:
            lefts[b].append(a)
        if a == c:
            rights[a].append(b)

    def pick(candidates: dict[int, list[int]], g: int, side: str) -> int:
        found = candidates.get(g, [])
        if not found:
            raise MissingUnit(g, side)
        if len(found) > 1:
            raise AmbiguousUnit(g, side, found)
        return found[0]

    alpha = tuple(pick(lefts, g, "left") for g in range(n))
    beta = tuple(pick(rights, g, "right") for g in range(n))
    units = frozenset(alpha) | frozenset(beta)
    return StructureTable(
        n=n, units=units, alpha=alpha, beta=beta, triples=triples,
        labels=tuple(labels), **maps,
    )


def relabel(G: StructureTable, perm: Sequence[int]) -> StructureTable:
    """Image of ``G`` under the bijection ``old -> perm[old]``."""
    n = G.n
    if sorted(perm) != list(range(n)):
        raise ValueError("relabeling must be a permutation of the carrier")
    inverse = [0] * n
    for old, new in enumerate(perm):
        inverse[new] = old

    def move(m):
        if m is None:
            return None
        return tuple(perm[m[inverse[new]]] for new in range(n))

    return StructureTable(
        n=n,
        units=frozenset(perm[u] for u in G.units),
        alpha=move(G.alpha),
        beta=move(G.beta),
        triples=frozenset((perm[a], perm[b], perm[c]) for a, b, c in G.triples),
        labels=tuple(G.labels[inverse[new]] for new in range(n)),
        inv=move(G.inv),
        linv=move(G.linv),
        rinv=move(G.rinv),
    )


def restrict(G: StructureTable, subset: Iterable[int], triples=None) -> StructureTable:
    """Substructure on ``subset`` (renumbered in ascending order).

    ``triples`` overrides the restricted relation; it is given in old indices.
    Units, alpha and beta are restricted; inversion maps are dropped unless
    they preserve the subset.
    """
    keep = sorted(set(subset))
    new = {old: i for i, old in enumerate(keep)}
    if triples is None:
        triples = [t for t in G.triples if all(x in new for x in t)]
    for name, m in (("alpha", G.alpha), ("beta", G.beta)):
        for g in keep:
            if m[g] not in new:
                raise InvariantViolation(f"{name}({g}) = {m[g]} leaves the subset")

    def sub(m):
        if m is None or any(m[g] not in new for g in keep):
            return None
        return tuple(new[m[g]] for g in keep)

    return StructureTable(
        n=len(keep),
        units=frozenset(new[u] for u in G.units if u in new),
        alpha=sub(G.alpha),
        beta=sub(G.beta),
        triples=frozenset((new[a], new[b], new[c]) for a, b, c in triples),
        labels=tuple(G.labels[g] for g in keep),
        inv=sub(G.inv),
        linv=sub(G.linv),
        rinv=sub(G.rinv),
    )
