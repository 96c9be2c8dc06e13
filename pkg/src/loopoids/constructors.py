"""Constructors for the standard examples and the transversal construction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from . import axioms
from .core import (
    CheckReport,
    InvariantViolation,
    NotAUnit,
    StructureError,
    StructureTable,
    format_label,
    product,
    restrict,
)


class PreconditionViolated(StructureError):
    pass


class InvalidProjection(PreconditionViolated):
    pass


class NotASubgroup(PreconditionViolated):
    pass


class NotATransversal(PreconditionViolated):
    pass


class IdentityNotInS(PreconditionViolated):
    pass


class NotALoop(PreconditionViolated):
    pass


class NotALoopoid(PreconditionViolated):
    pass


class EvenModulus(PreconditionViolated):
    pass


class NotOdd(PreconditionViolated):
    pass


class NotBijective(PreconditionViolated):
    pass


class TransversalityViolated(PreconditionViolated):
    def __init__(self, report: CheckReport):
        super().__init__(f"not a transversal: {', '.join(report.failed_axioms())}")
        self.report = report


# -- value types --


@dataclass(frozen=True)
class GroupTable:
    """A finite group given by its Cayley table.  Validated on construction."""

    n: int
    mul: tuple[tuple[int, ...], ...]
    identity: int
    inv: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "mul", tuple(tuple(row) for row in self.mul))
        object.__setattr__(self, "inv", tuple(self.inv))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))
        n, m, e = self.n, self.mul, self.identity
        elems = range(n)
        if len(m) != n or any(len(r) != n or any(not 0 <= x < n for x in r) for r in m):
            raise InvariantViolation("multiplication table is not n x n over range(n)")
        if any(m[e][g] != g or m[g][e] != g for g in elems):
            raise InvariantViolation(f"{e} is not a two-sided identity")
        if any(m[g][self.inv[g]] != e or m[self.inv[g]][g] != e for g in elems):
            raise InvariantViolation("inverse map is wrong")
        for a, b, c in itertools.product(elems, repeat=3):
            if m[m[a][b]][c] != m[a][m[b][c]]:
                raise InvariantViolation(f"not associative at {(a, b, c)}")

    @classmethod
    def from_table(cls, mul: Sequence[Sequence[int]], labels: Sequence[str] = ()) -> "GroupTable":
        n = len(mul)
        identity = next(e for e in range(n) if all(mul[e][g] == g for g in range(n)))
        inv = tuple(next(h for h in range(n) if mul[g][h] == identity) for g in range(n))
        return cls(n, tuple(map(tuple, mul)), identity, inv, tuple(labels))


def cyclic_group(n: int) -> GroupTable:
    return GroupTable(
        n,
        tuple(tuple((a + b) % n for b in range(n)) for a in range(n)),
        0,
        tuple((-a) % n for a in range(n)),
    )


def symmetric_group(k: int) -> GroupTable:
    """Permutations of ``range(k)`` in lexicographic order; ``(p q)(i) = p(q(i))``."""
    perms = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    mul = tuple(tuple(index[tuple(p[q[i]] for i in range(k))] for q in perms) for p in perms)
    labels = tuple("".join(map(str, p)) for p in perms)
    return GroupTable.from_table(mul, labels)


@dataclass(frozen=True)
class TransversalData:
    """A subset ``T`` with a projection ``pi`` of the whole carrier onto it."""

    subset: frozenset[int]
    projection: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "subset", frozenset(self.subset))
        object.__setattr__(self, "projection", tuple(self.projection))
        if set(self.projection) != set(self.subset):
            raise InvariantViolation("projection image differs from the subset")
        if any(self.projection[t] != t for t in self.subset):
            raise InvariantViolation("projection does not fix the subset")

    @classmethod
    def identity(cls, n: int) -> "TransversalData":
        return cls(frozenset(range(n)), tuple(range(n)))


@dataclass(frozen=True)
class OddPermutation:
    """A permutation of Z_n with phi(-x) = -phi(x)."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        n, t = self.n, self.table
        if n % 2 == 0:
            raise EvenModulus(f"modulus {n} is even")
        if len(t) != n or sorted(t) != list(range(n)):
            raise NotBijective(f"{list(t)} is not a permutation of range({n})")
        for x in range(n):
            if t[(n - x) % n] != (n - t[x]) % n:
                raise NotOdd(f"phi(-{x}) != -phi({x})")

    def __call__(self, x: int) -> int:
        return self.table[x % self.n]

    @property
    def is_linear(self) -> bool:
        c = self.table[1 % self.n]
        return all(self.table[x] == (c * x) % self.n for x in range(self.n))


# -- helpers --


def _from_carrier(
    carrier: Sequence[Hashable],
    units: Iterable[Hashable],
    alpha,
    beta,
    triples: Iterable[tuple],
    **maps,
) -> StructureTable:
    """Build a table from tuple-valued elements; carrier is sorted lexicographically."""
    carrier = sorted(carrier)
    index = {x: i for i, x in enumerate(carrier)}
    extra = {name: tuple(index[f(x)] for x in carrier) for name, f in maps.items() if f is not None}
    return StructureTable(
        n=len(carrier),
        units=frozenset(index[u] for u in units),
        alpha=tuple(index[alpha(x)] for x in carrier),
        beta=tuple(index[beta(x)] for x in carrier),
        triples=frozenset((index[a], index[b], index[c]) for a, b, c in triples),
        labels=tuple(format_label(x) for x in carrier),
        **extra,
    )


# -- constructors --


def pair_groupoid_over(points: Sequence[Hashable]) -> StructureTable:
    """Pair groupoid on an explicit point set, elements ``(u, v)``."""
    points = list(points)
    return _from_carrier(
        [(u, v) for u in points for v in points],
        [(u, u) for u in points],
        lambda x: (x[0], x[0]),
        lambda x: (x[1], x[1]),
        (((u, v), (v, z), (u, z)) for u in points for v in points for z in points),
        inv=lambda x: (x[1], x[0]),
    )


def pair_groupoid(n: int) -> StructureTable:
    if n < 1:
        raise PreconditionViolated("n must be positive")
    return pair_groupoid_over(range(n))


def group_structure(G: GroupTable) -> StructureTable:
    """A group as a structure with a single unit and total multiplication."""
    e = G.identity
    return StructureTable(
        n=G.n,
        units=frozenset({e}),
        alpha=(e,) * G.n,
        beta=(e,) * G.n,
        triples=frozenset((a, b, G.mul[a][b]) for a in range(G.n) for b in range(G.n)),
        labels=G.labels,
        inv=G.inv,
    )


def _check_projections(n: int, units, alpha, beta) -> None:
    units = set(units)
    if not units or any(not 0 <= u < n for u in units):
        raise InvalidProjection("units must be a non-empty subset of range(n)")
    for name, m in (("alpha", alpha), ("beta", beta)):
        if len(m) != n or any(x not in units for x in m):
            raise InvalidProjection(f"{name} must map range({n}) into the units")
        if any(m[u] != u for u in units):
            raise InvalidProjection(f"{name} must fix every unit")


def _trivial_triples(n: int, alpha, beta) -> set[tuple[int, int, int]]:
    return {(alpha[g], g, g) for g in range(n)} | {(g, beta[g], g) for g in range(n)}


def trivial_semiloopoid(n: int, units, alpha, beta) -> StructureTable:
    """Only the products forced by the units: alpha(g) g = g = g beta(g)."""
    alpha, beta = tuple(alpha), tuple(beta)
    _check_projections(n, units, alpha, beta)
    return StructureTable(
        n=n, units=frozenset(units), alpha=alpha, beta=beta, triples=_trivial_triples(n, alpha, beta)
    )


def extended_trivial_semiloopoid(
    n: int,
    units,
    alpha,
    beta,
    g0: int,
    A: Iterable[int],
    l0: Mapping[int, int],
    validate: bool = True,
) -> StructureTable:
    """Trivial semiloopoid plus the products ``g0 * h = l0(h)`` for ``h`` in ``A``.

    With ``validate=False`` the preconditions are skipped, which is how
    deliberately broken inputs are built for checker tests.
    """
    alpha, beta, A, units = tuple(alpha), tuple(beta), set(A), set(units)
    _check_projections(n, units, alpha, beta)
    if validate:
        if g0 in units or not 0 <= g0 < n:
            raise PreconditionViolated("g0 must be a non-unit element")
        if A & units != {beta[g0]}:
            raise PreconditionViolated("A must meet the units exactly in beta(g0)")
        if set(l0) != A:
            raise PreconditionViolated("l0 must be defined exactly on A")
        images = [l0[h] for h in A]
        if len(set(images)) != len(images):
            raise PreconditionViolated("l0 must be injective")
        if any(k in units or not 0 <= k < n for k in images):
            raise PreconditionViolated("l0 must take values among the non-units")
        if l0[beta[g0]] != g0:
            raise PreconditionViolated("l0(beta(g0)) must equal g0")
        if any(l0[h] == h for h in A - units):
            raise PreconditionViolated("l0 must not fix a non-unit of A")
    triples = _trivial_triples(n, alpha, beta) | {(g0, h, l0[h]) for h in A}
    return StructureTable(n=n, units=frozenset(units), alpha=alpha, beta=beta, triples=triples)


def _coset_projection(G: GroupTable, H: frozenset[int], S: frozenset[int]) -> tuple[int, ...]:
    """p_S(g) = the s in S with g in sH."""
    p = []
    for g in range(G.n):
        reps = [s for s in S if G.mul[G.inv[s]][g] in H]
        if len(reps) != 1:
            raise NotATransversal(f"coset of {G.labels[g]} has {len(reps)} representatives in S")
        p.append(reps[0])
    return tuple(p)


def _check_subgroup(G: GroupTable, H: frozenset[int]) -> None:
    if G.identity not in H:
        raise NotASubgroup("H does not contain the identity")
    for a in H:
        if G.inv[a] not in H or any(G.mul[a][b] not in H for b in H):
            raise NotASubgroup("H is not closed")


def baer_projection(G: GroupTable, H: Iterable[int], S: Iterable[int]) -> TransversalData:
    """The projection onto a left transversal S of H along the cosets gH."""
    H, S = frozenset(H), frozenset(S)
    _check_subgroup(G, H)
    if G.identity not in S:
        raise IdentityNotInS("S must contain the identity")
    return TransversalData(S, _coset_projection(G, H, S))


def baer_transversal_loop(G: GroupTable, H: Iterable[int], S: Iterable[int]) -> StructureTable:
    """Left loop on a left transversal S with s o s' = p_S(s s')."""
    T = baer_projection(G, H, S)
    p, e = T.projection, G.identity
    S = sorted(T.subset)
    triples = [(s, t, p[G.mul[s][t]]) for s in S for t in S]
    loop = restrict(group_structure(G), S, triples=triples).replace(inv=None)
    (unit,) = loop.units
    tab = loop.table
    for x in range(loop.n):
        if tab[(unit, x)] != x or tab[(x, unit)] != x:
            raise InvariantViolation(f"identity {G.labels[e]} is not two-sided")
    return loop


def loop_inverse(X: StructureTable) -> Optional[tuple[int, ...]]:
    """Candidate inversion of a loop: a^-1 with a^-1 a = e; None if one is missing."""
    (e,) = X.units
    tab = X.table
    out = []
    for a in range(X.n):
        found = [x for x in range(X.n) if tab.get((x, a)) == e]
        if len(found) != 1:
            return None
        out.append(found[0])
    return tuple(out)


def product_loop_pair_groupoid(X: StructureTable, n: int) -> StructureTable:
    """Loop times pair groupoid: (x,s,t)(y,t,r) = (xy,s,r) over units (e,s,s)."""
    if not axioms.check_loop(X):
        raise NotALoop("X is not a loop")
    if n < 1:
        raise PreconditionViolated("n must be positive")
    (e,) = X.units
    tab = X.table
    inverse = None
    if X.inv is not None and axioms.check_inverse_loop(X):
        inverse = lambda g: (X.inv[g[0]], g[2], g[1])  # noqa: E731
    pts = range(n)
    carrier = [(x, s, t) for x in range(X.n) for s in pts for t in pts]
    G = _from_carrier(
        carrier,
        [(e, s, s) for s in pts],
        lambda g: (e, g[1], g[1]),
        lambda g: (e, g[2], g[2]),
        (
            ((x, s, t), (y, t, r), (tab[(x, y)], s, r))
            for x in range(X.n) for y in range(X.n) for s in pts for t in pts for r in pts
        ),
        inv=inverse,
    )
    labels = tuple(f"({X.labels[x]},{s},{t})" for x, s, t in sorted(carrier))
    return G.replace(labels=labels)


def phi_points(n: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(n)]


def phi_left_loopoid(n: int, phi: OddPermutation | Sequence[int]) -> StructureTable:
    """Discrete left loopoid on {((a1,b1),(a2,b2)) : a1 - a2 = phi(b1 - b2)} over Z_n.

    Product ((a1,b1),(a2,b2)) . ((a2,b2),(a3,b3)) = ((a1,b1),(a1+phi(b3-b1),b3));
    the pair swap is a left inversion, and a two-sided one when phi is linear.
    """
    if not isinstance(phi, OddPermutation):
        phi = OddPermutation(n, tuple(phi))
    if phi.n != n:
        raise PreconditionViolated("phi has the wrong modulus")
    pts = phi_points(n)
    carrier = [(p, q) for p in pts for q in pts if (p[0] - q[0]) % n == phi(p[1] - q[1])]
    members = set(carrier)

    def mul(g, h):
        (a1, b1), _ = g
        _, (a3, b3) = h
        return ((a1, b1), ((a1 + phi(b3 - b1)) % n, b3))

    triples = [(g, h, mul(g, h)) for g in carrier for h in carrier if g[1] == h[0]]
    assert all(k in members for _, _, k in triples)
    swap = lambda g: (g[1], g[0])  # noqa: E731
    return _from_carrier(
        carrier,
        [(p, p) for p in pts],
        lambda g: (g[0], g[0]),
        lambda g: (g[1], g[1]),
        triples,
        linv=swap,
        inv=swap if phi.is_linear else None,
    )


def phi_ambient(n: int) -> StructureTable:
    """The pair groupoid over Z_n x Z_n, the ambient of the phi example."""
    return pair_groupoid_over(phi_points(n))


def phi_projection(n: int, phi: OddPermutation | Sequence[int]) -> TransversalData:
    """pi((a1,b1),(a2,b2)) = ((a1,b1),(a1+phi(b2-b1),b2)) on :func:`phi_ambient`."""
    if not isinstance(phi, OddPermutation):
        phi = OddPermutation(n, tuple(phi))
    pts = phi_points(n)
    carrier = [(p, q) for p in pts for q in pts]  # same order as phi_ambient
    index = {x: i for i, x in enumerate(carrier)}
    proj = []
    for (a1, b1), (_, b2) in carrier:
        proj.append(index[((a1, b1), ((a1 + phi(b2 - b1)) % n, b2))])
    return TransversalData(frozenset(proj), tuple(proj))


# -- transversals --


def _transversal_failures(G: StructureTable, T: TransversalData, side: str):
    pi, members = T.projection, T.subset
    for t in sorted(members):
        rel: dict[int, set[int]] = {}
        row = G.left_row(t) if side == "left" else G.right_row(t)
        for t2, g in row:
            if t2 in members:
                rel.setdefault(t2, set()).add(pi[g])
        preimage: dict[int, int] = {}
        for t2 in sorted(rel):
            images = sorted(rel[t2])
            if len(images) > 1:
                yield (t, t2), "multi-valued"
            for k in images:
                if k in preimage and preimage[k] != t2:
                    yield (t, preimage[k], t2), "not-injective"
                preimage.setdefault(k, t2)


def _transversal_report(G, T, name, sides, limit):
    if len(T.projection) != G.n:
        raise InvariantViolation("projection must be defined on the whole carrier")
    report = CheckReport(name)
    report.record(
        "units-closed",
        ((t,) for t in sorted(T.subset) if G.alpha[t] not in T.subset or G.beta[t] not in T.subset),
        limit,
    )
    for side in sides:
        report.record(f"{side}-transversal", _transversal_failures(G, T, side), limit)
    return report


def check_transversal(G: StructureTable, T: TransversalData, limit: int = 8) -> CheckReport:
    return _transversal_report(G, T, "transversal", ("left", "right"), limit)


def check_left_transversal(G: StructureTable, T: TransversalData, limit: int = 8) -> CheckReport:
    return _transversal_report(G, T, "left-transversal", ("left",), limit)


def check_right_transversal(G: StructureTable, T: TransversalData, limit: int = 8) -> CheckReport:
    return _transversal_report(G, T, "right-transversal", ("right",), limit)


_TRANSVERSAL_CHECKS = {
    "both": check_transversal,
    "left": check_left_transversal,
    "right": check_right_transversal,
}


def transversal_reduce(G: StructureTable, T: TransversalData, side: str = "both") -> StructureTable:
    """The induced structure on T: t . t' = pi(t t') for pairs composable in G."""
    report = _TRANSVERSAL_CHECKS[side](G, T)
    if not report:
        raise TransversalityViolated(report)
    pi = T.projection
    triples = [(a, b, pi[c]) for a, b, c in G.triples if a in T.subset and b in T.subset]
    R = restrict(G, T.subset, triples=triples)
    # restricted inversions survive only if they still invert the new product
    checks = {
        "inv": axioms.check_inverse_semiloopoid,
        "linv": axioms.check_left_inverse_semiloopoid,
        "rinv": axioms.check_right_inverse_semiloopoid,
    }
    def holds(name: str, m) -> bool:
        return bool(checks[name](R.replace(**{k: (m if k == name else None) for k in checks}), limit=1))

    kept = {name: getattr(R, name) for name in checks}
    kept = {name: m if m is not None and holds(name, m) else None for name, m in kept.items()}
    # a two-sided map that fails may still be a one-sided inversion
    if R.inv is not None and kept["inv"] is None:
        for side in ("linv", "rinv"):
            if kept[side] is None and holds(side, R.inv):
                kept[side] = R.inv
    return R.replace(**kept)


def isotropy_loop(G: StructureTable, u: int) -> StructureTable:
    """The loop of elements g with alpha(g) = beta(g) = u."""
    if u not in G.units:
        raise NotAUnit(u)
    if not axioms.check_loopoid(G):
        raise NotALoopoid("structure is not a loopoid")
    members = [g for g in range(G.n) if G.alpha[g] == u and G.beta[g] == u]
    return restrict(G, members)
