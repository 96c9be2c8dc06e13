"""Small shared test utilities."""

from loopoids.constructors import group_structure
from loopoids.core import StructureTable, format_label


def elem(G: StructureTable, obj) -> int:
    """Index of the element whose label renders ``obj``."""
    return G.index(format_label(obj))


def loop_from_table(table) -> StructureTable:
    n = len(table)
    return StructureTable(
        n=n, units={0}, alpha=(0,) * n, beta=(0,) * n,
        triples={(a, b, table[a][b]) for a in range(n) for b in range(n)},
    )


def same_table(G: StructureTable, H: StructureTable) -> bool:
    return (G.n, G.units, G.alpha, G.beta, G.triples, G.labels) == (
        H.n, H.units, H.alpha, H.beta, H.triples, H.labels
    )


__all__ = ["elem", "loop_from_table", "same_table", "group_structure"]


# -- hypothesis strategies --

from hypothesis import strategies as st  # noqa: E402


@st.composite
def structures(draw, max_n: int = 4, extra: int = 6, drop: bool = True) -> StructureTable:
    """Random well-formed tables that are often, but not always, semiloopoids.

    Starts from the unit triples (alpha(g), g, g) and (g, beta(g), g), adds a
    few random triples and may drop some.
    """
    n = draw(st.integers(1, max_n))
    units = draw(st.sets(st.integers(0, n - 1), min_size=1))
    unit_list = sorted(units)

    def projection():
        return tuple(g if g in units else draw(st.sampled_from(unit_list)) for g in range(n))

    alpha, beta = projection(), projection()
    triples = {(alpha[g], g, g) for g in range(n)} | {(g, beta[g], g) for g in range(n)}
    idx = st.integers(0, n - 1)
    triples |= draw(st.sets(st.tuples(idx, idx, idx), max_size=extra))
    if drop and triples and draw(st.booleans()):
        triples.discard(draw(st.sampled_from(sorted(triples))))
    return StructureTable(n=n, units=units, alpha=alpha, beta=beta, triples=triples)


@st.composite
def permutations(draw, n: int) -> list[int]:
    return draw(st.permutations(list(range(n))))
