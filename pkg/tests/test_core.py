from __future__ import annotations

import pytest
from helpers import structures
from hypothesis import given
from hypothesis import strategies as st

from loopoids.core import (
    AmbiguousUnit,
    CheckReport,
    InvariantViolation,
    MissingUnit,
    MultiValued,
    NotAUnit,
    StructureTable,
    Witness,
    alpha_fiber,
    beta_fiber,
    composable_pairs,
    format_label,
    infer_structure,
    left_translation,
    product,
    relabel,
    restrict,
    right_translation,
)


def trivial3() -> StructureTable:
    # one unit 0, every element composable with it on both sides
    return StructureTable(
        n=3, units={0}, alpha=(0, 0, 0), beta=(0, 0, 0),
        triples={(0, 0, 0), (0, 1, 1), (0, 2, 2), (1, 0, 1), (2, 0, 2)},
    )


class TestInvariants:
    def test_minimal(self):
        G = StructureTable(n=1, units={0}, alpha=(0,), beta=(0,), triples={(0, 0, 0)})
        assert G.labels == ("0",)
        assert G.table == {(0, 0): 0}

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n=0, units={0}, alpha=(), beta=(), triples=()),
            dict(n=2, units=set(), alpha=(0, 0), beta=(0, 0), triples=()),
            dict(n=2, units={0}, alpha=(0, 1), beta=(0, 0), triples=()),
            dict(n=2, units={0, 1}, alpha=(1, 1), beta=(0, 1), triples=()),
            dict(n=2, units={0}, alpha=(0, 0), beta=(0, 0), triples={(0, 0, 2)}),
            dict(n=2, units={0}, alpha=(0, 0), beta=(0,), triples=()),
            dict(n=2, units={0}, alpha=(0, 0), beta=(0, 0), triples=(), labels=("a", "a")),
            dict(n=2, units={0}, alpha=(0, 0), beta=(0, 0), triples=(), inv=(0, 5)),
        ],
    )
    def test_rejects_malformed(self, kwargs):
        with pytest.raises(InvariantViolation):
            StructureTable(**kwargs)

    def test_labels_do_not_affect_equality(self):
        G = trivial3()
        assert G.replace(labels=("e", "a", "b")) == G

    def test_replace_validates(self):
        with pytest.raises(InvariantViolation):
            trivial3().replace(alpha=(0, 1, 0))


class TestQueries:
    def test_product_and_pairs(self):
        G = trivial3()
        assert product(G, 1, 0) == 1
        assert product(G, 1, 2) is None
        assert composable_pairs(G) == {(0, 0), (0, 1), (0, 2), (1, 0), (2, 0)}

    def test_multivalued(self):
        G = trivial3().replace(triples=trivial3().triples | {(1, 0, 2)})
        assert not G.is_single_valued
        assert G.multivalued_pairs == ((1, 0),)
        with pytest.raises(MultiValued):
            product(G, 1, 0)
        with pytest.raises(MultiValued):
            G.table

    def test_fibers(self):
        G = trivial3()
        assert alpha_fiber(G, 0) == beta_fiber(G, 0) == {0, 1, 2}
        with pytest.raises(NotAUnit):
            alpha_fiber(G, 1)

    def test_translations(self):
        G = trivial3()
        assert left_translation(G, 0) == {0: 0, 1: 1, 2: 2}
        assert left_translation(G, 1) == {0: 1}
        assert right_translation(G, 2) == {0: 2}

    def test_label_lookup(self):
        G = trivial3().replace(labels=("e", "a", "b"))
        assert G.index("b") == 2 and G.label(1) == "a"
        with pytest.raises(KeyError):
            G.index("z")

    def test_format_label(self):
        assert format_label(((0, 1), (2, 3))) == "((0,1),(2,3))"
        assert format_label(7) == "7"


class TestInference:
    def test_recovers_maps(self):
        G = trivial3()
        H = infer_structure(G.triples, 3)
        assert H == G

    def test_missing_unit(self):
        with pytest.raises(MissingUnit):
            infer_structure({(0, 0, 0), (0, 1, 1)}, 2)

    def test_ambiguous_unit(self):
        T = {(0, 0, 0), (1, 1, 1), (0, 2, 2), (1, 2, 2), (2, 0, 2)}
        with pytest.raises(AmbiguousUnit):
            infer_structure(T, 3)

    @given(structures(drop=False, extra=0))
    def test_unit_triples_determine_maps(self, G):
        assert infer_structure(G.triples, G.n).alpha == G.alpha


class TestRelabelRestrict:
    @given(structures(), st.randoms(use_true_random=False))
    def test_relabel_round_trip(self, G, rnd):
        perm = list(range(G.n))
        rnd.shuffle(perm)
        back = [0] * G.n
        for old, new in enumerate(perm):
            back[new] = old
        H = relabel(G, perm)
        assert len(H.triples) == len(G.triples) and len(H.units) == len(G.units)
        R = relabel(H, back)
        assert R == G and R.labels == G.labels

    def test_relabel_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            relabel(trivial3(), [0, 0, 1])

    def test_restrict(self):
        G = trivial3().replace(labels=("e", "a", "b"), inv=(0, 2, 1))
        R = restrict(G, [0, 2])
        assert R.labels == ("e", "b")
        assert R.triples == {(0, 0, 0), (0, 1, 1), (1, 0, 1)}
        assert R.inv is None  # the inverse of b leaves the subset

    def test_restrict_requires_closed_units(self):
        with pytest.raises(InvariantViolation):
            restrict(trivial3(), [1, 2])


class TestReport:
    def test_record_sorts_and_caps(self):
        r = CheckReport("x")
        assert not r.record("a", [(3,), ((1,), "left"), (2,)], limit=2)
        assert r.witnesses == [Witness("a", (1,), "left"), Witness("a", (2,), "")]
        assert r.record("b", [])
        assert r.failed_axioms() == ["a"] and not r

    def test_merge_keeps_existing_flags(self):
        a, b = CheckReport("a"), CheckReport("b")
        a.record("x", [])
        b.record("x", [(1,)])
        b.record("y", [(2,)])
        a.merge(b)
        assert a.flags == {"x": True, "y": False}
        assert a.witnesses == [Witness("y", (2,))]

    def test_format(self):
        r = CheckReport("loop")
        r.record("identity", [((1,), "left")])
        text = r.format(trivial3().replace(labels=("e", "a", "b")))
        assert text.splitlines() == ["loop: FAIL", "  identity: FAIL", "    witness: a  [left]"]
