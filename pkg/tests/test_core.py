import random

import pytest

from gentleq.core import (
    ArrowClass,
    BoundQuiver,
    NotConnectedError,
    CycleRankError,
    QuiverSyntaxError,
    canonical_key,
    classify_arrows,
    cycle_rank,
    is_isomorphic,
    make_bound_quiver,
    opposite,
    parse,
    serialize,
    validate,
)
from gentleq.families import build_family, spec

from oracle_helpers import oracle_connected, oracle_fin_fails, random_relabel

L0_TEXT = """\
quiver L0
vertex w0
vertex w1
arrow a1 w1 w0
arrow b w0 w1
arrow c w0 w1
rel a1 b
rel c a1
end
"""


def a2_quiver():
    return make_bound_quiver(["x", "y"], [("al", "y", "x")], [])


def two_loops(rels):
    return make_bound_quiver(["x"], [("al", "x", "x"), ("be", "x", "x")], rels)


class TestParse:
    def test_l0_file(self):
        bq = parse(L0_TEXT)
        assert len(bq.vertices) == 2
        assert len(bq.arrows) == 3
        assert bq.relations == frozenset({("a1", "b"), ("c", "a1")})
        assert bq == build_family(spec("L0", 1, 0))

    def test_single_vertex_no_arrows(self):
        bq = parse("quiver t\nvertex x\nend\n")
        assert bq.vertices == ("x",)
        assert bq.arrows == ()

    def test_noncomposable_relation_rejected(self):
        text = "quiver t\nvertex x\nvertex y\narrow a x y\narrow b x y\nrel a b\nend\n"
        with pytest.raises(QuiverSyntaxError) as err:
            parse(text)
        assert "not composable" in str(err.value)
        assert err.value.line == 6

    def test_comments_and_blanks(self):
        bq = parse("# header\nquiver t # name\n\nvertex x\nend\n")
        assert bq.vertices == ("x",)

    @pytest.mark.parametrize("text,fragment", [
        ("vertex x\nend\n", "quiver"),
        ("quiver t\nvertex x\nvertex x\nend\n", "duplicate vertex"),
        ("quiver t\nvertex x\narrow a x z\nend\n", "unknown target"),
        ("quiver t\nvertex x\narrow a x x\narrow a x x\nend\n", "duplicate arrow"),
        ("quiver t\nvertex x\nrel a b\nend\n", "unknown arrow"),
        ("quiver t\nvertex x\n", "missing 'end'"),
        ("quiver t\nvertex x\nend\nvertex y\n", "after 'end'"),
        ("quiver t\nvertex x\narrow a x x\nrel a a\nrel a a\nend\n", "duplicate relation"),
        ("quiver t\nfrobnicate x\nend\n", "unknown directive"),
    ])
    def test_syntax_errors(self, text, fragment):
        with pytest.raises(QuiverSyntaxError) as err:
            parse(text)
        assert fragment in str(err.value)


class TestSerialize:
    def test_round_trip_structure(self):
        bq = parse(L0_TEXT)
        assert parse(serialize(bq)) == bq

    def test_l2_line_counts(self):
        bq = build_family(spec("L2", 1, 1, 1, 0, 0))
        lines = serialize(bq).splitlines()
        assert sum(1 for l in lines if l.startswith("vertex ")) == 2
        assert sum(1 for l in lines if l.startswith("arrow ")) == 3
        assert sum(1 for l in lines if l.startswith("rel ")) == 2

    def test_single_vertex(self):
        bq = make_bound_quiver(["x"], [], [])
        assert serialize(bq) == "quiver q\nvertex x\nend\n"

    def test_deterministic(self):
        bq = build_family(spec("L1", 2, 2, 1, 1, 1))
        assert serialize(bq) == serialize(parse(serialize(bq)))


class TestValidate:
    def test_l0_ok(self):
        assert validate(parse(L0_TEXT)) == ()

    def test_two_loops_self_relations_fail_fin(self):
        violations = validate(two_loops([("al", "al"), ("be", "be")]))
        assert [v.condition for v in violations] == ["FIN"]
        # the witness is the alternating loop cycle
        assert set(violations[0].witness.split()[-1].split(",")) == {"al", "be"}

    def test_two_loops_cross_relations_fail_fin(self):
        violations = validate(two_loops([("al", "be"), ("be", "al")]))
        assert [v.condition for v in violations] == ["FIN"]

    def test_g1_violation(self):
        bq = make_bound_quiver(
            ["x", "y"],
            [("a", "x", "y"), ("b", "x", "y"), ("c", "x", "y")],
            [],
        )
        assert any(v.condition == "G1" for v in validate(bq))

    def test_g3_violation(self):
        # two free continuations of the same arrow
        bq = make_bound_quiver(
            ["x", "y", "z", "w"],
            [("a", "x", "y"), ("b", "y", "z"), ("c", "y", "w")],
            [],
        )
        assert any(v.condition == "G3" for v in validate(bq))

    def test_g4_violation(self):
        bq = make_bound_quiver(
            ["x", "y", "z", "w"],
            [("a", "x", "y"), ("b", "y", "z"), ("c", "y", "w")],
            [("b", "a"), ("c", "a")],
        )
        assert any(v.condition == "G4" for v in validate(bq))

    def test_conn_flag(self):
        bq = make_bound_quiver(["x", "y"], [], [])
        assert validate(bq) == ()
        assert any(v.condition == "CONN" for v in validate(bq, require_connected=True))

    def test_fin_matches_oracle_on_all_relation_sets(self, two_cycle_classes):
        # every gentle relation assignment on the small shapes, plus the
        # enumerated classes themselves
        for n in (2, 3):
            for bq in two_cycle_classes(n):
                assert not oracle_fin_fails(bq)
        bad = two_loops([("al", "al"), ("be", "be")])
        assert oracle_fin_fails(bad)
        assert any(v.condition == "FIN" for v in validate(bad))


class TestCycleRank:
    def test_l0(self):
        assert cycle_rank(parse(L0_TEXT)) == 2

    def test_single_vertex(self):
        assert cycle_rank(make_bound_quiver(["x"], [], [])) == 0

    def test_a3_tree(self):
        bq = make_bound_quiver(
            ["x", "y", "z"], [("a", "x", "y"), ("b", "y", "z")], [])
        assert cycle_rank(bq) == 0

    def test_disconnected_rejected(self):
        with pytest.raises(NotConnectedError):
            cycle_rank(make_bound_quiver(["x", "y"], [], []))


class TestClassifyArrows:
    def test_l2_connector(self):
        bq = build_family(spec("L2", 1, 1, 1, 0, 0))
        classes, connecting = classify_arrows(bq)
        assert classes == {
            "a1": ArrowClass.CYCLE,
            "b1": ArrowClass.CYCLE,
            "g1": ArrowClass.CONNECTING,
        }
        assert connecting == frozenset({"va", "vb"})

    def test_l0_all_cycle(self):
        bq = parse(L0_TEXT)
        classes, connecting = classify_arrows(bq)
        assert set(classes.values()) == {ArrowClass.CYCLE}
        assert connecting == frozenset({"w0", "w1"})

    def test_pendant_branch(self):
        bq = build_family(spec("L2", 1, 1, 1, 0, 0))
        arrows = list(bq.arrows) + [("p", "va", "w")]
        ext = make_bound_quiver(list(bq.vertices) + ["w"], arrows, bq.relations)
        classes, _ = classify_arrows(ext)
        assert classes["p"] == ArrowClass.BRANCH

    def test_wrong_rank_rejected(self):
        with pytest.raises(CycleRankError):
            classify_arrows(a2_quiver())

    def test_trichotomy_on_sweep(self, two_cycle_classes):
        for bq in two_cycle_classes(3):
            classes, _ = classify_arrows(bq)
            for a, _s, _t in bq.arrows:
                rest_arrows = [x for x in bq.arrows if x[0] != a]
                rest = BoundQuiver(
                    bq.quiver.__class__(bq.vertices, tuple(rest_arrows)),
                    frozenset(),
                )
                if oracle_connected(rest):
                    assert classes[a] == ArrowClass.CYCLE
                else:
                    assert classes[a] in (ArrowClass.BRANCH, ArrowClass.CONNECTING)


class TestOpposite:
    def test_involution(self):
        bq = parse(L0_TEXT)
        assert opposite(opposite(bq)) == bq

    def test_a2(self):
        out = opposite(a2_quiver())
        assert out.arrows == (("al", "x", "y"),)

    def test_preserves_validity_and_rank(self, two_cycle_classes):
        for bq in two_cycle_classes(3):
            assert validate(opposite(bq)) == ()
            assert cycle_rank(opposite(bq)) == 2

    def test_preserves_invalidity(self):
        bad = two_loops([("al", "al"), ("be", "be")])
        assert {v.condition for v in validate(bad)} == \
            {v.condition for v in validate(opposite(bad))}


class TestCanonicalKey:
    def test_relabel_invariance(self, two_cycle_classes):
        rng = random.Random(20240817)
        pool = list(two_cycle_classes(3)) + list(two_cycle_classes(2))
        pool.append(build_family(spec("L1", 1, 2, 0, 1, 0)))
        for bq in pool:
            key = canonical_key(bq)
            for _ in range(5):
                assert canonical_key(random_relabel(bq, rng)) == key

    def test_different_shapes_differ(self):
        assert canonical_key(parse(L0_TEXT)) != canonical_key(
            build_family(spec("L2", 1, 1, 1, 0, 0)))

    def test_two_loop_relation_sets_differ(self):
        # neither passes FIN, but the keys still separate them
        a = two_loops([("al", "al"), ("be", "be")])
        b = two_loops([("al", "be"), ("be", "al")])
        assert canonical_key(a) != canonical_key(b)

    def test_is_isomorphic_via_relabeling(self):
        rng = random.Random(7)
        bq = build_family(spec("L1", 1, 2, 0, 1, 0))
        assert is_isomorphic(bq, random_relabel(bq, rng))

    def test_opposite_commutes_with_keys(self, two_cycle_classes):
        for bq in two_cycle_classes(2):
            for cq in two_cycle_classes(2):
                same = canonical_key(bq) == canonical_key(cq)
                same_op = canonical_key(opposite(bq)) == canonical_key(opposite(cq))
                assert same == same_op
