import pytest

from gentleq.core import (
    canonical_key,
    is_isomorphic,
    make_bound_quiver,
    opposite,
    validate,
)
from gentleq.families import build_family, spec
from gentleq.invariant import phi
from gentleq.moves import (
    Move,
    MoveKind,
    MoveNotApplicable,
    PatternMismatch,
    ShiftDirection,
    applicable,
    applicable_moves,
    apply_move,
    shift_relation,
    shift_relation_block,
    shift_relation_block_direct,
    shift_relation_direct,
)


def a3_equioriented():
    return make_bound_quiver(
        ["x", "y", "z"], [("a", "y", "x"), ("b", "z", "y")], [])


def chain_with_relation():
    # z -> y -> x bound at y
    return make_bound_quiver(
        ["x", "y", "z"], [("al", "y", "x"), ("be", "z", "y")], [("al", "be")])


class TestApplicability:
    def test_l0_no_sink(self):
        bq = build_family(spec("L0", 1, 0))
        moves = applicable_moves(bq)
        kinds = {(m.kind, m.vertex) for m in moves}
        assert not any(k is MoveKind.APR_REFLECT for k, _v in kinds)
        assert (MoveKind.GEN_APR_COREFLECT, "w0") in kinds
        assert (MoveKind.GEN_APR_REFLECT, "w1") in kinds
        assert moves[-1] == Move(MoveKind.OPPOSITE)

    def test_a3_sink_source(self):
        kinds = {(m.kind, m.vertex) for m in applicable_moves(a3_equioriented())}
        assert (MoveKind.APR_REFLECT, "x") in kinds
        assert (MoveKind.HW_REFLECT, "x") in kinds
        assert (MoveKind.APR_COREFLECT, "z") in kinds
        assert (MoveKind.HW_COREFLECT, "z") in kinds
        assert not any(k is MoveKind.APR_REFLECT and v != "x" for k, v in kinds)

    def test_loop_variant(self):
        bq = build_family(spec("L2", 1, 1, 1, 0, 0))
        assert applicable(bq, Move(MoveKind.GEN_APR_REFLECT, "va"))
        # the loop vertex without an outside arrow in is not reflectable
        assert not applicable(bq, Move(MoveKind.GEN_APR_REFLECT, "vb"))

    def test_not_applicable_raises(self):
        with pytest.raises(MoveNotApplicable):
            apply_move(a3_equioriented(), Move(MoveKind.APR_REFLECT, "y"))


class TestApplyMove:
    def test_apr_chain_example(self):
        out, receipt = apply_move(chain_with_relation(), Move(MoveKind.APR_REFLECT, "x"))
        want = make_bound_quiver(
            ["x", "y", "z"], [("p", "z", "x"), ("q", "x", "y")], [])
        assert is_isomorphic(out, want)
        assert receipt.output_key == canonical_key(out)
        assert phi(out) == phi(chain_with_relation())

    def test_hw_single_vertex_identity(self):
        bq = make_bound_quiver(["x"], [], [])
        out, _ = apply_move(bq, Move(MoveKind.HW_REFLECT, "x"))
        assert out == bq

    def test_loop_variant_on_l2(self):
        bq = build_family(spec("L2", 1, 1, 1, 0, 0))
        out, _ = apply_move(bq, Move(MoveKind.GEN_APR_REFLECT, "va"))
        assert out.relations == bq.relations
        src = {a: s for a, s, t in out.arrows}
        tgt = {a: t for a, s, t in out.arrows}
        assert (src["g1"], tgt["g1"]) == ("va", "vb")  # connector reversed
        assert (src["a1"], tgt["a1"]) == ("va", "va")
        assert is_isomorphic(out, bq)

    def test_counts_and_validity_preserved(self, two_cycle_classes):
        for bq in two_cycle_classes(3):
            for mv in applicable_moves(bq):
                out, _ = apply_move(bq, mv)
                assert len(out.vertices) == len(bq.vertices)
                assert len(out.arrows) == len(bq.arrows)
                assert validate(out, require_connected=True) == ()

    def test_phi_preserved(self, two_cycle_classes):
        for bq in two_cycle_classes(3):
            p0 = phi(bq)
            for mv in applicable_moves(bq):
                out, _ = apply_move(bq, mv)
                assert phi(out) == p0

    def test_reflection_inverses(self, two_cycle_classes):
        for bq in two_cycle_classes(3):
            for mv in applicable_moves(bq):
                if mv.kind is not MoveKind.APR_REFLECT:
                    continue
                out, _ = apply_move(bq, mv)
                # the generalized coreflection undoes the reflection; when the
                # vertex came out a source this is the plain coreflection
                back, _ = apply_move(out, Move(MoveKind.GEN_APR_COREFLECT, mv.vertex))
                assert is_isomorphic(back, bq)
                strict = Move(MoveKind.APR_COREFLECT, mv.vertex)
                if applicable(out, strict):
                    back2, _ = apply_move(out, strict)
                    assert is_isomorphic(back2, bq)

    def test_opposite_conjugation(self, two_cycle_classes):
        pairs = [
            (MoveKind.APR_REFLECT, MoveKind.APR_COREFLECT),
            (MoveKind.GEN_APR_REFLECT, MoveKind.GEN_APR_COREFLECT),
            (MoveKind.HW_REFLECT, MoveKind.HW_COREFLECT),
        ]
        for bq in two_cycle_classes(2):
            for refl, corefl in pairs:
                for v in bq.vertices:
                    mv = Move(refl, v)
                    if not applicable(opposite(bq), mv):
                        continue
                    left, _ = apply_move(opposite(bq), mv)
                    right, _ = apply_move(bq, Move(corefl, v))
                    assert is_isomorphic(left, opposite(right))

    def test_receipt_replay(self):
        bq = chain_with_relation()
        out, receipt = apply_move(bq, Move(MoveKind.APR_REFLECT, "x"))
        rebuilt = {(a, s, t) for a, s, t in out.arrows}
        assert rebuilt == set(receipt.arrow_map)
        assert receipt.input_key == canonical_key(bq)


def linear_shift_host():
    return make_bound_quiver(
        ["u", "x", "y", "v"],
        [("a1", "x", "u"), ("a2", "y", "x"), ("a3", "v", "y")],
        [("a1", "a2")],
    )


class TestShiftRelation:
    def test_right_basic(self):
        bq = linear_shift_host()
        got, receipts = shift_relation(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got == shift_relation_direct(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got.relations == frozenset({("a2", "a3")})
        src = {a: s for a, s, t in got.arrows}
        tgt = {a: t for a, s, t in got.arrows}
        assert (src["a1"], tgt["a1"]) == ("y", "u")
        assert (src["a2"], tgt["a2"]) == ("x", "y")
        assert (src["a3"], tgt["a3"]) == ("v", "x")
        assert [r.move.kind for r in receipts] == [MoveKind.GEN_APR_COREFLECT]

    def test_left_undoes_right(self):
        bq = linear_shift_host()
        right, _ = shift_relation(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        back, _ = shift_relation(right, ("a2", "a3"), ShiftDirection.LEFT)
        assert back == bq

    def test_closed_two_cycle(self):
        bq = make_bound_quiver(
            ["x", "y"], [("a1", "x", "y"), ("a2", "y", "x")], [("a1", "a2")])
        got, _ = shift_relation(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got == shift_relation_direct(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got.relations == frozenset({("a2", "a1")})

    def test_closed_triangle_u_equals_v(self):
        # the pattern's outer vertices may coincide
        bq = make_bound_quiver(
            ["u", "x", "y"],
            [("a1", "x", "u"), ("a2", "y", "x"), ("a3", "u", "y")],
            [("a1", "a2")],
        )
        assert validate(bq) == ()
        got, _ = shift_relation(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got == shift_relation_direct(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got.relations == frozenset({("a2", "a3")})
        assert is_isomorphic(got, bq)  # the triangle slides onto itself

    def test_long_form(self):
        bq = make_bound_quiver(
            ["u", "x", "y2", "y1", "y0", "v"],
            [("a1", "x", "u"), ("a2", "y2", "x"), ("b2", "y2", "y1"),
             ("b1", "y1", "y0"), ("a3", "v", "y0")],
            [("a1", "a2")],
        )
        got, receipts = shift_relation(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got == shift_relation_direct(bq, ("a1", "a2"), ShiftDirection.RIGHT)
        assert got.relations == frozenset({("a2", "a3")})
        assert len(receipts) > 1

    def test_pattern_absent(self):
        # middle vertex has an extra arrow hanging off
        bq = make_bound_quiver(
            ["u", "x", "y", "v", "w"],
            [("a1", "x", "u"), ("a2", "y", "x"), ("a3", "v", "y"), ("e", "y", "w")],
            [("a1", "a2"), ("e", "a3")],
        )
        assert validate(bq) == ()
        with pytest.raises(PatternMismatch):
            shift_relation(bq, ("a1", "a2"), ShiftDirection.RIGHT)

    def test_not_a_relation(self):
        with pytest.raises(PatternMismatch):
            shift_relation(linear_shift_host(), ("a2", "a3"), ShiftDirection.RIGHT)


class TestShiftBlock:
    def host(self, n, decorate=False):
        vertices = ["y"] + ["x%d" % i for i in range(n + 1)]
        arrows = [("b", "y", "x0")]
        for i in range(1, n + 1):
            arrows.append(("a%d" % i, "x%d" % i, "x%d" % (i - 1)))
        rels = [("a%d" % i, "a%d" % (i + 1)) for i in range(1, n)]
        if decorate:
            vertices.append("w")
            arrows.append(("c", "w", "y"))
        return make_bound_quiver(vertices, arrows, rels)

    def test_n2(self):
        bq = self.host(2)
        got, receipts = shift_relation_block(bq, "b")
        assert got == shift_relation_block_direct(bq, "b")
        assert got.relations == frozenset({("b", "a1")})
        kinds = [r.move.kind for r in receipts]
        assert kinds == [MoveKind.APR_REFLECT, MoveKind.APR_REFLECT,
                         MoveKind.GEN_APR_REFLECT]

    def test_n3_decorated(self):
        bq = self.host(3, decorate=True)
        got, _ = shift_relation_block(bq, "b")
        assert got == shift_relation_block_direct(bq, "b")
        # the block keeps its head relations, loses the last one, and gains
        # the one through the anchor
        assert got.relations == frozenset({("b", "a1"), ("a1", "a2")})

    def test_end_condition(self):
        # a relation continuing past a non-bare vertex blocks the slide
        bq = make_bound_quiver(
            ["y", "x0", "x1", "x2", "w", "v2"],
            [("b", "y", "x0"), ("a1", "x1", "x0"), ("a2", "x2", "x1"),
             ("c", "w", "x2"), ("d", "v2", "x2")],
            [("a1", "a2"), ("a2", "c")],
        )
        assert validate(bq) == ()
        with pytest.raises(PatternMismatch):
            shift_relation_block(bq, "b")

    def test_anchor_not_free(self):
        bq = self.host(2)
        with pytest.raises(PatternMismatch):
            shift_relation_block(bq, "a1")
