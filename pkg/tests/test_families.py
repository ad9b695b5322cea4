import pytest

from gentleq.core import canonical_key, cycle_rank, is_isomorphic, validate
from gentleq.families import (
    ConstraintViolation,
    OutOfLemmaScope,
    build_family,
    family_size,
    phi_formula,
    recognize,
    spec,
    theorem_list,
)
from gentleq.invariant import Phi, phi

from oracle_helpers import random_relabel
import random


def types(*pairs):
    return Phi.from_types(pairs)


class TestBuild:
    def test_l0_recipe(self):
        bq = build_family(spec("L0", 1, 0))
        assert len(bq.vertices) == 2
        assert len(bq.arrows) == 3
        assert bq.relations == frozenset({("a1", "b"), ("c", "a1")})

    def test_l1_contraction_p3_zero(self):
        bq = build_family(spec("L1", 1, 2, 0, 1, 0))
        assert sorted(bq.vertices) == ["B1", "vl", "vr"]
        arrows = {(a, s, t) for a, s, t in bq.arrows}
        assert arrows == {
            ("a1", "vl", "vr"), ("b2", "vr", "B1"),
            ("b1", "B1", "vl"), ("d1", "vl", "vr"),
        }
        assert bq.relations == frozenset({("a1", "b1"), ("b1", "b2"), ("b2", "a1")})

    def test_l1_double_contraction(self):
        bq = build_family(spec("L1", 2, 2, 0, 0, 1))
        assert len(bq.vertices) == 3
        assert len(bq.arrows) == 4
        assert cycle_rank(bq) == 2

    def test_all_small_instances_validate(self):
        small = [
            spec("L0", 3, 1), spec("L0p", 2, 1),
            spec("L1", 2, 1, 2, 0, 1), spec("L1", 1, 2, 1, 1, 0),
            spec("L2", 2, 2, 0, 1, 1), spec("L2", 1, 1, 3, 0, 0),
            spec("L2pSix", 1, 1, 1, 1, 0, 0), spec("L2pSix", 2, 1, 0, 0, 1, 0),
            spec("L2pFive", 1, 2, 1, 0, 1), spec("L2pFive", 2, 3, 1, 1, 2),
            spec("G0", 2, 2, 1), spec("G1", 2, 1, 1, 2), spec("G2", 1, 2, 0, 1),
        ]
        for sp in small:
            bq = build_family(sp)
            assert validate(bq, require_connected=True) == ()
            assert len(bq.arrows) == len(bq.vertices) + 1
            assert family_size(sp) == len(bq.vertices)

    def test_six_parameter_identities(self):
        # vanishing connector halves identify with the plain two-cycle family
        assert is_isomorphic(
            build_family(spec("L2pSix", 2, 1, 1, 0, 1, 0)),
            build_family(spec("L2", 2, 1, 1, 1, 0)))
        assert is_isomorphic(
            build_family(spec("L2pSix", 2, 1, 0, 1, 1, 0)),
            build_family(spec("L2", 1, 2, 1, 0, 1)))

    def test_gamma_identities_at_zero(self):
        for pp, q, r in [(1, 1, 0), (2, 1, 1), (2, 2, 0)]:
            g0 = build_family(spec("G0", pp, q, r))
            assert is_isomorphic(build_family(spec("G1", pp, q, r, 0)), g0)
            assert is_isomorphic(build_family(spec("G2", pp, q, r, 0)), g0)

    @pytest.mark.parametrize("bad", [
        ("L0", (0, 0)),
        ("L0", (2, 2)),
        ("L1", (1, 1, 0, 1, 0)),   # p2 + p3 < 2
        ("L1", (1, 2, 0, 0, 0)),   # p4 + r1 < 1
        ("L2", (1, 1, 0, 0, 0)),   # p3 + r1 + r2 < 1
        ("L2pFive", (1, 1, 1, 0, 0)),  # p2 < 2
        ("L2pFive", (1, 2, 1, 0, 0)),  # r2 < 1
        ("G0", (1, 1, 1)),
        ("G1", (1, 1, 0, -1)),
    ])
    def test_constraint_violations(self, bad):
        tag, params = bad
        with pytest.raises(ConstraintViolation):
            build_family(spec(tag, *params))


class TestRecognize:
    def test_round_trip(self):
        pool = [
            spec("L0", 1, 0), spec("L0", 3, 2), spec("L0p", 2, 0),
            spec("L1", 1, 2, 0, 1, 0), spec("L1", 2, 1, 2, 0, 1),
            spec("L2", 1, 1, 1, 0, 0), spec("L2", 2, 2, 1, 1, 0),
            spec("L2pFive", 1, 2, 1, 0, 1),
            spec("G0", 2, 2, 1), spec("G1", 2, 1, 1, 2),
        ]
        for sp in pool:
            got = recognize(build_family(sp))
            assert got is not None
            assert canonical_key(build_family(got)) == canonical_key(build_family(sp))

    def test_relabeled(self):
        rng = random.Random(99)
        bq = random_relabel(build_family(spec("L2", 2, 1, 0, 1, 0)), rng)
        # with a vanishing connector the two cycles are interchangeable, so
        # two specs match; the least one wins
        got = recognize(bq)
        assert got == spec("L2", 1, 2, 0, 0, 1)
        assert is_isomorphic(build_family(got), bq)

    def test_non_family(self, two_cycle_classes):
        keys = set()
        for sp in theorem_list(3):
            keys.add(canonical_key(build_family(sp)))
        misses = [bq for bq in two_cycle_classes(3)
                  if canonical_key(bq) not in keys]
        assert misses
        assert any(recognize(bq) is None for bq in misses)

    def test_family_coincidences(self):
        # a symmetric mixed cycle admits the connector swap as an isomorphism
        got = recognize(build_family(spec("L1", 2, 2, 2, 1, 1)))
        assert got == spec("L1", 2, 2, 1, 2, 1)
        assert is_isomorphic(build_family(got),
                             build_family(spec("L1", 2, 2, 2, 1, 1)))
        # ... and the double-arrow shapes coincide across families at q = 1
        got = recognize(build_family(spec("L0p", 6, 0)))
        assert got == spec("G0", 1, 6, 0)

    def test_round_trip_larger_sizes(self):
        for sp in [spec("L0", 7, 3), spec("L0p", 5, 2),
                   spec("L1", 2, 2, 2, 1, 0), spec("L2", 3, 2, 2, 1, 1)]:
            got = recognize(build_family(sp))
            assert got is not None
            assert canonical_key(build_family(got)) == canonical_key(build_family(sp))


class TestPhiFormula:
    def test_examples(self):
        assert phi_formula(spec("L0", 3, 1)) == types((3, 5))
        assert phi_formula(spec("L1", 1, 2, 0, 1, 0)) == types((0, 3), (1, 0), (1, 1))
        assert phi_formula(spec("L2", 1, 1, 1, 0, 0)) == types((0, 1), (0, 1), (1, 1))
        assert phi_formula(spec("L0p", 2, 0)) == types((3, 5))

    def test_out_of_scope(self):
        with pytest.raises(OutOfLemmaScope):
            phi_formula(spec("G0", 1, 1, 0))
        with pytest.raises(OutOfLemmaScope):
            phi_formula(spec("L0p", 2, 1))
        with pytest.raises(OutOfLemmaScope):
            phi_formula(spec("L2pFive", 1, 2, 1, 0, 1))

    def test_matches_computed_small(self):
        for sp in theorem_list(4):
            if sp.tag == "L0p" and sp.params[1] != 0:
                continue
            assert phi_formula(sp) == phi(build_family(sp)), str(sp)


class TestTheoremList:
    def test_max_two(self):
        got = theorem_list(2)
        assert got == sorted([
            spec("L0", 1, 0),
            spec("L2", 1, 1, 1, 0, 0),
            spec("L2", 2, 1, 0, 1, 0),
        ])

    def test_all_entries_build(self):
        for sp in theorem_list(5):
            bq = build_family(sp)
            assert cycle_rank(bq) == 2
            assert len(bq.vertices) <= 5

    def test_no_duplicates(self):
        lst = theorem_list(6)
        assert len(lst) == len(set(lst))

    def test_side_conditions(self):
        for sp in theorem_list(6):
            if sp.tag == "L1":
                p1, p2, p3, p4, r1 = sp.params
                assert p3 > p4 or (p3 == p4 and p2 > r1)
            elif sp.tag == "L2":
                p1, p2, p3, r1, r2 = sp.params
                assert p1 > p2 or (p1 == p2 and r1 >= r2)
            elif sp.tag == "L0p":
                assert sp.params[1] == 0

    def test_min_bound(self):
        with pytest.raises(ValueError):
            theorem_list(1)
