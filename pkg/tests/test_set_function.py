import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.errors import DomainError
from models.faces import TwoFace, enumerate_faces, face_count, phi, phi_face
from models.set_function import (
    GroundSet,
    SetFunction,
    counted,
    evaluate,
    materialize,
    parse_rational,
)
from models.zoo import gen_not_clique, gen_quadratic_strict
from services.settings import AnalysisSettings, override_settings
from utils.canonical_solver import strict_canonical
from tests.helpers import subset


@st.composite
def small_functions(draw, max_n=4):
    n = draw(st.integers(min_value=2, max_value=max_n))
    values = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4),
                           min_size=1 << n, max_size=1 << n))
    return SetFunction(GroundSet.numbered(n), values, 'hypothesis')


class TestGroundSet:
    def test_bits_follow_element_order(self):
        ground = GroundSet(('a', 'b', 'c'))
        assert ground.mask_of(['a', 'c']) == 0b101
        assert ground.names_of(0b110) == ['b', 'c']
        assert ground.parse_subset('') == 0
        assert ground.format_subset(ground.parse_subset('c,a')) == 'a,c'

    def test_rejects_duplicates_and_empty_names(self):
        with pytest.raises(DomainError):
            GroundSet(('a', 'a'))
        with pytest.raises(DomainError):
            GroundSet(('a', ''))
        with pytest.raises(DomainError):
            GroundSet(())

    def test_unknown_name(self):
        with pytest.raises(DomainError):
            GroundSet.numbered(3).parse_subset('1,4')

    def test_size_guard(self):
        override_settings(AnalysisSettings(max_ground_size=4))
        GroundSet.numbered(4)
        with pytest.raises(DomainError):
            GroundSet.numbered(5)


class TestRationals:
    def test_exact_parsing(self):
        assert parse_rational('0.1') == Fraction(1, 10)
        assert parse_rational('-3/6') == Fraction(-1, 2)
        assert parse_rational(7) == 7

    @pytest.mark.parametrize('bad', [0.5, True, '1/0', 'abc', '', None])
    def test_rejects_inexact_or_malformed(self, bad):
        with pytest.raises(DomainError):
            parse_rational(bad)

    def test_table_must_be_complete(self):
        with pytest.raises(DomainError):
            SetFunction(GroundSet.numbered(2), ['0', '1', '2'])


class TestEvaluate:
    def test_not_clique_values(self):
        f = gen_not_clique()
        assert evaluate(f, 0) == 0
        assert evaluate(f, subset(f.ground, '1,3')) == 2
        assert evaluate(f, subset(f.ground, '2')) == 1

    def test_out_of_range(self):
        f = gen_not_clique()
        with pytest.raises(DomainError):
            f.evaluate(8)
        with pytest.raises(DomainError):
            f.evaluate(-1)

    def test_arithmetic(self):
        f = gen_not_clique()
        assert (f + f).values == tuple(2 * v for v in f.values)
        assert (-f).evaluate(5) == -2
        assert (f - f).values == (0,) * 8
        assert f.scaled('1/2').evaluate(5) == 1


class TestPhi:
    def test_not_clique_pairwise_value(self):
        f = gen_not_clique()
        g = f.ground
        assert phi(f, subset(g, '2'), subset(g, '1,3')) == 2
        assert phi(f, subset(g, '1,2'), subset(g, '2,3')) == 0

    def test_not_clique_face_values(self):
        f = gen_not_clique()
        assert phi_face(f, TwoFace.of(0, 0, 1)) == 1
        assert phi_face(f, TwoFace.of(0, 0, 2)) == 0
        assert phi_face(f, TwoFace.of(0b001, 1, 2)) == 1
        # the face ({2}, {1,3}) is tight even though the pairwise value above is 2
        assert phi_face(f, TwoFace.of(0b010, 0, 2)) == 0

    @given(small_functions(), st.data())
    @settings(max_examples=60)
    def test_symmetric_and_nested(self, f, data):
        x = data.draw(st.integers(0, f.ground.full))
        y = data.draw(st.integers(0, f.ground.full))
        assert phi(f, x, y) == phi(f, y, x)
        assert phi(f, x, x) == 0
        assert phi(f, x & y, x) == 0

    @given(small_functions())
    @settings(max_examples=40)
    def test_face_slack_is_phi_of_the_middle_corners(self, f):
        for face in enumerate_faces(f.ground):
            _, xu, xv, _ = face.corners()
            assert phi_face(f, face) == phi(f, xu, xv)


class TestTwoFace:
    def test_pair_is_unordered(self):
        assert TwoFace.of(0b100, 1, 0) == TwoFace.of(0b100, 0, 1)

    def test_base_must_avoid_pair(self):
        with pytest.raises(DomainError):
            TwoFace.of(0b001, 0, 1)
        with pytest.raises(DomainError):
            TwoFace.of(0, 2, 2)


class TestEnumerateFaces:
    @pytest.mark.parametrize('n', range(2, 11))
    def test_count_and_uniqueness(self, n):
        faces = list(enumerate_faces(GroundSet.numbered(n)))
        assert len(faces) == face_count(n) == 2 ** (n - 2) * n * (n - 1) // 2
        assert len(set(faces)) == len(faces)
        assert faces == sorted(faces)

    def test_small_cases(self):
        assert list(enumerate_faces(GroundSet.numbered(2))) == [TwoFace.of(0, 0, 1)]
        assert len(list(enumerate_faces(GroundSet.numbered(3)))) == 6
        assert len(list(enumerate_faces(GroundSet.numbered(4)))) == 24
        assert list(enumerate_faces(GroundSet.numbered(1))) == []

    def test_order_is_pair_then_base(self):
        faces = list(enumerate_faces(GroundSet.numbered(3)))
        assert [(f.pair, f.base) for f in faces] == [
            ((0, 1), 0), ((0, 1), 4), ((0, 2), 0), ((0, 2), 2), ((1, 2), 0), ((1, 2), 1),
        ]


class TestCountedOracle:
    def test_counts_distinct_and_total(self):
        oracle = counted(gen_not_clique())
        assert oracle.total_calls == 0
        for mask in (1, 2, 3, 3):
            oracle.evaluate(mask)
        assert oracle.distinct_count == 3
        assert oracle.total_calls == 4
        assert oracle.distinct_queries == {1, 2, 3}

    def test_repeated_query_same_value(self):
        oracle = counted(gen_not_clique())
        first = oracle.evaluate(5)
        assert oracle.evaluate(5) == first
        assert oracle.distinct_count == 1
        assert oracle.total_calls == 2

    @pytest.mark.parametrize('n', range(1, 6))
    def test_transparent(self, n):
        f = gen_quadratic_strict(n) if n >= 2 else SetFunction(GroundSet.numbered(1), [0, 1])
        oracle = counted(f)
        assert materialize(oracle) == f
        assert oracle.distinct_count == f.ground.size

    def test_concurrent_increments(self):
        oracle = counted(gen_quadratic_strict(4))

        def worker():
            for mask in range(16):
                oracle.evaluate(mask)

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert oracle.total_calls == 8 * 16
        assert oracle.distinct_count == 16

    def test_strict_recovery_query_count(self):
        oracle = counted(gen_quadratic_strict(8))
        strict_canonical(oracle)
        assert oracle.distinct_count == 16


class TestExtremes:
    def test_minimizers_and_maximizers(self):
        f = gen_not_clique()
        assert f.minimizers() == [0]
        assert f.maximizers() == [5]
