import pytest
from pydantic import ValidationError

from ..exceptions import ResourceCapExceeded
from .fiber import enumerate_fiber, naive_points, split_flag_points
from .lattices import PRIMED, Lattice


class TestEnumerateFiber:
    """국소 모형 특수 올 열거 테스트"""

    def test_trivial_signature(self):
        """r = 0 이면 1 = 1 테스트"""
        record = enumerate_fiber(3, 0, 3, 3, {0})
        assert (record.naive_count, record.adm_count, record.contains_admissible) == (1, 1, True)

    def test_su3_signature_one_two(self):
        """n = 3, (1, 2), I = {0}, q = 3 은 13 = 13 이고 셀을 포함 테스트"""
        record = enumerate_fiber(3, 1, 2, 3, {0})
        assert record.naive_count == 13
        assert record.adm_count == 13
        assert record.contains_admissible
        assert record.naive_count >= record.adm_count
        assert record.row()["I"] == "0"

    def test_without_wedge(self):
        """쐐기 조건 없이도 적어도 허용 집합만큼 테스트"""
        record = enumerate_fiber(3, 1, 2, 3, {0}, wedge=False)
        assert record.naive_count >= 13
        assert record.contains_admissible

    def test_points_are_self_dual(self):
        """I = {0} 의 점은 자기 쌍대 테스트"""
        points = naive_points(3, 1, 2, 3, {0}, check_nilpotent=True)
        standard = Lattice.standard(3, 0, 3)
        for (lattice,) in points:
            assert lattice == lattice.dual()
            assert (lattice + standard).index_over(standard) <= 1

    def test_other_rank(self):
        """n ≠ 3 은 허용 집합 비교를 생략 테스트"""
        record = enumerate_fiber(2, 1, 1, 3, {1})
        assert record.naive_count >= 1
        assert record.adm_count is None
        assert record.contains_admissible is None

    def test_cap(self):
        """Gauss 이항계수 추정이 상한을 넘으면 거부 테스트"""
        with pytest.raises(ResourceCapExceeded) as info:
            enumerate_fiber(3, 1, 2, 3, {0}, cap=1000)
        assert info.value.cap_name == "FIBER_CAP"

    @pytest.mark.parametrize(
        "args,message",
        [
            ((3, 1, 1, 3, {0}), "r \\+ s"),
            ((3, 1, 2, 2, {0}), "odd q"),
            ((3, 1, 2, 4, {0}), "not prime"),
            ((3, 1, 2, 3, {2}), "out of range"),
            ((3, 1, 2, 3, set()), "must not be empty"),
            ((5, 2, 3, 3, {0}), "n ≤ 4"),
            ((4, 2, 2, 3, {0, PRIMED}), "must also contain 2"),
            ((3, 1, 2, 3, {1, PRIMED}), "even n"),
        ],
    )
    def test_rejects(self, args, message):
        """잘못된 입력 거부 테스트"""
        with pytest.raises(ValueError, match=message):
            enumerate_fiber(*args)

    def test_primed_index_reaches_enumeration(self):
        """n = 4, I = {0, 2, m'} 는 첨자 검사를 통과하고 열거 상한에서 멈춤 테스트"""
        with pytest.raises(ResourceCapExceeded) as info:
            enumerate_fiber(4, 2, 2, 3, [0, 2, PRIMED])
        assert info.value.cap_name == "FIBER_CAP"

    def test_record_immutable(self):
        """기록 불변성 테스트"""
        record = enumerate_fiber(3, 0, 3, 3, {0})
        with pytest.raises(ValidationError):
            record.naive_count = 2


class TestSplitFlags:
    """SL_2 깃발 전수 열거 테스트"""

    @pytest.mark.parametrize("q", [2, 3])
    def test_count(self, q):
        """(1 + q)(1 + q + q²) 개 테스트"""
        for center in (0, 1):
            assert len(split_flag_points(q, center)) == (1 + q) * (1 + q + q * q)

    def test_flags(self):
        """모든 점은 L_0 ⊂ L_1 ⊂ u^{-1}L_0 테스트"""
        for lower, upper in split_flag_points(3, 0):
            assert lower < upper < lower.scaled(-1)
            assert upper.index_over(lower) == 1

    def test_bad_center(self):
        """center 는 0 또는 1 테스트"""
        with pytest.raises(ValueError, match="center"):
            split_flag_points(3, 2)
