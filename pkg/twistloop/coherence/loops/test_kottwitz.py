from itertools import product

import pytest

from .kottwitz import (
    hermitian_form,
    invariant_of,
    is_unitary,
    kottwitz_gm,
    kottwitz_image,
    kottwitz_norm_one,
    kottwitz_special_unitary,
    kottwitz_unitary,
    norm_one_elements,
    pi0_invariants,
    pi0_order,
    sign_element,
    swap_element,
)
from .series import make_series, matrix_identity, matrix_product, monomial, parse_series, series_matrix


@pytest.fixture(scope="module")
def norm_one_f3():
    return norm_one_elements(3, 4)


class TestGm:
    """G_m 의 κ 테스트"""

    def test_values(self):
        """t^{-1}(1+t) 는 -1, 1 은 0 테스트"""
        assert kottwitz_gm(parse_series("t^-1 + 1", 5, variable="t")) == -1
        assert kottwitz_gm(make_series(5, {0: 1})) == 0

    def test_multiplicative(self):
        """단항식×단원 쌍에서 준동형 테스트"""
        units = [make_series(3, dict(enumerate(c))) for c in product(range(3), repeat=3) if c[0]]
        monomials = [monomial(3, k, c) for k in range(-3, 4) for c in (1, 2)]
        for f in monomials:
            for g in units:
                assert kottwitz_gm(f * g) == kottwitz_gm(f) + kottwitz_gm(g)

    def test_zero(self):
        """영 원소 거부 테스트"""
        with pytest.raises(ValueError):
            kottwitz_gm(make_series(3, {}))


class TestNormOne:
    """노름 1 토러스 테스트"""

    def test_values(self):
        """1 은 +1, -1 은 -1, ū·u^{-1} 은 -1 테스트"""
        p = 5
        u = monomial(p, 1)
        assert kottwitz_norm_one(make_series(p, {0: 1})) == 1
        assert kottwitz_norm_one(make_series(p, {0: -1})) == -1
        assert kottwitz_norm_one(u.conjugate() * u.inverse()) == -1

    def test_exhaustive_constant_term(self, norm_one_f3):
        """F_3[u]/(u⁴) 의 노름 1 단원 전체에서 κ = 상수항 테스트"""
        assert norm_one_f3
        for a in norm_one_f3:
            assert kottwitz_norm_one(a) == (1 if a.constant_term() == 1 else -1)
        assert {kottwitz_norm_one(a) for a in norm_one_f3} == {1, -1}

    def test_exhaustive_multiplicative(self, norm_one_f3):
        """모든 쌍에서 준동형 테스트"""
        for a in norm_one_f3:
            for b in norm_one_f3:
                assert kottwitz_norm_one(a * b) == kottwitz_norm_one(a) * kottwitz_norm_one(b)

    def test_closed_under_conjugation(self, norm_one_f3):
        """ā = a^{-1} 테스트"""
        for a in norm_one_f3:
            assert (a * a.conjugate() - 1).is_zero()

    def test_violated(self):
        """a·ā ≠ 1 거부 테스트"""
        with pytest.raises(ValueError, match="norm condition"):
            kottwitz_norm_one(parse_series("1 + u", 5, precision=4))
        with pytest.raises(ValueError, match="odd q"):
            kottwitz_norm_one(make_series(2, {0: 1}))


class TestUnitary:
    """U_n 의 κ 테스트"""

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_identity(self, n):
        """단위 행렬은 +1 테스트"""
        assert kottwitz_unitary(matrix_identity(n, 3)) == 1

    @pytest.mark.parametrize("n", [3, 5])
    def test_sign(self, n):
        """가운데 좌표 부호 반전은 -1 테스트"""
        assert kottwitz_unitary(sign_element(n, 3)) == -1

    @pytest.mark.parametrize("n", [2, 4])
    def test_swap(self, n):
        """e_m ↔ e_{m+1} 교환은 -1 테스트"""
        assert kottwitz_unitary(swap_element(n, 3)) == -1

    def test_parity_rejected(self):
        """짝홀 조건 위반 거부 테스트"""
        with pytest.raises(ValueError, match="odd n"):
            sign_element(4, 3)
        with pytest.raises(ValueError, match="even n"):
            swap_element(3, 3)

    def test_not_unitary(self):
        """유니터리가 아닌 행렬 거부 테스트"""
        g = series_matrix(3, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
        assert not is_unitary(g)
        with pytest.raises(ValueError, match="not unitary"):
            kottwitz_unitary(g)

    def test_form(self):
        """반대각 형식과 가운데 원소 테스트"""
        form = hermitian_form(3, 5)
        assert is_unitary(form)
        assert kottwitz_unitary(form) == -1

    def test_homomorphism(self):
        """κ(gh) = κ(g)κ(h) 테스트"""
        u = {1: 1}
        torus = series_matrix(3, [[u, 0, 0], [0, 1, 0], [0, 0, {-1: -1}]])
        elements = [matrix_identity(3, 3), sign_element(3, 3), torus, hermitian_form(3, 3)]
        for g in elements:
            for h in elements:
                assert kottwitz_unitary(matrix_product(g, h)) == kottwitz_unitary(g) * kottwitz_unitary(h)


class TestDispatch:
    """CLI 용 분기 테스트"""

    def test_kinds(self):
        """gm, norm1, un 테스트"""
        assert invariant_of("gm", monomial(3, 2)) == 2
        assert invariant_of("norm1", make_series(3, {0: 2})) == -1
        assert invariant_of("un", sign_element(3, 3)) == -1
        assert invariant_of("sun", matrix_identity(3, 3)) == 1
        with pytest.raises(ValueError, match="unknown torus"):
            invariant_of("gl", monomial(3, 0))


class TestPi0:
    """π_0(LG) 와 κ 의 상 비교 테스트"""

    def test_invariants(self):
        """G_m 은 Z, 노름 1 과 U_n 은 Z/2, SU_n 은 자명 테스트"""
        assert pi0_invariants("gm") == (0,)
        assert pi0_invariants("norm1") == (2,)
        assert pi0_invariants("un") == (2,)
        assert pi0_invariants("sun") == ()
        assert pi0_order("gm") == 0
        assert pi0_order("sun") == 1
        with pytest.raises(ValueError, match="unknown torus"):
            pi0_invariants("gl")

    def test_unitary_image_is_pi0(self):
        """U_3 의 κ 상이 π_0 전체 테스트"""
        image = kottwitz_image("un", [matrix_identity(3, 3), sign_element(3, 3)])
        assert image == {1, -1}
        assert len(image) == pi0_order("un")

    def test_special_unitary(self):
        """diag(-1, 1, 1, -1) 은 SU_4 에서 κ = 1 테스트"""
        signs = (-1, 1, 1, -1)
        g = series_matrix(3, [[signs[i] * int(i == j) for j in range(4)] for i in range(4)])
        assert kottwitz_special_unitary(g) == 1
        assert kottwitz_image("sun", [g, matrix_identity(4, 3)]) == {1}
        assert len(kottwitz_image("sun", [g])) == pi0_order("sun")

    def test_special_unitary_rejects_det(self):
        """행렬식이 1 이 아니면 거부 테스트"""
        with pytest.raises(ValueError, match="determinant 1"):
            kottwitz_special_unitary(sign_element(3, 3))
