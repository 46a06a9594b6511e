from itertools import combinations, product

import pytest

from .exceptions import ResourceCapExceeded
from .root_data import echelon_system, load_affine_datum
from .weyl import (
    bruhat_interval,
    bruhat_leq,
    coset_min,
    demazure_product,
    demazure_word,
    finite_weyl_group,
    from_word,
    identity,
    left_descents,
    length,
    longest_finite_element,
    make_element,
    omega_component,
    omega_elements,
    omega_permutation,
    parabolic_min,
    parse_element,
    reduced_word,
    right_descents,
    simple_reflection,
    to_spec,
    translation_element,
    word_spec,
)


@pytest.fixture
def a2():
    return echelon_system(load_affine_datum("A(1)_2"), 0)


@pytest.fixture
def su3():
    return echelon_system(load_affine_datum("A(2)_2"), 0)


def word_ball(system, radius):
    """단순 반사 곱으로 BFS, 원소 -> 단어 길이"""
    nodes = system.affine.nodes
    distance = {identity(system): 0}
    frontier = [identity(system)]
    for step in range(1, radius + 1):
        following = []
        for w in frontier:
            for i in nodes:
                product = w * simple_reflection(system, i)
                if product not in distance:
                    distance[product] = step
                    following.append(product)
        frontier = following
    return distance


def subword_leq(v, w):
    """부분 단어 판정 (느린 기준 구현)"""
    word, tau = reduced_word(w)
    _, tau_v = reduced_word(v)
    if tau_v != tau:
        return False
    for size in range(len(word) + 1):
        for kept in combinations(range(len(word)), size):
            if from_word(v.system, [word[k] for k in kept]) * tau == v:
                return True
    return False


class TestElement:
    """원소 기본 연산 테스트"""

    def test_identity(self, a2):
        """항등원 테스트"""
        e = identity(a2)
        assert length(e) == 0
        assert reduced_word(e) == ((), e)
        assert make_element(e, (0, 0)) == e

    def test_involution(self, a2):
        """s_i^2 = e 테스트"""
        for i in (0, 1, 2):
            s = simple_reflection(a2, i)
            assert length(s) == 1
            assert s * s == identity(a2)

    def test_dominant_translation_length(self, a2):
        """우세 λ 에 대해 l(t_λ) = ⟨λ, 2ρ⟩ 테스트"""
        for lam in [(1, 0), (0, 1), (1, 1), (2, 0), (2, 1), (2, 2), (3, 1)]:
            expected = sum(
                sum(r * c for r, c in zip(root, lam)) for root in a2.positive_roots
            )
            assert length(translation_element(a2, lam)) == expected
        assert length(translation_element(a2, (1, 0))) == 2

    def test_length_matches_word_search(self, a2):
        """길이가 최소 단어 길이와 같은지 테스트"""
        ball = word_ball(a2, 4)
        for w, distance in ball.items():
            assert length(w) == distance

    def test_length_of_inverse(self, a2):
        """l(w) = l(w^-1) 테스트"""
        tau = omega_elements(a2)[1]
        for w in word_ball(a2, 4):
            assert length(w.inverse()) == length(w)
            assert length((w * tau).inverse()) == length(w)

    def test_subadditive(self, a2):
        """l(vw) ≤ l(v) + l(w) 테스트"""
        ball = list(word_ball(a2, 2))
        for v in ball:
            for w in ball:
                product = v * w
                assert length(product) <= length(v) + length(w)
                assert (length(product) - length(v) - length(w)) % 2 == 0

    def test_lattice_mismatch(self, a2, su3):
        """격자 불일치 테스트"""
        with pytest.raises(ValueError, match="lattice mismatch"):
            make_element(identity(a2), (1, 0, 0))
        with pytest.raises(ValueError, match="lattice mismatch"):
            make_element(identity(su3), (1,))
        with pytest.raises(ValueError, match="translation"):
            make_element(translation_element(a2, (1, 0)), (0, 0))


class TestReducedWord:
    """축약 단어 테스트"""

    def test_s0_s1(self, a2):
        """s0·s1 테스트"""
        w = simple_reflection(a2, 0) * simple_reflection(a2, 1)
        assert reduced_word(w) == ((0, 1), identity(a2))

    def test_round_trip(self, a2):
        """축약 단어를 다시 곱하면 원래 원소 테스트"""
        taus = omega_elements(a2)
        for w in word_ball(a2, 5):
            for tau in taus:
                element = w * tau
                word, rest = reduced_word(element)
                assert len(word) == length(element)
                assert length(rest) == 0
                assert from_word(a2, word) * rest == element

    def test_least_word(self, a2):
        """사전식 최소 단어 테스트"""
        w = from_word(a2, (1, 0))
        assert reduced_word(w)[0] == (1, 0)
        w = from_word(a2, (2, 1, 2))
        assert reduced_word(w)[0] == (1, 2, 1)

    def test_descents(self, a2):
        """하강 집합 테스트"""
        w = from_word(a2, (0, 1))
        assert left_descents(w) == (0,)
        assert right_descents(w) == (1,)


class TestOmega:
    """Ω 성분 테스트"""

    def test_identity_class(self, a2):
        """항등원과 Q^v 평행이동은 자명한 류 테스트"""
        assert omega_component(identity(a2)) == (0,)
        for row in a2.coroot_lattice:
            assert omega_component(translation_element(a2, row)) == (0,)

    def test_fundamental_coweight(self, a2):
        """t_{ϖ_1^v} 는 Z/3 의 생성원 테스트"""
        t = translation_element(a2, (1, 0))
        assert omega_component(t) in {(1,), (2,)}
        assert omega_component(t * t * t) == (0,)

    def test_multiplicative(self, a2):
        """Ω 성분의 곱셈성 테스트"""
        t = translation_element(a2, (1, 0))
        u = translation_element(a2, (0, 1))
        s = simple_reflection(a2, 0)
        for v, w in [(t, u), (t * s, u), (s, t)]:
            expected = tuple(
                (a + b) % 3 for a, b in zip(omega_component(v), omega_component(w))
            )
            assert omega_component(v * w) == expected

    def test_elements(self, a2, su3):
        """길이 0 원소 테스트"""
        assert len(omega_elements(a2)) == 3
        assert all(length(tau) == 0 for tau in omega_elements(a2))
        assert omega_elements(su3) == (identity(su3),)

    def test_conjugation_permutes_generators(self, a2):
        """τ 켤레가 단순 반사를 치환하는지 테스트"""
        for tau in omega_elements(a2):
            permutation = omega_permutation(tau)
            assert sorted(permutation.values()) == [0, 1, 2]
            for i, j in permutation.items():
                assert tau * simple_reflection(a2, i) * tau.inverse() == simple_reflection(a2, j)
        rotation = omega_permutation(omega_elements(a2)[1])
        assert all(rotation[i] != i for i in (0, 1, 2))

    def test_positive_length_rejected(self, a2):
        """길이 양수 원소 거부 테스트"""
        with pytest.raises(ValueError, match="positive length"):
            omega_permutation(simple_reflection(a2, 0))


class TestBruhatOrder:
    """Bruhat 순서 테스트"""

    def test_identity_below(self, a2):
        """e ≤ w 테스트"""
        for w in word_ball(a2, 3):
            assert bruhat_leq(identity(a2), w)

    def test_distinct_atoms(self, a2):
        """s_0, s_1 비교 불가 테스트"""
        assert not bruhat_leq(simple_reflection(a2, 0), simple_reflection(a2, 1))

    def test_different_omega_class(self, a2):
        """다른 Ω 류는 비교 불가 테스트"""
        tau = omega_elements(a2)[1]
        assert not bruhat_leq(identity(a2), tau)

    def test_agrees_with_subwords(self, a2):
        """길이 4 이하 모든 쌍에서 부분 단어 판정과 일치 테스트"""
        ball = list(word_ball(a2, 4))
        for v in ball:
            for w in ball:
                assert bruhat_leq(v, w) == subword_leq(v, w)

    def test_partial_order(self, a2):
        """반대칭성 테스트"""
        ball = list(word_ball(a2, 3))
        for v in ball:
            for w in ball:
                if v != w and bruhat_leq(v, w):
                    assert not bruhat_leq(w, v)


class TestCosetMin:
    """잉여류 최소 원소 테스트"""

    def test_identity(self, a2):
        """e 는 그대로 테스트"""
        e = identity(a2)
        assert coset_min(e, {0}, {1}) == e

    def test_absorption(self, a2):
        """왼쪽 생성원 흡수 테스트"""
        s0, s1 = simple_reflection(a2, 0), simple_reflection(a2, 1)
        assert coset_min(s1 * s0, {0}, {0, 1, 2}) == s0

    def test_double_coset_scan(self, a2):
        """이중 잉여류 전수 조사와 일치 테스트"""
        left_group = [identity(a2), simple_reflection(a2, 1)]
        right_group = [identity(a2), simple_reflection(a2, 2)]
        for w in word_ball(a2, 4):
            coset = {a * w * b for a in left_group for b in right_group}
            smallest = min(length(x) for x in coset)
            minima = [x for x in coset if length(x) == smallest]
            assert len(minima) == 1
            assert parabolic_min(w, {1}, {2}) == minima[0]
            assert coset_min(w, {0, 2}, {0, 1}) == minima[0]


class TestBruhatInterval:
    """Bruhat 구간 테스트"""

    def test_single_node(self, a2):
        """tops = {e} 테스트"""
        graph = bruhat_interval([identity(a2)])
        assert len(graph) == 1
        assert graph.covers == []

    def test_s0_s1(self, a2):
        """s0·s1 아래 4 원소, 4 덮개 테스트"""
        graph = bruhat_interval([from_word(a2, (0, 1))])
        assert len(graph) == 4
        assert len(graph.covers) == 4
        graph.check_edges()

    def test_edges_verified(self, a2):
        """모든 간선의 반사 관계 테스트"""
        graph = bruhat_interval([translation_element(a2, (1, 0))])
        graph.check_edges()
        for v, w, label in graph.covers:
            assert bruhat_leq(v, w)
        assert len(graph.below(translation_element(a2, (1, 0)))) == len(graph)

    def test_downward_closed(self, a2):
        """구간이 아래로 닫혀 있는지 테스트"""
        top = from_word(a2, (0, 1, 2, 0))
        graph = bruhat_interval([top])
        for w in word_ball(a2, 4):
            assert (w in graph) == bruhat_leq(w, top)

    def test_quotient(self, a2):
        """우측 잉여류 최소 대표 테스트"""
        top = from_word(a2, (0, 1, 2, 0))
        graph = bruhat_interval([top], modulo_right={1, 2})
        assert all(not set(right_descents(w)) & {1, 2} for w in graph.elements)
        expected = {parabolic_min(w, (), {1, 2}) for w in bruhat_interval([top]).elements}
        assert set(graph.elements) == expected

    def test_cap(self, a2):
        """상한 초과 테스트"""
        with pytest.raises(ResourceCapExceeded) as excinfo:
            bruhat_interval([translation_element(a2, (2, 2))], cap=5)
        assert excinfo.value.cap_name == "INTERVAL_CAP"

    def test_mixed_omega_rejected(self, a2):
        """다른 Ω 류 꼭대기 거부 테스트"""
        with pytest.raises(ValueError, match="different Omega classes"):
            bruhat_interval([identity(a2), omega_elements(a2)[1]])


class TestDemazure:
    """Demazure 곱 테스트"""

    def test_idempotent(self, a2):
        """s ∗ s = s 테스트"""
        s1 = simple_reflection(a2, 1)
        assert demazure_product(s1, s1) == s1
        assert demazure_word(a2, (0, 0, 0)) == simple_reflection(a2, 0)

    def test_reduced_is_product(self, a2):
        """길이가 더해지면 보통 곱 테스트"""
        v, w = from_word(a2, (0, 1)), from_word(a2, (2,))
        assert demazure_product(v, w) == v * w
        assert demazure_word(a2, (0, 1, 2)) == from_word(a2, (0, 1, 2))

    def test_omega_component(self, a2):
        """Ω 성분은 곱해진다 테스트"""
        tau = omega_elements(a2)[1]
        v = from_word(a2, (0,))
        assert demazure_product(v, tau) == v * tau
        assert omega_component(demazure_product(tau, v)) == omega_component(tau)

    @pytest.mark.parametrize("size", [2, 3, 4])
    def test_subword_maximum(self, a2, size):
        """모든 부분 단어 곱의 Bruhat 최대 테스트"""
        for word in product(a2.affine.nodes, repeat=size):
            subwords = {
                from_word(a2, [word[i] for i in positions])
                for k in range(size + 1)
                for positions in combinations(range(size), k)
            }
            top = demazure_word(a2, word)
            assert top in subwords
            assert all(bruhat_leq(w, top) for w in subwords)

    def test_associative(self, a2):
        """결합법칙 테스트"""
        ball = list(word_ball(a2, 2))
        for u in ball:
            for v in ball:
                for w in ball:
                    assert demazure_product(demazure_product(u, v), w) == demazure_product(
                        u, demazure_product(v, w)
                    )

    def test_unknown_node(self, a2):
        """없는 노드 거부 테스트"""
        with pytest.raises(ValueError, match="unknown node"):
            demazure_word(a2, (5,))


class TestFiniteGroup:
    """유한 Weyl 군 테스트"""

    def test_orders(self, a2):
        """|W_0| 테스트"""
        assert len(finite_weyl_group(a2)) == 6
        c2 = echelon_system(load_affine_datum("C(1)_2"), 0)
        assert len(finite_weyl_group(c2)) == 8
        assert length(longest_finite_element(c2)) == 4


class TestParse:
    """원소 표기 테스트"""

    def test_word(self, a2):
        """단어 표기 테스트"""
        assert parse_element(a2, "s0.s1") == from_word(a2, (0, 1))
        assert parse_element(a2, "e") == identity(a2)

    def test_canonical_echo(self, a2):
        """정규형 표기 왕복 테스트"""
        w = parse_element(a2, "t[1,0]*w0[1]")
        assert to_spec(w) == "t[1,0]*w0[1]"
        assert parse_element(a2, to_spec(w)) == w

    def test_tau(self, a2):
        """tau 표기 테스트"""
        assert length(parse_element(a2, "tau^1")) == 0
        assert parse_element(a2, "tau^3") == identity(a2)
        assert parse_element(a2, "tau[1]") == omega_elements(a2)[1]

    def test_word_spec(self, a2):
        """단어 출력 테스트"""
        assert word_spec(identity(a2)) == "e"
        assert word_spec(from_word(a2, (0, 1))) == "s0.s1"
        assert word_spec(omega_elements(a2)[1]) == "tau[1]"

    def test_bad_spec(self, a2):
        """잘못된 표기 테스트"""
        with pytest.raises(ValueError, match="cannot parse"):
            parse_element(a2, "x1")
        with pytest.raises(ValueError, match="affine node"):
            parse_element(a2, "w0[0.1]")


class TestSu3:
    """분기 SU_3 Weyl 군 테스트"""

    def test_translation_length(self, su3):
        """l(t_2) = 2 테스트"""
        assert length(translation_element(su3, (2,))) == 2

    def test_infinite_dihedral(self, su3):
        """무한 이면체 군의 구간 크기 테스트"""
        top = from_word(su3, (0, 1, 0, 1))
        assert len(bruhat_interval([top])) == 8
