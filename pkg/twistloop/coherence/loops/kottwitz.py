import logging
from itertools import product
from typing import Dict, Iterable, List, Set, Tuple

from sympy import ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_form

from .series import (
    SeriesMatrix,
    TruncatedLaurentSeries,
    check_prime,
    determinant,
    make_series,
    matrix_conjugate,
    matrix_product,
    series_matrix,
    transpose,
)

logger = logging.getLogger(__name__)


def kottwitz_gm(f: TruncatedLaurentSeries) -> int:
    """G_m: f = t^k·(단원) 이면 κ(f) = k"""
    return f.ord()


def _norm_defect(a: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
    return a * a.conjugate() - 1


def kottwitz_norm_one(a: TruncatedLaurentSeries) -> int:
    """노름 1 토러스: a ≡ κ_T(a) mod (u)"""
    if a.p == 2:
        raise ValueError("the norm-one torus needs odd q")
    if not _norm_defect(a).is_zero():
        raise ValueError(f"norm condition a·ā = 1 violated for {a.to_text()}")
    c = a.constant_term()
    if c == 1:
        return 1
    if c == a.p - 1:
        return -1
    raise ValueError(f"constant term {c} of a norm-one element must be ±1")


def norm_one_elements(p: int, precision: int) -> List[TruncatedLaurentSeries]:
    """F_p[u]/(u^precision) 안에서 a·ā = 1 인 단원 전체"""
    check_prime(p)
    if p == 2:
        raise ValueError("the norm-one torus needs odd q")
    found = []
    for coefficients in product(range(p), repeat=precision):
        if not coefficients[0]:
            continue
        a = make_series(p, dict(enumerate(coefficients)), precision)
        if _norm_defect(a).is_zero():
            found.append(a)
    logger.debug(f"{len(found)} norm-one units modulo u^{precision} over F_{p}")
    return found


def hermitian_form(n: int, p: int) -> SeriesMatrix:
    """φ(e_i, e_j) = δ_{i, n+1-j}"""
    return series_matrix(p, [[int(i + j == n - 1) for j in range(n)] for i in range(n)])


def is_unitary(g: SeriesMatrix) -> bool:
    """g^T J ḡ = J"""
    n = len(g)
    p = g[0][0].p
    form = hermitian_form(n, p)
    image = matrix_product(matrix_product(transpose(g), form), matrix_conjugate(g))
    return all((image[i][j] - form[i][j]).is_zero() for i in range(n) for j in range(n))


def kottwitz_unitary(g: SeriesMatrix) -> int:
    """U_n: κ = κ_T ∘ det"""
    if not is_unitary(g):
        raise ValueError("matrix is not unitary for the antidiagonal hermitian form")
    return kottwitz_norm_one(determinant(g))


def sign_element(n: int, p: int) -> SeriesMatrix:
    """n = 2m+1: 가운데 e_{m+1} ↦ -e_{m+1}"""
    if n % 2 == 0:
        raise ValueError(f"the sign element needs odd n, got {n}")
    middle = n // 2
    return series_matrix(
        p, [[(-1 if i == middle else 1) * int(i == j) for j in range(n)] for i in range(n)]
    )


def swap_element(n: int, p: int) -> SeriesMatrix:
    """n = 2m: e_m ↔ e_{m+1}"""
    if n % 2:
        raise ValueError(f"the swap element needs even n, got {n}")
    m = n // 2
    swap = {m - 1: m, m: m - 1}
    return series_matrix(p, [[int(swap.get(i, i) == j) for j in range(n)] for i in range(n)])


# π_1(G) 생성원 위의 관성 작용: 분기 이차 확장에서 켤레는 -1 로 작용한다
INERTIA_ON_PI1: Dict[str, Tuple[Tuple[int, ...], ...]] = {
    "gm": ((1,),),
    "norm1": ((-1,),),
    "un": ((-1,),),
    "sun": (),
}


def pi0_invariants(kind: str) -> Tuple[int, ...]:
    """π_0(LG) = π_1(G)_I 의 불변 인자 (0 은 Z 성분, 빈 튜플은 자명군)"""
    if kind not in INERTIA_ON_PI1:
        raise ValueError(f"unknown torus {kind!r}; expected one of {sorted(INERTIA_ON_PI1)}")
    action = INERTIA_ON_PI1[kind]
    rank = len(action)
    if not rank:
        return ()
    relation = Matrix(rank, rank, lambda i, j: int(i == j) - action[i][j])
    snf = smith_normal_form(relation, domain=ZZ)
    return tuple(f for f in (abs(int(snf[i, i])) for i in range(rank)) if f != 1)


def pi0_order(kind: str) -> int:
    """|π_0(LG)|, 자유 성분이 있으면 0"""
    order = 1
    for factor in pi0_invariants(kind):
        order *= factor
    return order


def kottwitz_special_unitary(g: SeriesMatrix) -> int:
    """SU_n: π_1(SU_n) = 0 이므로 항상 1"""
    if not (determinant(g) - 1).is_zero():
        raise ValueError("matrix does not have determinant 1")
    return kottwitz_unitary(g)


def kottwitz_image(kind: str, elements: Iterable) -> Set[int]:
    """원소들의 κ 값 집합 (π_0 크기와 비교하는 용도)"""
    return {invariant_of(kind, element) for element in elements}


def invariant_of(kind: str, element) -> int:
    """CLI 용 디스패치: gm | norm1 | un | sun"""
    if kind == "gm":
        return kottwitz_gm(element)
    if kind == "norm1":
        return kottwitz_norm_one(element)
    if kind == "un":
        return kottwitz_unitary(element)
    if kind == "sun":
        return kottwitz_special_unitary(element)
    raise ValueError(f"unknown torus {kind!r}; expected gm, norm1, un or sun")
