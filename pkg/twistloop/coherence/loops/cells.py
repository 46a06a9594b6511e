import logging
import re
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from django.conf import settings

from ..exceptions import ResourceCapExceeded
from ..root_data import FiniteRootDatum, echelon_system, load_affine_datum
from ..weyl import ExtAffineWeylElement, bruhat_interval, from_word, identity, length, reduced_word
from .kottwitz import is_unitary
from .lattices import HermitianLatticeChain, standard_chain
from .series import SeriesMatrix, check_prime, determinant, matrix_identity, matrix_product, series_matrix

logger = logging.getLogger(__name__)

_SPLIT_NAME = re.compile(r"^sl([2-4])$")

Word = Sequence[int]


@dataclass(frozen=True)
class LoopGroup:
    """셀 생성을 지원하는 루프 군: 분할 SL_n (n ≤ 4) 과 분기 SU_3"""

    name: str
    n: int
    datum_name: str
    ramified: bool

    @property
    def chain_mode(self) -> str:
        return "special_unitary" if self.ramified else "split"

    @property
    def chain_indices(self) -> Tuple[int, ...]:
        if self.ramified:
            return tuple(range(self.n // 2 + 1))
        return tuple(range(self.n))


def loop_group(name: str) -> LoopGroup:
    """'sl2' | 'sl3' | 'sl4' | 'su3'"""
    key = name.strip().lower()
    match = _SPLIT_NAME.match(key)
    if match:
        n = int(match[1])
        return LoopGroup(key, n, f"A(1)_{n - 1}", False)
    if key == "su3":
        return LoopGroup(key, 3, "A(2)_2", True)
    raise ValueError(f"unsupported group {name!r}; expected sl2, sl3, sl4 or su3")


def group_system(group: LoopGroup) -> FiniteRootDatum:
    return echelon_system(load_affine_datum(group.datum_name), 0)


def lattice_node_dictionary(group: LoopGroup) -> Dict[int, int]:
    """격자 첨자 i -> λ_i 를 안정화하지 않는 유일한 단순 반사의 노드"""
    if not group.ramified:
        return {i: i for i in range(group.n)}
    # A(2)_2: 노드 0 (κ = 2) 은 상수 행렬, 노드 1 은 u 를 품은 반사
    return {0: 1, 1: 0}


def _check_field(group: LoopGroup, p: int) -> None:
    check_prime(p)
    if group.ramified and p == 2:
        raise ValueError("ramified SU_3 needs odd q")


def _checked(group: LoopGroup, g: SeriesMatrix, label: str) -> SeriesMatrix:
    if determinant(g).terms() != {0: 1}:
        raise ValueError(f"{label} of {group.name} does not have determinant 1")
    if group.ramified and not is_unitary(g):
        raise ValueError(f"{label} of {group.name} is not unitary")
    return g


def _check_node(group: LoopGroup, node: int) -> None:
    nodes = range(2) if group.ramified else range(group.n)
    if node not in nodes:
        raise ValueError(f"{group.name} has no node {node}")


@lru_cache(maxsize=None)
def root_subgroup(group: LoopGroup, node: int, c: int, p: int) -> Tuple[SeriesMatrix, SeriesMatrix]:
    """아핀 근 부분군 U_{α_node}(c) 와 그 역원"""
    _check_node(group, node)
    _check_field(group, p)
    n = group.n

    def unipotent(value: int) -> SeriesMatrix:
        rows: List[List] = [[int(i == j) for j in range(n)] for i in range(n)]
        if group.ramified and node == 0:
            # x(r, r²/2): r ↦ (r, r²/2) 가 군 준동형이 되도록 고른 매개화
            half = value * value * pow(2, -1, p) % p
            rows[0][1], rows[0][2], rows[1][2] = -value, -half, value
        elif group.ramified:
            rows[2][0] = {1: -value}
        elif node == 0:
            rows[n - 1][0] = {1: value}
        else:
            rows[node - 1][node] = value
        return series_matrix(p, rows)

    g = _checked(group, unipotent(c), f"U_{node}({c})")
    return g, unipotent(-c)


@lru_cache(maxsize=None)
def reflection_matrix(group: LoopGroup, node: int, p: int) -> Tuple[SeriesMatrix, SeriesMatrix]:
    """단순 반사 s_node 의 대표 ṡ 와 그 역원"""
    _check_node(group, node)
    _check_field(group, p)
    n = group.n
    rows: List[List] = [[int(i == j) for j in range(n)] for i in range(n)]
    inverse: List[List] = [[int(i == j) for j in range(n)] for i in range(n)]
    if group.ramified and node == 0:
        rows = [[0, 0, 1], [0, -1, 0], [1, 0, 0]]
        inverse = [list(row) for row in rows]
    elif group.ramified:
        rows[0][0] = rows[2][2] = inverse[0][0] = inverse[2][2] = 0
        rows[2][0], rows[0][2] = {1: -1}, {-1: 1}
        inverse[2][0], inverse[0][2] = {1: 1}, {-1: -1}
    elif node == 0:
        # e_1 ↦ u·e_n, e_n ↦ -u^{-1}·e_1
        last = n - 1
        rows[0][0] = rows[last][last] = inverse[0][0] = inverse[last][last] = 0
        rows[last][0], rows[0][last] = {1: 1}, {-1: -1}
        inverse[last][0], inverse[0][last] = {1: -1}, {-1: 1}
    else:
        # e_i ↦ -e_{i+1}, e_{i+1} ↦ e_i
        a, b = node - 1, node
        rows[a][a] = rows[b][b] = inverse[a][a] = inverse[b][b] = 0
        rows[b][a], rows[a][b] = -1, 1
        inverse[b][a], inverse[a][b] = 1, -1
    g = _checked(group, series_matrix(p, rows), f"s_{node}")
    return g, series_matrix(p, inverse)


def _reduced(group: LoopGroup, w: Union[ExtAffineWeylElement, Word]) -> Tuple[int, ...]:
    if isinstance(w, ExtAffineWeylElement):
        if w.system.affine.name != group.datum_name:
            raise ValueError(f"element of {w.system.affine.name} does not belong to {group.name}")
        word, tau = reduced_word(w)
        if tau != identity(w.system):
            raise ValueError("cell generation needs an element of W_a")
        return word
    word = tuple(w)
    if length(from_word(group_system(group), word)) != len(word):
        raise ValueError(f"word {'.'.join(f's{i}' for i in word)} is not reduced")
    return word


def cell_elements(
    group: LoopGroup, w: Union[ExtAffineWeylElement, Word], q: int, cap: Optional[int] = None
) -> Iterator[Tuple[SeriesMatrix, SeriesMatrix]]:
    """U_{i_1}(x_1)·ṡ_{i_1}·…·U_{i_r}(x_r)·ṡ_{i_r} 와 그 역원 (x_t ∈ F_q)"""
    _check_field(group, q)
    word = _reduced(group, w)
    if cap is None:
        cap = settings.TWISTLOOP["FIBER_CAP"]
    if q ** len(word) > cap:
        raise ResourceCapExceeded(
            "FIBER_CAP", cap, f"cell of length {len(word)} has {q ** len(word)} points over F_{q}"
        )
    unit = matrix_identity(group.n, q)

    def descend(depth: int, g: SeriesMatrix, g_inverse: SeriesMatrix):
        if depth == len(word):
            yield g, g_inverse
            return
        node = word[depth]
        s, s_inverse = reflection_matrix(group, node, q)
        for c in range(q):
            x, x_inverse = root_subgroup(group, node, c, q)
            yield from descend(
                depth + 1,
                matrix_product(g, matrix_product(x, s)),
                matrix_product(matrix_product(s_inverse, x_inverse), g_inverse),
            )

    yield from descend(0, unit, unit)


def cell_points(
    group: LoopGroup, w: Union[ExtAffineWeylElement, Word], q: int, cap: Optional[int] = None
) -> List[HermitianLatticeChain]:
    """Schubert 셀의 F_q-점: 원소들이 표준 사슬을 옮긴 상"""
    started = time.monotonic()
    base = standard_chain(group.n, group.chain_indices, q, group.chain_mode)
    points = [base.apply(g, g_inverse) for g, g_inverse in cell_elements(group, w, q, cap)]
    logger.debug(f"{group.name} cell over F_{q}: {len(points)} points in {time.monotonic() - started:.3f}s")
    return points


def schubert_count(
    w: ExtAffineWeylElement, q: int, modulo: Iterable[int] = (), cap: Optional[int] = None
) -> int:
    """Σ_{v ≤ w, v 는 잉여류 최소} q^{l(v)}"""
    check_prime(q)
    interval = bruhat_interval([w], modulo_right=modulo, cap=cap)
    return sum(q ** length(v) for v in interval.elements)
