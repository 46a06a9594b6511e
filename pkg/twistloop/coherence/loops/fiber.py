"""순진한 국소 모형의 특수 올 열거

특수 올에서는 π' 가 멱영이므로 특성다항식 조건은 T^n 으로 퇴화하고
자동으로 성립한다. 남는 조건은 주기성, 포함, 쌍대성과 (선택) 쐐기 조건이다.
"""
import logging
import time
from typing import Iterable, List, Optional, Set, Tuple

from django.conf import settings

from ..admissible import adm, adm_Y
from ..exceptions import ResourceCapExceeded
from ..root_data import load_affine_datum
from ..schemas import FiberRecord
from ..weyl import length
from .cells import cell_points, lattice_node_dictionary, loop_group
from .lattices import (
    ChainIndex,
    HermitianLatticeChain,
    Lattice,
    attach_primed,
    gaussian_binomial,
    index_labels,
    sharp_indices,
    shell_lattices,
    validate_chain,
)
from .series import check_prime, monomial

logger = logging.getLogger(__name__)

Point = Tuple[Lattice, ...]


def _check_indices(n: int, indices: Iterable[ChainIndex]) -> Tuple[Tuple[int, ...], bool]:
    """I -> (I♯, m' ∈ I)"""
    sharp, primed = sharp_indices(n, indices)
    if not sharp:
        raise ValueError("the index set I must not be empty")
    if sharp[0] < 0 or sharp[-1] > n // 2:
        raise ValueError(f"indices {sharp} out of range 0..{n // 2}")
    return sharp, primed


def _wedge_excess(lattice: Lattice, j: int) -> int:
    """dim (L + λ_j) / λ_j"""
    standard = Lattice.standard(lattice.n, j, lattice.p)
    return (lattice + standard).index_over(standard)


def _self_dual_ok(lattice: Lattice, i: int) -> bool:
    if i == 0:
        return lattice == lattice.dual()
    if 2 * i == lattice.n:
        return lattice == lattice.dual().scaled(-1)
    return True


def _candidates(n: int, i: int, q: int, bound: Optional[int], check_nilpotent: bool) -> List[Lattice]:
    standard = Lattice.standard(n, i, q)
    found = []
    for lattice in shell_lattices(n, i, q):
        if check_nilpotent and not lattice.scaled(2) <= standard.scaled(1):
            raise ValueError(f"u does not act nilpotently on L_{i} / u·λ_{i}")
        if bound is not None and _wedge_excess(lattice, i) > bound:
            continue
        if _self_dual_ok(lattice, i):
            found.append(lattice)
    return found


def naive_points(
    n: int,
    r: int,
    s: int,
    q: int,
    indices: Iterable[ChainIndex],
    cap: Optional[int] = None,
    wedge: bool = True,
    check_nilpotent: bool = False,
) -> Set[Point]:
    """M^naive 특수 올의 F_q-점: I♯ 의 첨자 순서대로 나열한 격자 튜플

    m' ∈ I 이면 L_{m'} 을 튜플 끝에 붙인다. L_{m'} 은 I♯ 사슬이 정하므로 점 개수는 I♯ 와 같다.
    """
    if n < 1 or n > 4:
        raise ValueError(f"fiber enumeration supports n ≤ 4, got {n}")
    if r < 0 or s < 0 or r + s != n:
        raise ValueError(f"signature ({r}, {s}) must be nonnegative with r + s = n = {n}")
    check_prime(q)
    if q == 2:
        raise ValueError("fiber enumeration needs odd q")
    indices, primed = _check_indices(n, indices)
    if cap is None:
        cap = settings.TWISTLOOP["FIBER_CAP"]
    estimate = sum(gaussian_binomial(2 * n, n, q) for _ in indices)
    if estimate > cap:
        raise ResourceCapExceeded(
            "FIBER_CAP", cap, f"{estimate} candidate subspaces exceed FIBER_CAP={cap}"
        )

    bound = min(r, s) if wedge else None
    candidates = [_candidates(n, i, q, bound, check_nilpotent) for i in indices]
    combinations = 1
    for found in candidates:
        combinations *= len(found)
    if combinations > cap:
        raise ResourceCapExceeded(
            "FIBER_CAP", cap, f"{combinations} lattice tuples exceed FIBER_CAP={cap}"
        )

    points: Set[Point] = set()

    def extend(chosen: List[Lattice]):
        depth = len(chosen)
        if depth == len(indices):
            chain = HermitianLatticeChain(n, q, indices, tuple(chosen), "unitary")
            if not validate_chain(chain):
                return
            if primed:
                chain = attach_primed(chain)
                if not validate_chain(chain):
                    return
            if bound is not None:
                for j in chain.all_indices():
                    if _wedge_excess(chain.lattice(j), j) > bound:
                        return
            points.add(tuple(chosen) + ((chain.primed,) if primed else ()))
            return
        for lattice in candidates[depth]:
            if chosen and not chosen[-1] <= lattice:
                continue
            extend(chosen + [lattice])

    extend([])
    return points


def enumerate_fiber(
    n: int,
    r: int,
    s: int,
    q: int,
    indices: Iterable[ChainIndex],
    cap: Optional[int] = None,
    wedge: bool = True,
    check_nilpotent: bool = False,
) -> FiberRecord:
    """점 개수, 허용 집합 셀 개수, 셀 포함 여부"""
    started = time.monotonic()
    requested = tuple(indices)
    indices, primed = _check_indices(n, requested)
    points = naive_points(n, r, s, q, requested, cap, wedge, check_nilpotent)

    adm_count = None
    contains = None
    if n == 3:
        group = loop_group("su3")
        dictionary = lattice_node_dictionary(group)
        mu = (1,) * r + (0,) * s
        saturated = adm_Y(adm(load_affine_datum(group.datum_name), mu), {dictionary[i] for i in indices})
        adm_count = sum(q ** length(v) for v in saturated.mod_right)
        contains = all(
            chain.restrict(indices) in points
            for v in saturated.mod_right
            for chain in cell_points(group, v, q, cap)
        )
    else:
        logger.debug(f"admissible comparison is only available for n = 3, skipped for n = {n}")

    record = FiberRecord(
        n=n,
        r=r,
        s=s,
        q=q,
        indices=index_labels(n, indices, primed),
        wedge=wedge,
        naive_count=len(points),
        adm_count=adm_count,
        contains_admissible=contains,
        elapsed=time.monotonic() - started,
    )
    if adm_count is not None and len(points) < adm_count:
        logger.warning(
            f"fiber {record.label()}: naive count {len(points)} below admissible count {adm_count}"
        )
    logger.info(
        f"fiber {record.label()}: naive={len(points)} adm={adm_count} "
        f"contains={contains} in {record.elapsed:.3f}s"
    )
    return record


def _upper_neighbours(lattice: Lattice) -> List[Lattice]:
    """L ⊂ M ⊂ u^{-1}L, dim M/L = 1"""
    p = lattice.p
    basis = lattice.basis()
    found = []
    for x, y in [(1, c) for c in range(p)] + [(0, 1)]:
        vector = tuple((a * x + b * y) * monomial(p, -1) for a, b in zip(*basis))
        found.append(Lattice.from_generators(lattice.n, p, list(basis) + [vector], lattice.hi))
    return found


def _lower_neighbours(lattice: Lattice) -> List[Lattice]:
    """uL ⊂ M ⊂ L, dim L/M = 1"""
    p = lattice.p
    basis = lattice.basis()
    u = monomial(p, 1)
    shifted = [tuple(entry * u for entry in vector) for vector in basis]
    found = []
    for x, y in [(1, c) for c in range(p)] + [(0, 1)]:
        vector = tuple(a * x + b * y for a, b in zip(*basis))
        found.append(Lattice.from_generators(lattice.n, p, shifted + [vector], lattice.hi + 1))
    return found


def split_flag_points(q: int, center: int = 0) -> Set[Point]:
    """SL_2 의 완전 깃발 (L_0, L_1) 중 L_center 가 λ_center 의 반지름 1 껍질에 있는 것 전체

    center = 0 이면 s1·s0·s1 아래 셀들의 합집합, center = 1 이면 s0·s1·s0 아래와 같다.
    """
    check_prime(q)
    if center not in (0, 1):
        raise ValueError(f"center must be 0 or 1, got {center}")
    points: Set[Point] = set()
    for lattice in shell_lattices(2, center, q):
        if center == 0:
            points.update((lattice, upper) for upper in _upper_neighbours(lattice))
        else:
            points.update((lower, lattice) for lower in _lower_neighbours(lattice))
    logger.debug(f"SL_2 flags around λ_{center} over F_{q}: {len(points)}")
    return points

