import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from django.conf import settings

from .admissible import adm, adm_Y
from .exceptions import ResourceCapExceeded
from .root_data import AffineRootDatum, FiniteRootDatum, pairing
from .weyl import (
    BruhatGraph,
    ExtAffineWeylElement,
    all_nodes,
    bruhat_interval,
    finite_weyl_group,
    length,
    omega_permutation,
    parabolic_min,
    reduced_word,
    word_spec,
)

logger = logging.getLogger(__name__)

Weight = Tuple[int, ...]
# σ → τ → 사슬 gcd 집합 (gcd 1 인 사슬은 자르는 점이 없어 버린다)
ChainTable = Dict[ExtAffineWeylElement, Dict[ExtAffineWeylElement, FrozenSet[int]]]


@dataclass(frozen=True)
class LSPath:
    """모양 λ 의 LS 경로 (σ_1 > … > σ_s ; 0 = a_0 < … < a_s = 1)"""

    shape: Weight
    directions: Tuple[ExtAffineWeylElement, ...]
    cuts: Tuple[Fraction, ...]

    @property
    def initial_direction(self) -> ExtAffineWeylElement:
        return self.directions[0]

    def to_line(self) -> str:
        words = " > ".join(word_spec(sigma) for sigma in self.directions)
        cuts = ", ".join(str(a) for a in self.cuts[1:])
        return f"({words}; {cuts})"


def shape_weight(
    datum: AffineRootDatum,
    y_nodes: Iterable[int],
    a: int,
    permutation: Optional[Dict[int, int]] = None,
) -> Weight:
    """a·Σ_{i ∈ Y°} κ(i)ε_i, Y° 는 permutation 에 의한 Y 의 상 (없으면 Y)"""
    y_nodes = frozenset(y_nodes)
    if not y_nodes:
        raise ValueError("Y must be a nonempty set of nodes")
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    unknown = y_nodes - set(datum.nodes)
    if unknown:
        raise ValueError(f"unknown nodes {sorted(unknown)} for {datum.name}")
    y_circ = {permutation[i] for i in y_nodes} if permutation else y_nodes
    return tuple(a * datum.kappa[i] if i in y_circ else 0 for i in datum.nodes)


def stabilizer_nodes(system: FiniteRootDatum, shape: Sequence[int]) -> FrozenSet[int]:
    """W_λ 의 생성 노드 {i : n_i = 0}"""
    if len(shape) != len(all_nodes(system)):
        raise ValueError(
            f"shape has {len(shape)} entries, {system.affine.name} has {len(all_nodes(system))} nodes"
        )
    if any(n < 0 for n in shape):
        raise ValueError(f"shape {tuple(shape)} is not dominant")
    return frozenset(i for i, n in zip(all_nodes(system), shape) if n == 0)


def path_graph(
    system: FiniteRootDatum,
    shape: Sequence[int],
    tops: Iterable[ExtAffineWeylElement],
    cap: Optional[int] = None,
) -> BruhatGraph:
    """tops 아래 W_a/W_λ 의 Bruhat 그래프"""
    stabilizer = stabilizer_nodes(system, shape)
    if stabilizer == frozenset(all_nodes(system)):
        raise ValueError("shape must have positive level")
    return bruhat_interval(tops, modulo_right=stabilizer, cap=cap)


def cover_pairing(shape: Sequence[int], label) -> int:
    """⟨κλ, β^∨⟩ = ⟨λ, κ^{-1}β^∨⟩, κ 는 덮개의 아래 원소"""
    return abs(int(pairing(shape, label.frame_coroot)))


def chain_gcds(graph: BruhatGraph, shape: Sequence[int]) -> ChainTable:
    """모든 하강 사슬 σ → τ 의 짝 gcd (gcd > 1 만)"""
    table: ChainTable = {}
    for sigma in sorted(graph.graph.nodes, key=length):
        below: Dict[ExtAffineWeylElement, Set[int]] = {}
        for kappa, label in graph.lower_covers(sigma):
            n = cover_pairing(shape, label)
            if n == 0:
                raise ValueError(f"cover {word_spec(kappa)} < {word_spec(sigma)} pairs to zero")
            if n > 1:
                below.setdefault(kappa, set()).add(n)
            for tau, values in table[kappa].items():
                reduced = {gcd(n, g) for g in values} - {1}
                if reduced:
                    below.setdefault(tau, set()).update(reduced)
        table[sigma] = {tau: frozenset(values) for tau, values in below.items()}
    return table


def exhaustive_chain_gcds(
    graph: BruhatGraph,
    shape: Sequence[int],
    sigma: ExtAffineWeylElement,
    tau: ExtAffineWeylElement,
) -> FrozenSet[int]:
    """σ 에서 τ 로 가는 모든 사슬을 직접 나열한 gcd 집합 (느린 기준 구현)"""
    found = set()

    def descend(current, value):
        if current == tau:
            found.add(value)
            return
        if length(current) <= length(tau):
            return
        for kappa, label in graph.lower_covers(current):
            descend(kappa, gcd(value, cover_pairing(shape, label)))

    for kappa, label in graph.lower_covers(sigma):
        descend(kappa, cover_pairing(shape, label))
    return frozenset(found)


def valid_cuts(gcds: Iterable[int]) -> Tuple[Fraction, ...]:
    """0 < a < 1 이고 a·g ∈ Z 인 a 들"""
    cuts = {Fraction(k, g) for g in gcds for k in range(1, g)}
    return tuple(sorted(cuts))


def _normalize(
    system: FiniteRootDatum, shape: Sequence[int], allowed: Iterable[ExtAffineWeylElement]
) -> List[ExtAffineWeylElement]:
    stabilizer = stabilizer_nodes(system, shape)
    reps = {parabolic_min(w, (), stabilizer) for w in allowed}
    if not reps:
        raise ValueError("allowed initial directions must be nonempty")
    return sorted(reps, key=lambda w: (length(w), reduced_word(w)[0]))


def count_ls_paths(
    system: FiniteRootDatum,
    shape: Sequence[int],
    allowed_initial: Iterable[ExtAffineWeylElement],
    cap: Optional[int] = None,
) -> int:
    """초기 방향이 allowed_initial 에 있는 LS 경로 수"""
    allowed = _normalize(system, shape, allowed_initial)
    graph = path_graph(system, shape, allowed, cap)
    table = chain_gcds(graph, shape)
    cuts = {
        sigma: {tau: valid_cuts(values) for tau, values in below.items()}
        for sigma, below in table.items()
    }
    memo: Dict[Tuple[ExtAffineWeylElement, Fraction], int] = {}

    def tails(sigma, previous):
        key = (sigma, previous)
        if key not in memo:
            total = 1
            for tau, points in cuts[sigma].items():
                for a in points:
                    if a > previous:
                        total += tails(tau, a)
            memo[key] = total
        return memo[key]

    return sum(tails(sigma, Fraction(0)) for sigma in allowed)


def ls_paths_constrained(
    system: FiniteRootDatum,
    shape: Sequence[int],
    allowed_initial: Iterable[ExtAffineWeylElement],
    cap: Optional[int] = None,
) -> List[LSPath]:
    """초기 방향이 allowed_initial 에 있는 LS 경로 전체"""
    if cap is None:
        cap = settings.TWISTLOOP["INTERVAL_CAP"]
    shape = tuple(shape)
    allowed = _normalize(system, shape, allowed_initial)
    graph = path_graph(system, shape, allowed, cap)
    table = chain_gcds(graph, shape)
    paths: List[LSPath] = []

    def extend(directions, cuts):
        paths.append(LSPath(shape, tuple(directions), tuple(cuts) + (Fraction(1),)))
        if len(paths) > cap:
            raise ResourceCapExceeded("INTERVAL_CAP", cap, f"more than {cap} LS paths")
        sigma = directions[-1]
        below = sorted(table[sigma].items(), key=lambda item: (length(item[0]), reduced_word(item[0])[0]))
        for tau, values in reversed(below):
            for a in valid_cuts(values):
                if a > cuts[-1]:
                    extend(directions + [tau], cuts + [a])

    for sigma in allowed:
        extend([sigma], [Fraction(0)])
    return paths


def _chain_exists(
    graph: BruhatGraph,
    shape: Sequence[int],
    upper: ExtAffineWeylElement,
    lower: ExtAffineWeylElement,
    a: Fraction,
) -> bool:
    if upper == lower:
        return True
    if length(upper) <= length(lower):
        return False
    for kappa, label in graph.lower_covers(upper):
        if (a * cover_pairing(shape, label)).denominator != 1:
            continue
        if _chain_exists(graph, shape, kappa, lower, a):
            return True
    return False


def is_ls_path(
    system: FiniteRootDatum, candidate: LSPath, graph: Optional[BruhatGraph] = None
) -> bool:
    """각 인접 방향 쌍 사이에 a_j-사슬이 있는지"""
    directions, cuts = candidate.directions, candidate.cuts
    if not directions or len(cuts) != len(directions) + 1:
        return False
    if cuts[0] != 0 or cuts[-1] != 1:
        return False
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        return False
    stabilizer = stabilizer_nodes(system, candidate.shape)
    if any(parabolic_min(sigma, (), stabilizer) != sigma for sigma in directions):
        return False
    if graph is None:
        graph = path_graph(system, candidate.shape, [directions[0]])
    for j in range(len(directions) - 1):
        upper, lower = directions[j], directions[j + 1]
        if upper not in graph or lower not in graph:
            return False
        if length(lower) >= length(upper):
            return False
        if not _chain_exists(graph, candidate.shape, upper, lower, cuts[j + 1]):
            return False
    return True


def count_h_Y(
    datum: AffineRootDatum,
    mu: Sequence[int],
    y_nodes: Iterable[int],
    a: int,
    x: Optional[int] = None,
    cap: Optional[int] = None,
) -> int:
    """h^(μ)_Y(a): 초기 방향이 Adm^Y(μ)°/W^{Y°} 에 있는 LS 경로 수"""
    started = time.monotonic()
    y_nodes = frozenset(y_nodes)
    adm_set = adm(datum, mu, x=x, cap=cap)
    saturated = adm_Y(adm_set, y_nodes, cap=cap)
    shape = shape_weight(datum, y_nodes, a, omega_permutation(adm_set.tau))
    count = count_ls_paths(adm_set.system, shape, saturated.mod_right, cap)
    logger.info(
        f"h_Y({datum.name}, mu={tuple(mu)}, Y={sorted(y_nodes)}, a={a}) = {count} "
        f"from {len(saturated.mod_right)} initial cosets in {time.monotonic() - started:.3f}s"
    )
    return count


def count_finite_paths(system: FiniteRootDatum, weight: Sequence[int]) -> int:
    """W_0/W_λ 위의 LS 경로 수 (유한형 보정용, 지표 항등식으로 weyl_dim 과 같다)"""
    if len(weight) != system.rank:
        raise ValueError(f"weight has {len(weight)} entries, rank is {system.rank}")
    if any(n < 0 for n in weight):
        raise ValueError(f"weight {tuple(weight)} is not dominant")
    if not any(weight):
        return 1
    values = dict(zip(system.nodes, weight))
    shape = tuple(values.get(i, 0) for i in all_nodes(system))
    return count_ls_paths(system, shape, finite_weyl_group(system))
