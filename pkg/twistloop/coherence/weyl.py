import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from django.conf import settings
from sympy import Matrix

from .exceptions import ResourceCapExceeded
from .root_data import FiniteRootDatum, IntMatrix, Vector, reflect_coroot, reflect_root

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtAffineWeylElement:
    """W(^xΣ)⋉P^∨(^xΣ) 의 원소 t_λ·w0

    V-좌표 위의 아핀 변환 v ↦ matrix·v + translation 으로 저장한다.
    """

    system: FiniteRootDatum
    matrix: IntMatrix
    translation: Vector

    def __mul__(self, other: "ExtAffineWeylElement") -> "ExtAffineWeylElement":
        if other.system is not self.system:
            raise ValueError("elements belong to different root systems")
        n = len(self.translation)
        m, b = self.matrix, self.translation
        matrix = tuple(
            tuple(sum(m[i][k] * other.matrix[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        translation = tuple(
            sum(m[i][k] * other.translation[k] for k in range(n)) + b[i] for i in range(n)
        )
        return ExtAffineWeylElement(self.system, matrix, translation)

    def inverse(self) -> "ExtAffineWeylElement":
        return _inverse(self)

    def act(self, v: Sequence) -> Tuple[Fraction, ...]:
        n = len(self.translation)
        return tuple(
            sum((self.matrix[i][k] * Fraction(v[k]) for k in range(n)), Fraction(0))
            + self.translation[i]
            for i in range(n)
        )

    @property
    def finite_part(self) -> "ExtAffineWeylElement":
        return ExtAffineWeylElement(self.system, self.matrix, (0,) * len(self.translation))

    @property
    def is_finite(self) -> bool:
        return not any(self.translation)

    def __repr__(self) -> str:
        return f"<{to_spec(self)}>"


@lru_cache(maxsize=None)
def _inverse(w: ExtAffineWeylElement) -> ExtAffineWeylElement:
    inv = Matrix(w.matrix).inv()
    n = len(w.translation)
    matrix = tuple(tuple(int(inv[i, j]) for j in range(n)) for i in range(n))
    translation = tuple(
        -sum(matrix[i][k] * w.translation[k] for k in range(n)) for i in range(n)
    )
    return ExtAffineWeylElement(w.system, matrix, translation)


def identity(system: FiniteRootDatum) -> ExtAffineWeylElement:
    n = system.rank
    return ExtAffineWeylElement(
        system, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (0,) * n
    )


@lru_cache(maxsize=None)
def simple_reflection(system: FiniteRootDatum, node: int) -> ExtAffineWeylElement:
    """아핀 단순 반사 s_i (Kac 번호)"""
    n = system.rank
    datum = system.affine
    if node == system.special:
        # 벽 α_x(v) = (1 - Σ a_i v_i) / a_x = 0 에 대한 반사
        ax = datum.marks[node]
        c = [datum.cartan[node][j] for j in system.nodes]
        a = [datum.marks[j] for j in system.nodes]
        entries = [
            [Fraction(int(i == j)) + Fraction(c[i] * a[j], ax) for j in range(n)]
            for i in range(n)
        ]
        shift = [Fraction(-c[i], ax) for i in range(n)]
        if any(e.denominator != 1 for row in entries for e in row) or any(
            s.denominator != 1 for s in shift
        ):
            raise ValueError(f"s_{node} of {datum.name} is not integral in V-coordinates")
        return ExtAffineWeylElement(
            system,
            tuple(tuple(int(e) for e in row) for row in entries),
            tuple(int(s) for s in shift),
        )
    if node not in system.nodes:
        raise ValueError(f"{datum.name} has no node {node}")
    p = system.nodes.index(node)
    fc = system.finite_cartan
    matrix = tuple(
        tuple(int(i == j) - int(j == p) * fc[p][i] for j in range(n)) for i in range(n)
    )
    return ExtAffineWeylElement(system, matrix, (0,) * n)


def all_nodes(system: FiniteRootDatum) -> Tuple[int, ...]:
    return system.affine.nodes


def translation_element(system: FiniteRootDatum, lam: Sequence[int]) -> ExtAffineWeylElement:
    return make_element(identity(system), lam)


def make_element(w0: ExtAffineWeylElement, lam: Sequence[int]) -> ExtAffineWeylElement:
    """정규형 t_λ·w0 (평행이동을 왼쪽에)"""
    system = w0.system
    if not w0.is_finite:
        raise ValueError("finite part carries a translation")
    if len(lam) != system.rank:
        raise ValueError(
            f"lattice mismatch: λ has {len(lam)} entries, rank is {system.rank}"
        )
    values = [Fraction(c) for c in lam]
    if any(v.denominator != 1 for v in values) or not system.contains_coweight(
        [int(v) for v in values]
    ):
        raise ValueError(f"lattice mismatch: {tuple(lam)} is not in P^v")
    return ExtAffineWeylElement(system, w0.matrix, tuple(int(v) for v in values))


def _denominator(system: FiniteRootDatum) -> int:
    return 1 + sum(system.affine.marks[i] for i in system.nodes)


def _scaled_image(w: ExtAffineWeylElement) -> Tuple[int, ...]:
    """D·w(p), p = (1/D, …, 1/D) 는 기본 알코브 내부"""
    d = _denominator(w.system)
    return tuple(sum(row) + d * b for row, b in zip(w.matrix, w.translation))


@lru_cache(maxsize=None)
def length(w: ExtAffineWeylElement) -> int:
    """기본 알코브와 w 알코브를 가르는 벽의 수"""
    system = w.system
    d = _denominator(system)
    image = _scaled_image(w)
    total = 0
    for root, scale in zip(system.positive_roots, system.root_scales):
        value = sum(r * x for r, x in zip(root, image))
        total += abs(value // (scale * d))
    return total


@lru_cache(maxsize=None)
def left_descents(w: ExtAffineWeylElement) -> Tuple[int, ...]:
    system = w.system
    datum = system.affine
    d = _denominator(system)
    image = _scaled_image(w)
    found = [node for node, value in zip(system.nodes, image) if value < 0]
    x = system.special
    if d - sum(datum.marks[i] * value for i, value in zip(system.nodes, image)) < 0:
        found.append(x)
    return tuple(sorted(found))


def right_descents(w: ExtAffineWeylElement) -> Tuple[int, ...]:
    return left_descents(w.inverse())


@lru_cache(maxsize=None)
def reduced_word(w: ExtAffineWeylElement) -> Tuple[Tuple[int, ...], ExtAffineWeylElement]:
    """가장 작은 왼쪽 하강을 반복해 떼어낸 축약 단어와 Ω 성분"""
    word: List[int] = []
    current = w
    while True:
        descents = left_descents(current)
        if not descents:
            break
        node = descents[0]
        word.append(node)
        current = simple_reflection(w.system, node) * current
    return tuple(word), current


def from_word(system: FiniteRootDatum, word: Iterable[int]) -> ExtAffineWeylElement:
    element = identity(system)
    for node in word:
        element = element * simple_reflection(system, node)
    return element


def omega_component(w: ExtAffineWeylElement) -> Tuple[int, ...]:
    """P^∨/Q^∨ 에서의 류"""
    return w.system.omega_class(w.translation)


@lru_cache(maxsize=None)
def omega_elements(system: FiniteRootDatum) -> Tuple[ExtAffineWeylElement, ...]:
    """길이 0 원소 전체, Ω 류 순서"""
    generators = [
        reduced_word(translation_element(system, row))[1] for row in system.coweight_lattice
    ]
    found = {identity(system)}
    frontier = list(found)
    while frontier:
        following = []
        for tau in frontier:
            for g in generators:
                product = tau * g
                if product not in found:
                    found.add(product)
                    following.append(product)
        frontier = following
    if len(found) != system.omega_order:
        raise ValueError(f"found {len(found)} length-zero elements, expected {system.omega_order}")
    return tuple(sorted(found, key=omega_component))


@lru_cache(maxsize=None)
def omega_permutation(tau: ExtAffineWeylElement) -> Dict[int, int]:
    """τ·s_i·τ^{-1} = s_j 인 노드 순열 i ↦ j"""
    if length(tau) != 0:
        raise ValueError(f"{to_spec(tau)} has positive length")
    system = tau.system
    reflections = {simple_reflection(system, i): i for i in all_nodes(system)}
    permutation = {}
    for i in all_nodes(system):
        conjugate = tau * simple_reflection(system, i) * tau.inverse()
        if conjugate not in reflections:
            raise ValueError(f"conjugation by {to_spec(tau)} does not preserve simple reflections")
        permutation[i] = reflections[conjugate]
    return permutation


@lru_cache(maxsize=None)
def finite_weyl_group(system: FiniteRootDatum) -> Tuple[ExtAffineWeylElement, ...]:
    """W_0 전체, (길이, 단어) 순"""
    gens = [simple_reflection(system, i) for i in system.nodes]
    found = {identity(system)}
    frontier = list(found)
    while frontier:
        following = []
        for w in frontier:
            for s in gens:
                product = s * w
                if product not in found:
                    found.add(product)
                    following.append(product)
        frontier = following
    return tuple(sorted(found, key=lambda w: (length(w), reduced_word(w)[0])))


def longest_finite_element(system: FiniteRootDatum) -> ExtAffineWeylElement:
    return finite_weyl_group(system)[-1]


def finite_orbit(system: FiniteRootDatum, lam: Sequence[int]) -> List[Tuple[int, ...]]:
    """λ 의 W_0 궤도 (정렬)"""
    n = system.rank
    orbit = {
        tuple(sum(w.matrix[i][k] * lam[k] for k in range(n)) for i in range(n))
        for w in finite_weyl_group(system)
    }
    return sorted(orbit)


def bruhat_leq(v: ExtAffineWeylElement, w: ExtAffineWeylElement) -> bool:
    """Ω 성분이 같고 W_a 부분이 Bruhat 순서로 비교될 때 참"""
    if v.system is not w.system:
        return False
    if omega_component(v) != omega_component(w):
        return False
    return _leq(v, w)


@lru_cache(maxsize=None)
def _leq(v: ExtAffineWeylElement, w: ExtAffineWeylElement) -> bool:
    lv, lw = length(v), length(w)
    if lv > lw:
        return False
    if lw == 0:
        return v == w
    node = left_descents(w)[0]
    s = simple_reflection(w.system, node)
    if node in left_descents(v):
        return _leq(s * v, s * w)
    return _leq(v, s * w)


def demazure_product(v: ExtAffineWeylElement, w: ExtAffineWeylElement) -> ExtAffineWeylElement:
    """0-Hecke 곱 v ∗ w

    w 의 축약 단어를 왼쪽부터 붙이되, 이미 오른쪽 하강인 반사는 건너뛴다.
    Ω 성분은 그대로 곱한다.
    """
    if v.system is not w.system:
        raise ValueError("elements come from different root systems")
    word, tau = reduced_word(w)
    current = v
    for node in word:
        if node not in right_descents(current):
            current = current * simple_reflection(v.system, node)
    return current * tau


def demazure_word(system: FiniteRootDatum, word: Iterable[int]) -> ExtAffineWeylElement:
    """단어 (축약이 아니어도 됨) 의 Demazure 곱, 부분 단어 곱 중 Bruhat 최대"""
    current = identity(system)
    for node in word:
        if node not in system.affine.nodes:
            raise ValueError(f"unknown node {node}")
        if node not in right_descents(current):
            current = current * simple_reflection(system, node)
    return current


def parabolic_min(
    w: ExtAffineWeylElement, left: Iterable[int] = (), right: Iterable[int] = ()
) -> ExtAffineWeylElement:
    """W_left·w·W_right 의 최소 길이 원소"""
    left, right = frozenset(left), frozenset(right)
    system = w.system
    current = w
    changed = True
    while changed:
        changed = False
        for node in left_descents(current):
            if node in left:
                current = simple_reflection(system, node) * current
                changed = True
                break
        if changed:
            continue
        for node in right_descents(current):
            if node in right:
                current = current * simple_reflection(system, node)
                changed = True
                break
    return current


def complement(system: FiniteRootDatum, nodes: Iterable[int]) -> FrozenSet[int]:
    """W^Y = W_{S-Y} 의 생성 노드"""
    nodes = frozenset(nodes)
    unknown = nodes - set(all_nodes(system))
    if unknown:
        raise ValueError(f"unknown nodes {sorted(unknown)} for {system.affine.name}")
    return frozenset(all_nodes(system)) - nodes


def coset_min(
    w: ExtAffineWeylElement, y_left: Iterable[int], y_right: Iterable[int]
) -> ExtAffineWeylElement:
    """W^{Y_left}·w·W^{Y_right} 의 최소 원소 (W^Y = W_{S-Y})"""
    system = w.system
    return parabolic_min(w, complement(system, y_left), complement(system, y_right))


def is_right_minimal(w: ExtAffineWeylElement, generators: Iterable[int]) -> bool:
    return not set(right_descents(w)) & set(generators)


def _permute(vector: Sequence[int], permutation: Dict[int, int], inverse: bool = False) -> tuple:
    image = [0] * len(vector)
    for i, j in permutation.items():
        if inverse:
            image[i] = vector[j]
        else:
            image[j] = vector[i]
    return tuple(image)


def act_on_affine_root(w: ExtAffineWeylElement, root: Sequence[int]) -> Tuple[int, ...]:
    """아핀 단순근 좌표 (Kac 번호) 의 실근에 w 작용"""
    cartan = w.system.affine.cartan
    word, tau = reduced_word(w)
    image = _permute(root, omega_permutation(tau))
    for node in reversed(word):
        image = reflect_root(cartan, node, image)
    return image


def act_on_affine_coroot(w: ExtAffineWeylElement, coroot: Sequence[int]) -> Tuple[int, ...]:
    cartan = w.system.affine.cartan
    word, tau = reduced_word(w)
    image = _permute(coroot, omega_permutation(tau))
    for node in reversed(word):
        image = reflect_coroot(cartan, node, image)
    return image


@lru_cache(maxsize=None)
def coroot_matrix(w: ExtAffineWeylElement) -> IntMatrix:
    """아핀 여근 공간 위의 w 의 행렬 (열 j = w(α_j^∨))"""
    size = len(w.system.affine.cartan)
    columns = [
        act_on_affine_coroot(w, tuple(int(i == j) for i in range(size))) for j in range(size)
    ]
    return tuple(tuple(columns[j][i] for j in range(size)) for i in range(size))


def reflection_coroot_matrix(
    cartan: IntMatrix, root: Sequence[int], coroot: Sequence[int]
) -> IntMatrix:
    """s_β 의 여근 공간 행렬 I - β^∨ (Aβ)^T"""
    size = len(cartan)
    a_beta = [sum(cartan[j][k] * root[k] for k in range(size)) for j in range(size)]
    return tuple(
        tuple(int(i == j) - coroot[i] * a_beta[j] for j in range(size)) for i in range(size)
    )


def _matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


@dataclass(frozen=True)
class CoverLabel:
    """덮개 v ⋖ w = s_β·v 의 표지"""

    root: Tuple[int, ...]
    coroot: Tuple[int, ...]
    # v^{-1}β^∨, 경로 조건의 짝 ⟨vλ, β^∨⟩ = ⟨λ, v^{-1}β^∨⟩ 에 쓴다
    frame_coroot: Tuple[int, ...]


@lru_cache(maxsize=None)
def lower_covers(w: ExtAffineWeylElement) -> Tuple[Tuple[ExtAffineWeylElement, CoverLabel], ...]:
    """축약 단어에서 글자 하나를 지워 얻는 w 아래의 덮개들"""
    system = w.system
    cartan = system.affine.cartan
    size = len(cartan)
    word, tau = reduced_word(w)
    k = len(word)
    prefixes = [identity(system)]
    for node in word:
        prefixes.append(prefixes[-1] * simple_reflection(system, node))
    suffixes = [tau]
    for node in reversed(word):
        suffixes.append(simple_reflection(system, node) * suffixes[-1])
    suffixes.reverse()
    permutation = omega_permutation(tau)

    covers = []
    for t, node in enumerate(word):
        v = prefixes[t] * suffixes[t + 1]
        if length(v) != k - 1:
            continue
        unit = tuple(int(i == node) for i in range(size))
        root, coroot = unit, unit
        for prior in reversed(word[:t]):
            root = reflect_root(cartan, prior, root)
            coroot = reflect_coroot(cartan, prior, coroot)
        frame = unit
        for later in word[t + 1:]:
            frame = reflect_coroot(cartan, later, frame)
        frame = _permute(frame, permutation, inverse=True)
        covers.append((v, CoverLabel(root, coroot, frame)))
    return tuple(covers)


class BruhatGraph:
    """Bruhat 하위 집합과 표지 붙은 덮개 그래프

    modulo 가 비어 있지 않으면 원소는 W/W_modulo 의 최소 대표이다.
    간선은 아래 원소 → 위 원소 방향이다.
    """

    def __init__(self, system: FiniteRootDatum, modulo: FrozenSet[int], tops: Tuple):
        self.system = system
        self.modulo = modulo
        self.tops = tops
        self.graph = nx.DiGraph()

    def __len__(self) -> int:
        return self.graph.number_of_nodes()

    def __contains__(self, w: ExtAffineWeylElement) -> bool:
        return w in self.graph

    @property
    def elements(self) -> List[ExtAffineWeylElement]:
        return sorted(self.graph.nodes, key=lambda w: (length(w), reduced_word(w)[0]))

    @property
    def covers(self) -> List[Tuple[ExtAffineWeylElement, ExtAffineWeylElement, CoverLabel]]:
        return [(v, w, data["label"]) for v, w, data in self.graph.edges(data=True)]

    def lower_covers(self, w: ExtAffineWeylElement) -> List[Tuple[ExtAffineWeylElement, CoverLabel]]:
        return [(v, self.graph.edges[v, w]["label"]) for v in self.graph.predecessors(w)]

    def descending_order(self) -> List[ExtAffineWeylElement]:
        """위에서 아래로 (위상 정렬의 역순)"""
        return list(reversed(list(nx.topological_sort(self.graph))))

    def below(self, w: ExtAffineWeylElement) -> FrozenSet[ExtAffineWeylElement]:
        return frozenset(nx.ancestors(self.graph, w)) | {w}

    def check_edges(self) -> None:
        """각 간선이 반사 관계와 길이 조건을 만족하는지 검사"""
        cartan = self.system.affine.cartan
        for v, w, label in self.covers:
            if length(w) != length(v) + 1:
                raise ValueError(f"cover {to_spec(v)} -> {to_spec(w)} breaks the length condition")
            reflection = reflection_coroot_matrix(cartan, label.root, label.coroot)
            if _matmul(reflection, coroot_matrix(v)) != coroot_matrix(w):
                raise ValueError(f"cover {to_spec(v)} -> {to_spec(w)} breaks s_beta v = w")


def bruhat_interval(
    tops: Iterable[ExtAffineWeylElement],
    modulo_right: Iterable[int] = (),
    cap: Optional[int] = None,
) -> BruhatGraph:
    """tops 아래의 모든 (잉여류) 원소와 덮개

    modulo_right 는 오른쪽 포물 부분군의 생성 노드 집합 J 이다.
    """
    tops = list(tops)
    if not tops:
        raise ValueError("bruhat_interval needs at least one top element")
    if cap is None:
        cap = settings.TWISTLOOP["INTERVAL_CAP"]
    system = tops[0].system
    modulo = frozenset(modulo_right)
    if modulo >= frozenset(all_nodes(system)):
        raise ValueError("modulo_right must be a proper subset of the nodes")
    reps = {parabolic_min(t, (), modulo) for t in tops}
    if len({omega_component(t) for t in reps}) > 1:
        raise ValueError("top elements lie in different Omega classes")

    interval = BruhatGraph(system, modulo, tuple(sorted(reps, key=lambda w: reduced_word(w)[0])))
    graph = interval.graph
    for top in reps:
        graph.add_node(top)
    frontier = list(reps)
    while frontier:
        following = []
        for w in frontier:
            for v, label in lower_covers(w):
                if modulo and not is_right_minimal(v, modulo):
                    continue
                if v not in graph:
                    graph.add_node(v)
                    following.append(v)
                    if graph.number_of_nodes() > cap:
                        raise ResourceCapExceeded("INTERVAL_CAP", cap)
                graph.add_edge(v, w, label=label)
        frontier = following
    logger.debug(
        f"bruhat interval below {len(reps)} tops mod {sorted(modulo)}: "
        f"{len(interval)} elements, {graph.number_of_edges()} covers"
    )
    return interval


# 원소 표기: s0.s1.s2 또는 tau^k*t[1,0]*w0[1.2]
_WORD = re.compile(r"^s\d+(\.s\d+)*$")
_TAU_POWER = re.compile(r"^tau\^(-?\d+)$")
_TAU_INDEX = re.compile(r"^tau\[(\d+)\]$")
_TRANSLATION = re.compile(r"^t\[(-?\d+(,\s*-?\d+)*)\]$")
_FINITE = re.compile(r"^w0\[((\d+)(\.\d+)*)?\]$")


def parse_element(system: FiniteRootDatum, spec: str) -> ExtAffineWeylElement:
    """원소 표기를 읽는다"""
    text = spec.replace(" ", "")
    if not text:
        raise ValueError("empty element spec")
    element = identity(system)
    for factor in text.split("*"):
        element = element * _parse_factor(system, factor)
    return element


def _parse_factor(system: FiniteRootDatum, factor: str) -> ExtAffineWeylElement:
    if factor == "e":
        return identity(system)
    if _WORD.match(factor):
        return from_word(system, [int(s[1:]) for s in factor.split(".")])
    match = _TAU_INDEX.match(factor)
    if match:
        taus = omega_elements(system)
        index = int(match.group(1))
        if index >= len(taus):
            raise ValueError(f"tau[{index}] out of range: Omega has {len(taus)} elements")
        return taus[index]
    match = _TAU_POWER.match(factor)
    if match:
        if len(system.omega_invariants) > 1:
            raise ValueError("tau^k needs a cyclic Omega; use tau[j]")
        taus = omega_elements(system)
        generator = taus[1] if len(taus) > 1 else taus[0]
        power = int(match.group(1)) % len(taus)
        element = identity(system)
        for _ in range(power):
            element = element * generator
        return element
    match = _TRANSLATION.match(factor)
    if match:
        return translation_element(system, [int(c) for c in match.group(1).split(",")])
    match = _FINITE.match(factor)
    if match:
        nodes = [int(c) for c in match.group(1).split(".")] if match.group(1) else []
        if any(node == system.special for node in nodes):
            raise ValueError(f"w0[...] may not use the affine node {system.special}")
        return from_word(system, nodes)
    raise ValueError(f"cannot parse element factor {factor!r}")


def to_spec(w: ExtAffineWeylElement) -> str:
    """정규형 t[λ]*w0[word]"""
    finite_word, _ = reduced_word(w.finite_part)
    translation = ",".join(str(c) for c in w.translation)
    return f"t[{translation}]*w0[{'.'.join(str(i) for i in finite_word)}]"


def word_spec(w: ExtAffineWeylElement) -> str:
    """축약 단어 표기 s0.s1 (Ω 성분이 있으면 *tau[j])"""
    word, tau = reduced_word(w)
    parts = []
    if word:
        parts.append(".".join(f"s{i}" for i in word))
    if length(tau) == 0 and tau != identity(w.system):
        parts.append(f"tau[{omega_elements(w.system).index(tau)}]")
    return "*".join(parts) or "e"
