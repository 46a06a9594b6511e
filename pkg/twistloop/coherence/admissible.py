import logging
import time
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from django.conf import settings

from .exceptions import ResourceCapExceeded
from .root_data import AffineRootDatum, FiniteRootDatum, echelon_system, project_coweight
from .weyl import (
    BruhatGraph,
    ExtAffineWeylElement,
    bruhat_interval,
    bruhat_leq,
    complement,
    coset_min,
    finite_orbit,
    length,
    lower_covers,
    omega_component,
    omega_permutation,
    parabolic_min,
    reduced_word,
    simple_reflection,
    translation_element,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AdmissibleSet:
    """Adm(μ) 와 그 최대 원소, 공통 Ω 성분 τ"""

    datum: AffineRootDatum
    mu: Tuple[int, ...]
    lam: Tuple[int, ...]
    tau: ExtAffineWeylElement
    elements: FrozenSet[ExtAffineWeylElement]
    maximal_elements: Tuple[ExtAffineWeylElement, ...]
    graph: BruhatGraph

    @property
    def system(self) -> FiniteRootDatum:
        return self.tau.system

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, w: ExtAffineWeylElement) -> bool:
        return w in self.elements

    def is_admissible(self, w: ExtAffineWeylElement) -> bool:
        """정의대로 판정: 어떤 t_{w0(λ)} 이하"""
        return any(bruhat_leq(w, top) for top in self.maximal_elements)


@dataclass(frozen=True)
class SaturatedSet:
    """Adm^Y(μ)° 와 W_a/W^{Y°} 의 최소 대표"""

    y_nodes: FrozenSet[int]
    y_circ: FrozenSet[int]
    full: FrozenSet[ExtAffineWeylElement]
    mod_right: FrozenSet[ExtAffineWeylElement]


def adm(
    datum: AffineRootDatum,
    mu: Sequence[int],
    x: Optional[int] = None,
    cap: Optional[int] = None,
    length_cap: Optional[int] = None,
) -> AdmissibleSet:
    """μ 의 허용 집합

    λ 의 W_0 궤도에 있는 평행이동들 아래의 Bruhat 하위 집합을 모두 모은다.
    """
    if x is None:
        x = settings.TWISTLOOP["DEFAULT_SPECIAL_NODE"]
    if length_cap is None:
        length_cap = settings.TWISTLOOP["LENGTH_CAP"]
    started = time.monotonic()
    system = echelon_system(datum, x)
    lam = project_coweight(mu, datum, x)

    t_lam = translation_element(system, lam)
    if length(t_lam) > length_cap:
        raise ResourceCapExceeded(
            "LENGTH_CAP", length_cap, f"l(t_lambda) = {length(t_lam)} exceeds LENGTH_CAP={length_cap}"
        )
    tops = tuple(translation_element(system, image) for image in finite_orbit(system, lam))
    graph = bruhat_interval(tops, cap=cap)
    _, tau = reduced_word(t_lam)

    result = AdmissibleSet(
        datum=datum,
        mu=tuple(mu),
        lam=lam,
        tau=tau,
        elements=frozenset(graph.elements),
        maximal_elements=tops,
        graph=graph,
    )
    logger.info(
        f"adm({datum.name}, mu={tuple(mu)}): lambda={lam}, {len(tops)} maximal, "
        f"{len(result)} elements in {time.monotonic() - started:.3f}s"
    )
    return result


def adm_neutral(adm_set: AdmissibleSet) -> FrozenSet[ExtAffineWeylElement]:
    """Adm(μ)° = Adm(μ)·τ^{-1} ⊂ W_a"""
    tau_inverse = adm_set.tau.inverse()
    return frozenset(w * tau_inverse for w in adm_set.elements)


def circled(tau: ExtAffineWeylElement, y_nodes: Iterable[int]) -> FrozenSet[int]:
    """Y° = {j : s_j = τ s_i τ^{-1}, i ∈ Y}"""
    permutation = omega_permutation(tau)
    return frozenset(permutation[i] for i in y_nodes)


def _check_y(system: FiniteRootDatum, y_nodes: Iterable[int]) -> FrozenSet[int]:
    y_nodes = frozenset(y_nodes)
    if not y_nodes:
        raise ValueError("Y must be a nonempty set of nodes")
    complement(system, y_nodes)
    return y_nodes


def _double_coset_closure(
    seeds: Iterable[ExtAffineWeylElement],
    left: FrozenSet[int],
    right: FrozenSet[int],
    cap: int,
) -> set:
    found = set(seeds)
    frontier = list(found)
    while frontier:
        following = []
        for w in frontier:
            system = w.system
            neighbours = [simple_reflection(system, i) * w for i in left]
            neighbours += [w * simple_reflection(system, j) for j in right]
            for v in neighbours:
                if v not in found:
                    found.add(v)
                    following.append(v)
                    if len(found) > cap:
                        raise ResourceCapExceeded("INTERVAL_CAP", cap)
        frontier = following
    return found


def adm_Y(
    adm_set: AdmissibleSet, y_nodes: Iterable[int], cap: Optional[int] = None
) -> SaturatedSet:
    """Adm^Y(μ)° = W^Y·Adm(μ)°·W^{Y°} (W^Y = W_{S-Y})"""
    if cap is None:
        cap = settings.TWISTLOOP["INTERVAL_CAP"]
    system = adm_set.system
    y_nodes = _check_y(system, y_nodes)
    y_circ = circled(adm_set.tau, y_nodes)
    left, right = complement(system, y_nodes), complement(system, y_circ)

    full = _double_coset_closure(adm_neutral(adm_set), left, right, cap)
    mod_right = {parabolic_min(w, (), right) for w in full}
    logger.debug(
        f"Adm^Y for Y={sorted(y_nodes)} (Y°={sorted(y_circ)}): "
        f"{len(full)} elements, {len(mod_right)} cosets"
    )
    return SaturatedSet(y_nodes, y_circ, frozenset(full), frozenset(mod_right))


def saturation_by_coset_min(
    adm_set: AdmissibleSet, y_nodes: Iterable[int], cap: Optional[int] = None
) -> FrozenSet[ExtAffineWeylElement]:
    """{x ∈ W_a : coset_min(x, Y, Y°) ∈ coset_min(Adm(μ)°)} 를 이중 잉여류별로 만든다"""
    if cap is None:
        cap = settings.TWISTLOOP["INTERVAL_CAP"]
    system = adm_set.system
    y_nodes = _check_y(system, y_nodes)
    y_circ = circled(adm_set.tau, y_nodes)
    left, right = complement(system, y_nodes), complement(system, y_circ)

    minima = {coset_min(w, y_nodes, y_circ) for w in adm_neutral(adm_set)}
    found: set = set()
    for d in sorted(minima, key=lambda w: (length(w), reduced_word(w)[0])):
        found |= _double_coset_closure([d], left, right, cap - len(found))
    return frozenset(found)


def verify_downward_closed(adm_set: AdmissibleSet) -> None:
    """하위 덮개와 최대 원소 조건 재검사"""
    for w in adm_set.elements:
        if omega_component(w) != omega_component(adm_set.tau):
            raise ValueError(f"{w!r} has a different Omega component")
        for v, _ in lower_covers(w):
            if v not in adm_set.elements:
                raise ValueError(f"{v!r} is below {w!r} but missing")
    expected = length(translation_element(adm_set.system, adm_set.lam))
    for top in adm_set.maximal_elements:
        if length(top) != expected:
            raise ValueError(f"maximal element {top!r} has length {length(top)} != {expected}")

