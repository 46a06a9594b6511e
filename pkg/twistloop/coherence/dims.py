import logging
import time
from fractions import Fraction
from math import prod
from typing import List, Optional, Sequence, Tuple, Union

from django.conf import settings

from .paths import count_h_Y
from .root_data import (
    AffineRootDatum,
    FiniteRootDatum,
    coweight_labels,
    finite_system,
    reflect_weight,
)
from .schemas import CoherenceReport
from .weyl import longest_finite_element, reduced_word

logger = logging.getLogger(__name__)

Coweight = Sequence[int]


def weyl_dim(system: FiniteRootDatum, weight: Sequence[int]) -> int:
    """Weyl 차원 공식 ∏ ⟨λ+ρ, α^∨⟩ / ⟨ρ, α^∨⟩ (λ 는 기본 가중치 좌표)"""
    if len(weight) != system.rank:
        raise ValueError(f"weight has {len(weight)} entries, rank is {system.rank}")
    if any(c < 0 for c in weight):
        raise ValueError(f"weight {tuple(weight)} is not dominant")
    value = Fraction(1)
    for coroot in system.positive_coroots:
        numerator = sum((c + 1) * k for c, k in zip(weight, coroot))
        value *= Fraction(numerator, sum(coroot))
    if value.denominator != 1:
        raise ValueError(f"Weyl dimension of {tuple(weight)} is not an integer: {value}")
    return int(value)


def dual_weight(system: FiniteRootDatum, weight: Sequence[int]) -> Tuple[int, ...]:
    """-w_max(λ)"""
    word, _ = reduced_word(longest_finite_element(system))
    image = tuple(weight)
    for node in reversed(word):
        image = reflect_weight(system.finite_cartan, system.nodes.index(node), image)
    return tuple(-c for c in image)


def dominant_coweight(parent: FiniteRootDatum, labels: Sequence[int]) -> Tuple[int, ...]:
    """W_0 궤도의 우세 대표 (단순근 짝 좌표)"""
    current = list(labels)
    cartan = parent.finite_cartan
    while True:
        negative = [i for i, c in enumerate(current) if c < 0]
        if not negative:
            return tuple(current)
        i = negative[0]
        value = current[i]
        current = [current[j] - value * cartan[i][j] for j in range(len(current))]


def minuscule_node(parent: FiniteRootDatum, labels: Sequence[int]) -> Optional[int]:
    """우세 μ 가 최소 여가중치 ϖ_k^∨ 이면 k (0-기준), 아니면 None"""
    dominant = dominant_coweight(parent, labels)
    theta = parent.positive_roots[-1]
    if sum(t * c for t, c in zip(theta, dominant)) != 1:
        return None
    return dominant.index(1)


def minuscule_parts(parent: FiniteRootDatum, labels: Sequence[int]) -> List[Tuple[int, ...]]:
    """우세 μ 를 최소 여가중치들의 합으로 쪼갠다"""
    dominant = dominant_coweight(parent, labels)
    theta = parent.positive_roots[-1]
    parts = []
    for k, count in enumerate(dominant):
        if count == 0:
            continue
        if theta[k] != 1:
            raise ValueError(
                f"μ = {tuple(labels)} is not a sum of minuscule coweights "
                f"(ϖ_{k + 1}^v is not minuscule)"
            )
        parts.extend([tuple(int(j == k) for j in range(parent.rank))] * count)
    return parts


def h_mu(datum: AffineRootDatum, mu: Coweight, m: int) -> int:
    """h^(μ)(m) = dim H^0(X(μ), L(μ)^{e·m}), 분할형 H 의 최고 가중치 e·m·ϖ_μ"""
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    parent = finite_system(datum.split_parent)
    labels = coweight_labels(mu, parent)
    k = minuscule_node(parent, labels)
    if k is None:
        raise ValueError(f"μ = {tuple(mu)} is not minuscule for {datum.split_parent}; use h_mu_sum")
    # 쌍대 표현으로 바꿔도 차원은 같다
    weight = tuple(datum.twist_order * m * int(j == k) for j in range(parent.rank))
    return weyl_dim(parent, weight)


def h_mu_sum(datum: AffineRootDatum, parts: Sequence[Coweight], m: int) -> int:
    """h^(μ_1)·…·h^(μ_r), 영 여가중치 성분은 1"""
    if not parts:
        raise ValueError("μ_parts is empty; pass the zero coweight explicitly")
    return prod(h_mu(datum, part, m) for part in parts if any(part))


def hook_content(n: int, r: int, m: int) -> int:
    """∏_{i≤r, j≤n-r} (i+j+m-1)/(i+j-1) = dim H^0(Gr(r, n), O(m))"""
    if not 0 < r < n:
        raise ValueError(f"need 0 < r < n, got r={r}, n={n}")
    if m < 0:
        raise ValueError(f"need m >= 0, got {m}")
    value = prod(
        Fraction(i + j + m - 1, i + j - 1) for i in range(1, r + 1) for j in range(1, n - r + 1)
    )
    return int(value)


def central_charge(datum: AffineRootDatum, weight: Sequence[int]) -> int:
    """c(Σ n_i ε_i) = Σ n_i a_i^∨"""
    if len(weight) != len(datum.nodes):
        raise ValueError(f"weight has {len(weight)} entries, {datum.name} has {len(datum.nodes)} nodes")
    return sum(n * a for n, a in zip(weight, datum.comarks))


def iota_embed(datum: AffineRootDatum, weight: Sequence[int]) -> Tuple[int, ...]:
    """ι(ε_i) = ε_i - a_i^∨ ε_0 (분할형)"""
    if not datum.is_split:
        raise ValueError(f"iota_embed needs a split datum (G split); {datum.name} is twisted")
    if len(weight) != datum.rank:
        raise ValueError(f"weight has {len(weight)} entries, rank is {datum.rank}")
    head = -sum(n * datum.comarks[i + 1] for i, n in enumerate(weight))
    return (head, *weight)


def _as_parts(mu: Union[Coweight, Sequence[Coweight]]) -> Tuple[bool, List[Tuple[int, ...]]]:
    if len(mu) and all(isinstance(c, (list, tuple)) for c in mu):
        return True, [tuple(part) for part in mu]
    return False, [tuple(mu)]


def check_coherence(
    datum: AffineRootDatum,
    mu: Union[Coweight, Sequence[Coweight]],
    y_nodes: Sequence[int],
    a: int,
    x: Optional[int] = None,
    cap: Optional[int] = None,
) -> CoherenceReport:
    """h^(μ)_Y(a) 와 h^(μ)(|Y|·a) 비교"""
    started = time.monotonic()
    y_nodes = sorted(set(y_nodes))
    explicit, parts = _as_parts(mu)
    if len({len(part) for part in parts}) != 1:
        raise ValueError("all μ parts must have the same length")
    total = tuple(sum(column) for column in zip(*parts))

    parent = finite_system(datum.split_parent)
    if not explicit:
        parts = minuscule_parts(parent, coweight_labels(total, parent)) or [total]
    m = len(y_nodes) * a
    rhs = h_mu_sum(datum, parts, m)
    lhs = count_h_Y(datum, total, y_nodes, a, x=x, cap=cap)

    proven = datum.family in settings.TWISTLOOP["PROVEN_FAMILIES"]
    report = CoherenceReport(
        datum=datum.name,
        mu=list(total),
        y_nodes=y_nodes,
        a=a,
        h_y=lhs,
        h=rhs,
        equal=lhs == rhs,
        proven=proven,
        elapsed=time.monotonic() - started,
    )
    if not report.equal:
        logger.warning(
            f"coherence mismatch for {datum.name}, mu={total}, Y={y_nodes}, a={a}: "
            f"h_Y={lhs}, h={rhs}" + (" (proven family)" if proven else "")
        )
    return report
