import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import (
    hermite_normal_form,
    smith_normal_decomp,
    smith_normal_form,
)

logger = logging.getLogger(__name__)

DATA_PATH = Path(__file__).resolve().parent / "data" / "affine_types.json"

Vector = Tuple[int, ...]
IntMatrix = Tuple[Tuple[int, ...], ...]

_AFF1_NAME = re.compile(r"^([A-G])\(1\)_(\d+)$")
_TWISTED_NAME = re.compile(r"^([A-G])\(([23])\)_(\d+)$")
_FINITE_NAME = re.compile(r"^([A-G])(\d+)$")
_EXCEPTIONAL = {("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)}


@dataclass(frozen=True)
class AffineRootDatum:
    """아핀형 일반화 Cartan 행렬과 부가 데이터"""

    name: str
    cartan: IntMatrix
    marks: Vector
    comarks: Vector
    twist_order: int
    kappa: Vector
    split_parent: str
    # (에셸론 노드, H 단순근 번호들) 쌍, 특수 노드 0 기준
    orbits: Tuple[Tuple[int, Tuple[int, ...]], ...]

    @property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(range(len(self.cartan)))

    @property
    def rank(self) -> int:
        return len(self.cartan) - 1

    @property
    def is_split(self) -> bool:
        return self.twist_order == 1

    @property
    def family(self) -> str:
        return self.name.split("_")[0]

    def orbit_of(self, node: int) -> Tuple[int, ...]:
        for echelon_node, roots in self.orbits:
            if echelon_node == node:
                return roots
        raise ValueError(f"node {node} has no orbit data in {self.name}")


@dataclass(frozen=True, eq=False)
class FiniteRootDatum:
    """특수 노드 x 에서의 에셸론 근계 ^xΣ

    좌표계: 여근 격자 원소 h 는 V-좌표 v_i = α_i(h) (i ∈ nodes) 로 적는다.
    에셸론 근은 β / root_scales[β], 에셸론 여근은 root_scales[β]·β^∨.
    """

    affine: AffineRootDatum
    special: int
    nodes: Tuple[int, ...]
    finite_cartan: IntMatrix
    positive_roots: Tuple[Vector, ...]
    positive_coroots: Tuple[Vector, ...]
    root_scales: Tuple[int, ...]
    coroot_lattice: Tuple[Vector, ...]
    coweight_lattice: Tuple[Vector, ...]
    rho: Tuple[Fraction, ...]
    two_rho: Tuple[Fraction, ...]
    omega_invariants: Tuple[int, ...]
    omega_forms: Tuple[Tuple[Fraction, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.nodes)

    @property
    def simple_scales(self) -> Tuple[int, ...]:
        index = {root: k for k, root in enumerate(self.positive_roots)}
        return tuple(
            self.root_scales[index[tuple(int(i == j) for j in range(self.rank))]]
            for i in range(self.rank)
        )

    @property
    def omega_order(self) -> int:
        order = 1
        for factor in self.omega_invariants:
            order *= factor
        return order

    def root_value(self, k: int, v: Sequence[Fraction]) -> Fraction:
        """k 번째 양의 에셸론 근의 값 β'(v)"""
        root = self.positive_roots[k]
        return Fraction(sum(c * x for c, x in zip(root, v))) / self.root_scales[k]

    def contains_coweight(self, v: Sequence[int]) -> bool:
        """v ∈ P^∨(^xΣ) 인지"""
        basis = Matrix(self.coweight_lattice).T
        coords = basis.LUsolve(Matrix([int(c) for c in v]))
        return all(c.q == 1 for c in coords)

    def contains_coroot(self, v: Sequence[int]) -> bool:
        """v ∈ Q^∨(^xΣ) 인지"""
        basis = Matrix(self.coroot_lattice).T
        coords = basis.LUsolve(Matrix([int(c) for c in v]))
        return all(c.q == 1 for c in coords)

    def omega_class(self, v: Sequence[int]) -> Tuple[int, ...]:
        """P^∨/Q^∨ 에서 v 의 류 (불변인자별 잉여)"""
        values = []
        for form, factor in zip(self.omega_forms, self.omega_invariants):
            value = sum((f * c for f, c in zip(form, v)), Fraction(0))
            if value.denominator != 1:
                raise ValueError(f"{tuple(v)} is not in P^v")
            values.append(int(value) % factor)
        return tuple(values)

    def coroot_vcoords(self, coroot: Sequence[int]) -> Tuple[int, ...]:
        """α^∨ 좌표의 여근을 V-좌표로"""
        return _vcoords(self.finite_cartan, coroot)


def _vcoords(cartan: Sequence[Sequence[int]], coroot: Sequence[int]) -> Tuple[int, ...]:
    n = len(cartan)
    return tuple(sum(coroot[i] * cartan[i][j] for i in range(n)) for j in range(n))


def finite_cartan(series: str, rank: int) -> IntMatrix:
    """유한형 Cartan 행렬 (Bourbaki 번호, a_ij = α_j(α_i^∨))"""
    minimum = {"A": 1, "B": 2, "C": 2, "D": 3}
    if series in minimum:
        if rank < minimum[series]:
            raise ValueError(f"rank {rank} too small for type {series}")
    elif (series, rank) not in _EXCEPTIONAL:
        raise ValueError(f"no finite type {series}{rank}")

    a = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]

    def link(i: int, j: int, aij: int = -1, aji: int = -1) -> None:
        a[i][j] = aij
        a[j][i] = aji

    if series in "ABCD":
        chain = rank - 1 if series == "D" else rank
        for i in range(chain - 1):
            link(i, i + 1)
        if series == "B":
            # 마지막 근이 짧은 근
            link(rank - 2, rank - 1, -1, -2)
        elif series == "C":
            link(rank - 2, rank - 1, -2, -1)
        elif series == "D":
            link(rank - 3, rank - 1)
    elif series == "E":
        link(0, 2)
        for i in range(2, rank - 1):
            link(i, i + 1)
        link(1, 3)
    elif series == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    else:
        link(0, 1, -3, -1)
    return tuple(tuple(row) for row in a)


def root_closure(cartan: Sequence[Sequence[int]]) -> List[Tuple[Vector, Vector]]:
    """단순 반사에 대한 닫힘으로 (양의 근, 여근) 쌍을 생성"""
    n = len(cartan)
    simple = [tuple(int(i == k) for k in range(n)) for i in range(n)]
    found: Dict[Vector, Vector] = {s: s for s in simple}
    frontier = list(simple)
    while frontier:
        following = []
        for beta in frontier:
            cobeta = found[beta]
            for j in range(n):
                p = sum(beta[k] * cartan[j][k] for k in range(n))
                q = sum(cobeta[k] * cartan[k][j] for k in range(n))
                root = tuple(beta[k] - p * (k == j) for k in range(n))
                if root == beta or any(c < 0 for c in root):
                    continue
                if root not in found:
                    found[root] = tuple(cobeta[k] - q * (k == j) for k in range(n))
                    following.append(root)
        frontier = following
        if len(found) > 10000:
            raise ValueError("root closure does not terminate: not of finite type")
    return sorted(found.items(), key=lambda item: (sum(item[0]), item[0]))


def reflect_weight(cartan: Sequence[Sequence[int]], i: int, weight: Sequence) -> tuple:
    """기본 가중치 좌표의 가중치에 s_i 작용"""
    p = weight[i]
    return tuple(weight[j] - p * cartan[j][i] for j in range(len(weight)))


def reflect_root(cartan: Sequence[Sequence[int]], i: int, root: Sequence) -> tuple:
    """단순근 좌표의 근에 s_i 작용"""
    p = sum(root[k] * cartan[i][k] for k in range(len(root)))
    return tuple(root[j] - p * (j == i) for j in range(len(root)))


def reflect_coroot(cartan: Sequence[Sequence[int]], i: int, coroot: Sequence) -> tuple:
    """단순 여근 좌표의 여근에 s_i 작용"""
    p = sum(coroot[k] * cartan[k][i] for k in range(len(coroot)))
    return tuple(coroot[j] - p * (j == i) for j in range(len(coroot)))


def pairing(weight: Sequence, coroot: Sequence) -> Fraction:
    """⟨λ, β^∨⟩, ⟨ε_i, α_j^∨⟩ = δ_ij"""
    if len(weight) != len(coroot):
        raise ValueError(
            f"dimension mismatch: weight has {len(weight)} entries, "
            f"coroot has {len(coroot)}"
        )
    return sum((Fraction(w) * c for w, c in zip(weight, coroot)), Fraction(0))


def _primitive_null_vector(matrix: Sequence[Sequence[int]]) -> Vector:
    kernel = Matrix(matrix).nullspace()
    if len(kernel) != 1:
        raise ValueError(f"corank {len(kernel)} != 1: not of affine type")
    entries = list(kernel[0])
    den = lcm(*[int(c.q) for c in entries])
    ints = [int(c * den) for c in entries]
    g = gcd(*ints)
    ints = [c // g for c in ints]
    if all(c <= 0 for c in ints):
        ints = [-c for c in ints]
    if any(c <= 0 for c in ints):
        raise ValueError("null vector is not positive: not of affine type")
    return tuple(ints)


def _check_cartan(name: str, cartan: IntMatrix) -> None:
    size = len(cartan)
    for i in range(size):
        if len(cartan[i]) != size:
            raise ValueError(f"{name}: cartan is not square")
        if cartan[i][i] != 2:
            raise ValueError(f"{name}: diagonal entry a_{i}{i} != 2")
        for j in range(size):
            if i == j:
                continue
            if cartan[i][j] > 0:
                raise ValueError(f"{name}: positive off-diagonal entry a_{i}{j}")
            if (cartan[i][j] == 0) != (cartan[j][i] == 0):
                raise ValueError(f"{name}: a_{i}{j} and a_{j}{i} disagree on zero")


def _affine_extension(series: str, rank: int) -> IntMatrix:
    finite = finite_cartan(series, rank)
    theta, theta_check = root_closure(finite)[-1]
    size = rank + 1
    a = [[0] * size for _ in range(size)]
    a[0][0] = 2
    for i in range(rank):
        for j in range(rank):
            a[i + 1][j + 1] = finite[i][j]
    for j in range(rank):
        a[0][j + 1] = -sum(theta_check[k] * finite[k][j] for k in range(rank))
        a[j + 1][0] = -sum(theta[k] * finite[j][k] for k in range(rank))
    return tuple(tuple(row) for row in a)


@lru_cache(maxsize=None)
def _twisted_table() -> Dict[str, dict]:
    with open(DATA_PATH, encoding="utf-8") as handle:
        payload = json.load(handle)
    return {entry["name"]: entry for entry in payload["types"]}


def supported_names() -> List[str]:
    """지원 이름 목록 (Aff 1 은 대표 계열만)"""
    aff1 = [f"{s}(1)_{r}" for s, r in [("A", 1), ("A", 2), ("A", 3), ("B", 3),
                                      ("C", 2), ("C", 3), ("D", 4), ("G", 2)]]
    return aff1 + sorted(_twisted_table())


@lru_cache(maxsize=None)
def load_affine_datum(name: str) -> AffineRootDatum:
    """Kac 표 이름으로 아핀 근 데이터를 읽는다"""
    aff1 = _AFF1_NAME.match(name)
    if aff1:
        series, rank = aff1.group(1), int(aff1.group(2))
        cartan = _affine_extension(series, rank)
        twist_order = 1
        kappa = (1,) * (rank + 1)
        split_parent = f"{series}{rank}"
        orbits = tuple((i, (i,)) for i in range(1, rank + 1))
    else:
        entry = _twisted_table().get(name)
        twisted = _TWISTED_NAME.match(name)
        if entry is None or twisted is None:
            raise ValueError(
                f"unknown affine type {name!r}; supported: A-G(1)_l and "
                f"{', '.join(sorted(_twisted_table()))}"
            )
        cartan = tuple(tuple(int(c) for c in row) for row in entry["cartan"])
        twist_order = int(entry["twist_order"])
        if twist_order != int(twisted.group(2)):
            raise ValueError(f"{name}: twist_order {twist_order} contradicts the name")
        kappa = tuple(entry.get("kappa", [1] * len(cartan)))
        split_parent = entry["split_parent"]
        orbits = tuple(
            (int(node), tuple(roots)) for node, roots in sorted(
                entry["orbits"].items(), key=lambda item: int(item[0])
            )
        )

    _check_cartan(name, cartan)
    marks = _primitive_null_vector(cartan)
    comarks = _primitive_null_vector([list(col) for col in zip(*cartan)])
    if 1 not in comarks:
        raise ValueError(f"{name}: no comark equals 1")

    size = len(cartan)
    if len(kappa) != size or any(k not in (1, 2) for k in kappa):
        raise ValueError(f"{name}: kappa must assign 1 or 2 to each node")
    multipliable = name.startswith("A(2)_") and (size - 1) * 2 == int(name.split("_")[1])
    if multipliable and kappa.count(2) != 1:
        raise ValueError(f"{name}: exactly one node must have kappa 2")
    if not multipliable and kappa.count(2) != 0:
        raise ValueError(f"{name}: kappa 2 only occurs in type A(2)_2m")

    datum = AffineRootDatum(
        name=name,
        cartan=cartan,
        marks=marks,
        comarks=comarks,
        twist_order=twist_order,
        kappa=kappa,
        split_parent=split_parent,
        orbits=orbits,
    )
    logger.debug(f"loaded {name}: marks={marks} comarks={comarks}")
    return datum


def _delete_node(cartan: IntMatrix, x: int) -> IntMatrix:
    keep = [i for i in range(len(cartan)) if i != x]
    return tuple(tuple(cartan[i][j] for j in keep) for i in keep)


def special_nodes(datum: AffineRootDatum) -> Tuple[int, ...]:
    """comark 1 이고 삭제한 유한계가 최대인 노드"""
    sizes = [len(root_closure(_delete_node(datum.cartan, x))) for x in datum.nodes]
    top = max(sizes)
    return tuple(
        x for x in datum.nodes if datum.comarks[x] == 1 and sizes[x] == top
    )


def _lattice_basis(vectors: List[Tuple[Fraction, ...]], dim: int) -> Matrix:
    den = lcm(*[c.denominator for vec in vectors for c in vec])
    columns = Matrix([[int(c * den) for c in vec] for vec in vectors]).T
    hnf = hermite_normal_form(columns)
    keep = [j for j in range(hnf.cols) if any(hnf[i, j] != 0 for i in range(hnf.rows))]
    basis = hnf.extract(list(range(hnf.rows)), keep) / den
    if basis.cols != dim:
        raise ValueError("translation lattice is not of full rank")
    return basis


def _form_orbit(cartan: IntMatrix, form: Tuple[Fraction, ...]) -> set:
    """α-좌표 일차형식의 W_0 궤도"""
    n = len(cartan)
    orbit = {form}
    frontier = [form]
    while frontier:
        following = []
        for gamma in frontier:
            for i in range(n):
                p = sum(gamma[k] * cartan[i][k] for k in range(n))
                image = tuple(gamma[k] - p * (k == i) for k in range(n))
                if image not in orbit:
                    orbit.add(image)
                    following.append(image)
        frontier = following
    return orbit


def _lattice_multiple(basis: Matrix, vector: Sequence[int]) -> int:
    """d·vector ∈ 격자 인 최소 양의 정수 d"""
    coords = basis.LUsolve(Matrix(vector))
    return lcm(*[int(c.q) for c in coords])


@lru_cache(maxsize=None)
def echelon_system(datum: AffineRootDatum, x: int = 0) -> FiniteRootDatum:
    """특수 노드 x 를 지운 에셸론 근계"""
    if x not in datum.nodes:
        raise ValueError(f"{datum.name} has no node {x}")
    if x not in special_nodes(datum):
        raise ValueError(
            f"node {x} of {datum.name} is not special (comark {datum.comarks[x]})"
        )
    nodes = tuple(i for i in datum.nodes if i != x)
    fc = _delete_node(datum.cartan, x)
    n = len(nodes)
    pairs = root_closure(fc)
    roots = tuple(r for r, _ in pairs)
    coroots = tuple(c for _, c in pairs)

    # s_x 의 평행이동 벡터와 그 W_0 궤도가 생성하는 격자
    translation = tuple(Fraction(-datum.cartan[x][j], datum.marks[x]) for j in nodes)
    orbit = {translation}
    frontier = [translation]
    while frontier:
        following = []
        for v in frontier:
            for i in range(n):
                image = tuple(v[j] - v[i] * fc[i][j] for j in range(n))
                if image not in orbit:
                    orbit.add(image)
                    following.append(image)
        frontier = following
    basis = _lattice_basis(sorted(orbit), n)

    scales = tuple(_lattice_multiple(basis, _vcoords(fc, c)) for c in coroots)
    simple_index = [roots.index(tuple(int(i == j) for j in range(n))) for i in range(n)]
    d = [scales[k] for k in simple_index]

    lattice_rows = []
    for j in range(basis.cols):
        column = [basis[i, j] for i in range(n)]
        if any(c.q != 1 for c in column):
            raise ValueError(f"{datum.name}: translation lattice is not integral")
        lattice_rows.append(tuple(int(c) for c in column))
    echelon_rows = Matrix([[d[i] * fc[i][j] for j in range(n)] for i in range(n)])
    if abs(echelon_rows.det()) != abs(basis.det()):
        raise ValueError(f"{datum.name}: echelon coroots do not span the translation lattice")

    # P^∨: 에셸론 근과 α_x 벡터 부분의 W_0 궤도 위에서 정수값을 갖는 v
    forms = {tuple(Fraction(c, s) for c in root) for root, s in zip(roots, scales)}
    head = tuple(Fraction(-datum.marks[i], datum.marks[x]) for i in nodes)
    forms |= _form_orbit(fc, head)
    form_basis = _lattice_basis(sorted(forms), n)
    coweight_basis = form_basis.T.inv()
    if any(c.q != 1 for c in coweight_basis):
        raise ValueError(f"{datum.name}: coweight lattice is not integral")
    transfer = coweight_basis.inv() * echelon_rows.T
    if any(c.q != 1 for c in transfer):
        raise ValueError(f"{datum.name}: coroot lattice is not contained in P^v")
    # Ω 류: s·P^{-1}·b mod 불변인자 (smith = s·transfer·t)
    smith, left, _ = smith_normal_decomp(transfer, domain=ZZ)
    to_coordinates = coweight_basis.inv()
    factors = []
    omega_forms = []
    for i in range(n):
        factor = abs(int(smith[i, i]))
        if factor == 1:
            continue
        row = left[i, :] * to_coordinates
        factors.append(factor)
        omega_forms.append(tuple(Fraction(int(c.p), int(c.q)) for c in row))

    two_rho = tuple(
        sum((Fraction(root[i], scale) for root, scale in zip(roots, scales)), Fraction(0))
        for i in range(n)
    )
    rho = tuple(
        sum(
            (
                Fraction(d[j] * sum(root[k] * fc[j][k] for k in range(n)), scale)
                for root, scale in zip(roots, scales)
            ),
            Fraction(0),
        )
        / 2
        for j in range(n)
    )
    system = FiniteRootDatum(
        affine=datum,
        special=x,
        nodes=nodes,
        finite_cartan=fc,
        positive_roots=roots,
        positive_coroots=coroots,
        root_scales=scales,
        coroot_lattice=tuple(lattice_rows),
        coweight_lattice=tuple(
            tuple(int(coweight_basis[i, j]) for i in range(n)) for j in range(n)
        ),
        rho=rho,
        two_rho=two_rho,
        omega_invariants=tuple(factors),
        omega_forms=tuple(omega_forms),
    )
    logger.debug(
        f"echelon system of {datum.name} at {x}: {len(roots)} positive roots, "
        f"scales {tuple(d)}, P/Q invariants {system.omega_invariants}"
    )
    return system


def finite_system(type_name: str) -> FiniteRootDatum:
    """분할 유한형 (예: "A2") 의 근계"""
    match = _FINITE_NAME.match(type_name)
    if not match:
        raise ValueError(f"unknown finite type {type_name!r}")
    return echelon_system(load_affine_datum(f"{match.group(1)}(1)_{match.group(2)}"), 0)


def coinvariant_lattice(sigma: Sequence[int]) -> Tuple[int, ...]:
    """Z^n/(1-σ)Z^n 의 Smith 불변량 (0 은 자유 성분)"""
    n = len(sigma)
    relation = Matrix(n, n, lambda i, j: int(i == j) - int(sigma[j] == i))
    snf = smith_normal_form(relation, domain=ZZ)
    return tuple(abs(int(snf[i, i])) for i in range(n))


def orbit_permutation(datum: AffineRootDatum) -> Tuple[int, ...]:
    """σ_0 를 H 단순근(0-기준) 의 순열로"""
    parent_rank = finite_system(datum.split_parent).rank
    sigma = list(range(parent_rank))
    for _, roots in datum.orbits:
        for k, root in enumerate(roots):
            sigma[root - 1] = roots[(k + 1) % len(roots)] - 1
    return tuple(sigma)


def coweight_labels(mu: Sequence, parent: FiniteRootDatum) -> Tuple[int, ...]:
    """H 의 여가중치 μ 를 단순근과의 짝 ⟨μ, β_k⟩ 로"""
    values = [Fraction(c) for c in mu]
    if any(v.denominator != 1 for v in values):
        raise ValueError(f"μ not integral: {tuple(mu)}")
    ints = [int(v) for v in values]
    rank = parent.rank
    if parent.affine.name.startswith("A") and len(ints) == rank + 1:
        return tuple(ints[k] - ints[k + 1] for k in range(rank))
    if len(ints) == rank:
        return tuple(ints)
    raise ValueError(
        f"μ has {len(ints)} entries; expected {rank} Dynkin labels"
        + (f" or {rank + 1} GL coordinates" if parent.affine.name.startswith("A") else "")
    )


def project_coweight(mu: Sequence, datum: AffineRootDatum, x: int = 0) -> Tuple[int, ...]:
    """μ 의 σ_0-coinvariant 류를 P^∨(^xΣ) 의 V-좌표로"""
    if x != 0:
        raise ValueError("coweight projection is implemented for special node 0 only")
    parent = finite_system(datum.split_parent)
    labels = coweight_labels(mu, parent)
    invariants = coinvariant_lattice(orbit_permutation(datum))
    if any(f > 1 for f in invariants) or invariants.count(0) != len(datum.orbits):
        raise ValueError(f"{datum.name}: coinvariant lattice is not free on the orbits")

    system = echelon_system(datum, x)
    image = []
    for position, node in enumerate(system.nodes):
        roots = datum.orbit_of(node)
        weight = Fraction(parent.two_rho[roots[0] - 1]) / system.two_rho[position]
        value = weight * sum(labels[r - 1] for r in roots)
        if value.denominator != 1:
            raise ValueError(f"μ = {tuple(mu)} does not project into P^v of {datum.name}")
        image.append(int(value))
    if not system.contains_coweight(image):
        raise ValueError(f"μ = {tuple(mu)} does not project into P^v of {datum.name}")
    return tuple(image)
