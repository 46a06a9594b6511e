import logging
from dataclasses import dataclass, replace
from itertools import combinations, product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from .series import SeriesMatrix, TruncatedLaurentSeries, make_series, min_exponent

logger = logging.getLogger(__name__)

Rows = Tuple[Tuple[int, ...], ...]
# (지수 k, 기저 번호 i) -> 계수, u^k e_i 의 계수
SparseVector = Dict[Tuple[int, int], int]

CHAIN_MODES = ("split", "unitary", "special_unitary")
# 짝수 n = 2m 의 추가 첨자 m'
PRIMED = "m'"
ChainIndex = Union[int, str]


def rref_rows(rows: Iterable[Sequence[int]], width: int, p: int) -> Rows:
    """F_p 행 공간의 RREF 기저 (영 행 제외)"""
    rows = [list(row) for row in rows]
    if not rows or width == 0:
        return ()
    field = GF(p)
    matrix = DomainMatrix([[field(c % p) for c in row] for row in rows], (len(rows), width), field)
    reduced, pivots = matrix.rref()
    entries = reduced.to_list()
    return tuple(tuple(int(field.to_int(c)) % p for c in entries[r]) for r in range(len(pivots)))


def null_rows(rows: Sequence[Sequence[int]], width: int, p: int) -> Rows:
    """{x : row·x = 0 for all rows} 의 기저"""
    if not rows:
        return tuple(tuple(int(i == j) for j in range(width)) for i in range(width))
    field = GF(p)
    matrix = DomainMatrix([[field(c % p) for c in row] for row in rows], (len(rows), width), field)
    basis = matrix.nullspace().to_list()
    return rref_rows([[int(field.to_int(c)) % p for c in row] for row in basis], width, p)


def rank(rows: Sequence[Sequence[int]], width: int, p: int) -> int:
    return len(rref_rows(rows, width, p))


def subspaces(n: int, d: int, p: int) -> Iterator[Rows]:
    """F_p^n 의 d 차원 부분공간 전체 (RREF 행)"""
    for pivots in combinations(range(n), d):
        free = [
            (r, c)
            for r, pivot in enumerate(pivots)
            for c in range(pivot + 1, n)
            if c not in pivots
        ]
        for values in product(range(p), repeat=len(free)):
            rows = [[int(c == pivot) for c in range(n)] for pivot in pivots]
            for (r, c), value in zip(free, values):
                rows[r][c] = value
            yield tuple(tuple(row) for row in rows)


def gaussian_binomial(n: int, d: int, q: int) -> int:
    """[n choose d]_q"""
    if not 0 <= d <= n:
        return 0
    numerator = denominator = 1
    for k in range(d):
        numerator *= q ** (n - k) - 1
        denominator *= q ** (k + 1) - 1
    return numerator // denominator


def _pivots(rows: Rows) -> Tuple[int, ...]:
    return tuple(next(c for c, value in enumerate(row) if value) for row in rows)


def _sparse(vector: Union[Mapping[Tuple[int, int], int], Sequence[TruncatedLaurentSeries]]) -> SparseVector:
    if isinstance(vector, Mapping):
        return dict(vector)
    return {(e, i): c for i, entry in enumerate(vector) for e, c in entry.terms().items()}


@dataclass(frozen=True)
class Lattice:
    """u^hi O^n ⊂ L ⊂ u^lo O^n 인 O-격자

    L / u^hi O^n 을 창 [lo, hi) 좌표 (k - lo)·n + i 의 RREF 행으로 저장한다.
    lo 는 최대, hi 는 최소로 잡아 같은 격자는 같은 값이 된다.
    """

    n: int
    p: int
    lo: int
    hi: int
    rows: Rows

    @classmethod
    def from_generators(
        cls,
        n: int,
        p: int,
        vectors: Iterable[Union[Mapping[Tuple[int, int], int], Sequence[TruncatedLaurentSeries]]],
        floor: int,
    ) -> "Lattice":
        """생성원들의 O-span + u^floor O^n (u^floor O^n 이 span 에 들어 있다는 것은 호출자가 보장)"""
        sparse = [_sparse(v) for v in vectors]
        sparse = [{key: c % p for key, c in v.items() if c % p and key[0] < floor} for v in sparse]
        sparse = [v for v in sparse if v]
        lo = min([floor] + [k for v in sparse for k, _ in v])
        width = n * (floor - lo)
        rows = []
        for v in sparse:
            lowest = min(k for k, _ in v)
            for shift in range(floor - lowest):
                row = [0] * width
                for (k, i), c in v.items():
                    if k + shift < floor:
                        row[(k + shift - lo) * n + i] = c
                rows.append(row)
        return _canonical(n, p, lo, floor, rows)

    @classmethod
    def standard(cls, n: int, j: int, p: int) -> "Lattice":
        """λ_j = u^{-k}·span(u^{-1}e_1, …, u^{-1}e_r, e_{r+1}, …, e_n), j = kn + r"""
        k, r = divmod(j, n)
        exponents = standard_exponents(n, j)
        vectors = [{(exponents[i], i): 1} for i in range(n)]
        return cls.from_generators(n, p, vectors, 1 - k)

    @classmethod
    def standard_primed(cls, n: int, p: int) -> "Lattice":
        """λ_{m'}: λ_m 에서 e_m 과 e_{m+1} 의 지수를 바꾼 격자 (n = 2m)"""
        exponents = primed_exponents(n)
        vectors = [{(exponents[i], i): 1} for i in range(n)]
        return cls.from_generators(n, p, vectors, 1)

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def rows_in(self, lo: int, hi: int) -> List[List[int]]:
        """더 큰 창 [lo, hi) 에서의 생성 행"""
        if lo > self.lo or hi < self.hi:
            raise ValueError(f"window [{lo}, {hi}) does not contain [{self.lo}, {self.hi})")
        n = self.n
        before, after = (self.lo - lo) * n, (hi - self.hi) * n
        rows = [[0] * before + list(row) + [0] * after for row in self.rows]
        for k in range(self.hi, hi):
            for i in range(n):
                row = [0] * ((hi - lo) * n)
                row[(k - lo) * n + i] = 1
                rows.append(row)
        return rows

    def scaled(self, k: int) -> "Lattice":
        """u^k L"""
        return Lattice(self.n, self.p, self.lo + k, self.hi + k, self.rows)

    def volume(self) -> int:
        """[L : O^n] (형식적 지수), det(L) 의 -ord"""
        return len(self.rows) - self.n * self.hi

    def _check(self, other: "Lattice") -> None:
        if (self.n, self.p) != (other.n, other.p):
            raise ValueError("lattices live in different spaces")

    def __le__(self, other: "Lattice") -> bool:
        self._check(other)
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        width = self.n * (hi - lo)
        base = other.rows_in(lo, hi)
        return rank(base + self.rows_in(lo, hi), width, self.p) == rank(base, width, self.p)

    def __lt__(self, other: "Lattice") -> bool:
        return self <= other and self != other

    def __add__(self, other: "Lattice") -> "Lattice":
        self._check(other)
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return _canonical(self.n, self.p, lo, hi, self.rows_in(lo, hi) + other.rows_in(lo, hi))

    def index_over(self, sub: "Lattice") -> int:
        """dim_F (L / sub), sub ⊂ L"""
        if not sub <= self:
            raise ValueError("index_over needs a sublattice")
        return self.volume() - sub.volume()

    def dual(self) -> "Lattice":
        """φ-쌍대 {w : φ(w, L) ⊂ O}, φ(e_i, e_j) = δ_{i, n+1-j}, 두 번째 변수에 켤레"""
        n, p = self.n, self.p
        lo, hi = -self.hi, -self.lo
        width = n * (hi - lo)
        equations = []
        for row in self.rows:
            terms = {
                (self.lo + idx // n, idx % n): c for idx, c in enumerate(row) if c
            }
            for m in range(lo + self.lo, 0):
                equation = [0] * width
                for (e, j), c in terms.items():
                    k = m - e
                    if lo <= k < hi:
                        i = n - 1 - j
                        equation[(k - lo) * n + i] = c * (-1) ** (e % 2) % p
                if any(equation):
                    equations.append(equation)
        return _canonical(n, p, lo, hi, null_rows(equations, width, p))

    def apply(self, g: SeriesMatrix, g_inverse: SeriesMatrix) -> "Lattice":
        """g·L (g^{-1} 은 창 계산에만 쓴다)"""
        floor = self.hi - min(0, min_exponent(g_inverse))
        generators = []
        for row in self.rows:
            vector = [{} for _ in range(self.n)]
            for idx, c in enumerate(row):
                if c:
                    vector[idx % self.n][self.lo + idx // self.n] = c
            generators.append(vector)
        for i in range(self.n):
            vector = [{} for _ in range(self.n)]
            vector[i][self.hi] = 1
            generators.append(vector)
        images = []
        for vector in generators:
            image = {}
            for a in range(self.n):
                for b, coefficients in enumerate(vector):
                    for e, c in coefficients.items():
                        for f, d in g[a][b].terms().items():
                            key = (e + f, a)
                            image[key] = (image.get(key, 0) + c * d) % self.p
            images.append(image)
        return Lattice.from_generators(self.n, self.p, images, floor)

    def basis(self) -> Tuple[Tuple[TruncatedLaurentSeries, ...], ...]:
        """O-기저 n 개 (L/uL 의 기저를 들어 올린 것)"""
        n, p = self.n, self.p
        lo, hi = self.lo, self.hi + 1
        width = n * (hi - lo)
        full = rref_rows(self.rows_in(lo, hi), width, p)
        shifted = [[0] * n + list(row[: width - n]) for row in full]
        chosen = rref_rows(shifted, width, p)
        picked = []
        current = list(chosen)
        for row in full:
            if rank(current + [row], width, p) > len(current):
                current = list(rref_rows(current + [row], width, p))
                picked.append(row)
        if len(picked) != n:
            raise ValueError(f"L/uL has dimension {len(picked)}, expected {n}")
        vectors = []
        for row in picked:
            entries = [{} for _ in range(n)]
            for idx, c in enumerate(row):
                if c:
                    entries[idx % n][lo + idx // n] = c
            vectors.append(tuple(make_series(p, terms) for terms in entries))
        return tuple(vectors)

    def basis_matrix(self) -> SeriesMatrix:
        """열이 O-기저인 n×n 행렬"""
        return tuple(zip(*self.basis()))

    def to_text(self) -> str:
        vectors = ("(" + ", ".join(entry.to_text() for entry in v) + ")" for v in self.basis())
        return "<" + "; ".join(vectors) + ">"


def _canonical(n: int, p: int, lo: int, hi: int, rows: Sequence[Sequence[int]]) -> Lattice:
    rows = rref_rows(rows, n * (hi - lo), p)
    # hi 줄이기: 맨 위 층 전체가 들어 있으면 몫을 취한다
    while hi > lo:
        width = n * (hi - lo)
        units = [[int(idx == (hi - 1 - lo) * n + i) for idx in range(width)] for i in range(n)]
        if rank(list(rows) + units, width, p) != len(rows):
            break
        rows = rref_rows([row[: width - n] for row in rows], width - n, p)
        hi -= 1
    # lo 올리기: 맨 아래 층이 비어 있으면 잘라낸다
    while lo < hi and all(not any(row[:n]) for row in rows):
        rows = tuple(tuple(row[n:]) for row in rows)
        lo += 1
    if lo == hi:
        rows = ()
    return Lattice(n, p, lo, hi, tuple(rows))


def standard_exponents(n: int, j: int) -> Tuple[int, ...]:
    """λ_j = span(u^{a_i} e_i) 의 지수 a_i"""
    k, r = divmod(j, n)
    return tuple((-1 if i < r else 0) - k for i in range(n))


def primed_exponents(n: int) -> Tuple[int, ...]:
    """λ_{m'} 의 지수: u^{-1}e_1..u^{-1}e_{m-1}, e_m, u^{-1}e_{m+1}, e_{m+2}..e_n"""
    if n % 2 or n < 4:
        raise ValueError(f"the index {PRIMED} exists only for even n ≥ 4, got n = {n}")
    m = n // 2
    exponents = list(standard_exponents(n, m))
    exponents[m - 1], exponents[m] = exponents[m], exponents[m - 1]
    return tuple(exponents)


def sharp_indices(n: int, indices: Iterable[ChainIndex]) -> Tuple[Tuple[int, ...], bool]:
    """I -> (I♯, m' ∈ I)

    짝수 n = 2m 에서 m' ∈ I 이면 m ∈ I 여야 하고, I♯ 는 m' 를 m - 1 로 바꾼 집합이다.
    """
    given = set(indices)
    primed = PRIMED in given
    plain = given - {PRIMED}
    for i in plain:
        if isinstance(i, bool) or not isinstance(i, int):
            raise ValueError(f"unknown chain index {i!r}")
    if not primed:
        return tuple(sorted(plain)), False
    primed_exponents(n)
    m = n // 2
    if m not in plain:
        raise ValueError(f"an index set containing {PRIMED} must also contain {m}")
    if m - 1 in plain:
        raise ValueError(f"index {m - 1} stands for {PRIMED} in I♯ and cannot be given with it")
    return tuple(sorted(plain | {m - 1})), True


def index_labels(n: int, sharp: Sequence[int], primed: bool) -> List[ChainIndex]:
    """I♯ -> I (m - 1 을 다시 m' 로)"""
    if not primed:
        return list(sharp)
    return [i for i in sharp if i != n // 2 - 1] + [PRIMED]


def elementary_divisors(lattice: Lattice, other: Lattice) -> Tuple[int, ...]:
    """other = ⊕ u^{a_i} O b_i 인 L 의 적응 기저 b 에 대한 a_1 ≤ … ≤ a_n"""
    lattice._check(other)
    low = 0
    while not other <= lattice.scaled(low):
        low -= 1
    while other <= lattice.scaled(low + 1):
        low += 1
    high = low
    while not lattice.scaled(high) <= other:
        high += 1

    def excess(k: int) -> int:
        # dim (other + u^k L) / u^k L
        shifted = lattice.scaled(k)
        return (other + shifted).volume() - shifted.volume()

    values = [excess(k) for k in range(low, high + 2)]
    counts = [values[t + 1] - values[t] for t in range(len(values) - 1)]
    divisors = []
    previous = 0
    for offset, count in enumerate(counts):
        divisors.extend([low + offset] * (count - previous))
        previous = count
    if len(divisors) != lattice.n:
        raise ValueError(f"relative position has {len(divisors)} entries, expected {lattice.n}")
    return tuple(divisors)


def shell_lattices(n: int, j: int, p: int, dimension: Optional[int] = None) -> Iterator[Lattice]:
    """u·λ_j ⊂ L ⊂ u^{-1}·λ_j, dim(L / u·λ_j) = dimension 인 격자 전체

    E = L / u·λ_j 는 u² = 0 인 2n 차원 공간의 u-불변 부분공간이다.
    아래 층 A = E ∩ (λ_j / uλ_j), 위 층의 상 B 에 대해 B ⊂ A 이고
    B 의 들어올림은 A 의 여공간 좌표로 정해진다.
    """
    dimension = n if dimension is None else dimension
    exponents = standard_exponents(n, j)
    floor = max(exponents) + 1
    base = [{(a + 1, i): 1} for i, a in enumerate(exponents)]
    for b in range(0, n + 1):
        rest = dimension - b
        if rest < b or rest > n:
            continue
        for upper in subspaces(n, b, p):
            for lower in subspaces(n, rest, p):
                if rank(list(lower) + list(upper), n, p) != len(lower):
                    continue
                pivots = _pivots(lower)
                free = [c for c in range(n) if c not in pivots]
                lower_vectors = [
                    {(exponents[i], i): c for i, c in enumerate(row) if c} for row in lower
                ]
                for values in product(range(p), repeat=b * len(free)):
                    lifts = []
                    for t, row in enumerate(upper):
                        vector = {(exponents[i] - 1, i): c for i, c in enumerate(row) if c}
                        for s, c in enumerate(free):
                            value = values[t * len(free) + s]
                            if value:
                                vector[(exponents[c], c)] = value
                        lifts.append(vector)
                    yield Lattice.from_generators(n, p, base + lower_vectors + lifts, floor)


@dataclass(frozen=True)
class ChainCheck:
    valid: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class HermitianLatticeChain:
    """주기적 격자 사슬 L_i (i ∈ indices)

    split 은 0 ≤ i < n 인 SL_n 사슬이고, unitary/special_unitary 는
    0 ≤ i ≤ n/2 인 I♯ 위에서 주어지며 L_{-i} = L̂_i 로 나머지를 채운다.
    primed 는 m' ∈ I 일 때의 L_{m'} (I♯ 에는 m - 1 과 m 이 들어 있다).
    """

    n: int
    p: int
    indices: Tuple[int, ...]
    lattices: Tuple[Lattice, ...]
    mode: str = "split"
    primed: Optional[Lattice] = None

    def __post_init__(self):
        if self.mode not in CHAIN_MODES:
            raise ValueError(f"unknown chain mode {self.mode!r}; expected one of {CHAIN_MODES}")
        if len(self.indices) != len(self.lattices) or not self.indices:
            raise ValueError("a chain needs one lattice per index")
        if list(self.indices) != sorted(set(self.indices)):
            raise ValueError(f"chain indices {self.indices} must be strictly increasing")
        bound = self.n - 1 if self.mode == "split" else self.n // 2
        if self.indices[0] < 0 or self.indices[-1] > bound:
            raise ValueError(f"chain indices {self.indices} out of range 0..{bound} for {self.mode}")
        if self.primed is not None:
            if self.mode == "split":
                raise ValueError(f"split chains have no index {PRIMED}")
            primed_exponents(self.n)
            m = self.n // 2
            if m not in self.indices or m - 1 not in self.indices:
                raise ValueError(f"a chain with L_{PRIMED} needs indices {m - 1} and {m}")

    def all_indices(self) -> Tuple[int, ...]:
        """한 주기 [0, n) 안의 모든 첨자"""
        if self.mode == "split":
            return self.indices
        return tuple(sorted(set(self.indices) | {self.n - i for i in self.indices if i > 0}))

    def lattice(self, j: int) -> Lattice:
        k, r = divmod(j, self.n)
        if r in self.indices:
            return self.lattices[self.indices.index(r)].scaled(-k)
        if self.mode != "split" and r > 0 and self.n - r in self.indices:
            partner = self.lattices[self.indices.index(self.n - r)]
            return partner.dual().scaled(-1 - k)
        raise ValueError(f"index {j} is not part of the chain {self.indices}")

    def apply(self, g: SeriesMatrix, g_inverse: SeriesMatrix) -> "HermitianLatticeChain":
        lattices = tuple(lattice.apply(g, g_inverse) for lattice in self.lattices)
        primed = None if self.primed is None else self.primed.apply(g, g_inverse)
        return HermitianLatticeChain(self.n, self.p, self.indices, lattices, self.mode, primed)

    def restrict(self, indices: Iterable[int]) -> Tuple[Lattice, ...]:
        return tuple(self.lattice(i) for i in sorted(indices))

    def to_lines(self) -> List[str]:
        lines = [f"L_{i} = {lattice.to_text()}" for i, lattice in zip(self.indices, self.lattices)]
        if self.primed is not None:
            lines.append(f"L_{PRIMED} = {self.primed.to_text()}")
        return lines


def standard_chain(
    n: int, indices: Iterable[ChainIndex], p: int, mode: str = "split"
) -> HermitianLatticeChain:
    """λ_{I♯} (m' ∈ I 이면 λ_{m'} 도 함께)"""
    sharp, primed = sharp_indices(n, indices)
    lattices = tuple(Lattice.standard(n, i, p) for i in sharp)
    partner = Lattice.standard_primed(n, p) if primed else None
    return HermitianLatticeChain(n, p, sharp, lattices, mode, partner)


def isotropic_partner(lower: Lattice, upper: Lattice, taken: Lattice) -> Lattice:
    """lower ⊂ M ⊂ upper, dim M/lower = 1, M = u^{-1}M̂ 인 두 격자 중 taken 이 아닌 것"""
    if not lower <= upper or upper.index_over(lower) != 2:
        raise ValueError("the isotropic partner needs a two dimensional quotient")
    n, p = lower.n, lower.p
    generators = list(lower.basis())
    current = lower
    spanning = []
    for vector in upper.basis():
        grown = Lattice.from_generators(n, p, generators + spanning + [vector], lower.hi)
        if grown != current:
            spanning.append(vector)
            current = grown
        if len(spanning) == 2:
            break
    x, y = spanning
    lines = [y] + [tuple(a + b * c for a, b in zip(x, y)) for c in range(p)]
    found = []
    for vector in lines:
        candidate = Lattice.from_generators(n, p, generators + [vector], lower.hi)
        if candidate != taken and candidate == candidate.dual().scaled(-1):
            found.append(candidate)
    if len(found) != 1:
        raise ValueError(f"expected one self-dual lattice besides the given one, found {len(found)}")
    return found[0]


def attach_primed(chain: HermitianLatticeChain) -> HermitianLatticeChain:
    """I♯ 사슬에서 L_{m'} 을 복원한다 (L_{m-1} ⊂ L_{m'} ⊂ L_{m+1}, L_{m'} ≠ L_m)"""
    m = chain.n // 2
    partner = isotropic_partner(chain.lattice(m - 1), chain.lattice(m + 1), chain.lattice(m))
    return replace(chain, primed=partner)


def validate_chain(chain: HermitianLatticeChain) -> ChainCheck:
    """포함, 몫 차원, 쌍대 샌드위치, 행렬식 조건을 차례로 확인"""
    n, p = chain.n, chain.p
    reps = chain.all_indices()
    steps = list(zip(reps, reps[1:])) + [(reps[-1], reps[0] + n)]
    for a, b in steps:
        lower, upper = chain.lattice(a), chain.lattice(b)
        if not lower <= upper:
            return ChainCheck(False, f"L_{a} is not contained in L_{b}")
        if upper.index_over(lower) != b - a:
            return ChainCheck(
                False, f"L_{b}/L_{a} has dimension {upper.index_over(lower)}, expected {b - a}"
            )
    if chain.mode != "split":
        for i in chain.indices:
            lattice = chain.lattice(i)
            middle = lattice.dual().scaled(-1)
            if not (lattice <= middle and middle <= lattice.scaled(-1)):
                return ChainCheck(False, f"duality sandwich fails at L_{i}")
    if chain.mode != "unitary":
        first = reps[0]
        if chain.lattice(first).volume() != Lattice.standard(n, first, p).volume():
            return ChainCheck(False, f"det(L_{first}) differs from det(λ_{first})")
    if chain.primed is not None:
        return _validate_primed(chain)
    return ChainCheck(True)


def _validate_primed(chain: HermitianLatticeChain) -> ChainCheck:
    m = chain.n // 2
    primed = chain.primed
    below, above = chain.lattice(m - 1), chain.lattice(m + 1)
    if not (below <= primed and primed <= above):
        return ChainCheck(False, f"L_{PRIMED} does not lie between L_{m - 1} and L_{m + 1}")
    if primed.index_over(below) != 1:
        return ChainCheck(False, f"L_{PRIMED}/L_{m - 1} has dimension {primed.index_over(below)}, expected 1")
    if primed != primed.dual().scaled(-1):
        return ChainCheck(False, f"L_{PRIMED} is not self-dual up to u")
    if primed == chain.lattice(m):
        return ChainCheck(False, f"L_{PRIMED} coincides with L_{m}")
    standard = Lattice.standard_primed(chain.n, chain.p)
    if chain.mode == "special_unitary" and primed.volume() != standard.volume():
        return ChainCheck(False, f"det(L_{PRIMED}) differs from det(λ_{PRIMED})")
    return ChainCheck(True)
