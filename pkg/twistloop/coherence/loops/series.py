import logging
import re
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from django.conf import settings
from sympy import isprime
from sympy.combinatorics import Permutation
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_add, gf_gcdex, gf_lshift, gf_mul, gf_strip

logger = logging.getLogger(__name__)

_O_TERM = re.compile(r"^O\((?P<var>[a-z])(?:\^(?P<exp>-?\d+))?\)$")
_TERM = re.compile(r"^(?P<sign>-?)(?:(?P<coef>\d+)\*?)?(?:(?P<var>[a-z])(?:\^(?P<exp>-?\d+))?)?$")


def check_prime(p: int) -> int:
    if not isprime(p):
        raise ValueError(f"q = {p} is not prime; only prime fields F_p are supported")
    return p


@dataclass(frozen=True)
class TruncatedLaurentSeries:
    """Σ c_j u^{v+j} + O(u^precision), F_p 계수

    precision 이 None 이면 정확한 Laurent 다항식이다.
    계수가 있으면 coefficients[0] != 0 이고 valuation 은 곧 ord 이다.
    """

    p: int
    valuation: int
    coefficients: Tuple[int, ...]
    precision: Optional[int] = None
    variable: str = "u"

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    def terms(self) -> Dict[int, int]:
        return {self.valuation + j: c for j, c in enumerate(self.coefficients) if c}

    def is_zero(self) -> bool:
        return not self.coefficients

    def ord(self) -> int:
        if not self.coefficients:
            if self.is_exact:
                raise ValueError("the zero series has no order")
            raise ValueError(
                f"series is zero modulo {self.variable}^{self.precision}; order undecidable"
            )
        return self.valuation

    def coefficient(self, exponent: int) -> int:
        if self.precision is not None and exponent >= self.precision:
            raise ValueError(
                f"coefficient of {self.variable}^{exponent} is beyond precision {self.precision}"
            )
        return self.terms().get(exponent, 0)

    def constant_term(self) -> int:
        return self.coefficient(0)

    def truncate(self, precision: int) -> "TruncatedLaurentSeries":
        if self.precision is not None:
            precision = min(precision, self.precision)
        return make_series(self.p, self.terms(), precision, self.variable)

    def conjugate(self) -> "TruncatedLaurentSeries":
        """u ↦ -u"""
        terms = {e: c * (-1) ** (e % 2) for e, c in self.terms().items()}
        return make_series(self.p, terms, self.precision, self.variable)

    def inverse(self, relative_precision: Optional[int] = None) -> "TruncatedLaurentSeries":
        """단원 역원, 정확한 다항식은 단항식이 아니면 relative_precision 에서 자른다"""
        if not self.coefficients:
            raise ValueError("cannot invert a series that is zero within precision")
        v = self.valuation
        if self.is_exact:
            if len(self.coefficients) == 1:
                c = pow(self.coefficients[0], -1, self.p)
                return make_series(self.p, {-v: c}, None, self.variable)
            n = relative_precision or settings.TWISTLOOP["SERIES_PRECISION"]
        else:
            n = self.precision - v
        unit = gf_strip([ZZ(c) for c in reversed(self.coefficients[:n])])
        modulus = [ZZ(1)] + [ZZ(0)] * n
        inverse, _, _ = gf_gcdex(unit, modulus, self.p, ZZ)
        return _from_poly(self.p, -v, inverse, n - v, self.variable)

    def _poly(self) -> List:
        return gf_strip([ZZ(c) for c in reversed(self.coefficients)])

    def _known_order(self) -> int:
        return self.valuation if self.coefficients else self.precision

    def _coerce(self, other) -> "TruncatedLaurentSeries":
        if isinstance(other, int):
            return make_series(self.p, {0: other}, None, self.variable)
        if isinstance(other, TruncatedLaurentSeries):
            if other.p != self.p:
                raise ValueError(f"cannot combine series over F_{self.p} and F_{other.p}")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        base = min(self.valuation, other.valuation)
        poly = gf_add(
            gf_lshift(self._poly(), self.valuation - base, ZZ),
            gf_lshift(other._poly(), other.valuation - base, ZZ),
            self.p,
            ZZ,
        )
        return _from_poly(self.p, base, poly, _min_precision(self.precision, other.precision), self.variable)

    __radd__ = __add__

    def __neg__(self):
        return make_series(self.p, {e: -c for e, c in self.terms().items()}, self.precision, self.variable)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if (self.is_exact and self.is_zero()) or (other.is_exact and other.is_zero()):
            return make_series(self.p, {}, None, self.variable)
        # A·O(u^P2) + B·O(u^P1)
        bounds = []
        if self.precision is not None:
            bounds.append(self.precision + other._known_order())
        if other.precision is not None:
            bounds.append(other.precision + self._known_order())
        precision = min(bounds) if bounds else None
        poly = gf_mul(self._poly(), other._poly(), self.p, ZZ)
        return _from_poly(self.p, self.valuation + other.valuation, poly, precision, self.variable)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = make_series(self.p, {0: 1}, None, self.variable)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def to_text(self) -> str:
        parts = []
        for e, c in sorted(self.terms().items()):
            if e == 0:
                parts.append(str(c))
                continue
            power = self.variable if e == 1 else f"{self.variable}^{e}"
            parts.append(power if c == 1 else f"{c}*{power}")
        text = " + ".join(parts) or "0"
        if self.precision is not None:
            text += f" + O({self.variable}^{self.precision})"
        return text

    def __str__(self) -> str:
        return self.to_text()


def _min_precision(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _from_poly(
    p: int, shift: int, poly: Sequence, precision: Optional[int], variable: str
) -> TruncatedLaurentSeries:
    degree = len(poly) - 1
    terms = {shift + degree - k: int(c) for k, c in enumerate(poly) if c}
    return make_series(p, terms, precision, variable)


def make_series(
    p: int,
    terms: Mapping[int, int],
    precision: Optional[int] = None,
    variable: str = "u",
) -> TruncatedLaurentSeries:
    """{지수: 계수} 로부터 정규형 생성"""
    kept = {
        e: c % p for e, c in terms.items() if c % p and (precision is None or e < precision)
    }
    if not kept:
        return TruncatedLaurentSeries(p, precision if precision is not None else 0, (), precision, variable)
    low = min(kept)
    high = max(kept) + 1 if precision is None else precision
    coefficients = tuple(kept.get(e, 0) for e in range(low, high))
    return TruncatedLaurentSeries(p, low, coefficients, precision, variable)


def monomial(
    p: int, exponent: int, coefficient: int = 1, precision: Optional[int] = None, variable: str = "u"
) -> TruncatedLaurentSeries:
    return make_series(p, {exponent: coefficient}, precision, variable)


def parse_series(
    text: str, p: int, precision: Optional[int] = None, variable: str = "u"
) -> TruncatedLaurentSeries:
    """'u^-1 + 2*u^0 + u^2 + O(u^4)' 형식"""
    check_prime(p)
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise ValueError("empty series")
    compact = re.sub(r"(?<![\^(])-", "+-", compact)
    terms: Dict[int, int] = {}
    for term in compact.split("+"):
        if not term:
            continue
        big_o = _O_TERM.match(term)
        if big_o:
            if big_o["var"] != variable:
                raise ValueError(f"unexpected variable {big_o['var']!r} in {term!r}")
            bound = int(big_o["exp"] or 1)
            precision = bound if precision is None else min(precision, bound)
            continue
        match = _TERM.match(term)
        if not match or not (match["coef"] or match["var"]):
            raise ValueError(f"cannot parse series term {term!r}")
        if match["var"] and match["var"] != variable:
            raise ValueError(f"unexpected variable {match['var']!r} in {term!r}")
        if match["exp"] and not match["var"]:
            raise ValueError(f"cannot parse series term {term!r}")
        exponent = int(match["exp"] or 1) if match["var"] else 0
        coefficient = int(match["coef"] or 1) * (-1 if match["sign"] else 1)
        terms[exponent] = terms.get(exponent, 0) + coefficient
    return make_series(p, terms, precision, variable)


SeriesMatrix = Tuple[Tuple[TruncatedLaurentSeries, ...], ...]
Entry = Union[int, Mapping[int, int], TruncatedLaurentSeries]


def series_matrix(p: int, rows: Sequence[Sequence[Entry]], variable: str = "u") -> SeriesMatrix:
    """정수, {지수: 계수}, 급수가 섞인 행들로 정확한 행렬 생성"""

    def entry(value):
        if isinstance(value, TruncatedLaurentSeries):
            return value
        if isinstance(value, int):
            return make_series(p, {0: value}, None, variable)
        return make_series(p, value, None, variable)

    return tuple(tuple(entry(value) for value in row) for row in rows)


def matrix_identity(n: int, p: int, variable: str = "u") -> SeriesMatrix:
    return series_matrix(p, [[int(i == j) for j in range(n)] for i in range(n)], variable)


def matrix_product(a: SeriesMatrix, b: SeriesMatrix) -> SeriesMatrix:
    size = len(b)
    if any(len(row) != size for row in a):
        raise ValueError("matrix dimensions do not match")
    columns = list(zip(*b))
    result = []
    for row in a:
        out = []
        for column in columns:
            total = row[0] * column[0]
            for k in range(1, size):
                total = total + row[k] * column[k]
            out.append(total)
        result.append(tuple(out))
    return tuple(result)


def matrix_conjugate(a: SeriesMatrix) -> SeriesMatrix:
    return tuple(tuple(entry.conjugate() for entry in row) for row in a)


def transpose(a: SeriesMatrix) -> SeriesMatrix:
    return tuple(zip(*a))


def determinant(a: SeriesMatrix) -> TruncatedLaurentSeries:
    """Leibniz 전개 (n ≤ 4 용)"""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    total = a[0][0] * 0
    for sigma in permutations(range(n)):
        term = a[0][sigma[0]]
        for i in range(1, n):
            term = term * a[i][sigma[i]]
        total = total + term * Permutation(list(sigma)).signature()
    return total


def min_exponent(a: SeriesMatrix) -> int:
    """영이 아닌 성분의 최소 지수"""
    orders = [entry.valuation for row in a for entry in row if not entry.is_zero()]
    if not orders:
        raise ValueError("zero matrix")
    return min(orders)


def matrix_text(a: SeriesMatrix) -> str:
    return "[" + "; ".join(", ".join(entry.to_text() for entry in row) for row in a) + "]"
