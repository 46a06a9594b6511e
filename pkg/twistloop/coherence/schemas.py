from typing import Any, Dict, List, Literal, Optional, Union

from ninja import Schema
from pydantic import ConfigDict, Field, field_validator, model_validator


class CoherenceReport(Schema):
    """h^(μ)_Y(a) 와 h^(μ)(|Y|·a) 비교 결과 (생성 후 불변)"""

    model_config = ConfigDict(frozen=True)

    datum: str
    mu: List[int]
    y_nodes: List[int]
    a: int
    h_y: int
    h: int
    equal: bool
    proven: bool
    elapsed: float = 0.0

    @model_validator(mode="after")
    def check_equal_flag(self):
        if self.equal != (self.h_y == self.h):
            raise ValueError("equal must agree with h_y == h")
        return self

    @property
    def status(self) -> str:
        # 증명된 계열에서의 불일치만 unequal, 나머지 불일치는 open
        if self.equal:
            return "equal"
        return "unequal" if self.proven else "open"

    def row(self) -> Dict[str, Any]:
        return {
            "datum": self.datum,
            "mu": ",".join(str(c) for c in self.mu),
            "Y": ",".join(str(i) for i in self.y_nodes),
            "a": self.a,
            "h_Y": self.h_y,
            "h": self.h,
            "equal": self.equal,
        }


class SweepRowSchema(Schema):
    """sweep 설정 파일의 한 줄"""

    datum: str
    mu: List[Union[int, List[int]]]
    Y: Union[List[int], Literal["all"]] = "all"
    a: Union[int, List[int]] = 1

    @field_validator("mu")
    @classmethod
    def check_mu(cls, value):
        if not value:
            raise ValueError("mu must not be empty")
        nested = [isinstance(c, list) for c in value]
        if any(nested) and not all(nested):
            raise ValueError("mu must be a coweight or a list of coweights")
        return value

    @field_validator("a")
    @classmethod
    def check_a(cls, value):
        values = value if isinstance(value, list) else [value]
        if not values or any(v <= 0 for v in values):
            raise ValueError("a must be positive")
        return value


class DatumInfoSchema(Schema):
    name: str
    cartan: List[List[int]]
    marks: List[int]
    comarks: List[int]
    kappa: List[int]
    twist_order: int
    split_parent: str
    special_nodes: List[int]
    omega_order: int


class AdmissibleSummarySchema(Schema):
    datum: str
    mu: List[int]
    lam: List[int]
    tau: str
    size: int
    maximal_elements: List[str]
    elements: Optional[List[str]] = None
    y_nodes: Optional[List[int]] = None
    saturated_size: Optional[int] = None
    cosets: Optional[int] = None


class WeylElementSchema(Schema):
    model_config = ConfigDict(frozen=True)

    datum: str
    elt: str
    canonical: str
    word: str
    length: int = Field(ge=0)


class BruhatLeqSchema(Schema):
    model_config = ConfigDict(frozen=True)

    datum: str
    lower: str
    upper: str
    leq: bool


class HPolySchema(Schema):
    """h^(μ)_Y(a), 경로 목록은 요청했을 때만"""

    model_config = ConfigDict(frozen=True)

    datum: str
    mu: List[int]
    Y: List[int]
    a: int = Field(gt=0)
    h_Y: int = Field(ge=0)
    paths: Optional[List[str]] = None

    @model_validator(mode="after")
    def check_paths(self):
        if self.paths is not None and len(self.paths) != self.h_Y:
            raise ValueError("paths must list exactly h_Y paths")
        return self


class CalibrationRowSchema(Schema):
    model_config = ConfigDict(frozen=True)

    type: str
    weight: str
    paths: int
    weyl_dim: int
    equal: bool

    @model_validator(mode="after")
    def check_equal_flag(self):
        if self.equal != (self.paths == self.weyl_dim):
            raise ValueError("equal must agree with paths == weyl_dim")
        return self


class KottwitzSchema(Schema):
    """κ 값과 π_0(LG) 의 불변 인자"""

    model_config = ConfigDict(frozen=True)

    torus: Literal["gm", "norm1", "un", "sun"]
    q: int
    elt: str
    kappa: int
    pi0: List[int]


class NormOneCheckSchema(Schema):
    model_config = ConfigDict(frozen=True)

    torus: Literal["norm1"] = "norm1"
    q: int
    precision: int = Field(gt=0)
    seed: int
    units: int
    samples: int = Field(ge=0)
    failures: int = Field(ge=0)


class CellsSchema(Schema):
    """셀 점 개수, count_only 면 points 없음"""

    model_config = ConfigDict(frozen=True)

    group: str
    word: str
    q: int
    length: int = Field(ge=0)
    count: int = Field(ge=0)
    points: Optional[List[List[str]]] = None


class CommandResult(Schema):
    """run(argv) 의 결과"""

    schema_version: str
    command: str
    status: int = Field(ge=0, le=3)
    payload: Any = None
    error: Optional[str] = None
    text: str = ""
    elapsed: float = 0.0  # 벽시계 시간, payload 에는 넣지 않는다


class FiberRecord(Schema):
    """특수 올 열거 결과 (n = 3 이 아니면 허용 집합 비교는 None)"""

    model_config = ConfigDict(frozen=True)

    n: int
    r: int
    s: int
    q: int
    indices: List[Union[int, str]]  # I, 짝수 n 의 m' 포함
    wedge: bool = True
    naive_count: int
    adm_count: Optional[int] = None
    contains_admissible: Optional[bool] = None
    elapsed: float = 0.0

    def label(self) -> str:
        indices = ",".join(str(i) for i in self.indices)
        return f"n={self.n} (r,s)=({self.r},{self.s}) q={self.q} I={{{indices}}}"

    def row(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "r": self.r,
            "s": self.s,
            "q": self.q,
            "I": ",".join(str(i) for i in self.indices),
            "naive_count": self.naive_count,
            "adm_count": "" if self.adm_count is None else self.adm_count,
            "contains_admissible": "" if self.contains_admissible is None else self.contains_admissible,
        }
