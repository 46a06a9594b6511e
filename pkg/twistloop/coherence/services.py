import logging
import random
from itertools import combinations, product
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from django.conf import settings
from django.db import transaction

from .admissible import adm, adm_Y
from .dims import check_coherence, weyl_dim
from .loops.cells import cell_points, loop_group
from .loops.fiber import enumerate_fiber
from .loops.kottwitz import invariant_of, norm_one_elements, pi0_invariants
from .loops.series import check_prime, parse_series, series_matrix
from .models import CoherenceRecord
from .paths import count_finite_paths, count_h_Y, ls_paths_constrained, shape_weight
from .root_data import echelon_system, finite_system, load_affine_datum, special_nodes, supported_names
from .schemas import (
    AdmissibleSummarySchema,
    BruhatLeqSchema,
    CalibrationRowSchema,
    CellsSchema,
    CoherenceReport,
    DatumInfoSchema,
    FiberRecord,
    HPolySchema,
    KottwitzSchema,
    NormOneCheckSchema,
    SweepRowSchema,
    WeylElementSchema,
)
from .weyl import bruhat_leq, length, omega_permutation, parse_element, to_spec, word_spec

logger = logging.getLogger(__name__)

Nodes = Union[str, Sequence[int]]


def _nodes(datum, y_nodes: Nodes) -> List[List[int]]:
    """'all' 이면 공집합이 아닌 모든 Y"""
    if y_nodes == "all":
        nodes = datum.nodes
        return [list(c) for size in range(1, len(nodes) + 1) for c in combinations(nodes, size)]
    return [sorted(set(y_nodes))]


class DatumService:
    """근 데이터 조회 서비스"""

    @staticmethod
    def info(name: str, special: Optional[int] = None) -> DatumInfoSchema:
        datum = load_affine_datum(name)
        if special is None:
            special = settings.TWISTLOOP["DEFAULT_SPECIAL_NODE"]
        system = echelon_system(datum, special)
        return DatumInfoSchema(
            name=datum.name,
            cartan=[list(row) for row in datum.cartan],
            marks=list(datum.marks),
            comarks=list(datum.comarks),
            kappa=list(datum.kappa),
            twist_order=datum.twist_order,
            split_parent=datum.split_parent,
            special_nodes=list(special_nodes(datum)),
            omega_order=system.omega_order,
        )

    @staticmethod
    def names() -> List[str]:
        return supported_names()


class WeylService:
    """아핀 Weyl 군 원소 서비스"""

    @staticmethod
    def describe(name: str, spec: str, special: Optional[int] = None) -> WeylElementSchema:
        if special is None:
            special = settings.TWISTLOOP["DEFAULT_SPECIAL_NODE"]
        w = parse_element(echelon_system(load_affine_datum(name), special), spec)
        return WeylElementSchema(
            datum=name, elt=spec, canonical=to_spec(w), word=word_spec(w), length=length(w)
        )

    @staticmethod
    def leq(name: str, lower: str, upper: str, special: Optional[int] = None) -> BruhatLeqSchema:
        if special is None:
            special = settings.TWISTLOOP["DEFAULT_SPECIAL_NODE"]
        system = echelon_system(load_affine_datum(name), special)
        v, w = parse_element(system, lower), parse_element(system, upper)
        return BruhatLeqSchema(datum=name, lower=to_spec(v), upper=to_spec(w), leq=bruhat_leq(v, w))


class AdmissibleService:
    """허용 집합 서비스"""

    @staticmethod
    def summary(
        name: str,
        mu: Sequence[int],
        y_nodes: Optional[Sequence[int]] = None,
        with_elements: bool = False,
        cap: Optional[int] = None,
    ) -> AdmissibleSummarySchema:
        adm_set = adm(load_affine_datum(name), mu, cap=cap)
        ordered = sorted(adm_set.elements, key=lambda w: (length(w), word_spec(w)))
        result = {
            "datum": name,
            "mu": list(mu),
            "lam": list(adm_set.lam),
            "tau": word_spec(adm_set.tau),
            "size": len(adm_set),
            "maximal_elements": sorted(word_spec(w) for w in adm_set.maximal_elements),
            "elements": [word_spec(w) for w in ordered] if with_elements else None,
        }
        if y_nodes:
            saturated = adm_Y(adm_set, y_nodes, cap=cap)
            result.update(
                y_nodes=sorted(saturated.y_nodes),
                saturated_size=len(saturated.full),
                cosets=len(saturated.mod_right),
            )
        return AdmissibleSummarySchema(**result)


class PathService:
    """LS 경로 서비스"""

    @staticmethod
    def hpoly(
        name: str,
        mu: Sequence[int],
        y_nodes: Sequence[int],
        a: int,
        emit_paths: bool = False,
        cap: Optional[int] = None,
    ) -> HPolySchema:
        datum = load_affine_datum(name)
        payload: Dict[str, Any] = {
            "datum": name,
            "mu": list(mu),
            "Y": sorted(set(y_nodes)),
            "a": a,
            "h_Y": count_h_Y(datum, mu, y_nodes, a, cap=cap),
        }
        if emit_paths:
            adm_set = adm(datum, mu, cap=cap)
            saturated = adm_Y(adm_set, y_nodes, cap=cap)
            shape = shape_weight(datum, y_nodes, a, omega_permutation(adm_set.tau))
            paths = ls_paths_constrained(adm_set.system, shape, saturated.mod_right, cap)
            payload["paths"] = sorted(path.to_line() for path in paths)
        return HPolySchema(**payload)

    @staticmethod
    def calibrate(type_names: Iterable[str] = ("A2", "C2"), bound: int = 8) -> List[CalibrationRowSchema]:
        """⟨λ, 2ρ^∨⟩ ≤ bound 인 우세 λ 마다 LS 경로 수와 weyl_dim 비교"""
        rows = []
        for type_name in type_names:
            system = finite_system(type_name)
            for weight in dominant_weights(system, bound):
                paths = count_finite_paths(system, weight)
                dimension = weyl_dim(system, weight)
                rows.append(
                    CalibrationRowSchema(
                        type=type_name,
                        weight=",".join(str(c) for c in weight),
                        paths=paths,
                        weyl_dim=dimension,
                        equal=paths == dimension,
                    )
                )
        failed = [row for row in rows if not row.equal]
        if failed:
            logger.warning(f"path model calibration failed on {len(failed)} weights")
        return rows


def dominant_weights(system, bound: int) -> List[Tuple[int, ...]]:
    """⟨λ, 2ρ^∨⟩ ≤ bound 인 우세 가중치 (기본 가중치 좌표)"""
    found = []
    for weight in product(range(bound + 1), repeat=system.rank):
        total = sum(sum(w * c for w, c in zip(weight, coroot)) for coroot in system.positive_coroots)
        if total <= bound:
            found.append(weight)
    return found


class CoherenceService:
    """정합성 비교와 보관 서비스"""

    @staticmethod
    def check(
        name: str,
        mu: Union[Sequence[int], Sequence[Sequence[int]]],
        y_nodes: Nodes,
        a_values: Sequence[int],
        cap: Optional[int] = None,
    ) -> List[CoherenceReport]:
        datum = load_affine_datum(name)
        return [
            check_coherence(datum, mu, y, a, cap=cap)
            for y in _nodes(datum, y_nodes)
            for a in a_values
        ]

    @staticmethod
    def sweep(rows: Sequence[Dict[str, Any]], cap: Optional[int] = None) -> List[CoherenceReport]:
        """입력 순서대로 각 줄을 검사"""
        reports = []
        for raw in rows:
            row = SweepRowSchema(**raw)
            a_values = row.a if isinstance(row.a, list) else [row.a]
            reports.extend(CoherenceService.check(row.datum, row.mu, row.Y, a_values, cap))
        return reports

    @staticmethod
    @transaction.atomic
    def archive(reports: Iterable[CoherenceReport]) -> List[CoherenceRecord]:
        records = [
            CoherenceRecord.objects.create(
                datum=report.datum,
                mu=",".join(str(c) for c in report.mu),
                y_nodes=",".join(str(i) for i in report.y_nodes),
                a=report.a,
                h_y=report.h_y,
                h=report.h,
                equal=report.equal,
                proven=report.proven,
                status=report.status,
                elapsed=report.elapsed,
            )
            for report in reports
        ]
        logger.info(f"archived {len(records)} coherence reports")
        return records


class LoopService:
    """루프 군 계산 서비스"""

    @staticmethod
    def kottwitz(torus: str, q: int, element: str, precision: Optional[int] = None) -> KottwitzSchema:
        """원소 표기: gm 은 t, norm1 은 u 의 급수, un 과 sun 은 ';' 로 행, ',' 로 열을 나눈 행렬

        precision 이 없으면 O(u^k) 항이 없는 한 정확한 Laurent 다항식으로 읽는다.
        """
        check_prime(q)
        if torus in ("un", "sun"):
            rows = [
                [parse_series(entry, q, precision) for entry in row.split(",")]
                for row in element.split(";")
            ]
            if any(len(row) != len(rows) for row in rows):
                raise ValueError(f"matrix {element!r} is not square")
            value = invariant_of(torus, series_matrix(q, rows))
        else:
            variable = "t" if torus == "gm" else "u"
            value = invariant_of(torus, parse_series(element, q, precision, variable))
        return KottwitzSchema(torus=torus, q=q, elt=element, kappa=value, pi0=list(pi0_invariants(torus)))

    @staticmethod
    def norm_one_check(
        q: int, precision: Optional[int] = None, seed: Optional[int] = None, samples: int = 200
    ) -> NormOneCheckSchema:
        """노름 1 단원 임의 쌍에서 κ(ab) = κ(a)κ(b) 확인"""
        if precision is None:
            precision = settings.TWISTLOOP["SERIES_PRECISION"]
        if seed is None:
            seed = settings.TWISTLOOP["SEED"]
        rng = random.Random(seed)
        units = norm_one_elements(q, precision)
        failures = 0
        for _ in range(samples):
            a, b = rng.choice(units), rng.choice(units)
            if invariant_of("norm1", a * b) != invariant_of("norm1", a) * invariant_of("norm1", b):
                failures += 1
        if failures:
            logger.warning(f"norm-one κ failed to be multiplicative on {failures} of {samples} pairs")
        return NormOneCheckSchema(
            q=q, precision=precision, seed=seed, units=len(units), samples=samples, failures=failures
        )

    @staticmethod
    def cells(
        group_name: str, word: Sequence[int], q: int, count_only: bool = False, cap: Optional[int] = None
    ) -> CellsSchema:
        group = loop_group(group_name)
        points = cell_points(group, tuple(word), q, cap)
        payload: Dict[str, Any] = {
            "group": group.name,
            "word": ".".join(f"s{i}" for i in word) or "e",
            "q": q,
            "length": len(word),
            "count": len(points),
        }
        if not count_only:
            payload["points"] = [chain.to_lines() for chain in points]
        return CellsSchema(**payload)

    @staticmethod
    def fiber(
        n: int,
        r: int,
        q: int,
        indices: Sequence[Union[int, str]],
        s: Optional[int] = None,
        wedge: bool = True,
        cap: Optional[int] = None,
    ) -> FiberRecord:
        if s is None:
            s = n - r
        return enumerate_fiber(n, r, s, q, indices, cap=cap, wedge=wedge)
