import pytest
from pydantic import ValidationError

from .models import CoherenceRecord
from .schemas import CalibrationRowSchema, CellsSchema, CoherenceReport, HPolySchema, WeylElementSchema
from .services import (
    AdmissibleService,
    CoherenceService,
    DatumService,
    LoopService,
    PathService,
    WeylService,
    dominant_weights,
)
from .root_data import finite_system


class TestDatumService:
    """근 데이터 서비스 테스트"""

    def test_info(self):
        """A(1)_2 정보 테스트"""
        info = DatumService.info("A(1)_2")
        assert info.comarks == [1, 1, 1]
        assert info.special_nodes == [0, 1, 2]
        assert info.omega_order == 3
        assert info.twist_order == 1

    def test_twisted(self):
        """A(2)_2 는 Ω 가 자명 테스트"""
        info = DatumService.info("A(2)_2")
        assert info.twist_order == 2
        assert info.omega_order == 1

    def test_names(self):
        """지원 이름 목록 테스트"""
        names = DatumService.names()
        assert "A(1)_1" in names
        assert "A(2)_2" in names

    def test_unknown(self):
        """없는 이름 거부 테스트"""
        with pytest.raises(ValueError):
            DatumService.info("Z(1)_3")


class TestWeylService:
    """Weyl 원소 서비스 테스트"""

    def test_describe(self):
        """s0.s1 의 길이와 단어 테스트"""
        result = WeylService.describe("A(1)_1", "s0.s1")
        assert result.length == 2
        assert result.word == "s0.s1"
        assert result.canonical.startswith("t[")

    def test_canonical_round_trip(self):
        """정규형을 다시 읽으면 같은 원소 테스트"""
        first = WeylService.describe("A(1)_2", "s0.s2.s1")
        second = WeylService.describe("A(1)_2", first.canonical)
        assert second.word == first.word
        assert second.length == 3

    def test_leq(self):
        """s0 ≤ s0.s1 이고 그 역은 아님 테스트"""
        assert WeylService.leq("A(1)_1", "s0", "s0.s1").leq
        assert not WeylService.leq("A(1)_1", "s0.s1", "s0").leq


class TestAdmissibleService:
    """허용 집합 요약 테스트"""

    def test_a1(self):
        """Ã_1, μ = (1, 0) 은 3 개 테스트"""
        summary = AdmissibleService.summary("A(1)_1", [1, 0])
        assert summary.size == 3
        assert len(summary.maximal_elements) == 2
        assert summary.elements is None
        assert summary.cosets is None

    def test_elements_sorted(self):
        """원소 목록은 길이 순 테스트"""
        summary = AdmissibleService.summary("A(1)_2", [1, 0, 0], with_elements=True)
        assert len(summary.elements) == 7
        assert summary.elements == sorted(summary.elements, key=lambda w: (w.count("s"), w))

    def test_saturated(self):
        """Y = {0} 이면 4 개, 잉여류 2 개 테스트"""
        summary = AdmissibleService.summary("A(1)_1", [1, 0], y_nodes=[0])
        assert summary.y_nodes == [0]
        assert summary.saturated_size == 4
        assert summary.cosets == 2


class TestPathService:
    """LS 경로 서비스 테스트"""

    def test_hpoly(self):
        """Ã_1, Y = {0, 1} 은 3 테스트"""
        payload = PathService.hpoly("A(1)_1", [1, 0], [0, 1], 1)
        assert payload.h_Y == 3
        assert payload.paths is None
        assert "paths" not in payload.model_dump(exclude_none=True)

    def test_emit_paths(self):
        """경로 목록 길이는 h_Y 와 같음 테스트"""
        payload = PathService.hpoly("A(1)_2", [1, 0, 0], [0, 1, 2], 1, emit_paths=True)
        assert len(payload.paths) == payload.h_Y == 10
        assert payload.paths == sorted(payload.paths)

    def test_dominant_weights(self):
        """A_2 는 a + b ≤ 4 인 15 개 테스트"""
        weights = dominant_weights(finite_system("A2"), 8)
        assert len(weights) == 15
        assert (0, 0) in weights and (4, 0) in weights and (2, 2) in weights

    def test_calibrate(self):
        """A_2, C_2 보정은 모두 일치 테스트"""
        rows = PathService.calibrate()
        assert {row.type for row in rows} == {"A2", "C2"}
        assert all(row.equal for row in rows)
        expected = {"type": "A2", "weight": "1,1", "paths": 8, "weyl_dim": 8, "equal": True}
        assert expected in [row.model_dump() for row in rows]


class TestCoherenceService:
    """정합성 서비스 테스트"""

    def test_single(self):
        """Ã_1, Y = {0, 1}, a = 1 은 3 = 3 테스트"""
        (report,) = CoherenceService.check("A(1)_1", [1, 0], [0, 1], [1])
        assert (report.h_y, report.h, report.equal) == (3, 3, True)
        assert report.proven
        assert report.status == "equal"

    def test_all_subsets(self):
        """Y = all 은 공집합이 아닌 부분집합 전체 테스트"""
        reports = CoherenceService.check("A(1)_1", [1, 0], "all", [1, 2])
        assert [(r.y_nodes, r.a) for r in reports] == [
            ([0], 1),
            ([0], 2),
            ([1], 1),
            ([1], 2),
            ([0, 1], 1),
            ([0, 1], 2),
        ]
        assert all(r.equal for r in reports)

    def test_twisted_is_never_unequal(self):
        """꼬인 계열의 불일치는 open 으로만 보고 테스트"""
        for report in CoherenceService.check("A(2)_2", [1, 0, 0], "all", [1]):
            assert not report.proven
            assert report.status in ("equal", "open")

    def test_sweep_order(self):
        """입력 순서 그대로 테스트"""
        rows = [
            {"datum": "A(1)_2", "mu": [1, 0, 0], "Y": [0, 1, 2], "a": 1},
            {"datum": "A(1)_1", "mu": [1, 0], "Y": [0, 1], "a": [1]},
        ]
        reports = CoherenceService.sweep(rows)
        assert [r.datum for r in reports] == ["A(1)_2", "A(1)_1"]
        assert [r.h_y for r in reports] == [10, 3]

    def test_sweep_rejects_bad_row(self):
        """잘못된 설정 행 거부 테스트"""
        with pytest.raises(ValidationError):
            CoherenceService.sweep([{"datum": "A(1)_1", "mu": [], "a": 1}])
        with pytest.raises(ValidationError):
            CoherenceService.sweep([{"datum": "A(1)_1", "mu": [1, 0], "a": 0}])


@pytest.mark.django_db
class TestCoherenceArchive:
    """정합성 결과 보관 테스트"""

    def test_archive(self):
        """보고 한 줄마다 레코드 하나 테스트"""
        reports = CoherenceService.check("A(1)_1", [1, 0], "all", [1])
        records = CoherenceService.archive(reports)
        assert len(records) == CoherenceRecord.objects.count() == 3
        first = CoherenceRecord.objects.first()
        assert first.datum == "A(1)_1"
        assert first.mu == "1,0"
        assert first.y_nodes == "0"
        assert first.status == CoherenceRecord.Status.EQUAL
        assert "A(1)_1" in str(first)

    def test_archive_open(self):
        """증명되지 않은 불일치는 open 으로 저장 테스트"""
        report = CoherenceReport(
            datum="A(2)_2", mu=[1, 0, 0], y_nodes=[0], a=1, h_y=6, h=7, equal=False, proven=False
        )
        (record,) = CoherenceService.archive([report])
        assert record.status == CoherenceRecord.Status.OPEN
        assert not record.equal


class TestLoopService:
    """루프 군 서비스 테스트"""

    def test_kottwitz_gm(self):
        """t^{-1}(1 + t) 는 -1 테스트"""
        assert LoopService.kottwitz("gm", 5, "t^-1 + 1").kappa == -1

    def test_kottwitz_norm_one(self):
        """상수 -1 은 -1 테스트"""
        assert LoopService.kottwitz("norm1", 3, "2").kappa == -1
        assert LoopService.kottwitz("norm1", 3, "1").kappa == 1

    def test_kottwitz_unitary(self):
        """반대각 형식은 -1 테스트"""
        assert LoopService.kottwitz("un", 3, "0,0,1;0,1,0;1,0,0").kappa == -1
        assert LoopService.kottwitz("un", 3, "1,0;0,1").kappa == 1

    def test_kottwitz_pi0(self):
        """π_0 불변 인자와 SU_n 분기 테스트"""
        assert LoopService.kottwitz("gm", 5, "t").pi0 == [0]
        assert LoopService.kottwitz("un", 3, "1,0;0,1").pi0 == [2]
        result = LoopService.kottwitz("sun", 3, "2,0,0,0;0,1,0,0;0,0,1,0;0,0,0,2")
        assert (result.kappa, result.pi0) == (1, [])
        with pytest.raises(ValueError, match="determinant 1"):
            LoopService.kottwitz("sun", 3, "0,0,1;0,1,0;1,0,0")

    def test_kottwitz_rejects(self):
        """정사각이 아닌 행렬과 합성수 q 거부 테스트"""
        with pytest.raises(ValueError, match="not square"):
            LoopService.kottwitz("un", 3, "1,0;0")
        with pytest.raises(ValueError):
            LoopService.kottwitz("gm", 4, "t")

    def test_norm_one_check(self):
        """같은 seed 는 같은 결과, 실패 없음 테스트"""
        first = LoopService.norm_one_check(3, 3, seed=7, samples=50)
        assert first.failures == 0
        assert first == LoopService.norm_one_check(3, 3, seed=7, samples=50)

    def test_cells(self):
        """SL_2, s0.s1, q = 2 는 4 점 테스트"""
        payload = LoopService.cells("sl2", [0, 1], 2)
        assert payload.count == 4
        assert payload.length == 2
        assert len(payload.points) == 4
        assert LoopService.cells("sl2", [], 3, count_only=True).model_dump(exclude_none=True) == {
            "group": "sl2",
            "word": "e",
            "q": 3,
            "length": 0,
            "count": 1,
        }

    def test_fiber(self):
        """s 기본값은 n - r 테스트"""
        record = LoopService.fiber(3, 1, 3, [0])
        assert (record.r, record.s) == (1, 2)
        assert record.naive_count == record.adm_count == 13


class TestPayloadSchemas:
    """서비스 결과 스키마 테스트"""

    def test_frozen(self):
        """결과는 생성 후 불변 테스트"""
        result = WeylService.describe("A(1)_1", "s0")
        assert isinstance(result, WeylElementSchema)
        with pytest.raises(ValidationError):
            result.length = 5

    def test_hpoly_paths_count(self):
        """경로 수가 h_Y 와 다르면 거부 테스트"""
        with pytest.raises(ValidationError, match="exactly h_Y"):
            HPolySchema(datum="A(1)_1", mu=[1, 0], Y=[0], a=1, h_Y=2, paths=["(e; 1)"])
        with pytest.raises(ValidationError):
            HPolySchema(datum="A(1)_1", mu=[1, 0], Y=[0], a=0, h_Y=2)

    def test_calibration_equal_flag(self):
        """equal 이 paths == weyl_dim 과 어긋나면 거부 테스트"""
        with pytest.raises(ValidationError, match="equal must agree"):
            CalibrationRowSchema(type="A2", weight="1,0", paths=3, weyl_dim=3, equal=False)

    def test_cells_count(self):
        """음수 개수 거부 테스트"""
        with pytest.raises(ValidationError):
            CellsSchema(group="sl2", word="e", q=3, length=0, count=-1)
