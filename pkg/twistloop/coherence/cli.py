"""twistloop 명령행

`run(argv)` 는 하위 명령을 서비스에 위임하고 CommandResult 를 돌려준다.
종료 상태: 0 정상, 1 증명된 계열에서 불일치, 2 사용법/입력 오류, 3 상한 초과.
"""

import argparse
import csv
import io
import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from django.conf import settings

from .exceptions import ResourceCapExceeded
from .loops.lattices import PRIMED
from .schemas import CommandResult
from .services import (
    AdmissibleService,
    CoherenceService,
    DatumService,
    LoopService,
    PathService,
    WeylService,
)

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "text")


class UsageError(ValueError):
    """argparse 오류를 종료 대신 예외로"""

    def __init__(self, message: str, usage: str = ""):
        self.usage = usage
        super().__init__(message)


class _HelpRequested(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """종료하지 않는 파서: 도움말과 오류는 CommandResult 로"""

    def error(self, message):
        raise UsageError(message, self.format_usage())

    def print_help(self, file=None):
        pass

    def exit(self, status=0, message=None):
        raise _HelpRequested(self.format_help())


# 인자 변환


def int_list(text: str) -> List[int]:
    """'1,0,-1' -> [1, 0, -1]"""
    try:
        return [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def coweight_spec(text: str):
    """'1,0' 또는 합 표기 '1,0,0+0,0,-1'"""
    if "+" in text:
        return [int_list(part) for part in text.split("+")]
    return int_list(text)


def nodes_spec(text: str):
    if text == "all":
        return "all"
    return int_list(text)


def index_spec(text: str) -> List[Union[int, str]]:
    """'0,2,m'' -> [0, 2, "m'"]"""
    parts = [part.strip() for part in text.split(",") if part.strip()]
    plain = ",".join(part for part in parts if part != PRIMED)
    indices: List[Union[int, str]] = int_list(plain)
    if PRIMED in parts:
        indices.append(PRIMED)
    return indices


def range_spec(text: str) -> List[int]:
    """'2', '1,2,4' 또는 '1..3'"""
    if ".." in text:
        low, _, high = text.partition("..")
        try:
            values = list(range(int(low), int(high) + 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"cannot parse range {text!r}")
    else:
        values = int_list(text)
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError(f"a must be positive, got {text!r}")
    return values


def word_arg(text: str) -> List[int]:
    """'s0.s1' -> [0, 1], 'e' -> []"""
    if text == "e":
        return []
    word = []
    for letter in text.split("."):
        if not letter.startswith("s") or not letter[1:].isdigit():
            raise argparse.ArgumentTypeError(f"cannot parse word {text!r}")
        word.append(int(letter[1:]))
    return word


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--cap", type=int, default=None, help="열거 상한 (설정값 대신)")
    common.add_argument("--precision", type=int, default=None, help="급수 절단 차수")
    common.add_argument("--seed", type=int, default=None)

    parser = _Parser(prog="twistloop", description="twisted loop group coherence checks")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    datum = commands.add_parser("datum", parents=[common])
    datum.add_argument("action", choices=["info", "list"])
    datum.add_argument("name", nargs="?")
    datum.add_argument("--special", type=int, default=None)

    weyl = commands.add_parser("weyl", parents=[common])
    weyl.add_argument("action", choices=["length", "word", "leq"])
    weyl.add_argument("--datum", required=True)
    weyl.add_argument("--special", type=int, default=None)
    weyl.add_argument("--elt", action="append", required=True)

    admissible = commands.add_parser("adm", parents=[common])
    admissible.add_argument("--datum", required=True)
    admissible.add_argument("--mu", type=int_list, required=True)
    admissible.add_argument("--Y", type=int_list, default=None)
    admissible.add_argument("--elements", action="store_true", help="원소 전체를 축약 단어로")

    hpoly = commands.add_parser("hpoly", parents=[common])
    hpoly.add_argument("--datum", required=True)
    hpoly.add_argument("--mu", type=int_list, required=True)
    hpoly.add_argument("--Y", type=int_list, required=True)
    hpoly.add_argument("--a", type=int, default=1)
    hpoly.add_argument("--emit-paths", action="store_true")

    coherence = commands.add_parser("coherence", parents=[common])
    coherence.add_argument("--datum", required=True)
    coherence.add_argument("--mu", type=coweight_spec, required=True)
    coherence.add_argument("--Y", type=nodes_spec, default="all")
    coherence.add_argument("--a", type=range_spec, default=[1])
    coherence.add_argument("--archive", action="store_true")

    kottwitz = commands.add_parser("kottwitz", parents=[common])
    kottwitz.add_argument("--torus", choices=["gm", "norm1", "un", "sun"], required=True)
    kottwitz.add_argument("--q", type=int, required=True)
    kottwitz.add_argument("--elt", default=None, help="없으면 norm1 임의 쌍 준동형 검사")
    kottwitz.add_argument("--samples", type=int, default=200)

    cells = commands.add_parser("cells", parents=[common])
    cells.add_argument("--group", required=True, help="sl2, sl3, sl4, su3")
    cells.add_argument("--word", type=word_arg, required=True)
    cells.add_argument("--q", type=int, required=True)
    cells.add_argument("--count-only", action="store_true")

    fiber = commands.add_parser("fiber", parents=[common])
    fiber.add_argument("--n", type=int, required=True)
    fiber.add_argument("--r", type=int, required=True)
    fiber.add_argument("--s", type=int, default=None, help="기본값 n - r")
    fiber.add_argument("--q", type=int, required=True)
    fiber.add_argument("--I", type=index_spec, required=True, help="I, 짝수 n 은 m' 도 가능")
    fiber.add_argument("--no-wedge", action="store_true")

    sweep = commands.add_parser("sweep", parents=[common])
    sweep.add_argument("config", type=Path, help="{datum, mu, Y, a} 행의 JSON 목록")
    sweep.add_argument("--archive", action="store_true")

    calibrate = commands.add_parser("calibrate", parents=[common])
    calibrate.add_argument("--types", default="A2,C2")
    calibrate.add_argument("--bound", type=int, default=8)

    return parser


# 하위 명령


def _datum(args) -> Dict[str, Any]:
    if args.action == "list":
        return {"names": DatumService.names()}
    if not args.name:
        raise UsageError("datum info needs a datum name")
    return DatumService.info(args.name, args.special).model_dump()


def _weyl(args) -> Dict[str, Any]:
    if args.action == "leq":
        if len(args.elt) != 2:
            raise UsageError("weyl leq needs --elt twice")
        return WeylService.leq(args.datum, args.elt[0], args.elt[1], args.special).model_dump()
    if len(args.elt) != 1:
        raise UsageError(f"weyl {args.action} takes one --elt")
    return WeylService.describe(args.datum, args.elt[0], args.special).model_dump()


def _adm(args) -> Dict[str, Any]:
    summary = AdmissibleService.summary(args.datum, args.mu, args.Y, args.elements, args.cap)
    return summary.model_dump(exclude_none=True)


def _hpoly(args) -> Dict[str, Any]:
    if args.a <= 0:
        raise UsageError("--a must be positive")
    payload = PathService.hpoly(args.datum, args.mu, args.Y, args.a, args.emit_paths, args.cap)
    return payload.model_dump(exclude_none=True)


def _reports_payload(reports, archive: bool) -> Dict[str, Any]:
    if archive:
        CoherenceService.archive(reports)
    return {
        "rows": [report.row() for report in reports],
        "statuses": [report.status for report in reports],
    }


def _coherence(args) -> Dict[str, Any]:
    reports = CoherenceService.check(args.datum, args.mu, args.Y, args.a, args.cap)
    return _reports_payload(reports, args.archive)


def _sweep(args) -> Dict[str, Any]:
    try:
        rows = json.loads(args.config.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read sweep config {args.config}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"sweep config {args.config} is not JSON: {exc.msg}")
    if not isinstance(rows, list):
        raise ValueError("sweep config must be a JSON list of rows")
    reports = CoherenceService.sweep(rows, args.cap)
    return _reports_payload(reports, args.archive)


def _kottwitz(args) -> Dict[str, Any]:
    if args.elt is None:
        if args.torus != "norm1":
            raise UsageError(f"kottwitz --torus {args.torus} needs --elt")
        return LoopService.norm_one_check(args.q, args.precision, args.seed, args.samples).model_dump()
    return LoopService.kottwitz(args.torus, args.q, args.elt, args.precision).model_dump()


def _cells(args) -> Dict[str, Any]:
    cells = LoopService.cells(args.group, args.word, args.q, args.count_only, args.cap)
    return cells.model_dump(exclude_none=True)


def _fiber(args) -> Dict[str, Any]:
    record = LoopService.fiber(args.n, args.r, args.q, args.I, args.s, not args.no_wedge, args.cap)
    return record.model_dump(exclude={"elapsed"})


def _calibrate(args) -> Dict[str, Any]:
    types = [name for name in args.types.split(",") if name]
    return {"rows": [row.model_dump() for row in PathService.calibrate(types, args.bound)]}


HANDLERS = {
    "datum": _datum,
    "weyl": _weyl,
    "adm": _adm,
    "hpoly": _hpoly,
    "coherence": _coherence,
    "sweep": _sweep,
    "kottwitz": _kottwitz,
    "cells": _cells,
    "fiber": _fiber,
    "calibrate": _calibrate,
}


def _status(command: str, payload: Dict[str, Any]) -> int:
    if command in ("coherence", "sweep"):
        return 1 if "unequal" in payload["statuses"] else 0
    if command == "calibrate":
        return 0 if all(row["equal"] for row in payload["rows"]) else 1
    return 0


# 출력 형식


def _cell(value) -> Any:
    if isinstance(value, (list, tuple)):
        if all(isinstance(v, (int, str)) and not isinstance(v, bool) for v in value):
            return ",".join(str(v) for v in value)
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    if value is None:
        return ""
    return value


def _table(payload) -> List[Dict[str, Any]]:
    if isinstance(payload, dict) and isinstance(payload.get("rows"), list):
        return payload["rows"]
    if isinstance(payload, dict) and isinstance(payload.get("names"), list):
        return [{"name": name} for name in payload["names"]]
    return [payload]


def render(payload, fmt: str) -> str:
    if payload is None:
        return ""
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)
    rows = _table(payload)
    if fmt == "csv":
        buffer = io.StringIO()
        fields = list(rows[0]) if rows else []
        writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _cell(value) for key, value in row.items()})
        return buffer.getvalue()
    if len(rows) == 1 and rows[0] is payload:
        lines = []
        for key, value in payload.items():
            if isinstance(value, list) and value and isinstance(value[0], (list, str)):
                lines.append(f"{key}:")
                lines.extend(f"  {_cell(item)}" for item in value)
            else:
                lines.append(f"{key}: {_cell(value)}")
        return "\n".join(lines) + "\n"
    return "".join("\t".join(str(_cell(v)) for v in row.values()) + "\n" for row in rows)


def run(argv: Sequence[str]) -> CommandResult:
    started = time.monotonic()
    argv = list(argv)
    version = settings.TWISTLOOP["SCHEMA_VERSION"]
    command = argv[0] if argv else ""
    fmt = "json"

    def result(status, payload=None, error=None, text=""):
        return CommandResult(
            schema_version=version,
            command=" ".join(argv),
            status=status,
            payload=payload,
            error=error,
            text=text,
            elapsed=time.monotonic() - started,
        )

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        fmt = args.format
        payload = HANDLERS[args.command](args)
    except _HelpRequested as help_text:
        return result(0, text=str(help_text))
    except UsageError as exc:
        usage = exc.usage or parser.format_usage()
        return result(2, payload={"usage": usage}, error=str(exc), text=f"{usage}error: {exc}\n")
    except ResourceCapExceeded as exc:
        logger.warning(f"{command}: {exc}")
        cap = {"cap": exc.cap_name, "value": exc.cap}
        return result(3, payload=cap, error=str(exc), text=f"error: {exc}\n")
    except ValueError as exc:
        return result(2, error=str(exc), text=f"error: {exc}\n")

    status = _status(args.command, payload)
    logger.info(f"{command} finished with status {status} in {time.monotonic() - started:.3f}s")
    return result(status, payload=payload, text=render(payload, fmt))

