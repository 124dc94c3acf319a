import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpplab.errors import ParameterError
from lpplab.report import SCHEMAS, McReport, Table, emit, fmt, read_csv_table, spec_hash
from lpplab.stationary import tail_curve


def sample_report():
    rep = McReport("demo", 1000, metadata={"seed": 3, "wall_time": 1.25, "grid": [1, 2]})
    rep.add_estimate("p", 0.1 + 0.2, 0.01)
    rep.estimates["slope"] = 1 / 3
    rep.checks["ok"] = True
    rep.tables["tail"] = Table(SCHEMAS["tail"], [[0.5, 3, 0.25, 0.01, 0.2, 0.3]])
    return rep


def test_json_round_trip():
    rep = sample_report()
    back = McReport.from_json(rep.to_json())
    assert back.to_dict() == rep.to_dict()
    assert back.estimates["p"] == 0.1 + 0.2


def test_ci_and_verdict():
    rep = sample_report()
    lo, hi = rep.ci("p")
    assert lo < rep.estimates["p"] < hi
    assert rep.verdict == "pass"
    rep.checks["bad"] = False
    assert rep.verdict == "fail"
    assert McReport("x", 1, report_only=True).verdict == "report-only"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_bits_round_trip(x):
    assert float(fmt(x)) == x
    assert json.loads(McReport("x", 1, estimates={"v": x}).to_json())["estimates"]["v"] == x


def test_nonfinite():
    assert fmt(math.inf) == "Infinity" and fmt(-math.inf) == "-Infinity" and fmt(math.nan) == "NaN"


def test_csv_schema(tmp_path):
    curve = tail_curve(np.array([0, 3, 7, 1, 20]), [0.5, 1.0], 4.0, 5)
    rep = sample_report()
    rep.tables["tail"] = curve.table()
    path = emit(rep, "csv", tmp_path / "out.csv")
    header, rows = read_csv_table(path)
    assert header == SCHEMAS["report"]
    assert ["check.ok", "true"] in rows
    assert not any(r[0] == "meta.wall_time" for r in rows)
    header, rows = read_csv_table(tmp_path / "out.tail.csv")
    assert header == SCHEMAS["tail"] and len(rows) == 2


def test_emit_json(tmp_path):
    rep = sample_report()
    p = emit(rep, "json", tmp_path / "r.json")
    assert McReport.from_json(p.read_text()).to_dict() == rep.to_dict()
    with pytest.raises(ParameterError):
        emit(rep, "xml", tmp_path / "r.xml")


def test_emit_bad_path(tmp_path):
    with pytest.raises(Exception) as e:
        emit(sample_report(), "json", tmp_path / "missing" / "r.json")
    assert "missing" in str(e.value)


def test_spec_hash_stable():
    a = spec_hash({"experiment": "x", "seed": 1, "params": {"z": 0.5}})
    assert a == spec_hash({"experiment": "x", "seed": 1, "params": {"z": 0.5}})
    assert a != spec_hash({"experiment": "x", "seed": 2, "params": {"z": 0.5}})
