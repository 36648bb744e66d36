import json

import pytest

from build_index import build_index, report_rows
from report import RunConfig, run_suite


def write_report(path, claims):
    report = run_suite(RunConfig(claims=claims, workers=1))
    path.write_text(report.to_json(), encoding="utf-8")
    return report


def test_report_rows(tmp_path):
    path = tmp_path / "a.json"
    write_report(path, ["n4.dim1", "n12.kernel2.dim"])
    rows = report_rows(path)
    assert [r[2] for r in rows] == ["n4.dim1", "n12.kernel2.dim"]
    assert rows[0][4] == "pass"
    assert rows[1][4] == "skipped"
    assert rows[0][1].tzinfo is None
    assert json.loads(rows[0][8]) == 2


def test_rejects_other_json(tmp_path):
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"n": 8}), encoding="utf-8")
    with pytest.raises(ValueError):
        report_rows(path)


def test_build_index(tmp_path):
    duckdb = pytest.importorskip("duckdb")
    reports = tmp_path / "reports"
    reports.mkdir()
    report = write_report(reports / "quick.json", ["n4.dim1", "n6.dim1"])
    data = json.loads(report.to_json())
    data["checks"][1]["verdict"] = "fail"
    (reports / "broken.json").write_text(json.dumps(data), encoding="utf-8")
    (reports / "dump.json").write_text("[1, 2, 3]", encoding="utf-8")

    database = tmp_path / "db" / "checks.duckdb"
    assert build_index(reports, database) == 4

    con = duckdb.connect(str(database))
    try:
        failing = con.execute("SELECT report, claim_id FROM failing_checks").fetchall()
        total = con.execute("SELECT count(*) FROM checks").fetchone()[0]
    finally:
        con.close()
    assert failing == [("broken.json", "n6.dim1")]
    assert total == 4
