"""Build a DuckDB index over saved verification reports.

- Reads every JSON report under ``reports_dir`` (recursively)
- Normalises them into a single DuckDB table called `checks` with columns:
    report, generated_at, claim_id, anchor, verdict, reason, field,
    elapsed, computed, expected
- Creates summary views:
    - failing_checks: every failing record, newest report first
    - slowest_checks: records ordered by elapsed time

Files that are not reports (kernel dumps, other JSON) are skipped with a warning.
"""

import argparse
import json
import sys
from datetime import timezone
from pathlib import Path

# Add scripts directory to path so we can import utils
sys.path.insert(0, str(Path(__file__).parent))

from dateutil import parser as dateparser

from debug_utils import enable_debug_mode, setup_logger
from utils import get_settings

SCHEMA = """
CREATE OR REPLACE TABLE checks (
    report VARCHAR,
    generated_at TIMESTAMP,
    claim_id VARCHAR,
    anchor VARCHAR,
    verdict VARCHAR,
    reason VARCHAR,
    field VARCHAR,
    elapsed DOUBLE,
    computed VARCHAR,
    expected VARCHAR
)
"""

VIEWS = [
    """CREATE OR REPLACE VIEW failing_checks AS
       SELECT report, generated_at, claim_id, field, reason, computed, expected
       FROM checks WHERE verdict = 'fail'
       ORDER BY generated_at DESC, claim_id""",
    """CREATE OR REPLACE VIEW slowest_checks AS
       SELECT claim_id, field, elapsed, report
       FROM checks WHERE verdict <> 'skipped'
       ORDER BY elapsed DESC, claim_id""",
]


def report_rows(path: Path) -> list[tuple]:
    """Rows of the `checks` table for one report file.

    Raises:
        ValueError: If the file is not a verification report
    """
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict) or "checks" not in data or "generated_at" not in data:
        raise ValueError("not a verification report")
    # stored naive, in UTC
    generated = dateparser.isoparse(data["generated_at"])
    if generated.tzinfo is not None:
        generated = generated.astimezone(timezone.utc).replace(tzinfo=None)
    rows = []
    for check in data["checks"]:
        rows.append((
            path.name,
            generated,
            check["claim_id"],
            check.get("anchor"),
            check["verdict"],
            check.get("reason"),
            check.get("field"),
            float(check.get("elapsed") or 0.0),
            json.dumps(check.get("computed"), sort_keys=True),
            json.dumps(check.get("expected"), sort_keys=True),
        ))
    return rows


def build_index(reports_dir: Path, database_path: Path, log=None) -> int:
    """(Re)create the index; returns the number of check rows loaded."""
    import duckdb

    files = sorted(reports_dir.rglob("*.json"))
    rows = []
    for path in files:
        try:
            rows.extend(report_rows(path))
        except (ValueError, KeyError, TypeError) as e:
            print(f"[!] Warning: skipping {path.name}: {e}")
            if log:
                log.warning(f"skipping {path}: {e}")

    database_path.parent.mkdir(parents=True, exist_ok=True)
    con = duckdb.connect(str(database_path))
    try:
        con.execute(SCHEMA)
        if rows:
            con.executemany("INSERT INTO checks VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)", rows)
        for view in VIEWS:
            con.execute(view)
    finally:
        con.close()
    return len(rows)


def main(argv=None):
    parser = argparse.ArgumentParser(description="Index saved verification reports in DuckDB")
    parser.add_argument("--config", help="Settings file (default config/settings.yaml)")
    parser.add_argument("--reports-dir", help="Directory holding JSON reports")
    parser.add_argument("--database", help="DuckDB file to (re)create")
    parser.add_argument("--debug", action="store_true")
    args = parser.parse_args(argv)

    settings = get_settings(args.config)
    log = setup_logger("build_index", debug=args.debug or enable_debug_mode([]),
                       log_dir=settings["log_dir"])

    reports_dir = Path(args.reports_dir or settings["reports_dir"]).expanduser()
    database = Path(args.database or settings["database_path"]).expanduser()
    if not reports_dir.exists():
        print(f"[!] Reports directory does not exist yet: {reports_dir}")
        print("    Run: python scripts/pgl2_invariants.py verify --out reports/quick.json")
        return 1

    try:
        with log.stage("build index"):
            count = build_index(reports_dir, database, log)
    except ImportError:
        print("[!] ERROR: duckdb is not installed")
        print("    Install with: pip install -r requirements.txt")
        return 1
    except Exception as e:
        print(f"[!] ERROR building index: {e}")
        log.exception("build_index failed")
        return 1

    print(f"[+] Loaded {count} check record(s) into {database}")
    print("    Views: failing_checks, slowest_checks")
    log.info(f"Indexed {count} checks from {reports_dir} into {database}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
