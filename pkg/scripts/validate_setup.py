"""Validate prerequisites and configuration for pgl2-invariants.

Run this script to check that everything is set up correctly before
running the verification suite.
"""

import sys
import tempfile
from pathlib import Path

# Add scripts directory to path so we can import utils
sys.path.insert(0, str(Path(__file__).parent))

from utils import check_prerequisites, ensure_directory, get_settings
from debug_utils import setup_logger, enable_debug_mode


def check_settings():
    """Load the settings file and validate it as a run configuration."""
    print("\n=== Checking configuration ===")
    try:
        from report import RunConfig

        settings = get_settings()
        config = RunConfig.from_settings(settings)
    except Exception as e:
        print(f"[!] ERROR loading settings: {e}")
        return None
    print(f"[+] Field {config.field_spec().label}, seed {config.seed}, "
          f"{config.workers} worker(s)")
    print(f"[+] Caps: {config.caps.memory_bytes / 2**30:.1f} GiB, "
          f"{config.caps.seconds_per_check:.0f} s per check")
    return settings


def check_directories(settings):
    """Verify the cache, reports and log directories exist and are writable."""
    print("\n=== Checking directories ===")
    all_ok = True
    for key, description in (("cache_dir", "cache directory"),
                             ("reports_dir", "reports directory"),
                             ("log_dir", "log directory")):
        try:
            path = ensure_directory(settings[key], description)
            with tempfile.NamedTemporaryFile(dir=path):
                pass
            print(f"    ✓ {description}: {path}")
        except OSError as e:
            print(f"    ✗ {description}: {e}")
            all_ok = False
    return all_ok


def smoke_computation():
    """Compute dim R_1 on 6 points both ways; both must give 5."""
    print("\n=== Running a smoke computation ===")
    try:
        from exactfield import FieldSpec
        from graphalg import enumerate_noncrossing
        from invring import graded_dimension

        dim = graded_dimension(6, (1,) * 6, FieldSpec.rationals())
        count = len(enumerate_noncrossing(6, (1,) * 6))
    except Exception as e:
        print(f"[!] ERROR during smoke computation: {e}")
        return False
    if dim == count == 5:
        print(f"[+] SUCCESS: dim R_1 on 6 points = {dim}")
        return True
    print(f"[!] ERROR: expected 5, got rank {dim} and {count} non-crossing matchings")
    return False


def configured_log_dir():
    """The log_dir setting, or None (the default directory) if settings do not load."""
    try:
        return get_settings(quiet=True)["log_dir"]
    except Exception:
        return None


def main():
    # Set up logging
    debug = enable_debug_mode()
    log = setup_logger('validate_setup', debug=debug, log_dir=configured_log_dir())

    print("=" * 60)
    print("pgl2-invariants - Configuration Validator")
    print("=" * 60)

    log.info("Starting configuration validation")

    all_checks = []

    # Check prerequisites
    print("\n=== Checking prerequisites ===")
    prereq_ok = check_prerequisites(verbose=True)
    all_checks.append(("Prerequisites", prereq_ok))
    log.info(f"Prerequisites check: {'PASS' if prereq_ok else 'FAIL'}")

    if not prereq_ok:
        print("\n" + "=" * 60)
        print("FAILED: Fix the issues above before continuing")
        print("=" * 60)
        log.error("Prerequisites validation failed")
        log.print_log_location()
        return 1

    settings = check_settings()
    all_checks.append(("Configuration", settings is not None))
    log.info(f"Configuration check: {'PASS' if settings is not None else 'FAIL'}")

    if settings is not None:
        dirs_ok = check_directories(settings)
        all_checks.append(("Directories", dirs_ok))
        log.info(f"Directories check: {'PASS' if dirs_ok else 'FAIL'}")

    smoke_ok = smoke_computation()
    all_checks.append(("Smoke computation", smoke_ok))
    log.info(f"Smoke computation: {'PASS' if smoke_ok else 'FAIL'}")

    # Summary
    print("\n" + "=" * 60)
    print("VALIDATION SUMMARY")
    print("=" * 60)

    for check_name, passed in all_checks:
        status = "✓ PASS" if passed else "✗ FAIL"
        print(f"{status}: {check_name}")

    all_passed = all(passed for _, passed in all_checks)

    print("=" * 60)
    if all_passed:
        print("✓ ALL CHECKS PASSED")
        print("\nYou're ready to run:")
        print("  python scripts/pgl2_invariants.py verify --suite quick")
        log.info("All validation checks passed")
    else:
        print("✗ SOME CHECKS FAILED")
        print("\nFix the issues above before running the verification suite")
        log.error("Some validation checks failed")
    print("=" * 60)

    log.print_log_location()

    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
