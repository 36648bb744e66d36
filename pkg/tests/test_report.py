import json
from types import SimpleNamespace

import pytest
from pydantic import ValidationError

import report
from cache import ResultCache
from report import (
    CLAIMS,
    Caps,
    CheckContext,
    RunConfig,
    Verdict,
    canonical_report,
    format_report_text,
    run_suite,
    select_claims,
    validate_report,
)
from utils import DEFAULT_SETTINGS

QUICK_IDS = {
    "n4.cross_ratio.relation", "n5.dim1", "n5.dim2", "n5.kernel2.dim", "n5.del_pezzo.span",
    "n6.kernel2.dim", "n6.kernel3.dim", "n6.segre.nonzero", "n6.segre.spans_kernel",
    "n6.skew_cubic.proportional", "n8.kernel2.dim", "n8.partials.span",
    "n8.simple_quadric.orbit_span", "n8.skew_cubic.skew", "n8.generation3.rational",
    "skew.sign_multiplicity.n8", "kempe.small_weights", "kempe.n8",
    "prop.straighten_oracle", "prop.plucker_expansion", "prop.rank_nullity",
    "prop.relations_zero", "catalog.zero_images",
    "n4.dim1", "n6.dim1", "n8.dim1", "r1.irreducible.n4", "r1.irreducible.n6",
    "r1.irreducible.n8", "keyfact.n6", "keyfact.n8",
}
FULL_IDS = {
    "n10.dim1", "r1.irreducible.n10", "keyfact.n10", "n10.kernel2.dim", "n10.kernel2.hook",
    "n10.simple_quadric.orbit_span", "skew.sign_multiplicity.n10", "n10.skew_cubic.zero",
    "char3-generation", "n12.kernel2.dim",
}


def config(**kwargs):
    return RunConfig(workers=2, **kwargs)


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.field == "q"
        assert cfg.suite == "quick"
        assert cfg.caps.memory_bytes == 8 * 2**30

    def test_field_is_normalized(self):
        assert RunConfig(field="fp:3").field_spec().modulus == 3
        assert RunConfig(field="Q").field == "q"

    def test_bad_field(self):
        with pytest.raises(ValidationError):
            RunConfig(field="fp:4")

    def test_seed_bounds(self):
        RunConfig(seed=2**64 - 1)
        with pytest.raises(ValidationError):
            RunConfig(seed=-1)
        with pytest.raises(ValidationError):
            RunConfig(seed=2**64)

    def test_unknown_key(self):
        with pytest.raises(ValidationError):
            RunConfig(sead=1)

    def test_nonpositive_weights(self):
        with pytest.raises(ValidationError):
            RunConfig(weights=[1, 0, 1])

    def test_from_settings(self):
        cfg = RunConfig.from_settings(DEFAULT_SETTINGS, seed=7, field=None, workers=1)
        assert cfg.seed == 7
        assert cfg.field == "q"
        assert cfg.workers == 1
        assert cfg.expand_verify_limit == 2**13

    def test_mode_override(self):
        assert RunConfig().mode is None
        assert RunConfig.from_settings(DEFAULT_SETTINGS, mode="full").mode == "full"
        with pytest.raises(ValidationError):
            RunConfig(mode="dense")

    def test_budget(self):
        budget = RunConfig(caps=Caps(memory_bytes=10, seconds_per_check=5)).budget()
        assert (budget.max_bytes, budget.max_seconds) == (10, 5)


class TestRegistry:
    def test_every_claim_registered(self):
        assert QUICK_IDS | FULL_IDS == set(CLAIMS)

    def test_suites(self):
        assert {c.claim_id for c in select_claims(RunConfig())} == QUICK_IDS
        assert {c.claim_id for c in select_claims(RunConfig(suite="full"))} == QUICK_IDS | FULL_IDS

    def test_stretch_flag(self):
        assert [c.claim_id for c in CLAIMS.values() if c.stretch] == ["n12.kernel2.dim"]

    def test_selected_ids(self):
        chosen = select_claims(RunConfig(claims=["n6.dim1", "n4.dim1", "n6.dim1"]))
        assert [c.claim_id for c in chosen] == ["n4.dim1", "n6.dim1"]

    def test_unknown_id(self):
        with pytest.raises(ValueError, match="no.such"):
            select_claims(RunConfig(claims=["no.such.claim"]))

    def test_char3_runs_over_f3(self):
        assert CLAIMS["char3-generation"].field == "fp:3"


class TestSettingsReachComputations:
    @pytest.fixture
    def dimension_calls(self, monkeypatch):
        calls = []

        def fake(n, v, field, **kwargs):
            calls.append(kwargs)
            return 5
        monkeypatch.setattr(report, "graded_dimension", fake)
        return calls

    def test_dimension_gets_mode_and_sampling(self, rationals, dimension_calls):
        cfg = config(mode="sampled", sampling_prime=10007, sample_margin=8)
        assert CheckContext(cfg).dimension(6, (1,) * 6, rationals, cfg.budget()) == 5
        (kwargs,) = dimension_calls
        assert kwargs["mode"] == "sampled"
        assert kwargs["sampling_prime"] == 10007
        assert kwargs["margin"] == 8

    def test_cached_dimension_is_keyed_by_mode(self, rationals, tmp_cache, dimension_calls):
        for mode in ("full", "sampled", "full"):
            cfg = config(mode=mode)
            CheckContext(cfg, tmp_cache).dimension(6, (1,) * 6, rationals, cfg.budget())
        assert [c["mode"] for c in dimension_calls] == ["full", "sampled"]
        assert (tmp_cache.hits, tmp_cache.misses) == (1, 2)

    def test_cached_dimension_is_keyed_by_sampling_settings(self, rationals, tmp_cache,
                                                           dimension_calls):
        for cfg in (config(), config(sample_margin=4), config(full_coefficient_limit=16)):
            CheckContext(cfg, tmp_cache).dimension(6, (1,) * 6, rationals, cfg.budget())
        assert len(dimension_calls) == 3

    def test_kempe_claims_use_sampling_settings(self, monkeypatch):
        calls = []

        def fake(n, w, k, field=None, **kwargs):
            calls.append(kwargs)
            return SimpleNamespace(holds=True)
        monkeypatch.setattr(report, "kempe_check", fake)
        cfg = config(sampling_prime=10007, sample_margin=8)
        assert CLAIMS["kempe.n8"].run(CheckContext(cfg), cfg.budget()) == {"failures": []}
        assert len(calls) == 2
        assert all(c["sampling_prime"] == 10007 and c["margin"] == 8 for c in calls)

    def test_small_weights_anchor_states_the_symmetry(self):
        anchor = CLAIMS["kempe.small_weights"].anchor
        assert "weakly decreasing" in anchor
        assert "permuting the points" in anchor


class TestRunning:
    def test_cheap_claims_pass(self):
        report = run_suite(config(claims=["n4.dim1", "n6.dim1", "n5.dim1", "n6.kernel3.dim"]))
        assert [c.claim_id for c in report.checks] == ["n4.dim1", "n5.dim1", "n6.dim1",
                                                       "n6.kernel3.dim"]
        assert all(c.verdict is Verdict.PASS for c in report.checks)
        assert report.counts() == {"pass": 4, "fail": 0, "skipped": 0}
        assert not report.failed

    def test_memory_cap_skips(self):
        report = run_suite(config(claims=["n6.kernel3.dim"],
                                  caps=Caps(memory_bytes=1, seconds_per_check=60)))
        (check,) = report.checks
        assert check.verdict is Verdict.SKIPPED
        assert "GiB" in check.reason
        assert not report.failed

    def test_stretch_claim_skipped(self):
        report = run_suite(config(claims=["n12.kernel2.dim"]))
        (check,) = report.checks
        assert check.verdict is Verdict.SKIPPED
        assert "--stretch" in check.reason

    def test_reruns_are_identical(self):
        cfg = config(claims=["n4.cross_ratio.relation", "n5.kernel2.dim", "prop.rank_nullity"],
                     seed=11)
        assert canonical_report(run_suite(cfg)) == canonical_report(run_suite(cfg))

    def test_cache_hits_give_identical_reports(self, tmp_path):
        cfg = config(claims=["n5.kernel2.dim", "n6.dim1", "keyfact.n6"])
        cache = ResultCache(tmp_path / "cache")
        first = run_suite(cfg, cache)
        misses = cache.misses
        second = run_suite(cfg, ResultCache(tmp_path / "cache"))
        assert misses > 0
        assert canonical_report(first) == canonical_report(second)

    def test_report_matches_schema(self):
        report = run_suite(config(claims=["n4.dim1", "n12.kernel2.dim"]))
        data = json.loads(report.to_json())
        validate_report(data)
        assert data["checks"][1]["verdict"] == "skipped"

    def test_schema_rejects_missing_reason(self):
        import jsonschema

        data = json.loads(run_suite(config(claims=["n12.kernel2.dim"])).to_json())
        data["checks"][0]["reason"] = None
        with pytest.raises(jsonschema.ValidationError):
            validate_report(data)

    def test_text_summary(self):
        text = format_report_text(run_suite(config(claims=["n4.dim1"])))
        assert "✓ PASS: n4.dim1" in text
        assert "1 passed, 0 failed, 0 skipped" in text
