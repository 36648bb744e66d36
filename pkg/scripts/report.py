"""Verification suite: run configuration, claim registry, and the JSON report.

Each claim computes a JSON-ready value and compares it with a fixed
expected value. A claim that exceeds its resource budget is reported as
skipped with the reason; any other exception is a failure. Nothing is
silently dropped, and the report lists checks sorted by claim id.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path
from random import Random
from typing import Any, Callable, Literal, Optional

import jsonschema
from pydantic import BaseModel, ConfigDict, Field, field_validator

from cache import ResultCache
from exactfield import FieldSpec, SparseMatrix, kernel_basis, rank, subspace_equal
from graphalg import (
    GraphPolynomial,
    crossings,
    random_graph_polynomial,
    plucker_step,
    straighten,
    straighten_by_solve,
)
from invring import (
    RelationKernel,
    ResourceBudget,
    ResourceCapExceeded,
    SymCoordinates,
    expand_polynomial,
    graded_dimension,
    image_is_zero,
    kempe_check,
    linear_relation_space,
    relation_kernel,
)
from relcat import (
    catalog,
    del_pezzo_quadrics,
    extended_simple_quadric,
    generation_check,
    orbit_span,
    partials,
    segre_binomial_cubic,
    simple_quadric,
    skew_cubic,
)
from symrep import (
    ClassFunction,
    decompose,
    even_part_partitions,
    format_partition,
    graded_piece_character,
    hook_dimension,
    sign_multiplicity,
    sym_power_character,
)

log = logging.getLogger("pgl2_invariants.report")

REPORT_VERSION = "1.0"
SCHEMA_PATH = Path(__file__).resolve().parent.parent / "docs" / "report.schema.json"


# --- models --------------------------------------------------------------------

class Caps(BaseModel):
    model_config = ConfigDict(extra="forbid")

    memory_bytes: int = Field(8 * 2**30, gt=0)
    seconds_per_check: float = Field(7200, gt=0)


class RunConfig(BaseModel):
    """Everything that determines a run; identical configs give identical reports."""

    model_config = ConfigDict(extra="forbid")

    command: str = "verify"
    n: Optional[int] = Field(None, ge=1)
    weights: Optional[list[int]] = None
    degree: Optional[int] = Field(None, ge=0)
    field: str = "q"
    mode: Optional[Literal["full", "sampled"]] = None
    seed: int = Field(0, ge=0, lt=2**64)
    cache_dir: Optional[str] = None
    output_format: Literal["text", "json"] = "text"
    suite: Literal["quick", "full"] = "quick"
    claims: list[str] = Field(default_factory=list)
    stretch: bool = False
    workers: int = Field(4, ge=1)
    caps: Caps = Field(default_factory=Caps)
    full_coefficient_limit: int = Field(2**20, gt=0)
    expand_verify_limit: int = Field(2**13, gt=0)
    sampling_prime: int = 2_147_483_647
    sample_margin: int = Field(32, ge=1)
    spanning_cap: int = Field(200_000, gt=0)
    straighten_step_cap: int = Field(10**7, gt=0)

    @field_validator("field")
    @classmethod
    def _normalize_field(cls, value: str) -> str:
        return str(FieldSpec.parse(value))

    @field_validator("weights")
    @classmethod
    def _positive_weights(cls, value):
        if value is not None and any(w < 1 for w in value):
            raise ValueError("weights must be positive")
        return value

    @classmethod
    def from_settings(cls, settings: dict, **overrides) -> "RunConfig":
        """Merge loaded settings with command-line overrides (None means not given)."""
        data = {k: settings[k] for k in (
            "seed", "field", "workers", "cache_dir", "full_coefficient_limit",
            "expand_verify_limit", "sampling_prime", "sample_margin", "spanning_cap",
            "straighten_step_cap") if k in settings}
        if "caps" in settings:
            data["caps"] = settings["caps"]
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def field_spec(self) -> FieldSpec:
        return FieldSpec.parse(self.field)

    def budget(self) -> ResourceBudget:
        return ResourceBudget(self.caps.memory_bytes, self.caps.seconds_per_check)


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class CheckRecord(BaseModel):
    claim_id: str
    anchor: str
    computed: Any = None
    expected: Any = None
    verdict: Verdict
    reason: Optional[str] = None
    field: str
    elapsed: float


class VerificationReport(BaseModel):
    version: str = REPORT_VERSION
    generated_at: str
    config: RunConfig
    checks: list[CheckRecord]

    @property
    def failed(self) -> bool:
        return any(c.verdict is Verdict.FAIL for c in self.checks)

    def counts(self) -> dict[str, int]:
        out = {v.value: 0 for v in Verdict}
        for c in self.checks:
            out[c.verdict.value] += 1
        return out

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def canonical_report(report: VerificationReport | dict) -> dict:
    """Report content without timing fields, for comparing runs."""
    data = report.model_dump(mode="json") if isinstance(report, VerificationReport) else dict(report)
    data = json.loads(json.dumps(data))
    data.pop("generated_at", None)
    for check in data.get("checks", []):
        check.pop("elapsed", None)
    return data


def validate_report(data: dict, schema_path: Path = SCHEMA_PATH) -> None:
    """Validate report JSON against the published schema.

    Raises:
        jsonschema.ValidationError: If the report does not conform
    """
    schema = json.loads(Path(schema_path).read_text(encoding="utf-8"))
    jsonschema.validate(instance=data, schema=schema)


# --- shared state for one run ------------------------------------------------------

class CheckContext:
    """Config, cache and results shared by the checks of one run.

    Shared values are computed once under a per-key lock, so concurrent
    checks that need the same kernel wait for one computation.
    """

    def __init__(self, config: RunConfig, cache: ResultCache | None = None):
        self.config = config
        self.cache = cache or ResultCache(None, enabled=False)
        self._values: dict[Any, Any] = {}
        self._locks: dict[Any, threading.Lock] = {}
        self._guard = threading.Lock()

    def shared(self, key: Any, factory: Callable[[], Any]) -> Any:
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._values:
                self._values[key] = factory()
            return self._values[key]

    def dimension(self, n: int, v: tuple[int, ...], field: FieldSpec,
                  budget: ResourceBudget) -> int:
        c = self.config
        args = {"n": n, "v": list(v), "field": str(field), "mode": c.mode, "seed": c.seed,
                "full_limit": c.full_coefficient_limit, "margin": c.sample_margin,
                "sampling_prime": c.sampling_prime}
        return self.cache.fetch("invring", "graded_dimension", args, lambda: graded_dimension(
            n, v, field, mode=c.mode, seed=c.seed, margin=c.sample_margin,
            cap=c.spanning_cap, full_limit=c.full_coefficient_limit,
            sampling_prime=c.sampling_prime, budget=budget))

    def coords(self, n: int, w: tuple[int, ...], field: FieldSpec) -> SymCoordinates:
        return self.shared(("coords", n, w, str(field)), lambda: SymCoordinates(
            n, w, field, step_cap=self.config.straighten_step_cap))

    def kernel(self, n: int, d: int, field: FieldSpec, budget: ResourceBudget,
               w: tuple[int, ...] | None = None) -> RelationKernel:
        w = w or (1,) * n
        return self.shared(("kernel", n, w, d, str(field)),
                           lambda: self._load_kernel(n, w, d, field, budget))

    def _load_kernel(self, n: int, w: tuple[int, ...], d: int, field: FieldSpec,
                     budget: ResourceBudget) -> RelationKernel:
        coords = self.coords(n, w, field)
        args = {"n": n, "w": list(w), "d": d, "field": str(field)}
        payload = self.cache.get("invring", "relation_kernel", args)
        if payload is not None:
            vectors = [{int(i): field.convert(Fraction(a)) for i, a in vec} for vec in payload["vectors"]]
            return RelationKernel(n, w, d, field, [coords.relation_from_vector(v, d) for v in vectors],
                                  vectors, payload["sym_dimension"], payload["image_rank"], coords,
                                  payload["verification"], payload.get("prepass_rank"),
                                  payload.get("prepass_prime"))
        kernel = relation_kernel(n, w, d, field, budget=budget,
                                 expand_limit=self.config.expand_verify_limit, coords=coords)
        self.cache.put("invring", "relation_kernel", args, {
            "vectors": [[[i, field.format_scalar(a)] for i, a in sorted(v.items())]
                        for v in kernel.vectors],
            "sym_dimension": kernel.sym_dimension,
            "image_rank": kernel.image_rank,
            "verification": kernel.verification,
            "prepass_rank": kernel.prepass_rank,
            "prepass_prime": kernel.prepass_prime,
        })
        return kernel

    def character(self, n: int, k: int) -> ClassFunction:
        payload = self.cache.fetch("symrep", "module_character", {"n": n, "k": k},
                                   lambda: graded_piece_character(n, k).as_dict())
        return ClassFunction.from_dict(n, payload)


# --- registry ----------------------------------------------------------------------

@dataclass(frozen=True)
class Claim:
    claim_id: str
    anchor: str
    expected: Any
    run: Callable[[CheckContext, ResourceBudget], Any]
    suite: str = "quick"
    field: str = "q"
    stretch: bool = False


CLAIMS: dict[str, Claim] = {}


def claim(claim_id: str, anchor: str, expected: Any, suite: str = "quick",
          field: str = "q", stretch: bool = False):
    def register(fn):
        CLAIMS[claim_id] = Claim(claim_id, anchor, expected, fn, suite, field, stretch)
        return fn
    return register


QQ = FieldSpec.rationals()
F3 = FieldSpec.prime(3)


def _span_equals_kernel(vectors: list, kernel: RelationKernel) -> bool:
    if len(vectors) == 0:
        return kernel.dimension == 0
    m = SparseMatrix.from_columns(vectors, kernel.sym_dimension, kernel.field)
    return subspace_equal(m, kernel.matrix())


def _span_rank(vectors: list, dimension: int, field: FieldSpec) -> int:
    return rank(SparseMatrix.from_columns(vectors, dimension, field)) if vectors else 0


def _keyfact(ctx: CheckContext, n: int) -> dict:
    sym2 = decompose(sym_power_character(ctx.character(n, 1), 2))
    r2 = decompose(ctx.character(n, 2))
    ideal = sym2 - r2
    return {
        "sym2": [format_partition(p) for p in sym2.support],
        "sym2_multiplicity_free": sym2.is_multiplicity_free(),
        "r2": [format_partition(p) for p in r2.support],
        "ideal2": [format_partition(p) for p in ideal.support],
    }


def _keyfact_expected(n: int) -> dict:
    return {
        "sym2": [format_partition(p) for p in even_part_partitions(n, 1, 4)],
        "sym2_multiplicity_free": True,
        "r2": [format_partition(p) for p in even_part_partitions(n, 1, 3)],
        "ideal2": [format_partition(p) for p in even_part_partitions(n, 4, 4)],
    }


def _register_dims():
    for n, value, suite in ((4, 2, "quick"), (6, 5, "quick"), (8, 14, "quick"), (10, 42, "full")):
        claim(f"n{n}.dim1", f"Catalan dimension of R_1 on {n} points", value, suite)(
            lambda ctx, budget, n=n: ctx.dimension(n, (1,) * n, QQ, budget))
    for n in (4, 6, 8):
        claim(f"r1.irreducible.n{n}", f"R_1 is the irreducible ({n // 2},{n // 2})",
              {f"({n // 2},{n // 2})": 1})(
            lambda ctx, budget, n=n: decompose(ctx.character(n, 1)).as_dict())
    claim("r1.irreducible.n10", "R_1 is the irreducible (5,5)", {"(5,5)": 1}, "full")(
        lambda ctx, budget: decompose(ctx.character(10, 1)).as_dict())
    for n, suite in ((6, "quick"), (8, "quick"), (10, "full")):
        claim(f"keyfact.n{n}", "Sym^2 R_1 and R_2 split by even partitions",
              _keyfact_expected(n), suite)(lambda ctx, budget, n=n: _keyfact(ctx, n))


_register_dims()


@claim("n4.cross_ratio.relation", "the three matchings of 4 points sum to zero",
       {"relations": 1, "unit_coefficients": True})
def _cross_ratio(ctx, budget):
    rels = linear_relation_space(4, (1, 1, 1, 1), QQ, budget=budget)
    units = False
    if len(rels) == 1:
        coeffs = list(rels[0].terms.values())
        first = coeffs[0]
        units = len(coeffs) == 3 and all(c / first in (QQ.one, -QQ.one) for c in coeffs)
    return {"relations": len(rels), "unit_coefficients": units}


@claim("n5.dim1", "no degree-1 invariants of 5 points", 0)
def _n5_dim1(ctx, budget):
    return ctx.dimension(5, (1,) * 5, QQ, budget)


@claim("n5.dim2", "R_2 of 5 points embeds the quotient in P^5", 6)
def _n5_dim2(ctx, budget):
    return ctx.dimension(5, (2,) * 5, QQ, budget)


@claim("n5.kernel2.dim", "the 5-point quotient is cut out by 5 quadrics", 5)
def _n5_kernel(ctx, budget):
    return ctx.kernel(5, 2, QQ, budget, (2,) * 5).dimension


@claim("n5.del_pezzo.span", "five rotations of one binomial quadric span the quadrics",
       {"rank": 5, "equals_kernel": True})
def _n5_del_pezzo(ctx, budget):
    kernel = ctx.kernel(5, 2, QQ, budget, (2,) * 5)
    vectors = [kernel.coords.relation_vector(r) for r in del_pezzo_quadrics(QQ)]
    return {"rank": _span_rank(vectors, kernel.sym_dimension, QQ),
            "equals_kernel": _span_equals_kernel(vectors, kernel)}


@claim("n6.kernel2.dim", "no quadratic relations on 6 points", 0)
def _n6_kernel2(ctx, budget):
    return ctx.kernel(6, 2, QQ, budget).dimension


@claim("n6.kernel3.dim", "a single cubic relation on 6 points", 1)
def _n6_kernel3(ctx, budget):
    return ctx.kernel(6, 3, QQ, budget).dimension


@claim("n6.segre.nonzero", "the binomial cubic is nonzero in Sym^3 R_1", True)
def _segre_nonzero(ctx, budget):
    return bool(ctx.coords(6, (1,) * 6, QQ).relation_vector(segre_binomial_cubic(QQ)))


@claim("n6.segre.spans_kernel", "the binomial cubic spans the cubic relations", True)
def _segre_spans(ctx, budget):
    kernel = ctx.kernel(6, 3, QQ, budget)
    return _span_equals_kernel([kernel.coords.relation_vector(segre_binomial_cubic(QQ))], kernel)


@claim("n6.skew_cubic.proportional", "the skew cubic on 6 points is the binomial cubic", True)
def _skew6(ctx, budget):
    coords = ctx.coords(6, (1,) * 6, QQ)
    a = coords.relation_vector(skew_cubic(6, field=QQ, coords=coords))
    b = coords.relation_vector(segre_binomial_cubic(QQ))
    return bool(a) and _span_rank([a, b], coords.sym_dimension(3), QQ) == 1


@claim("n8.kernel2.dim", "the 8-point quotient is cut out by 14 quadrics", 14)
def _n8_kernel2(ctx, budget):
    return ctx.kernel(8, 2, QQ, budget).dimension


@claim("n8.partials.span", "the quadrics are the partials of the skew cubic",
       {"rank": 14, "equals_kernel": True})
def _n8_partials(ctx, budget):
    kernel = ctx.kernel(8, 2, QQ, budget)
    coords = kernel.coords
    quads = partials(skew_cubic(8, field=QQ, coords=coords), coords=coords)
    vectors = [coords.relation_vector(q) for q in quads]
    return {"rank": _span_rank(vectors, kernel.sym_dimension, QQ),
            "equals_kernel": _span_equals_kernel(vectors, kernel)}


@claim("n8.simple_quadric.orbit_span", "the orbit of the simple quadric spans the quadrics",
       {"dimension": 14, "equals_kernel": True})
def _n8_orbit(ctx, budget):
    kernel = ctx.kernel(8, 2, QQ, budget)
    span = orbit_span(simple_quadric(8, QQ), kernel.coords, budget)
    return {"dimension": span.dimension, "equals_kernel": span.equals(kernel)}


@claim("n8.skew_cubic.skew", "the skew cubic changes sign under a transposition", True)
def _n8_skew(ctx, budget):
    coords = ctx.coords(8, (1,) * 8, QQ)
    cubic = skew_cubic(8, field=QQ, coords=coords)
    v = coords.relation_vector(cubic)
    swapped = coords.relation_vector(cubic.permuted((2, 1, 3, 4, 5, 6, 7, 8)))
    return bool(v) and swapped == {i: -a for i, a in v.items()}


@claim("n8.generation3.rational", "quadrics generate the cubic relations on 8 points", "equal")
def _n8_generation(ctx, budget):
    return generation_check(8, 3, QQ, budget=budget, kernel_2=ctx.kernel(8, 2, QQ, budget),
                            kernel_d=ctx.kernel(8, 3, QQ, budget)).verdict


@claim("skew.sign_multiplicity.n8", "a unique skew-invariant cubic on 8 points", 1)
def _sign8(ctx, budget):
    return sign_multiplicity(sym_power_character(ctx.character(8, 1), 3))


@claim("kempe.small_weights",
       "generation in degree one for weights up to 3 on at most 6 points; only weakly "
       "decreasing weight vectors are checked, the rest follow by permuting the points",
       {"failures": []})
def _kempe_small(ctx, budget):
    failures = []
    for n in range(2, 7):
        for w in combinations_with_replacement(range(3, 0, -1), n):
            if sum(w) % 2:
                continue
            for k in (2, 3):
                verdict = kempe_check(n, w, k, QQ, seed=ctx.config.seed,
                                      margin=ctx.config.sample_margin,
                                      sampling_prime=ctx.config.sampling_prime, budget=budget)
                if not verdict.holds:
                    failures.append(f"w={','.join(map(str, w))} k={k}")
    return {"failures": failures}


@claim("kempe.n8", "generation in degree one for unit weights on 8 points", {"failures": []})
def _kempe_n8(ctx, budget):
    failures = [k for k in (2, 3)
                if not kempe_check(8, (1,) * 8, k, QQ, seed=ctx.config.seed,
                                   margin=ctx.config.sample_margin,
                                   sampling_prime=ctx.config.sampling_prime, budget=budget).holds]
    return {"failures": failures}


@claim("prop.straighten_oracle", "straightening agrees with an exact linear solve",
       {"instances": 200, "mismatches": 0})
def _prop_straighten(ctx, budget):
    rng = Random(ctx.config.seed)
    mismatches = 0
    for _ in range(200):
        n = rng.choice((2, 4, 6, 8))
        degree = rng.randint(1, 2 if n == 8 else 3)
        p = random_graph_polynomial(rng, n, degree, rng.randint(1, 4), QQ)
        if straighten(p, ctx.config.straighten_step_cap) != straighten_by_solve(p):
            mismatches += 1
        budget.check_time("straightening oracle")
    return {"instances": 200, "mismatches": mismatches}


@claim("prop.plucker_expansion", "a Plücker step preserves the bracket expansion",
       {"instances": 200, "mismatches": 0})
def _prop_plucker(ctx, budget):
    rng = Random(ctx.config.seed + 1)
    checked = mismatches = 0
    while checked < 200:
        n = rng.choice((4, 6, 8))
        p = random_graph_polynomial(rng, n, rng.randint(1, 3), 1, QQ)
        if p.is_zero():
            continue
        (_, g), = p.monomials()
        pairs = crossings(g)
        if not pairs:
            continue
        rhs = plucker_step(g, rng.choice(pairs), QQ)
        if expand_polynomial(GraphPolynomial.from_monomials([g], QQ)) != expand_polynomial(rhs):
            mismatches += 1
        checked += 1
    return {"instances": checked, "mismatches": mismatches}


@claim("prop.rank_nullity", "rank plus nullity equals the column count", {"mismatches": 0})
def _prop_rank_nullity(ctx, budget):
    rng = Random(ctx.config.seed + 2)
    mismatches = 0
    for k in range(60):
        field = QQ if k % 2 == 0 else F3
        r, c = rng.randint(1, 12), rng.randint(1, 12)
        entries = {(i, j): rng.randint(-4, 4) for i in range(r) for j in range(c)
                   if rng.random() < 0.4}
        m = SparseMatrix.from_entries(r, c, entries, field)
        if rank(m) + len(kernel_basis(m)) != c:
            mismatches += 1
    return {"mismatches": mismatches}


@claim("prop.relations_zero", "every emitted relation expands to zero", {"nonzero": 0})
def _prop_relations_zero(ctx, budget):
    relations = [e.relation for e in catalog(QQ, include_skew=False)]
    relations += ctx.kernel(5, 2, QQ, budget, (2,) * 5).relations
    relations += ctx.kernel(6, 3, QQ, budget).relations
    relations += ctx.kernel(8, 2, QQ, budget).relations
    return {"nonzero": sum(1 for r in relations if not image_is_zero(r, "expansion"))}


@claim("catalog.zero_images", "every catalog relation expands to zero", {"entries": 26})
def _catalog(ctx, budget):
    return {"entries": len(catalog(QQ))}


# --- full suite -----------------------------------------------------------------

@claim("n10.kernel2.dim", "quadrics on 10 points: the (4,2,2,2) summand", 300, "full")
def _n10_kernel(ctx, budget):
    return ctx.kernel(10, 2, QQ, budget).dimension


@claim("n10.kernel2.hook", "hook-length dimension of (4,2,2,2) matches the kernel",
       {"hook": 300, "kernel": 300}, "full")
def _n10_hook(ctx, budget):
    return {"hook": hook_dimension((4, 2, 2, 2)), "kernel": ctx.kernel(10, 2, QQ, budget).dimension}


@claim("n10.simple_quadric.orbit_span", "the orbit of the extended simple quadric spans the quadrics",
       {"dimension": 300, "equals_kernel": True}, "full")
def _n10_orbit(ctx, budget):
    kernel = ctx.kernel(10, 2, QQ, budget)
    span = orbit_span(extended_simple_quadric(10, QQ), kernel.coords, budget)
    return {"dimension": span.dimension, "equals_kernel": span.equals(kernel)}


@claim("skew.sign_multiplicity.n10", "no skew-invariant cubic on 10 points", 0, "full")
def _sign10(ctx, budget):
    return sign_multiplicity(sym_power_character(ctx.character(10, 1), 3))


@claim("n10.skew_cubic.zero", "the skew symmetrization vanishes on 10 points", True, "full")
def _skew10(ctx, budget):
    return skew_cubic(10, field=QQ).is_zero()


@claim("char3-generation", "in characteristic 3 the skew cubic is a necessary generator",
       {"verdict": "strictly-contained", "defect_positive": True, "skew_fills": True},
       "full", field="fp:3")
def _char3(ctx, budget):
    verdict = generation_check(8, 3, F3, budget=budget, kernel_2=ctx.kernel(8, 2, F3, budget),
                               kernel_d=ctx.kernel(8, 3, F3, budget))
    return {"verdict": verdict.verdict, "defect_positive": verdict.defect > 0,
            "skew_fills": bool(verdict.skew_fills)}


@claim("n12.kernel2.dim", "quadrics on 12 points: the four-part even summands",
       sum(hook_dimension(p) for p in even_part_partitions(12, 4, 4)), "full", stretch=True)
def _n12_kernel(ctx, budget):
    return ctx.kernel(12, 2, QQ, budget).dimension


# --- running -------------------------------------------------------------------

def select_claims(config: RunConfig) -> list[Claim]:
    """Claims of the configured suite, or exactly the requested ids.

    Raises:
        ValueError: On an unknown claim id
    """
    if config.claims:
        unknown = [c for c in config.claims if c not in CLAIMS]
        if unknown:
            raise ValueError(f"unknown claim id(s): {', '.join(unknown)}")
        return [CLAIMS[c] for c in sorted(set(config.claims))]
    wanted = {"quick"} if config.suite == "quick" else {"quick", "full"}
    return [c for c in sorted(CLAIMS.values(), key=lambda c: c.claim_id) if c.suite in wanted]


def run_claim(entry: Claim, ctx: CheckContext) -> CheckRecord:
    started = time.monotonic()
    label = FieldSpec.parse(entry.field).label
    base = {"claim_id": entry.claim_id, "anchor": entry.anchor, "expected": entry.expected,
            "field": label}
    if entry.stretch and not ctx.config.stretch:
        return CheckRecord(**base, verdict=Verdict.SKIPPED,
                           reason="stretch check; enable with --stretch", elapsed=0.0)
    budget = ctx.config.budget()
    try:
        computed = entry.run(ctx, budget)
    except ResourceCapExceeded as e:
        log.warning("%s skipped: %s", entry.claim_id, e)
        return CheckRecord(**base, verdict=Verdict.SKIPPED, reason=str(e),
                           elapsed=round(time.monotonic() - started, 3))
    except Exception as e:
        log.exception("%s raised", entry.claim_id)
        return CheckRecord(**base, verdict=Verdict.FAIL, reason=f"{type(e).__name__}: {e}",
                           elapsed=round(time.monotonic() - started, 3))
    computed = json.loads(json.dumps(computed))
    verdict = Verdict.PASS if computed == entry.expected else Verdict.FAIL
    log.info("%s: %s", entry.claim_id, verdict.value)
    return CheckRecord(**base, computed=computed, verdict=verdict,
                       elapsed=round(time.monotonic() - started, 3))


def run_suite(config: RunConfig, cache: ResultCache | None = None) -> VerificationReport:
    """Run the selected claims with up to ``config.workers`` threads."""
    entries = select_claims(config)
    ctx = CheckContext(config, cache)
    log.info("running %d check(s) with %d worker(s)", len(entries), config.workers)
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        records = list(pool.map(lambda e: run_claim(e, ctx), entries))
    records.sort(key=lambda r: r.claim_id)
    return VerificationReport(
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        config=config, checks=records)


def format_report_text(report: VerificationReport) -> str:
    lines = ["=" * 60, "VERIFICATION SUMMARY", "=" * 60]
    marks = {Verdict.PASS: "✓ PASS", Verdict.FAIL: "✗ FAIL", Verdict.SKIPPED: "- SKIP"}
    for c in report.checks:
        line = f"{marks[c.verdict]}: {c.claim_id} ({c.field}, {c.elapsed:.1f}s)"
        if c.verdict is Verdict.FAIL:
            line += f"\n    computed {json.dumps(c.computed)}, expected {json.dumps(c.expected)}"
        if c.reason:
            line += f"\n    {c.reason}"
        lines.append(line)
    counts = report.counts()
    lines += ["=" * 60,
              f"{counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped",
              "=" * 60]
    return "\n".join(lines) + "\n"
