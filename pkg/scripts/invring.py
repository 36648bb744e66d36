"""Graded pieces R_v of the ring of PGL2-invariants of n points.

R_v is coordinatized either by the exact coefficients of the bracket
expansion (a polynomial in x_i, y_i, bihomogeneous of degree v_i in each
point) or by values at sampled configurations in the affine chart y_i = 1.
Degree-d relations live in Sym^d(R_w), coordinatized by weakly decreasing
d-tuples of indices into the non-crossing basis of R_w.
"""

from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass, field as dc_field
from enum import Enum
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, prod
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np
from sympy.polys.rings import PolyRing

from exactfield import (
    FieldSpec,
    ModularSpanTracker,
    Scalar,
    SparseMatrix,
    Vector,
    WORD_PRIME,
    kernel_basis,
    rank,
    rank_mod_prime,
    DENSE_ENTRY_LIMIT,
)
from graphalg import (
    DEFAULT_STEP_CAP,
    Edges,
    GraphMonomial,
    GraphPolynomial,
    ValenceVector,
    edges_valence,
    enumerate_noncrossing,
    enumerate_spanning,
    apply_permutation,
    format_graph,
    format_term,
    is_realizable,
    straighten_many,
)

log = logging.getLogger("pgl2_invariants.invring")

FULL_COEFFICIENT_LIMIT = 2**20
EXPAND_VERIFY_LIMIT = 2**13
SAMPLE_MARGIN = 32
SPANNING_CAP = 200_000
SMALL_PRIME_LIMIT = 2**26
BYTES_PER_ENTRY = 64

CoordinateVector = dict[Any, Scalar]


class ResourceCapExceeded(RuntimeError):
    """A computation would exceed its memory estimate or its time allowance."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SpanningTruncatedError(RuntimeError):
    """The spanning-set enumeration hit its cap, so no dimension can be certified."""


class SamplingError(ValueError):
    """Not enough (or malformed) sample configurations."""


class EmptyGradedPieceError(ValueError):
    """The requested degree-1 piece is zero, so Sym^d coordinates do not exist."""


class VerificationFailure(AssertionError):
    """A computed relation or straightening failed its exact check."""


@dataclass(frozen=True)
class WeightVector:
    w: tuple[int, ...]

    def __post_init__(self):
        if not self.w or any(int(x) < 1 for x in self.w):
            raise ValueError(f"weights must be positive integers, got {self.w}")

    @classmethod
    def unit(cls, n: int) -> "WeightVector":
        return cls((1,) * n)

    @property
    def n(self) -> int:
        return len(self.w)

    def scaled(self, k: int) -> ValenceVector:
        return tuple(k * x for x in self.w)


def _weights(w: WeightVector | Sequence[int], n: int) -> tuple[int, ...]:
    weights = w.w if isinstance(w, WeightVector) else tuple(int(x) for x in w)
    WeightVector(weights)
    if len(weights) != n:
        raise ValueError(f"weight vector {weights} does not have {n} entries")
    return weights


@dataclass
class ResourceBudget:
    """Cooperative memory and time caps for one check."""

    max_bytes: int = 8 * 2**30
    max_seconds: float = 7200.0
    started: float = dc_field(default_factory=time.monotonic)

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def check_time(self, stage: str = "") -> None:
        if self.elapsed > self.max_seconds:
            raise ResourceCapExceeded(
                f"time cap of {self.max_seconds:.0f}s exceeded{' during ' + stage if stage else ''}",
                {"stage": stage, "elapsed": round(self.elapsed, 1)})

    def check_matrix(self, nrows: int, ncols: int, stage: str = "") -> None:
        estimate = nrows * ncols * BYTES_PER_ENTRY
        if estimate > self.max_bytes:
            raise ResourceCapExceeded(
                f"{stage or 'matrix'} of shape {nrows}x{ncols} needs ~{estimate / 2**30:.1f} GiB",
                {"stage": stage, "shape": [nrows, ncols], "estimate_bytes": estimate})
        self.check_time(stage)


UNLIMITED = ResourceBudget(max_bytes=2**62, max_seconds=float("inf"))


# --- bracket expansion ----------------------------------------------------------

@lru_cache(maxsize=None)
def _bracket_ring(n: int, field: FieldSpec) -> PolyRing:
    names = [f"x{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)]
    return PolyRing(names, field.domain)


@lru_cache(maxsize=50_000)
def _expand_edges(n: int, edges: Edges, field: FieldSpec) -> tuple[tuple[tuple[int, ...], Scalar], ...]:
    R = _bracket_ring(n, field)
    x, y = R.gens[:n], R.gens[n:]
    poly = R.one
    for a, b in edges:
        poly *= x[a - 1] * y[b - 1] - x[b - 1] * y[a - 1]
    return tuple((monom[:n], c) for monom, c in poly.items())


def bracket_expand(g: GraphMonomial, field: FieldSpec | None = None) -> CoordinateVector:
    """Exact coefficients of the bracket product of g.

    Keys are the x-exponent tuples (the y-exponents are determined by the
    valence); the monomial's sign is applied.
    """
    field = field or FieldSpec.rationals()
    terms = _expand_edges(g.n, g.edges, field)
    if g.sign == 1:
        return dict(terms)
    return {m: -c for m, c in terms}


def expand_polynomial(p: GraphPolynomial) -> CoordinateVector:
    """Bracket expansion of a graph polynomial, zero coefficients dropped."""
    acc: CoordinateVector = {}
    zero = p.field.zero
    for edges, c in p.terms.items():
        for m, a in _expand_edges(p.n, edges, p.field):
            new = acc.get(m, zero) + c * a
            if new:
                acc[m] = new
            else:
                acc.pop(m, None)
    return acc


def eval_at(g: GraphMonomial, samples: Sequence[Sequence[tuple[Any, Any]]],
            field: FieldSpec | None = None, minimum: int = 0) -> list[Scalar]:
    """Values of g at sample configurations, each a sequence of n points (x, y).

    Raises:
        SamplingError: If fewer than ``minimum`` samples are given or a sample has the wrong size
    """
    field = field or FieldSpec.rationals()
    if len(samples) < minimum:
        raise SamplingError(f"{len(samples)} samples given, at least {minimum} required")
    values = []
    for config in samples:
        if len(config) != g.n:
            raise SamplingError(f"sample has {len(config)} points, expected {g.n}")
        pts = [(field.convert(px), field.convert(py)) for px, py in config]
        value = field.one if g.sign == 1 else -field.one
        for a, b in g.edges:
            (xa, ya), (xb, yb) = pts[a - 1], pts[b - 1]
            value *= xa * yb - xb * ya
        values.append(value)
    return values


def draw_affine_samples(n: int, count: int, seed: int, modulus: int | None = None,
                        spread: int = 1000) -> np.ndarray:
    """``count`` rows of n pairwise distinct affine coordinates (y_i = 1).

    Over a prime modulus the coordinates are residues; otherwise they are
    small integers in [-spread, spread]. Rows with a repeated coordinate are
    redrawn.
    """
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < count:
        if modulus is None:
            row = rng.integers(-spread, spread + 1, size=n)
        else:
            row = rng.integers(0, modulus, size=n)
        if len(set(row.tolist())) == n:
            rows.append(row)
    return np.array(rows, dtype=np.int64 if modulus is not None else object).reshape(count, n)


def eval_matrix_mod_p(graphs: Sequence[GraphMonomial], xs: np.ndarray, p: int) -> np.ndarray:
    """Values (mod p < 2^31) of each graph at each affine sample row: shape (samples, graphs)."""
    xs = np.asarray(xs, dtype=np.int64) % p
    out = np.empty((xs.shape[0], len(graphs)), dtype=np.int64)
    for k, g in enumerate(graphs):
        col = np.full(xs.shape[0], 1 if g.sign == 1 else p - 1, dtype=np.int64)
        for a, b in g.edges:
            col = (col * ((xs[:, a - 1] - xs[:, b - 1]) % p)) % p
        out[:, k] = col
    return out


def _eval_exact(g: GraphMonomial, row: Sequence[int]) -> int:
    value = g.sign
    for a, b in g.edges:
        value *= int(row[a - 1]) - int(row[b - 1])
    return value


# --- graded pieces --------------------------------------------------------------

class CoordinateMode(str, Enum):
    FULL = "full"
    SAMPLED = "sampled"


def coefficient_space_size(v: Sequence[int]) -> int:
    return prod(x + 1 for x in v)


def choose_mode(v: Sequence[int], field: FieldSpec,
                full_limit: int = FULL_COEFFICIENT_LIMIT) -> CoordinateMode:
    """Full coefficients when affordable or when the field is too small to sample in."""
    if coefficient_space_size(v) <= full_limit:
        return CoordinateMode.FULL
    if field.is_prime and field.modulus <= SMALL_PRIME_LIMIT:
        return CoordinateMode.FULL
    return CoordinateMode.SAMPLED


@dataclass(frozen=True, eq=False)
class MultidegreeSpace:
    """R_v with a coordinatization and its non-crossing basis.

    In sampled mode there are |basis| + margin samples; non-crossing graphs
    span R_v in every characteristic, so no rank can exceed |basis|.
    Over the rationals the integer samples are also reduced modulo
    ``sampling_prime`` for a fast rank certificate.
    """

    n: int
    valence: ValenceVector
    field: FieldSpec
    mode: CoordinateMode
    basis: tuple[GraphMonomial, ...]
    samples: Any = None
    sample_modulus: int | None = None
    sampling_prime: int = WORD_PRIME

    @classmethod
    def build(cls, n: int, v: Sequence[int], field: FieldSpec | None = None,
              mode: CoordinateMode | str | None = None, seed: int = 0,
              margin: int = SAMPLE_MARGIN, full_limit: int = FULL_COEFFICIENT_LIMIT,
              sampling_prime: int = WORD_PRIME) -> "MultidegreeSpace":
        field = field or FieldSpec.rationals()
        v = tuple(int(x) for x in v)
        if len(v) != n:
            raise ValueError(f"valence {v} does not have {n} entries")
        mode = CoordinateMode(mode) if mode else choose_mode(v, field, full_limit)
        if not 2 < sampling_prime < 2**31:
            raise SamplingError(f"sampling prime {sampling_prime} must lie in (2, 2^31)")
        basis = tuple(enumerate_noncrossing(n, v))
        if mode is CoordinateMode.FULL:
            return cls(n, v, field, mode, basis)
        if field.is_prime and field.modulus <= SMALL_PRIME_LIMIT:
            raise SamplingError(f"cannot sample reliably in {field.label}")
        modulus = None
        if field.is_prime:
            modulus = field.modulus if field.modulus < 2**31 else None
            if modulus is None:
                raise SamplingError("sampled mode over prime fields needs p < 2^31")
        samples = draw_affine_samples(n, len(basis) + margin, seed, modulus)
        return cls(n, v, field, mode, basis, samples, modulus, sampling_prime)

    @property
    def coordinate_dimension(self) -> int:
        if self.mode is CoordinateMode.FULL:
            return coefficient_space_size(self.valence)
        return len(self.samples)

    @property
    def dimension_upper_bound(self) -> int:
        return len(self.basis)

    def coordinates(self, g: GraphMonomial) -> CoordinateVector:
        if g.n != self.n or edges_valence(g.n, g.edges) != self.valence:
            raise ValueError("graph does not belong to this graded piece")
        if self.mode is CoordinateMode.FULL:
            return bracket_expand(g, self.field)
        if self.sample_modulus is not None:
            col = eval_matrix_mod_p([g], self.samples, self.sample_modulus)[:, 0]
            return {i: self.field.convert(int(a)) for i, a in enumerate(col) if a}
        return {i: self.field.convert(val) for i, row in enumerate(self.samples)
                if (val := _eval_exact(g, row))}

    def coordinate_matrix(self, graphs: Sequence[GraphMonomial]) -> SparseMatrix:
        """Columns are the coordinates of ``graphs``."""
        if self.mode is CoordinateMode.FULL:
            index: dict[tuple[int, ...], int] = {}
            columns = []
            for g in graphs:
                col = {}
                for m, c in self.coordinates(g).items():
                    col[index.setdefault(m, len(index))] = c
                columns.append(col)
            return SparseMatrix.from_columns(columns, max(len(index), 1), self.field)
        return SparseMatrix.from_columns([self.coordinates(g) for g in graphs],
                                         len(self.samples), self.field)

    def rank(self) -> int:
        """Rank of the non-crossing basis in this coordinatization."""
        if not self.basis:
            return 0
        return rank(self.coordinate_matrix(self.basis))


def _modular_span_dim(graphs: Sequence[GraphMonomial], samples: np.ndarray, p: int,
                      ceiling: int) -> int:
    values = eval_matrix_mod_p(graphs, samples, p)
    tracker = ModularSpanTracker(values.shape[0], p)
    for k in range(values.shape[1]):
        tracker.add(values[:, k])
        if tracker.dim == ceiling:
            break
    return tracker.dim


def graded_dimension(n: int, v: Sequence[int], field: FieldSpec | None = None,
                     mode: CoordinateMode | str | None = None, cap: int = SPANNING_CAP,
                     seed: int = 0, margin: int = SAMPLE_MARGIN,
                     full_limit: int = FULL_COEFFICIENT_LIMIT,
                     sampling_prime: int = WORD_PRIME,
                     budget: ResourceBudget | None = None) -> int:
    """Rank of the coordinate matrix of the full spanning set of R_v.

    Raises:
        SpanningTruncatedError: If the spanning set exceeds ``cap``
    """
    field = field or FieldSpec.rationals()
    budget = budget or UNLIMITED
    v = tuple(int(x) for x in v)
    if len(v) != n:
        raise ValueError(f"valence {v} does not have {n} entries")
    if not is_realizable(v):
        return 0
    spanning = enumerate_spanning(n, v, cap)
    if spanning.truncated:
        raise SpanningTruncatedError(f"more than {cap} spanning graphs for n={n}, v={v}")
    space = MultidegreeSpace.build(n, v, field, mode, seed, margin, full_limit, sampling_prime)
    rows = space.coordinate_dimension
    budget.check_matrix(min(rows, 2**31), len(spanning.graphs), "graded dimension")
    if space.mode is CoordinateMode.SAMPLED and space.sample_modulus is not None:
        result = _modular_span_dim(spanning.graphs, space.samples, space.sample_modulus,
                                   len(space.basis))
    elif space.mode is CoordinateMode.SAMPLED:
        # rank mod p never exceeds the rank over Q; reaching |basis| certifies it
        reduced = np.array([[int(x) % space.sampling_prime for x in row] for row in space.samples],
                           dtype=np.int64).reshape(space.samples.shape)
        result = _modular_span_dim(spanning.graphs, reduced, space.sampling_prime,
                                   len(space.basis))
        if result < len(space.basis):
            log.debug("rank %d mod %d below %d, ranking exactly", result,
                      space.sampling_prime, len(space.basis))
            result = rank(space.coordinate_matrix(spanning.graphs))
    else:
        result = rank(space.coordinate_matrix(spanning.graphs))
    log.info("dim R_%s (n=%d, %s, %s) = %d", v, n, field.label, space.mode.value, result)
    return result


def hilbert_function(n: int, w: WeightVector | Sequence[int], kmax: int,
                     field: FieldSpec | None = None) -> list[int]:
    """dim R_{k·w} for k = 0..kmax.

    Without a field the non-crossing counts are returned; with one, each
    dimension is recomputed as a rank over that field.
    """
    weights = _weights(w, n)
    dims = []
    for k in range(kmax + 1):
        v = tuple(k * x for x in weights)
        if field is None:
            dims.append(len(enumerate_noncrossing(n, v)))
        else:
            dims.append(1 if k == 0 else graded_dimension(n, v, field))
    return dims


# --- symmetric powers and relations ---------------------------------------------

FactorKey = tuple[Edges, ...]


@dataclass(frozen=True, eq=False)
class SymbolicRelation:
    """Element of Sym^d of a degree-1 piece: a formal polynomial in graphs.

    ``terms`` maps a weakly decreasing tuple of d canonical edge tuples (the
    factors) to a nonzero scalar; factor signs are folded into it.
    """

    n: int
    degree: int
    field: FieldSpec
    terms: dict[FactorKey, Scalar] = dc_field(default_factory=dict)

    def __post_init__(self):
        shape = None
        for key, c in self.terms.items():
            if not c:
                raise ValueError("stored zero coefficient")
            if len(key) != self.degree:
                raise ValueError(f"term with {len(key)} factors in a degree-{self.degree} relation")
            if list(key) != sorted(key, reverse=True):
                raise ValueError("factors must be weakly decreasing")
            for factor in key:
                val = edges_valence(self.n, factor)
                if shape is None:
                    shape = val
                elif val != shape:
                    raise ValueError("factors of different valence")

    @classmethod
    def from_products(cls, n: int, items: Iterable[tuple[Any, Sequence[GraphMonomial]]],
                      field: FieldSpec, degree: int | None = None) -> "SymbolicRelation":
        acc: dict[FactorKey, Scalar] = {}
        zero = field.zero
        for coeff, factors in items:
            c = field.convert(coeff)
            for g in factors:
                if g.n != n:
                    raise ValueError(f"factor on {g.n} vertices in a relation on {n}")
                if g.sign == -1:
                    c = -c
            key = tuple(sorted((g.edges for g in factors), reverse=True))
            if degree is None:
                degree = len(key)
            new = acc.get(key, zero) + c
            if new:
                acc[key] = new
            else:
                acc.pop(key, None)
        if degree is None:
            raise ValueError("degree needed for an empty relation")
        return cls(n, degree, field, acc)

    @property
    def weights(self) -> ValenceVector | None:
        for key in self.terms:
            return edges_valence(self.n, key[0])
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def image(self) -> GraphPolynomial:
        """The invariant this relation maps to: superpose each product."""
        acc: dict[Edges, Scalar] = {}
        zero = self.field.zero
        for key, c in self.terms.items():
            edges = tuple(heapq.merge(*key))
            new = acc.get(edges, zero) + c
            if new:
                acc[edges] = new
            else:
                acc.pop(edges, None)
        return GraphPolynomial(self.n, self.field, acc)

    def permuted(self, sigma: Sequence[int]) -> "SymbolicRelation":
        items = []
        for key, c in self.terms.items():
            items.append((c, [apply_permutation(sigma, GraphMonomial(self.n, e)) for e in key]))
        return SymbolicRelation.from_products(self.n, items, self.field, self.degree)

    def scale(self, factor: Any) -> "SymbolicRelation":
        f = self.field.convert(factor)
        if not f:
            return SymbolicRelation(self.n, self.degree, self.field, {})
        return SymbolicRelation(self.n, self.degree, self.field,
                                {k: c * f for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicRelation):
            return NotImplemented
        return (self.n, self.degree, self.field, self.terms) == (
            other.n, other.degree, other.field, other.terms)

    def format(self) -> str:
        if not self.terms:
            return "0"
        return " ".join(format_term(self.terms[k], k, self.field) for k in sorted(self.terms))

    def __str__(self) -> str:
        return self.format()


def image_is_zero(rel: SymbolicRelation, method: str = "expansion") -> bool:
    """Exact zero-image test by bracket expansion or by straightening."""
    image = rel.image()
    if image.is_zero():
        return True
    if method == "expansion":
        return not expand_polynomial(image)
    if method == "straightening":
        return straighten_many([image])[0].is_zero()
    raise ValueError(f"unknown verification method '{method}'")


def verification_method(weights: Sequence[int], degree: int,
                        expand_limit: int = EXPAND_VERIFY_LIMIT) -> str:
    v = [degree * x for x in weights]
    return "expansion" if coefficient_space_size(v) <= expand_limit else "straightening"


class SymCoordinates:
    """Coordinates on Sym^d(R_w) in the non-crossing basis z_0..z_{m-1} of R_w.

    Degree-d monomials are weakly decreasing index tuples; sympy polynomials
    in the basis variables carry the algebra (products, derivatives,
    substitutions).

    Raises:
        EmptyGradedPieceError: If R_w is zero
    """

    def __init__(self, n: int, w: WeightVector | Sequence[int], field: FieldSpec | None = None,
                 step_cap: int = DEFAULT_STEP_CAP):
        self.n = n
        self.weights = _weights(w, n)
        self.field = field or FieldSpec.rationals()
        self.step_cap = step_cap
        self.basis = enumerate_noncrossing(n, self.weights)
        if not self.basis:
            raise EmptyGradedPieceError(f"R_w is zero for n={n}, w={self.weights}")
        self.index = {g.edges: i for i, g in enumerate(self.basis)}
        self.ring = PolyRing([f"z{i}" for i in range(len(self.basis))], self.field.domain)
        self._forms: dict[Edges, Any] = {}
        self._monomials: dict[int, list[tuple[int, ...]]] = {}
        self._monomial_index: dict[int, dict[tuple[int, ...], int]] = {}

    @property
    def size(self) -> int:
        return len(self.basis)

    def sym_dimension(self, d: int) -> int:
        return comb(self.size + d - 1, d)

    def monomials(self, d: int) -> list[tuple[int, ...]]:
        if d not in self._monomials:
            monos = list(combinations_with_replacement(range(self.size - 1, -1, -1), d))
            monos.sort()
            self._monomials[d] = monos
            self._monomial_index[d] = {t: i for i, t in enumerate(monos)}
        return self._monomials[d]

    def monomial_index(self, d: int) -> dict[tuple[int, ...], int]:
        self.monomials(d)
        return self._monomial_index[d]

    def linear_forms(self, factors: Sequence[Edges]) -> list[Any]:
        """Basis expansions of degree-1 graphs (upward edges, sign +1) as ring elements."""
        missing = [e for e in dict.fromkeys(factors) if e not in self._forms]
        if missing:
            for e in missing:
                if edges_valence(self.n, e) != self.weights:
                    raise ValueError(f"factor {e} is not of weight {self.weights}")
            polys = [GraphPolynomial(self.n, self.field, {e: self.field.one}) for e in missing]
            gens = self.ring.gens
            for e, p in zip(missing, straighten_many(polys, step_cap=self.step_cap)):
                form = self.ring.zero
                for edges, c in p.terms.items():
                    form += gens[self.index[edges]] * c
                self._forms[e] = form
        return [self._forms[e] for e in factors]

    def linear_form(self, factor: Edges) -> Any:
        return self.linear_forms([factor])[0]

    def exponents(self, t: Sequence[int]) -> tuple[int, ...]:
        exps = [0] * self.size
        for i in t:
            exps[i] += 1
        return tuple(exps)

    def index_tuple(self, exps: Sequence[int]) -> tuple[int, ...]:
        out = []
        for i in range(self.size - 1, -1, -1):
            out.extend([i] * exps[i])
        return tuple(out)

    def poly_from_vector(self, vec: Mapping[int, Scalar], d: int) -> Any:
        monos = self.monomials(d)
        return self.ring.from_dict({self.exponents(monos[k]): c for k, c in vec.items() if c})

    def vector_from_poly(self, poly: Any, d: int) -> Vector:
        index = self.monomial_index(d)
        out: Vector = {}
        for exps, c in poly.items():
            if sum(exps) != d:
                raise ValueError(f"polynomial is not homogeneous of degree {d}")
            if c:
                out[index[self.index_tuple(exps)]] = c
        return out

    def relation_from_vector(self, vec: Mapping[int, Scalar], d: int) -> SymbolicRelation:
        monos = self.monomials(d)
        terms = {tuple(self.basis[i].edges for i in monos[k]): c for k, c in vec.items() if c}
        return SymbolicRelation(self.n, d, self.field, terms)

    def relation_poly(self, rel: SymbolicRelation) -> Any:
        if rel.n != self.n:
            raise ValueError("relation lives on a different number of points")
        if rel.field != self.field:
            raise ValueError("relation lives over a different field")
        factors = [e for key in rel.terms for e in key]
        self.linear_forms(factors)
        poly = self.ring.zero
        for key, c in rel.terms.items():
            term = self.ring.one * c
            for e in key:
                term *= self._forms[e]
            poly += term
        return poly

    def relation_vector(self, rel: SymbolicRelation) -> Vector:
        return self.vector_from_poly(self.relation_poly(rel), rel.degree)

    def relation_from_poly(self, poly: Any, d: int) -> SymbolicRelation:
        return self.relation_from_vector(self.vector_from_poly(poly, d), d)

    def permutation_forms(self, sigma: Sequence[int]) -> list[Any]:
        """Images sigma(z_i) of the basis variables as linear forms."""
        moved = [apply_permutation(sigma, g) for g in self.basis]
        forms = self.linear_forms([g.edges for g in moved])
        return [f if g.sign == 1 else -f for f, g in zip(forms, moved)]

    def act(self, poly: Any, forms: Sequence[Any]) -> Any:
        """Substitute z_i -> forms[i] simultaneously."""
        return poly.compose(list(zip(self.ring.gens, forms)))


@dataclass
class RelationKernel:
    """Basis of ker(Sym^d(R_w) -> R_{d·w})."""

    n: int
    weights: tuple[int, ...]
    degree: int
    field: FieldSpec
    relations: list[SymbolicRelation]
    vectors: list[Vector]
    sym_dimension: int
    image_rank: int
    coords: SymCoordinates
    verification: str
    prepass_rank: int | None = None
    prepass_prime: int | None = None

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self) -> Iterator[SymbolicRelation]:
        return iter(self.relations)

    def __getitem__(self, k: int) -> SymbolicRelation:
        return self.relations[k]

    @property
    def dimension(self) -> int:
        return len(self.relations)

    def matrix(self) -> SparseMatrix:
        """Kernel vectors as columns in Sym^d coordinates."""
        return SparseMatrix.from_columns(self.vectors, self.sym_dimension, self.field)


def multiplication_matrix(coords: SymCoordinates, d: int,
                          budget: ResourceBudget | None = None) -> SparseMatrix:
    """Matrix of Sym^d(R_w) -> R_{d·w}: rows the non-crossing basis of R_{d·w}."""
    budget = budget or UNLIMITED
    monos = coords.monomials(d)
    target = enumerate_noncrossing(coords.n, tuple(d * x for x in coords.weights))
    budget.check_matrix(len(target), len(monos), "multiplication matrix")
    row_of = {g.edges: i for i, g in enumerate(target)}
    one = coords.field.one
    columns = [GraphPolynomial(coords.n, coords.field,
                               {tuple(heapq.merge(*(coords.basis[i].edges for i in t))): one})
               for t in monos]
    straightened = straighten_many(columns, step_cap=coords.step_cap,
                                   deadline_check=lambda: budget.check_time("straightening"))
    rows: dict[int, dict[int, Scalar]] = {}
    for j, p in enumerate(straightened):
        for edges, c in p.terms.items():
            if edges not in row_of:
                raise VerificationFailure(f"straightening produced a non-basis graph {edges}")
            rows.setdefault(row_of[edges], {})[j] = c
    log.debug("multiplication matrix %dx%d, nnz=%d", len(target), len(monos),
              sum(len(r) for r in rows.values()))
    return SparseMatrix(len(target), len(monos), coords.field, rows)


def relation_kernel(n: int, w: WeightVector | Sequence[int], d: int,
                    field: FieldSpec | None = None, *,
                    budget: ResourceBudget | None = None,
                    prepass_prime: int | None = WORD_PRIME,
                    expand_limit: int = EXPAND_VERIFY_LIMIT,
                    coords: SymCoordinates | None = None) -> RelationKernel:
    """Kernel of Sym^d(R_w) -> R_{d·w}, each relation checked for zero image.

    Raises:
        ResourceCapExceeded: If the matrix or the run time exceeds ``budget``
        EmptyGradedPieceError: If R_w is zero
        VerificationFailure: If a computed relation does not map to zero
    """
    if d < 2:
        raise ValueError("relation kernels start in degree 2")
    field = field or FieldSpec.rationals()
    budget = budget or UNLIMITED
    coords = coords or SymCoordinates(n, w, field)
    if coords.field != field:
        raise ValueError("coordinates live over a different field")
    matrix = multiplication_matrix(coords, d, budget)
    prepass = None
    if prepass_prime and not field.is_prime and 0 < matrix.nrows * matrix.ncols <= DENSE_ENTRY_LIMIT:
        prepass = rank_mod_prime(matrix, prepass_prime)
        log.debug("prime pre-pass: rank %d modulo %d", prepass, prepass_prime)
    budget.check_time("elimination")
    vectors = kernel_basis(matrix)
    image_rank = matrix.ncols - len(vectors)
    if prepass is not None and prepass != image_rank:
        log.warning("rank modulo %d is %d but the exact rank is %d", prepass_prime, prepass,
                    image_rank)
    relations = [coords.relation_from_vector(v, d) for v in vectors]
    method = verification_method(coords.weights, d, expand_limit)
    for k, rel in enumerate(relations):
        if k % 16 == 0:
            budget.check_time("verification")
        if not image_is_zero(rel, method):
            raise VerificationFailure(f"kernel element {k} has nonzero image")
    log.info("kernel of Sym^%d R_%s -> R_%s over %s: dim %d (Sym^d %d, image %d, %s check)",
             d, coords.weights, tuple(d * x for x in coords.weights), field.label,
             len(relations), matrix.ncols, image_rank, method)
    return RelationKernel(n, coords.weights, d, field, relations, vectors, matrix.ncols,
                          image_rank, coords, method, prepass,
                          prepass_prime if prepass is not None else None)


# --- generation in degree one ---------------------------------------------------

@dataclass(frozen=True)
class KempeVerdict:
    n: int
    weights: tuple[int, ...]
    k: int
    holds: bool
    vacuous: bool
    rank: int
    target: int
    method: str

    def __bool__(self) -> bool:
        return self.holds


def _products(a: Sequence[GraphMonomial], b: Sequence[GraphMonomial]) -> Iterator[tuple[int, int]]:
    for i in range(len(a)):
        for j in range(len(b)):
            yield i, j


def _kempe_exact(n: int, a_basis, b_basis, target, field: FieldSpec, budget: ResourceBudget) -> int:
    row_of = {g.edges: i for i, g in enumerate(target)}
    budget.check_matrix(len(target), len(a_basis) * len(b_basis), "Kempe products")
    one = field.one
    polys = [GraphPolynomial(n, field, {tuple(heapq.merge(a_basis[i].edges, b_basis[j].edges)): one})
             for i, j in _products(a_basis, b_basis)]
    straightened = straighten_many(polys, deadline_check=lambda: budget.check_time("Kempe"))
    rows: dict[int, dict[int, Scalar]] = {}
    for col, p in enumerate(straightened):
        for edges, c in p.terms.items():
            rows.setdefault(row_of[edges], {})[col] = c
    return rank(SparseMatrix(len(target), len(polys), field, rows))


def _kempe_sampled(a_basis, b_basis, target_size: int, n: int, seed: int, margin: int,
                   p: int, budget: ResourceBudget) -> int:
    xs = draw_affine_samples(n, target_size + margin, seed, p)
    ea = eval_matrix_mod_p(a_basis, xs, p)
    eb = eval_matrix_mod_p(b_basis, xs, p)
    tracker = ModularSpanTracker(xs.shape[0], p)
    for count, (i, j) in enumerate(_products(a_basis, b_basis)):
        tracker.add((ea[:, i] * eb[:, j]) % p)
        if tracker.dim == target_size:
            break
        if count % 256 == 0:
            budget.check_time("Kempe sampling")
    return tracker.dim


def kempe_check(n: int, w: WeightVector | Sequence[int], k: int,
                field: FieldSpec | None = None, *, seed: int = 0, retries: int = 2,
                margin: int = SAMPLE_MARGIN, sampling_prime: int = WORD_PRIME,
                budget: ResourceBudget | None = None) -> KempeVerdict:
    """Does R_{(k-1)w} · R_w span R_{k·w}?

    Sampled evaluations give a lower bound on the rank of the products; the
    non-crossing count of R_{k·w} is an upper bound on its dimension, so
    equality certifies generation. Otherwise the products are straightened
    and ranked exactly.
    """
    if k < 2:
        raise ValueError("Kempe checks start at k = 2")
    field = field or FieldSpec.rationals()
    budget = budget or UNLIMITED
    weights = _weights(w, n)
    if sum(weights) % 2:
        return KempeVerdict(n, weights, k, True, True, 0, 0, "vacuous")
    target = enumerate_noncrossing(n, tuple(k * x for x in weights))
    if not target:
        return KempeVerdict(n, weights, k, True, True, 0, 0, "vacuous")
    a_basis = enumerate_noncrossing(n, tuple((k - 1) * x for x in weights))
    b_basis = enumerate_noncrossing(n, weights)
    if not a_basis or not b_basis:
        return KempeVerdict(n, weights, k, False, False, 0, len(target), "empty factors")

    if not (field.is_prime and field.modulus <= SMALL_PRIME_LIMIT):
        for attempt in range(retries + 1):
            r = _kempe_sampled(a_basis, b_basis, len(target), n, seed + attempt, margin,
                               sampling_prime, budget)
            if r == len(target):
                return KempeVerdict(n, weights, k, True, False, r, len(target), "sampled")
            log.debug("sampled Kempe rank %d < %d (attempt %d)", r, len(target), attempt + 1)
    r = _kempe_exact(n, a_basis, b_basis, target, field, budget)
    dim = rank(MultidegreeSpace.build(n, tuple(k * x for x in weights), field).coordinate_matrix(
        target)) if r < len(target) else len(target)
    return KempeVerdict(n, weights, k, r == dim, False, r, dim, "exact")


# --- linear relations -----------------------------------------------------------

def linear_relation_space(n: int, v: Sequence[int], field: FieldSpec | None = None,
                          cap: int = SPANNING_CAP,
                          budget: ResourceBudget | None = None) -> list[GraphPolynomial]:
    """Kernel of the map from the canonical spanning set of valence v onto R_v.

    Raises:
        SpanningTruncatedError: If the spanning set exceeds ``cap``
        VerificationFailure: If a relation fails to straighten to zero
    """
    field = field or FieldSpec.rationals()
    budget = budget or UNLIMITED
    v = tuple(int(x) for x in v)
    spanning = enumerate_spanning(n, v, cap)
    if spanning.truncated:
        raise SpanningTruncatedError(f"more than {cap} spanning graphs for n={n}, v={v}")
    if not spanning.graphs:
        return []
    space = MultidegreeSpace.build(n, v, field, CoordinateMode.FULL)
    budget.check_matrix(space.coordinate_dimension, len(spanning.graphs), "linear relations")
    vectors = kernel_basis(space.coordinate_matrix(spanning.graphs))
    relations = [GraphPolynomial(n, field, {spanning.graphs[j].edges: c for j, c in vec.items()})
                 for vec in vectors]
    for p, s in zip(relations, straighten_many(relations)):
        if not s.is_zero():
            raise VerificationFailure(f"linear relation {p} does not straighten to zero")
    return relations


# --- text dumps -----------------------------------------------------------------

def format_basis_dump(n: int, v: Sequence[int], graphs: Sequence[GraphMonomial]) -> str:
    lines = [f"# n={n} valence={','.join(map(str, v))} count={len(graphs)}"]
    lines.extend(format_graph(g) for g in graphs)
    return "\n".join(lines) + "\n"


def format_kernel_dump(kernel: RelationKernel) -> str:
    lines = [
        f"# n={kernel.n} weights={','.join(map(str, kernel.weights))} degree={kernel.degree} "
        f"field={kernel.field} dimension={kernel.dimension} sym_dimension={kernel.sym_dimension} "
        f"image_rank={kernel.image_rank} verification={kernel.verification}"
    ]
    lines.extend(rel.format() for rel in kernel.relations)
    return "\n".join(lines) + "\n"
