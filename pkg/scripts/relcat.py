"""Named relations among degree-one invariants, and ideal-level verdicts.

Every constructor here returns a SymbolicRelation whose image has been
checked to vanish exactly. Relations are compared as vectors in Sym^d
coordinates (see invring.SymCoordinates), never by their printed form.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, combinations_with_replacement
from math import gcd, lcm
from typing import Sequence

from sympy.polys.matrices import DomainMatrix
from sympy.utilities.iterables import generate_bell

from exactfield import (
    FieldSpec,
    ModularSpanTracker,
    SparseMatrix,
    Subspace,
    Vector,
    WORD_PRIME,
    subspace_equal,
)
from graphalg import (
    Edges,
    GraphMonomial,
    apply_permutation,
    edges_valence,
    enumerate_spanning,
    normalize,
    perfect_matchings,
)
from invring import (
    EXPAND_VERIFY_LIMIT,
    RelationKernel,
    ResourceBudget,
    SymbolicRelation,
    SymCoordinates,
    UNLIMITED,
    VerificationFailure,
    image_is_zero,
    relation_kernel,
    verification_method,
)
from symrep import graded_piece_character, sign_multiplicity, sym_power_character

log = logging.getLogger("pgl2_invariants.relcat")

ROTATION_5 = (2, 3, 4, 5, 1)


class RelationError(ValueError):
    """A relation constructor was given arguments outside its domain."""


class CatalogName(str, Enum):
    SIGN_RELATION = "SignRelation"
    PLUCKER = "Plucker"
    EXTENDED_PLUCKER = "ExtendedPlucker"
    SIMPLE_QUADRIC = "SimpleQuadric"
    EXTENDED_SIMPLE_QUADRIC = "ExtendedSimpleQuadric"
    DEL_PEZZO_QUADRIC = "DelPezzoQuadric"
    SEGRE_BINOMIAL_CUBIC = "SegreBinomialCubic"
    SKEW_CUBIC = "SkewCubic"
    SKEW_CUBIC_PARTIAL = "SkewCubicPartial"


@dataclass(frozen=True)
class CatalogEntry:
    name: CatalogName
    relation: SymbolicRelation
    provenance: str


def _field(field: FieldSpec | None) -> FieldSpec:
    return field or FieldSpec.rationals()


def _graph(n: int, pairs: Sequence[tuple[int, int]]) -> GraphMonomial:
    return normalize(n, pairs)


def _verified(rel: SymbolicRelation, expand_limit: int = EXPAND_VERIFY_LIMIT) -> SymbolicRelation:
    weights = rel.weights
    if weights is None:
        return rel
    method = verification_method(weights, rel.degree, expand_limit)
    if not image_is_zero(rel, method):
        raise VerificationFailure(f"relation on {rel.n} points does not map to zero")
    return rel


def standard_matching(n: int) -> GraphMonomial:
    """The matching 1-2 3-4 ... (n-1)-n."""
    if n % 2:
        raise RelationError(f"no perfect matching on {n} points")
    return _graph(n, [(k, k + 1) for k in range(1, n, 2)])


# --- small named relations ---------------------------------------------------

def sign_relation(field: FieldSpec | None = None) -> SymbolicRelation:
    """[12] + [21] on two points; it cancels identically in canonical form."""
    field = _field(field)
    return SymbolicRelation.from_products(
        2, [(1, [_graph(2, [(1, 2)])]), (1, [_graph(2, [(2, 1)])])], field, degree=1)


def plucker_relation(field: FieldSpec | None = None) -> SymbolicRelation:
    """[12][34] - [13][24] + [14][23] = 0 as a linear relation among matchings of 4 points."""
    field = _field(field)
    return _verified(SymbolicRelation.from_products(4, [
        (1, [_graph(4, [(1, 2), (3, 4)])]),
        (-1, [_graph(4, [(1, 3), (2, 4)])]),
        (1, [_graph(4, [(1, 4), (2, 3)])]),
    ], field, degree=1))


def extend_relation(rel: SymbolicRelation, extra: Sequence[tuple[int, int]]) -> SymbolicRelation:
    """Add the same edges on new vertices n+1..n' to every factor of every term.

    Raises:
        RelationError: If ``extra`` is not a perfect matching of the new vertices
    """
    touched = [v for edge in extra for v in edge]
    if not touched:
        return rel
    top = max(touched)
    if top <= rel.n or sorted(touched) != list(range(rel.n + 1, top + 1)):
        raise RelationError(f"extra edges {list(extra)} must match the vertices "
                            f"{rel.n + 1}..{top} exactly once each")
    added = normalize(top, extra).edges
    items = [(c, [GraphMonomial(top, tuple(sorted(f + added))) for f in key])
             for key, c in rel.terms.items()]
    return _verified(SymbolicRelation.from_products(top, items, rel.field, rel.degree))


def extended_plucker(field: FieldSpec | None = None) -> SymbolicRelation:
    """The four-point Plücker relation with the edge 5-6 added to each factor."""
    return extend_relation(plucker_relation(field), [(5, 6)])


SIMPLE_QUADRIC_FACTORS = (
    ((1, 2), (3, 4), (5, 6), (7, 8)),
    ((1, 4), (2, 3), (5, 8), (6, 7)),
    ((1, 2), (3, 4), (5, 8), (6, 7)),
    ((1, 4), (2, 3), (5, 6), (7, 8)),
)


def simple_quadric(n: int = 8, field: FieldSpec | None = None) -> SymbolicRelation:
    """Binomial G1·G2 - G3·G4 of perfect matchings of 8 points with equal superposition."""
    if n != 8:
        raise RelationError("the simple quadric is defined on 8 points; use extended_simple_quadric")
    g1, g2, g3, g4 = (_graph(8, f) for f in SIMPLE_QUADRIC_FACTORS)
    return _verified(SymbolicRelation.from_products(8, [(1, [g1, g2]), (-1, [g3, g4])],
                                                    _field(field), 2))


def extended_simple_quadric(n: int, field: FieldSpec | None = None) -> SymbolicRelation:
    """simple_quadric(8) extended by the edges 9-10, 11-12, ..., (n-1)-n."""
    if n < 8 or n % 2:
        raise RelationError(f"extended simple quadrics need even n >= 8, got {n}")
    return extend_relation(simple_quadric(8, field), [(k, k + 1) for k in range(9, n, 2)])


def is_balanced_binomial(rel: SymbolicRelation) -> bool:
    """Two terms with opposite coefficients whose products superpose to one multigraph."""
    if len(rel.terms) != 2:
        return False
    a, b = rel.terms.values()
    return a == -b and rel.image().is_zero()


# --- binomials found by search ------------------------------------------------

def _k5_cycle_pairs() -> list[tuple[GraphMonomial, GraphMonomial]]:
    """Splittings of the complete graph on 5 vertices into two 5-cycles."""
    k5 = {(a, b) for a in range(1, 6) for b in range(a + 1, 6)}
    pairs = []
    seen = set()
    for g in enumerate_spanning(5, (2,) * 5).graphs:
        if len(set(g.edges)) != len(g.edges) or g.edges in seen:
            continue
        rest = tuple(sorted(k5 - set(g.edges)))
        seen.update([g.edges, rest])
        pairs.append((g, GraphMonomial(5, rest)))
    return pairs


def del_pezzo_quadrics(field: FieldSpec | None = None) -> list[SymbolicRelation]:
    """Five rotations of one binomial quadric among degree-two invariants of 5 points.

    The base relation is P·S - C·C' where both sides split the complete graph
    into two 5-cycles; the first splitting whose rotations are independent in
    Sym^2 wins.

    Raises:
        RelationError: If no candidate has independent rotations
    """
    field = _field(field)
    coords = SymCoordinates(5, (2,) * 5, field)
    splittings = _k5_cycle_pairs()
    base_pair = next(pair for pair in splittings
                     if {pair[0].edges, pair[1].edges} & {((1, 2), (1, 5), (2, 3), (3, 4), (4, 5))})
    for other in splittings:
        if other is base_pair:
            continue
        base = SymbolicRelation.from_products(5, [(1, list(base_pair)), (-1, list(other))], field, 2)
        rotations = [base]
        for _ in range(4):
            rotations.append(rotations[-1].permuted(ROTATION_5))
        span = Subspace(coords.sym_dimension(2), field)
        if all(span.add(coords.relation_vector(r)) for r in rotations):
            log.debug("del Pezzo base: %s", base)
            return [_verified(r) for r in rotations]
    raise RelationError("no binomial quadric on 5 points has five independent rotations")


def segre_binomial_cubic(field: FieldSpec | None = None) -> SymbolicRelation:
    """First binomial G1·G2·G3 - G4·G5·G6 of matchings of 6 points that is nonzero in Sym^3."""
    field = _field(field)
    coords = SymCoordinates(6, (1,) * 6, field)
    groups: dict[Edges, list[tuple[GraphMonomial, ...]]] = {}
    for triple in combinations_with_replacement(perfect_matchings(6), 3):
        key = tuple(sorted(e for g in triple for e in g.edges))
        groups.setdefault(key, []).append(triple)
    for triples in groups.values():
        for left, right in combinations(triples, 2):
            rel = SymbolicRelation.from_products(6, [(1, list(left)), (-1, list(right))], field, 3)
            if coords.relation_vector(rel):
                return _verified(rel)
    raise RelationError("every binomial cubic on 6 points vanishes in Sym^3")


# --- skew cubic and its partials ------------------------------------------------

def primitive_integer_vector(rel: SymbolicRelation) -> dict[tuple[Edges, ...], int]:
    """Coefficients scaled to coprime integers (rational relations only)."""
    if rel.field.is_prime:
        raise RelationError("primitive vectors are defined for rational relations")
    fracs = {k: rel.field.to_fraction(c) for k, c in rel.terms.items()}
    if not fracs:
        return {}
    den = lcm(*(f.denominator for f in fracs.values()))
    ints = {k: int(f * den) for k, f in fracs.items()}
    content = gcd(*ints.values())
    return {k: v // content for k, v in ints.items()}


def reduce_relation(rel: SymbolicRelation, field: FieldSpec) -> SymbolicRelation:
    """Image of the primitive integer form of a rational relation in a prime field."""
    ints = primitive_integer_vector(rel)
    terms = {k: field.convert(v) for k, v in ints.items() if v % field.modulus}
    return SymbolicRelation(rel.n, rel.degree, field, terms)


def skew_cubic(n: int, gamma: GraphMonomial | None = None,
               field: FieldSpec | None = None,
               coords: SymCoordinates | None = None) -> SymbolicRelation:
    """Alternating sum of sgn(sigma)·sigma(gamma)^3 over S_n in Sym^3 of R_1.

    For n <= 8 the sum is formed explicitly; for larger n the sign
    multiplicity of Sym^3 R_1 is computed first and the zero relation
    returned when it vanishes. Over a prime field the rational result is
    made primitive and reduced.

    Raises:
        RelationError: If gamma is not a perfect matching of n points, or if
            the explicit sum would be needed beyond n = 8
    """
    field = _field(field)
    if n % 2 or n < 2:
        raise RelationError(f"skew cubics need an even number of points, got {n}")
    gamma = gamma or standard_matching(n)
    if gamma.n != n or edges_valence(n, gamma.edges) != (1,) * n:
        raise RelationError(f"{gamma} is not a perfect matching of {n} points")
    if n > 8:
        m = sign_multiplicity(sym_power_character(graded_piece_character(n, 1), 3))
        if m == 0:
            log.info("Sym^3 R_1 has no sign summand for n=%d; the skew cubic is zero", n)
            return SymbolicRelation(n, 3, field, {})
        raise RelationError(f"explicit skew symmetrization is limited to n <= 8 (n={n})")
    if field.is_prime:
        return reduce_relation(skew_cubic(n, gamma, FieldSpec.rationals()), field)

    coords = coords or SymCoordinates(n, (1,) * n, field)
    weights: dict[Edges, int] = {}
    for k, perm in enumerate(generate_bell(n)):
        moved = apply_permutation(tuple(x + 1 for x in perm), gamma)
        # generate_bell steps by adjacent transpositions, so signs alternate.
        s = (1 if k % 2 == 0 else -1) * moved.sign
        weights[moved.edges] = weights.get(moved.edges, 0) + s
    poly = coords.ring.zero
    for edges, w in weights.items():
        if w:
            poly += coords.linear_form(edges) ** 3 * field.convert(w)
    rel = coords.relation_from_poly(poly, 3)
    log.info("skew cubic on %d points: %d terms from %d distinct matchings",
             n, len(rel.terms), len(weights))
    return _verified(rel)


def _change_of_basis(coords: SymCoordinates, basis: Sequence[GraphMonomial]) -> tuple[list, list]:
    """Substitutions z -> u and u -> z for a new basis u_i = basis[i] of R_1."""
    m = coords.size
    if len(basis) != m:
        raise RelationError(f"a basis of R_1 here has {m} elements, got {len(basis)}")
    forms = []
    for g in basis:
        form = coords.linear_form(g.edges)
        forms.append(form if g.sign == 1 else -form)
    K = coords.field.domain
    # Row i of B holds the coordinates of basis[i] in z.
    rows = [[form.coeff(coords.ring.gens[j]) for j in range(m)] for form in forms]
    B = DomainMatrix([[K.convert(a) for a in row] for row in rows], (m, m), K)
    if B.rank() != m:
        raise RelationError("the given graphs do not form a basis of R_1")
    inv = B.inv().to_Matrix()
    gens = coords.ring.gens
    to_u = [sum((gens[i] * K.convert(inv[j, i]) for i in range(m)), coords.ring.zero)
            for j in range(m)]
    return to_u, forms


def partials(cubic: SymbolicRelation, basis: Sequence[GraphMonomial] | None = None,
             coords: SymCoordinates | None = None) -> list[SymbolicRelation]:
    """Formal partial derivatives of a cubic with respect to a basis of R_1.

    Without ``basis`` the non-crossing basis is used. With one, the cubic is
    rewritten in the new basis, differentiated there and rewritten back, so
    the list differs but its span does not.

    Raises:
        RelationError: If the relation is not cubic or the basis is invalid
    """
    if cubic.degree != 3:
        raise RelationError(f"partials need a cubic, got degree {cubic.degree}")
    weights = cubic.weights or (1,) * cubic.n
    coords = coords or SymCoordinates(cubic.n, weights, cubic.field)
    poly = coords.relation_poly(cubic)
    gens = coords.ring.gens
    if basis is None:
        derivs = [poly.diff(z) for z in gens]
    else:
        to_u, back = _change_of_basis(coords, basis)
        in_u = coords.act(poly, to_u)
        derivs = [coords.act(in_u.diff(u), back) for u in gens]
    return [_verified(coords.relation_from_poly(p, 2)) for p in derivs]


# --- orbit spans ---------------------------------------------------------------

class _MonomialAction:
    """A permutation acting on Sym^d coordinate vectors, one cached monomial image at a time."""

    def __init__(self, coords: SymCoordinates, sigma: Sequence[int], d: int):
        self.coords = coords
        self.d = d
        self.forms = coords.permutation_forms(sigma)
        self.monomials = coords.monomials(d)
        self._images: dict[int, Vector] = {}

    def image(self, k: int) -> Vector:
        if k not in self._images:
            poly = self.coords.ring.one
            for i in self.monomials[k]:
                poly *= self.forms[i]
            self._images[k] = self.coords.vector_from_poly(poly, self.d)
        return self._images[k]

    def __call__(self, vec: Vector) -> Vector:
        zero = self.coords.field.zero
        out: Vector = {}
        for k, c in vec.items():
            for j, a in self.image(k).items():
                new = out.get(j, zero) + c * a
                if new:
                    out[j] = new
                else:
                    out.pop(j, None)
        return out


@dataclass
class OrbitSpan:
    n: int
    degree: int
    field: FieldSpec
    vectors: list[Vector]
    coords: SymCoordinates
    modulus: int

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def matrix(self) -> SparseMatrix:
        return SparseMatrix.from_columns(self.vectors, self.coords.sym_dimension(self.degree),
                                         self.field)

    def equals(self, kernel: RelationKernel) -> bool:
        """Exact comparison with a relation kernel in the same coordinates."""
        if (kernel.n, kernel.degree, kernel.field) != (self.n, self.degree, self.field):
            raise RelationError("orbit span and kernel live in different spaces")
        if kernel.dimension != self.dimension:
            return False
        return subspace_equal(self.matrix(), kernel.matrix())

    def contains(self, rel: SymbolicRelation) -> bool:
        space = Subspace(self.coords.sym_dimension(self.degree), self.field, self.vectors)
        return space.contains(self.coords.relation_vector(rel))


def orbit_span(rel: SymbolicRelation, coords: SymCoordinates | None = None,
               budget: ResourceBudget | None = None) -> OrbitSpan:
    """Span of the S_n-orbit of a relation inside Sym^d coordinates.

    The orbit is closed under the transposition (1 2) and the cycle
    (1 2 ... n), which generate S_n. Independence is decided modulo a word
    prime (exactly over prime fields below 2^31); the kept vectors are exact.
    The search stops once every kept vector's generator images lie in the span.
    """
    budget = budget or UNLIMITED
    n, d, field = rel.n, rel.degree, rel.field
    weights = rel.weights or (1,) * n
    if len(set(weights)) > 1:
        raise RelationError("orbit spans need a permutation-stable weight vector")
    coords = coords or SymCoordinates(n, weights, field)
    modulus = field.modulus if field.is_prime else WORD_PRIME
    if modulus > WORD_PRIME:
        raise RelationError("orbit spans over prime fields need p < 2^31")
    generators = [(2, 1) + tuple(range(3, n + 1)), tuple(range(2, n + 1)) + (1,)]
    actions = [_MonomialAction(coords, sigma, d) for sigma in generators]
    tracker = ModularSpanTracker(coords.sym_dimension(d), modulus)
    kept: list[Vector] = []
    queue: deque[Vector] = deque()
    start = coords.relation_vector(rel)
    if start and tracker.add(start):
        kept.append(start)
        queue.append(start)
    while queue:
        vec = queue.popleft()
        for act in actions:
            image = act(vec)
            if image and tracker.add(image):
                kept.append(image)
                queue.append(image)
        budget.check_time("orbit span")
    log.info("orbit span on %d points, degree %d, over %s: dimension %d",
             n, d, field.label, len(kept))
    return OrbitSpan(n, d, field, kept, coords, modulus)


# --- generation by quadrics ----------------------------------------------------

@dataclass(frozen=True)
class GenerationVerdict:
    n: int
    degree: int
    field: str
    kernel_dimension: int
    multiples_rank: int
    verdict: str
    defect: int
    skew_fills: bool | None = None

    @property
    def equal(self) -> bool:
        return self.verdict == "equal"


def generation_check(n: int, d: int, field: FieldSpec | None = None, *,
                     budget: ResourceBudget | None = None,
                     kernel_2: RelationKernel | None = None,
                     kernel_d: RelationKernel | None = None) -> GenerationVerdict:
    """Compare the degree-d relations with the multiples of the quadratic ones.

    The multiples are every kernel_2 basis relation times every degree-(d-2)
    monomial in the basis of R_1. When they fall short in degree 3 and a
    skew cubic exists, the verdict records whether adding it fills the gap.

    Raises:
        ResourceCapExceeded: From the kernel computations
        VerificationFailure: If a multiple is not a degree-d relation
    """
    if d < 3:
        raise RelationError("generation checks start in degree 3")
    field = _field(field)
    budget = budget or UNLIMITED
    kernel_2 = kernel_2 or relation_kernel(n, (1,) * n, 2, field, budget=budget)
    kernel_d = kernel_d or relation_kernel(n, (1,) * n, d, field, budget=budget,
                                           coords=kernel_2.coords)
    coords = kernel_d.coords
    target = Subspace(coords.sym_dimension(d), field, kernel_d.vectors)
    multiples = Subspace(coords.sym_dimension(d), field)
    gens = coords.ring.gens
    for v in kernel_2.vectors:
        q = coords.poly_from_vector(v, 2)
        for t in coords.monomials(d - 2):
            p = q
            for i in t:
                p = p * gens[i]
            vec = coords.vector_from_poly(p, d)
            if not target.contains(vec):
                raise VerificationFailure("a multiple of a quadratic relation left the kernel")
            multiples.add(vec)
        budget.check_time("generation check")
    defect = target.dim - multiples.dim
    skew_fills = None
    if defect and d == 3 and n in (6, 8):
        skew = skew_cubic(n, field=field, coords=coords)
        skew_fills = multiples.add(coords.relation_vector(skew)) and multiples.dim == target.dim
    verdict = GenerationVerdict(n, d, field.label, target.dim, multiples.dim,
                                "equal" if defect == 0 else "strictly-contained", defect, skew_fills)
    log.info("generation check n=%d d=%d over %s: %s (defect %d)", n, d, field.label,
             verdict.verdict, defect)
    return verdict


# --- catalog -------------------------------------------------------------------

def catalog(field: FieldSpec | None = None, include_skew: bool = True) -> list[CatalogEntry]:
    """Every named relation, each re-checked by exact bracket expansion."""
    field = _field(field)
    entries = [
        CatalogEntry(CatalogName.SIGN_RELATION, sign_relation(field),
                     "reversing an edge negates a bracket"),
        CatalogEntry(CatalogName.PLUCKER, plucker_relation(field),
                     "three-term identity among brackets of four points"),
        CatalogEntry(CatalogName.EXTENDED_PLUCKER, extended_plucker(field),
                     "Plücker identity with the edge 5-6 added to each factor"),
        CatalogEntry(CatalogName.SIMPLE_QUADRIC, simple_quadric(8, field),
                     "two matching-pair factorizations of one 2-regular graph on 8 points"),
        CatalogEntry(CatalogName.EXTENDED_SIMPLE_QUADRIC, extended_simple_quadric(12, field),
                     "simple quadric with the edges 9-10 and 11-12 added"),
    ]
    entries += [CatalogEntry(CatalogName.DEL_PEZZO_QUADRIC, rel, f"rotation {k} of the base quadric")
                for k, rel in enumerate(del_pezzo_quadrics(field))]
    entries.append(CatalogEntry(CatalogName.SEGRE_BINOMIAL_CUBIC, segre_binomial_cubic(field),
                                "equal superposition of two matching triples on 6 points"))
    if include_skew:
        coords = SymCoordinates(8, (1,) * 8, field)
        cubic = skew_cubic(8, field=field, coords=coords)
        entries.append(CatalogEntry(CatalogName.SKEW_CUBIC, cubic,
                                    "alternating symmetrization of the cube of 1-2 3-4 5-6 7-8"))
        entries += [CatalogEntry(CatalogName.SKEW_CUBIC_PARTIAL, rel, f"derivative along z{k}")
                    for k, rel in enumerate(partials(cubic, coords=coords))]
    for entry in entries:
        if not image_is_zero(entry.relation, "expansion"):
            raise VerificationFailure(f"{entry.name.value} does not expand to zero")
    return entries


def format_catalog(entries: Sequence[CatalogEntry]) -> str:
    """One ``name | n | degree | terms`` line per entry."""
    lines = [f"{e.name.value} | {e.relation.n} | {e.relation.degree} | {e.relation.format()}"
             for e in entries]
    return "\n".join(lines) + "\n"
