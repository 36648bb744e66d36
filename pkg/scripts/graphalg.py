"""Graphical algebra of brackets on n ordered points.

A graph monomial is a loop-free directed multigraph on vertices 1..n standing
for the product of brackets [ab] = x_a y_b - x_b y_a over its edges. Edges are
stored upward (tail < head) and sorted; reversing an edge flips the sign.
Inside a GraphPolynomial the sign is folded into the coefficient, so terms
are keyed by the sorted edge tuple alone.

Vertices sit on a circle in label order. Two chords (a, b) and (c, d) cross
iff a < c < b < d (or symmetrically); chords sharing an endpoint never cross.
Straightening rewrites crossing graphs with the Plücker identity

    [ab][cd] = [ac][bd] + [ad][cb]      for a < c < b < d

until only non-crossing graphs remain; those form a basis of each graded
piece.
"""

from __future__ import annotations

import heapq
import logging
import re
from dataclasses import dataclass, field as dc_field
from math import comb
from random import Random
from typing import Any, Iterable, Iterator, NamedTuple, Sequence

from exactfield import FieldSpec, Scalar

log = logging.getLogger("pgl2_invariants.graphalg")

DirectedEdge = tuple[int, int]
Edges = tuple[DirectedEdge, ...]
ValenceVector = tuple[int, ...]

DEFAULT_STEP_CAP = 10**7


class GraphError(ValueError):
    """Malformed graph or mismatched graph operands."""


class GraphLiteralError(GraphError):
    """Unparseable graph literal; ``position`` is the offending character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NotCrossingError(GraphError):
    """A Plücker step was requested on a pair of edges that does not cross."""


class StraighteningError(RuntimeError):
    """Straightening exceeded its step cap or disagreed with the linear-solve oracle."""


@dataclass(frozen=True, order=True)
class GraphMonomial:
    n: int
    edges: Edges
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise GraphError(f"sign must be +1 or -1, got {self.sign}")
        for a, b in self.edges:
            if not 1 <= a < b <= self.n:
                raise GraphError(f"edge ({a},{b}) is not canonical on {self.n} vertices")
        if list(self.edges) != sorted(self.edges):
            raise GraphError("edges must be sorted")

    @property
    def degree(self) -> int:
        """Number of edges."""
        return len(self.edges)

    def __str__(self) -> str:
        return format_graph(self)


def normalize(n: int, raw_edges: Iterable[Sequence[int]]) -> GraphMonomial:
    """Canonical monomial of a list of directed edges.

    Raises:
        GraphError: On a loop or a vertex outside 1..n
    """
    edges = []
    sign = 1
    for edge in raw_edges:
        a, b = int(edge[0]), int(edge[1])
        if a == b:
            raise GraphError(f"loop at vertex {a}")
        if not (1 <= a <= n and 1 <= b <= n):
            raise GraphError(f"edge ({a},{b}) leaves vertex range 1..{n}")
        if a > b:
            a, b = b, a
            sign = -sign
        edges.append((a, b))
    edges.sort()
    return GraphMonomial(n, tuple(edges), sign)


def superpose(g: GraphMonomial, h: GraphMonomial) -> GraphMonomial:
    """Product of two monomials: the union of their edge multisets."""
    if g.n != h.n:
        raise GraphError(f"cannot superpose graphs on {g.n} and {h.n} vertices")
    return GraphMonomial(g.n, tuple(heapq.merge(g.edges, h.edges)), g.sign * h.sign)


def edges_valence(n: int, edges: Edges) -> ValenceVector:
    v = [0] * n
    for a, b in edges:
        v[a - 1] += 1
        v[b - 1] += 1
    return tuple(v)


def valence(g: GraphMonomial) -> ValenceVector:
    return edges_valence(g.n, g.edges)


def is_realizable(v: Sequence[int]) -> bool:
    """True iff some loop-free multigraph has degree sequence v."""
    total = sum(v)
    if any(x < 0 for x in v) or total % 2:
        return False
    return all(2 * x <= total for x in v)


def _cross(e: DirectedEdge, f: DirectedEdge) -> bool:
    a, b = e
    c, d = f
    return a < c < b < d or c < a < d < b


def crossings(g: GraphMonomial) -> list[tuple[int, int]]:
    """Index pairs (i, j), i < j, of crossing edges."""
    es = g.edges
    return [(i, j) for i in range(len(es)) for j in range(i + 1, len(es)) if _cross(es[i], es[j])]


def _largest_crossing(edges: Edges) -> tuple[int, int] | None:
    """Crossing index pair whose edge pair is lexicographically largest."""
    best = None
    best_key = None
    for i in range(len(edges)):
        ei = edges[i]
        for j in range(i + 1, len(edges)):
            ej = edges[j]
            if _cross(ei, ej):
                key = (ei, ej)
                if best_key is None or key > best_key:
                    best, best_key = (i, j), key
    return best


def is_noncrossing(g: GraphMonomial) -> bool:
    return _largest_crossing(g.edges) is None


def _resolve(edges: Edges, i: int, j: int) -> tuple[Edges, Edges]:
    """Disjoint and nested replacements for the crossing pair at indices i, j."""
    (a, b), (c, d) = sorted((edges[i], edges[j]))
    if not a < c < b < d:
        raise NotCrossingError(f"edges ({a},{b}) and ({c},{d}) do not cross")
    rest = [e for k, e in enumerate(edges) if k != i and k != j]
    nested = tuple(sorted(rest + [(a, d), (c, b)]))
    disjoint = tuple(sorted(rest + [(a, c), (b, d)]))
    return disjoint, nested


def _enumerate(n: int, v: Sequence[int], noncrossing: bool, cap: int | None) -> tuple[list[Edges], bool]:
    """Canonical multigraphs of valence v in lexicographic order of edge tuples."""
    if len(v) != n:
        raise GraphError(f"valence vector has {len(v)} entries, expected {n}")
    if not is_realizable(v):
        return [], False
    out: list[Edges] = []
    remaining = list(v)
    edges: list[DirectedEdge] = []
    truncated = False

    def blocked(i: int, j: int) -> bool:
        return any(a < i < b < j for a, b in edges)

    def visit(i: int) -> bool:
        nonlocal truncated
        while i <= n and remaining[i - 1] == 0:
            i += 1
        if i > n:
            if cap is not None and len(out) >= cap:
                truncated = True
                return False
            out.append(tuple(edges))
            return True
        if remaining[i - 1] > sum(remaining[i:]):
            return True
        return distribute(i, i + 1, remaining[i - 1])

    def distribute(i: int, j: int, left: int) -> bool:
        if left == 0:
            return visit(i + 1)
        if j > n:
            return True
        if noncrossing and blocked(i, j):
            # Chords from i to j and beyond all cross the same arc.
            return True
        top = min(left, remaining[j - 1])
        for mult in range(top, -1, -1):
            remaining[j - 1] -= mult
            remaining[i - 1] -= mult
            edges.extend([(i, j)] * mult)
            ok = distribute(i, j + 1, left - mult)
            del edges[len(edges) - mult:]
            remaining[j - 1] += mult
            remaining[i - 1] += mult
            if not ok:
                return False
        return True

    visit(1)
    return out, truncated


class Enumeration(NamedTuple):
    graphs: list[GraphMonomial]
    truncated: bool


def enumerate_noncrossing(n: int, v: Sequence[int]) -> list[GraphMonomial]:
    """Non-crossing canonical multigraphs of valence v, lexicographically ordered."""
    found, _ = _enumerate(n, tuple(v), noncrossing=True, cap=None)
    return [GraphMonomial(n, e) for e in found]


def enumerate_spanning(n: int, v: Sequence[int], cap: int | None = None) -> Enumeration:
    """All canonical multigraphs of valence v, up to ``cap`` of them."""
    found, truncated = _enumerate(n, tuple(v), noncrossing=False, cap=cap)
    if truncated:
        log.warning("spanning enumeration for n=%d v=%s truncated at %d graphs", n, tuple(v), cap)
    return Enumeration([GraphMonomial(n, e) for e in found], truncated)


def perfect_matchings(n: int) -> list[GraphMonomial]:
    return enumerate_spanning(n, (1,) * n).graphs


def catalan(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


def check_permutation(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    """Validate a permutation of 1..n in one-line notation (sigma[i-1] is the image of i)."""
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise GraphError(f"{sigma} is not a permutation of 1..{n}")
    return sigma


def apply_permutation(sigma: Sequence[int], g: GraphMonomial) -> GraphMonomial:
    """Relabel vertex i as sigma(i) and renormalize."""
    sigma = check_permutation(sigma, g.n)
    moved = normalize(g.n, [(sigma[a - 1], sigma[b - 1]) for a, b in g.edges])
    return GraphMonomial(g.n, moved.edges, moved.sign * g.sign)


# --- polynomials --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GraphPolynomial:
    """Homogeneous linear combination of canonical graph monomials.

    ``terms`` maps a sorted upward edge tuple to a nonzero scalar of ``field``.
    """

    n: int
    field: FieldSpec
    terms: dict[Edges, Scalar] = dc_field(default_factory=dict)

    def __post_init__(self):
        shape = None
        for edges, c in self.terms.items():
            if not c:
                raise GraphError("stored zero coefficient")
            val = edges_valence(self.n, edges)
            if shape is None:
                shape = val
            elif val != shape:
                raise GraphError(f"inhomogeneous polynomial: valences {shape} and {val}")

    @classmethod
    def zero(cls, n: int, field: FieldSpec) -> "GraphPolynomial":
        return cls(n, field, {})

    @classmethod
    def from_monomials(cls, items: Iterable[tuple[Any, GraphMonomial] | GraphMonomial],
                       field: FieldSpec, n: int | None = None) -> "GraphPolynomial":
        """Sum of (coefficient, monomial) pairs (a bare monomial has coefficient 1)."""
        acc: dict[Edges, Scalar] = {}
        zero = field.zero
        for item in items:
            coeff, g = (1, item) if isinstance(item, GraphMonomial) else item
            if n is None:
                n = g.n
            elif g.n != n:
                raise GraphError(f"mixed vertex counts {n} and {g.n}")
            c = field.convert(coeff)
            if g.sign == -1:
                c = -c
            new = acc.get(g.edges, zero) + c
            if new:
                acc[g.edges] = new
            else:
                acc.pop(g.edges, None)
        if n is None:
            raise GraphError("vertex count needed for an empty polynomial")
        return cls(n, field, acc)

    @property
    def valence(self) -> ValenceVector | None:
        for edges in self.terms:
            return edges_valence(self.n, edges)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def monomials(self) -> Iterator[tuple[Scalar, GraphMonomial]]:
        for edges in sorted(self.terms):
            yield self.terms[edges], GraphMonomial(self.n, edges)

    def coefficient(self, g: GraphMonomial) -> Scalar:
        c = self.terms.get(g.edges, self.field.zero)
        return c if g.sign == 1 else -c

    def _combine(self, other: "GraphPolynomial", factor: Scalar) -> "GraphPolynomial":
        if other.n != self.n or other.field != self.field:
            raise GraphError("polynomials live in different spaces")
        acc = dict(self.terms)
        zero = self.field.zero
        for edges, c in other.terms.items():
            new = acc.get(edges, zero) + factor * c
            if new:
                acc[edges] = new
            else:
                acc.pop(edges, None)
        return GraphPolynomial(self.n, self.field, acc)

    def __add__(self, other: "GraphPolynomial") -> "GraphPolynomial":
        return self._combine(other, self.field.one)

    def __sub__(self, other: "GraphPolynomial") -> "GraphPolynomial":
        return self._combine(other, -self.field.one)

    def scale(self, factor: Any) -> "GraphPolynomial":
        f = self.field.convert(factor)
        if not f:
            return GraphPolynomial.zero(self.n, self.field)
        return GraphPolynomial(self.n, self.field, {e: c * f for e, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphPolynomial):
            return NotImplemented
        return self.n == other.n and self.field == other.field and self.terms == other.terms

    def __str__(self) -> str:
        return format_polynomial(self)


def superpose_polynomials(p: GraphPolynomial, q: GraphPolynomial) -> GraphPolynomial:
    """Product of two graph polynomials."""
    if p.n != q.n or p.field != q.field:
        raise GraphError("polynomials live in different spaces")
    acc: dict[Edges, Scalar] = {}
    zero = p.field.zero
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            edges = tuple(heapq.merge(e1, e2))
            new = acc.get(edges, zero) + c1 * c2
            if new:
                acc[edges] = new
            else:
                acc.pop(edges, None)
    return GraphPolynomial(p.n, p.field, acc)


def plucker_step(g: GraphMonomial, pair: tuple[int, int],
                 field: FieldSpec | None = None) -> GraphPolynomial:
    """Replace one crossing pair of edges using the Plücker identity.

    Raises:
        NotCrossingError: If the edges at ``pair`` do not cross
    """
    i, j = pair
    if not (0 <= i < len(g.edges) and 0 <= j < len(g.edges)) or i == j:
        raise GraphError(f"invalid edge index pair {pair}")
    disjoint, nested = _resolve(g.edges, i, j)
    field = field or FieldSpec.rationals()
    return GraphPolynomial.from_monomials(
        [(g.sign, GraphMonomial(g.n, disjoint)), (g.sign, GraphMonomial(g.n, nested))],
        field, g.n)


def _potential(edges: Edges) -> tuple[int, int]:
    length = 0
    squares = 0
    for a, b in edges:
        length += b - a
        squares += (b - a) ** 2
    return length, squares


def straighten_many(polys: Sequence[GraphPolynomial],
                    step_cap: int = DEFAULT_STEP_CAP,
                    deadline_check=None) -> list[GraphPolynomial]:
    """Straighten several polynomials together.

    Intermediate crossing graphs are shared: each is rewritten once, carrying
    one coefficient per input. Graphs are processed in decreasing total chord
    length, then increasing sum of squared chord lengths. A Plücker step sends
    a graph to a disjoint resolution of strictly smaller length and a nested
    one of equal length and larger squared length, so every graph leaves the
    queue once and the loop terminates.

    Args:
        polys: Homogeneous polynomials over one field (they may differ in valence)
        step_cap: Maximum number of Plücker steps
        deadline_check: Optional callable invoked every 10^4 steps (may raise)

    Raises:
        StraighteningError: If the step cap is exceeded
    """
    if not polys:
        return []
    field = polys[0].field
    zero = field.zero
    results: list[dict[Edges, Scalar]] = [{} for _ in polys]
    pending: dict[Edges, tuple[tuple[int, int], dict[int, Scalar]]] = {}
    heap: list[tuple[int, int, Edges]] = []
    crossing_cache: dict[Edges, tuple[int, int] | None] = {}

    def deposit(edges: Edges, col: int, coeff: Scalar) -> None:
        if edges in pending:
            bucket = pending[edges][1]
            new = bucket.get(col, zero) + coeff
            if new:
                bucket[col] = new
            else:
                bucket.pop(col, None)
            return
        if edges in crossing_cache:
            pair = crossing_cache[edges]
        else:
            pair = _largest_crossing(edges)
            if pair is None:
                crossing_cache[edges] = None
        if pair is None:
            target = results[col]
            new = target.get(edges, zero) + coeff
            if new:
                target[edges] = new
            else:
                target.pop(edges, None)
            return
        pending[edges] = (pair, {col: coeff})
        length, squares = _potential(edges)
        heapq.heappush(heap, (-length, squares, edges))

    for col, p in enumerate(polys):
        if p.field != field:
            raise GraphError("straighten_many needs polynomials over one field")
        for edges, c in p.terms.items():
            deposit(edges, col, c)

    steps = 0
    while heap:
        _, _, edges = heapq.heappop(heap)
        pair, bucket = pending.pop(edges)
        if not bucket:
            continue
        steps += 1
        if steps > step_cap:
            raise StraighteningError(f"straightening exceeded {step_cap} Plücker steps")
        if deadline_check is not None and steps % 10_000 == 0:
            deadline_check()
        disjoint, nested = _resolve(edges, *pair)
        for col, c in bucket.items():
            deposit(disjoint, col, c)
            deposit(nested, col, c)
    log.debug("straightened %d polynomial(s) in %d Plücker steps", len(polys), steps)
    return [GraphPolynomial(p.n, field, r) for p, r in zip(polys, results)]


def straighten(p: GraphPolynomial, step_cap: int = DEFAULT_STEP_CAP) -> GraphPolynomial:
    """Rewrite p in the non-crossing basis of its graded piece."""
    return straighten_many([p], step_cap=step_cap)[0]


def straighten_by_solve(p: GraphPolynomial) -> GraphPolynomial:
    """Oracle: coordinates of p in the non-crossing basis by an exact linear solve.

    Raises:
        StraighteningError: If the system is inconsistent (non-crossing graphs failed to span)
    """
    # Imported here: invring builds on this module.
    from exactfield import InconsistentSystemError, SparseMatrix, solve
    from invring import bracket_expand

    v = p.valence
    if v is None:
        return GraphPolynomial.zero(p.n, p.field)
    basis = enumerate_noncrossing(p.n, v)
    index: dict[tuple[int, ...], int] = {}
    columns = []
    for g in basis:
        col = {}
        for mono, c in bracket_expand(g, p.field).items():
            col[index.setdefault(mono, len(index))] = c
        columns.append(col)
    target: dict[tuple[int, ...], Scalar] = {}
    zero = p.field.zero
    for c, g in p.monomials():
        for mono, a in bracket_expand(g, p.field).items():
            target[mono] = target.get(mono, zero) + c * a
    rhs = {}
    for mono, a in target.items():
        if a:
            if mono not in index:
                raise StraighteningError(f"monomial {mono} outside the span of non-crossing graphs")
            rhs[index[mono]] = a
    matrix = SparseMatrix.from_columns(columns, len(index), p.field)
    try:
        x = solve(matrix, rhs)
    except InconsistentSystemError as e:
        raise StraighteningError("non-crossing graphs do not span the expansion") from e
    return GraphPolynomial(p.n, p.field, {basis[k].edges: c for k, c in x.items() if c})


def random_graph_polynomial(rng: Random, n: int, degree: int, terms: int,
                            field: FieldSpec) -> GraphPolynomial:
    """Random combination of superposed random perfect matchings (n even)."""
    if n % 2:
        raise GraphError("random instances use perfect matchings and need even n")
    items = []
    for _ in range(terms):
        raw = []
        for _ in range(degree):
            order = list(range(1, n + 1))
            rng.shuffle(order)
            raw.extend((order[k], order[k + 1]) for k in range(0, n, 2))
        items.append((rng.randint(-3, 3), normalize(n, raw)))
    return GraphPolynomial.from_monomials(items, field, n)


# --- text formats -------------------------------------------------------------

_LITERAL = re.compile(r"\s*n\s*=\s*(\d+)\s*;")
_EDGE = re.compile(r"(\d+)-(\d+)")


def parse_graph(text: str) -> GraphMonomial:
    """Parse ``n=<int>; a-b c-d ...``; ``b-a`` is the reversed edge.

    Raises:
        GraphLiteralError: With the position of the first bad character
    """
    head = _LITERAL.match(text)
    if not head:
        raise GraphLiteralError("expected 'n=<int>;'", 0)
    n = int(head.group(1))
    raw = []
    pos = head.end()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _EDGE.match(text, pos)
        if not m:
            raise GraphLiteralError("expected an edge 'a-b'", pos)
        end = m.end()
        if end < len(text) and not text[end].isspace():
            raise GraphLiteralError("edges must be separated by whitespace", end)
        a, b = int(m.group(1)), int(m.group(2))
        if a == b or not (1 <= a <= n and 1 <= b <= n):
            raise GraphLiteralError(f"invalid edge {a}-{b} on {n} vertices", pos)
        raw.append((a, b))
        pos = end
    return normalize(n, raw)


def _edge_text(edges: Edges, reverse_first: bool = False) -> str:
    parts = [f"{a}-{b}" for a, b in edges]
    if reverse_first and edges:
        a, b = edges[0]
        parts[0] = f"{b}-{a}"
    return " ".join(parts)


def format_graph(g: GraphMonomial) -> str:
    """Graph literal of g; a negative sign is written by reversing the first edge."""
    if g.sign == -1 and not g.edges:
        raise GraphError("the empty graph has no negative literal")
    body = _edge_text(g.edges, reverse_first=g.sign == -1)
    return f"n={g.n}; {body}" if body else f"n={g.n};"


def format_coefficient(c: Scalar, field: FieldSpec) -> str:
    text = field.format_scalar(c)
    return text if text.startswith("-") else f"+{text}"


def format_term(c: Scalar, factors: Sequence[Edges], field: FieldSpec) -> str:
    body = "*".join(f"[{_edge_text(e)}]" for e in factors)
    return f"{format_coefficient(c, field)}·{body}"


def format_polynomial(p: GraphPolynomial) -> str:
    """``+1·[1-2 3-4] +1·[1-4 2-3]``; the zero polynomial prints as ``0``."""
    if p.is_zero():
        return "0"
    return " ".join(format_term(p.terms[e], [e], p.field) for e in sorted(p.terms))
