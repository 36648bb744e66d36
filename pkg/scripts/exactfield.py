"""Exact scalar fields and exact linear algebra.

Scalars are elements of a sympy domain: ``QQ`` for the rationals (reduced
fractions of arbitrary-precision integers) or ``GF(p)`` with residues kept in
``[0, p)``. Matrices are stored row-major as dict-of-dicts holding only
nonzero entries.

Reduced row-echelon forms are unique, so every elimination strategy below
returns the same matrix; the strategy only decides how fast we get there:

- sparse Gauss-Jordan for small or sparse matrices,
- dense elimination modulo p with numpy for word-size primes,
- dense sympy ``DomainMatrix`` elimination for other fields,
- multi-modular elimination for large rational matrices, certified exactly
  before it is trusted.
"""

from __future__ import annotations

import logging
from bisect import insort
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm
from typing import Any, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np
from sympy import isprime, prevprime
from sympy.ntheory.modular import crt1, crt2
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

log = logging.getLogger("pgl2_invariants.exactfield")

Scalar = Any
Vector = dict[int, Scalar]

MAX_MODULUS = 2**63
NUMPY_MODULUS_LIMIT = 2**31
DENSE_THRESHOLD = 1 / 3
MULTIMODULAR_MIN_ENTRIES = 20_000
DENSE_ENTRY_LIMIT = 4_000_000
MULTIMODULAR_MAX_PRIMES = 16
WORD_PRIME = 2_147_483_647


class FieldError(ValueError):
    """Invalid field description or a scalar that does not live in the field."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class InconsistentSystemError(ArithmeticError):
    """A linear system has no solution."""


class FieldKind(str, Enum):
    RATIONALS = "rationals"
    PRIME = "prime"


@lru_cache(maxsize=None)
def _domain_for(kind: FieldKind, modulus: int | None):
    if kind is FieldKind.RATIONALS:
        return QQ
    return GF(modulus, symmetric=False)


@dataclass(frozen=True)
class FieldSpec:
    """The field all scalars of a computation live in."""

    kind: FieldKind = FieldKind.RATIONALS
    modulus: int | None = None

    def __post_init__(self):
        if self.kind is FieldKind.RATIONALS:
            if self.modulus is not None:
                raise FieldError("the rationals take no modulus")
            return
        if self.modulus is None or self.modulus >= MAX_MODULUS or not isprime(self.modulus):
            raise FieldError(
                f"prime field modulus must be a prime below 2^63, got {self.modulus!r}"
            )

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls()

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(FieldKind.PRIME, int(p))

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``q``/``rationals`` or ``fp:<p>``/``gf<p>``.

        Raises:
            FieldError: If the text names no field or the modulus is not prime
        """
        if isinstance(text, FieldSpec):
            return text
        t = str(text).strip().lower()
        if t in ("q", "qq", "rationals", "rational"):
            return cls.rationals()
        for prefix in ("fp:", "gf:", "gf", "f_", "fp"):
            if t.startswith(prefix):
                digits = t[len(prefix):]
                if digits.isdigit():
                    return cls.prime(int(digits))
        raise FieldError(f"unknown field '{text}' (expected 'q' or 'fp:<prime>')")

    @property
    def is_prime(self) -> bool:
        return self.kind is FieldKind.PRIME

    @property
    def characteristic(self) -> int:
        return self.modulus if self.is_prime else 0

    @property
    def domain(self):
        return _domain_for(self.kind, self.modulus)

    @property
    def zero(self) -> Scalar:
        return self.domain.zero

    @property
    def one(self) -> Scalar:
        return self.domain.one

    @property
    def label(self) -> str:
        return f"F_{self.modulus}" if self.is_prime else "Q"

    def __str__(self) -> str:
        return f"fp:{self.modulus}" if self.is_prime else "q"

    def convert(self, value: Any) -> Scalar:
        """Convert ints, Fractions, ``p/q`` strings and domain elements."""
        K = self.domain
        if K.of_type(value):
            return value
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, int):
            return K(value)
        if hasattr(value, "numerator") and hasattr(value, "denominator"):
            num, den = int(value.numerator), int(value.denominator)
        else:
            num, den = int(value), 1
        if not self.is_prime:
            return K(num, den)
        if den % self.modulus == 0:
            raise FieldError(f"{num}/{den} has no image in {self.label}")
        return K(num) / K(den)

    def to_fraction(self, a: Scalar) -> Fraction:
        if self.is_prime:
            return Fraction(int(a))
        return Fraction(int(a.numerator), int(a.denominator))

    def format_scalar(self, a: Scalar) -> str:
        if self.is_prime:
            return str(int(a))
        num, den = int(a.numerator), int(a.denominator)
        return str(num) if den == 1 else f"{num}/{den}"


def _pivot_cost(a: Scalar, is_prime: bool) -> int:
    if is_prime:
        return 0
    return int(a.numerator).bit_length() + int(a.denominator).bit_length()


def coerce_vector(v: Mapping[int, Any] | Sequence[Any], length: int, field: FieldSpec) -> Vector:
    """Sparse copy of a vector given as a mapping or a dense sequence.

    Raises:
        DimensionMismatchError: If the vector does not fit the given length
    """
    if isinstance(v, Mapping):
        items = v.items()
    else:
        if len(v) != length:
            raise DimensionMismatchError(f"vector of length {len(v)}, expected {length}")
        items = enumerate(v)
    out: Vector = {}
    for i, a in items:
        if not 0 <= i < length:
            raise DimensionMismatchError(f"index {i} out of range for length {length}")
        a = field.convert(a)
        if a:
            out[int(i)] = a
    return out


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Row-major sparse matrix over an exact field.

    ``rows`` maps a row index to ``{column: nonzero scalar}``; empty rows are
    not stored.
    """

    nrows: int
    ncols: int
    field: FieldSpec
    rows: dict[int, dict[int, Scalar]]

    def __post_init__(self):
        if self.nrows < 0 or self.ncols < 0:
            raise DimensionMismatchError("negative matrix dimensions")
        for i, row in self.rows.items():
            if not 0 <= i < self.nrows:
                raise DimensionMismatchError(f"row {i} out of range")
            for j, a in row.items():
                if not 0 <= j < self.ncols:
                    raise DimensionMismatchError(f"column {j} out of range")
                if not a:
                    raise ValueError(f"stored zero at ({i}, {j})")

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Mapping[tuple[int, int], Any],
                     field: FieldSpec) -> "SparseMatrix":
        rows: dict[int, dict[int, Scalar]] = {}
        for (i, j), a in entries.items():
            a = field.convert(a)
            if a:
                rows.setdefault(i, {})[j] = a
        return cls(nrows, ncols, field, rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], field: FieldSpec,
                  ncols: int | None = None) -> "SparseMatrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        stored = {}
        for i, row in enumerate(rows):
            r = coerce_vector(row, ncols, field)
            if r:
                stored[i] = r
        return cls(len(rows), ncols, field, stored)

    @classmethod
    def from_columns(cls, columns: Sequence[Mapping[int, Any] | Sequence[Any]], nrows: int,
                     field: FieldSpec) -> "SparseMatrix":
        stored: dict[int, dict[int, Scalar]] = {}
        for j, col in enumerate(columns):
            for i, a in coerce_vector(col, nrows, field).items():
                stored.setdefault(i, {})[j] = a
        return cls(nrows, len(columns), field, stored)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: FieldSpec) -> "SparseMatrix":
        return cls(nrows, ncols, field, {})

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    @property
    def density(self) -> float:
        size = self.nrows * self.ncols
        return self.nnz / size if size else 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.field == other.field
                and self.rows == other.rows)

    def entries(self) -> dict[tuple[int, int], Scalar]:
        return {(i, j): a for i, row in self.rows.items() for j, a in row.items()}

    def row(self, i: int) -> Vector:
        return dict(self.rows.get(i, {}))

    def column(self, j: int) -> Vector:
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def to_dense(self) -> list[list[Scalar]]:
        zero = self.field.zero
        dense = [[zero] * self.ncols for _ in range(self.nrows)]
        for i, row in self.rows.items():
            for j, a in row.items():
                dense[i][j] = a
        return dense

    def transpose(self) -> "SparseMatrix":
        t: dict[int, dict[int, Scalar]] = {}
        for i, row in self.rows.items():
            for j, a in row.items():
                t.setdefault(j, {})[i] = a
        return SparseMatrix(self.ncols, self.nrows, self.field, t)

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if other.nrows != self.nrows:
            raise DimensionMismatchError(f"cannot stack {self.shape} with {other.shape}")
        if other.field != self.field:
            raise DimensionMismatchError("cannot stack matrices over different fields")
        rows = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            target = rows.setdefault(i, {})
            for j, a in r.items():
                target[self.ncols + j] = a
        return SparseMatrix(self.nrows, self.ncols + other.ncols, self.field, rows)

    def matvec(self, v: Mapping[int, Any] | Sequence[Any]) -> Vector:
        x = coerce_vector(v, self.ncols, self.field)
        out: Vector = {}
        for i, row in self.rows.items():
            acc = self.field.zero
            for j, a in row.items():
                b = x.get(j)
                if b:
                    acc += a * b
            if acc:
                out[i] = acc
        return out


class RrefResult(NamedTuple):
    matrix: SparseMatrix
    pivots: tuple[int, ...]
    rank: int


# --- elimination strategies -------------------------------------------------

def _rref_sparse(m: SparseMatrix) -> tuple[list[dict[int, Scalar]], list[int]]:
    """Column-oriented Gauss-Jordan on dict rows.

    Pivot: in the leftmost unresolved column, the entry of least
    numerator-plus-denominator bit length, ties to the lowest row.
    """
    K = m.field.domain
    prime = m.field.is_prime
    rows = {i: dict(r) for i, r in m.rows.items() if r}
    colmap: dict[int, set[int]] = {}
    for i, r in rows.items():
        for j in r:
            colmap.setdefault(j, set()).add(i)

    unresolved = set(rows)
    pivot_rows: list[int] = []
    pivots: list[int] = []
    for j in sorted(colmap):
        candidates = [i for i in colmap[j] if i in unresolved]
        if not candidates:
            continue
        p = min(candidates, key=lambda i: (_pivot_cost(rows[i][j], prime), i))
        prow = rows[p]
        a = prow[j]
        if a != K.one:
            inv = K.one / a
            for c in prow:
                prow[c] = prow[c] * inv
        unresolved.discard(p)
        pivot_rows.append(p)
        pivots.append(j)
        for i in list(colmap[j]):
            if i == p:
                continue
            row = rows[i]
            f = row[j]
            for c, b in prow.items():
                new = row.get(c, K.zero) - f * b
                if new:
                    row[c] = new
                    colmap.setdefault(c, set()).add(i)
                else:
                    row.pop(c, None)
                    colmap[c].discard(i)
        colmap[j] = {p}
    return [rows[p] for p in pivot_rows], pivots


def _rref_mod_p_dense(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Gauss-Jordan modulo a prime below 2^31 on an int64 array (copied)."""
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        targets = np.flatnonzero(col)
        if targets.size:
            a[targets] = (a[targets] - np.outer(col[targets], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _dense_mod_p(m: SparseMatrix) -> np.ndarray:
    a = np.zeros(m.shape, dtype=np.int64)
    for i, row in m.rows.items():
        for j, x in row.items():
            a[i, j] = int(x)
    return a


def _rref_numpy(m: SparseMatrix) -> tuple[list[dict[int, Scalar]], list[int]]:
    K = m.field.domain
    reduced, pivots = _rref_mod_p_dense(_dense_mod_p(m), m.field.modulus)
    rows = []
    for k in range(len(pivots)):
        nz = np.flatnonzero(reduced[k])
        rows.append({int(j): K(int(reduced[k, j])) for j in nz})
    return rows, pivots


def _rref_domain_matrix(m: SparseMatrix) -> tuple[list[dict[int, Scalar]], list[int]]:
    dm = DomainMatrix(m.to_dense(), m.shape, m.field.domain)
    reduced, pivots = dm.rref()
    dense = reduced.to_list()
    rows = []
    for k in range(len(pivots)):
        rows.append({j: a for j, a in enumerate(dense[k]) if a})
    return rows, list(pivots)


def _integral_rows(m: SparseMatrix) -> dict[int, dict[int, int]]:
    """Scale each row to coprime integers; row scaling leaves the RREF unchanged."""
    out = {}
    for i, row in m.rows.items():
        den = lcm(*(int(a.denominator) for a in row.values()))
        ints = {j: int(a.numerator) * (den // int(a.denominator)) for j, a in row.items()}
        g = 0
        for x in ints.values():
            g = gcd(g, x)
        out[i] = {j: x // g for j, x in ints.items()}
    return out


def _rational_reconstruction(a: int, modulus: int) -> Fraction | None:
    """Smallest fraction congruent to ``a`` with numerator and denominator below sqrt(M/2)."""
    bound = isqrt(modulus // 2)
    r0, r1 = modulus, a % modulus
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or gcd(r1, abs(t1)) != 1:
        return None
    return Fraction(r1, t1)


def _word_primes() -> Iterator[int]:
    p = WORD_PRIME
    while True:
        yield p
        p = prevprime(p)


def _certify_rref(int_rows: dict[int, dict[int, int]], shape: tuple[int, int],
                  pivots: list[int], free: list[int], reduced: list[list[Fraction]]) -> bool:
    """Check exactly that every free column is the claimed combination of pivot columns.

    For free column f this is A[:, f] == sum_k R[k, f] * A[:, pivot_k], which
    proves rank(A) <= len(pivots). Prime images give the reverse bound, so the
    reconstruction is the reduced row-echelon form of A.
    """
    nrows, ncols = shape
    if not free:
        return True
    den = 1
    for row in reduced:
        for x in row:
            den = lcm(den, x.denominator)
    coeff = [[int(x * den) for x in row] for row in reduced]
    a = [[0] * ncols for _ in range(nrows)]
    for i, row in int_rows.items():
        for j, x in row.items():
            a[i][j] = x
    max_a = max((abs(x) for row in int_rows.values() for x in row.values()), default=0)
    max_c = max((abs(x) for row in coeff for x in row), default=0)
    bound = max_a * max(max_c, den) * (len(pivots) + 1)
    dtype = np.int64 if bound < 2**62 else object
    A = np.array(a, dtype=dtype)
    C = np.array(coeff, dtype=dtype).reshape(len(pivots), len(free))
    lhs = A[:, free] * den
    rhs = A[:, pivots] @ C if pivots else np.zeros_like(lhs)
    return bool(np.array_equal(lhs, rhs))


def _rref_multimodular(m: SparseMatrix) -> tuple[list[dict[int, Scalar]], list[int]] | None:
    """Large rational RREF through prime images; None if it cannot be certified."""
    K = m.field.domain
    int_rows = _integral_rows(m)
    dense = np.zeros(m.shape, dtype=object)
    for i, row in int_rows.items():
        for j, x in row.items():
            dense[i, j] = x

    best: tuple[int, tuple[int, ...]] | None = None
    images: list[tuple[int, np.ndarray]] = []
    primes = _word_primes()
    previous = None
    for _ in range(MULTIMODULAR_MAX_PRIMES):
        p = next(primes)
        reduced, pivots = _rref_mod_p_dense((dense % p).astype(np.int64), p)
        key = (len(pivots), tuple(-c for c in pivots))
        if best is None or key > best:
            if best is not None:
                log.debug("prime %d improves the pivot profile; discarding earlier images", p)
            best, images, previous = key, [], None
        if key != best:
            log.debug("prime %d is unlucky (rank %d)", p, len(pivots))
            continue
        if not pivots:
            return [], []
        pivot_set = set(pivots)
        free = [j for j in range(m.ncols) if j not in pivot_set]
        images.append((p, reduced[:, free].tolist()))
        moduli = [q for q, _ in images]
        mm, e, s = crt1(moduli)
        recon: list[list[Fraction]] = []
        for k in range(len(pivots)):
            row_out = []
            for t in range(len(free)):
                value, modulus = crt2(moduli, [img[k][t] for _, img in images], mm, e, s)
                frac = _rational_reconstruction(value, modulus)
                if frac is None:
                    break
                row_out.append(frac)
            if len(row_out) < len(free):
                recon = []
                break
            recon.append(row_out)
        if not recon:
            continue
        # Two agreeing reconstructions before paying for certification.
        if recon != previous:
            previous = recon
            continue
        if _certify_rref(int_rows, m.shape, list(pivots), free, recon):
            log.debug("multi-modular RREF certified with %d primes", len(images))
            rows = []
            for k, c in enumerate(pivots):
                row = {c: K.one}
                for t, f in enumerate(free):
                    x = recon[k][t]
                    if x:
                        row[f] = K(x.numerator, x.denominator)
                rows.append(row)
            return rows, list(pivots)
        log.debug("certification failed with %d primes; continuing", len(images))
    log.warning("multi-modular elimination did not certify %s matrix; using exact elimination",
                m.shape)
    return None


def _choose_strategy(m: SparseMatrix) -> str:
    size = m.nrows * m.ncols
    if size == 0 or not m.rows:
        return "sparse"
    if size > DENSE_ENTRY_LIMIT:
        return "sparse"
    if m.field.is_prime:
        if m.field.modulus < NUMPY_MODULUS_LIMIT and (
                m.density > DENSE_THRESHOLD or size >= MULTIMODULAR_MIN_ENTRIES):
            return "numpy"
        return "dense" if m.density > DENSE_THRESHOLD else "sparse"
    if size >= MULTIMODULAR_MIN_ENTRIES:
        return "multimodular"
    return "dense" if m.density > DENSE_THRESHOLD else "sparse"


def rref(m: SparseMatrix, strategy: str | None = None) -> RrefResult:
    """Reduced row-echelon form of ``m`` over its field.

    Args:
        m: Matrix to reduce
        strategy: Force ``sparse``, ``numpy``, ``dense`` or ``multimodular``

    Returns:
        RrefResult with the reduced matrix (pivot rows first), the strictly
        increasing pivot columns and the rank
    """
    strategy = strategy or _choose_strategy(m)
    log.debug("rref %dx%d nnz=%d over %s via %s", m.nrows, m.ncols, m.nnz, m.field.label, strategy)
    if strategy == "numpy":
        rows, pivots = _rref_numpy(m)
    elif strategy == "dense":
        rows, pivots = _rref_domain_matrix(m)
    elif strategy == "multimodular":
        result = _rref_multimodular(m)
        rows, pivots = result if result is not None else _rref_sparse(m)
    elif strategy == "sparse":
        rows, pivots = _rref_sparse(m)
    else:
        raise ValueError(f"unknown elimination strategy '{strategy}'")
    stored = {k: row for k, row in enumerate(rows) if row}
    reduced = SparseMatrix(m.nrows, m.ncols, m.field, stored)
    return RrefResult(reduced, tuple(pivots), len(pivots))


def rank(m: SparseMatrix) -> int:
    return rref(m).rank


def kernel_basis(m: SparseMatrix) -> list[Vector]:
    """Basis of the right null space, one vector per free column."""
    result = rref(m)
    pivot_set = set(result.pivots)
    minus_one = -m.field.one
    basis = []
    for f in range(m.ncols):
        if f in pivot_set:
            continue
        v: Vector = {f: m.field.one}
        for k, c in enumerate(result.pivots):
            a = result.matrix.rows.get(k, {}).get(f)
            if a:
                v[c] = minus_one * a
        basis.append(v)
    return basis


def solve(m: SparseMatrix, b: Mapping[int, Any] | Sequence[Any]) -> Vector:
    """One exact solution x of m·x = b (free variables set to zero).

    Raises:
        DimensionMismatchError: If b does not have m.nrows entries
        InconsistentSystemError: If b is outside the column span
    """
    rhs = coerce_vector(b, m.nrows, m.field)
    augmented = m.hstack(SparseMatrix.from_columns([rhs], m.nrows, m.field))
    result = rref(augmented)
    if result.pivots and result.pivots[-1] == m.ncols:
        raise InconsistentSystemError("right-hand side is not in the column span")
    x: Vector = {}
    for k, c in enumerate(result.pivots):
        a = result.matrix.rows.get(k, {}).get(m.ncols)
        if a:
            x[c] = a
    return x


def span_contains(columns: SparseMatrix, v: Mapping[int, Any] | Sequence[Any]) -> bool:
    """True iff v lies in the column span of ``columns``."""
    vec = coerce_vector(v, columns.nrows, columns.field)
    if not vec:
        return True
    extra = SparseMatrix.from_columns([vec], columns.nrows, columns.field)
    return rank(columns.hstack(extra)) == rank(columns)


def subspace_equal(a: SparseMatrix, b: SparseMatrix) -> bool:
    """True iff the column spans of a and b coincide."""
    if a.nrows != b.nrows:
        raise DimensionMismatchError(f"ambient dimensions differ: {a.nrows} vs {b.nrows}")
    ra, rb = rank(a), rank(b)
    if ra != rb:
        return False
    return rank(a.hstack(b)) == ra


def reduce_mod(m: SparseMatrix, field: FieldSpec) -> SparseMatrix:
    """Image of a rational matrix in a prime field."""
    if not field.is_prime:
        raise FieldError("reduction needs a prime field")
    rows = {}
    for i, row in m.rows.items():
        r = {}
        for j, a in row.items():
            x = field.convert(m.field.to_fraction(a))
            if x:
                r[j] = x
        if r:
            rows[i] = r
    return SparseMatrix(m.nrows, m.ncols, field, rows)


def rank_mod_prime(m: SparseMatrix, p: int = WORD_PRIME) -> int:
    """Rank of the image of an integral-after-scaling matrix modulo p < 2^31."""
    if m.field.is_prime:
        a = _dense_mod_p(m)
    else:
        a = np.zeros(m.shape, dtype=np.int64)
        for i, row in _integral_rows(m).items():
            for j, x in row.items():
                a[i, j] = x % p
    return len(_rref_mod_p_dense(a, p)[1])


class Subspace:
    """Incrementally grown span of sparse vectors in a fixed ambient space.

    Basis vectors are kept in echelon form: each has coefficient 1 at its
    pivot, which is its smallest index.
    """

    def __init__(self, dimension: int, field: FieldSpec, vectors: Iterable = ()):
        self.dimension = dimension
        self.field = field
        self._echelon: dict[int, Vector] = {}
        self._pivots: list[int] = []
        for v in vectors:
            self.add(v)

    @property
    def dim(self) -> int:
        return len(self._pivots)

    def reduce(self, v: Mapping[int, Any] | Sequence[Any]) -> Vector:
        r = coerce_vector(v, self.dimension, self.field)
        zero = self.field.zero
        for c in self._pivots:
            a = r.get(c)
            if not a:
                continue
            for j, b in self._echelon[c].items():
                new = r.get(j, zero) - a * b
                if new:
                    r[j] = new
                else:
                    r.pop(j, None)
        return r

    def add(self, v: Mapping[int, Any] | Sequence[Any]) -> bool:
        """Add v to the span; True if the span grew."""
        r = self.reduce(v)
        if not r:
            return False
        c = min(r)
        inv = self.field.one / r[c]
        self._echelon[c] = {j: a * inv for j, a in r.items()}
        insort(self._pivots, c)
        return True

    def contains(self, v: Mapping[int, Any] | Sequence[Any]) -> bool:
        return not self.reduce(v)

    def basis(self) -> list[Vector]:
        return [dict(self._echelon[c]) for c in self._pivots]

    def as_matrix(self) -> SparseMatrix:
        return SparseMatrix.from_columns(self.basis(), self.dimension, self.field)

    def equals(self, other: "Subspace") -> bool:
        if other.dimension != self.dimension:
            raise DimensionMismatchError("subspaces live in different ambient spaces")
        return self.dim == other.dim and all(self.contains(v) for v in other.basis())


class ModularSpanTracker:
    """Span of integer vectors modulo a prime below 2^31, kept fully reduced."""

    def __init__(self, dimension: int, modulus: int = WORD_PRIME):
        if modulus >= NUMPY_MODULUS_LIMIT:
            raise FieldError("tracker modulus must be below 2^31")
        self.dimension = dimension
        self.modulus = modulus
        self._field = FieldSpec.prime(modulus)
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self._pivots)

    def _coerce(self, v) -> np.ndarray:
        x = np.zeros(self.dimension, dtype=np.int64)
        items = v.items() if isinstance(v, Mapping) else enumerate(v)
        for i, a in items:
            x[i] = int(self._field.convert(a))
        return x

    def _reduce(self, x: np.ndarray) -> np.ndarray:
        p = self.modulus
        for row, c in zip(self._rows, self._pivots):
            a = x[c]
            if a:
                x = (x - a * row) % p
        return x

    def contains(self, v) -> bool:
        return not np.any(self._reduce(self._coerce(v)))

    def add(self, v) -> bool:
        p = self.modulus
        x = self._reduce(self._coerce(v))
        nz = np.flatnonzero(x)
        if nz.size == 0:
            return False
        c = int(nz[0])
        x = (x * pow(int(x[c]), -1, p)) % p
        for k, row in enumerate(self._rows):
            a = row[c]
            if a:
                self._rows[k] = (row - a * x) % p
        self._rows.append(x)
        self._pivots.append(c)
        return True
