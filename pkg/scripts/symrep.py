"""Symmetric-group characters and decompositions of graded pieces.

Irreducible characters come from the Murnaghan-Nakayama rule on
beta-numbers; characters of graded pieces are traces of the permutation
action in the non-crossing basis, so every decomposition claim is computed
rather than assumed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd, prod
from typing import Mapping, Sequence

from sympy.utilities.iterables import partitions as _sympy_partitions

from exactfield import FieldSpec
from graphalg import GraphPolynomial, apply_permutation, straighten_many
from invring import MultidegreeSpace

log = logging.getLogger("pgl2_invariants.symrep")

Partition = tuple[int, ...]

MAX_TABLE_N = 14


class DecompositionError(ArithmeticError):
    """A class function did not decompose into nonnegative integer multiplicities."""


class CharacterError(ValueError):
    """Unsupported input to a character computation."""


def check_partition(lam: Sequence[int], n: int | None = None) -> Partition:
    lam = tuple(int(x) for x in lam)
    if any(x <= 0 for x in lam) or list(lam) != sorted(lam, reverse=True):
        raise CharacterError(f"{lam} is not a partition")
    if n is not None and sum(lam) != n:
        raise CharacterError(f"{lam} is not a partition of {n}")
    return lam


def format_partition(lam: Partition) -> str:
    return "(" + ",".join(map(str, lam)) + ")"


def parse_partition(text: str) -> Partition:
    """Inverse of format_partition; also accepts ``4,2,2``."""
    body = text.strip().strip("()")
    if not body:
        return ()
    return check_partition(int(x) for x in body.split(","))


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[Partition, ...]:
    """Partitions of n in decreasing lexicographic order, starting with (n)."""
    if n < 0:
        raise CharacterError("n must be nonnegative")
    if n == 0:
        return ((),)
    out = []
    for p in _sympy_partitions(n):
        out.append(tuple(k for k in sorted(p, reverse=True) for _ in range(p[k])))
    return tuple(sorted(out, reverse=True))


def conjugate(lam: Partition) -> Partition:
    return tuple(sum(1 for x in lam if x > i) for i in range(lam[0])) if lam else ()


def hook_dimension(lam: Sequence[int]) -> int:
    """Dimension of the irreducible indexed by lam (hook-length formula)."""
    lam = check_partition(lam)
    conj = conjugate(lam)
    hooks = prod(lam[i] - j + conj[j] - i - 1 for i in range(len(lam)) for j in range(lam[i]))
    return factorial(sum(lam)) // hooks


def centralizer_order(mu: Partition) -> int:
    counts: dict[int, int] = {}
    for part in mu:
        counts[part] = counts.get(part, 0) + 1
    return prod(k**m * factorial(m) for k, m in counts.items())


def class_size(mu: Sequence[int]) -> int:
    mu = check_partition(mu)
    return factorial(sum(mu)) // centralizer_order(mu)


def class_representative(mu: Sequence[int]) -> tuple[int, ...]:
    """One-line permutation with cycle type mu: consecutive labels, longest cycles first."""
    mu = check_partition(mu)
    sigma = []
    start = 1
    for length in mu:
        sigma.extend(range(start + 1, start + length))
        sigma.append(start)
        start += length
    return tuple(sigma)


def power_cycle_type(mu: Sequence[int], k: int) -> Partition:
    """Cycle type of sigma^k for sigma of cycle type mu."""
    parts = []
    for length in mu:
        g = gcd(length, k)
        parts.extend([length // g] * g)
    return tuple(sorted(parts, reverse=True))


def _beta(lam: Partition, beads: int) -> tuple[int, ...]:
    padded = list(lam) + [0] * (beads - len(lam))
    return tuple(sorted(padded[i] + beads - 1 - i for i in range(beads)))


@lru_cache(maxsize=None)
def _mn(beta: tuple[int, ...], mu: Partition) -> int:
    if not mu:
        return 1
    r, rest = mu[0], mu[1:]
    occupied = set(beta)
    total = 0
    for b in beta:
        target = b - r
        if target < 0 or target in occupied:
            continue
        # Sliding a bead down r places removes a border strip; its height is
        # the number of beads jumped over.
        height = sum(1 for x in beta if target < x < b)
        moved = tuple(sorted(target if x == b else x for x in beta))
        value = _mn(moved, rest)
        total += -value if height % 2 else value
    return total


def mn_character(lam: Sequence[int], mu: Sequence[int]) -> int:
    """chi_lam at the class of cycle type mu (Murnaghan-Nakayama)."""
    lam = check_partition(lam)
    mu = check_partition(mu, sum(lam))
    return _mn(_beta(lam, len(lam) or 1), mu)


@dataclass(frozen=True, eq=False)
class ClassFunction:
    """Values of a class function of S_n, one per cycle type."""

    n: int
    values: dict[Partition, Fraction] = dc_field(default_factory=dict)

    def __post_init__(self):
        if set(self.values) != set(partitions(self.n)):
            raise CharacterError(f"a class function of S_{self.n} needs one value per partition")

    @classmethod
    def from_function(cls, n: int, f) -> "ClassFunction":
        return cls(n, {mu: Fraction(f(mu)) for mu in partitions(n)})

    def __call__(self, mu: Sequence[int]) -> Fraction:
        return self.values[tuple(mu)]

    @property
    def degree(self) -> Fraction:
        """Value at the identity."""
        return self.values[(1,) * self.n]

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.values.values())

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        return ClassFunction(self.n, {mu: v + other.values[mu] for mu, v in self.values.items()})

    def __sub__(self, other: "ClassFunction") -> "ClassFunction":
        self._check(other)
        return ClassFunction(self.n, {mu: v - other.values[mu] for mu, v in self.values.items()})

    def _check(self, other: "ClassFunction") -> None:
        if other.n != self.n:
            raise CharacterError(f"class functions of S_{self.n} and S_{other.n}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassFunction):
            return NotImplemented
        return self.n == other.n and self.values == other.values

    def as_dict(self) -> dict[str, str]:
        return {format_partition(mu): str(v) for mu, v in self.values.items()}

    @classmethod
    def from_dict(cls, n: int, data: Mapping[str, str]) -> "ClassFunction":
        return cls(n, {parse_partition(k): Fraction(v) for k, v in data.items()})


def irreducible_character(lam: Sequence[int]) -> ClassFunction:
    lam = check_partition(lam)
    return ClassFunction.from_function(sum(lam), lambda mu: mn_character(lam, mu))


@lru_cache(maxsize=None)
def character_table(n: int) -> dict[Partition, ClassFunction]:
    """Irreducible characters of S_n keyed by partition.

    Raises:
        CharacterError: If n exceeds MAX_TABLE_N
    """
    if not 1 <= n <= MAX_TABLE_N:
        raise CharacterError(f"character tables are supported for 1 <= n <= {MAX_TABLE_N}")
    table = {lam: irreducible_character(lam) for lam in partitions(n)}
    log.debug("character table of S_%d: %d irreducibles", n, len(table))
    return table


def inner_product(chi: ClassFunction, psi: ClassFunction) -> Fraction:
    """Class-size weighted inner product (characters of S_n are real)."""
    chi._check(psi)
    total = sum((v * psi.values[mu] / centralizer_order(mu) for mu, v in chi.values.items()),
                Fraction(0))
    return Fraction(total)


# --- characters of graded pieces ----------------------------------------------

def module_character(space: MultidegreeSpace) -> ClassFunction:
    """Character of S_n on a graded piece with constant valence.

    For each cycle type the representative permutation moves every basis
    graph; the image is straightened and its coefficient on the original
    graph contributes to the trace.

    Raises:
        CharacterError: If the valence vector is not constant
    """
    if len(set(space.valence)) > 1:
        raise CharacterError(f"S_{space.n} does not act on R_v for v={space.valence}")
    field = FieldSpec.rationals()
    basis = space.basis
    values = {}
    for mu in partitions(space.n):
        if not basis:
            values[mu] = Fraction(0)
            continue
        sigma = class_representative(mu)
        images = []
        for g in basis:
            moved = apply_permutation(sigma, g)
            images.append(GraphPolynomial(space.n, field, {moved.edges: field.convert(moved.sign)}))
        trace = Fraction(0)
        for g, p in zip(basis, straighten_many(images)):
            c = p.terms.get(g.edges)
            if c:
                trace += field.to_fraction(c)
        values[mu] = trace
    chi = ClassFunction(space.n, values)
    log.debug("character of R_%s computed on %d classes", space.valence, len(values))
    return chi


def graded_piece_character(n: int, k: int) -> ClassFunction:
    """Character of R_{k·1^n}."""
    return module_character(MultidegreeSpace.build(n, (k,) * n))


def sym_power_character(chi: ClassFunction, d: int) -> ClassFunction:
    """Character of the d-th symmetric power, d in {2, 3}."""
    if d == 2:
        return ClassFunction.from_function(
            chi.n, lambda mu: (chi(mu) ** 2 + chi(power_cycle_type(mu, 2))) / 2)
    if d == 3:
        return ClassFunction.from_function(
            chi.n, lambda mu: (chi(mu) ** 3 + 3 * chi(mu) * chi(power_cycle_type(mu, 2))
                               + 2 * chi(power_cycle_type(mu, 3))) / 6)
    raise CharacterError(f"symmetric powers of degree {d} are not supported")


@dataclass(frozen=True)
class MultiplicityVector:
    n: int
    multiplicities: dict[Partition, int]

    @property
    def dimension(self) -> int:
        return sum(m * hook_dimension(lam) for lam, m in self.multiplicities.items())

    @property
    def support(self) -> list[Partition]:
        return sorted(self.multiplicities, reverse=True)

    def is_multiplicity_free(self) -> bool:
        return all(m == 1 for m in self.multiplicities.values())

    def __sub__(self, other: "MultiplicityVector") -> "MultiplicityVector":
        out = dict(self.multiplicities)
        for lam, m in other.multiplicities.items():
            left = out.get(lam, 0) - m
            if left < 0:
                raise DecompositionError(f"{format_partition(lam)} occurs {m} times on the right")
            if left:
                out[lam] = left
            else:
                out.pop(lam, None)
        return MultiplicityVector(self.n, out)

    def as_dict(self) -> dict[str, int]:
        return {format_partition(lam): self.multiplicities[lam] for lam in self.support}


def decompose(chi: ClassFunction) -> MultiplicityVector:
    """Multiplicities of the irreducibles in chi.

    Raises:
        DecompositionError: On a negative or fractional multiplicity, or a dimension mismatch
    """
    mult = {}
    for lam, row in character_table(chi.n).items():
        m = inner_product(chi, row)
        if m.denominator != 1 or m < 0:
            raise DecompositionError(f"multiplicity {m} of {format_partition(lam)} is not a count")
        if m:
            mult[lam] = int(m)
    result = MultiplicityVector(chi.n, mult)
    if result.dimension != chi.degree:
        raise DecompositionError(f"summands have dimension {result.dimension}, "
                                 f"character degree is {chi.degree}")
    return result


def sign_multiplicity(chi: ClassFunction) -> int:
    m = inner_product(chi, irreducible_character((1,) * chi.n))
    if m.denominator != 1 or m < 0:
        raise DecompositionError(f"sign multiplicity {m} is not a count")
    return int(m)


def even_part_partitions(n: int, min_parts: int = 1, max_parts: int | None = None) -> list[Partition]:
    """Partitions of n with every part even and a part count within bounds."""
    max_parts = n if max_parts is None else max_parts
    return [lam for lam in partitions(n)
            if all(x % 2 == 0 for x in lam) and min_parts <= len(lam) <= max_parts]


# --- text tables ---------------------------------------------------------------

def format_character_table(n: int) -> str:
    table = character_table(n)
    classes = partitions(n)
    head = [""] + [format_partition(mu) for mu in classes]
    rows = [head] + [[format_partition(lam)] + [str(mn_character(lam, mu)) for mu in classes]
                     for lam in table]
    widths = [max(len(r[k]) for r in rows) for k in range(len(head))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows) + "\n"


def format_multiplicities(mv: MultiplicityVector, total: int | None = None) -> str:
    """Aligned ``partition  multiplicity  dimension`` table with the consistency sum."""
    rows = [("partition", "mult", "dim")]
    rows += [(format_partition(lam), str(mv.multiplicities[lam]), str(hook_dimension(lam)))
             for lam in mv.support]
    widths = [max(len(r[k]) for r in rows) for k in range(3)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    footer = f"sum of mult*dim = {mv.dimension}"
    if total is not None:
        footer += f" (expected {total}: {'ok' if total == mv.dimension else 'MISMATCH'})"
    lines.append(footer)
    return "\n".join(lines) + "\n"

