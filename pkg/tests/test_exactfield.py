from fractions import Fraction

import pytest

from exactfield import (
    DimensionMismatchError,
    FieldError,
    FieldSpec,
    InconsistentSystemError,
    ModularSpanTracker,
    SparseMatrix,
    Subspace,
    kernel_basis,
    rank,
    rank_mod_prime,
    reduce_mod,
    rref,
    solve,
    span_contains,
    subspace_equal,
)


class TestFieldSpec:
    def test_parse(self):
        assert FieldSpec.parse("q") == FieldSpec.rationals()
        assert FieldSpec.parse("Rationals") == FieldSpec.rationals()
        assert FieldSpec.parse("fp:3") == FieldSpec.prime(3)
        assert FieldSpec.parse("gf7") == FieldSpec.prime(7)
        assert str(FieldSpec.prime(3)) == "fp:3"
        assert FieldSpec.prime(3).label == "F_3"

    @pytest.mark.parametrize("text", ["fp:4", "fp:1", "reals", "fp:"])
    def test_parse_rejects(self, text):
        with pytest.raises(FieldError):
            FieldSpec.parse(text)

    def test_modulus_bound(self):
        with pytest.raises(FieldError):
            FieldSpec.prime(2**63 + 29)

    def test_convert_and_format(self, rationals, f3):
        assert rationals.format_scalar(rationals.convert("-3/6")) == "-1/2"
        assert f3.format_scalar(f3.convert(Fraction(1, 2))) == "2"
        assert f3.format_scalar(f3.convert(-1)) == "2"
        assert rationals.to_fraction(rationals.convert(Fraction(7, 4))) == Fraction(7, 4)

    def test_convert_denominator_divisible_by_p(self, f3):
        with pytest.raises(FieldError):
            f3.convert(Fraction(1, 3))


class TestSparseMatrix:
    def test_from_entries_drops_zeros(self, rationals):
        m = SparseMatrix.from_entries(2, 2, {(0, 0): 1, (1, 1): 0}, rationals)
        assert m.nnz == 1
        assert m.density == 0.25

    def test_out_of_range(self, rationals):
        with pytest.raises(DimensionMismatchError):
            SparseMatrix.from_entries(2, 2, {(2, 0): 1}, rationals)

    def test_transpose_and_matvec(self, rationals):
        m = SparseMatrix.from_rows([[1, 2, 0], [0, 1, 3]], rationals)
        assert m.transpose().shape == (3, 2)
        assert m.matvec([1, 1, 1]) == {0: rationals.convert(3), 1: rationals.convert(4)}

    def test_hstack_mismatch(self, rationals):
        with pytest.raises(DimensionMismatchError):
            SparseMatrix.zeros(2, 1, rationals).hstack(SparseMatrix.zeros(3, 1, rationals))


class TestElimination:
    def test_rank_and_kernel(self, rationals):
        m = SparseMatrix.from_rows([[1, 2, 3], [2, 4, 6], [1, 0, 1]], rationals)
        assert rank(m) == 2
        kernel = kernel_basis(m)
        assert len(kernel) == 1
        assert m.matvec(kernel[0]) == {}

    def test_rank_depends_on_field(self, rationals, f3):
        rows = [[1, 1], [1, 4]]
        assert rank(SparseMatrix.from_rows(rows, rationals)) == 2
        assert rank(SparseMatrix.from_rows(rows, f3)) == 1

    def test_empty_matrices(self, rationals):
        assert rank(SparseMatrix.zeros(0, 3, rationals)) == 0
        assert len(kernel_basis(SparseMatrix.zeros(0, 3, rationals))) == 3
        assert kernel_basis(SparseMatrix.zeros(3, 0, rationals)) == []

    @pytest.mark.parametrize("strategy", ["sparse", "dense", "multimodular"])
    def test_strategies_agree(self, rationals, rng, strategy):
        entries = {(i, j): Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                   for i in range(8) for j in range(10) if rng.random() < 0.5}
        m = SparseMatrix.from_entries(8, 10, entries, rationals)
        assert rref(m, strategy).matrix == rref(m, "sparse").matrix

    def test_numpy_strategy_prime(self, f3, rng):
        entries = {(i, j): rng.randint(0, 2) for i in range(6) for j in range(6)}
        m = SparseMatrix.from_entries(6, 6, entries, f3)
        assert rref(m, "numpy").matrix == rref(m, "sparse").matrix

    def test_rref_pivots_increase(self, rationals):
        m = SparseMatrix.from_rows([[0, 1, 1], [1, 0, 1], [1, 1, 2]], rationals)
        result = rref(m)
        assert result.pivots == (0, 1)
        assert result.rank == 2

    def test_rank_nullity(self, rationals, f3, rng):
        for field in (rationals, f3):
            for _ in range(20):
                r, c = rng.randint(1, 9), rng.randint(1, 9)
                entries = {(i, j): rng.randint(-3, 3) for i in range(r) for j in range(c)}
                m = SparseMatrix.from_entries(r, c, entries, field)
                assert rank(m) + len(kernel_basis(m)) == c


class TestSolve:
    def test_solution(self, rationals):
        m = SparseMatrix.from_rows([[2, 0], [0, 3]], rationals)
        x = solve(m, [1, 1])
        assert x == {0: rationals.convert(Fraction(1, 2)), 1: rationals.convert(Fraction(1, 3))}

    def test_inconsistent(self, rationals):
        m = SparseMatrix.from_rows([[1, 1], [1, 1]], rationals)
        with pytest.raises(InconsistentSystemError):
            solve(m, [1, 2])

    def test_wrong_length(self, rationals):
        m = SparseMatrix.from_rows([[1, 1]], rationals)
        with pytest.raises(DimensionMismatchError):
            solve(m, [1, 2])


class TestSpans:
    def test_span_contains(self, rationals):
        cols = SparseMatrix.from_columns([[1, 0, 1], [0, 1, 1]], 3, rationals)
        assert span_contains(cols, [1, 1, 2])
        assert not span_contains(cols, [1, 1, 1])
        assert span_contains(cols, [0, 0, 0])

    def test_subspace_equal(self, rationals):
        a = SparseMatrix.from_columns([[1, 0, 1], [0, 1, 1]], 3, rationals)
        b = SparseMatrix.from_columns([[1, 1, 2], [1, -1, 0]], 3, rationals)
        c = SparseMatrix.from_columns([[1, 0, 0]], 3, rationals)
        assert subspace_equal(a, b)
        assert not subspace_equal(a, c)

    def test_subspace_incremental(self, rationals):
        s = Subspace(3, rationals)
        assert s.add([1, 2, 3])
        assert not s.add([2, 4, 6])
        assert s.add({2: 1})
        assert s.dim == 2
        assert s.contains([1, 2, 5])
        assert not s.contains([0, 1, 0])
        assert s.equals(Subspace(3, rationals, s.basis()))

    def test_modular_tracker(self, rationals):
        t = ModularSpanTracker(3, 7)
        assert t.add([1, 2, 3])
        assert not t.add([3, 6, 9])
        assert t.add({0: rationals.convert(Fraction(1, 2))})
        assert t.dim == 2
        assert t.contains([0, 2, 3])

    def test_modular_tracker_modulus_bound(self):
        with pytest.raises(FieldError):
            ModularSpanTracker(2, 2**31 + 11)


class TestReduction:
    def test_reduce_mod(self, rationals, f3):
        m = SparseMatrix.from_rows([[3, Fraction(1, 2)]], rationals)
        r = reduce_mod(m, f3)
        assert r.rows == {0: {1: f3.convert(2)}}

    def test_reduce_needs_prime(self, rationals):
        with pytest.raises(FieldError):
            reduce_mod(SparseMatrix.zeros(1, 1, rationals), rationals)

    def test_rank_mod_prime(self, rationals):
        m = SparseMatrix.from_rows([[1, 1], [1, 4]], rationals)
        assert rank_mod_prime(m, 3) == 1
        assert rank_mod_prime(m) == 2
