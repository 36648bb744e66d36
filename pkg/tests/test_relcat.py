from fractions import Fraction

import pytest

from exactfield import SparseMatrix, rank, subspace_equal
from graphalg import apply_permutation, parse_graph
from invring import SymCoordinates, image_is_zero, relation_kernel
from relcat import (
    CatalogName,
    RelationError,
    catalog,
    del_pezzo_quadrics,
    extend_relation,
    extended_plucker,
    extended_simple_quadric,
    format_catalog,
    generation_check,
    is_balanced_binomial,
    orbit_span,
    partials,
    plucker_relation,
    primitive_integer_vector,
    reduce_relation,
    segre_binomial_cubic,
    sign_relation,
    simple_quadric,
    skew_cubic,
)


@pytest.fixture(scope="module")
def coords8():
    return SymCoordinates(8, (1,) * 8)


@pytest.fixture(scope="module")
def kernel8(coords8):
    return relation_kernel(8, (1,) * 8, 2, coords=coords8)


@pytest.fixture(scope="module")
def skew8(coords8):
    return skew_cubic(8, coords=coords8)


def span_rank(vectors, dimension, field):
    return rank(SparseMatrix.from_columns(vectors, dimension, field))


class TestSmallRelations:
    def test_sign_relation_cancels(self):
        assert sign_relation().is_zero()

    def test_plucker(self):
        rel = plucker_relation()
        assert len(rel.terms) == 3
        assert rel.weights == (1, 1, 1, 1)
        assert image_is_zero(rel)

    def test_extended_plucker(self):
        rel = extended_plucker()
        assert rel.n == 6
        assert rel.weights == (1,) * 6
        assert image_is_zero(rel)

    def test_extend_rejects_bad_edges(self):
        with pytest.raises(RelationError):
            extend_relation(plucker_relation(), [(6, 7)])
        with pytest.raises(RelationError):
            extend_relation(plucker_relation(), [(5, 6), (5, 7)])

    def test_simple_quadric(self):
        rel = simple_quadric(8)
        assert is_balanced_binomial(rel)
        assert image_is_zero(rel)
        with pytest.raises(RelationError):
            simple_quadric(10)

    def test_extended_simple_quadric(self):
        rel = extended_simple_quadric(10)
        assert rel.n == 10
        assert is_balanced_binomial(rel)
        with pytest.raises(RelationError):
            extended_simple_quadric(9)


class TestFivePoints:
    def test_rotations_span_the_quadrics(self, rationals):
        rels = del_pezzo_quadrics(rationals)
        assert len(rels) == 5
        kernel = relation_kernel(5, (2,) * 5, 2, rationals)
        vectors = [kernel.coords.relation_vector(r) for r in rels]
        assert span_rank(vectors, kernel.sym_dimension, rationals) == 5
        m = SparseMatrix.from_columns(vectors, kernel.sym_dimension, rationals)
        assert subspace_equal(m, kernel.matrix())

    def test_rotations_are_binomials(self, rationals):
        assert all(is_balanced_binomial(r) for r in del_pezzo_quadrics(rationals))

    def test_orbit_span(self, rationals):
        kernel = relation_kernel(5, (2,) * 5, 2, rationals)
        span = orbit_span(del_pezzo_quadrics(rationals)[0], kernel.coords)
        assert span.dimension == 5
        assert span.equals(kernel)


class TestSixPoints:
    def test_segre_cubic(self, rationals):
        rel = segre_binomial_cubic(rationals)
        coords = SymCoordinates(6, (1,) * 6, rationals)
        assert is_balanced_binomial(rel)
        assert coords.relation_vector(rel)
        kernel = relation_kernel(6, (1,) * 6, 3, rationals, coords=coords)
        assert kernel.dimension == 1
        assert span_rank([coords.relation_vector(rel)] + kernel.vectors,
                         coords.sym_dimension(3), rationals) == 1

    def test_skew_cubic_is_the_segre_cubic(self, rationals):
        coords = SymCoordinates(6, (1,) * 6, rationals)
        a = coords.relation_vector(skew_cubic(6, coords=coords))
        b = coords.relation_vector(segre_binomial_cubic(rationals))
        assert a
        assert span_rank([a, b], coords.sym_dimension(3), rationals) == 1

    def test_generation_defect_filled_by_skew_cubic(self, rationals):
        verdict = generation_check(6, 3, rationals)
        assert verdict.verdict == "strictly-contained"
        assert verdict.kernel_dimension == 1
        assert verdict.multiples_rank == 0
        assert verdict.skew_fills is True


class TestEightPoints:
    def test_kernel_dimension(self, kernel8):
        assert kernel8.dimension == 14

    def test_skew_cubic_changes_sign(self, coords8, skew8):
        v = coords8.relation_vector(skew8)
        assert v
        swapped = coords8.relation_vector(skew8.permuted((2, 1, 3, 4, 5, 6, 7, 8)))
        assert swapped == {i: -a for i, a in v.items()}

    def test_partials_span_the_quadrics(self, coords8, kernel8, skew8, rationals):
        quads = partials(skew8, coords=coords8)
        assert len(quads) == 14
        m = SparseMatrix.from_columns([coords8.relation_vector(q) for q in quads],
                                      kernel8.sym_dimension, rationals)
        assert rank(m) == 14
        assert subspace_equal(m, kernel8.matrix())

    def test_partials_in_another_basis(self, coords8, skew8, rationals):
        rotated = [apply_permutation((2, 3, 4, 5, 6, 7, 8, 1), g) for g in coords8.basis]
        a = [coords8.relation_vector(q) for q in partials(skew8, coords=coords8)]
        b = [coords8.relation_vector(q) for q in partials(skew8, rotated, coords=coords8)]
        dim = coords8.sym_dimension(2)
        assert subspace_equal(SparseMatrix.from_columns(a, dim, rationals),
                              SparseMatrix.from_columns(b, dim, rationals))

    def test_partials_need_a_cubic(self):
        with pytest.raises(RelationError):
            partials(plucker_relation())

    def test_simple_quadric_orbit(self, coords8, kernel8):
        span = orbit_span(simple_quadric(8), coords8)
        assert span.dimension == 14
        assert span.equals(kernel8)
        assert span.contains(simple_quadric(8))

    def test_skew_cubic_over_f3(self, f3):
        rel = skew_cubic(8, field=f3)
        assert not rel.is_zero()
        assert rel.field == f3

    @pytest.mark.slow
    def test_quadrics_generate_cubics(self, rationals, kernel8):
        assert generation_check(8, 3, rationals, kernel_2=kernel8).equal

    @pytest.mark.slow
    def test_characteristic_three(self, f3):
        verdict = generation_check(8, 3, f3)
        assert verdict.verdict == "strictly-contained"
        assert verdict.defect > 0
        assert verdict.skew_fills


class TestSkewCubicArguments:
    def test_odd_points(self):
        with pytest.raises(RelationError):
            skew_cubic(5)

    def test_gamma_must_be_a_matching(self):
        with pytest.raises(RelationError):
            skew_cubic(4, parse_graph("n=4; 1-2"))

    @pytest.mark.slow
    def test_vanishes_on_ten_points(self):
        assert skew_cubic(10).is_zero()


class TestIntegerForms:
    def test_primitive_vector(self):
        rel = plucker_relation().scale(Fraction(3, 2))
        ints = primitive_integer_vector(rel)
        assert sorted(ints.values()) == [-1, 1, 1]

    def test_reduce(self, f3):
        rel = reduce_relation(plucker_relation(), f3)
        assert rel.field == f3
        assert len(rel.terms) == 3

    def test_prime_field_input(self, f3):
        with pytest.raises(RelationError):
            primitive_integer_vector(reduce_relation(plucker_relation(), f3))


class TestCatalog:
    def test_entries(self, rationals):
        entries = catalog(rationals)
        assert len(entries) == 26
        names = [e.name for e in entries]
        assert names.count(CatalogName.DEL_PEZZO_QUADRIC) == 5
        assert names.count(CatalogName.SKEW_CUBIC_PARTIAL) == 14
        assert names[0] is CatalogName.SIGN_RELATION

    def test_without_skew(self, rationals):
        entries = catalog(rationals, include_skew=False)
        assert len(entries) == 11
        lines = format_catalog(entries).splitlines()
        assert lines[1].startswith("Plucker | 4 | 1 | ")
        assert lines[0] == "SignRelation | 2 | 1 | 0"
