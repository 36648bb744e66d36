import numpy as np
import pytest

from exactfield import FieldSpec
from graphalg import GraphPolynomial, parse_graph, straighten
from invring import (
    CoordinateMode,
    EmptyGradedPieceError,
    MultidegreeSpace,
    ResourceBudget,
    ResourceCapExceeded,
    SamplingError,
    SpanningTruncatedError,
    SymCoordinates,
    SymbolicRelation,
    WeightVector,
    bracket_expand,
    choose_mode,
    draw_affine_samples,
    eval_at,
    expand_polynomial,
    format_basis_dump,
    format_kernel_dump,
    graded_dimension,
    hilbert_function,
    image_is_zero,
    kempe_check,
    linear_relation_space,
    relation_kernel,
    verification_method,
)


class TestExpansion:
    def test_single_bracket(self, rationals):
        assert bracket_expand(parse_graph("n=2; 1-2"), rationals) == {
            (1, 0): rationals.one, (0, 1): -rationals.one}

    def test_reversed_edge_negates(self, rationals):
        forward = bracket_expand(parse_graph("n=2; 1-2"), rationals)
        backward = bracket_expand(parse_graph("n=2; 2-1"), rationals)
        assert backward == {m: -c for m, c in forward.items()}

    def test_three_matchings_sum(self, rationals):
        p = GraphPolynomial.from_monomials([
            parse_graph("n=4; 1-2 3-4"), (-1, parse_graph("n=4; 1-3 2-4")),
            parse_graph("n=4; 1-4 2-3")], rationals)
        assert expand_polynomial(p) == {}

    def test_eval_at(self, rationals):
        g = parse_graph("n=2; 1-2")
        assert eval_at(g, [[(2, 1), (5, 1)]], rationals) == [rationals.convert(-3)]
        with pytest.raises(SamplingError):
            eval_at(g, [], rationals, minimum=1)
        with pytest.raises(SamplingError):
            eval_at(g, [[(1, 1)]], rationals)

    def test_samples_are_distinct_and_seeded(self):
        xs = draw_affine_samples(6, 20, seed=3, modulus=101)
        assert xs.shape == (20, 6)
        assert all(len(set(row.tolist())) == 6 for row in xs)
        assert np.array_equal(xs, draw_affine_samples(6, 20, seed=3, modulus=101))


class TestDimensions:
    @pytest.mark.parametrize("n,expected", [(2, 1), (4, 2), (6, 5), (8, 14)])
    def test_catalan(self, rationals, n, expected):
        assert graded_dimension(n, (1,) * n, rationals) == expected

    def test_five_points(self, rationals):
        assert graded_dimension(5, (1,) * 5, rationals) == 0
        assert graded_dimension(5, (2,) * 5, rationals) == 6

    def test_sampled_matches_full(self, rationals):
        assert graded_dimension(6, (1,) * 6, rationals, mode="sampled") == 5
        assert graded_dimension(6, (2,) * 6, rationals, mode="sampled", seed=7) == \
            graded_dimension(6, (2,) * 6, rationals, mode="full")

    def test_sampling_prime(self, rationals):
        space = MultidegreeSpace.build(6, (2,) * 6, rationals, mode="sampled", sampling_prime=10007)
        assert space.sampling_prime == 10007
        assert graded_dimension(6, (2,) * 6, rationals, mode="sampled", sampling_prime=10007) == \
            graded_dimension(6, (2,) * 6, rationals, mode="full")

    def test_tiny_sampling_prime_falls_back_to_exact_rank(self, rationals):
        # residues mod 5 repeat on 6 points, so the modular rank comes up short
        assert graded_dimension(6, (1,) * 6, rationals, mode="sampled", sampling_prime=5) == 5

    def test_sampling_prime_range(self, rationals):
        with pytest.raises(SamplingError):
            MultidegreeSpace.build(6, (1,) * 6, rationals, mode="sampled", sampling_prime=2**31)

    def test_prime_field(self, f3):
        assert graded_dimension(8, (1,) * 8, f3) == 14

    def test_small_prime_cannot_sample(self, f3):
        assert choose_mode((1,) * 8, f3, full_limit=1) is CoordinateMode.FULL
        with pytest.raises(SamplingError):
            MultidegreeSpace.build(4, (1,) * 4, f3, mode="sampled")

    def test_spanning_cap(self, rationals):
        with pytest.raises(SpanningTruncatedError):
            graded_dimension(8, (1,) * 8, rationals, cap=10)

    def test_invalid_valence(self, rationals):
        with pytest.raises(ValueError):
            graded_dimension(4, (1, 1), rationals)

    def test_basis_rank(self, rationals):
        space = MultidegreeSpace.build(6, (1,) * 6, rationals)
        assert space.rank() == space.dimension_upper_bound == 5

    def test_hilbert_function(self, rationals):
        assert hilbert_function(4, (1, 1, 1, 1), 3) == [1, 2, 3, 4]
        assert hilbert_function(5, (2,) * 5, 2, rationals) == [1, 6, 16]

    def test_weight_vector(self):
        assert WeightVector.unit(3).scaled(2) == (2, 2, 2)
        with pytest.raises(ValueError):
            WeightVector((0, 1))


class TestRelations:
    def test_five_points_quadrics(self, rationals):
        kernel = relation_kernel(5, (2,) * 5, 2, rationals)
        assert kernel.dimension == 5
        assert kernel.sym_dimension == 21
        assert kernel.image_rank == 16
        assert all(image_is_zero(r) for r in kernel)

    def test_six_points(self, rationals):
        coords = SymCoordinates(6, (1,) * 6, rationals)
        assert relation_kernel(6, (1,) * 6, 2, rationals, coords=coords).dimension == 0
        cubic = relation_kernel(6, (1,) * 6, 3, rationals, coords=coords)
        assert cubic.dimension == 1
        assert cubic.prepass_rank == cubic.image_rank

    def test_large_prime_field(self):
        kernel = relation_kernel(6, (1,) * 6, 3, FieldSpec.prime(10007))
        assert kernel.dimension == 1
        assert kernel.prepass_rank is None

    def test_degree_one_rejected(self, rationals):
        with pytest.raises(ValueError):
            relation_kernel(4, (1,) * 4, 1, rationals)

    def test_memory_cap(self, rationals):
        with pytest.raises(ResourceCapExceeded) as info:
            relation_kernel(6, (1,) * 6, 2, rationals, budget=ResourceBudget(max_bytes=1))
        assert info.value.diagnostics["stage"] == "multiplication matrix"

    def test_time_cap(self, rationals):
        budget = ResourceBudget(max_seconds=-1.0)
        with pytest.raises(ResourceCapExceeded):
            budget.check_time("loop")

    def test_verification_method(self):
        assert verification_method((1,) * 8, 2) == "expansion"
        assert verification_method((1,) * 10, 2) == "straightening"

    def test_both_verifications_agree(self, rationals):
        kernel = relation_kernel(5, (2,) * 5, 2, rationals)
        for rel in kernel:
            assert image_is_zero(rel, "expansion")
            assert image_is_zero(rel, "straightening")

    def test_linear_relations(self, rationals):
        rels = linear_relation_space(4, (1,) * 4, rationals)
        assert len(rels) == 1
        assert straighten(rels[0]).is_zero()
        assert len(linear_relation_space(6, (1,) * 6, rationals)) == 15 - 5

    def test_dumps(self, rationals):
        kernel = relation_kernel(5, (2,) * 5, 2, rationals)
        dump = format_kernel_dump(kernel).splitlines()
        assert dump[0].startswith("# n=5 weights=2,2,2,2,2 degree=2 field=q dimension=5")
        assert len(dump) == 6
        basis = format_basis_dump(4, (1,) * 4, kernel.coords.basis[:0])
        assert basis == "# n=4 valence=1,1,1,1 count=0\n"


class TestSymCoordinates:
    def test_sizes(self, rationals):
        coords = SymCoordinates(6, (1,) * 6, rationals)
        assert coords.size == 5
        assert coords.sym_dimension(2) == 15
        assert len(coords.monomials(3)) == coords.sym_dimension(3) == 35

    def test_vector_round_trip(self, rationals):
        coords = SymCoordinates(6, (1,) * 6, rationals)
        vec = {0: rationals.one, 7: rationals.convert(-2)}
        assert coords.vector_from_poly(coords.poly_from_vector(vec, 2), 2) == vec
        rel = coords.relation_from_vector(vec, 2)
        assert coords.relation_vector(rel) == vec

    def test_crossing_factor_is_straightened(self, rationals):
        coords = SymCoordinates(4, (1,) * 4, rationals)
        form = coords.linear_form(((1, 3), (2, 4)))
        z = coords.ring.gens
        assert form == z[0] + z[1]

    def test_permutation_forms_preserve_products(self, rationals):
        coords = SymCoordinates(4, (1,) * 4, rationals)
        forms = coords.permutation_forms((2, 1, 3, 4))
        z = coords.ring.gens
        assert coords.act(z[0], forms) == -z[0]

    def test_empty_piece(self, rationals):
        with pytest.raises(EmptyGradedPieceError):
            SymCoordinates(5, (1,) * 5, rationals)

    def test_relation_field_mismatch(self, rationals, f3):
        coords = SymCoordinates(4, (1,) * 4, rationals)
        rel = SymbolicRelation(4, 2, f3, {})
        with pytest.raises(ValueError):
            coords.relation_poly(rel)


class TestKempe:
    def test_unit_weights(self, rationals):
        for k in (2, 3):
            verdict = kempe_check(6, (1,) * 6, k, rationals)
            assert verdict.holds and not verdict.vacuous

    def test_odd_total_is_vacuous(self, rationals):
        verdict = kempe_check(3, (1, 1, 1), 2, rationals)
        assert verdict.holds and verdict.vacuous

    def test_exact_path_over_small_prime(self):
        verdict = kempe_check(5, (2,) * 5, 2, FieldSpec.prime(10007))
        assert verdict.holds
        assert verdict.method == "exact"

    def test_k_at_least_two(self, rationals):
        with pytest.raises(ValueError):
            kempe_check(4, (1,) * 4, 1, rationals)
