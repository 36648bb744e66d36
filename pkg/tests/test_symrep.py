from fractions import Fraction
from math import factorial

import pytest

from invring import MultidegreeSpace
from symrep import (
    CharacterError,
    ClassFunction,
    DecompositionError,
    MultiplicityVector,
    character_table,
    class_representative,
    class_size,
    decompose,
    even_part_partitions,
    format_character_table,
    format_multiplicities,
    graded_piece_character,
    hook_dimension,
    inner_product,
    irreducible_character,
    mn_character,
    module_character,
    parse_partition,
    partitions,
    power_cycle_type,
    sign_multiplicity,
    sym_power_character,
)


class TestPartitions:
    def test_order(self):
        assert partitions(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
        assert len(partitions(10)) == 42

    @pytest.mark.parametrize("lam,dim", [
        ((2, 2), 2), ((3, 3), 5), ((4, 4), 14), ((5, 5), 42), ((4, 2, 2, 2), 300), ((1, 1, 1), 1),
    ])
    def test_hook_dimension(self, lam, dim):
        assert hook_dimension(lam) == dim

    def test_classes(self):
        assert class_size((2, 1, 1)) == 6
        assert sum(class_size(mu) for mu in partitions(6)) == factorial(6)
        assert class_representative((3, 1)) == (2, 3, 1, 4)
        assert power_cycle_type((4,), 2) == (2, 2)
        assert power_cycle_type((3, 2), 3) == (2, 1, 1, 1)

    def test_parse(self):
        assert parse_partition("(4,2,2)") == (4, 2, 2)
        assert parse_partition("4,2,2") == (4, 2, 2)
        with pytest.raises(CharacterError):
            parse_partition("(2,3)")

    def test_even_parts(self):
        assert even_part_partitions(8, 1, 4) == [(8,), (6, 2), (4, 4), (4, 2, 2), (2, 2, 2, 2)]
        assert even_part_partitions(8, 4, 4) == [(2, 2, 2, 2)]
        assert even_part_partitions(7) == []


class TestCharacters:
    def test_standard_representation(self):
        # fixed points minus one
        for mu, value in [((1, 1, 1, 1), 3), ((2, 1, 1), 1), ((3, 1), 0), ((2, 2), -1), ((4,), -1)]:
            assert mn_character((3, 1), mu) == value

    def test_sign(self):
        assert mn_character((1, 1, 1), (2, 1)) == -1
        assert mn_character((1, 1, 1), (3,)) == 1

    def test_orthonormal(self):
        table = character_table(5)
        for lam, chi in table.items():
            for mu, psi in table.items():
                assert inner_product(chi, psi) == (1 if lam == mu else 0)

    def test_degrees(self):
        assert sum(chi.degree ** 2 for chi in character_table(6).values()) == factorial(6)

    def test_table_limit(self):
        with pytest.raises(CharacterError):
            character_table(15)

    def test_class_function_requires_every_class(self):
        with pytest.raises(CharacterError):
            ClassFunction(3, {(3,): Fraction(1)})

    def test_dict_round_trip(self):
        chi = irreducible_character((2, 1, 1))
        assert ClassFunction.from_dict(4, chi.as_dict()) == chi

    def test_symmetric_square_of_standard(self):
        sym2 = sym_power_character(irreducible_character((2, 1)), 2)
        assert decompose(sym2).as_dict() == {"(3)": 1, "(2,1)": 1}
        with pytest.raises(CharacterError):
            sym_power_character(sym2, 4)

    def test_format_table(self):
        lines = format_character_table(3).splitlines()
        assert len(lines) == 4


class TestGradedPieces:
    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_degree_one_is_irreducible(self, n):
        assert decompose(graded_piece_character(n, 1)).as_dict() == {f"({n // 2},{n // 2})": 1}

    def test_two_points_is_a_line(self):
        chi = graded_piece_character(2, 1)
        assert chi.degree == 1

    @pytest.mark.parametrize("n", [6, 8])
    def test_key_fact(self, n):
        sym2 = decompose(sym_power_character(graded_piece_character(n, 1), 2))
        r2 = decompose(graded_piece_character(n, 2))
        assert sym2.support == even_part_partitions(n, 1, 4)
        assert sym2.is_multiplicity_free()
        assert r2.support == even_part_partitions(n, 1, 3)
        assert (sym2 - r2).support == even_part_partitions(n, 4, 4)

    def test_ideal_dimension_n8(self):
        sym2 = decompose(sym_power_character(graded_piece_character(8, 1), 2))
        r2 = decompose(graded_piece_character(8, 2))
        assert (sym2 - r2).dimension == 14

    def test_skew_cubic_multiplicity(self):
        assert sign_multiplicity(sym_power_character(graded_piece_character(8, 1), 3)) == 1

    def test_nonconstant_valence(self):
        with pytest.raises(CharacterError):
            module_character(MultidegreeSpace.build(4, (2, 1, 1, 2)))


class TestDecomposition:
    def test_fractional_multiplicity(self):
        delta = ClassFunction.from_function(3, lambda mu: 1 if mu == (1, 1, 1) else 0)
        with pytest.raises(DecompositionError):
            decompose(delta)

    def test_negative_difference(self):
        a = MultiplicityVector(4, {(4,): 1})
        b = MultiplicityVector(4, {(2, 2): 1})
        with pytest.raises(DecompositionError):
            a - b

    def test_format(self):
        mv = decompose(graded_piece_character(4, 1))
        text = format_multiplicities(mv, total=2)
        assert "(2,2)" in text
        assert text.rstrip().endswith("sum of mult*dim = 2 (expected 2: ok)")
