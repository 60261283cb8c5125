from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from ffvar.arith import euler_phi, sieve_irreducibles
from ffvar.characters import (
    DirichletChar,
    character_rotation_matrix,
    character_value_matrix,
    count_even,
    enumerate_characters,
    even_characters,
    principal_character,
    rotation_multiset_cancels,
    unit_group_basis,
)
from ffvar.errors import PreconditionError
from ffvar.fields import make_field
from ffvar.polys import Poly, from_coeffs, t_power


def _code_poly(fld, m, code):
    return from_coeffs(fld, [(code // fld.q**j) % fld.q for j in range(m)])


# -- unit group structure ------------------------------------------------------


def test_unit_group_mod_t_cubed_is_cyclic_of_order_four(f2):
    basis = unit_group_basis(f2, t_power(f2, 3))
    assert basis.generators == (3,)  # 1 + t
    assert basis.orders == (4,)
    assert basis.exponent == 4
    assert basis.phi == 4
    assert list(basis.unit_codes) == [1, 3, 5, 7]


def test_unit_group_mod_t_fourth_splits(f2):
    basis = unit_group_basis(f2, t_power(f2, 4))
    assert basis.orders == (4, 2)
    assert basis.phi == 8
    assert basis.exponent == 4


def test_unit_group_mod_t_squared_over_f3_is_cyclic(f3):
    basis = unit_group_basis(f3, t_power(f3, 2))
    assert basis.orders == (6,)
    assert basis.phi == 6


def test_order_chain_and_phi(f2, f3, f4):
    cases = [
        (f2, t_power(f2, 5)),
        (f2, from_coeffs(f2, [0, 1, 0, 1])),  # t (t+1)^2
        (f3, t_power(f3, 3)),
        (f3, from_coeffs(f3, [1, 0, 1])),  # irreducible quadratic
        (f4, t_power(f4, 2)),
    ]
    cache = {2: sieve_irreducibles(f2, 6), 3: sieve_irreducibles(f3, 6), 4: sieve_irreducibles(f4, 6)}
    for fld, modulus in cases:
        basis = unit_group_basis(fld, modulus)
        assert basis.phi == euler_phi(modulus, cache[fld.q])
        assert math.prod(basis.orders) == basis.phi
        assert basis.exponent == math.lcm(*basis.orders) if basis.orders else basis.exponent == 1
        # invariant-factor chain: each order divides the previous one
        for a, b in zip(basis.orders, basis.orders[1:]):
            assert a % b == 0
        assert len(basis.dlog) == basis.phi


def test_basis_is_cached(f2):
    assert unit_group_basis(f2, t_power(f2, 3)) is unit_group_basis(f2, t_power(f2, 3))


def test_degree_one_modulus_edge(f2, f3):
    b = unit_group_basis(f2, t_power(f2, 1))
    assert (b.phi, b.generators, b.exponent) == (1, (), 1)
    assert len(enumerate_characters(b)) == 1
    b = unit_group_basis(f3, t_power(f3, 1))
    assert (b.phi, b.orders) == (2, (2,))
    assert count_even(b) == 1


# -- character values -----------------------------------------------------------


def test_principal_character(f3):
    basis = unit_group_basis(f3, t_power(f3, 2))
    chi0 = principal_character(basis)
    assert chi0.is_principal and chi0.is_even
    for code in basis.unit_codes:
        assert chi0.rotation_numerator(int(code)) == 0
    assert chi0.evaluate(from_coeffs(f3, [1, 1])) == Fraction(0)
    assert chi0.evaluate(t_power(f3, 5)) is None  # shares the factor t
    assert chi0.value(t_power(f3, 5)) == 0j


def test_character_enumeration_counts(f2, f3):
    for fld, m in ((f2, 4), (f3, 3)):
        basis = unit_group_basis(fld, t_power(fld, m))
        chars = enumerate_characters(basis)
        assert len(chars) == basis.phi
        assert chars[0].is_principal
        assert sum(1 for c in chars if c.is_principal) == 1
        assert len({c.exponents for c in chars}) == len(chars)


def test_character_multiplicativity(f2, f3):
    cases = [(f2, from_coeffs(f2, [0, 1, 0, 1])), (f3, t_power(f3, 2))]
    for fld, modulus in cases:
        basis = unit_group_basis(fld, modulus)
        m = modulus.degree
        for chi in enumerate_characters(basis):
            for a in basis.unit_codes:
                for b in basis.unit_codes:
                    u = _code_poly(fld, m, int(a))
                    v = _code_poly(fld, m, int(b))
                    lhs = chi.evaluate(u * v)
                    rhs = (chi.evaluate(u) + chi.evaluate(v)) % 1
                    assert lhs == rhs


def test_rotation_denominators_divide_the_group_order(f2):
    basis = unit_group_basis(f2, t_power(f2, 4))
    for chi in enumerate_characters(basis):
        for code in basis.unit_codes:
            rot = Fraction(chi.rotation_numerator(int(code)), basis.exponent)
            assert 0 <= rot < 1
            assert (rot * basis.phi).denominator == 1


def test_exponent_vector_validation(f2):
    basis = unit_group_basis(f2, t_power(f2, 3))
    with pytest.raises(PreconditionError):
        DirichletChar(basis, (1, 0))
    with pytest.raises(PreconditionError):
        DirichletChar(basis, (4,))
    with pytest.raises(PreconditionError):
        basis_chi = DirichletChar(basis, (1,))
        basis_chi.rotation_numerator(2)  # code 2 = t is not a unit


# -- evenness ---------------------------------------------------------------------


def test_all_characters_even_when_q_is_two(f2):
    basis = unit_group_basis(f2, t_power(f2, 4))
    assert count_even(basis) == basis.phi


def test_even_characters_ignore_constant_scaling(f3):
    basis = unit_group_basis(f3, t_power(f3, 2))
    evens = even_characters(basis)
    assert len(evens) == count_even(basis) == 3
    for chi in evens:
        for code in basis.unit_codes:
            u = _code_poly(f3, 2, int(code))
            assert chi.evaluate(u.scale(2)) == chi.evaluate(u)


def test_totient_formulas_for_t_powers():
    for q in (2, 3, 4):
        fld = make_field(2, 2) if q == 4 else make_field(q)
        for m in range(1, 5):
            basis = unit_group_basis(fld, t_power(fld, m))
            assert basis.phi == q ** (m - 1) * (q - 1)
            assert count_even(basis) == q ** (m - 1)


# -- orthogonality ------------------------------------------------------------------


def test_row_orthogonality_exact(f2, f3):
    for fld, modulus in ((f2, t_power(f2, 4)), (f3, t_power(f3, 2)), (f2, from_coeffs(f2, [0, 1, 0, 1]))):
        basis = unit_group_basis(fld, modulus)
        chars = enumerate_characters(basis)
        R = character_rotation_matrix(basis, chars)
        V = character_value_matrix(basis, chars)
        for i, chi in enumerate(chars):
            cancels = rotation_multiset_cancels(R[i].tolist(), basis.exponent)
            assert cancels == (not chi.is_principal)
            total = complex(V[i].sum())
            if chi.is_principal:
                assert total == pytest.approx(basis.phi)
            else:
                assert abs(total) < 1e-9


def test_column_orthogonality_exact(f3):
    basis = unit_group_basis(f3, t_power(f3, 3))
    chars = enumerate_characters(basis)
    R = character_rotation_matrix(basis, chars)
    one_col = int(np.where(basis.unit_codes == 1)[0][0])
    for j, code in enumerate(basis.unit_codes):
        cancels = rotation_multiset_cancels(R[:, j].tolist(), basis.exponent)
        assert cancels == (j != one_col)


def test_value_matrix_agrees_with_pointwise_values(f2):
    basis = unit_group_basis(f2, t_power(f2, 3))
    chars = enumerate_characters(basis)
    V = character_value_matrix(basis, chars)
    for i, chi in enumerate(chars):
        for j, code in enumerate(basis.unit_codes):
            u = _code_poly(f2, 3, int(code))
            assert V[i, j] == pytest.approx(chi.value(u))


def test_even_value_matrix_shape(f3):
    basis = unit_group_basis(f3, t_power(f3, 3))
    assert basis.value_matrix("all").shape == (basis.phi, basis.phi)
    assert basis.value_matrix("even").shape == (count_even(basis), basis.phi)
    assert basis.value_matrix("even") is basis.value_matrix("even")  # cached


# -- the exact cancellation predicate ---------------------------------------------


def test_rotation_multiset_cancels_cases():
    assert rotation_multiset_cancels([], 4)
    assert rotation_multiset_cancels([0, 2], 4)
    assert rotation_multiset_cancels([1, 3], 4)
    assert rotation_multiset_cancels([0, 0, 2, 2], 4)
    assert rotation_multiset_cancels([0, 1, 2, 3], 4)
    assert rotation_multiset_cancels([0, 1, 2], 3)
    assert rotation_multiset_cancels([0, 3], 6)
    assert not rotation_multiset_cancels([0], 4)
    assert not rotation_multiset_cancels([0, 1], 4)
    assert not rotation_multiset_cancels([0, 2, 2], 4)
    assert not rotation_multiset_cancels([0, 0, 2], 4)
    # sanity: accepted multisets really do sum to zero numerically
    for nums, L in [([0, 2], 4), ([1, 3], 4), ([0, 1, 2], 3), ([0, 3], 6)]:
        total = sum(np.exp(2j * np.pi * k / L) for k in nums)
        assert abs(total) < 1e-12
