from __future__ import annotations

import numpy as np
import pytest

from ffvar.arith import pi_q
from ffvar.errors import BudgetError
from ffvar.fields import make_field
from ffvar.polys import Poly, enumerate_monic, from_coeffs, monic_from_index, t_power
from ffvar.tables import (
    build_tables,
    get_tables,
    monic_digit_matrix,
    mul_monic_batch,
    reduce_monic_mod,
)

# -- independent oracle: factor everything by naive trial division ------------
#
# Completely separate route from the sieve: a monic polynomial is divided by
# every smaller monic polynomial in ascending (degree, mantissa) order, so the
# divisors found are automatically irreducible.


def _brute_factor(f: Poly) -> list[Poly]:
    fld = f.field
    out: list[Poly] = []
    rest = f
    d = 1
    while rest.degree >= 1:
        if d > rest.degree // 2:
            out.append(rest)
            break
        hit = False
        for g in enumerate_monic(fld, d):
            q, r = divmod(rest, g)
            if r.is_zero:
                out.append(g)
                rest = q
                hit = True
                break
        if not hit:
            d += 1
    return out


@pytest.mark.parametrize("q,max_deg", [(2, 6), (3, 5)])
def test_sieve_tables_match_trial_division(q, max_deg):
    fld = make_field(q)
    tab = build_tables(fld, max_deg)
    for n in range(1, max_deg + 1):
        lam = tab.liouville_values(n)
        mu = tab.moebius_values(n)
        for u in range(q**n):
            f = monic_from_index(fld, n, u)
            primes = _brute_factor(f)
            omega = len(primes)
            sqfree = len(set(p.coeffs for p in primes)) == omega
            mfd = max(p.degree for p in primes)
            assert tab.big_omega[n][u] == omega
            assert bool(tab.squarefree[n][u]) == sqfree
            assert tab.max_factor_degree[n][u] == mfd
            assert lam[u] == (-1) ** omega
            assert mu[u] == ((-1) ** omega if sqfree else 0)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_sieve_irreducible_counts_match_necklace_formula(q):
    fld = make_field(2, 2) if q == 4 else make_field(q)
    tab = build_tables(fld, 6)
    for n in range(1, 7):
        assert len(tab.irreducibles[n]) == pi_q(fld, n)


def test_irreducible_polys_are_irreducible(f3):
    tab = build_tables(f3, 4)
    for n in range(1, 5):
        for p in tab.irreducible_polys(n):
            assert p.is_monic and p.degree == n
            assert len(_brute_factor(p)) == 1


def test_liouville_column_sums_match_zeta_identity(f2, f3):
    # sum over monic degree-n of lambda is (-1)^n q^ceil(n/2)
    for fld, deg in ((f2, 10), (f3, 7)):
        tab = build_tables(fld, deg)
        for n in range(1, deg + 1):
            total = int(tab.liouville_values(n).sum())
            assert total == (-1) ** n * fld.q ** ((n + 1) // 2)


def test_moebius_column_sums_vanish(f2, f3):
    # 1/zeta = 1 - q x: degree-1 sum is -q, all higher degrees cancel exactly
    for fld in (f2, f3):
        tab = build_tables(fld, 6)
        assert int(tab.moebius_values(1).sum()) == -fld.q
        for n in range(2, 7):
            assert int(tab.moebius_values(n).sum()) == 0


# -- batched monic multiplication ---------------------------------------------


def test_monic_digit_matrix_round_trip(f3):
    us = np.arange(f3.q**3, dtype=np.int64)
    digits = monic_digit_matrix(f3, 3, us)
    assert digits.shape == (27, 4)
    assert (digits[:, -1] == 1).all()
    # row u holds the base-q digits of u plus the leading 1
    recoded = (digits[:, :-1] * f3.q ** np.arange(3)).sum(axis=1)
    assert (recoded == us).all()


@pytest.mark.parametrize("q", [2, 3])
def test_mul_monic_batch_matches_poly_product(q):
    fld = make_field(q)
    rng = np.random.default_rng(7)
    for _ in range(40):
        dp = int(rng.integers(1, 4))
        dm = int(rng.integers(0, 4))
        p = monic_from_index(fld, dp, int(rng.integers(0, q**dp)))
        us = np.arange(q**dm, dtype=np.int64)
        codes = mul_monic_batch(fld, p.coeffs, dm, us)
        for u in us:
            expected = p * monic_from_index(fld, dm, int(u))
            assert int(codes[u]) == sum(
                c * q**j for j, c in enumerate(expected.coeffs[:-1])
            )


# -- modular reduction ---------------------------------------------------------


def _residue_code(f: Poly, q: int) -> int:
    return sum(c * q**j for j, c in enumerate(f.coeffs))


@pytest.mark.parametrize("q", [2, 3])
def test_reduce_monic_mod_t_power(q):
    fld = make_field(q)
    for m in (1, 2, 3):
        modulus = t_power(fld, m)
        for n in range(1, 6):
            us = np.arange(q**n, dtype=np.int64)
            got = reduce_monic_mod(fld, modulus, n, us)
            for u in us:
                f = monic_from_index(fld, n, int(u))
                assert int(got[u]) == _residue_code(f % modulus, q)


def test_reduce_monic_mod_general_modulus(f2, f3):
    cases = [
        (f2, from_coeffs(f2, [1, 1, 1])),
        (f2, from_coeffs(f2, [0, 1, 0, 1])),  # t^3 + t = t(t+1)^2
        (f3, from_coeffs(f3, [1, 0, 1])),
        (f3, from_coeffs(f3, [0, 2, 1])),
    ]
    for fld, modulus in cases:
        q = fld.q
        for n in range(1, 6):
            us = np.arange(q**n, dtype=np.int64)
            got = reduce_monic_mod(fld, modulus, n, us)
            for u in us:
                f = monic_from_index(fld, n, int(u))
                assert int(got[u]) == _residue_code(f % modulus, q)


# -- caching -------------------------------------------------------------------


def test_get_tables_reuses_and_extends(f2):
    a = get_tables(f2, 5)
    b = get_tables(f2, 4)
    assert b is a  # shallower request served from the same build
    c = get_tables(f2, max(6, a.max_degree + 1))
    assert c.max_degree >= 6
    assert len(c.irreducibles[1]) == 2


def test_build_tables_budget(f2):
    with pytest.raises(BudgetError):
        build_tables(f2, 30, budget=1 << 10)
