"""Variance of arithmetic functions over short intervals, two ways.

A short interval around a monic G_0 of degree N keeps all coefficients above
degree h fixed, so intervals are the fibers of mantissa // q^(h+1). The
direct route enumerates all q^N polynomials, accumulates interval sums, and
returns the exact rational

    Var = q^(h+1) / q^N * sum_I S_I^2.

The character route never touches intervals: it averages |U(chi)|^2 over the
even characters mod t^(N-h), where

    U(chi) = sum_{v=0}^{N} f(t^v) * sum_{G monic, deg G = N-v} f(G) chi(G),

and divides by the square of the number of even characters. For symmetric
multiplicative f (Liouville, Moebius, the constant 1) the two routes agree
exactly; the valuation v of each block enters through f(t^v), pairing the
t-power part split off by the coefficient-reversal involution with the
coprime-to-t part seen by the characters.

Also here: the Ramare-style recombination identity and the window
decomposition of Liouville into large-prime and squarefull parts, both
checked in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import FactorIndex, SieveCache
from .errors import BudgetError, PreconditionError, SmoothWindowError
from .fields import FieldSpec
from .polys import DEFAULT_ENUM_BUDGET, Poly, monic_from_index, t_power
from .characters import DirichletChar, even_characters, unit_group_basis
from .tables import ArithTables, get_tables, mul_monic_batch, reduce_monic_mod


@dataclass(frozen=True)
class ArithmeticFunctionHandle:
    """A symmetric (star-invariant away from t), completely or squarefree
    multiplicative function with values in {-1, 0, 1}."""

    name: str

    def degree_values(self, tables: ArithTables, n: int) -> np.ndarray:
        """Values over all monic of degree n, mantissa-indexed, int8."""
        if self.name == "liouville":
            return tables.liouville_values(n)
        if self.name == "moebius":
            return tables.moebius_values(n)
        return np.ones(tables.field.q**n, dtype=np.int8)

    def t_power_value(self, v: int) -> int:
        if self.name == "liouville":
            return -1 if v & 1 else 1
        if self.name == "moebius":
            return (1, -1, 0)[min(v, 2)]
        return 1

    def pointwise(self, f: Poly, cache: SieveCache) -> int:
        from . import arith

        if self.name == "liouville":
            return arith.liouville(f, cache)
        if self.name == "moebius":
            return arith.moebius(f, cache)
        return 1


FUNCTIONS = {
    name: ArithmeticFunctionHandle(name) for name in ("liouville", "moebius", "unit")
}


def get_function(name: str) -> ArithmeticFunctionHandle:
    try:
        return FUNCTIONS[name]
    except KeyError:
        raise PreconditionError(
            f"unknown function {name!r}; choose from {sorted(FUNCTIONS)}"
        ) from None


def _as_handle(f: ArithmeticFunctionHandle | str) -> ArithmeticFunctionHandle:
    return f if isinstance(f, ArithmeticFunctionHandle) else get_function(f)


def interval_sums(
    field: FieldSpec,
    f: ArithmeticFunctionHandle | str,
    n: int,
    h: int,
    *,
    splits: int = 1,
    budget: int = DEFAULT_ENUM_BUDGET,
    tables: ArithTables | None = None,
) -> np.ndarray:
    """S_I for every interval I, indexed by packed upper coefficients.

    `splits` chops the mantissa range into that many chunks accumulated
    separately; integer addition makes the result identical for any split
    count, which the tests pin down.
    """
    f = _as_handle(f)
    if not 0 <= h < n:
        raise PreconditionError(f"need 0 <= h < n; got h={h}, n={n}")
    q = field.q
    if q**n > budget:
        raise BudgetError(f"q^n = {q**n} exceeds budget {budget}")
    if splits < 1:
        raise PreconditionError("splits must be >= 1")
    if tables is None:
        tables = get_tables(field, n)
    values = f.degree_values(tables, n).astype(np.int64)
    block = q ** (h + 1)
    acc = np.zeros(q ** (n - h - 1), dtype=np.int64)
    bounds = np.linspace(0, q**n, splits + 1, dtype=np.int64)
    for lo, hi in zip(bounds, bounds[1:]):
        if hi > lo:
            keys = np.arange(lo, hi, dtype=np.int64) // block
            np.add.at(acc, keys, values[lo:hi])
    return acc


def variance_direct(
    field: FieldSpec,
    f: ArithmeticFunctionHandle | str,
    n: int,
    h: int,
    *,
    splits: int = 1,
    budget: int = DEFAULT_ENUM_BUDGET,
    tables: ArithTables | None = None,
) -> Fraction:
    """Exact mean square of interval sums: (q^(h+1)/q^n) * sum_I S_I^2."""
    q = field.q
    acc = interval_sums(field, f, n, h, splits=splits, budget=budget, tables=tables)
    ssq = int(acc @ acc)
    return Fraction(q ** (h + 1) * ssq, q**n)


def _residue_weight_vector(
    field: FieldSpec,
    f: ArithmeticFunctionHandle,
    modulus: Poly,
    n_total: int,
    tables: ArithTables,
) -> np.ndarray:
    """W[r] = sum over v of f(t^v) * sum_{G in M_(n_total-v), G = r mod Q} f(G),
    as int64 over all q^deg(Q) residue codes."""
    q = field.q
    m = modulus.degree
    weights = np.zeros(q**m, dtype=np.int64)
    for v in range(n_total + 1):
        wt = f.t_power_value(v)
        if wt == 0:
            continue
        n = n_total - v
        vals = f.degree_values(tables, n).astype(np.int64)
        codes = reduce_monic_mod(field, modulus, n, np.arange(q**n, dtype=np.int64))
        np.add.at(weights, codes, wt * vals)
    return weights


def weighted_char_sum(
    field: FieldSpec,
    f: ArithmeticFunctionHandle | str,
    chi: DirichletChar,
    n_total: int,
    *,
    budget: int = DEFAULT_ENUM_BUDGET,
    tables: ArithTables | None = None,
) -> complex:
    """U(chi) = sum_v f(t^v) * sum_{G in M_(n_total - v)} f(G) chi(G)."""
    f = _as_handle(f)
    if n_total < 0:
        raise PreconditionError("total degree must be >= 0")
    q = field.q
    if q ** (n_total + 1) > budget:
        raise BudgetError(f"enumeration of ~q^{n_total + 1} terms exceeds budget {budget}")
    basis = chi.basis
    if basis.field != field:
        raise PreconditionError("character modulus lives over a different field")
    if tables is None:
        tables = get_tables(field, n_total)
    weights = _residue_weight_vector(field, f, basis.modulus, n_total, tables)
    L = basis.exponent
    roots = np.exp(2j * np.pi * np.arange(L) / L)
    scaled = basis.scaled_exponents(chi.exponents)
    if len(scaled):
        rot = (basis.dlog_matrix @ scaled) % L
    else:
        rot = np.zeros(basis.phi, dtype=np.int64)
    values = roots[rot]
    return complex(values @ weights[basis.unit_codes].astype(np.complex128))


def variance_charside(
    field: FieldSpec,
    f: ArithmeticFunctionHandle | str,
    n: int,
    h: int,
    *,
    budget: int = DEFAULT_ENUM_BUDGET,
    tables: ArithTables | None = None,
) -> float:
    """Average of |U(chi)|^2 over even chi mod t^(n-h), divided by the
    number of even characters; agrees with variance_direct for the symmetric
    multiplicative functions handled here."""
    f = _as_handle(f)
    if not 0 <= h <= n - 2:
        raise PreconditionError(f"need 0 <= h <= n-2; got h={h}, n={n}")
    q = field.q
    if q**n > budget:
        raise BudgetError(f"q^n = {q**n} exceeds budget {budget}")
    if tables is None:
        tables = get_tables(field, n)
    modulus = t_power(field, n - h)
    basis = unit_group_basis(field, modulus)
    weights = _residue_weight_vector(field, f, modulus, n, tables)
    V = basis.value_matrix("even")
    sums = V @ weights[basis.unit_codes].astype(np.complex128)
    phi_even = V.shape[0]
    return float(np.sum(sums.real**2 + sums.imag**2)) / phi_even**2


@dataclass(frozen=True)
class VarianceReport:
    q: int
    n: int
    h: int
    function: str
    direct: Fraction | None
    charside: float | None

    @property
    def abs_gap(self) -> float | None:
        if self.direct is None or self.charside is None:
            return None
        return abs(float(self.direct) - self.charside)

    @property
    def theorem_ratio(self) -> float | None:
        """Var * h^2 / (N^5 * q^h); the bound being monitored says this
        stays O(1) for Liouville, h >= 1."""
        if self.direct is None or self.h < 1:
            return None
        return float(self.direct * self.h**2 / (self.n**5 * Fraction(self.q) ** self.h))


def variance_report(
    field: FieldSpec,
    f: ArithmeticFunctionHandle | str,
    n: int,
    h: int,
    *,
    budget: int = DEFAULT_ENUM_BUDGET,
    with_charside: bool = True,
) -> VarianceReport:
    f = _as_handle(f)
    tables = get_tables(field, n)
    direct = variance_direct(field, f, n, h, budget=budget, tables=tables)
    charside = None
    if with_charside and h <= n - 2:
        charside = variance_charside(field, f, n, h, budget=budget, tables=tables)
    return VarianceReport(
        q=field.q, n=n, h=h, function=f.name, direct=direct, charside=charside
    )


# -- identity checks (exact rationals; defects must be literally zero)


def ramare_identity_check(
    field: FieldSpec, g: Poly, h: int, n: int, *, cache: SieveCache
) -> Fraction:
    """Defect of the recombination identity for one G: sum over window
    primes P | G of lambda(P * (G/P)) / omega_window(P * (G/P)) minus
    lambda(G), where the numerator data is recomputed from the cofactor's
    factorization exactly as the decomposition does it."""
    if not g.is_monic:
        raise PreconditionError("G must be monic")
    if g.degree != n:
        raise PreconditionError(f"deg G = {g.degree} but n = {n}")
    if not 1 <= h < n:
        raise PreconditionError(f"need 1 <= h < n; got h={h}, n={n}")
    idx = FactorIndex(field, cache)
    fac = idx.factor(g).factors
    window = [(p, e) for p, e in fac if h < p.degree <= n]
    if not window:
        raise SmoothWindowError(f"{g} has no prime factor of degree in ({h}, {n}]")
    lam_g = -1 if sum(e for _, e in fac) & 1 else 1
    total = Fraction(0)
    for p, e in window:
        cofactor = g // p
        cfac = idx.factor(cofactor).factors
        lam_c = -1 if sum(ce for _, ce in cfac) & 1 else 1
        omega_c = sum(1 for cp, _ in cfac if h < cp.degree <= n)
        divides = any(cp == p for cp, _ in cfac)
        omega_full = omega_c + (0 if divides else 1)
        total += Fraction(-lam_c, omega_full)
    return total - lam_g


def decomposition_check(
    field: FieldSpec,
    n: int,
    h: int,
    *,
    cache: SieveCache,
    tables: ArithTables | None = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Fraction:
    """Max abs defect over all monic G of degree n of the window
    decomposition: the (prime x cofactor) double sum with weights

        a(M)    = -lambda(M) / (omega_w(M) + 1)        at G = P * M
        b(P*M') = -lambda(P*M') / (w * (w + 1)),  w = omega_w(P*M'),
                                                       at G = P^2 * M'

    summed over window primes P (degree in (h, n]) must reproduce
    lambda(G) * [G is not h-smooth] exactly."""
    if not 1 <= h < n:
        raise PreconditionError(f"need 1 <= h < n; got h={h}, n={n}")
    q = field.q
    if q**n > budget:
        raise BudgetError(f"q^n = {q**n} exceeds budget {budget}")
    if tables is None:
        tables = get_tables(field, n)
    idx = FactorIndex(field, cache)

    def window_omega(f: Poly) -> int:
        return sum(1 for p, _ in idx.factor(f).factors if h < p.degree <= n)

    weights: dict[int, Fraction] = {}
    for x in range(h + 1, n + 1):
        for p in tables.irreducible_polys(x):
            md = n - x
            codes = mul_monic_batch(
                field, p.coeffs, md, np.arange(q**md, dtype=np.int64)
            )
            lam = tables.liouville_values(md)
            for u in range(q**md):
                m_poly = monic_from_index(field, md, u)
                a = Fraction(-int(lam[u]), window_omega(m_poly) + 1)
                g_code = int(codes[u])
                weights[g_code] = weights.get(g_code, Fraction(0)) + a
            if 2 * x <= n:
                md2 = n - 2 * x
                p2 = (p * p).coeffs
                codes2 = mul_monic_batch(
                    field, p2, md2, np.arange(q**md2, dtype=np.int64)
                )
                for u in range(q**md2):
                    m2 = monic_from_index(field, md2, u)
                    pm = p * m2
                    w = window_omega(pm)
                    lam_pm = -1 if sum(e for _, e in idx.factor(pm).factors) & 1 else 1
                    b = Fraction(-lam_pm, w * (w + 1))
                    g_code = int(codes2[u])
                    weights[g_code] = weights.get(g_code, Fraction(0)) + b

    lam_n = tables.liouville_values(n)
    rough = tables.max_factor_degree[n] > h
    worst = Fraction(0)
    for u in range(q**n):
        expected = Fraction(int(lam_n[u])) if rough[u] else Fraction(0)
        defect = abs(weights.get(u, Fraction(0)) - expected)
        if defect > worst:
            worst = defect
    return worst

