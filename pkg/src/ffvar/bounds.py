"""Empirical monitors for the inequality layer: the character-sum mean value
theorem, prime and von Mangoldt character sums, the large-prime-factor and
smooth-factor square sums, and the headline variance ratio.

Two report classes, never mixed: hard-pass checks whose constant is fully
justified (the mean value theorem with its explicit 2*Phi(Q)*(q^(n-deg Q)+1),
the von Mangoldt sum against deg(Q)*q^(N/2)) carry a pass/fail verdict;
everything whose sharp constant is unspecified is observe-only and reports a
finite ratio without asserting a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import PreconditionError
from .fields import FieldSpec
from .polys import DEFAULT_ENUM_BUDGET, Poly, t_power
from .characters import unit_group_basis
from .tables import get_tables, reduce_monic_mod
from .variance import variance_direct

MVT_SLACK = 1e-9


@dataclass
class BoundReport:
    bound: str
    params: dict[str, object]
    lhs: float
    rhs: float
    hard: bool
    passed: bool | None
    extras: dict[str, float] = dc_field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    def summary(self) -> str:
        verdict = {True: "pass", False: "FAIL", None: "observe"}[self.passed]
        ps = " ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.bound} [{verdict}] {ps} lhs={self.lhs:.6g} rhs={self.rhs:.6g} ratio={self.ratio:.6g}"


@dataclass(frozen=True)
class TrialConfig:
    """Deterministic random-trial settings: same seed, same draws."""

    seed: int = 0
    trials: int = 100
    distribution: str = "signs"  # "signs" (+-1) or "phases" (unit modulus)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise PreconditionError("trial count must be >= 1")
        if self.distribution not in ("signs", "phases"):
            raise PreconditionError(f"unknown distribution {self.distribution!r}")


def _monic_unit_indices(field: FieldSpec, modulus: Poly, n: int):
    """(unit index or -1) for every monic of degree n, plus the basis."""
    basis = unit_group_basis(field, modulus)
    q = field.q
    codes = reduce_monic_mod(field, modulus, n, np.arange(q**n, dtype=np.int64))
    return basis, basis.code_to_index[codes]


def mvt_check(
    field: FieldSpec, modulus: Poly, n: int, coeffs: np.ndarray
) -> BoundReport:
    """One instance of the mean value theorem: coeffs is a complex vector
    indexed by the mantissas of monic degree-n polynomials."""
    q = field.q
    if len(coeffs) != q**n:
        raise PreconditionError(f"need q^n = {q**n} coefficients, got {len(coeffs)}")
    basis, idx = _monic_unit_indices(field, modulus, n)
    mask = idx >= 0
    folded = np.zeros(basis.phi, dtype=np.complex128)
    np.add.at(folded, idx[mask], np.asarray(coeffs, dtype=np.complex128)[mask])
    V = basis.value_matrix("all")
    sums = V @ folded
    lhs = float(np.sum(sums.real**2 + sums.imag**2))
    diag = float(np.sum(np.abs(np.asarray(coeffs)[mask]) ** 2))
    m = modulus.degree
    scale = q ** (n - m) if n >= m else 1.0 / q ** (m - n)
    rhs = 2.0 * basis.phi * (scale + 1.0) * diag
    report = BoundReport(
        bound="mvt",
        params={"q": q, "Q": str(modulus), "n": n},
        lhs=lhs,
        rhs=rhs,
        hard=True,
        passed=None,
    )
    report.passed = report.ratio <= 1.0 + MVT_SLACK
    return report


def mvt_trial(
    field: FieldSpec,
    modulus: Poly,
    n: int,
    cfg: TrialConfig,
    *,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Iterator[BoundReport]:
    """Seeded random coefficient draws; every report must pass."""
    q = field.q
    if q**n > budget:
        raise PreconditionError(f"q^n = {q**n} exceeds budget {budget}")
    rng = np.random.default_rng(cfg.seed)
    size = q**n
    for trial in range(cfg.trials):
        if cfg.distribution == "signs":
            coeffs = (rng.integers(0, 2, size=size) * 2 - 1).astype(np.complex128)
        else:
            coeffs = np.exp(2j * np.pi * rng.random(size))
        report = mvt_check(field, modulus, n, coeffs)
        report.params.update(trial=trial, seed=cfg.seed, distribution=cfg.distribution)
        yield report


def prime_char_sum_ratio(field: FieldSpec, m: int, x: int) -> BoundReport:
    """Max over non-principal chi mod t^m of |sum over irreducible P of
    degree x of chi(P)|, against ((N-h)/x) q^(x/2) with m standing in for
    N-h. Observe-only (no stated constant)."""
    if m < 2:
        raise PreconditionError("need m >= 2 so non-principal characters exist")
    if x < 1:
        raise PreconditionError("need x >= 1")
    q = field.q
    tables = get_tables(field, x)
    basis = unit_group_basis(field, t_power(field, m))
    codes = reduce_monic_mod(field, t_power(field, m), x, tables.irreducibles[x])
    idx = basis.code_to_index[codes]
    counts = np.bincount(idx[idx >= 0], minlength=basis.phi).astype(np.complex128)
    V = basis.value_matrix("all")
    sums = V[1:] @ counts
    lhs = float(np.max(np.abs(sums))) if len(sums) else 0.0
    rhs = (m / x) * q ** (x / 2)
    return BoundReport(
        bound="prime_char_sum",
        params={"q": q, "m": m, "x": x},
        lhs=lhs,
        rhs=rhs,
        hard=False,
        passed=None,
    )


def von_mangoldt_char_sum_ratio(field: FieldSpec, modulus: Poly, n_total: int) -> BoundReport:
    """Max over non-principal chi mod Q of |sum_{G in M_N} Lambda(G) chi(G)|
    against deg(Q) * q^(N/2). Hard pass: the Riemann-hypothesis bound for
    these L-functions carries constant deg(Q) - 1."""
    if n_total < 1:
        raise PreconditionError("need N >= 1")
    basis = unit_group_basis(field, modulus)
    if basis.phi < 2:
        raise PreconditionError(f"modulus {modulus} admits no non-principal character")
    q = field.q
    tables = get_tables(field, n_total)
    L = basis.exponent
    roots = np.exp(2j * np.pi * np.arange(L) / L)
    from .characters import character_rotation_matrix, enumerate_characters

    R = character_rotation_matrix(basis, enumerate_characters(basis))
    totals = np.zeros(basis.phi, dtype=np.complex128)
    for d in range(1, n_total + 1):
        if n_total % d:
            continue
        k = n_total // d
        codes = reduce_monic_mod(field, modulus, d, tables.irreducibles[d])
        idx = basis.code_to_index[codes]
        counts = np.bincount(idx[idx >= 0], minlength=basis.phi).astype(np.float64)
        # chi(P)^k: rotate each entry k times
        values = roots[(R * k) % L]
        totals += d * (values @ counts)
    lhs = float(np.max(np.abs(totals[1:])))
    rhs = modulus.degree * q ** (n_total / 2)
    report = BoundReport(
        bound="von_mangoldt_char_sum",
        params={"q": q, "Q": str(modulus), "N": n_total},
        lhs=lhs,
        rhs=rhs,
        hard=True,
        passed=None,
    )
    report.passed = report.ratio <= 1.0
    return report


def _masked_even_square_sum(
    field: FieldSpec, n_total: int, n: int, h: int, keep_smooth: bool
) -> float:
    """Sum over even chi mod t^(N-h) of |sum_{G in M_n, smoothness-filtered}
    lambda(G) chi(G)|^2."""
    q = field.q
    modulus = t_power(field, n_total - h)
    basis = unit_group_basis(field, modulus)
    tables = get_tables(field, max(n, n_total))
    lam = tables.liouville_values(n).astype(np.int64)
    smooth = tables.max_factor_degree[n] <= h
    lam = np.where(smooth if keep_smooth else ~smooth, lam, 0)
    codes = reduce_monic_mod(field, modulus, n, np.arange(q**n, dtype=np.int64))
    weights = np.zeros(q ** modulus.degree, dtype=np.int64)
    np.add.at(weights, codes, lam)
    V = basis.value_matrix("even")
    sums = V @ weights[basis.unit_codes].astype(np.complex128)
    return float(np.sum(sums.real**2 + sums.imag**2))


def _check_window_params(n_total: int, n: int, h: int) -> None:
    if not 1 <= h <= n_total - 2:
        raise PreconditionError(f"need 1 <= h <= N-2; got h={h}, N={n_total}")
    if not 0 <= n <= n_total:
        raise PreconditionError(f"need 0 <= n <= N; got n={n}, N={n_total}")


def large_factor_sum_ratio(field: FieldSpec, n_total: int, n: int, h: int) -> BoundReport:
    """Square sum over even characters of the non-h-smooth Liouville block,
    against the proof-form bound (N^3/h^2) q^(N+n-h); the statement-form
    bound (n-h)(N/h)^2 q^(N+n-h) rides along in extras. Observe-only."""
    _check_window_params(n_total, n, h)
    q = field.q
    lhs = _masked_even_square_sum(field, n_total, n, h, keep_smooth=False)
    rhs = (n_total**3 / h**2) * float(q) ** (n_total + n - h)
    extras = {}
    stmt = (n - h) * (n_total / h) ** 2 * float(q) ** (n_total + n - h)
    if stmt > 0:
        extras["statement_rhs"] = stmt
        extras["statement_ratio"] = lhs / stmt
    return BoundReport(
        bound="large_factor_sum",
        params={"q": q, "N": n_total, "n": n, "h": h},
        lhs=lhs,
        rhs=rhs,
        hard=False,
        passed=None,
        extras=extras,
    )


def smooth_sum_ratio(field: FieldSpec, n_total: int, n: int, h: int) -> BoundReport:
    """Square sum over even characters of the h-smooth Liouville block,
    against q^(n+N-h) + q^(2(N-h)). Observe-only."""
    _check_window_params(n_total, n, h)
    q = field.q
    lhs = _masked_even_square_sum(field, n_total, n, h, keep_smooth=True)
    rhs = float(q) ** (n + n_total - h) + float(q) ** (2 * (n_total - h))
    return BoundReport(
        bound="smooth_sum",
        params={"q": q, "N": n_total, "n": n, "h": h},
        lhs=lhs,
        rhs=rhs,
        hard=False,
        passed=None,
    )


def theorem_ratio_sweep(
    field: FieldSpec,
    n_values: Sequence[int],
    h_rule: Callable[[int], Iterable[int]],
    *,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Iterator[BoundReport]:
    """Var_direct(liouville) * h^2 / (N^5 q^h) over a grid; h = 0 rows are
    rejected (the monitored bound divides by h)."""
    q = field.q
    for n_total in n_values:
        for h in h_rule(n_total):
            if h < 1:
                raise PreconditionError("theorem ratio needs h >= 1")
            if not h < n_total:
                raise PreconditionError(f"need h < N; got h={h}, N={n_total}")
            var = variance_direct(field, "liouville", n_total, h, budget=budget)
            rhs = (n_total**5 / h**2) * float(q) ** h
            yield BoundReport(
                bound="theorem_ratio",
                params={"q": q, "N": n_total, "h": h},
                lhs=float(var),
                rhs=rhs,
                hard=False,
                passed=None,
            )
