"""Factorization over F_q[t] and the classical multiplicative functions.

All functions are defined on nonzero polynomials via the monic associate, so
liouville(c*F) == liouville(F) for any unit c. Factorization is trial
division against a cached table of irreducibles; the cache can be persisted
in a small line-oriented text format (FFSIEVE) so repeated runs skip the
sieve.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import IrreducibleCacheError, PreconditionError
from .fields import FieldSpec
from .polys import Poly, monic_index, one
from .tables import DEFAULT_TABLE_BUDGET, get_tables

log = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SieveCache:
    """Complete ascending lists of monic irreducibles per degree."""

    field: FieldSpec
    max_degree: int
    by_degree: tuple[tuple[Poly, ...], ...]  # index d; [0] is empty

    def degree(self, d: int) -> tuple[Poly, ...]:
        if not 1 <= d <= self.max_degree:
            raise PreconditionError(f"degree {d} outside cache range 1..{self.max_degree}")
        return self.by_degree[d]

    def count(self, d: int) -> int:
        return len(self.degree(d))


def cache_file_name(field: FieldSpec) -> str:
    if field.modulus is None:
        return f"ffsieve_p{field.p}_k{field.k}.txt"
    digits = "".join(str(c) for c in field.modulus)
    return f"ffsieve_p{field.p}_k{field.k}_m{digits}.txt"


def _modulus_header(field: FieldSpec) -> str:
    if field.modulus is None:
        return "-"
    return ",".join(str(c) for c in field.modulus)


def write_cache(cache: SieveCache, path: Path | str) -> None:
    path = Path(path)
    total = sum(len(lst) for lst in cache.by_degree)
    lines = [
        f"FFSIEVE {CACHE_FORMAT_VERSION} p={cache.field.p} k={cache.field.k} "
        f"mod={_modulus_header(cache.field)} maxdeg={cache.max_degree} count={total}"
    ]
    for d in range(1, cache.max_degree + 1):
        for poly in cache.by_degree[d]:
            coeffs = [poly.coeff(j) for j in range(d + 1)]
            lines.append(" ".join([str(d)] + [str(c) for c in coeffs]))
    lines.append(f"END {total}")
    path.write_text("\n".join(lines) + "\n")


def load_cache(field: FieldSpec, path: Path | str) -> SieveCache:
    """Parse an FFSIEVE file. Raises IrreducibleCacheError on any structural
    problem (the caller decides whether to fall back to recomputation)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IrreducibleCacheError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise IrreducibleCacheError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 7 or head[0] != "FFSIEVE":
        raise IrreducibleCacheError(f"{path}: bad header {lines[0]!r}")
    if head[1] != str(CACHE_FORMAT_VERSION):
        raise IrreducibleCacheError(f"{path}: unsupported version {head[1]}")
    fields = dict(part.split("=", 1) for part in head[2:])
    if fields.get("p") != str(field.p) or fields.get("k") != str(field.k):
        raise IrreducibleCacheError(f"{path}: header is for F_{fields.get('p')}^{fields.get('k')}")
    if fields.get("mod") != _modulus_header(field):
        raise IrreducibleCacheError(f"{path}: modulus mismatch")
    try:
        max_degree = int(fields["maxdeg"])
        count = int(fields["count"])
    except (KeyError, ValueError) as exc:
        raise IrreducibleCacheError(f"{path}: bad header numbers") from exc

    if lines[-1].split() != ["END", str(count)]:
        raise IrreducibleCacheError(f"{path}: missing or inconsistent END line")
    body = lines[1:-1]
    if len(body) != count:
        raise IrreducibleCacheError(f"{path}: {len(body)} entries, header says {count}")

    by_degree: list[list[Poly]] = [[] for _ in range(max_degree + 1)]
    prev_key: tuple[int, int] | None = None
    for lineno, line in enumerate(body, start=2):
        toks = line.split()
        try:
            d = int(toks[0])
            coeffs = [int(t) for t in toks[1:]]
        except ValueError as exc:
            raise IrreducibleCacheError(f"{path}:{lineno}: unparsable entry") from exc
        if not 1 <= d <= max_degree:
            raise IrreducibleCacheError(f"{path}:{lineno}: degree {d} out of range")
        if len(coeffs) != d + 1:
            raise IrreducibleCacheError(f"{path}:{lineno}: wrong coefficient count")
        if any(not 0 <= c < field.q for c in coeffs):
            raise IrreducibleCacheError(f"{path}:{lineno}: coefficient code out of range")
        if coeffs[-1] != 1:
            raise IrreducibleCacheError(f"{path}:{lineno}: entry is not monic")
        poly = Poly(field, tuple(coeffs))
        key = (d, monic_index(poly))
        if prev_key is not None and key <= prev_key:
            raise IrreducibleCacheError(f"{path}:{lineno}: entries out of order")
        prev_key = key
        by_degree[d].append(poly)
    return SieveCache(field=field, max_degree=max_degree, by_degree=tuple(tuple(lst) for lst in by_degree))


def sieve_irreducibles(
    field: FieldSpec,
    max_degree: int,
    *,
    cache_dir: Path | str | None = None,
    budget: int = DEFAULT_TABLE_BUDGET,
) -> SieveCache:
    """Complete irreducible lists up to max_degree, optionally persisted.

    A readable cache file that covers the requested range is trusted after
    structural validation; a corrupt or short file is reported and replaced
    by a fresh sieve.
    """
    if max_degree < 1:
        raise PreconditionError("max_degree must be >= 1")
    path = Path(cache_dir) / cache_file_name(field) if cache_dir is not None else None
    if path is not None and path.exists():
        try:
            cached = load_cache(field, path)
            if cached.max_degree >= max_degree:
                return cached
            log.info("cache %s only covers degree %d, resieving", path, cached.max_degree)
        except IrreducibleCacheError as exc:
            log.warning("discarding corrupt sieve cache: %s", exc)
    tables = get_tables(field, max_degree, budget=budget)
    by_degree: list[tuple[Poly, ...]] = [()]
    for d in range(1, max_degree + 1):
        by_degree.append(tuple(tables.irreducible_polys(d)))
    cache = SieveCache(field=field, max_degree=max_degree, by_degree=tuple(by_degree))
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_cache(cache, path)
    return cache


# -- factorization


@dataclass(frozen=True)
class Factorization:
    """unit * prod(P_i^e_i) with factors ascending by (degree, mantissa)."""

    unit: int
    factors: tuple[tuple[Poly, int], ...]

    def __iter__(self):
        return iter(self.factors)

    def product(self, field: FieldSpec) -> Poly:
        out = one(field).scale(self.unit)
        for p, e in self.factors:
            out = out * p**e
        return out


def factor(f: Poly, cache: SieveCache) -> Factorization:
    if f.is_zero:
        raise PreconditionError("cannot factor the zero polynomial")
    unit = f.lead
    g = f.monic()
    n = g.degree
    if n == 0:
        return Factorization(unit=unit, factors=())
    if cache.max_degree < n // 2:
        raise PreconditionError(
            f"cache depth {cache.max_degree} insufficient for degree {n} (needs {n // 2})"
        )
    factors: list[tuple[Poly, int]] = []
    for d in range(1, n // 2 + 1):
        if g.degree < 2 * d:
            break
        for p in cache.by_degree[d]:
            e = 0
            q, r = divmod(g, p)
            while r.is_zero:
                g = q
                e += 1
                q, r = divmod(g, p)
            if e:
                factors.append((p, e))
            if g.degree < 2 * d:
                break
    if g.degree >= 1:
        # residual cofactor has no factor of degree <= n//2, hence irreducible
        factors.append((g, 1))
    return Factorization(unit=unit, factors=tuple(factors))


class FactorIndex:
    """Memoized factorizations, keyed by monic associate."""

    def __init__(self, field: FieldSpec, cache: SieveCache):
        self.field = field
        self.cache = cache
        self._memo: dict[tuple[int, int], tuple[tuple[Poly, int], ...]] = {}

    def factor(self, f: Poly) -> Factorization:
        if f.is_zero:
            raise PreconditionError("cannot factor the zero polynomial")
        g = f.monic()
        key = (g.degree, monic_index(g))
        got = self._memo.get(key)
        if got is None:
            got = factor(g, self.cache).factors
            self._memo[key] = got
        return Factorization(unit=f.lead, factors=got)


# -- classical functions on nonzero F (through the monic associate)


def big_omega(f: Poly, cache: SieveCache) -> int:
    return sum(e for _, e in factor(f, cache))


def omega(f: Poly, cache: SieveCache) -> int:
    return len(factor(f, cache).factors)


def liouville(f: Poly, cache: SieveCache) -> int:
    return -1 if big_omega(f, cache) & 1 else 1


def moebius(f: Poly, cache: SieveCache) -> int:
    fac = factor(f, cache)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac.factors) & 1 else 1


def euler_phi(f: Poly, cache: SieveCache) -> int:
    """Order of the unit group of F_q[t]/(f)."""
    q = f.field.q
    out = 1
    for p, e in factor(f, cache):
        d = p.degree
        out *= (q**d - 1) * q ** (d * (e - 1))
    return out


def von_mangoldt(f: Poly, cache: SieveCache) -> int:
    fac = factor(f, cache).factors
    if len(fac) == 1:
        return fac[0][0].degree
    return 0


def omega_in_window(f: Poly, lo: int, hi: int, cache: SieveCache) -> int:
    """Distinct irreducible factors with lo < deg P <= hi."""
    return sum(1 for p, _ in factor(f, cache) if lo < p.degree <= hi)


def is_smooth(f: Poly, h: int, cache: SieveCache) -> bool:
    """Every irreducible factor has degree <= h; constants are smooth."""
    if h < 0:
        raise PreconditionError("smoothness bound must be >= 0")
    fac = factor(f, cache).factors
    return all(p.degree <= h for p, _ in fac)


# -- counting


def integer_moebius(n: int) -> int:
    if n < 1:
        raise PreconditionError("integer moebius needs n >= 1")
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    if n > 1:
        out = -out
    return out


def pi_q(field: FieldSpec, n: int) -> int:
    """Number of monic irreducibles of degree n (necklace formula)."""
    if n < 1:
        raise PreconditionError("pi_q needs n >= 1")
    q = field.q
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += integer_moebius(d) * q ** (n // d)
    assert total % n == 0
    return total // n


def liouville_full_sum(field: FieldSpec, n: int, *, budget: int = DEFAULT_TABLE_BUDGET) -> int:
    """Sum of the Liouville function over all monic polynomials of degree n."""
    if n < 0:
        raise PreconditionError("degree must be >= 0")
    tables = get_tables(field, n, budget=budget)
    return int(tables.liouville_values(n).sum(dtype=np.int64))


def count_smooth_exact(field: FieldSpec, h: int, n: int) -> int:
    """Exact count of h-smooth monic polynomials of degree n, via the
    generating function prod_{d<=h} (1-x^d)^(-pi_q(d)). Pure integers."""
    if n < 0:
        raise PreconditionError("degree must be >= 0")
    if h < 1:
        raise PreconditionError("smoothness bound must be >= 1")
    coeffs = [0] * (n + 1)
    coeffs[0] = 1
    for d in range(1, min(h, n) + 1):
        r = pi_q(field, d)
        # multiply by (1-x^d)^(-r): coefficient of x^(d*j) is C(r-1+j, j)
        nxt = [0] * (n + 1)
        for i in range(n + 1):
            acc = 0
            j = 0
            while d * j <= i:
                acc += math.comb(r - 1 + j, j) * coeffs[i - d * j]
                j += 1
            nxt[i] = acc
        coeffs = nxt
    return coeffs[n]


def smooth_asymptotic_ratio(field: FieldSpec, h: int, n: int) -> tuple[float, float]:
    """(count / (q^n * exp(-u log u)) with u = n/h, count / q^(n-h)).

    The first ratio is exactly 1.0 at h = n; both stay finite on any grid
    with h >= 1.
    """
    if h < 1 or n < 1:
        raise PreconditionError("need h >= 1 and n >= 1")
    count = count_smooth_exact(field, h, n)
    q = field.q
    u = n / h
    main = count * math.exp(u * math.log(u)) / q**n
    crude = float(Fraction(count, q ** max(n - h, 0)))
    return main, crude
