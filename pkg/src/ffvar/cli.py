"""Command-line front end: variance runs, verification suites, parameter
sweeps, and sieve-cache management.

Exit codes are the machine contract: 0 ok, 1 check failure or corrupt cache,
2 precondition violation, 3 variance gap beyond tolerance, 4 budget refusal.
Identical configurations (including seeds) produce byte-identical CSV/JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import arith, bounds, characters, variance
from .errors import BudgetError, IrreducibleCacheError, PreconditionError
from .fields import FieldSpec, make_field, verify_field_axioms
from .polys import (
    DEFAULT_ENUM_BUDGET,
    Poly,
    enumerate_monic,
    from_coeffs,
    monic_from_index,
    monic_index,
    star,
    t_power,
)
from .tables import get_tables

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PRECONDITION = 2
EXIT_GAP = 3
EXIT_BUDGET = 4

RNG_DESCRIPTION = "numpy-default-rng"


@dataclass
class RunConfig:
    p: int = 2
    k: int = 1
    n_values: tuple[int, ...] = ()
    h_values: tuple[int, ...] = ()
    function: str = "liouville"
    mode: str = "both"  # direct | character | both
    seed: int = 0
    trials: int = 100
    threads: int = 1
    cache_dir: str | None = None
    out: str | None = None
    fmt: str = "csv"
    tolerance: float = 1e-6
    budget: int = DEFAULT_ENUM_BUDGET
    n_max: int = 6
    suite: str | None = None
    self_test_fault: bool = False
    max_degree: int = 8
    check: bool = False

    def field(self) -> FieldSpec:
        return make_field(self.p, self.k)


def _parse_range(text: str) -> tuple[int, ...]:
    """'3' -> (3,); '3:8' -> (3,...,8) inclusive."""
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = int(lo_s), int(hi_s)
        return tuple(range(lo, hi + 1))
    return (int(text),)


def _fmt_number(x: Fraction | float | int | None) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else repr(float(x))
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _json_number(x: Fraction | float | int | None):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def _emit(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _rows_to_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt_number(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _rows_to_json(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    objs = []
    for row in rows:
        objs.append(
            {
                key: (v if isinstance(v, str) else _json_number(v))
                for key, v in zip(header, row)
            }
        )
    return json.dumps(objs, indent=2) + "\n"


VARIANCE_HEADER = (
    "q",
    "N",
    "h",
    "function",
    "variance_direct",
    "variance_char",
    "abs_gap",
    "theorem_ratio",
)


def cmd_variance(cfg: RunConfig) -> int:
    try:
        fld = cfg.field()
        if not cfg.n_values or not cfg.h_values:
            raise PreconditionError("variance needs --N and --h")
        if cfg.mode not in ("direct", "character", "both"):
            raise PreconditionError(f"unknown mode {cfg.mode!r}")
        if cfg.tolerance <= 0:
            raise PreconditionError("tolerance must be > 0")
        handle = variance.get_function(cfg.function)
        room = 2 if cfg.mode == "character" else 1
        pairs = [
            (n, h)
            for n in cfg.n_values
            for h in cfg.h_values
            if 0 <= h <= n - room
        ]
        if not pairs:
            need = "0 <= h <= N-2" if cfg.mode == "character" else "0 <= h < N"
            raise PreconditionError(f"no feasible (N, h) pairs in the grid (need {need})")

        def one(pair: tuple[int, int]):
            n, h = pair
            direct = charside = None
            if cfg.mode in ("direct", "both"):
                direct = variance.variance_direct(fld, handle, n, h, budget=cfg.budget)
            if cfg.mode in ("character", "both") and h <= n - 2:
                charside = variance.variance_charside(fld, handle, n, h, budget=cfg.budget)
            return variance.VarianceReport(
                q=fld.q, n=n, h=h, function=handle.name, direct=direct, charside=charside
            )

        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                reports = list(pool.map(one, pairs))
        else:
            reports = [one(p) for p in pairs]

        rows = []
        worst_gap: tuple[float, variance.VarianceReport] | None = None
        for rep in reports:
            gap = rep.abs_gap
            if gap is not None and (worst_gap is None or gap > worst_gap[0]):
                worst_gap = (gap, rep)
            rows.append(
                (
                    rep.q,
                    rep.n,
                    rep.h,
                    rep.function,
                    rep.direct,
                    rep.charside,
                    gap,
                    rep.theorem_ratio,
                )
            )
        text = (
            _rows_to_csv(VARIANCE_HEADER, rows)
            if cfg.fmt == "csv"
            else _rows_to_json(VARIANCE_HEADER, rows)
        )
        _emit(cfg.out, text)
        if cfg.mode == "both":
            for rep in reports:
                gap = rep.abs_gap
                if gap is None:
                    continue
                scale = max(1.0, abs(float(rep.direct)))
                if gap > cfg.tolerance * scale:
                    print(
                        f"gap failure: q={rep.q} N={rep.n} h={rep.h} f={rep.function} "
                        f"direct={float(rep.direct)!r} char={rep.charside!r} gap={gap!r}",
                        file=sys.stderr,
                    )
                    return EXIT_GAP
        return EXIT_OK
    except BudgetError as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


SWEEP_HEADER = (
    "q",
    "N",
    "h",
    "var_direct",
    "var_char",
    "bound_n5",
    "ratio",
    "largepf_ratio",
    "smoothpf_ratio",
)


def cmd_sweep(cfg: RunConfig) -> int:
    try:
        fld = cfg.field()
        pairs = [
            (n, h) for n in sorted(cfg.n_values) for h in sorted(cfg.h_values) if h < n
        ]
        if not pairs:
            raise PreconditionError("empty sweep grid")
        if any(h < 1 for _, h in pairs):
            raise PreconditionError("sweep grid needs h >= 1")

        def one(pair: tuple[int, int]):
            n, h = pair
            tables = get_tables(fld, n, budget=cfg.budget)
            var = variance.variance_direct(fld, "liouville", n, h, budget=cfg.budget, tables=tables)
            bound = (n**5 / h**2) * float(fld.q) ** h
            ratio = float(var) / bound
            var_char = largepf = smoothpf = None
            if h <= n - 2:
                var_char = variance.variance_charside(
                    fld, "liouville", n, h, budget=cfg.budget, tables=tables
                )
                largepf = bounds.large_factor_sum_ratio(fld, n, n, h).ratio
                smoothpf = bounds.smooth_sum_ratio(fld, n, n, h).ratio
            return (fld.q, n, h, var, var_char, bound, ratio, largepf, smoothpf)

        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                rows = list(pool.map(one, pairs))
        else:
            rows = [one(p) for p in pairs]
        text = (
            _rows_to_csv(SWEEP_HEADER, rows)
            if cfg.fmt == "csv"
            else _rows_to_json(SWEEP_HEADER, rows)
        )
        _emit(cfg.out, text)
        best = max(rows, key=lambda r: r[6])
        where = f"(q={best[0]}, N={best[1]}, h={best[2]})"
        print(
            f"sweep: {len(rows)} rows"
            + (f" -> {cfg.out}" if cfg.out else "")
            + f"; max theorem ratio {best[6]!r} at {where}",
            file=sys.stderr if cfg.out is None else sys.stdout,
        )
        return EXIT_OK
    except BudgetError as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def cmd_cache(cfg: RunConfig) -> int:
    try:
        fld = cfg.field()
        cache_dir = cfg.cache_dir or os.environ.get("FFVAR_CACHE_DIR") or "."
        path = Path(cache_dir) / arith.cache_file_name(fld)
        if cfg.check:
            cache = arith.load_cache(fld, path)
            for d in range(1, cache.max_degree + 1):
                expected = arith.pi_q(fld, d)
                got = len(cache.by_degree[d])
                if got != expected:
                    print(
                        f"count mismatch at degree {d}: file has {got}, "
                        f"necklace formula gives {expected}",
                        file=sys.stderr,
                    )
                    return EXIT_FAILURE
            print(f"{path}: ok ({sum(len(x) for x in cache.by_degree)} irreducibles)")
            return EXIT_OK
        cache = arith.sieve_irreducibles(
            fld, cfg.max_degree, cache_dir=cache_dir, budget=cfg.budget
        )
        total = sum(len(x) for x in cache.by_degree)
        print(f"{path}: {total} irreducibles up to degree {cache.max_degree}")
        return EXIT_OK
    except IrreducibleCacheError as exc:
        print(f"corrupt cache: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except BudgetError as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


# -- verification suites


def _suite_fields(cfg: RunConfig, fld: FieldSpec):
    qs = sorted({fld.q, 2, 3, 4})
    for q in qs:
        p, k = (q, 1) if q != 4 else (2, 2)
        verify_field_axioms(make_field(p, k))
    return f"axioms hold for q in {qs}"


def _suite_involution(cfg: RunConfig, fld: FieldSpec):
    max_deg = min(cfg.n_max, 8)
    tables = get_tables(fld, max_deg)
    q = fld.q
    checked = 0
    for n in range(0, max_deg + 1):
        lam = tables.liouville_values(n)
        for u in range(q**n):
            if u % q == 0 and n > 0:
                continue  # F(0) = 0: star is not an involution there
            for c in range(1, q):
                f = monic_from_index(fld, n, u).scale(c)
                g = star(f)
                if star(g) != f:
                    raise AssertionError(f"star(star(F)) != F at F = {f}")
                if n > 0:
                    lam_f = int(lam[u])
                    gm = g.monic()
                    lam_g = int(tables.liouville_values(gm.degree)[monic_index(gm)])
                    if lam_f != lam_g:
                        raise AssertionError(f"lambda not star-symmetric at F = {f}")
                checked += 1
    rng = np.random.default_rng(cfg.seed)
    pairs = 2000
    for _ in range(pairs):
        a = _random_nonzero(fld, rng, cfg.n_max)
        b = _random_nonzero(fld, rng, cfg.n_max)
        if star(a * b) != star(a) * star(b):
            raise AssertionError(f"star not multiplicative at ({a}, {b})")
    return f"involution/symmetry on {checked} polynomials + {pairs} random products"


def _random_nonzero(fld: FieldSpec, rng, max_deg: int) -> Poly:
    while True:
        deg = int(rng.integers(0, max_deg + 1))
        coeffs = tuple(int(rng.integers(0, fld.q)) for _ in range(deg + 1))
        f = Poly(fld, coeffs)
        if not f.is_zero:
            return f


def _suite_fullsum(cfg: RunConfig, fld: FieldSpec):
    q = fld.q
    n_hi = min(cfg.n_max + 2, {2: 16, 3: 10}.get(q, 8))
    for n in range(0, n_hi + 1):
        got = arith.liouville_full_sum(fld, n)
        if cfg.self_test_fault and n == n_hi:
            culprit = monic_from_index(fld, n, q**n - 1)
            lam = int(get_tables(fld, n).liouville_values(n)[q**n - 1])
            got -= 2 * lam  # injected fault: one lambda value flipped
            expected = (-1) ** n * q ** ((n + 1) // 2)
            if got != expected:
                raise AssertionError(
                    f"full sum q={q} n={n}: got {got}, expected {expected} "
                    f"(injected fault at G = {culprit})"
                )
        expected = (-1) ** n * q ** ((n + 1) // 2)
        if got != expected:
            raise AssertionError(f"full sum q={q} n={n}: got {got}, expected {expected}")
    return f"closed form matches for q={q}, n <= {n_hi}"


def _suite_necklace(cfg: RunConfig, fld: FieldSpec):
    cache = arith.sieve_irreducibles(fld, min(cfg.n_max + 2, 10), cache_dir=cfg.cache_dir)
    for d in range(1, cache.max_degree + 1):
        if len(cache.by_degree[d]) != arith.pi_q(fld, d):
            raise AssertionError(
                f"pi_q mismatch at q={fld.q}, degree {d}: sieve {len(cache.by_degree[d])}"
            )
    return f"sieve counts equal necklace formula up to degree {cache.max_degree}"


def _suite_smooth(cfg: RunConfig, fld: FieldSpec):
    n_hi = min(cfg.n_max, 7)
    cache = arith.sieve_irreducibles(fld, n_hi)
    for n in range(1, n_hi + 1):
        for h in range(1, n + 1):
            brute = sum(
                1 for g in enumerate_monic(fld, n) if arith.is_smooth(g, h, cache)
            )
            dp = arith.count_smooth_exact(fld, h, n)
            if brute != dp:
                raise AssertionError(
                    f"smooth count mismatch q={fld.q} h={h} N={n}: dp {dp}, brute {brute}"
                )
            main, crude = arith.smooth_asymptotic_ratio(fld, h, n)
            if not (np.isfinite(main) and np.isfinite(crude)):
                raise AssertionError(f"non-finite smooth ratio at q={fld.q} h={h} N={n}")
            if h == n and main != 1.0:
                raise AssertionError(f"h=N ratio must be exactly 1, got {main!r}")
    return f"DP equals enumeration for q={fld.q}, N <= {n_hi}, all h"


def _suite_orthogonality(cfg: RunConfig, fld: FieldSpec):
    qs = sorted({fld.q, 2, 3, 4})
    checked = 0
    for q in qs:
        p, k = (q, 1) if q != 4 else (2, 2)
        f = make_field(p, k)
        for m in range(1, 5):
            basis = characters.unit_group_basis(f, t_power(f, m))
            if basis.phi != q ** (m - 1) * (q - 1):
                raise AssertionError(f"phi(t^{m}) wrong for q={q}")
            if characters.count_even(basis) != q ** (m - 1):
                raise AssertionError(f"even count wrong for q={q}, m={m}")
            R = characters.character_rotation_matrix(
                basis, characters.enumerate_characters(basis)
            )
            for i in range(basis.phi):
                cancels = characters.rotation_multiset_cancels(R[i], basis.exponent)
                if cancels != (i != 0):
                    raise AssertionError(
                        f"character orthogonality broken at q={q}, m={m}, index {i}"
                    )
                checked += 1
    return f"exact cancellation for {checked} characters, q in {qs}"


def _suite_ramare(cfg: RunConfig, fld: FieldSpec):
    from .errors import SmoothWindowError

    n_hi = min(cfg.n_max, 8)
    cache = arith.sieve_irreducibles(fld, n_hi)
    checked = 0
    for n in range(2, n_hi + 1):
        for h in range(1, n):
            for g in enumerate_monic(fld, n):
                try:
                    defect = variance.ramare_identity_check(fld, g, h, n, cache=cache)
                except SmoothWindowError:
                    continue
                if defect != 0:
                    raise AssertionError(
                        f"recombination defect {defect} at q={fld.q} G={g} h={h} n={n}"
                    )
                checked += 1
    return f"defect 0 on {checked} (G, h) cases, n <= {n_hi}"


def _suite_decomposition(cfg: RunConfig, fld: FieldSpec):
    n_hi = min(cfg.n_max, 8 if fld.q == 2 else 6)
    cache = arith.sieve_irreducibles(fld, n_hi)
    for n in range(2, n_hi + 1):
        for h in range(1, n):
            worst = variance.decomposition_check(fld, n, h, cache=cache)
            if worst != 0:
                raise AssertionError(
                    f"decomposition defect {worst} at q={fld.q} n={n} h={h}"
                )
    return f"max defect 0 for q={fld.q}, n <= {n_hi}, all h"


def _suite_mvt(cfg: RunConfig, fld: FieldSpec):
    moduli = [
        t_power(fld, 2),
        t_power(fld, 3),
        t_power(fld, 4),
        from_coeffs(fld, (1, 1, 1)),
        from_coeffs(fld, (0, 1)) * from_coeffs(fld, (1, 1)) ** 2,
    ]
    per = max(1, cfg.trials // len(moduli))
    count = 0
    worst = 0.0
    for i, modulus in enumerate(moduli):
        n = min(cfg.n_max + 2, 8)
        trial_cfg = bounds.TrialConfig(
            seed=cfg.seed + i, trials=per, distribution="signs" if i % 2 == 0 else "phases"
        )
        for rep in bounds.mvt_trial(fld, modulus, n, trial_cfg):
            if not rep.passed:
                raise AssertionError("mean value theorem violated: " + rep.summary())
            worst = max(worst, rep.ratio)
            count += 1
    return (
        f"{count} trials pass (max ratio {worst:.4f}; rng={RNG_DESCRIPTION} "
        f"seed={cfg.seed})"
    )


SUITES: dict[str, Callable[[RunConfig, FieldSpec], str]] = {
    "fields": _suite_fields,
    "involution": _suite_involution,
    "fullsum": _suite_fullsum,
    "necklace": _suite_necklace,
    "smooth": _suite_smooth,
    "orthogonality": _suite_orthogonality,
    "ramare": _suite_ramare,
    "decomposition": _suite_decomposition,
    "mvt": _suite_mvt,
}

# suites that already span several q internally; run once, not per field
_GLOBAL_SUITES = {"fields", "orthogonality"}


def cmd_verify(cfg: RunConfig) -> int:
    try:
        if cfg.suite is not None and cfg.suite not in SUITES:
            raise PreconditionError(
                f"unknown suite {cfg.suite!r}; choose from {sorted(SUITES)}"
            )
        fields = [cfg.field()] if (cfg.p, cfg.k) != (2, 1) or cfg.suite else None
        if fields is None:
            fields = [make_field(2, 1), make_field(3, 1)]
        names = [cfg.suite] if cfg.suite else list(SUITES)
        failures = 0
        for name in names:
            fn = SUITES[name]
            targets = fields[:1] if name in _GLOBAL_SUITES else fields
            for fld in targets:
                label = f"{name}[q={fld.q}]" if name not in _GLOBAL_SUITES else name
                try:
                    detail = fn(cfg, fld)
                    print(f"PASS {label}: {detail}")
                except AssertionError as exc:
                    print(f"FAIL {label}: {exc}")
                    failures += 1
        return EXIT_FAILURE if failures else EXIT_OK
    except BudgetError as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffvar",
        description="Variance of the Liouville function in short intervals of F_q[t]",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_field_args(sp):
        sp.add_argument("--p", type=int, default=2, help="field characteristic")
        sp.add_argument("--k", type=int, default=1, help="extension degree (q = p^k)")

    sp = sub.add_parser("variance", help="compute interval variance one or both ways")
    add_field_args(sp)
    sp.add_argument("--N", required=True, help="degree or inclusive range a:b")
    sp.add_argument("--h", required=True, help="interval parameter or range a:b")
    sp.add_argument("--function", default="liouville", choices=sorted(variance.FUNCTIONS))
    sp.add_argument("--mode", default="both", choices=["direct", "character", "both"])
    sp.add_argument("--tolerance", type=float, default=1e-6)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", dest="fmt", default="csv", choices=["csv", "json"])
    sp.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("verify", help="run the exact-identity verification suites")
    add_field_args(sp)
    sp.add_argument("--suite", default=None, help="run a single suite by name")
    sp.add_argument("--n-max", dest="n_max", type=int, default=6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--cache-dir", dest="cache_dir", default=None)
    sp.add_argument(
        "--self-test-fault",
        action="store_true",
        help="inject one flipped lambda value to prove the harness can fail",
    )

    sp = sub.add_parser("sweep", help="theorem-ratio sweep over an (N, h) grid")
    add_field_args(sp)
    sp.add_argument("--N", required=True, help="degree range a:b")
    sp.add_argument("--h", required=True, help="interval range a:b (h >= 1)")
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", dest="fmt", default="csv", choices=["csv", "json"])
    sp.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("cache", help="build or validate the irreducible sieve file")
    add_field_args(sp)
    sp.add_argument("--maxdeg", dest="max_degree", type=int, default=8)
    sp.add_argument("--cache-dir", dest="cache_dir", default=None)
    sp.add_argument("--check", action="store_true", help="validate counts against pi_q")
    sp.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    for name in vars(cfg):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "N", None) is not None:
        cfg.n_values = _parse_range(args.N)
    if getattr(args, "h", None) is not None:
        cfg.h_values = _parse_range(args.h)
    if cfg.cache_dir is None:
        cfg.cache_dir = os.environ.get("FFVAR_CACHE_DIR")
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        print(f"precondition: bad range syntax ({exc})", file=sys.stderr)
        return EXIT_PRECONDITION
    commands = {
        "variance": cmd_variance,
        "verify": cmd_verify,
        "sweep": cmd_sweep,
        "cache": cmd_cache,
    }
    return commands[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
