"""Finite fields F_q with q = p^k small enough for table-driven arithmetic.

Elements are encoded as integers in [0, q): the base-p digits of the code are
the coordinates in the power basis 1, t, ..., t^(k-1) of F_p[t]/(modulus).
For k = 1 the code is just the residue mod p. All arithmetic goes through
precomputed q-by-q tables, exposed both as read-only numpy arrays (for bulk
work) and as nested tuples (cheaper for scalar work).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import PreconditionError

MAX_FIELD_SIZE = 16


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# -- F_p[x] helpers on plain coefficient tuples, only used to build extensions


def _fp_trim(c: tuple[int, ...]) -> tuple[int, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return c[:i]


def _fp_mul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _fp_trim(tuple(out))


def _fp_mod(a: tuple[int, ...], m: tuple[int, ...], p: int) -> tuple[int, ...]:
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _fp_trim(tuple(a))


def _fp_is_irreducible(f: tuple[int, ...], p: int) -> bool:
    # monic f of degree >= 1; trial division by all monic g with
    # 1 <= deg g <= deg f / 2
    df = len(f) - 1
    for dg in range(1, df // 2 + 1):
        for u in range(p**dg):
            g = tuple((u // p**i) % p for i in range(dg)) + (1,)
            if not _fp_mod(f, g, p):
                return False
    return True


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    # lexicographic scan: constant term varies fastest, i.e. ascending mantissa
    for u in range(p**k):
        f = tuple((u // p**i) % p for i in range(k)) + (1,)
        if _fp_is_irreducible(f, p):
            return f
    raise AssertionError("no irreducible found; unreachable for prime p")


@dataclass(frozen=True)
class FieldSpec:
    """A concrete F_q with lookup tables for all four operations."""

    p: int
    k: int
    q: int
    # modulus coefficients over F_p, ascending, monic; None when k == 1
    modulus: tuple[int, ...] | None
    add_table: np.ndarray = field(compare=False, repr=False)
    mul_table: np.ndarray = field(compare=False, repr=False)
    neg_table: np.ndarray = field(compare=False, repr=False)
    inv_table: np.ndarray = field(compare=False, repr=False)
    add_rows: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)
    mul_rows: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)

    def add(self, a: int, b: int) -> int:
        return self.add_rows[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_rows[a][self.neg(b)]

    def mul(self, a: int, b: int) -> int:
        return self.mul_rows[a][b]

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def element_pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def __str__(self) -> str:
        return f"F_{self.q}" if self.k == 1 else f"F_{self.q}=F_{self.p}^{self.k}"


def _ext_code_mul(a: int, b: int, p: int, k: int, mod: tuple[int, ...]) -> int:
    ca = tuple((a // p**i) % p for i in range(k))
    cb = tuple((b // p**i) % p for i in range(k))
    prod = _fp_mod(_fp_mul(ca, cb, p), mod, p)
    return sum(c * p**i for i, c in enumerate(prod))


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1, *, max_size: int = MAX_FIELD_SIZE) -> FieldSpec:
    """Build F_{p^k}. For k > 1 the modulus is the lexicographically smallest
    monic irreducible of degree k over F_p (constant term compared first)."""
    if not _is_prime(p):
        raise PreconditionError(f"p = {p} is not prime")
    if k < 1:
        raise PreconditionError(f"k = {k} must be >= 1")
    q = p**k
    if q > max_size:
        raise PreconditionError(f"q = {q} exceeds the size limit {max_size}")

    if k == 1:
        modulus = None
        add = [[(a + b) % p for b in range(q)] for a in range(q)]
        mul = [[(a * b) % p for b in range(q)] for a in range(q)]
    else:
        modulus = _smallest_irreducible(p, k)
        add = [
            [
                sum((((a // p**i) % p + (b // p**i) % p) % p) * p**i for i in range(k))
                for b in range(q)
            ]
            for a in range(q)
        ]
        mul = [[_ext_code_mul(a, b, p, k, modulus) for b in range(q)] for a in range(q)]

    neg = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
    inv = [0] + [next(b for b in range(1, q) if mul[a][b] == 1) for a in range(1, q)]

    add_np = np.array(add, dtype=np.uint8)
    mul_np = np.array(mul, dtype=np.uint8)
    neg_np = np.array(neg, dtype=np.uint8)
    inv_np = np.array(inv, dtype=np.uint8)
    for arr in (add_np, mul_np, neg_np, inv_np):
        arr.flags.writeable = False

    return FieldSpec(
        p=p,
        k=k,
        q=q,
        modulus=modulus,
        add_table=add_np,
        mul_table=mul_np,
        neg_table=neg_np,
        inv_table=inv_np,
        add_rows=tuple(tuple(row) for row in add),
        mul_rows=tuple(tuple(row) for row in mul),
    )


def verify_field_axioms(fld: FieldSpec) -> None:
    """Exhaustively check the field axioms on the tables. Raises on the first
    violation; intended for q <= 16 where the cubic loops are trivial."""
    q = fld.q
    rng = range(q)
    for a in rng:
        if fld.add(a, 0) != a or fld.mul(a, 1) != a:
            raise AssertionError(f"identity fails at {a}")
        if fld.add(a, fld.neg(a)) != 0:
            raise AssertionError(f"negation fails at {a}")
        if a and fld.mul(a, fld.inv(a)) != 1:
            raise AssertionError(f"inverse fails at {a}")
    for a in rng:
        for b in rng:
            if fld.add(a, b) != fld.add(b, a) or fld.mul(a, b) != fld.mul(b, a):
                raise AssertionError(f"commutativity fails at ({a}, {b})")
    for a in rng:
        for b in rng:
            for c in rng:
                if fld.add(fld.add(a, b), c) != fld.add(a, fld.add(b, c)):
                    raise AssertionError(f"additive associativity fails at ({a},{b},{c})")
                if fld.mul(fld.mul(a, b), c) != fld.mul(a, fld.mul(b, c)):
                    raise AssertionError(f"multiplicative associativity fails at ({a},{b},{c})")
                if fld.mul(a, fld.add(b, c)) != fld.add(fld.mul(a, b), fld.mul(a, c)):
                    raise AssertionError(f"distributivity fails at ({a},{b},{c})")
