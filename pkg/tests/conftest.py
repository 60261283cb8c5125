from __future__ import annotations

import pytest

from ffvar.arith import SieveCache, sieve_irreducibles
from ffvar.fields import FieldSpec, make_field


@pytest.fixture(scope="session")
def f2() -> FieldSpec:
    return make_field(2)


@pytest.fixture(scope="session")
def f3() -> FieldSpec:
    return make_field(3)


@pytest.fixture(scope="session")
def f4() -> FieldSpec:
    return make_field(2, 2)


@pytest.fixture(scope="session")
def sieve_dir(tmp_path_factory):
    # one shared directory so the sieve files are built once per session
    return tmp_path_factory.mktemp("sieve")


@pytest.fixture(scope="session")
def cache2(f2, sieve_dir) -> SieveCache:
    return sieve_irreducibles(f2, 10, cache_dir=sieve_dir)


@pytest.fixture(scope="session")
def cache3(f3, sieve_dir) -> SieveCache:
    return sieve_irreducibles(f3, 8, cache_dir=sieve_dir)
