import random
from collections import defaultdict
from math import gcd

import gmpy2
import pytest

from arion.field import BLS12, BN254
from arion.lab import lab_params
from arion.params import ArionParameters

CRITERIA = {
    1: "permutation round trip and bijectivity",
    2: "addition chains",
    3: "affine layer and MDS",
    4: "CCZ graph relation",
    5: "R1CS counts, builder and witness",
    6: "Plonk counts and deviation flags",
    7: "security estimators",
    8: "quotient space dimensions",
    9: "density experiment",
    10: "sponge padding and Merkle",
}

_outcomes: dict[int, list[str]] = defaultdict(list)


def pytest_runtest_logreport(report):
    marks = getattr(report, "_criteria", None)
    if not marks:
        return
    if report.when == "call" or report.outcome != "passed":
        for n in marks:
            _outcomes[n].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep._criteria = [m.args[0] for m in item.iter_markers("acceptance")]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        elif all(r == "passed" for r in results):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {n:2d} {status:7s} {title}")


# --- shared fixtures -----------------------------------------------------------------

def prime_with_d1_3(bits: int = 254) -> int:
    """Smallest prime above 2**bits with gcd(3, p-1) = gcd(257, p-1) = 1, so d1 = 3 is minimal."""
    q = gmpy2.next_prime(gmpy2.mpz(2) ** bits)
    while gcd(3, int(q) - 1) != 1 or gcd(257, int(q) - 1) != 1:
        q = gmpy2.next_prime(q)
    return int(q)


@pytest.fixture(scope="session")
def p_d1_3() -> int:
    return prime_with_d1_3()


@pytest.fixture(scope="session")
def bn254_n3() -> ArionParameters:
    return ArionParameters.generate(BN254, 3)


@pytest.fixture(scope="session")
def bls12_n3() -> ArionParameters:
    return ArionParameters.generate(BLS12, 3)


@pytest.fixture(scope="session")
def small_n2() -> ArionParameters:
    return lab_params(11, 2, 3, 3, r=2)


@pytest.fixture(scope="session")
def small_n3() -> ArionParameters:
    return lab_params(11, 3, 3, 3, r=2)


@pytest.fixture
def rng():
    return random.Random(20231018)
