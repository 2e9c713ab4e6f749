from fractions import Fraction

import pytest

from stratcat.poset_core import FinitePoset, IncreasingSequence

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def F(x) -> Fraction:
    return Fraction(x)


def chain(k: int, prefix: str = "a") -> FinitePoset:
    return FinitePoset.chain([f"{prefix}{j}" for j in range(k)])


def seq(A: FinitePoset, *entries) -> IncreasingSequence:
    return IncreasingSequence(A, tuple(entries))


@pytest.fixture
def chain3():
    return FinitePoset.chain(["a", "b", "c"])


@pytest.fixture
def chain4():
    return chain(4)
