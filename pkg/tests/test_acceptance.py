"""Exit criteria: one test per criterion, each printing a single pass/fail line."""
import time

import pytest

import conftest
from wradius import acceptance
from wradius.acceptance import AcceptanceConfig, CriterionResult

pytestmark = pytest.mark.acceptance

CFG = AcceptanceConfig()
COMPUTED = [c.number for c in acceptance.CRITERIA if c.number != 12]
_RESULTS = {}


def result(number: int) -> CriterionResult:
    if number not in _RESULTS:
        _RESULTS[number] = acceptance.run_one(number, CFG)
    return _RESULTS[number]


def emit(r: CriterionResult) -> None:
    line = r.line()
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.mark.parametrize("number", COMPUTED)
def test_criterion(number):
    r = result(number)
    emit(r)
    assert r.ok, r.line()


def test_criterion_12_determinism():
    """A second full run of criteria 1-11 must serialize to the same bytes as the first."""
    first = [result(n) for n in COMPUTED]
    t0 = time.perf_counter()
    second = acceptance.run(CFG, COMPUTED, timed=False)
    a, b = acceptance.report_bytes(first, CFG), acceptance.report_bytes(second, CFG)
    same = a == b
    detail = (f"two full runs of criteria 1-11 with seed {CFG.seed}: "
              f"{'byte-identical' if same else 'DIFFER'} ({len(a)} bytes)")
    r = CriterionResult(12, acceptance.criterion(12).name, same, detail,
                        runtime=time.perf_counter() - t0)
    emit(r)
    assert r.ok, r.line()
