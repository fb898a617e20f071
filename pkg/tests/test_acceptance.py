"""Every acceptance criterion at its time limit, one line of output per criterion."""

import time

import pytest

from gcompact.acceptance import CRITERIA, run_acceptance, run_criterion
from gcompact.reports import dumps

LINES: list[str] = []


def record(line: str) -> None:
    LINES.append(line)
    print(line)


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"{c.number}-{c.name.replace(' ', '-')}")
def test_criterion(criterion):
    start = time.perf_counter()
    row = run_criterion(criterion, seed=0)
    elapsed = time.perf_counter() - start
    in_time = elapsed <= criterion.seconds
    ok = row["passed"] and in_time
    record(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion.number}: {criterion.name} "
           f"({elapsed:.2f}s, limit {criterion.seconds:g}s)")
    assert row["passed"], row["details"]
    assert in_time, f"took {elapsed:.2f}s, limit {criterion.seconds}s"


def test_determinism():
    # the full suite reruns its matrix and compares the dumps itself
    full = run_acceptance("all", seed=0)
    rerun = next(r for r in full["results"]["criteria"] if r["criterion"] == 11)
    a = dumps(run_acceptance("circular", seed=0))
    b = dumps(run_acceptance("circular", seed=0))
    same = rerun["passed"] and a == b
    record(f"[{'PASS' if same else 'FAIL'}] criterion 11: determinism (byte-identical reruns)")
    assert full["passed"]
    assert same


def test_term_count_variant_is_reported():
    row = run_criterion(next(c for c in CRITERIA if c.number == 8))
    laws = [r["accumulatingLaw"] for r in row["details"]["recursion"]]
    assert laws == [3, 11, 4083]
    assert [r["law"] for r in row["details"]["recursion"]] == [3, 11, 4075]
