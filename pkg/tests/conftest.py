import sys

import pytest

from qldpc_lab import PauliOperator, StabilizerCode, hypergraph_product, repetition_code


@pytest.fixture(scope="session")
def code13():
    return hypergraph_product(repetition_code(3))


@pytest.fixture(scope="session")
def bitflip():
    gens = [PauliOperator.from_string("ZZI"), PauliOperator.from_string("IZZ")]
    return StabilizerCode(3, gens, name="bitflip3")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    log = getattr(mod, "LOG", None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(log):
        ok, detail = log[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
