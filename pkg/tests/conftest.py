import pytest

from ornstein.certsearch import certify
from ornstein.indexcore import DerivativeSystem, corollary_system
from ornstein.witness import WitnessParams, build_family


@pytest.fixture(scope="session")
def sys2():
    return corollary_system()


@pytest.fixture(scope="session")
def cert2(sys2):
    return certify(sys2)


@pytest.fixture(scope="session")
def odd_system():
    # Lambda=(1,2) pairs every index to 4; |alpha_1| - |beta| = 1
    return DerivativeSystem.build([(4, 0), (0, 2)], (2, 1))


def family(sys, cert, n, variant="T2", mode="native", base=None):
    return build_family(WitnessParams(sys, cert, n, variant, mode, base))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[num])
