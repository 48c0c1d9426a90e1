import pytest

from funceq.expansion import build_expansion
from funceq.oracle import exact_coefficients
from funceq.problem import ProblemSpec, two_three_tree_spec
from funceq.spectrum import compute_spectrum


@pytest.fixture(scope="session")
def tree23():
    return two_three_tree_spec()


@pytest.fixture(scope="session")
def square():
    return ProblemSpec.build([0, 1], [0, 0, 1], bracket=(0.5, 1.5))


@pytest.fixture(scope="session", params=["tree23", "square"])
def any_spec(request, tree23, square):
    return {"tree23": tree23, "square": square}[request.param]


@pytest.fixture(scope="session")
def spectrum23(tree23):
    return compute_spectrum(tree23, y=2.0, N=4096, M=10)


@pytest.fixture(scope="session")
def expansion23(tree23, spectrum23):
    return build_expansion(tree23, spectrum23, R=3)


@pytest.fixture(scope="session")
def exact23_10k(tree23):
    return exact_coefficients(tree23, 10000)


_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
