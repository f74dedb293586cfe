import json

import numpy as np
import pytest

from polydist.matpoly import MatrixPolynomial, WeightSet

QUAD_COEFFS = [np.diag([2.0, 0.0, 2.0]), np.diag([-3.0, -1.0, 3.0]), np.eye(3)]


@pytest.fixture
def quad():
    return MatrixPolynomial(QUAD_COEFFS)


@pytest.fixture
def quad_weights():
    return WeightSet((1, 1, 1))


def problem_data(coeffs, mu, **extra):
    n = coeffs[0].shape[0]
    data = {
        "n": n,
        "m": len(coeffs) - 1,
        "coefficients": [
            [[[float(np.real(x)), float(np.imag(x))] for x in row] for row in np.asarray(a)]
            for a in coeffs
        ],
        "mu": [float(np.real(mu)), float(np.imag(mu))],
    }
    data.update(extra)
    return data


@pytest.fixture
def quad_problem(tmp_path):
    path = tmp_path / "quad.json"
    path.write_text(json.dumps(problem_data(QUAD_COEFFS, 3.0, weights=[1, 1, 1])))
    return path


# -- acceptance summary -----------------------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or "::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
