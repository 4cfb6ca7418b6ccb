import numpy as np
import pytest

from grpdesc import GroupedDesign, orthonormalize


def random_design(seed, n=30, sizes=(3, 2, 4), loss="linear", signal=1.0, corr=0.0):
    rng = np.random.default_rng(seed)
    p = sum(sizes)
    X = rng.standard_normal((n, p))
    if corr:
        X = X + corr * rng.standard_normal((n, 1))
    b = np.zeros(p)
    b[: sizes[0]] = signal * rng.normal(0, 1, sizes[0])
    eta = X @ b + rng.standard_normal(n)
    if loss == "logistic":
        y = (eta > 0).astype(float)
        y[0], y[1] = 0.0, 1.0
    else:
        y = eta
    groups = np.repeat(np.arange(len(sizes)), sizes)
    return GroupedDesign.from_arrays(X, y, groups)


def ortho_design(seed, loss="linear", **kw):
    design = random_design(seed, loss=loss, **kw)
    return orthonormalize(design, loss)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
