import numpy as np
import pytest

from rectiplan._kernels import numpy_impl

try:
    from rectiplan._kernels import numba_impl
except ImportError:  # pragma: no cover
    numba_impl = None

from rectiplan.discretization import build_grid

BACKENDS = [numpy_impl] + ([numba_impl] if numba_impl is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def kernels(request):
    return request.param


@pytest.fixture
def grid128():
    return build_grid(128)


@pytest.fixture
def rng():
    return np.random.default_rng(20240519)


def fig_bindings():
    return {2: (0.0, 0.0), 4: (0.0, 0.0), 6: (0.0, 0.0)}


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def accept():
    def record(criterion, ok, detail):
        line = f"acceptance {criterion}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
