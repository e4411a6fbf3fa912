import pytest

from heatlab.generators import lattice, sierpinski_gasket, vicsek_tree


@pytest.fixture(scope="session")
def z1():
    return lattice(1, 81)


@pytest.fixture(scope="session")
def z2_small():
    return lattice(2, 33)


@pytest.fixture(scope="session")
def gasket5():
    return sierpinski_gasket(5)


@pytest.fixture(scope="session")
def vicsek3():
    return vicsek_tree(3)


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one summary line per acceptance criterion."""
    lines = getattr(request.config, "_acceptance_lines", None)
    if lines is None:
        lines = request.config._acceptance_lines = {}
    return lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
