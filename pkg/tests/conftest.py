import pytest

from hermtheta.hlattice import hnk_lattice, scale_by_ideal
from hermtheta.qfield import ideal_A_d, make_field

_criteria = {}
_notes = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    _notes.extend(v for k, v in report.user_properties if k == "note" and report.when == "call")
    n = dict(report.user_properties).get("criterion")
    if n is None:
        return
    prev = _criteria.get(n, "PASS")
    _criteria[n] = "PASS" if prev == "PASS" and report.outcome == "passed" else "FAIL"


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(f"criterion {n}: {_criteria[n]}")
    for line in _notes:
        terminalreporter.write_line(f"  {line}")


@pytest.fixture(scope="session")
def lattices():
    cache = {}

    def get(m, d=1):
        if (m, d) not in cache:
            if d == 1:
                cache[m, d] = hnk_lattice(make_field(m))
            else:
                cache[m, d] = scale_by_ideal(get(m), ideal_A_d(make_field(m), d))
        return cache[m, d]

    return get


# standard E8 Gram (Bourbaki numbering)
E8_GRAM = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
]
