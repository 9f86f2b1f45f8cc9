import functools

import pytest

from plcg import examples
from plcg.adams import normalize_section
from plcg.fusion import FusionSystem, representative_data
from plcg.linking import TransporterLinking
from plcg.operation import compute_kG


@functools.lru_cache(maxsize=None)
def group(name: str, level: int | None = None):
    return examples.by_name(name, level)


@functools.lru_cache(maxsize=None)
def pipeline(name: str):
    """(G, F, L, data, sigma, kg) for a corpus group, built once per session."""
    G = group(name)
    F = FusionSystem(G)
    L = TransporterLinking(F)
    data = representative_data(F)
    sigma = normalize_section(G)
    kg = compute_kG(L, data, sigma)
    return G, F, L, data, sigma, kg


@pytest.fixture(scope="session")
def pipe():
    return pipeline


@functools.lru_cache(maxsize=None)
def section(name: str):
    return normalize_section(group(name))


# acceptance results, printed one line per criterion at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
