from importlib.resources import files

import pytest

from mimb import Dag, InterventionFamily, parse_network


@pytest.fixture
def fig1_dag():
    # T with parent A, child B, spouse F
    return Dag(["A", "T", "B", "F"], [("A", "T"), ("T", "B"), ("F", "B")])


@pytest.fixture
def fig2_dag():
    # T with parent A, child B, spouse C
    return Dag(["A", "T", "B", "C"], [("A", "T"), ("T", "B"), ("C", "B")])


@pytest.fixture
def fig2_family():
    # conservative, target untouched, child B covered
    return InterventionFamily([{"B"}, {"C"}, {"A"}])


@pytest.fixture
def fig3_family():
    # target manipulated once
    return InterventionFamily([{"B"}, {"C"}, {"T"}])


@pytest.fixture
def fig4_family():
    # target manipulated in every experiment
    return InterventionFamily([{"B", "T"}, {"T"}])


@pytest.fixture(scope="session")
def alarm():
    text = (files("mimb") / "data" / "alarm.net").read_text(encoding="utf-8")
    return parse_network(text)
