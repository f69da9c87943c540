import pytest

from bosemomentum import ThermalPoint, TrapModel, condensation_temperature
from bosemomentum.partition import partition_table_for


@pytest.fixture
def ideal_state():
    """Factory for (model, thermal, table) of an ideal isotropic gas at T = ratio * T0."""

    def make(n, t_ratio, **model_kw):
        model = TrapModel(n, **model_kw)
        thermal = ThermalPoint(t_ratio * condensation_temperature(model))
        return model, thermal, partition_table_for(model, thermal)

    return make


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
