"""Omnidirectional base safety simulator."""

from ._core import (
    InputError,
    NumericalError,
    ParseError,
    Scenario,
    SimResult,
    closed_form_1d,
    escape_trajectory,
    instantaneous_cp,
    load_scenario,
    parse_scenario,
    risk_csv,
    run_scenario,
    verify,
)

__all__ = [
    "InputError",
    "NumericalError",
    "ParseError",
    "Scenario",
    "SimResult",
    "closed_form_1d",
    "escape_trajectory",
    "instantaneous_cp",
    "load_scenario",
    "parse_scenario",
    "risk_csv",
    "run_scenario",
    "verify",
]
