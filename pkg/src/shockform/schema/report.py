"""
JSON reports written into the output directory. Every field is always present (null when unknown)
so the layout stays stable across runs.
"""
from . import Schema
from ..const import SHOCKFORM_BUILD


class Report(Schema):
    build: int = SHOCKFORM_BUILD
    status: str = None
    message: str = None


class ForecastReport(Report):
    t_lower: float = None
    t_upper: float = None
    epsilon: float = None
    t0: float = None
    sigma: float = None
    c_diagonal: list = None
    W0_plus: float = None


class ShockSummary(ForecastReport):
    """
    Combined forecast and observation for a simulate run.
    """
    t_obs: float = None
    t_extrap: float = None
    family: int = None
    z_plus: float = None
    rho_stop: float = None
    r_squared: float = None
    slope: float = None
    duality: float = None
    verdict: bool = None
    steepness: dict = None


class SeedStatsReport(Report):
    W0: float = None
    W0_plus: float = None
    W00: float = None
    W00_plus: float = None
    L: float = None
    lower_bound: float = None
    bound_holds: bool = None
    family_max: list = None
    family_plus: list = None
    family_plus_index: int = None
    z_plus: float = None


class ExactReport(Report):
    shock_time: float = None
    times: list = None
    slices: list = None
    jump_residual: float = None


class PropertyResult(Schema):
    name: str = None
    passed: bool = None
    measured: float = None
    threshold: float = None
    expected_failure: bool = False
    message: str = None

    def __repr__(self):
        return f"<property name={self.name}; passed={self.passed}; measured={self.measured}>"


class VerifyReport(Report):
    passed: bool = None
    results: list = None
