"""
Shock-time analysis: seed statistics, the a-priori window [T_lower, T_upper] and detection of
characteristic focusing (rho -> 0) in traced fans.
"""
import logging
import math

import numpy as np

from . import error
from .const import Defaults, Tolerance
from .core import SystemModel, eigenframe, structure_coeffs, separation_time
from .profile import refined_max
from .seed import SeedProfile
from .tracer import CharacteristicFan

logger = logging.getLogger('shockform.shock')


class SeedStats:
    """
    W0 / W0+ use the frame at the seed, f' = theta f0'. W00 / W00+ use the frame at u = 0 and f0'.
    L is the sup of ||f0''||_0, a Lipschitz constant of f0'.
    """

    def __init__(self, w0: float, w0_plus: float, w00: float, w00_plus: float, lipschitz: float,
                 family_max: list[float], family_plus: list[float], z_plus: float, family_plus_index: int):
        self.w0 = w0
        self.w0_plus = w0_plus
        self.w00 = w00
        self.w00_plus = w00_plus
        self.lipschitz = lipschitz
        self.family_max = family_max
        self.family_plus = family_plus
        self.z_plus = z_plus
        self.family_plus_index = family_plus_index

    @property
    def lower_bound(self) -> float:
        return self.w00 ** 2 / (2 * self.lipschitz)

    @property
    def bound_holds(self) -> bool:
        return self.w00_plus >= self.lower_bound * (1 - 1e-12)

    def as_dict(self) -> dict:
        return {
            "W0": self.w0, "W0_plus": self.w0_plus, "W00": self.w00, "W00_plus": self.w00_plus,
            "L": self.lipschitz, "family_max": self.family_max, "family_plus": self.family_plus,
            "z_plus": self.z_plus, "family_plus_index": self.family_plus_index,
            "lower_bound": self.lower_bound, "bound_holds": self.bound_holds,
        }

    def __repr__(self):
        return f"<seed_stats W0={self.w0:.6g}; W0+={self.w0_plus:.6g}; W00+={self.w00_plus:.6g}; L={self.lipschitz:.6g}>"


def seed_stats(model: SystemModel, seed: SeedProfile, samples: int = Defaults.SEED_SAMPLES) -> SeedStats:
    if seed.is_zero:
        raise error.ZeroSeed("Seed is identically zero")

    grid = np.linspace(-1.0, 1.0, samples)
    base = eigenframe(model, np.zeros(model.dimension))

    def seeded(i):
        return lambda z: eigenframe(model, seed.value(z)).components(seed.derivative(z))[..., i]

    def at_zero(i):
        return lambda z: np.einsum('a,...a->...', base.covector(i), seed.shape_derivative(z))

    family_max, family_plus, zero_max, zero_plus = [], [], [], []
    z_plus, index_plus = 0.0, 0

    for i in range(model.dimension):
        fn = seeded(i)
        zp, plus = refined_max(fn, grid)
        _, minus = refined_max(lambda z: -fn(z), grid)
        family_max.append(max(plus, minus, 0.0))
        family_plus.append(max(plus, 0.0))
        if plus > max(family_plus[:-1], default=-math.inf):
            z_plus, index_plus = zp, i + 1

        g = at_zero(i)
        _, plus0 = refined_max(g, grid)
        _, minus0 = refined_max(lambda z: -g(z), grid)
        zero_max.append(max(plus0, minus0, 0.0))
        zero_plus.append(max(plus0, 0.0))

    _, lipschitz = refined_max(lambda z: model.metric.norm(seed.second_derivative(z) / seed.theta), grid)

    stats = SeedStats(
        w0=max(family_max),
        w0_plus=max(family_plus),
        w00=max(zero_max),
        w00_plus=max(zero_plus),
        lipschitz=lipschitz,
        family_max=family_max,
        family_plus=family_plus,
        z_plus=z_plus,
        family_plus_index=index_plus,
    )

    if not stats.bound_holds:
        logger.warning(f"W00+ = {stats.w00_plus:.6g} is below W00^2/(2L) = {stats.lower_bound:.6g}")

    logger.debug(f"Seed statistics: {stats}")
    return stats


class ShockForecast:
    def __init__(self, t_lower: float, t_upper: float, epsilon: float, c_diagonal: list[float],
                 w0_plus: float, t0: float = None):
        self.t_lower = t_lower
        self.t_upper = t_upper
        self.epsilon = epsilon
        self.c_diagonal = c_diagonal
        self.w0_plus = w0_plus
        self.t0 = t0

    def contains(self, t: float, slack: float = 0.0) -> bool:
        return (1 - slack) * self.t_lower <= t <= (1 + slack) * self.t_upper

    def as_dict(self) -> dict:
        return {
            "t_lower": self.t_lower, "t_upper": self.t_upper, "epsilon": self.epsilon,
            "c_diagonal": self.c_diagonal, "W0_plus": self.w0_plus, "t0": self.t0,
        }

    def __repr__(self):
        return f"<forecast [{self.t_lower:.6g}, {self.t_upper:.6g}]; ε={self.epsilon}>"


def shock_window(c_diagonal, w0_plus: float, epsilon: float) -> tuple[float, float]:
    """
    T_lower = min_i 1/((1+eps)^3 |c_iii(0)| W0+), T_upper = max_i 1/((1-eps)^4 |c_iii(0)| W0+).
    """
    c = np.abs(np.asarray(c_diagonal, dtype=float))
    lower = float(np.min(1 / ((1 + epsilon) ** 3 * c * w0_plus)))
    upper = float(np.max(1 / ((1 - epsilon) ** 4 * c * w0_plus)))
    return lower, upper


def forecast(model: SystemModel, stats: SeedStats, epsilon: float = Defaults.EPSILON,
             sigma: float = None) -> ShockForecast:
    if not 0 < epsilon < 0.01:
        raise error.InvalidParams(f"epsilon must lie in (0, 1/100), got {epsilon}")

    zero = np.zeros(model.dimension)
    diag = structure_coeffs(model, zero, eigenframe(model, zero)).diagonal()
    if np.any(np.abs(diag) <= Tolerance.SIGN):
        raise error.NotGenuinelyNonlinear(f"c_iii(0) = {diag.tolist()} has a vanishing entry")

    if not stats.w0_plus > 0:
        raise error.ZeroPositivePart("W0+ = 0: no family is compressive")

    lower, upper = shock_window(diag, stats.w0_plus, epsilon)
    t0 = separation_time(sigma) if sigma is not None else None

    result = ShockForecast(lower, upper, epsilon, [float(c) for c in diag], stats.w0_plus, t0)
    logger.info(f"Forecast shock window [{lower:.6g}, {upper:.6g}]")
    return result


class ShockReport:
    def __init__(self, t_obs: float, family: int, z_plus: float, t_extrap: float, rho_stop: float,
                 times: np.ndarray, min_rho: np.ndarray, r_squared: float, slope: float, duality: float):
        self.t_obs = t_obs
        self.family = family
        self.z_plus = z_plus
        self.t_extrap = t_extrap
        self.rho_stop = rho_stop
        self.times = times
        self.min_rho = min_rho
        self.r_squared = r_squared
        self.slope = slope
        self.duality = duality

    def as_dict(self) -> dict:
        return {
            "t_obs": self.t_obs, "t_extrap": self.t_extrap, "family": self.family, "z_plus": self.z_plus,
            "rho_stop": self.rho_stop, "r_squared": self.r_squared, "slope": self.slope,
            "duality": self.duality,
        }

    def __repr__(self):
        return f"<shock t_obs={self.t_obs:.6g}; t_extrap={self.t_extrap:.6g}; family={self.family}; z+={self.z_plus:.4g}>"


def final_fit(times: np.ndarray, values: np.ndarray, fraction: float = Defaults.FIT_FRACTION) -> tuple[float, float, float]:
    """
    Least-squares line through the final fraction (at least 3 samples) of a series.
    Returns (slope, intercept, R^2).
    """
    count = max(3, int(math.ceil(fraction * len(times))))
    if len(times) < count:
        raise error.NoShockDetected(f"Only {len(times)} samples; a fit needs 3")

    t, y = times[-count:], values[-count:]
    slope, intercept = np.polyfit(t, y, 1)
    fitted = slope * t + intercept
    total = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 - float(((y - fitted) ** 2).sum()) / total if total > 0 else 1.0
    return float(slope), float(intercept), r_squared


def detect_shock(fans: list[CharacteristicFan], rho_stop: float = Defaults.RHO_STOP,
                 fraction: float = Defaults.FIT_FRACTION) -> ShockReport:
    """
    Earliest stored (t, family, z) with rho <= rho_stop, and the zero crossing of a line fitted to
    the final samples of min_z rho for that family.
    """
    if not 0 < rho_stop < 1:
        raise error.InvalidParams(f"rho_stop must lie in (0, 1), got {rho_stop}")

    best = None
    for fan in fans:
        hits = np.nonzero(fan.rho.min(axis=1) <= rho_stop)[0]
        if len(hits) and (best is None or fan.times[hits[0]] < best[0].times[best[1]]):
            best = (fan, int(hits[0]))

    if best is None:
        lowest = min(float(f.rho.min()) for f in fans)
        raise error.NoShockDetected(f"min rho stayed at {lowest:.6g} > {rho_stop}")

    fan, n = best
    times = fan.times[:n + 1]
    min_rho = fan.rho[:n + 1].min(axis=1)
    z_plus = float(fan.z[int(np.argmin(fan.rho[n]))])

    slope, intercept, r_squared = final_fit(times, min_rho, fraction)
    if slope < 0:
        t_extrap = -intercept / slope
    else:
        logger.warning(f"Final min-rho fit has non-negative slope {slope:.4g}; no extrapolation")
        t_extrap = math.nan

    vmax = float(np.abs(fan.v[n]).max())
    duality = float(np.abs(fan.w[n]).max() * min_rho[-1] / vmax) if vmax > 0 else math.nan

    report = ShockReport(float(fan.times[n]), fan.family, z_plus, float(t_extrap), rho_stop, times, min_rho,
                         r_squared, slope, duality)
    logger.info(f"Shock detected: {report}")
    return report


def validate_window(report: ShockReport, forecast: ShockForecast, slack: float = Defaults.SLACK) -> bool:
    return bool(math.isfinite(report.t_extrap) and forecast.contains(report.t_extrap, slack))
