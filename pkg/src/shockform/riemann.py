"""
Exact solutions of the decoupled crystal (C112 = C122 = 0) through its Riemann invariants.

    m1 = u4 + I1(u1),  m2 = -u3 + I2(u2),  m3 = -u3 - I2(u2),  m4 = u4 - I1(u1)

with I_j(s) the integral of sqrt(K_j + 6 C_j s). Each m^k is transported at its own speed, so all
characteristics are straight lines. For c not identically zero no Riemann invariants exist and none
of this applies.
"""
import logging
import math

import numpy as np
from scipy.optimize import brentq

from . import error
from .const import Tolerance, Defaults
from .crystal import CrystalParams, E_from_D
from .profile import bump, bump_derivative, refined_max

logger = logging.getLogger('shockform.riemann')


def require_decoupled(params: CrystalParams):
    if not params.decoupled:
        raise error.CoupledParamsRejected(
            f"C112={params.c112}, C122={params.c122}: no Riemann invariants exist when the polarizations couple"
        )


def _integral(k: float, c: float, s) -> np.ndarray:
    # integral of sqrt(k + 6 c s'), written so that c -> 0 has no cancellation
    s = np.asarray(s, dtype=float)
    a = k + 6 * c * s
    if np.any(a < 0):
        raise error.NegativeRadicand("State outside the range where d_j > 0")
    ra, rk = np.sqrt(a), math.sqrt(k)
    return (2 * s / 3) * (a + ra * rk + k) / (ra + rk)


def _speed_from_integral(k: float, c: float, integral) -> np.ndarray:
    # (K^{3/2} + 9 C I)^{1/3}, the positive characteristic speed of the polarization
    arg = k ** 1.5 + 9 * c * np.asarray(integral, dtype=float)
    if np.any(arg <= 0):
        raise error.NegativeRadicand("Cube-root argument of the characteristic speed is not positive")
    return np.cbrt(arg)


def _state_from_integral(k: float, c: float, integral) -> np.ndarray:
    lam = _speed_from_integral(k, c, integral)
    rk = math.sqrt(k)
    return 1.5 * np.asarray(integral, dtype=float) * (lam + rk) / (lam ** 2 + lam * rk + k)


def riemann_invariants(params: CrystalParams, u) -> np.ndarray:
    """
    Invariants (m1, m2, m3, m4) of a state or batch of states.
    """
    require_decoupled(params)
    u = np.asarray(u, dtype=float)

    i1 = _integral(params.k1, params.c111, u[..., 0])
    i2 = _integral(params.k2, params.c222, u[..., 1])
    return np.stack([u[..., 3] + i1, -u[..., 2] + i2, -u[..., 2] - i2, u[..., 3] - i1], axis=-1)


def invert_invariants(params: CrystalParams, m) -> np.ndarray:
    require_decoupled(params)
    m = np.asarray(m, dtype=float)

    u1 = _state_from_integral(params.k1, params.c111, (m[..., 0] - m[..., 3]) / 2)
    u2 = _state_from_integral(params.k2, params.c222, (m[..., 1] - m[..., 2]) / 2)
    return np.stack([u1, u2, -(m[..., 1] + m[..., 2]) / 2, (m[..., 0] + m[..., 3]) / 2], axis=-1)


def char_speed(params: CrystalParams, family: int, m_own, m_partner) -> np.ndarray:
    """
    Speed of family 1..4 (decreasing order) from its own invariant and its partner m^{5-i}.
    """
    polarization = 1 if family in (1, 4) else 2
    k, c = params.polarization(polarization)
    diff = np.asarray(m_own, dtype=float) - m_partner
    if family > 2:
        diff = -diff

    speed = _speed_from_integral(k, c, diff / 2)
    return speed if family <= 2 else -speed


def _quartic_root(cc: np.ndarray) -> np.ndarray:
    """
    Positive root of 3Z^4 + 4Z^3 = cc by Newton, safeguarded by bisection on (0, max(1, cc)].
    """
    cc = np.asarray(cc, dtype=float)
    lo = np.zeros_like(cc)
    hi = np.maximum(1.0, cc)

    if np.any(3 * hi ** 4 + 4 * hi ** 3 - cc <= 0):
        raise error.NoBracket("Quartic has no root in (0, max(1, c)]")

    z = (cc / 3) ** 0.25
    for _ in range(200):
        p = 3 * z ** 4 + 4 * z ** 3 - cc
        lo = np.where(p < 0, z, lo)
        hi = np.where(p > 0, z, hi)

        nxt = z - p / (12 * z ** 3 + 12 * z ** 2)
        outside = ~np.isfinite(nxt) | (nxt <= lo) | (nxt >= hi)
        nxt = np.where(outside & (p != 0), (lo + hi) / 2, np.where(p == 0, z, nxt))

        done = np.abs(nxt - z) <= Tolerance.QUARTIC * np.maximum(z, 1.0)
        z = nxt
        if np.all(done):
            return z

    raise error.NoConvergence("Quartic boundary solve did not converge")


def interface_transmit(params: CrystalParams, f_tilde) -> tuple[np.ndarray, np.ndarray]:
    """
    Boundary invariants m0 = 2 f + 2 g of the transmitted wave and the reflected amplitudes g, per
    polarization, for incident boundary values f_tilde = (f1, f2) (scalars or arrays).
    """
    require_decoupled(params)
    m0 = []
    g = []

    for j, f in enumerate(f_tilde, start=1):
        k, c = params.polarization(j)
        f = np.asarray(f, dtype=float)

        if c == 0:
            gj = f * (1 - math.sqrt(k)) / (1 + math.sqrt(k))
        else:
            cc = 3 * k ** 2 + 4 * k ** 1.5 + 72 * c * f
            if np.any(cc <= 0):
                raise error.NonPositiveConstant(f"Incident profile too large for polarization {j}")
            z = _quartic_root(cc)
            gj = (z ** 3 - k ** 1.5) / (9 * c) - f

        g.append(gj)
        m0.append(2 * f + 2 * gj)

    return np.array(m0), np.array(g)


class InterfaceScenario:
    """
    Light from the vacuum (x < 0) hits the crystal (x >= 0) at (0, 0).

    The incident boundary trace is f_tilde^j(tau) = amplitude_j * phi(2 tau - 1), supported in (0, 1);
    the incident wave is u_i = (f1, f2, -f2, f1)(t - x) and the reflected one
    u_r = (-g1, -g2, -g2, g1)(t + x).
    """

    def __init__(self, params: CrystalParams, amplitudes: tuple[float, float], power: int = 3,
                 x0: float = -1.0, scan: int = Defaults.ROOT_SCAN):
        require_decoupled(params)
        if not x0 < 0:
            raise error.InvalidParams(f"Incident wave must start in the vacuum, x0={x0}")

        self.params = params
        self.amplitudes = np.asarray(amplitudes, dtype=float)
        self.power = power
        self.x0 = x0
        self.scan = scan
        self._shock_time = None

    def incident(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        phi = bump(2 * tau - 1, self.power)
        return self.amplitudes[:, None] * np.atleast_1d(phi)[None, :]

    def incident_derivative(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        dphi = 2 * bump_derivative(2 * tau - 1, self.power)
        return self.amplitudes[:, None] * np.atleast_1d(dphi)[None, :]

    def profile(self, s) -> np.ndarray:
        """
        The incident field profile f(s) = f_tilde(x0 - s).
        """
        return self.incident(self.x0 - np.asarray(s, dtype=float))

    def boundary(self, tau) -> tuple[np.ndarray, np.ndarray]:
        """
        (m0, g) at launch times tau, each of shape (2, len(tau)).
        """
        return interface_transmit(self.params, self.incident(tau))

    def launch_speed(self, tau) -> np.ndarray:
        m0, _ = self.boundary(tau)
        return np.stack([char_speed(self.params, j, m0[j - 1], 0.0) for j in (1, 2)])

    @property
    def shock_time(self) -> float:
        if self._shock_time is None:
            try:
                self._shock_time = exact_shock_time(self)
            except error.NoShock:
                self._shock_time = math.inf
        return self._shock_time

    def vacuum_state(self, x: float, t: float) -> np.ndarray:
        f = self.incident(np.array([t - x]))[:, 0]
        _, g = self.boundary(np.array([t + x]))
        g = g[:, 0]
        return np.array([f[0] - g[0], f[1] - g[1], -f[1] - g[1], f[0] + g[0]])

    def _launch_time(self, j: int, x: float, t: float) -> float:
        k, _ = self.params.polarization(j)
        if x >= math.sqrt(k) * t or (t > 1 and x <= math.sqrt(k) * (t - 1)):
            return math.nan

        if x == 0:
            return t

        hi = min(t, 1.0)
        grid = np.linspace(0.0, hi, self.scan + 1)

        def offset(tau):
            return self.launch_speed(np.atleast_1d(tau))[j - 1] * (t - np.atleast_1d(tau)) - x

        values = offset(grid)
        crossings = np.nonzero(np.signbit(values[:-1]) != np.signbit(values[1:]))[0]
        if len(crossings) > 1:
            raise error.PostShockQuery(f"Characteristics of polarization {j} cross at x={x}, t={t}")
        if len(crossings) == 0:
            raise error.RootBracketFailure(f"No launch time found for x={x}, t={t}")

        a, b = grid[crossings[0]], grid[crossings[0] + 1]
        return brentq(lambda s: float(offset(s)[0]), a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def crystal_state(self, x: float, t: float) -> np.ndarray:
        if t >= self.shock_time:
            raise error.PostShockQuery(f"t={t} is past the shock time {self.shock_time:.6g}")

        m = np.zeros(4)
        for j in (1, 2):
            tau = self._launch_time(j, x, t)
            if not math.isnan(tau):
                m0, _ = self.boundary(np.array([tau]))
                m[j - 1] = m0[j - 1, 0]

        return invert_invariants(self.params, m)

    def evaluate(self, x: float, t: float) -> np.ndarray:
        if x < 0:
            return self.vacuum_state(x, t)
        if t <= 0:
            return np.zeros(4)
        return self.crystal_state(x, t)

    def slice(self, xs, t: float) -> np.ndarray:
        """
        Rows (x, D_y, D_z, B_y, B_z) at time t.
        """
        xs = np.asarray(xs, dtype=float)
        rows = np.empty((len(xs), 5))
        rows[:, 0] = xs
        for n, x in enumerate(xs):
            rows[n, 1:] = self.evaluate(float(x), t)
        return rows

    def jump_residual(self, t: float) -> np.ndarray:
        """
        Continuity residuals [E_y], [E_z], [H_y], [H_z] across x = 0 (E = D and H = B in the vacuum).
        """
        outer = self.vacuum_state(0.0, t)
        m0, _ = self.boundary(np.array([t]))
        inner = invert_invariants(self.params, np.array([m0[0, 0], m0[1, 0], 0.0, 0.0]))
        e_y, e_z = E_from_D(self.params, inner[0], inner[1])
        return np.array([e_y - outer[0], e_z - outer[1], inner[2] - outer[2], inner[3] - outer[3]])


def exact_shock_time(scenario: InterfaceScenario) -> float:
    """
    First envelope time t0 + lambda/lambda' of the transmitted characteristics x = lambda(t0)(t - t0).

    lambda(t0) equals the quartic root Z, so lambda' = 6 C f_tilde' / (Z^2 (Z + 1)); only launch
    times with lambda' > 0 (later characteristics overtaking earlier ones) give crossings.
    """
    params = scenario.params
    grid = np.linspace(0.0, 1.0, Defaults.ENVELOPE_SCAN + 1)[1:-1]
    best = math.inf

    for j in (1, 2):
        k, c = params.polarization(j)
        if c == 0 or scenario.amplitudes[j - 1] == 0:
            continue

        def crossing(tau, j=j, c=c):
            tau = np.atleast_1d(tau)
            z = scenario.launch_speed(tau)[j - 1]
            dz = 6 * c * scenario.incident_derivative(tau)[j - 1] / (z ** 2 * (z + 1))
            with np.errstate(divide='ignore', invalid='ignore'):
                return np.where(dz > 0, tau + z / dz, math.inf)

        # minimise the crossing time by maximising its negative
        _, value = refined_max(lambda tau: -crossing(tau), grid)
        if -value < best:
            best = -value

    if not math.isfinite(best) or best <= 0:
        raise error.NoShock("Transmitted characteristics never cross")

    logger.debug(f"Exact interface shock time {best:.12g}")
    return best


class SimpleWave:
    """
    Exact decoupled Cauchy solution for a family-1 simple wave: m1(z) = theta phi(z), all other
    invariants zero, characteristics x = z + lambda(m1(z)) t.
    """

    def __init__(self, params: CrystalParams, seed):
        require_decoupled(params)
        self.params = params
        self.seed = seed
        k, c = params.polarization(1)
        self._k = k
        self._c = c

        # speed of the quiet state outside the support
        self._quiet = float(self.speed(np.array([1.0]))[0])

    def invariant(self, z) -> np.ndarray:
        return self.seed.amplitude * bump(z, self.seed.power)

    def invariant_derivative(self, z) -> np.ndarray:
        return self.seed.amplitude * bump_derivative(z, self.seed.power)

    def speed(self, z) -> np.ndarray:
        return char_speed(self.params, 1, self.invariant(z), 0.0)

    def speed_derivative(self, z) -> np.ndarray:
        """
        d lambda / dz along the initial line.
        """
        arg = self._k ** 1.5 + 4.5 * self._c * self.invariant(z)
        return 1.5 * self._c * arg ** (-2.0 / 3.0) * self.invariant_derivative(z)

    def characteristic(self, z, t: float) -> np.ndarray:
        return np.asarray(z, dtype=float) + self.speed(z) * t

    def rho(self, z, t: float) -> np.ndarray:
        return 1 + t * self.speed_derivative(z)

    def shock_time(self) -> float:
        grid = np.linspace(-1.0, 1.0, Defaults.ENVELOPE_SCAN + 1)
        _, steepest = refined_max(lambda z: -self.speed_derivative(z), grid)
        if steepest <= 0:
            raise error.NoShock("Simple wave never steepens")
        return 1.0 / steepest

    def label(self, x: float, t: float) -> float:
        """
        Launch point z of the characteristic through (x, t).
        """
        if t == 0:
            return x

        # characteristics launched outside [-1, 1] carry the quiet state and move rigidly
        z = x - self._quiet * t
        if z <= -1 or z >= 1:
            return z

        f_lo = float(self.characteristic(np.array([-1.0]), t)[0]) - x
        f_hi = float(self.characteristic(np.array([1.0]), t)[0]) - x
        tol = Tolerance.LABEL * max(1.0, abs(x))
        if abs(f_lo) <= tol:
            return -1.0
        if abs(f_hi) <= tol:
            return 1.0
        if f_lo > 0 or f_hi < 0:
            raise error.RootBracketFailure(f"No characteristic label bracket for x={x}, t={t}")

        return brentq(lambda z: float(self.characteristic(np.array([z]), t)[0]) - x, -1.0, 1.0, xtol=1e-14)

    def evaluate(self, x, t: float) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        labels = np.array([self.label(float(p), t) for p in xs])
        m = np.zeros((len(xs), 4))
        m[:, 0] = self.invariant(labels)
        u = invert_invariants(self.params, m)
        return u if np.ndim(x) else u[0]
