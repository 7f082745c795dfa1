"""
Characteristic tracing over a grid solution.

Along the family-i characteristic X_i(z, t) (d/dt at fixed z, dX/dt = lambda_i) the traced quantities
obey

    d rho/dt = c^i_ii v + (sum_{m != i} c^i_im w^m) rho
    d v/dt   = sum_{m != i} (2 gamma^i_im + c^i_im) w^m v + sum_{l, m != i} gamma^i_lm w^l w^m rho
    d w/dt   = sum_{l, m} gamma^i_lm w^l w^m

where w^i is the traced value and w^m (m != i) is read from the grid gradient as e*^m u_x.
"""
import logging

import numpy as np
from scipy.interpolate import CubicSpline

from . import error
from .const import Defaults
from .core import SystemModel, eigenframe, structure_coeffs
from .seed import SeedProfile
from .solver import GridSolution

logger = logging.getLogger('shockform.tracer')


class FieldSampler:
    """
    u and u_x at arbitrary (x, t): cubic splines in x on stored levels, linear in t between them.
    Splines are built lazily and only the two most recent levels are kept.
    """

    def __init__(self, solution: GridSolution):
        self.solution = solution
        self._splines = {}

    def _spline(self, n: int) -> CubicSpline:
        if n not in self._splines:
            if len(self._splines) >= 2:
                self._splines.pop(min(self._splines))
            self._splines[n] = CubicSpline(self.solution.x, self.solution.states[n], axis=0)
        return self._splines[n]

    def sample(self, x: np.ndarray, t: float) -> tuple[np.ndarray, np.ndarray]:
        sol = self.solution
        if np.any(x < sol.x_min) or np.any(x > sol.x_max):
            raise error.InterpolationOutOfRange(
                f"Characteristic left the grid [{sol.x_min:.6g}, {sol.x_max:.6g}] at t={t:.6g}"
            )
        if t < 0 or t > sol.t_end * (1 + 1e-12):
            raise error.InterpolationOutOfRange(f"t={t:.6g} outside the stored span [0, {sol.t_end:.6g}]")

        n = min(sol.level(t), len(sol.times) - 2) if len(sol.times) > 1 else 0
        if len(sol.times) == 1:
            spline = self._spline(0)
            return spline(x), spline(x, 1)

        t0, t1 = sol.times[n], sol.times[n + 1]
        weight = (t - t0) / (t1 - t0)
        lo, hi = self._spline(n), self._spline(n + 1)
        u = (1 - weight) * lo(x) + weight * hi(x)
        ux = (1 - weight) * lo(x, 1) + weight * hi(x, 1)
        return u, ux


class CharacteristicFan:
    """
    Family-i characteristics launched from z_grid. Arrays are indexed [time, z].
    """

    def __init__(self, family: int, z: np.ndarray, times: np.ndarray, X: np.ndarray, rho: np.ndarray,
                 v: np.ndarray, w: np.ndarray, stopped: bool = False):
        self.family = family
        self.z = z
        self.times = times
        self.X = X
        self.rho = rho
        self.v = v
        self.w = w
        self.stopped = stopped

    @property
    def inside(self) -> np.ndarray:
        """
        Mask of labels in the seed support [-1, 1].
        """
        return np.abs(self.z) <= 1

    def strip(self, n: int) -> tuple[float, float]:
        """
        Closed strip [X_i(-1, t), X_i(1, t)] at stored time n, interpolated in z.
        """
        return (float(np.interp(-1.0, self.z, self.X[n])), float(np.interp(1.0, self.z, self.X[n])))

    def truncate(self, count: int) -> 'CharacteristicFan':
        return CharacteristicFan(self.family, self.z, self.times[:count], self.X[:count], self.rho[:count],
                                 self.v[:count], self.w[:count], self.stopped and count >= len(self.times))

    def rows(self):
        """
        (z, t, X, rho, v, w) rows, time-major.
        """
        for n, t in enumerate(self.times):
            for k, z in enumerate(self.z):
                yield z, t, self.X[n, k], self.rho[n, k], self.v[n, k], self.w[n, k]

    def __repr__(self):
        return f"<fan family={self.family}; labels={len(self.z)}; times={len(self.times)}; stopped={self.stopped}>"


def _derivatives(model: SystemModel, sampler: FieldSampler, family: int, t: float, state: np.ndarray) -> np.ndarray:
    x, rho, v, w = state
    u, ux = sampler.sample(x, t)
    frame = eigenframe(model, u)
    coeffs = structure_coeffs(model, u, frame)

    i = family
    mask = np.ones(model.dimension)
    mask[i] = 0.0
    others = frame.components(ux) * mask

    c_iii = coeffs.c[..., i, i, i]
    c_iim = coeffs.c[..., i, i, :]
    g_iim = coeffs.gamma[..., i, i, :]
    quad = np.einsum('...lm,...l,...m->...', coeffs.gamma[..., i, :, :], others, others)

    d_x = frame.values[..., i]
    d_rho = c_iii * v + np.einsum('...m,...m->...', c_iim, others) * rho
    d_v = np.einsum('...m,...m->...', 2 * g_iim + c_iim, others) * v + quad * rho
    d_w = -c_iii * w ** 2 + 2 * np.einsum('...m,...m->...', g_iim, others) * w + quad
    return np.stack([d_x, d_rho, d_v, d_w])


def _rk4(model, sampler, family, t, state, h):
    k1 = _derivatives(model, sampler, family, t, state)
    k2 = _derivatives(model, sampler, family, t + h / 2, state + h / 2 * k1)
    k3 = _derivatives(model, sampler, family, t + h / 2, state + h / 2 * k2)
    k4 = _derivatives(model, sampler, family, t + h, state + h * k3)
    return state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def initial_values(model: SystemModel, seed: SeedProfile, family: int, z: np.ndarray) -> np.ndarray:
    """
    X = z, rho = 1 and v = w = e*^i(f(z)) f'(z).
    """
    frame = eigenframe(model, seed.value(z))
    w0 = frame.components(seed.derivative(z))[..., family]
    return np.stack([z.astype(float), np.ones_like(z, dtype=float), w0, w0.copy()])


def trace_characteristics(model: SystemModel, solution: GridSolution, family: int, z_grid, seed: SeedProfile,
                          rho_stop: float = Defaults.RHO_STOP, substeps: int = Defaults.TRACE_SUBSTEPS,
                          t_stop: float = None) -> CharacteristicFan:
    """
    Integrate the family (0-based) characteristics launched from z_grid with RK4 and record every
    stored level. Stops after the first level where min rho <= rho_stop.
    """
    z = np.asarray(z_grid, dtype=float)
    if z.ndim != 1 or len(z) < 1 or np.any(np.diff(z) <= 0):
        raise error.InvalidParams("z grid must be a strictly increasing vector")
    if not 0 <= family < model.dimension:
        raise error.InvalidParams(f"Family {family} outside 0..{model.dimension - 1}")
    if t_stop is not None and t_stop > solution.t_end * (1 + 1e-12):
        raise error.InterpolationOutOfRange(f"t_stop={t_stop} beyond the solution end {solution.t_end}")

    sampler = FieldSampler(solution)
    state = initial_values(model, seed, family, z)
    history = [state.copy()]
    times = [0.0]
    stopped = bool(state[1].min() <= rho_stop)

    for n in range(1, len(solution.times)):
        if stopped or (t_stop is not None and solution.times[n] > t_stop * (1 + 1e-12)):
            break

        t = float(solution.times[n - 1])
        target = float(solution.times[n])
        spacing = target - t
        h = spacing / substeps

        while t < target:
            h = min(h, target - t)
            trial = _rk4(model, sampler, family, t, state, h)
            if not np.all(np.isfinite(trial)) or np.abs(trial[1] - state[1]).max() > Defaults.MAX_RHO_JUMP:
                h /= 2
                if h < Defaults.MIN_STEP_FRACTION * spacing:
                    raise error.StepSizeUnderflow(f"Family {family + 1} step underflow at t={t:.6g}")
                continue

            state = trial
            t = target if target - (t + h) < 1e-12 * spacing else t + h

        history.append(state.copy())
        times.append(target)

        if state[1].min() <= rho_stop:
            stopped = True
            logger.info(f"Family {family + 1}: min rho {state[1].min():.4g} at t={target:.6g}")

    history = np.array(history)
    logger.debug(f"Traced family {family + 1} over {len(times)} levels")
    return CharacteristicFan(family + 1, z, np.array(times), history[:, 0], history[:, 1], history[:, 2],
                             history[:, 3], stopped)


def align_fans(fans: list[CharacteristicFan]) -> list[CharacteristicFan]:
    """
    Cut every fan to the common time grid ending at the earliest stop.
    """
    count = min(len(f.times) for f in fans)
    return [f.truncate(count) for f in fans]


class SupDiagnostics:
    def __init__(self, times: np.ndarray, W: np.ndarray, V: np.ndarray, S: np.ndarray, J: np.ndarray,
                 U: np.ndarray):
        self.times = times
        self.W = W
        self.V = V
        self.S = S
        self.J = J
        self.U = U

    def rows(self):
        for n, t in enumerate(self.times):
            yield t, self.W[n], self.V[n], self.S[n], self.J[n], self.U[n]

    def __repr__(self):
        return f"<sup times={len(self.times)}; W={self.W[-1]:.4g}; S={self.S[-1]:.4g}; J={self.J[-1]:.4g}>"


def sup_diagnostics(model: SystemModel, fans: list[CharacteristicFan], solution: GridSolution) -> SupDiagnostics:
    """
    Running maxima: W of |w^i| over the grid, V of |w^i| outside the closed strip of family i, S of
    rho_i and J of |v^i| over labels in [-1, 1], U of |u|.
    """
    fans = align_fans(fans)
    if len(fans) != model.dimension:
        raise error.InvalidParams(f"Need {model.dimension} fans, got {len(fans)}")

    times = fans[0].times
    count = len(times)
    x = solution.x
    dx = solution.dx
    w_now = np.empty(count)
    v_now = np.empty(count)
    u_now = np.empty(count)

    for n, t in enumerate(times):
        level = solution.level(t)
        u = solution.states[level]
        ux = np.gradient(u, dx, axis=0)
        w = np.abs(eigenframe(model, u).components(ux))

        outside = np.zeros(len(x))
        for fan in fans:
            lo, hi = fan.strip(n)
            off = (x < lo) | (x > hi)
            if np.any(off):
                outside = np.maximum(outside, np.where(off, w[:, fan.family - 1], 0.0))

        w_now[n] = w.max()
        v_now[n] = outside.max()
        u_now[n] = np.linalg.norm(u, axis=-1).max()

    rho = np.stack([f.rho[:, f.inside].max(axis=1) for f in fans]).max(axis=0)
    vmax = np.stack([np.abs(f.v[:, f.inside]).max(axis=1) for f in fans]).max(axis=0)

    return SupDiagnostics(
        times=times,
        W=np.maximum.accumulate(w_now),
        V=np.maximum.accumulate(v_now),
        S=np.maximum.accumulate(rho),
        J=np.maximum.accumulate(vmax),
        U=np.maximum.accumulate(u_now),
    )


def second_order_diagnostics(fan: CharacteristicFan) -> tuple[np.ndarray, np.ndarray]:
    """
    mu_i = d rho_i / dz and nu^i = d v^i / dz across neighbouring characteristics, indexed [time, z].
    """
    if len(fan.z) < 3:
        raise error.DegenerateFan(f"Need at least 3 characteristics, got {len(fan.z)}")

    mu = np.gradient(fan.rho, fan.z, axis=1)
    nu = np.gradient(fan.v, fan.z, axis=1)
    return mu, nu


def density_consistency(fan: CharacteristicFan) -> np.ndarray:
    """
    Per stored time, max over labels of |rho_i - dX_i/dz|.
    """
    if len(fan.z) < 3:
        raise error.DegenerateFan(f"Need at least 3 characteristics, got {len(fan.z)}")

    return np.abs(fan.rho - np.gradient(fan.X, fan.z, axis=1)).max(axis=1)
