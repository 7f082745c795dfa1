"""
Grid reference solution of u_t + a(u) u_x = 0 from a seed.

Models with a conservative flux use MUSCL reconstruction with a local Lax-Friedrichs numerical
flux; other models use a primitive-variable upwind scheme in the local eigenframe, which is only
first-order accurate at solution kinks. Both step with the two-stage SSP Runge-Kutta method.
"""
import logging
import math

import numpy as np

from . import error
from .const import Defaults, Limiter
from .core import SystemModel, eigenframe
from .seed import SeedProfile, gradient_cap as default_gradient_cap

logger = logging.getLogger('shockform.solver')


class SteepnessEvent:
    """
    The grid gradient exceeded the cap; the scheme cannot follow the solution any further.
    """

    def __init__(self, t: float, x: float, gradient: float, cap: float):
        self.t = t
        self.x = x
        self.gradient = gradient
        self.cap = cap

    def as_dict(self) -> dict:
        return {"t": self.t, "x": self.x, "gradient": self.gradient, "cap": self.cap}

    def __repr__(self):
        return f"<steepness t={self.t:.6g}; x={self.x:.6g}; gradient={self.gradient:.6g}; cap={self.cap:.6g}>"


class GridSolution:
    """
    Immutable record of a grid run: cell centres x, stored level times and states[level, cell, component].
    """

    def __init__(self, x: np.ndarray, times: np.ndarray, states: np.ndarray, scheme: str, limiter: str,
                 cfl: float, steps: int, energy: np.ndarray = None, event: SteepnessEvent = None):
        self.x = x
        self.times = times
        self.states = states
        self.scheme = scheme
        self.limiter = limiter
        self.cfl = cfl
        self.steps = steps
        self.energy = energy
        self.event = event

        for arr in (self.x, self.times, self.states, self.energy):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def x_min(self) -> float:
        return float(self.x[0])

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def dimension(self) -> int:
        return self.states.shape[-1]

    def level(self, t: float) -> int:
        """
        Index of the stored level at or immediately before t.
        """
        return int(np.clip(np.searchsorted(self.times, t, side='right') - 1, 0, len(self.times) - 1))

    def __repr__(self):
        return (f"<grid scheme={self.scheme}; cells={len(self.x)}; dx={self.dx:.4g}; levels={len(self.times)}; "
                f"t_end={self.t_end:.6g}>")


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _mc(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    centred = (left + right) / 2
    return np.where(
        left * right > 0,
        np.sign(centred) * np.minimum(np.abs(centred), 2 * np.minimum(np.abs(left), np.abs(right))),
        0.0,
    )


def limited_slopes(left: np.ndarray, right: np.ndarray, limiter: str, bound: float = 0.0) -> np.ndarray:
    """
    Cell slopes from backward and forward differences.

    The tvb limiter leaves the centred slope alone wherever it is at most `bound` (M dx^2), so smooth
    extrema keep second order, and falls back to mc elsewhere.
    """
    if limiter == Limiter.TVB:
        centred = (left + right) / 2
        return np.where(np.abs(centred) <= bound, centred, _mc(left, right))
    if limiter == Limiter.MC:
        return _mc(left, right)
    if limiter == Limiter.MINMOD:
        return _minmod(left, right)
    if limiter == Limiter.NONE:
        return np.zeros_like(left)

    raise error.InvalidParams(f"Unknown limiter '{limiter}'")


def _ghosted(u: np.ndarray, width: int = 2) -> np.ndarray:
    # transmissive boundaries
    return np.concatenate([np.repeat(u[:1], width, axis=0), u, np.repeat(u[-1:], width, axis=0)], axis=0)


def conservative_rhs(model: SystemModel, u: np.ndarray, dx: float, limiter: str, bound: float = 0.0) -> np.ndarray:
    """
    -(F_{j+1/2} - F_{j-1/2}) / dx with MUSCL face states and the local Lax-Friedrichs flux.
    """
    g = _ghosted(u)
    slopes = limited_slopes(g[1:-1] - g[:-2], g[2:] - g[1:-1], limiter, bound)

    # faces between cells j and j+1 for j = -1 .. n-1
    left = g[1:-2] + slopes[:-1] / 2
    right = g[2:-1] - slopes[1:] / 2

    speed = np.maximum(model.max_speed(left), model.max_speed(right))
    face = 0.5 * (model.flux(left) + model.flux(right)) - 0.5 * speed[:, None] * (right - left)
    return -(face[1:] - face[:-1]) / dx


def upwind_rhs(model: SystemModel, u: np.ndarray, dx: float, limiter: str, bound: float = 0.0) -> np.ndarray:
    """
    -sum_k lambda_k e_k (e*^k D_k u) with D_k the MUSCL one-sided derivative on the upwind side of family k.
    """
    g = _ghosted(u)
    slopes = limited_slopes(g[1:-1] - g[:-2], g[2:] - g[1:-1], limiter, bound)

    backward = (g[2:-2] - g[1:-3] + (slopes[1:-1] - slopes[:-2]) / 2) / dx
    forward = (g[3:-1] - g[2:-2] - (slopes[2:] - slopes[1:-1]) / 2) / dx

    frame = eigenframe(model, u)
    lam = frame.values
    back = frame.components(backward)
    fwd = frame.components(forward)
    amplitude = lam * np.where(lam > 0, back, fwd)
    return -np.einsum('...ak,...k->...a', frame.vectors, amplitude)


def _speed_bound(model: SystemModel, u: np.ndarray) -> float:
    if model.max_speed is not None:
        return float(np.max(model.max_speed(u)))
    return float(np.abs(eigenframe(model, u).values).max())


def default_domain(model: SystemModel, t_end: float) -> tuple[float, float]:
    """
    A window holding the extreme characteristics from [-1.5, 1.5] with two units of margin each side.
    """
    reach = 1.1 * float(np.abs(model.base_values).max()) * t_end
    return Defaults.Z_MIN - reach - 2.0, Defaults.Z_MAX + reach + 2.0


def reference_solve(model: SystemModel, seed: SeedProfile, t_end: float, cfl: float = Defaults.CFL,
                    dx: float = Defaults.DX, limiter: str = Defaults.LIMITER, levels: int = Defaults.LEVELS,
                    cap: float = None, domain: tuple[float, float] = None, conservative: bool = None,
                    initial: np.ndarray = None, tvb_factor: float = Defaults.TVB_FACTOR) -> GridSolution:
    """
    Advance the seed (or an explicit initial grid state) to t_end, storing `levels` evenly spaced
    levels after t = 0. Stops early, keeping the levels so far, when the grid gradient passes the cap.

    The tvb limiter uses M = tvb_factor * max|f''| from the seed.
    """
    if not 0 < cfl <= 1:
        raise error.CFLViolation(f"CFL number must lie in (0, 1], got {cfl}")
    if not t_end > 0:
        raise error.InvalidParams(f"t_end must be positive, got {t_end}")
    if not dx > 0 or levels < 1:
        raise error.InvalidParams(f"Need dx > 0 and at least one level, got dx={dx}, levels={levels}")
    if seed.dimension != model.dimension:
        raise error.InvalidParams(f"Seed dimension {seed.dimension} does not match model dimension {model.dimension}")

    seed.require_admissible(model.ball_radius)

    if conservative is None:
        conservative = model.flux is not None and model.max_speed is not None
    if conservative and (model.flux is None or model.max_speed is None):
        raise error.InvalidParams(f"Model {model.name} has no conservative flux")

    rhs = conservative_rhs if conservative else upwind_rhs
    scheme = "muscl-llf" if conservative else "upwind-primitive"

    if domain is None:
        domain = default_domain(model, t_end)
    cells = int(math.ceil((domain[1] - domain[0]) / dx))
    x = domain[0] + dx * (np.arange(cells) + 0.5)

    u = seed.value(x) if initial is None else np.array(initial, dtype=float)
    if cap is None:
        cap = default_gradient_cap(seed)
    bound = tvb_factor * seed.max_curvature() * dx ** 2

    spacing = t_end / levels
    times = [0.0]
    states = [u.copy()]
    energy = [float(model.energy(u).sum() * dx)] if model.energy is not None else None
    event = None
    steps = 0

    logger.info(f"Solving {model.name} with {scheme}/{limiter}: {cells} cells, dx={dx:.4g}, t_end={t_end:.6g}")

    for n in range(1, levels + 1):
        speed = max(_speed_bound(model, u), 1e-12)
        substeps = max(1, int(math.ceil(spacing * speed / (cfl * dx))))
        dt = spacing / substeps

        for _ in range(substeps):
            stage = u + dt * rhs(model, u, dx, limiter, bound)
            u = 0.5 * (u + stage + dt * rhs(model, stage, dx, limiter, bound))
        steps += substeps

        if not np.all(np.isfinite(u)):
            raise error.NoConvergence(f"Grid state became non-finite by t={n * spacing:.6g}")

        radius = float(np.linalg.norm(u, axis=-1).max())
        if radius >= model.ball_radius:
            raise error.OutOfBall(f"|u| = {radius:.6g} reached δ = {model.ball_radius:.6g} at t={n * spacing:.6g}")

        times.append(n * spacing)
        states.append(u.copy())
        if energy is not None:
            energy.append(float(model.energy(u).sum() * dx))

        jumps = np.linalg.norm(np.diff(u, axis=0), axis=-1) / dx
        j = int(np.argmax(jumps))
        if jumps[j] > cap:
            event = SteepnessEvent(n * spacing, float(x[j] + dx / 2), float(jumps[j]), cap)
            logger.warning(f"Grid gradient cap hit: {event}")
            break

        logger.debug(f"Level {n}/{levels}: t={n * spacing:.6g}, {substeps} steps, |u|max={radius:.4g}")

    return GridSolution(
        x=x,
        times=np.array(times),
        states=np.array(states),
        scheme=scheme,
        limiter=limiter,
        cfl=cfl,
        steps=steps,
        energy=np.array(energy) if energy is not None else None,
        event=event,
    )
