import logging
import math

import numpy as np

from . import error
from .const import Defaults
from .profile import bump, bump_derivative, bump_second_derivative

logger = logging.getLogger('shockform.seed')


class SeedProfile:
    """
    Initial data f = theta * f0 with f0 compactly supported in [-1, 1].

    Subclasses provide value/derivative/second_derivative of f (not f0) over arrays of z; they
    return shape (len(z), N).
    """
    kind = None

    def __init__(self, theta: float, dimension: int, power: int = Defaults.BUMP_POWER):
        if theta < 0:
            raise error.InvalidParams(f"Seed amplitude must be non-negative, got {theta}")
        if power < 3:
            raise error.InvalidParams(f"Bump power must be at least 3 for a C^2 seed, got {power}")

        self.theta = float(theta)
        self.dimension = dimension
        self.power = power

    @property
    def amplitude(self) -> float:
        return self.theta

    def value(self, z) -> np.ndarray:
        raise NotImplementedError()

    def derivative(self, z) -> np.ndarray:
        raise NotImplementedError()

    def second_derivative(self, z) -> np.ndarray:
        raise NotImplementedError()

    def shape_derivative(self, z) -> np.ndarray:
        """
        f0' = f' / theta.
        """
        if self.theta == 0:
            return np.zeros((len(np.atleast_1d(z)), self.dimension))
        return self.derivative(z) / self.theta

    def samples(self, n: int = Defaults.SEED_SAMPLES) -> np.ndarray:
        return np.linspace(-1.0, 1.0, n)

    def sup_norm(self) -> float:
        z = self.samples()
        return float(np.linalg.norm(self.value(z), axis=-1).max())

    def max_slope(self) -> float:
        """
        max_z |f0'(z)|.
        """
        z = self.samples()
        return float(np.linalg.norm(self.shape_derivative(z), axis=-1).max())

    def max_curvature(self) -> float:
        """
        max_z |f''(z)|, zero for a zero seed.
        """
        z = self.samples()
        return float(np.linalg.norm(self.second_derivative(z), axis=-1).max())

    @property
    def is_zero(self) -> bool:
        return self.theta == 0 or self.sup_norm() == 0

    def require_admissible(self, delta: float):
        norm = self.sup_norm()
        if norm >= delta:
            raise error.OutOfBall(f"Seed sup norm {norm:.6g} is not below δ = {delta:.6g}")

    def __repr__(self):
        return f"<seed kind={self.kind}; θ={self.theta}; k={self.power}>"


class BumpSeed(SeedProfile):
    """
    f(z) = theta * a * (1 - z^2)^k for per-component amplitudes a.
    """
    kind = "bump"

    def __init__(self, amplitudes, theta: float, power: int = Defaults.BUMP_POWER):
        amplitudes = np.asarray(amplitudes, dtype=float)
        if amplitudes.ndim != 1 or len(amplitudes) == 0:
            raise error.InvalidParams("Bump amplitudes must be a non-empty vector")

        super().__init__(theta, len(amplitudes), power)
        self.amplitudes = amplitudes

    def _scaled(self, profile: np.ndarray) -> np.ndarray:
        return self.theta * np.atleast_1d(profile)[:, None] * self.amplitudes[None, :]

    def value(self, z) -> np.ndarray:
        return self._scaled(bump(z, self.power))

    def derivative(self, z) -> np.ndarray:
        return self._scaled(bump_derivative(z, self.power))

    def second_derivative(self, z) -> np.ndarray:
        return self._scaled(bump_second_derivative(z, self.power))


class SimpleWaveSeed(SeedProfile):
    """
    Decoupled crystal only: the fastest family's Riemann invariant is theta * (1 - z^2)^k and all
    others vanish, so the solution stays a single simple wave until it breaks.
    """
    kind = "simple_wave"

    def __init__(self, params, theta: float, power: int = Defaults.BUMP_POWER):
        from .riemann import require_decoupled

        require_decoupled(params)
        super().__init__(theta, 4, power)
        self.params = params

    def _invariants(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=float))
        m = np.zeros((len(z), 4))
        m[:, 0] = self.theta * bump(z, self.power)
        return m

    def value(self, z) -> np.ndarray:
        from .riemann import invert_invariants

        return invert_invariants(self.params, self._invariants(z))

    def _chain(self, z):
        # du/dm1 and d2u/dm1^2 along the seed; only D_y and B_z respond to m1
        k, c = self.params.polarization(1)
        u = self.value(z)
        d = k + 6 * c * u[:, 0]
        first = np.zeros_like(u)
        first[:, 0] = 0.5 / np.sqrt(d)
        first[:, 3] = 0.5
        second = np.zeros_like(u)
        second[:, 0] = -1.5 * c * d ** -1.5 * first[:, 0]
        return first, second

    def derivative(self, z) -> np.ndarray:
        first, _ = self._chain(z)
        dm = self.theta * np.atleast_1d(bump_derivative(z, self.power))
        return first * dm[:, None]

    def second_derivative(self, z) -> np.ndarray:
        first, second = self._chain(z)
        dm = self.theta * np.atleast_1d(bump_derivative(z, self.power))
        ddm = self.theta * np.atleast_1d(bump_second_derivative(z, self.power))
        return second * (dm ** 2)[:, None] + first * ddm[:, None]


def zero_seed(dimension: int) -> BumpSeed:
    return BumpSeed(np.zeros(dimension), 0.0)


def build_seed(kind: str, theta: float, amplitudes=None, power: int = Defaults.BUMP_POWER,
               params=None, dimension: int = 4) -> SeedProfile:
    if kind == "bump":
        if amplitudes is None:
            amplitudes = np.zeros(dimension)
            amplitudes[0] = 1.0
        return BumpSeed(amplitudes, theta, power)

    if kind == "simple_wave":
        if params is None:
            raise error.InvalidParams("Simple-wave seeds need crystal parameters")
        return SimpleWaveSeed(params, theta, power)

    raise error.InvalidParams(f"Unknown seed kind '{kind}'")


def gradient_cap(seed: SeedProfile, factor: float = Defaults.GRADIENT_CAP_FACTOR) -> float:
    """
    Grid gradient above which the numerical solution is declared shocked: factor * max|f0'| / theta.
    """
    slope = seed.max_slope()
    if seed.theta == 0 or slope == 0:
        return math.inf
    return factor * slope / seed.theta
