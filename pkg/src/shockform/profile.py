"""
Compactly supported polynomial bump phi(z) = (1 - z^2)^k on [-1, 1], zero elsewhere.

With k >= 3 the bump is twice continuously differentiable.
"""
import numpy as np
from scipy.optimize import minimize_scalar


def bump(z, power: int = 3) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1
    return np.where(inside, np.clip(1 - z ** 2, 0, None) ** power, 0.0)


def bump_derivative(z, power: int = 3) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1
    s = np.clip(1 - z ** 2, 0, None)
    return np.where(inside, -2 * power * z * s ** (power - 1), 0.0)


def bump_second_derivative(z, power: int = 3) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1
    s = np.clip(1 - z ** 2, 0, None)
    return np.where(inside, -2 * power * s ** (power - 1) + 4 * power * (power - 1) * z ** 2 * s ** (power - 2), 0.0)


def refined_max(fn, grid: np.ndarray) -> tuple[float, float]:
    """
    Maximum of a scalar function: dense sample on the grid, then a bounded local search around the
    best sample. Returns (location, value).
    """
    values = np.asarray(fn(grid), dtype=float)
    k = int(np.argmax(values))
    best_z, best = float(grid[k]), float(values[k])

    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda s: -float(fn(np.array([s]))[0]), bounds=(lo, hi), method='bounded',
                              options={'xatol': 1e-12})
        if res.success and -res.fun > best:
            best_z, best = float(res.x), float(-res.fun)

    return best_z, best
