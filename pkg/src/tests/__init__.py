import functools

import numpy as np

from shockform.crystal import CrystalParams, crystal_model
from shockform.seed import SimpleWaveSeed

# decoupled demo crystal: |c_111(0)| = 1/6, |c_222(0)| = 3 * 0.04 / 0.7
K1 = 0.81
K2 = 0.49
C111 = 0.05
C222 = 0.04

THETA = 0.12


def create_params(**overrides) -> CrystalParams:
    values = dict(k1=K1, k2=K2, c111=C111, c222=C222)
    values.update(overrides)
    return CrystalParams(**values)


def create_model(**overrides):
    return crystal_model(create_params(**overrides))


def random_states(radius: float, count: int = 200, seed: int = 7) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(count, 4))
    u *= (radius * rng.uniform(0, 1, size=(count, 1)) ** 0.25) / np.linalg.norm(u, axis=-1, keepdims=True)
    return u


@functools.lru_cache(maxsize=None)
def simple_wave_run(theta: float = THETA, dx: float = 0.05, levels: int = 200, z_points: int = 101):
    """
    Grid solve plus all four fans for a family-1 simple wave, run slightly past the exact shock time.
    Shared between test modules; treat the result as read-only.
    """
    from shockform.riemann import SimpleWave
    from shockform.solver import reference_solve
    from shockform.tracer import trace_characteristics, align_fans

    params = create_params()
    model = crystal_model(params)
    seed = SimpleWaveSeed(params, theta)
    exact = SimpleWave(params, seed)
    t_end = 1.1 * exact.shock_time()

    solution = reference_solve(model, seed, t_end, dx=dx, levels=levels)
    z = np.linspace(-1.5, 1.5, z_points)
    fans = align_fans([trace_characteristics(model, solution, i, z, seed) for i in range(4)])
    return model, seed, exact, solution, fans
