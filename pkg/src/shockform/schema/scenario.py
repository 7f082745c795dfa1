"""
Scenario files: TOML, checked by a voluptuous schema, then hydrated into Schema sections.
"""
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np
import voluptuous as vol

from . import Schema
from .. import error
from ..const import Defaults, Limiter, ModelKind, SeedKind

logger = logging.getLogger('shockform.schema.scenario')

Real = vol.Coerce(float)


def positive(value):
    return vol.All(Real, vol.Range(min=0, min_included=False))(value)


MODEL_SCHEMA = vol.Schema({
    vol.Optional("kind", default=ModelKind.CRYSTAL): vol.In(ModelKind.ALL),
    vol.Optional("k1", default=0.81): Real,
    vol.Optional("k2", default=0.49): Real,
    vol.Optional("c111", default=0.05): Real,
    vol.Optional("c112", default=0.0): Real,
    vol.Optional("c122", default=0.0): Real,
    vol.Optional("c222", default=0.04): Real,
    vol.Optional("h_fraction", default=Defaults.H_FRACTION): vol.All(Real, vol.Range(min=0, max=1, min_included=False)),
    vol.Optional("delta"): positive,
    vol.Optional("analytic", default=True): bool,
})

SEED_SCHEMA = vol.Schema({
    vol.Optional("kind", default=SeedKind.BUMP): vol.In(SeedKind.ALL),
    vol.Required("theta"): vol.All(Real, vol.Range(min=0)),
    vol.Optional("amplitudes"): [Real],
    vol.Optional("power", default=Defaults.BUMP_POWER): vol.All(int, vol.Range(min=3)),
})

NUMERICS_SCHEMA = vol.Schema({
    vol.Optional("t_end"): positive,
    vol.Optional("dx", default=Defaults.DX): positive,
    vol.Optional("cfl", default=Defaults.CFL): Real,
    vol.Optional("limiter", default=Defaults.LIMITER): vol.In(Limiter.ALL),
    vol.Optional("levels", default=Defaults.LEVELS): vol.All(int, vol.Range(min=1)),
    vol.Optional("z_min", default=Defaults.Z_MIN): Real,
    vol.Optional("z_max", default=Defaults.Z_MAX): Real,
    vol.Optional("z_points", default=Defaults.Z_POINTS): vol.All(int, vol.Range(min=3)),
    vol.Optional("substeps", default=Defaults.TRACE_SUBSTEPS): vol.All(int, vol.Range(min=1)),
    vol.Optional("rho_stop", default=Defaults.RHO_STOP): Real,
    vol.Optional("epsilon", default=Defaults.EPSILON): Real,
    vol.Optional("slack", default=Defaults.SLACK): vol.All(Real, vol.Range(min=0)),
    vol.Optional("samples", default=Defaults.SAMPLES): vol.All(int, vol.Range(min=1)),
    vol.Optional("gradient_cap_factor", default=Defaults.GRADIENT_CAP_FACTOR): positive,
    vol.Optional("tvb_factor", default=Defaults.TVB_FACTOR): vol.All(Real, vol.Range(min=0)),
    vol.Optional("domain"): vol.All([Real], vol.Length(min=2, max=2)),
})

OUTPUTS_SCHEMA = vol.Schema({
    vol.Optional("directory", default="out"): str,
    vol.Optional("fans", default=True): bool,
    vol.Optional("diagnostics", default=True): bool,
    vol.Optional("energy", default=True): bool,
    vol.Optional("shock", default=True): bool,
    vol.Optional("seed_stats", default=True): bool,
})

EXACT_SCHEMA = vol.Schema({
    vol.Optional("amplitudes", default=[0.05, 0.04]): vol.All([Real], vol.Length(min=2, max=2)),
    vol.Optional("power", default=Defaults.BUMP_POWER): vol.All(int, vol.Range(min=3)),
    vol.Optional("x0", default=-1.0): Real,
    vol.Optional("times", default=[0.5, 1.0, 2.0]): [positive],
    vol.Optional("x_min", default=-1.0): Real,
    vol.Optional("x_max", default=2.0): Real,
    vol.Optional("points", default=301): vol.All(int, vol.Range(min=2)),
})

VERIFY_SCHEMA = vol.Schema({
    vol.Optional("samples", default=256): vol.All(int, vol.Range(min=1)),
    vol.Optional("break_sign_convention", default=False): bool,
})

SCENARIO_SCHEMA = vol.Schema({
    vol.Optional("model", default={}): MODEL_SCHEMA,
    vol.Required("seed"): SEED_SCHEMA,
    vol.Optional("numerics", default={}): NUMERICS_SCHEMA,
    vol.Optional("outputs", default={}): OUTPUTS_SCHEMA,
    vol.Optional("exact"): EXACT_SCHEMA,
    vol.Optional("verify", default={}): VERIFY_SCHEMA,
})


class ModelSection(Schema):
    kind: str = ModelKind.CRYSTAL
    k1: float = 0.81
    k2: float = 0.49
    c111: float = 0.05
    c112: float = 0.0
    c122: float = 0.0
    c222: float = 0.04
    h_fraction: float = Defaults.H_FRACTION
    delta: float = None
    analytic: bool = True

    def _validate(self):
        if self.kind == ModelKind.CRYSTAL and not 0 < self.k2 < self.k1 < 1:
            raise error.Malformed(f"Crystal constants must satisfy 0 < K2 < K1 < 1, got K1={self.k1}, K2={self.k2}")

    def params(self):
        from ..crystal import CrystalParams

        if self.kind == ModelKind.VACUUM:
            return CrystalParams.vacuum()
        return CrystalParams(self.k1, self.k2, self.c111, self.c112, self.c122, self.c222)


class SeedSection(Schema):
    kind: str = SeedKind.BUMP
    theta: float = None
    amplitudes: list = None
    power: int = Defaults.BUMP_POWER

    def _validate(self):
        if self.theta is None:
            raise error.Malformed("Seed amplitude theta is required")

        if self.amplitudes is not None and len(self.amplitudes) != 4:
            raise error.Malformed(f"Seed amplitudes must have one entry per state component (4), got {len(self.amplitudes)}")


class NumericsSection(Schema):
    t_end: float = None
    dx: float = Defaults.DX
    cfl: float = Defaults.CFL
    limiter: str = Defaults.LIMITER
    levels: int = Defaults.LEVELS
    z_min: float = Defaults.Z_MIN
    z_max: float = Defaults.Z_MAX
    z_points: int = Defaults.Z_POINTS
    substeps: int = Defaults.TRACE_SUBSTEPS
    rho_stop: float = Defaults.RHO_STOP
    epsilon: float = Defaults.EPSILON
    slack: float = Defaults.SLACK
    samples: int = Defaults.SAMPLES
    gradient_cap_factor: float = Defaults.GRADIENT_CAP_FACTOR
    tvb_factor: float = Defaults.TVB_FACTOR
    domain: list = None

    def _validate(self):
        if not 0 < self.rho_stop < 1:
            raise error.Malformed(f"rho_stop must lie in (0, 1), got {self.rho_stop}")

        if not 0 < self.epsilon < 0.01:
            raise error.Malformed(f"epsilon must lie in (0, 1/100), got {self.epsilon}")

        if not 0 < self.cfl <= 1:
            raise error.Malformed(f"cfl must lie in (0, 1], got {self.cfl}")

        if not self.z_min < self.z_max:
            raise error.Malformed(f"z grid must be increasing, got [{self.z_min}, {self.z_max}]")

        if self.domain is not None and not self.domain[0] < self.domain[1]:
            raise error.Malformed(f"Domain must be increasing, got {self.domain}")

    def z_grid(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.z_points)


class OutputsSection(Schema):
    directory: str = "out"
    fans: bool = True
    diagnostics: bool = True
    energy: bool = True
    shock: bool = True
    seed_stats: bool = True


class ExactSection(Schema):
    amplitudes: list = None
    power: int = Defaults.BUMP_POWER
    x0: float = -1.0
    times: list = None
    x_min: float = -1.0
    x_max: float = 2.0
    points: int = 301

    def _validate(self):
        if not self.x0 < 0:
            raise error.Malformed(f"Incident wave must start in the vacuum (x0 < 0), got {self.x0}")

        if not self.x_min < self.x_max:
            raise error.Malformed(f"Slice range must be increasing, got [{self.x_min}, {self.x_max}]")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)


class VerifySection(Schema):
    samples: int = 256
    break_sign_convention: bool = False


class Scenario(Schema):
    model: ModelSection = None
    seed: SeedSection = None
    numerics: NumericsSection = None
    outputs: OutputsSection = None
    exact: ExactSection = None
    verify: VerifySection = None

    def _set_model(self, v):
        self.model = ModelSection(v)

    def _set_seed(self, v):
        self.seed = SeedSection(v)

    def _set_numerics(self, v):
        self.numerics = NumericsSection(v)

    def _set_outputs(self, v):
        self.outputs = OutputsSection(v)

    def _set_exact(self, v):
        self.exact = ExactSection(v)

    def _set_verify(self, v):
        self.verify = VerifySection(v)

    def _validate(self):
        if self.model is None or self.seed is None:
            raise error.Malformed("Scenario needs model and seed sections")

        if self.seed.kind == SeedKind.SIMPLE_WAVE and self.model.kind != ModelKind.CRYSTAL:
            raise error.Malformed("Simple-wave seeds need a crystal model")

    def get(self, key: str | list, default=None):
        """
        Nested lookup, eg get(["numerics", "dx"]).
        """
        keys = key if isinstance(key, list) else [key]
        node = self
        for k in keys:
            node = node.get(k) if isinstance(node, dict) else getattr(node, k, None)
            if node is None:
                return default
        return node

    def params(self):
        return self.model.params()

    def system(self):
        from ..crystal import crystal_model

        return crystal_model(self.params(), self.model.delta, self.model.analytic, self.model.h_fraction)

    def seed_profile(self):
        from ..seed import build_seed

        return build_seed(self.seed.kind, self.seed.theta, self.seed.amplitudes, self.seed.power, self.params())


def validate(raw: dict) -> Scenario:
    try:
        data = SCENARIO_SCHEMA(raw)
    except vol.Invalid as e:
        raise error.Malformed(f"Invalid scenario: {e}")

    return Scenario(data)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except FileNotFoundError:
        raise error.Malformed(f"Scenario file '{path}' not found")
    except tomllib.TOMLDecodeError as e:
        raise error.Malformed(f"Scenario file '{path}' is not valid TOML: {e}")

    scenario = validate(raw)
    logger.debug(f"Loaded scenario from {path}")
    return scenario
