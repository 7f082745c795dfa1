"""
Plane electromagnetic waves in a nonlinear crystal.

State u = (D_y, D_z, B_y, B_z). The energy density is cubic in D, which makes the flux matrix affine in u
and gives closed forms for the eigenstructure and the coefficients c^j_kl.
"""
import logging

import numpy as np

from . import error
from .const import Tolerance, Defaults
from .core import SystemModel, EigenFrame

logger = logging.getLogger('shockform.crystal')


class CrystalParams:
    def __init__(self, k1: float, k2: float, c111: float = 0.0, c112: float = 0.0, c122: float = 0.0,
                 c222: float = 0.0, strict: bool = True):
        self.k1 = float(k1)
        self.k2 = float(k2)
        self.c111 = float(c111)
        self.c112 = float(c112)
        self.c122 = float(c122)
        self.c222 = float(c222)
        self.strict = strict

        if strict and not 0 < self.k2 < self.k1 < 1:
            raise error.InvalidParams(
                f"Crystal constants must satisfy 0 < K2 < K1 < 1, got K1={self.k1}, K2={self.k2}"
            )

    @classmethod
    def vacuum(cls) -> 'CrystalParams':
        """
        Linear vacuum (K1 = K2 = 1, no nonlinearity); transport only, its eigenvalues are doubled.
        """
        return cls(1.0, 1.0, strict=False)

    @property
    def decoupled(self) -> bool:
        return self.c112 == 0 and self.c122 == 0

    @property
    def genuinely_nonlinear(self) -> bool:
        return self.c111 != 0 and self.c222 != 0

    @property
    def linear(self) -> bool:
        return self.c111 == 0 and self.c112 == 0 and self.c122 == 0 and self.c222 == 0

    def polarization(self, j: int) -> tuple[float, float]:
        """
        (K, C) of polarization 1 (D_y, B_z) or 2 (D_z, B_y).
        """
        return (self.k1, self.c111) if j == 1 else (self.k2, self.c222)

    def cubic_tensor(self) -> np.ndarray:
        """
        Third derivatives of the energy density with respect to (D_y, D_z).
        """
        t = np.empty((2, 2, 2))
        t[0, 0, 0] = 6 * self.c111
        t[0, 0, 1] = t[0, 1, 0] = t[1, 0, 0] = 2 * self.c112
        t[0, 1, 1] = t[1, 0, 1] = t[1, 1, 0] = 2 * self.c122
        t[1, 1, 1] = 6 * self.c222
        return t

    def as_dict(self) -> dict:
        return {
            "k1": self.k1, "k2": self.k2,
            "c111": self.c111, "c112": self.c112, "c122": self.c122, "c222": self.c222,
        }

    def __repr__(self):
        return (f"<crystal K1={self.k1}; K2={self.k2}; C111={self.c111}; C112={self.c112}; "
                f"C122={self.c122}; C222={self.c222}>")


class AuxiliaryScalars:
    """
    d1, d2, c and the derived m, r, R plus the eigenvector slopes at a state (or batch).

    The fast pair (+-sqrt(m+R)) uses nu = 1/mu = c/(r+R), the slow pair mu = -c/(r+R); both
    stay bounded as c -> 0. Below c_switch the leading-order series c/(2r) is used.
    """

    def __init__(self, params: CrystalParams, u: np.ndarray):
        u = np.asarray(u, dtype=float)
        dy, dz = u[..., 0], u[..., 1]

        self.d1 = params.k1 + 6 * params.c111 * dy + 2 * params.c112 * dz
        self.d2 = params.k2 + 2 * params.c122 * dy + 6 * params.c222 * dz
        self.c = 2 * params.c112 * dy + 2 * params.c122 * dz
        self.m = (self.d1 + self.d2) / 2
        self.r = (self.d1 - self.d2) / 2
        self.R = np.hypot(self.r, self.c)

        series = np.abs(self.c) < Defaults.C_SWITCH * np.abs(self.r)
        with np.errstate(divide='ignore', invalid='ignore'):
            self.nu = np.where(series, self.c / (2 * self.r), self.c / (self.r + self.R))
        self.series = series

    @property
    def mu(self) -> np.ndarray:
        """
        Slope of the slow pair, (lambda^2 - d2)/c for lambda^2 = m - R.
        """
        return -self.nu

    @property
    def mu_hat(self) -> np.ndarray:
        """
        The companion root (r + R)/c, infinite where c = 0.
        """
        with np.errstate(divide='ignore', invalid='ignore'):
            return (self.r + self.R) / self.c


def flux_matrix(params: CrystalParams, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    aux = AuxiliaryScalars(params, u)

    a = np.zeros(u.shape[:-1] + (4, 4))
    a[..., 0, 3] = 1.0
    a[..., 1, 2] = -1.0
    a[..., 2, 0] = -aux.c
    a[..., 2, 1] = -aux.d2
    a[..., 3, 0] = aux.d1
    a[..., 3, 1] = aux.c
    return a


def flux_derivative(params: CrystalParams, u, v) -> np.ndarray:
    """
    D_v a; exact since a is affine in u.
    """
    v = np.asarray(v, dtype=float)
    vy, vz = v[..., 0], v[..., 1]

    dd1 = 6 * params.c111 * vy + 2 * params.c112 * vz
    dd2 = 2 * params.c122 * vy + 6 * params.c222 * vz
    dc = 2 * params.c112 * vy + 2 * params.c122 * vz

    da = np.zeros(np.broadcast_shapes(np.shape(u), v.shape)[:-1] + (4, 4))
    da[..., 2, 0] = -dc
    da[..., 2, 1] = -dd2
    da[..., 3, 0] = dd1
    da[..., 3, 1] = dc
    return da


def base_frame(params: CrystalParams) -> np.ndarray:
    """
    Eigenvectors of a(0) ordered sqrt(K1), sqrt(K2), -sqrt(K2), -sqrt(K1); orthonormal for
    g = diag(1/2, 1/2, 1/(2 K2), 1/(2 K1)).
    """
    s1, s2 = np.sqrt(params.k1), np.sqrt(params.k2)
    return np.array([
        [1.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 1.0, 0.0],
        [0.0, -s2, s2, 0.0],
        [s1, 0.0, 0.0, -s1],
    ])


def _family(params: CrystalParams, aux: 'AuxiliaryScalars', lam: np.ndarray, i: int):
    """
    Base-oriented eigenvector, unscaled covector, norm, duality scale and c_lll of family i.
    """
    one = np.ones_like(lam)
    if i in (0, 3):
        nu = aux.nu
        vec = np.stack([one, nu, -lam * nu, lam], axis=-1)
        co = np.stack([lam, lam * nu, -nu, one], axis=-1)
        norm = np.sqrt(0.5 + nu ** 2 / 2 + lam ** 2 * nu ** 2 / (2 * params.k2) + lam ** 2 / (2 * params.k1))
        scale = 2 * lam * (1 + nu ** 2)
        poly = params.c111 + params.c112 * nu + params.c122 * nu ** 2 + params.c222 * nu ** 3
    else:
        mu = aux.mu
        vec = np.stack([mu, one, -lam, lam * mu], axis=-1)
        co = np.stack([lam * mu, lam, -one, mu], axis=-1)
        norm = np.sqrt(mu ** 2 / 2 + 0.5 + lam ** 2 / (2 * params.k2) + lam ** 2 * mu ** 2 / (2 * params.k1))
        scale = 2 * lam * (1 + mu ** 2)
        poly = params.c111 * mu ** 3 + params.c112 * mu ** 2 + params.c122 * mu + params.c222

    return vec, co, norm, scale, 3 * poly / (scale / 2 * norm)


def _orientation(diagonal: np.ndarray) -> np.ndarray:
    # flip wherever the base orientation gives c_lll > 0; keep it where c_lll is unresolvable
    return np.where(diagonal > Tolerance.SIGN, -1.0, 1.0)


def closed_form_eigen(params: CrystalParams, u, delta: float = None) -> EigenFrame:
    """
    Closed-form eigenvalues +-sqrt(m +- R), eigenvectors normalised in <.,.>_0 and their dual covectors.
    """
    u = np.asarray(u, dtype=float)
    if delta is not None and np.any(np.linalg.norm(u, axis=-1) >= 2 * delta):
        raise error.OutOfDomain(f"State outside the 2δ-ball (δ = {delta:.6g})")

    aux = AuxiliaryScalars(params, u)
    if np.any(aux.R <= Tolerance.GAP) or np.any(aux.m - aux.R <= Tolerance.GAP):
        raise error.NonHyperbolic("Crystal eigenvalues coincide or vanish")
    if np.any(aux.r <= 0):
        raise error.OutOfDomain("Closed-form frame requires d1 > d2")

    fast = np.sqrt(aux.m + aux.R)
    slow = np.sqrt(aux.m - aux.R)

    vectors = np.empty(u.shape[:-1] + (4, 4))
    dual = np.empty(u.shape[:-1] + (4, 4))
    values = np.stack([fast, slow, -slow, -fast], axis=-1)

    for i, lam in enumerate([fast, slow, -slow, -fast]):
        vec, co, norm, scale, diagonal = _family(params, aux, lam, i)
        sign = _orientation(diagonal)

        vectors[..., :, i] = (sign / norm)[..., None] * vec
        dual[..., i, :] = (sign * norm / scale)[..., None] * co

    return EigenFrame(u, values, vectors, dual)


def clll(params: CrystalParams, u, delta: float = None) -> np.ndarray:
    """
    The four diagonal coefficients c_lll, ordered like the eigenvalues.
    """
    frame = closed_form_eigen(params, u, delta)
    aux = AuxiliaryScalars(params, frame.state)
    out = []

    for i in range(4):
        diagonal = _family(params, aux, frame.values[..., i], i)[-1]
        out.append(_orientation(diagonal) * diagonal)

    return np.stack(out, axis=-1)


def full_cjkl(params: CrystalParams, u, delta: float = None) -> np.ndarray:
    """
    All c^j_kl in closed form: the (D_y, D_z) parts of e_k and e_l contracted with the cubic energy
    tensor, then with the B parts of e*^j. Indexed [..., j, k, l], symmetric in k and l.
    """
    frame = closed_form_eigen(params, u, delta)
    t = params.cubic_tensor()

    d_part = frame.vectors[..., :2, :]
    # e*^j_4 (row of E_y) enters with +, e*^j_3 (row of -E_z) with -
    b_part = np.stack([frame.dual[..., :, 3], -frame.dual[..., :, 2]], axis=-1)

    return np.einsum('...ja,abc,...bl,...ck->...jkl', b_part, t, d_part, d_part)


def admissible_delta(params: CrystalParams, h_fraction: float = Defaults.H_FRACTION,
                     delta_max: float = Defaults.DELTA_MAX) -> tuple[float, float]:
    """
    The margin h and the largest ball radius δ on whose 2δ-ball d1, d2 and c stay in the range that
    keeps 0 < m - R < m0 < m + R < 1.
    """
    if not 0 < h_fraction <= 1:
        raise error.InvalidParams(f"h_fraction must lie in (0, 1], got {h_fraction}")
    if not params.strict or not 0 < params.k2 < params.k1 < 1:
        raise error.InvalidParams(f"Admissibility needs 0 < K2 < K1 < 1, got K1={params.k1}, K2={params.k2}")

    k1, k2 = params.k1, params.k2
    m0 = (k1 + k2) / 2
    r0 = (k1 - k2) / 2
    h = h_fraction * min(r0, k2, 1 - k1) / (2 * m0)
    c_cap = min(k1 * (k2 - h * (k1 + k2)), (1 - k2) * (1 - k1 - h * (k1 + k2)))

    theta = np.linspace(0, 2 * np.pi, Defaults.BOUNDARY_ANGLES, endpoint=False)
    ring = np.zeros((len(theta), 4))
    ring[:, 0] = np.cos(theta)
    ring[:, 1] = np.sin(theta)

    def holds(delta: float) -> bool:
        aux = AuxiliaryScalars(params, 2 * delta * ring)
        return bool(np.all(np.abs(k1 - aux.d1) < h * k1) and np.all(np.abs(k2 - aux.d2) < h * k2)
                    and np.all(aux.c ** 2 < c_cap))

    if holds(delta_max):
        return h, delta_max

    lo, hi = 0.0, delta_max
    for _ in range(Defaults.BISECTION_STEPS):
        mid = (lo + hi) / 2
        if holds(mid):
            lo = mid
        else:
            hi = mid

    delta = lo * Defaults.DELTA_SHRINK
    logger.debug(f"Admissible h={h:.6g}, δ={delta:.6g}")
    return h, delta


def E_from_D(params: CrystalParams, d_y, d_z) -> tuple[np.ndarray, np.ndarray]:
    e_y = (params.k1 * d_y + 3 * params.c111 * d_y ** 2 + 2 * params.c112 * d_y * d_z
           + params.c122 * d_z ** 2)
    e_z = (params.k2 * d_z + params.c112 * d_y ** 2 + 2 * params.c122 * d_y * d_z
           + 3 * params.c222 * d_z ** 2)
    return e_y, e_z


def _decoupled_inverse(k: float, c: float, e):
    # root of K D + 3C D^2 = E that vanishes at E = 0, written without cancellation
    radicand = k ** 2 + 12 * c * np.asarray(e, dtype=float)
    if np.any(radicand < 0):
        raise error.NegativeRadicand("Field outside the range of the constitutive map")
    return 2 * e / (k + np.sqrt(radicand))


def _newton_inverse(params: CrystalParams, e_y: float, e_z: float) -> tuple[float, float]:
    target = np.array([e_y, e_z], dtype=float)
    d = np.zeros(2)

    def residual(x):
        return np.array(E_from_D(params, x[0], x[1])) - target

    res = residual(d)
    norm = np.linalg.norm(res)
    for _ in range(Defaults.NEWTON_MAX_ITER):
        if norm <= Tolerance.NEWTON * max(1.0, np.linalg.norm(target)):
            return float(d[0]), float(d[1])

        aux = AuxiliaryScalars(params, np.array([d[0], d[1], 0.0, 0.0]))
        jac = np.array([[aux.d1, aux.c], [aux.c, aux.d2]])
        if abs(np.linalg.det(jac)) < 1e-300 or np.linalg.cond(jac) > 1e14:
            raise error.SingularJacobian(f"Constitutive Jacobian singular at D={d}")

        step = np.linalg.solve(jac, -res)
        for _ in range(Defaults.NEWTON_HALVINGS):
            trial = d + step
            trial_res = residual(trial)
            if np.linalg.norm(trial_res) < norm or np.linalg.norm(step) < 1e-300:
                break
            step = step / 2
        d = trial
        res = trial_res
        norm = np.linalg.norm(res)

    if norm <= Tolerance.NEWTON * max(1.0, np.linalg.norm(target)):
        return float(d[0]), float(d[1])

    raise error.NoConvergence(f"Newton did not reach E=({e_y}, {e_z}); residual {norm:.3g}")


def D_from_E(params: CrystalParams, e_y, e_z):
    """
    Invert the constitutive map near D = 0: closed form when decoupled, damped Newton otherwise.
    """
    if params.decoupled:
        return _decoupled_inverse(params.k1, params.c111, e_y), _decoupled_inverse(params.k2, params.c222, e_z)

    if np.ndim(e_y) == 0 and np.ndim(e_z) == 0:
        return _newton_inverse(params, float(e_y), float(e_z))

    e_y, e_z = np.broadcast_arrays(np.asarray(e_y, dtype=float), np.asarray(e_z, dtype=float))
    d_y = np.empty(e_y.shape)
    d_z = np.empty(e_z.shape)
    for idx in np.ndindex(e_y.shape):
        d_y[idx], d_z[idx] = _newton_inverse(params, float(e_y[idx]), float(e_z[idx]))
    return d_y, d_z


def energy_density(params: CrystalParams, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    dy, dz, by, bz = u[..., 0], u[..., 1], u[..., 2], u[..., 3]
    return (0.5 * by ** 2 + 0.5 * bz ** 2 + 0.5 * params.k1 * dy ** 2 + 0.5 * params.k2 * dz ** 2
            + params.c111 * dy ** 3 + params.c112 * dy ** 2 * dz + params.c122 * dy * dz ** 2
            + params.c222 * dz ** 3)


def poynting_flux(params: CrystalParams, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    e_y, e_z = E_from_D(params, u[..., 0], u[..., 1])
    return e_y * u[..., 3] - e_z * u[..., 2]


def conservative_flux(params: CrystalParams, u) -> np.ndarray:
    """
    F(u) = (B_z, -B_y, -E_z, E_y); dF/du equals the flux matrix.
    """
    u = np.asarray(u, dtype=float)
    e_y, e_z = E_from_D(params, u[..., 0], u[..., 1])
    return np.stack([u[..., 3], -u[..., 2], -e_z, e_y], axis=-1)


def max_speed(params: CrystalParams, u) -> np.ndarray:
    aux = AuxiliaryScalars(params, u)
    return np.sqrt(np.maximum(aux.m + aux.R, 0.0))


def crystal_model(params: CrystalParams, delta: float = None, analytic: bool = True,
                  h_fraction: float = Defaults.H_FRACTION) -> SystemModel:
    """
    The crystal as a SystemModel. analytic=False leaves eigenframes and derivatives to the numeric
    machinery of the core, which makes it an independent oracle.
    """
    if delta is None:
        delta = admissible_delta(params, h_fraction)[1] if params.strict else Defaults.DELTA_MAX

    return SystemModel(
        dimension=4,
        flux_matrix=lambda u: flux_matrix(params, u),
        ball_radius=delta,
        base_frame=base_frame(params),
        analytic_frame=(lambda u: closed_form_eigen(params, u)) if analytic else None,
        flux_derivative=(lambda u, v: flux_derivative(params, u, v)) if analytic else None,
        flux=lambda u: conservative_flux(params, u),
        max_speed=lambda u: max_speed(params, u),
        energy=lambda u: energy_density(params, u),
        name="crystal" if params.strict else "vacuum",
    )
