"""
Generic machinery for strictly hyperbolic quasi-linear systems u_t + a(u) u_x = 0.

Every operation accepts a single state of shape (N,) or a batch of shape (..., N); frames and
coefficients carry the same leading batch shape.
"""
import logging

import numpy as np
from scipy.stats import qmc

from . import error
from .const import Tolerance, Defaults

logger = logging.getLogger('shockform.core')


class BaseMetric:
    """
    Scalar product <v, w>_0 = sum_k (e0*^k v)(e0*^k w), for which the base frame is orthonormal.
    """

    def __init__(self, base_frame: np.ndarray):
        self.frame = np.asarray(base_frame, dtype=float)

        if np.linalg.cond(self.frame) > 1e12:
            raise error.InvalidParams("Base frame is not invertible")

        self.dual = np.linalg.inv(self.frame)
        self.gram = self.dual.T @ self.dual
        self.dual_gram = self.frame @ self.frame.T

    def inner(self, v: np.ndarray, w: np.ndarray) -> np.ndarray:
        return np.einsum('...i,ij,...j->...', v, self.gram, w)

    def norm(self, v: np.ndarray) -> np.ndarray:
        return np.sqrt(self.inner(v, v))

    def dual_norm(self, alpha: np.ndarray) -> np.ndarray:
        return np.sqrt(np.einsum('...i,ij,...j->...', alpha, self.dual_gram, alpha))


class SystemModel:
    """
    An N-dimensional quasi-linear system.

    flux_matrix maps states (..., N) to matrices (..., N, N). Optional hooks:
      analytic_frame(u) -> EigenFrame         closed-form eigenstructure
      flux_derivative(u, v) -> (..., N, N)    D_v a(u)
      flux(u) -> (..., N)                     conservative flux F with dF/du = a
      max_speed(u) -> (...)                   largest |lambda| at u
      energy(u) -> (...)                      conserved density, for diagnostics
    """

    def __init__(self, dimension: int, flux_matrix, ball_radius: float, base_frame: np.ndarray = None,
                 analytic_frame=None, flux_derivative=None, flux=None, max_speed=None, energy=None,
                 name: str = "generic"):
        if dimension < 1:
            raise error.InvalidParams(f"Dimension must be positive, got {dimension}")

        if not ball_radius > 0:
            raise error.InvalidParams(f"Ball radius must be positive, got {ball_radius}")

        self.dimension = dimension
        self.flux_matrix = flux_matrix
        self.ball_radius = float(ball_radius)
        self.analytic_frame = analytic_frame
        self.flux_derivative = flux_derivative
        self.flux = flux
        self.max_speed = max_speed
        self.energy = energy
        self.name = name

        a0 = np.asarray(flux_matrix(np.zeros(dimension)), dtype=float)
        if base_frame is None:
            base_frame = _base_frame_from(a0)

        self.metric = BaseMetric(base_frame)
        self.base_frame = self.metric.frame

        # a(0) e0_i = lambda_i(0) e0_i
        projected = self.metric.dual @ a0 @ self.base_frame
        self.base_values = np.diag(projected).copy()
        off = projected - np.diag(self.base_values)
        if np.abs(off).max() > Tolerance.BASE_FRAME * max(1.0, np.abs(a0).max()):
            raise error.InvalidParams("Base frame does not diagonalise a(0)")

        if np.any(np.diff(self.base_values) > 0):
            raise error.InvalidParams("Base frame columns must be ordered by decreasing eigenvalue")

    @property
    def fd_step(self) -> float:
        return Defaults.FD_STEP_FACTOR * self.ball_radius

    def states(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[-1:] != (self.dimension,):
            raise error.InvalidParams(f"State shape {u.shape} does not end in dimension {self.dimension}")
        return u

    def check_domain(self, u: np.ndarray):
        radius = np.linalg.norm(u, axis=-1)
        if np.any(radius >= 2 * self.ball_radius):
            raise error.OutOfDomain(
                f"State norm {radius.max():.6g} outside the 2δ-ball (δ = {self.ball_radius:.6g})"
            )

    def __repr__(self):
        return f"<model name={self.name}; N={self.dimension}; δ={self.ball_radius:.6g}>"


class EigenFrame:
    """
    Eigenstructure at a state: values sorted decreasing, vectors[..., :, i] = e_i with ||e_i||_0 = 1,
    dual[..., i, :] = e*^i with e*^i e_j = δ^i_j.
    """

    def __init__(self, state: np.ndarray, values: np.ndarray, vectors: np.ndarray, dual: np.ndarray):
        self.state = state
        self.values = values
        self.vectors = vectors
        self.dual = dual

    def vector(self, i: int) -> np.ndarray:
        return self.vectors[..., :, i]

    def covector(self, i: int) -> np.ndarray:
        return self.dual[..., i, :]

    def components(self, du: np.ndarray) -> np.ndarray:
        """
        Dual-frame components e*^k du, eg w^k = e*^k u_x.
        """
        return np.einsum('...ka,...a->...k', self.dual, du)

    def flip(self, signs: np.ndarray) -> 'EigenFrame':
        return EigenFrame(self.state, self.values, self.vectors * signs[..., None, :], self.dual * signs[..., :, None])


class StructureCoefficients:
    """
    c[..., j, k, l] = c^j_kl = e*^j (D_{e_l} a) e_k and gamma[..., i, l, m] = gamma^i_lm.
    """

    def __init__(self, c: np.ndarray, gamma: np.ndarray):
        self.c = c
        self.gamma = gamma

    def diagonal(self) -> np.ndarray:
        """
        c^i_ii for each family.
        """
        n = self.c.shape[-1]
        idx = np.arange(n)
        return self.c[..., idx, idx, idx]


def base_metric(model: SystemModel) -> BaseMetric:
    return model.metric


def _base_frame_from(a0: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eig(a0)
    order = np.argsort(-values.real)
    return vectors.real[:, order]


def spectrum(model: SystemModel, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Sorted real eigenvalues and raw eigenvectors of a(u); raises NonHyperbolic on complex or
    coincident eigenvalues.
    """
    a = np.asarray(model.flux_matrix(u), dtype=float)
    values, vectors = np.linalg.eig(a)

    scale = np.maximum(1.0, np.abs(values).max(axis=-1, keepdims=True))
    if np.any(np.abs(values.imag) > Tolerance.GAP * scale):
        raise error.NonHyperbolic("Flux matrix has complex eigenvalues")

    values = values.real
    vectors = vectors.real
    order = np.argsort(-values, axis=-1)
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[..., None, :], axis=-1)

    gaps = values[..., :-1] - values[..., 1:]
    if np.any(gaps <= Tolerance.GAP * scale):
        raise error.NonHyperbolic(f"Coincident eigenvalues (smallest gap {gaps.min():.3g})")

    return values, vectors


def directional_derivative(model: SystemModel, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    D_v a(u), analytically when the model supplies it, else by fourth-order central differences.
    """
    if model.flux_derivative is not None:
        return np.asarray(model.flux_derivative(u, v), dtype=float)

    h = model.fd_step
    model.check_domain(u + 2 * h * v)
    model.check_domain(u - 2 * h * v)

    return (-model.flux_matrix(u + 2 * h * v) + 8 * model.flux_matrix(u + h * v)
            - 8 * model.flux_matrix(u - h * v) + model.flux_matrix(u - 2 * h * v)) / (12 * h)


def numeric_frame(model: SystemModel, u: np.ndarray) -> EigenFrame:
    values, vectors = spectrum(model, u)

    vectors = vectors / model.metric.norm(np.swapaxes(vectors, -1, -2))[..., None, :]

    # continuity with the base frame
    overlap = model.metric.inner(np.swapaxes(vectors, -1, -2), model.base_frame.T)
    vectors = vectors * np.where(overlap < 0, -1.0, 1.0)[..., None, :]
    frame = EigenFrame(u, values, vectors, np.linalg.inv(vectors))

    # c^i_ii flips sign with e_i; pick c^i_ii < 0 wherever it is resolvable
    diag = np.stack([
        np.einsum('...a,...ab,...b->...', frame.covector(i),
                  directional_derivative(model, u, frame.vector(i)), frame.vector(i))
        for i in range(model.dimension)
    ], axis=-1)
    signs = np.where(diag > Tolerance.SIGN, -1.0, 1.0)

    return frame.flip(signs)


def eigenframe(model: SystemModel, u) -> EigenFrame:
    """
    Eigenframe at u (single state or batch), normalised in <.,.>_0 with c^i_ii < 0.
    """
    u = model.states(u)
    model.check_domain(u)

    if model.analytic_frame is not None:
        return model.analytic_frame(u)

    return numeric_frame(model, u)


def structure_coeffs(model: SystemModel, u, frame: EigenFrame) -> StructureCoefficients:
    """
    Assemble c^j_kl and the gamma^i_lm coefficients of the w^i transport equation.
    """
    u = model.states(u)
    n = model.dimension

    deriv = np.stack([directional_derivative(model, u, frame.vector(l)) for l in range(n)], axis=-3)
    c = np.einsum('...ja,...lab,...bk->...jkl', frame.dual, deriv, frame.vectors)

    lam = frame.values
    diff = lam[..., :, None] - lam[..., None, :]
    eye = np.eye(n, dtype=bool)
    inv_diff = np.where(eye, 0.0, 1.0 / np.where(eye, 1.0, diff))

    # l, m != i
    a = (lam[..., None, :, None] - lam[..., None, None, :]) * inv_diff[..., :, :, None] * c
    gamma = 0.5 * (a + np.swapaxes(a, -1, -2))

    # m != i
    overlap = np.einsum('...al,ab,...bi->...li', frame.vectors, model.metric.gram, frame.vectors)
    coupled = diff * np.einsum('...il,...lim,...li->...im', inv_diff, c, overlap)
    mixed = 0.5 * (-np.einsum('...imi->...im', c) - np.einsum('...iim->...im', c) + coupled)

    idx = np.arange(n)
    ii, mm = idx[:, None], idx[None, :]
    gamma[..., ii, ii, mm] = mixed
    gamma[..., ii, mm, ii] = mixed
    gamma[..., idx, idx, idx] = -c[..., idx, idx, idx]

    return StructureCoefficients(c, gamma)


def frame_residuals(model: SystemModel, frame: EigenFrame) -> dict:
    """
    Largest violations of the eigenframe invariants over the batch.
    """
    a = np.asarray(model.flux_matrix(frame.state), dtype=float)
    scale = max(1.0, float(np.abs(a).max()))
    n = model.dimension

    right = np.einsum('...ab,...bi->...ai', a, frame.vectors) - frame.vectors * frame.values[..., None, :]
    left = np.einsum('...ia,...ab->...ib', frame.dual, a) - frame.dual * frame.values[..., :, None]
    duality = np.einsum('...ia,...aj->...ij', frame.dual, frame.vectors) - np.eye(n)
    norms = model.metric.norm(np.swapaxes(frame.vectors, -1, -2))

    return {
        "eigen": float(np.abs(right).max()) / scale,
        "left_eigen": float(np.abs(left).max()) / scale,
        "duality": float(np.abs(duality).max()),
        "unit_norm": float(np.abs(norms - 1).max()),
    }


def sample_ball(dimension: int, radius: float, samples: int, seed: int = None) -> np.ndarray:
    """
    Quasi-random points in the open ball of the given radius, origin first.
    """
    if samples < 1:
        return np.zeros((0, dimension))

    sampler = qmc.Sobol(d=dimension, scramble=True, seed=seed)
    points = [np.zeros((1, dimension))]
    found = 1

    while found < samples:
        m = int(np.ceil(np.log2(max(2, 4 * (samples - found)))))
        cube = radius * (2 * sampler.random_base2(m) - 1)
        inside = cube[np.linalg.norm(cube, axis=-1) < radius]
        points.append(inside)
        found += len(inside)

    return np.concatenate(points)[:samples]


def _sampled_frames(model: SystemModel, delta: float, samples: int, seed: int = None):
    # keep finite-difference stencils inside the 2δ-ball
    pts = sample_ball(model.dimension, 2 * delta * (1 - 1e-4), samples, seed)
    return pts, eigenframe(model, pts)


def hyperbolicity_margin(model: SystemModel, delta: float, samples: int = Defaults.SAMPLES, seed: int = None,
                         uniform: bool = False) -> float:
    """
    Sampled estimate (not a certificate) of the hyperbolicity margin over the 2δ-ball.

    Pointwise: min over samples of the smallest eigenvalue gap. Uniform: min over k < l of
    inf lambda_k - sup lambda_l, the margin that separates characteristic strips.
    """
    if samples < 1:
        raise error.InvalidParams("Hyperbolicity margin needs at least one sample")

    pts = sample_ball(model.dimension, 2 * delta * (1 - 1e-4), samples, seed)
    if model.analytic_frame is not None:
        values = eigenframe(model, pts).values
    else:
        model.check_domain(pts)
        values, _ = spectrum(model, pts)

    if uniform:
        lo = values.min(axis=0)
        hi = values.max(axis=0)
        n = model.dimension
        sigma = min(lo[k] - hi[l] for k in range(n) for l in range(k + 1, n))
    else:
        sigma = float((values[:, :-1] - values[:, 1:]).min())

    logger.debug(f"Hyperbolicity margin over {samples} samples (uniform={uniform}): {sigma:.6g}")
    return float(sigma)


def separation_time(sigma: float) -> float:
    """
    Time after which the characteristic strips of different families are disjoint.
    """
    if not sigma > 0:
        raise error.NonPositiveMargin(f"Margin must be positive, got {sigma}")

    return 2.0 / sigma


class NonlinearityReport:
    def __init__(self, families: list[bool], tested: bool, worst: list[float]):
        self.families = families
        self.tested = tested
        # largest (least negative) c^i_ii seen per family
        self.worst = worst

    def __repr__(self):
        return f"<nonlinearity families={self.families}; tested={self.tested}>"


def genuine_nonlinearity_check(model: SystemModel, delta: float, samples: int = Defaults.SAMPLES,
                               seed: int = None) -> NonlinearityReport:
    n = model.dimension
    if samples < 1:
        logger.warning("Genuine nonlinearity check ran with no samples; result is vacuous")
        return NonlinearityReport([True] * n, False, [float("nan")] * n)

    pts, frame = _sampled_frames(model, delta, samples, seed)
    diag = structure_coeffs(model, pts, frame).diagonal()
    worst = diag.max(axis=0)

    return NonlinearityReport([bool(x < -Tolerance.SIGN) for x in worst], True, [float(x) for x in worst])


def gamma_bound(model: SystemModel, delta: float, samples: int = Defaults.SAMPLES, seed: int = None) -> float:
    """
    Sampled sup over the δ-ball of sum_{i,l,m} |gamma^i_lm|.
    """
    pts = sample_ball(model.dimension, delta, max(samples, 1), seed)
    frame = eigenframe(model, pts)
    gamma = structure_coeffs(model, pts, frame).gamma
    return float(np.abs(gamma).sum(axis=(-3, -2, -1)).max())
