"""Concurrence and measurement-induced nonlocality (MIN) of two-qubit states.

Three MIN variants are provided, differing in the distance between a state and
its image under a von Neumann measurement on qubit ``a``:

* ``hs``    squared Hilbert-Schmidt norm
* ``trace`` trace norm
* ``re``    relative entropy, in bits

Each has a closed form on Bell-diagonal states and a brute-force oracle
(:func:`oracle_min`) that searches the Bloch sphere of measurement axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import qmat
from .states import (
    TwoQubitState,
    as_state,
    bd_eigenvalues,
    bloch_of_marginal,
    correlation_matrix,
    marginal,
    require_physical,
)

Distance = Literal["hs", "trace", "re"]
DISTANCES: tuple[str, ...] = ("hs", "trace", "re")

MARGINAL_GAP_TOL = 1e-8
REFINE_MIN_STEP = 1e-7
SUPPORT_TOL = 1e-12

_YY = np.kron(qmat.SIGMA_Y, qmat.SIGMA_Y)
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MeasurementAxis:
    """Bloch-sphere direction n = (sin t cos f, sin t sin f, cos t) of a qubit measurement."""

    theta: float
    phi: float

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise ValueError("measurement angles must be finite")
        theta = math.fmod(theta, _TWO_PI)
        if theta < 0:
            theta += _TWO_PI
        if theta > math.pi:
            theta, phi = _TWO_PI - theta, phi + math.pi
        phi = math.fmod(phi, _TWO_PI)
        if phi < 0:
            phi += _TWO_PI
        if phi >= _TWO_PI:
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_vector(cls, n) -> "MeasurementAxis":
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(math.acos(max(-1.0, min(1.0, n[2]))), math.atan2(n[1], n[0]))

    @classmethod
    def coordinate(cls, k: int) -> "MeasurementAxis":
        """Axis along x (k=0), y (k=1) or z (k=2)."""
        return (cls(math.pi / 2, 0.0), cls(math.pi / 2, math.pi / 2), cls(0.0, 0.0))[k]

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        ns = sum(ni * s for ni, s in zip(self.vector, qmat.PAULIS))
        return (qmat.IDENTITY2 + ns) / 2.0, (qmat.IDENTITY2 - ns) / 2.0


@dataclass(frozen=True)
class MinResult:
    value: float
    axis: MeasurementAxis
    method: Literal["closed-form", "oracle"]


def _projector_stack(thetas: np.ndarray, phis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P+ (x) I, P- (x) I) for each axis, shape (B, 4, 4) each."""
    st = np.sin(thetas)
    n = np.stack([st * np.cos(phis), st * np.sin(phis), np.cos(thetas)], axis=-1)
    ns = np.einsum("bk,kij->bij", n, np.stack(qmat.PAULIS))
    eye = qmat.IDENTITY2[None]
    plus = np.einsum("bij,kl->bikjl", (eye + ns) / 2.0, qmat.IDENTITY2).reshape(-1, 4, 4)
    minus = np.einsum("bij,kl->bikjl", (eye - ns) / 2.0, qmat.IDENTITY2).reshape(-1, 4, 4)
    return plus, minus


def _dephase_stack(rho: np.ndarray, thetas, phis) -> np.ndarray:
    kp, km = _projector_stack(np.atleast_1d(thetas), np.atleast_1d(phis))
    return kp @ rho @ kp + km @ rho @ km


def post_measurement(rho, axis: MeasurementAxis) -> TwoQubitState:
    """Non-selective projective measurement of qubit ``a`` along ``axis``."""
    r = as_state(rho).rho
    out = _dephase_stack(r, axis.theta, axis.phi)[0]
    return TwoQubitState(0.5 * (out + out.conj().T))


def spin_flip(rho) -> np.ndarray:
    r = as_state(rho).rho
    return _YY @ r.conj() @ _YY


def concurrence(rho) -> float:
    """Wootters concurrence of a general two-qubit state.

    The square roots of the eigenvalues of rho rho~ are the singular values
    of sqrt(rho) (sy x sy) sqrt(rho)*, which are computed directly so that
    rank-deficient states keep full accuracy.
    """
    r = as_state(rho).rho
    root = qmat.psd_sqrt(r)
    lam = qmat.singular_values(root @ _YY @ root.conj())
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_bd(c) -> float:
    c1, c2, c3 = require_physical(c).as_tuple()
    return 0.5 * max(0.0, abs(c1 - c2) - (1.0 - c3), abs(c1 + c2) - (1.0 + c3))


def _abs_argmin(c) -> int:
    a = [abs(v) for v in c]
    return a.index(min(a))


def _abs_argmax(c) -> int:
    a = [abs(v) for v in c]
    return a.index(max(a))


def hs_min_bd(c) -> MinResult:
    """Hilbert-Schmidt MIN: (c1^2 + c2^2 + c3^2 - min_i c_i^2) / 4."""
    c = require_physical(c).as_tuple()
    k = _abs_argmin(c)
    value = 0.25 * (sum(v * v for v in c) - c[k] ** 2)
    return MinResult(max(0.0, value), MeasurementAxis.coordinate(k), "closed-form")


def binary_entropy(p: float) -> float:
    p = min(1.0, max(0.0, p))
    return qmat.entropy_base2([p, 1.0 - p])


def re_min_bd(c) -> MinResult:
    """Relative-entropy MIN of a Bell-diagonal state, in bits.

    Measuring along the axis of the smallest |c_i| leaves a state with entropy
    1 + h((1 + c_min)/2); the MIN is that minus the entropy of the state.
    """
    c = require_physical(c)
    k = _abs_argmin(c.as_tuple())
    c0 = abs(c.as_tuple()[k])
    s_measured = 1.0 + binary_entropy((1.0 + c0) / 2.0)
    s_state = qmat.entropy_base2(np.clip(bd_eigenvalues(c).as_tuple(), 0.0, None))
    return MinResult(max(0.0, s_measured - s_state), MeasurementAxis.coordinate(k), "closed-form")


def _canonical_correlations(r: TwoQubitState):
    """Squared singular values of T, their left singular vectors, and x in that frame."""
    t = correlation_matrix(r)
    es = qmat.hermitian_eig(t @ t.T)
    c_sq = np.clip(es.eigenvalues, 0.0, None)
    frame = np.real(es.eigenvectors)
    x = bloch_of_marginal(r, "a")
    return c_sq, frame, frame.T @ x, x


def trace_min(rho) -> MinResult:
    """Trace-norm MIN of a general two-qubit state.

    The correlation matrix is first brought to diagonal form by local
    rotations. With local Bloch vector x = 0 the value is max_i |c_i|;
    otherwise the measurement is fixed to the eigenbasis of qubit a's
    marginal and the value is (sqrt(chi+) + sqrt(chi-)) / (2|x|).
    """
    r = as_state(rho)
    c_sq, frame, xr, x = _canonical_correlations(r)
    xn = float(np.linalg.norm(x))
    if xn <= MARGINAL_GAP_TOL:
        # any axis orthogonal to the dominant singular direction attains max|c_i|
        axis = MeasurementAxis.from_vector(frame[:, -1])
        return MinResult(float(math.sqrt(c_sq[0])), axis, "closed-form")
    x_sq = xr**2
    alpha = float(c_sq.sum() * xn**2 - np.dot(c_sq, x_sq))
    beta = float(sum(x_sq[i] * c_sq[(i + 1) % 3] * c_sq[(i + 2) % 3] for i in range(3)))
    chi_plus = alpha + 2.0 * math.sqrt(max(beta, 0.0)) * xn
    chi_minus = alpha - 2.0 * math.sqrt(max(beta, 0.0)) * xn
    value = (math.sqrt(max(chi_plus, 0.0)) + math.sqrt(max(chi_minus, 0.0))) / (2.0 * xn)
    return MinResult(value, MeasurementAxis.from_vector(x), "closed-form")


def trace_min_smallest(c) -> MinResult:
    """The alternative reading min_i |c_i| for Bell-diagonal states (not a maximum over axes)."""
    c = require_physical(c).as_tuple()
    k = _abs_argmin(c)
    return MinResult(abs(c[k]), MeasurementAxis.coordinate(_abs_argmax(c)), "closed-form")


def relative_entropy(x, y) -> float:
    """S(x||y) = Tr x (log2 x - log2 y); ``math.inf`` when supp x is not inside supp y."""
    xs, ys = as_state(x), as_state(y)
    lam = np.clip(xs.eigenvalues(), 0.0, None)
    lam = lam[lam > 0.0]
    neg_entropy = float(np.sum(lam * np.log2(lam)))
    es = qmat.hermitian_eig(ys.rho)
    weights = np.real(np.einsum("ik,ij,jk->k", es.eigenvectors.conj(), xs.rho, es.eigenvectors))
    cross = 0.0
    for w, mu in zip(weights, es.eigenvalues):
        if mu <= SUPPORT_TOL:
            if w > SUPPORT_TOL:
                return math.inf
            continue
        cross += w * math.log2(mu)
    return max(0.0, neg_entropy - cross)


def _distances(rho: np.ndarray, distance: str, thetas, phis, s_rho: float) -> np.ndarray:
    post = _dephase_stack(rho, thetas, phis)
    if distance == "hs":
        diff = rho[None] - post
        return np.sum(diff.real**2 + diff.imag**2, axis=(1, 2))
    if distance == "trace":
        return qmat.hermitian_trace_norm(rho[None] - post)
    if distance == "re":
        return qmat.entropy_base2_batch(qmat.eigvalsh(post)) - s_rho
    raise ValueError(f"unknown distance {distance!r}; expected one of {DISTANCES}")


def oracle_min(rho, distance: Distance, grid_n: int = 60) -> MinResult:
    """Brute-force MIN: maximize the chosen distance over measurement axes.

    A non-degenerate marginal on qubit ``a`` pins the measurement to its
    eigenbasis. Otherwise a ``grid_n`` x ``grid_n`` (theta, phi) grid is scanned
    and the best point refined by coordinate search with step halving.
    """
    if distance not in DISTANCES:
        raise ValueError(f"unknown distance {distance!r}; expected one of {DISTANCES}")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    state = as_state(rho)
    r = state.rho
    s_rho = state.entropy() if distance == "re" else 0.0

    def evaluate(thetas, phis):
        return _distances(r, distance, np.asarray(thetas, float), np.asarray(phis, float), s_rho)

    ma = qmat.hermitian_eig(marginal(state, "a"))
    if ma.eigenvalues[0] - ma.eigenvalues[1] > MARGINAL_GAP_TOL:
        axis = MeasurementAxis.from_vector(bloch_of_marginal(state, "a"))
        value = float(evaluate([axis.theta], [axis.phi])[0])
        return MinResult(max(0.0, value), axis, "oracle")

    thetas = np.linspace(0.0, math.pi, grid_n)
    phis = _TWO_PI * np.arange(grid_n) / grid_n
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    values = evaluate(tt.ravel(), pp.ravel())
    best = int(np.argmax(values))
    theta, phi, value = float(tt.ravel()[best]), float(pp.ravel()[best]), float(values[best])

    h_theta, h_phi = math.pi / (grid_n - 1), _TWO_PI / grid_n
    moves = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    while max(h_theta, h_phi) >= REFINE_MIN_STEP:
        cand_t = theta + moves[:, 0] * h_theta
        cand_p = phi + moves[:, 1] * h_phi
        cand_v = evaluate(cand_t, cand_p)
        k = int(np.argmax(cand_v))
        if cand_v[k] > value:
            ax = MeasurementAxis(cand_t[k], cand_p[k])
            theta, phi, value = ax.theta, ax.phi, float(cand_v[k])
        else:
            h_theta *= 0.5
            h_phi *= 0.5
    return MinResult(max(0.0, value), MeasurementAxis(theta, phi), "oracle")


def closed_form(c, measure: str) -> float:
    """Closed-form value of ``measure`` on the Bell-diagonal state with vector ``c``."""
    if measure == "concurrence":
        return concurrence_bd(c)
    if measure == "hs_min":
        return hs_min_bd(c).value
    if measure == "trace_min":
        return max(abs(v) for v in require_physical(c).as_tuple())
    if measure == "re_min":
        return re_min_bd(c).value
    raise ValueError(f"unknown measure {measure!r}")


MEASURES: tuple[str, ...] = ("concurrence", "hs_min", "trace_min", "re_min")
ORACLE_DISTANCE = {"hs_min": "hs", "trace_min": "trace", "re_min": "re"}
