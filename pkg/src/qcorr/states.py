"""Two-qubit density matrices and the Bell-diagonal family.

Basis order is |00>, |01>, |10>, |11>. Bell-state labels follow the
convention used throughout qcorr:

    |psi+-> = (|00> +- |11>)/sqrt2,    |phi+-> = (|01> +- |10>)/sqrt2
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat
from .errors import InvalidState, Unphysical

PHYSICAL_TOL = 1e-12
STATE_TOL = 1e-10

# tetrahedron vertices: the four pure Bell states
BELL_VERTICES = ((1.0, -1.0, 1.0), (-1.0, 1.0, 1.0), (1.0, 1.0, -1.0), (-1.0, -1.0, -1.0))

_S = 1.0 / math.sqrt(2.0)
BELL_KETS = {
    "psi+": np.array([_S, 0, 0, _S], dtype=complex),
    "psi-": np.array([_S, 0, 0, -_S], dtype=complex),
    "phi+": np.array([0, _S, _S, 0], dtype=complex),
    "phi-": np.array([0, _S, -_S, 0], dtype=complex),
}


@dataclass(frozen=True)
class BellSpectrum:
    lambda_psi_plus: float
    lambda_psi_minus: float
    lambda_phi_plus: float
    lambda_phi_minus: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lambda_psi_plus, self.lambda_psi_minus, self.lambda_phi_plus, self.lambda_phi_minus)

    def items(self):
        return zip(("psi+", "psi-", "phi+", "phi-"), self.as_tuple())

    def minimum(self) -> tuple[str, float]:
        return min(self.items(), key=lambda kv: kv[1])


@dataclass(frozen=True)
class CorrelationVector:
    """The diagonal correlations <sigma_i (x) sigma_i> of a Bell-diagonal state."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            if abs(v) > 1.0 + PHYSICAL_TOL:
                raise Unphysical(f"|{name}| = {abs(v)!r} exceeds 1")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, c) -> "CorrelationVector":
        if isinstance(c, cls):
            return c
        c1, c2, c3 = (float(x) for x in c)
        return cls(c1, c2, c3)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    def __iter__(self):
        return iter(self.as_tuple())

    def spectrum(self) -> BellSpectrum:
        return bd_eigenvalues(self)

    @property
    def is_physical(self) -> bool:
        return min(self.spectrum().as_tuple()) >= -PHYSICAL_TOL


def require_physical(c) -> CorrelationVector:
    c = CorrelationVector.of(c)
    name, value = c.spectrum().minimum()
    if value < -PHYSICAL_TOL:
        raise Unphysical(
            f"correlation vector {c.as_tuple()} is unphysical: lambda_{name} = {value:.6g} < 0",
            eigenvalue_name=name,
            eigenvalue=value,
        )
    return c


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """A validated 4x4 density matrix."""

    rho: np.ndarray

    def __post_init__(self):
        m = qmat.as_matrix(self.rho)
        if m.shape != (4, 4):
            raise InvalidState(f"two-qubit state must be 4x4, got {m.shape}")
        if not qmat.is_hermitian(m, STATE_TOL):
            raise InvalidState("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidState(f"density matrix trace is {tr.real:.12g}, not 1")
        lo = qmat.eigvalsh(m, STATE_TOL)[-1]
        if lo < -STATE_TOL:
            raise InvalidState(f"density matrix has negative eigenvalue {lo:.3e}")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "rho", m)

    @classmethod
    def from_ket(cls, psi) -> "TwoQubitState":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    def eigenvalues(self) -> np.ndarray:
        return qmat.eigvalsh(self.rho)

    def entropy(self) -> float:
        return qmat.entropy_base2(np.clip(self.eigenvalues(), 0.0, None))


def as_state(rho) -> TwoQubitState:
    return rho if isinstance(rho, TwoQubitState) else TwoQubitState(rho)


def bd_matrix(c) -> np.ndarray:
    """The Bell-diagonal matrix for ``c`` without any physicality check."""
    c1, c2, c3 = CorrelationVector.of(c).as_tuple()
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 1.0 + c3
    m[1, 1] = m[2, 2] = 1.0 - c3
    m[0, 3] = m[3, 0] = c1 - c2
    m[1, 2] = m[2, 1] = c1 + c2
    return m / 4.0


def bd_from_c(c) -> TwoQubitState:
    return TwoQubitState(bd_matrix(require_physical(c)))


def bd_eigenvalues(c) -> BellSpectrum:
    """Bell-basis populations of the Bell-diagonal matrix for ``c``.

    lambda_psi+- = (1 +- c1 -+ c2 + c3)/4 and lambda_phi+- = (1 +- c1 +- c2 - c3)/4.
    No physicality check: negative entries flag an unphysical vector.
    """
    c1, c2, c3 = CorrelationVector.of(c).as_tuple()
    return BellSpectrum(
        lambda_psi_plus=(1.0 + c1 - c2 + c3) / 4.0,
        lambda_psi_minus=(1.0 - c1 + c2 + c3) / 4.0,
        lambda_phi_plus=(1.0 + c1 + c2 - c3) / 4.0,
        lambda_phi_minus=(1.0 - c1 - c2 - c3) / 4.0,
    )


def _expect(rho: np.ndarray, op: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ op)))


def c_from_state(rho) -> CorrelationVector:
    rho = as_state(rho).rho
    return CorrelationVector(*(_expect(rho, np.kron(s, s)) for s in qmat.PAULIS))


def correlation_matrix(rho) -> np.ndarray:
    """T_ij = Tr(rho sigma_i (x) sigma_j), a real 3x3 matrix."""
    rho = as_state(rho).rho
    return np.array([[_expect(rho, np.kron(si, sj)) for sj in qmat.PAULIS] for si in qmat.PAULIS])


def marginal(rho, subsystem: str = "a") -> np.ndarray:
    """Reduced 2x2 state of subsystem ``"a"`` (first qubit) or ``"b"``."""
    r = as_state(rho).rho.reshape(2, 2, 2, 2)
    if subsystem == "a":
        return np.einsum("ijkj->ik", r)
    if subsystem == "b":
        return np.einsum("jijk->ik", r)
    raise ValueError(f"subsystem must be 'a' or 'b', got {subsystem!r}")


def bloch_of_marginal(rho, subsystem: str = "a") -> np.ndarray:
    r = as_state(rho).rho
    if subsystem == "a":
        ops = [np.kron(s, qmat.IDENTITY2) for s in qmat.PAULIS]
    elif subsystem == "b":
        ops = [np.kron(qmat.IDENTITY2, s) for s in qmat.PAULIS]
    else:
        raise ValueError(f"subsystem must be 'a' or 'b', got {subsystem!r}")
    return np.array([_expect(r, op) for op in ops])


def from_bloch(x=(0, 0, 0), y=(0, 0, 0), t=None) -> TwoQubitState:
    """State (1/4)(I + x.sigma (x) I + I (x) y.sigma + sum_ij T_ij sigma_i (x) sigma_j)."""
    t = np.zeros((3, 3)) if t is None else np.asarray(t, dtype=float)
    if t.shape == (3,):
        t = np.diag(t)
    m = np.array(qmat.IDENTITY4)
    for i, si in enumerate(qmat.PAULIS):
        m = m + x[i] * np.kron(si, qmat.IDENTITY2) + y[i] * np.kron(qmat.IDENTITY2, si)
        for j, sj in enumerate(qmat.PAULIS):
            m = m + t[i, j] * np.kron(si, sj)
    return TwoQubitState(m / 4.0)


def c_from_spectrum(lam) -> CorrelationVector:
    """Inverse of :func:`bd_eigenvalues`: populations (psi+, psi-, phi+, phi-) to c."""
    pp, pm, fp, fm = lam
    return CorrelationVector(pp - pm + fp - fm, -pp + pm + fp - fm, pp + pm - fp - fm)


def random_physical_c(rng: np.random.Generator) -> CorrelationVector:
    """Uniform sample from the tetrahedron of physical correlation vectors."""
    return c_from_spectrum(rng.dirichlet(np.ones(4)))
