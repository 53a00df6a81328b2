"""Single-qubit Kraus channels applied locally to both qubits.

Closed-form coefficient maps are provided for Bell-diagonal inputs:

=================  ==========================================
bit-phase flip     (c1, c2, c3) -> ((1-2p)^2 c1, c2, (1-2p)^2 c3)
depolarizing       c_i -> (4 gamma/3 - 1)^2 c_i
GAD, p = 1/2       (c1, c2, c3) -> ((1-g) c1, (1-g) c2, (1-g)^2 c3)
=================  ==========================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import qmat
from .errors import MapUnavailable, ParamOutOfRange
from .states import CorrelationVector, TwoQubitState, as_state, require_physical

COMPLETENESS_TOL = 1e-12

CHANNEL_KINDS = ("bit-phase-flip", "depolarizing", "gad")


@dataclass(frozen=True, eq=False)
class KrausChannel:
    name: str
    operators: tuple[np.ndarray, ...]
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        ops = tuple(qmat.as_matrix(e) for e in self.operators)
        if not ops or any(e.shape != (2, 2) for e in ops):
            raise ValueError("Kraus operators must be a non-empty list of 2x2 matrices")
        for e in ops:
            e.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))
        defect = self.completeness_defect()
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"{self.name}: sum E^dagger E deviates from identity by {defect:.3e}")

    def completeness_defect(self) -> float:
        total = sum(e.conj().T @ e for e in self.operators)
        return float(np.max(np.abs(total - qmat.IDENTITY2)))

    def apply_single(self, rho2) -> np.ndarray:
        r = qmat.as_matrix(rho2)
        return sum(e @ r @ e.conj().T for e in self.operators)


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ParamOutOfRange(f"{name} must lie in [0, 1], got {value!r}")
    return value


def bit_phase_flip(p: float) -> KrausChannel:
    p = _check_unit("p", p)
    ops = (math.sqrt(1.0 - p) * qmat.IDENTITY2, math.sqrt(p) * qmat.SIGMA_Y)
    return KrausChannel("bit-phase-flip", ops, {"p": p})


def depolarizing(gamma: float) -> KrausChannel:
    gamma = _check_unit("gamma", gamma)
    w = math.sqrt(gamma / 3.0)
    ops = (math.sqrt(1.0 - gamma) * qmat.IDENTITY2, w * qmat.SIGMA_X, w * qmat.SIGMA_Y, w * qmat.SIGMA_Z)
    return KrausChannel("depolarizing", ops, {"gamma": gamma})


def gad(p: float, gamma: float) -> KrausChannel:
    """Generalized amplitude damping; ``p`` is the stationary |0> population."""
    p = _check_unit("p", p)
    gamma = _check_unit("gamma", gamma)
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    sg, sr = math.sqrt(gamma), math.sqrt(1.0 - gamma)
    ops = (
        sp * np.array([[1, 0], [0, sr]], dtype=complex),
        sp * np.array([[0, sg], [0, 0]], dtype=complex),
        sq * np.array([[sr, 0], [0, 1]], dtype=complex),
        sq * np.array([[0, 0], [sg, 0]], dtype=complex),
    )
    return KrausChannel("gad", ops, {"p": p, "gamma": gamma})


def make_channel(kind: str, **params: float) -> KrausChannel:
    if kind == "bit-phase-flip":
        return bit_phase_flip(params["p"])
    if kind == "depolarizing":
        return depolarizing(params["gamma"])
    if kind == "gad":
        return gad(params.get("p", 0.5), params["gamma"])
    raise ValueError(f"unknown channel {kind!r}; expected one of {CHANNEL_KINDS}")


def apply_product(channel: KrausChannel, rho) -> TwoQubitState:
    """sum_ij (E_i (x) E_j) rho (E_i (x) E_j)^dagger."""
    r = as_state(rho).rho
    out = np.zeros((4, 4), dtype=complex)
    for ei in channel.operators:
        for ej in channel.operators:
            k = np.kron(ei, ej)
            out += k @ r @ k.conj().T
    return TwoQubitState(0.5 * (out + out.conj().T))


def coefficient_scaling(kind: str, **params: float) -> tuple[float, float, float]:
    """Per-component factors multiplying (c1, c2, c3)."""
    if kind == "bit-phase-flip":
        f = (1.0 - 2.0 * _check_unit("p", params["p"])) ** 2
        return (f, 1.0, f)
    if kind == "depolarizing":
        f = (4.0 * _check_unit("gamma", params["gamma"]) / 3.0 - 1.0) ** 2
        return (f, f, f)
    if kind == "gad":
        p = _check_unit("p", params.get("p", 0.5))
        g = _check_unit("gamma", params["gamma"])
        if p != 0.5:
            raise MapUnavailable(f"GAD has no Bell-diagonal coefficient map for p = {p!r} (only p = 1/2)")
        return (1.0 - g, 1.0 - g, (1.0 - g) ** 2)
    raise ValueError(f"unknown channel {kind!r}; expected one of {CHANNEL_KINDS}")


def coefficient_map(kind: str, params: Mapping[str, float], c) -> CorrelationVector:
    c = require_physical(c)
    f = coefficient_scaling(kind, **params)
    return CorrelationVector(*(fi * ci for fi, ci in zip(f, c.as_tuple())))


def gamma_of_time(gamma_prime: float, t: float) -> float:
    """Damping strength 1 - exp(-gamma' t) after time ``t``."""
    if gamma_prime < 0 or t < 0:
        raise ParamOutOfRange("gamma_prime and t must be non-negative")
    return -math.expm1(-gamma_prime * t)
