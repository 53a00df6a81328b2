"""Seeded property suite behind ``qcorr verify``.

Each suite draws from its own child of ``SeedSequence(seed)`` so the report is
identical run to run for a given seed and sample count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from . import channels, measures, qmat, states
from .dynamics import DEAD, bisect_boundary

MAP_CHANNELS = ("bit-phase-flip", "depolarizing", "gad")

# values stated in the source derivation that this package does not reproduce
STATED_BPF_DEATH = 0.42


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _c_text(c: states.CorrelationVector) -> str:
    return "(" + ",".join(repr(v) for v in c) + ")"


def _suite(name: str, samples: int, rng: np.random.Generator, check: Callable) -> SuiteResult:
    """``check(rng)`` returns (deviation, tolerance, description) for one sample."""
    passed, failure = 0, None
    for i in range(samples):
        dev, tol, desc = check(rng)
        if dev <= tol:
            passed += 1
        elif failure is None:
            failure = f"sample {i}: {desc} deviation={dev:.3e} > {tol:.0e}"
    return SuiteResult(name, passed, samples, failure)


def _spectrum(rng):
    c = states.random_physical_c(rng)
    closed = np.sort(states.bd_eigenvalues(c).as_tuple())
    numeric = np.sort(qmat.eigvalsh(states.bd_matrix(c)))
    return float(np.max(np.abs(closed - numeric))), 1e-12, f"c={_c_text(c)}"


def _round_trip(rng):
    c = states.random_physical_c(rng)
    back = states.c_from_state(states.bd_from_c(c)).as_array()
    return float(np.max(np.abs(back - c.as_array()))), 1e-12, f"c={_c_text(c)}"


def _marginals(rng):
    c = states.random_physical_c(rng)
    s = states.bd_from_c(c)
    dev = max(float(np.max(np.abs(states.marginal(s, k) - qmat.IDENTITY2 / 2))) for k in "ab")
    return dev, 1e-14, f"c={_c_text(c)}"


def _concurrence(rng):
    c = states.random_physical_c(rng)
    dev = abs(measures.concurrence_bd(c) - measures.concurrence(states.bd_from_c(c)))
    return dev, 1e-10, f"c={_c_text(c)}"


def _oracle(distance: str, grid_n: int):
    name = {"hs": "hs_min", "trace": "trace_min", "re": "re_min"}[distance]

    def check(rng):
        c = states.random_physical_c(rng)
        closed = measures.closed_form(c, name)
        oracle = measures.oracle_min(states.bd_from_c(c), distance, grid_n).value
        return abs(closed - oracle), 1e-4, f"c={_c_text(c)} closed={closed!r} oracle={oracle!r}"

    return check


def _map_kraus(rng):
    c = states.random_physical_c(rng)
    x = float(rng.uniform())
    worst, where = 0.0, ""
    for kind in MAP_CHANNELS:
        params = {"gamma": x, "p": 0.5} if kind == "gad" else ({"gamma": x} if kind == "depolarizing" else {"p": x})
        ch = channels.make_channel(kind, **params)
        kraus = states.c_from_state(channels.apply_product(ch, states.bd_from_c(c))).as_array()
        closed = channels.coefficient_map(kind, params, c).as_array()
        dev = float(np.max(np.abs(kraus - closed)))
        if dev > worst:
            worst, where = dev, kind
    return worst, 1e-12, f"c={_c_text(c)} param={x!r} channel={where or '-'}"


def _completeness(rng):
    p, g = (float(v) for v in rng.uniform(size=2))
    chans = (channels.bit_phase_flip(p), channels.depolarizing(g), channels.gad(p, g))
    return max(ch.completeness_defect() for ch in chans), 1e-12, f"p={p!r} gamma={g!r}"


def suites(oracle_grid: int = 60):
    return (
        ("spectrum", _spectrum),
        ("round-trip", _round_trip),
        ("marginals", _marginals),
        ("concurrence", _concurrence),
        ("oracle-hs", _oracle("hs", oracle_grid)),
        ("oracle-trace", _oracle("trace", oracle_grid)),
        ("oracle-re", _oracle("re", oracle_grid)),
        ("map-kraus", _map_kraus),
        ("completeness", _completeness),
    )


def _single_qubit_bpf(c, p: float) -> float:
    """Concurrence after a bit-phase flip acting on qubit a only."""
    ch = channels.bit_phase_flip(p)
    rho = states.bd_from_c(c).rho
    out = sum(np.kron(e, qmat.IDENTITY2) @ rho @ np.kron(e, qmat.IDENTITY2).conj().T for e in ch.operators)
    return measures.concurrence(states.TwoQubitState(0.5 * (out + out.conj().T)))


def discrepancies() -> list[str]:
    """Known inconsistencies in the source derivation, with computed counter-values."""
    lines = []

    c = (1.0, 1.0, -1.0)
    printed = (1.0 - c[0] - c[1] + c[2]) / 4.0
    corrected = states.bd_eigenvalues(c).lambda_phi_minus
    smallest = float(qmat.eigvalsh(states.bd_matrix(c))[-1])
    lines.append(
        "1. Bell spectrum sign: the printed lambda_phi+- = (1 +- c1 +- c2 + c3)/4 gives "
        f"lambda_phi- = {printed:.6g} for the valid state c=(1,1,-1); direct diagonalization "
        f"gives smallest eigenvalue {smallest:.6g}, matching (1 +- c1 +- c2 - c3)/4 = {corrected:.6g}"
    )

    c = (1.0, 0.3, -0.3)
    stated = measures.trace_min_smallest(c).value
    oracle = measures.oracle_min(states.bd_from_c(c), "trace").value
    lines.append(
        "2. trace MIN of Bell-diagonal states: the stated N1 = min|c_i| gives "
        f"{stated:.6g} for c=(1,0.3,-0.3), but the maximum over measurements is max|c_i| = "
        f"{max(abs(v) for v in c):.6g} (oracle {oracle:.6g})"
    )

    def both(p):
        cp = channels.coefficient_map("bit-phase-flip", {"p": p}, c)
        return measures.concurrence_bd(cp)

    p_both = bisect_boundary(lambda p: both(p) <= DEAD, 0.0, 0.5)
    p_one = bisect_boundary(lambda p: _single_qubit_bpf(c, p) <= DEAD, 0.0, 0.5)
    lines.append(
        f"3. bit-phase-flip sudden death for c=(1,0.3,-0.3): stated p = {STATED_BPF_DEATH}, "
        f"computed p = {p_both:.6f} (channel on both qubits), p = {p_one:.6f} (one qubit); "
        f"concurrence is already {both(STATED_BPF_DEATH):.3g} at p = {STATED_BPF_DEATH}; "
        "the stated value is not reproduced"
    )
    return lines


def run_verification(samples: int, seed: int, out: TextIO, oracle_grid: int = 60) -> bool:
    table = suites(oracle_grid)
    children = np.random.SeedSequence(seed).spawn(len(table))
    out.write(f"qcorr verify: samples={samples} seed={seed} oracle_grid={oracle_grid}\n")
    results = []
    for (name, check), child in zip(table, children):
        res = _suite(name, samples, np.random.default_rng(child), check)
        results.append(res)
        status = "PASS" if res.ok else "FAIL"
        out.write(f"{status} {name}: {res.passed}/{res.total}\n")
        if res.failure:
            out.write(f"  first failure (seed={seed}) {res.failure}\n")
    notes = discrepancies()
    out.write(f"known discrepancies: {len(notes)}\n")
    for line in notes:
        out.write(f"  {line}\n")
    ok = all(r.ok for r in results)
    out.write(f"result: {'all suites passed' if ok else 'FAILED'}\n")
    return ok
