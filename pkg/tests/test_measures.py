import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcorr import measures, qmat, states
from qcorr.measures import MeasurementAxis

from conftest import physical_c, random_unitary

YY = np.kron(qmat.SIGMA_Y, qmat.SIGMA_Y)


def wootters_oracle(rho):
    """Concurrence from the non-Hermitian product rho (sy x sy) rho* (sy x sy), via LAPACK."""
    r = np.asarray(rho)
    ev = np.linalg.eigvals(r @ YY @ r.conj() @ YY)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def numpy_min_oracle(rho, distance, n_axes=4000, seed=1):
    """Independent MIN estimate: random axes, numpy eigen-decompositions, no refinement."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_axes, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    ns = np.einsum("bk,kij->bij", v, np.stack(qmat.PAULIS))
    best = 0.0
    lam_rho = np.clip(np.linalg.eigvalsh(rho), 0, None)
    s_rho = -sum(x * math.log2(x) for x in lam_rho if x > 0)
    for m in ns:
        p = np.kron((np.eye(2) + m) / 2, np.eye(2))
        q = np.kron((np.eye(2) - m) / 2, np.eye(2))
        post = p @ rho @ p + q @ rho @ q
        d = rho - post
        if distance == "hs":
            val = np.sum(np.abs(d) ** 2)
        elif distance == "trace":
            val = np.sum(np.abs(np.linalg.eigvalsh(d)))
        else:
            lam = np.clip(np.linalg.eigvalsh(post), 0, None)
            val = -sum(x * math.log2(x) for x in lam if x > 0) - s_rho
        best = max(best, val)
    return best


# ---- measurement axes -------------------------------------------------------


def test_axis_normalisation():
    a = MeasurementAxis(-0.3, -1.0)
    assert 0 <= a.theta <= math.pi and 0 <= a.phi < 2 * math.pi
    assert np.allclose(a.vector, MeasurementAxis.from_vector(a.vector).vector)
    assert np.allclose(MeasurementAxis.coordinate(1).vector, (0, 1, 0), atol=1e-15)


@settings(max_examples=100)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_projectors_are_complete_idempotent(theta, phi):
    p, m = MeasurementAxis(theta, phi).projectors()
    assert np.max(np.abs(p @ p - p)) <= 1e-12
    assert np.max(np.abs(m @ m - m)) <= 1e-12
    assert np.max(np.abs(p + m - np.eye(2))) <= 1e-12


# ---- post-measurement -------------------------------------------------------


def test_post_measurement_examples():
    mixed = np.eye(4) / 4
    assert np.allclose(measures.post_measurement(mixed, MeasurementAxis(0.7, 2.1)).rho, mixed, atol=1e-15)
    z = measures.post_measurement(states.bd_from_c((1, 1, -1)), MeasurementAxis.coordinate(2))
    assert np.allclose(z.rho, states.bd_from_c((0, 0, -1)).rho, atol=1e-15)
    x = measures.post_measurement(states.bd_from_c((0.4, -0.3, 0.2)), MeasurementAxis.coordinate(0))
    assert np.allclose(x.rho, states.bd_from_c((0.4, 0, 0)).rho, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(physical_c(), st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_post_measurement_idempotent_trace_preserving(c, theta, phi):
    axis = MeasurementAxis(theta, phi)
    once = measures.post_measurement(states.bd_from_c(c), axis)
    twice = measures.post_measurement(once, axis)
    assert np.max(np.abs(twice.rho - once.rho)) <= 1e-12
    assert abs(np.trace(once.rho) - 1) <= 1e-12


# ---- concurrence ------------------------------------------------------------


def test_concurrence_examples():
    assert measures.concurrence(states.TwoQubitState.from_ket([1, 0, 0, 1])) == pytest.approx(1.0, abs=1e-12)
    assert measures.concurrence(states.TwoQubitState.from_ket([1, 0, 0, 0])) == pytest.approx(0.0, abs=1e-12)
    assert measures.concurrence(states.bd_from_c((1, 0.3, -0.3))) == pytest.approx(0.3, abs=1e-10)
    assert wootters_oracle(states.bd_from_c((1, 0.3, -0.3)).rho) == pytest.approx(0.3, abs=1e-8)


def test_concurrence_bd_examples():
    assert measures.concurrence_bd((1, 1, -1)) == pytest.approx(1.0, abs=1e-15)
    assert measures.concurrence_bd((0, 0, 0)) == 0.0
    assert measures.concurrence_bd((0.5, -0.4, 0.5)) == pytest.approx(0.2, abs=1e-15)


def test_concurrence_matches_independent_oracle(rng):
    for _ in range(100):
        u = random_unitary(rng, 4)
        lam = rng.dirichlet(np.ones(4))
        rho = (u * lam) @ u.conj().T
        assert measures.concurrence(rho) == pytest.approx(wootters_oracle(rho), abs=1e-7)


def test_concurrence_bd_matches_general(rng):
    for _ in range(1000):
        c = states.random_physical_c(rng)
        assert abs(measures.concurrence_bd(c) - measures.concurrence(states.bd_from_c(c))) <= 1e-10


def test_concurrence_local_unitary_invariance(rng):
    for _ in range(50):
        c = states.random_physical_c(rng)
        rho = states.bd_from_c(c).rho
        k = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        moved = k @ rho @ k.conj().T
        assert abs(measures.concurrence(moved) - measures.concurrence(rho)) <= 1e-9


# ---- closed forms -----------------------------------------------------------


def test_hs_min_examples():
    assert measures.hs_min_bd((1, 1, -1)).value == pytest.approx(0.5, abs=1e-15)
    assert measures.hs_min_bd((0, 0, 0)).value == 0.0
    assert measures.hs_min_bd((1, 0.3, -0.3)).value == pytest.approx(0.2725, abs=1e-15)


def test_hs_min_reports_lowest_index_on_ties():
    assert measures.hs_min_bd((1, 0.3, -0.3)).axis == MeasurementAxis.coordinate(1)


@settings(max_examples=200)
@given(physical_c(), st.floats(0, 1))
def test_hs_min_quadratic_scaling(c, t):
    scaled = states.CorrelationVector(*(t * v for v in c))
    assert measures.hs_min_bd(scaled).value == pytest.approx(t * t * measures.hs_min_bd(c).value, abs=1e-14)


def test_trace_min_examples():
    assert measures.trace_min(states.bd_from_c((1, 0.3, -0.3))).value == pytest.approx(1.0, abs=1e-12)
    assert measures.trace_min(np.eye(4) / 4).value == pytest.approx(0.0, abs=1e-12)
    rho = states.from_bloch(x=(0, 0, 0.4), t=(0.6, 0, 0))
    assert measures.trace_min(rho).value == pytest.approx(0.6, abs=1e-12)
    assert measures.oracle_min(rho, "trace").value == pytest.approx(0.6, abs=1e-6)


def test_trace_min_polarised_random_states(rng):
    """The x != 0 branch against the numpy oracle on generic states."""
    for _ in range(8):
        u = random_unitary(rng, 4)
        rho = (u * rng.dirichlet(np.ones(4))) @ u.conj().T
        state = states.TwoQubitState(rho)
        closed = measures.trace_min(state).value
        assert closed == pytest.approx(measures.oracle_min(state, "trace").value, abs=1e-8)


def test_trace_min_smallest_variant():
    assert measures.trace_min_smallest((1, 0.3, -0.3)).value == pytest.approx(0.3)


def test_re_min_examples():
    assert measures.re_min_bd((0, 0, 0)).value == pytest.approx(0.0, abs=1e-15)
    assert measures.re_min_bd((1, -1, 1)).value == pytest.approx(1.0, abs=1e-12)
    assert measures.re_min_bd((1, 0.3, -0.3)).value == pytest.approx(1.0, abs=1e-6)


def test_binary_entropy_symmetry():
    assert measures.binary_entropy(0.35) == pytest.approx(measures.binary_entropy(0.65), abs=1e-15)


# ---- relative entropy -------------------------------------------------------


def test_relative_entropy_examples():
    rho = states.bd_from_c((0.2, 0.1, -0.3))
    assert measures.relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)
    assert measures.relative_entropy(np.eye(4) / 4, np.diag([0.5, 0.5, 0, 0])) == math.inf
    pure = states.bd_from_c((1, 1, -1))
    post = measures.post_measurement(pure, MeasurementAxis.coordinate(2))
    assert measures.relative_entropy(pure, post) == pytest.approx(1.0, abs=1e-8)


def test_relative_entropy_equals_entropy_gap_for_dephasing(rng):
    for _ in range(20):
        state = states.bd_from_c(states.random_physical_c(rng))
        axis = MeasurementAxis(*rng.uniform(0, 3, size=2))
        post = measures.post_measurement(state, axis)
        assert measures.relative_entropy(state, post) == pytest.approx(post.entropy() - state.entropy(), abs=1e-8)


# ---- oracle -----------------------------------------------------------------


@pytest.mark.parametrize("distance", measures.DISTANCES)
def test_oracle_on_maximally_mixed(distance):
    assert measures.oracle_min(np.eye(4) / 4, distance).value == pytest.approx(0.0, abs=1e-12)


def test_oracle_examples():
    assert measures.oracle_min(states.bd_from_c((1, 1, -1)), "hs").value == pytest.approx(0.5, abs=1e-6)
    assert measures.oracle_min(states.bd_from_c((1, 0.3, -0.3)), "trace").value == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("c", [(1, 0.3, -0.3), (0.5, -0.4, 0.5), (-0.2, 0.6, 0.1)])
@pytest.mark.parametrize("measure,distance", [("hs_min", "hs"), ("trace_min", "trace"), ("re_min", "re")])
def test_closed_forms_against_numpy_oracle(c, measure, distance):
    # random axes never hit the optimum exactly, so this bound is one-sided plus a slack
    closed = measures.closed_form(c, measure)
    sampled = numpy_min_oracle(states.bd_from_c(c).rho, distance)
    assert sampled <= closed + 1e-10
    assert sampled >= closed - 5e-3


def test_closed_forms_against_oracle_random(rng):
    for _ in range(15):
        c = states.random_physical_c(rng)
        rho = states.bd_from_c(c)
        for measure, distance in measures.ORACLE_DISTANCE.items():
            assert abs(measures.closed_form(c, measure) - measures.oracle_min(rho, distance).value) <= 1e-4


def test_oracle_pins_axis_for_polarised_marginal():
    rho = states.from_bloch(x=(0, 0, 0.4), t=(0.6, 0, 0))
    res = measures.oracle_min(rho, "hs")
    assert np.allclose(res.axis.vector, (0, 0, 1), atol=1e-12)


def test_oracle_rejects_bad_arguments():
    with pytest.raises(ValueError):
        measures.oracle_min(np.eye(4) / 4, "bures")
    with pytest.raises(ValueError):
        measures.oracle_min(np.eye(4) / 4, "hs", grid_n=1)


@pytest.mark.parametrize("measure", measures.MEASURES)
def test_all_measures_vanish_on_product_states(measure):
    assert measures.closed_form((0, 0, 0), measure) == pytest.approx(0.0, abs=1e-12)
