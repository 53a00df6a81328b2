import numpy as np
import pytest
from hypothesis import strategies as st

from qcorr import states


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_unitary(rng, n):
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n=4):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (x + x.conj().T) / 2


def charpoly(a):
    """Characteristic polynomial coefficients (highest degree first) by Faddeev-LeVerrier."""
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    ident = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * ident
        coeffs.append(-np.trace(a @ m) / k)
    return np.array(coeffs)


def charpoly_eigenvalues(a):
    """Real eigenvalues of a Hermitian matrix as polynomial roots, descending."""
    roots = np.roots(charpoly(np.asarray(a, dtype=complex)))
    return np.sort(roots.real)[::-1]


@st.composite
def physical_c(draw):
    w = draw(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3))
    lam = np.array(w) / sum(w)
    return states.c_from_spectrum(lam)


# ---- acceptance reporting ---------------------------------------------------

_ACCEPTANCE: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if "[" in item.name:
        label = f"{label} [{item.name.split('[', 1)[1][:-1]}]"
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _ACCEPTANCE[label] = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in sorted(_ACCEPTANCE.items(), key=lambda kv: (int(kv[0].split()[0]), kv[0])):
        terminalreporter.write_line(f"{status}  criterion {label}")
