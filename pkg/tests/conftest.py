"""Independent oracles shared by the test modules.

These deliberately avoid the package's own code paths: marginals by explicit
index loops, concurrence from numpy's general eigenvalue routine.
"""
import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SY = np.array([[0, -1j], [1j, 0]])
SYY = np.kron(SY, SY)


def loop_marginal(amps, q, i, j):
    """rho_ij by brute-force summation over basis indices."""
    rho = np.zeros((4, 4), dtype=complex)
    for a in range(1 << q):
        for b in range(1 << q):
            rest_a = a & ~((1 << (q - 1 - i)) | (1 << (q - 1 - j)))
            rest_b = b & ~((1 << (q - 1 - i)) | (1 << (q - 1 - j)))
            if rest_a != rest_b:
                continue
            ra = 2 * ((a >> (q - 1 - i)) & 1) + ((a >> (q - 1 - j)) & 1)
            rb = 2 * ((b >> (q - 1 - i)) & 1) + ((b >> (q - 1 - j)) & 1)
            rho[ra, rb] += amps[a] * np.conj(amps[b])
    return rho


def eig_concurrence(rho):
    """max(0, l1 - l2 - l3 - l4) from eigenvalues of rho (sy sy) rho* (sy sy)."""
    m = rho @ SYY @ rho.conj() @ SYY
    ev = np.sort(np.sqrt(np.clip(np.linalg.eigvals(m).real, 0.0, None)))[::-1]
    return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])


def dense_state(p):
    """Ansatz state assembled directly from its definition."""
    n = p.n
    amps = np.zeros(1 << n)
    amps[0] += p.alpha
    amps[-1] += p.alpha
    full = (1 << n) - 1
    for i in range(n):
        for j in range(i + 1, n):
            m = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
            amps[m] += p.gamma[i, j]
            amps[full ^ m] += p.gamma[i, j]
    return amps / np.linalg.norm(amps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
