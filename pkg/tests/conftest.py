import numpy as np
import pytest

from qaedenoise import network


def random_density(n_qubits, rng, rank=None):
    d = 2**n_qubits
    rank = rank or d
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_pure(n_qubits, rng):
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


ALL_ARCHS = [
    ("qae_nisq", None),
    ("qae_conj", None),
    ("qae_conj_mod_dec", 1),
    ("qae_conj_mod_dec", 2),
    ("qae_conj_mod_dec", 3),
]


def all_archs(ms=(2, 3)):
    return [network.build(name, m, model) for m in ms for name, model in ALL_ARCHS]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if config._acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config._acceptance_lines:
            terminalreporter.write_line(line)
