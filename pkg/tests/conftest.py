import numpy as np
import pytest
from hypothesis import settings

from dimerheat.fock import build_basis, normal_mode_annihilators
from dimerheat.hamiltonians import DimerParams, Interaction, build_hamiltonian
from dimerheat.lindblad import BathSpec, build_liouvillian

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def basis8():
    return build_basis(8)


@pytest.fixture(scope="session")
def linear8(basis8):
    h = build_hamiltonian(basis8, DimerParams(omega=1.0, j=0.2))
    return build_liouvillian(h, BathSpec(0.5, 0.01))


@pytest.fixture(scope="session")
def sym_number(basis8):
    c, _ = normal_mode_annihilators(basis8)
    return c.dag() @ c


def random_density(d, rng, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d, rng):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return x + x.conj().T


def hamiltonian(basis, kind, strength, omega=1.0):
    field = {"linear": "j", "sfwm": "y", "xpm": "z"}[kind]
    return build_hamiltonian(basis, DimerParams(omega=omega, kind=Interaction(kind), **{field: strength}))
