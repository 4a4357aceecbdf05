import numpy as np
import pytest

from swapchannel import ChainSpec, GateDesign, solve_parameters


@pytest.fixture()
def design() -> GateDesign:
    """Reference design point: T = 10 ns, M = 1, N = 0."""
    return solve_parameters(10.0, m=1, n=0)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260816)


def chain_for(design: GateDesign, n_qubits: int, eps_high=None) -> ChainSpec:
    return ChainSpec(
        n_qubits=n_qubits,
        delta_mhz=design.delta_mhz,
        xi_mhz=design.xi_mhz,
        eps_high_mhz=eps_high,
    )


def random_qubit_amplitudes(rng: np.random.Generator) -> tuple[complex, complex]:
    raw = rng.normal(size=4)
    vec = np.array([raw[0] + 1j * raw[1], raw[2] + 1j * raw[3]])
    vec /= np.linalg.norm(vec)
    return complex(vec[0]), complex(vec[1])
