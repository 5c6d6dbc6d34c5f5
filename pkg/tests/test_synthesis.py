import numpy as np
import pytest

from pbc_compress.exceptions import ContractError
from pbc_compress.flags import Direction
from pbc_compress.oracle import unitary_of_gates
from pbc_compress.pauli import PauliOperator
from pbc_compress.synthesis import gate_bound, synthesize
from pbc_compress.tableau import conjugate_pauli

from .random_circuits import pauli_matrix, random_commuting_set


def check_frame(gates, paulis, n):
    assert {g.name for g in gates} <= {"H", "S", "CX"}
    assert len(gates) <= gate_bound(n)
    for k, P in enumerate(paulis):
        assert conjugate_pauli(gates, PauliOperator.single(n, k, "Z"), Direction.REVERSE) == P


class TestSynthesize:
    """U with U-dagger Z_k U = P_k for commuting independent sets."""

    def test_single_operator(self):
        P = PauliOperator.from_string("-XY")
        check_frame(synthesize([P]), [P], 2)

    def test_dense_matrices_agree(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n = int(rng.integers(1, 4))
            paulis = random_commuting_set(rng, n, int(rng.integers(1, n + 1)))
            gates = synthesize(paulis, n)
            U = unitary_of_gates(gates, n)
            for k, P in enumerate(paulis):
                Zk = pauli_matrix(PauliOperator.single(n, k, "Z"))
                np.testing.assert_allclose(U.conj().T @ Zk @ U, pauli_matrix(P), atol=1e-12)

    def test_random_sets_small(self):
        rng = np.random.default_rng(3)
        for _ in range(60):
            n = int(rng.integers(1, 6))
            paulis = random_commuting_set(rng, n, int(rng.integers(0, n + 1)))
            check_frame(synthesize(paulis, n), paulis, n)

    @pytest.mark.slow
    def test_random_sets_up_to_eight_qubits(self):
        rng = np.random.default_rng(500)
        for _ in range(500):
            n = int(rng.integers(1, 9))
            paulis = random_commuting_set(rng, n, int(rng.integers(0, n + 1)))
            check_frame(synthesize(paulis, n), paulis, n)

    def test_empty_register(self):
        assert synthesize([], 0) == []

    def test_scalar_operator_rejected(self):
        with pytest.raises(ContractError):
            synthesize([PauliOperator.identity(0)], 0)

    def test_anticommuting_rejected(self):
        with pytest.raises(ContractError):
            synthesize([PauliOperator.from_string("X"), PauliOperator.from_string("Z")])

    def test_dependent_rejected(self):
        ops = [PauliOperator.from_string(s) for s in ("ZI", "IZ", "ZZ")]
        with pytest.raises(ContractError):
            synthesize(ops)

    def test_bound_is_quadratic(self):
        assert gate_bound(4) == 4 * gate_bound(2)
