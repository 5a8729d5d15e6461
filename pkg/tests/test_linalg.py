import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cccsim import linalg
from cccsim.errors import CapabilityError


def random_unitary(rng, d=2):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_gate_table_is_unitary():
    for name, g in linalg.GATES.items():
        assert linalg.is_unitary(g), name


def test_gate_returns_a_copy():
    g = linalg.gate("H")
    g[0, 0] = 99
    assert linalg.GATES["H"][0, 0] != 99


def test_rotation_gates():
    assert np.allclose(linalg.rz(0), np.eye(2))
    assert np.allclose(linalg.rx(math.pi), -1j * linalg.GATES["X"])
    # Rz(t) = diag(e^{-it/2}, e^{it/2})
    t = 0.37
    assert np.allclose(linalg.rz(t), np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)]))


def test_dense_cap_env_override():
    old = os.environ.get(linalg.DENSE_CAP_ENV)
    try:
        os.environ[linalg.DENSE_CAP_ENV] = "3"
        assert linalg.dense_cap() == 3
        with pytest.raises(CapabilityError):
            linalg.zero_state(4)
        linalg.zero_state(3)
    finally:
        if old is None:
            os.environ.pop(linalg.DENSE_CAP_ENV, None)
        else:
            os.environ[linalg.DENSE_CAP_ENV] = old


def test_basis_state():
    s = linalg.basis_state(3, "101")
    assert s[0b101] == 1.0 and np.count_nonzero(s) == 1


def test_apply_gate_matches_kron():
    rng = np.random.default_rng(3)
    state = rng.normal(size=8) + 1j * rng.normal(size=8)
    h = linalg.GATES["H"]
    # qubit 0 is the most significant bit
    expect = np.kron(h, np.eye(4)) @ state
    assert np.allclose(linalg.apply_gate(state, h, (0,)), expect)
    expect = np.kron(np.eye(4), h) @ state
    assert np.allclose(linalg.apply_gate(state, h, (2,)), expect)
    cnot = linalg.GATES["CNOT"]
    expect = np.kron(cnot, np.eye(2)) @ state
    assert np.allclose(linalg.apply_gate(state, cnot, (0, 1)), expect)


def test_apply_gate_reversed_targets():
    rng = np.random.default_rng(4)
    state = rng.normal(size=4) + 1j * rng.normal(size=4)
    swap = np.eye(4)[[0, 2, 1, 3]]
    cnot_rev = swap @ linalg.GATES["CNOT"] @ swap
    assert np.allclose(
        linalg.apply_gate(state, linalg.GATES["CNOT"], (1, 0)), cnot_rev @ state
    )


def test_apply_gate_validates_targets():
    state = linalg.zero_state(2)
    with pytest.raises(ValueError):
        linalg.apply_gate(state, linalg.GATES["H"], (2,))
    with pytest.raises(ValueError):
        linalg.apply_gate(state, linalg.GATES["CNOT"], (0, 0))
    with pytest.raises(ValueError):
        linalg.apply_gate(state, linalg.GATES["CNOT"], (0,))


def test_normalized_action_has_unit_determinant():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        if abs(np.linalg.det(a)) < 1e-6:
            continue
        na = linalg.normalized_action(a)
        assert abs(np.linalg.det(na) - 1) < 1e-10


def test_normalized_action_rejects_singular():
    with pytest.raises(ValueError):
        linalg.normalized_action(np.array([[1, 0], [0, 0]], dtype=complex))


def test_proportional_up_to_phase():
    h = linalg.GATES["H"]
    assert linalg.proportional_up_to_phase(3j * h, h)
    assert linalg.proportional_up_to_phase(np.exp(0.3j) * h, h, unit_factor=True)
    assert not linalg.proportional_up_to_phase(3j * h, h, unit_factor=True)
    assert not linalg.proportional_up_to_phase(h, linalg.GATES["S"])
    z = np.zeros((2, 2), dtype=complex)
    assert linalg.proportional_up_to_phase(z, z)
    assert not linalg.proportional_up_to_phase(h, z)


def test_unitary_up_to_scale():
    h = linalg.GATES["H"]
    assert linalg.is_unitary_up_to_scale(0.5 * h)
    assert math.isclose(linalg.unitary_scale(0.5 * h), 0.25)
    assert not linalg.is_unitary_up_to_scale(np.array([[1, 0], [0, 0.5]]))


def test_is_signed_pauli():
    for name in ("X", "Y", "Z"):
        assert linalg.is_signed_pauli(linalg.GATES[name])
        assert linalg.is_signed_pauli(-linalg.GATES[name])
    assert not linalg.is_signed_pauli(1j * linalg.GATES["X"])
    assert not linalg.is_signed_pauli(linalg.GATES["H"])


def test_phase_invariant_distance_basics():
    h = linalg.GATES["H"]
    assert linalg.phase_invariant_distance(h, h) < 1e-12
    assert linalg.phase_invariant_distance(np.exp(1.1j) * h, h) < 1e-12
    d = linalg.phase_invariant_distance(linalg.GATES["S"], np.eye(2))
    # S vs I differ by a relative pi/2 phase between eigenvalues
    assert math.isclose(d, 2 * math.sin(math.pi / 8), rel_tol=1e-9)


def test_phase_invariant_distance_is_a_metric_on_projective_unitaries():
    rng = np.random.default_rng(6)
    mats = [random_unitary(rng) for _ in range(6)]
    for a in mats:
        for b in mats:
            dab = linalg.phase_invariant_distance(a, b)
            dba = linalg.phase_invariant_distance(b, a)
            assert math.isclose(dab, dba, abs_tol=1e-9)
            for c in mats:
                assert dab <= (
                    linalg.phase_invariant_distance(a, c)
                    + linalg.phase_invariant_distance(c, b)
                    + 1e-9
                )


def test_phase_invariant_distance_batch_agrees():
    rng = np.random.default_rng(7)
    target = random_unitary(rng)
    stack = np.stack([random_unitary(rng) for _ in range(12)])
    batch = linalg.phase_invariant_distance_batch(stack, target)
    single = [linalg.phase_invariant_distance(m, target) for m in stack]
    assert np.allclose(batch, single, atol=1e-9)


@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_rz_composition(a, b):
    assert np.allclose(linalg.rz(a) @ linalg.rz(b), linalg.rz(a + b))
