import math

import numpy as np
import pytest

from cccsim import linalg
from cccsim.ccc import classify, decompose_unitary
from cccsim.errors import CapabilityError, ParseError
from cccsim.gadgets import (
    Gadget,
    WORD_LENGTH_CAP,
    build_gadget_I,
    build_gadget_J,
    compile_word,
    gadget_action,
    gadget_I_closed_form,
    gadget_J_closed_form,
    match_pauli_string,
    parse_gadget_file,
    pauli_conjugation_test,
    search_gadgets,
)
from cccsim.stabilizer import CliffordCircuit, PauliString

THETA_GRID = [k * math.pi / 6 for k in range(-6, 7)] + [0.3, 1.234]
PHI_GRID = [k * math.pi / 4 for k in range(-4, 5)] + [0.7, 2.1]


def halfpi_odd(x):
    r = x / (math.pi / 2)
    return abs(r - round(r)) < 1e-9 and round(r) % 2 == 1


def halfpi(x):
    r = x / (math.pi / 2)
    return abs(r - round(r)) < 1e-9


# -- contraction vs closed forms ---------------------------------------------------


def test_gadget_I_contraction_matches_closed_form():
    for phi in PHI_GRID:
        for theta in THETA_GRID:
            action = gadget_action(build_gadget_I(phi, theta))
            assert np.max(np.abs(action.matrix - gadget_I_closed_form(phi, theta))) < 1e-12


def test_gadget_J_contraction_matches_closed_form():
    for phi in (0.0, 0.9):
        for theta in THETA_GRID:
            action = gadget_action(build_gadget_J(phi, theta))
            assert np.max(np.abs(action.matrix - gadget_J_closed_form(theta))) < 1e-12


def test_gadget_I_determinant():
    for theta in THETA_GRID:
        a = gadget_I_closed_form(0.7, theta)
        assert abs(np.linalg.det(a) - (-math.sin(theta) ** 2 / 2)) < 1e-12


def test_gadget_J_determinant():
    for theta in THETA_GRID:
        a = gadget_J_closed_form(theta)
        det = np.linalg.det(a)
        assert abs(det.imag) < 1e-12
        assert abs(det.real - (1 + math.cos(theta) ** 2) / 2) < 1e-12


def test_gadget_I_unitary_exactly_on_odd_half_pi():
    for theta in THETA_GRID:
        action = gadget_action(build_gadget_I(0.7, theta))
        assert action.is_unitary == halfpi_odd(theta), theta
        if action.is_unitary:
            assert math.isclose(action.gamma, 0.5)  # postselection succeeds half the time


def test_gadget_I_clifford_iff_phi_on_half_pi_lattice():
    for phi in PHI_GRID:
        action = gadget_action(build_gadget_I(phi, math.pi / 2))
        assert action.is_clifford == halfpi(phi), phi


def test_gadget_I_normalized_action_at_odd_half_pi():
    # A ~ (1/sqrt 2) [[1, i s e^{-i phi}], [-i s e^{i phi}, -1]] with s = (-1)^k
    for k in (0, 1, 2, -1):
        theta = (2 * k + 1) * math.pi / 2
        phi = 0.9
        s = (-1) ** k
        expected = np.array(
            [
                [1, 1j * s * np.exp(-1j * phi)],
                [-1j * s * np.exp(1j * phi), -1],
            ]
        ) / math.sqrt(2)
        a = gadget_action(build_gadget_I(phi, theta)).matrix
        assert linalg.proportional_up_to_phase(a, expected), k


def test_gadget_J_always_unitary_up_to_scale():
    for theta in THETA_GRID:
        action = gadget_action(build_gadget_J(0.0, theta))
        assert action.is_unitary
        assert math.isclose(action.gamma, (1 + math.cos(theta) ** 2) / 2, abs_tol=1e-12)
        assert action.is_clifford == halfpi(theta), theta


def test_gadget_J_normalized_action_is_a_z_rotation():
    for theta in (0.3, 1.0, 2.5, -0.8):
        a = linalg.normalized_action(gadget_J_closed_form(theta))
        expected = linalg.GATES["SDG"] @ linalg.rz(2 * math.atan(math.cos(theta)))
        assert linalg.proportional_up_to_phase(a, expected, tol=1e-9), theta


def test_pauli_conjugation_test_three_ways():
    assert pauli_conjugation_test(gadget_I_closed_form(0.7, 0.4)) == "NON_UNITARY"
    assert pauli_conjugation_test(gadget_I_closed_form(0.7, math.pi / 2)) == "UNITARY_NON_CLIFFORD"
    assert pauli_conjugation_test(gadget_I_closed_form(math.pi, math.pi / 2)) == "CLIFFORD"
    assert pauli_conjugation_test(gadget_J_closed_form(math.pi / 2)) == "CLIFFORD"
    assert pauli_conjugation_test(gadget_J_closed_form(math.pi / 3)) == "UNITARY_NON_CLIFFORD"
    assert pauli_conjugation_test(0.5 * linalg.GATES["H"]) == "CLIFFORD"
    with pytest.raises(ValueError):
        pauli_conjugation_test(np.eye(4))


# -- Pauli recognition ---------------------------------------------------------------


def test_match_pauli_string_single_qubit():
    for name in ("X", "Y", "Z"):
        for phase in range(4):
            m = 1j**phase * linalg.GATES[name]
            p = match_pauli_string(m)
            assert p is not None and np.allclose(p.to_matrix(), m), (name, phase)


def test_match_pauli_string_random_words():
    rng = np.random.default_rng(41)
    for _ in range(40):
        n = int(rng.integers(1, 4))
        p = PauliString(
            n, int(rng.integers(0, 2**n)), int(rng.integers(0, 2**n)), int(rng.integers(0, 4))
        )
        q = match_pauli_string(p.to_matrix())
        assert q == p


def test_match_pauli_string_rejects_non_paulis():
    assert match_pauli_string(linalg.GATES["H"]) is None
    assert match_pauli_string(linalg.GATES["T"]) is None
    assert match_pauli_string(0.5 * linalg.GATES["X"]) is None
    assert match_pauli_string(np.zeros((2, 2), dtype=complex)) is None


# -- gadget plumbing -----------------------------------------------------------------


def test_gadget_wire_bookkeeping():
    g_i = build_gadget_I(0.1, 0.2)
    assert g_i.ancilla_wires == (1,)
    assert g_i.output_wires == (1,)
    assert not g_i.postselects_only_ancillas  # it postselects the input wire
    g_j = build_gadget_J(0.1, 0.2)
    assert g_j.output_wires == (0,)
    assert g_j.postselects_only_ancillas


def test_gadget_validation():
    u = linalg.GATES["H"]
    cz = CliffordCircuit.build(2, [("CZ", (0, 1))])
    with pytest.raises(ValueError):
        Gadget(2, 2, u, (), cz, (), ())  # l must be < k
    with pytest.raises(ValueError):
        Gadget(2, 1, u, (0, 1), cz, (0,), (0,))  # too many ancilla bits
    with pytest.raises(ValueError):
        Gadget(2, 1, u, (0,), cz, (0, 1), (0, 0))  # postselect set too big
    with pytest.raises(ValueError):
        Gadget(2, 1, u, (0,), cz, (5,), (0,))  # wire out of range
    with pytest.raises(ValueError):
        Gadget(2, 1, u, (0,), CliffordCircuit.build(3, []), (0,), (0,))  # width


def test_gadget_action_wire_cap():
    k = 13
    g = Gadget(
        k,
        1,
        linalg.GATES["H"],
        (0,) * (k - 1),
        CliffordCircuit.build(k, []),
        tuple(range(1, k)),
        (0,) * (k - 1),
    )
    with pytest.raises(CapabilityError):
        gadget_action(g)


def test_postselect_bit_changes_the_action():
    a0 = gadget_action(build_gadget_I(0.3, 0.9)).matrix
    flipped = Gadget(
        2,
        1,
        linalg.rz(0.3) @ linalg.rx(0.9),
        (0,),
        CliffordCircuit.build(2, [("CZ", (0, 1))]),
        (0,),
        (1,),
    )
    a1 = gadget_action(flipped).matrix
    assert not linalg.proportional_up_to_phase(a0, a1)


# -- file format ---------------------------------------------------------------------


GADGET_I_TEXT = """\
gadget k=2 l=1
ancilla 0
post wire=0 bit=0
qubits 2
CZ 0 1
"""


def test_parse_gadget_file_round_trip():
    u = linalg.rz(0.7) @ linalg.rx(math.pi / 2)
    g = parse_gadget_file(GADGET_I_TEXT, u)
    built = build_gadget_I(0.7, math.pi / 2, u=u)
    assert g.k == 2 and g.l == 1
    assert g.ancilla_bits == built.ancilla_bits
    assert g.postselect_set == built.postselect_set
    assert np.allclose(
        gadget_action(g).matrix, gadget_action(built).matrix
    )


@pytest.mark.parametrize(
    "mutation",
    [
        lambda t: t.replace("gadget k=2 l=1", "gadget k=2"),
        lambda t: t.replace("ancilla 0\n", ""),
        lambda t: t.replace("post wire=0 bit=0\n", ""),
        lambda t: t.replace("wire=0", "wire=7"),
        lambda t: t.replace("qubits 2", "qubits 3"),
        lambda t: t.replace("ancilla 0", "ancilla 2"),
        lambda t: "junk\n" + t,
    ],
)
def test_parse_gadget_file_rejects(mutation):
    with pytest.raises(ParseError):
        parse_gadget_file(mutation(GADGET_I_TEXT), linalg.GATES["H"])


# -- search --------------------------------------------------------------------------


def case_iv_u():
    return linalg.rz(math.pi / 5) @ linalg.rx(math.pi / 3)


def test_search_finds_witnesses_for_case_iv():
    u = case_iv_u()
    found = search_gadgets(u, 2)
    assert found
    for gadget, action in found:
        assert action.is_unitary and not action.is_clifford
        assert gadget.k == 2 and gadget.l == 1
    # the J-gadget action must be among the discovered classes
    target = linalg.normalized_action(gadget_action(build_gadget_J(0, math.pi / 3)).matrix)
    hits = [
        g
        for g, a in found
        if linalg.proportional_up_to_phase(linalg.normalized_action(a.matrix), target, tol=1e-6)
    ]
    assert hits
    # both postselection styles appear somewhere in the catalogue
    styles = {g.postselects_only_ancillas for g, _ in found}
    assert styles == {True, False}


def test_search_finds_witnesses_for_case_iii():
    u = linalg.rz(math.pi / 3) @ linalg.rx(math.pi / 2)
    assert classify(decompose_unitary(u)).complexity_class == "PH_SUPREME"
    assert search_gadgets(u, 2)


def test_search_empty_for_easy_unitaries():
    for u in (linalg.GATES["H"], linalg.GATES["T"], linalg.rz(0.9)):
        assert search_gadgets(u, 2) == []


def test_search_matches_classification_verdict():
    # non-empty exactly when the conjugating unitary is in a hard case
    for u in (case_iv_u(), linalg.GATES["S"], linalg.rz(math.pi / 4) @ linalg.rx(math.pi / 2)):
        verdict = classify(decompose_unitary(u))
        found = search_gadgets(u, 2)
        assert bool(found) == (verdict.complexity_class == "PH_SUPREME")


def test_search_is_deterministic():
    u = case_iv_u()
    first = search_gadgets(u, 2)
    second = search_gadgets(u, 2)
    assert len(first) == len(second)
    for (g1, a1), (g2, a2) in zip(first, second):
        assert np.array_equal(a1.matrix, a2.matrix)
        assert g1.gamma.gates == g2.gamma.gates


def test_search_capability_boundaries():
    u = case_iv_u()
    with pytest.raises(ValueError):
        search_gadgets(u, 1)
    with pytest.raises(CapabilityError):
        search_gadgets(u, 3)
    with pytest.raises(ValueError):
        search_gadgets(u, 4)


# -- word compilation ----------------------------------------------------------------


def test_compile_word_exact_targets():
    h, s = linalg.GATES["H"], linalg.GATES["S"]
    word, dist = compile_word(h, [h, s], 3)
    assert dist < 1e-12 and word == (0,)
    word, dist = compile_word(linalg.GATES["X"], [h, s], 6)
    assert dist < 1e-12
    assert [(h, s)[i] for i in word]  # indices are valid
    acc = np.eye(2)
    for i in word:
        acc = (h, s)[i] @ acc
    assert linalg.phase_invariant_distance(acc, linalg.GATES["X"]) < 1e-12


def test_compile_word_improves_with_budget():
    target = linalg.rz(math.pi / 4)
    gens = [
        linalg.GATES["H"],
        linalg.GATES["S"],
        linalg.normalized_action(gadget_J_closed_form(math.pi / 3)),
    ]
    _, short = compile_word(target, gens, 4)
    _, long = compile_word(target, gens, 12)
    assert long <= short + 1e-12
    assert long < 0.01, long
    assert short > 0.05  # the short budget genuinely cannot reach it
    # deterministic search: these distances are exact reruns
    assert math.isclose(short, 0.07093364769074777, abs_tol=1e-9)
    assert math.isclose(long, 0.004964357976787501, abs_tol=1e-9)


def test_compile_word_validates():
    h = linalg.GATES["H"]
    with pytest.raises(ValueError):
        compile_word(h, [], 4)
    with pytest.raises(ValueError):
        compile_word(np.eye(3), [h], 4)
    with pytest.raises(ValueError):
        compile_word(h, [np.array([[1, 0], [0, 0.5]])], 4)
    with pytest.raises(CapabilityError):
        compile_word(h, [h], WORD_LENGTH_CAP + 1)
