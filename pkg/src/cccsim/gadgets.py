"""Postselection gadgets: contraction, classification, search, word compiler.

A k-to-l gadget runs on k wires.  Wires 0..l-1 carry the input; wires
l..k-1 are ancillas that enter as |a_i> and pass through U (fresh inputs are
conjugated in this model).  After the Clifford circuit, each wire in the
postselect set gets U-dagger and is projected onto <b_i|; the surviving
wires, in ascending order, carry the output.  The postselect set may include
input wires (gadget I does exactly that), so ancilla and postselect roles
are independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import CapabilityError, ParseError
from .stabilizer import (
    CliffordCircuit,
    PauliString,
    enumerate_clifford_words,
    parse_circuit,
)

GADGET_WIRE_CAP = 12
WORD_LENGTH_CAP = 14
DEFAULT_BEAM_WIDTH = 5000


@dataclass(frozen=True, eq=False)
class Gadget:
    k: int
    l: int
    u: np.ndarray
    ancilla_bits: tuple[int, ...]
    gamma: CliffordCircuit
    postselect_set: tuple[int, ...]
    postselect_bits: tuple[int, ...]

    def __post_init__(self):
        if not 0 < self.l < self.k:
            raise ValueError("need 0 < l < k")
        if self.gamma.n != self.k:
            raise ValueError("Clifford circuit width must equal k")
        if len(self.ancilla_bits) != self.k - self.l:
            raise ValueError("need one ancilla bit per ancilla wire")
        s = self.postselect_set
        if len(s) != self.k - self.l or len(set(s)) != len(s):
            raise ValueError("postselect set must be k-l distinct wires")
        if any(w < 0 or w >= self.k for w in s):
            raise ValueError("postselect wire out of range")
        if len(self.postselect_bits) != self.k - self.l:
            raise ValueError("need one bit per postselected wire")

    @property
    def ancilla_wires(self) -> tuple[int, ...]:
        return tuple(range(self.l, self.k))

    @property
    def output_wires(self) -> tuple[int, ...]:
        return tuple(w for w in range(self.k) if w not in self.postselect_set)

    @property
    def postselects_only_ancillas(self) -> bool:
        return set(self.postselect_set) <= set(self.ancilla_wires)


@dataclass(frozen=True, eq=False)
class GadgetAction:
    matrix: np.ndarray
    gamma: float | None
    is_unitary: bool
    is_clifford: bool


def match_pauli_string(m: np.ndarray, tol: float = 1e-9) -> PauliString | None:
    """The PauliString p with i^phase scaling such that m = p, or None.

    Detection reads the permutation-with-signs structure: the X mask is the
    index XOR of the single nonzero per row, the Z mask comes from sign
    flips between rows, the phase from the residual unit factor.
    """
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if m.shape != (dim, dim) or 2**n != dim:
        return None
    hot = np.abs(m) > 0.5
    if not (hot.sum(axis=1) == 1).all():
        return None
    cols = hot.argmax(axis=1)
    xor = int(cols[0])
    x = 0
    for j in range(n):
        if (xor >> (n - 1 - j)) & 1:
            x |= 1 << j
    z = 0
    v0 = m[0, xor]
    for j in range(n):
        r = 1 << (n - 1 - j)
        ratio = m[r, r ^ xor] / v0
        if abs(ratio - 1) > 0.5 and abs(ratio + 1) > 0.5:
            return None
        if abs(ratio + 1) <= 0.5:
            z |= 1 << j
    base = PauliString(n, x, z, 0)
    alpha = v0 / base.to_matrix()[0, xor]
    p = round(np.angle(alpha) / (math.pi / 2)) % 4
    candidate = PauliString(n, x, z, p)
    if np.max(np.abs(m - candidate.to_matrix())) > tol:
        return None
    return candidate


def _is_clifford_action(a: np.ndarray, l: int, tol: float = 1e-9) -> bool:
    atilde = linalg.normalized_action(a, l)
    ad = atilde.conj().T
    for w in range(l):
        for letter in ("X", "Z"):
            image = atilde @ PauliString.single(l, letter, w).to_matrix() @ ad
            if match_pauli_string(image, tol) is None:
                return False
    return True


def gadget_action(g: Gadget) -> GadgetAction:
    """Contract the gadget fragment exactly and classify the result."""
    if g.k > GADGET_WIRE_CAP:
        raise CapabilityError(
            f"gadget contraction on {g.k} wires exceeds the cap of {GADGET_WIRE_CAP}"
        )
    dim_out = 2**g.l
    ud = g.u.conj().T
    a = np.zeros((dim_out, dim_out), dtype=complex)
    anc = dict(zip(g.ancilla_wires, g.ancilla_bits))
    out_wires = g.output_wires
    for i in range(dim_out):
        bits = ["0"] * g.k
        for pos, w in enumerate(range(g.l)):
            bits[w] = str((i >> (g.l - 1 - pos)) & 1)
        for w, b in anc.items():
            bits[w] = str(b)
        state = linalg.basis_state(g.k, "".join(bits))
        for w in g.ancilla_wires:
            state = linalg.apply_gate(state, g.u, (w,))
        for name, qubits in g.gamma.gates:
            state = linalg.apply_gate(state, linalg.GATES[name], qubits)
        for w in g.postselect_set:
            state = linalg.apply_gate(state, ud, (w,))
        tensor = state.reshape((2,) * g.k)
        for w, b in sorted(zip(g.postselect_set, g.postselect_bits), reverse=True):
            tensor = np.take(tensor, b, axis=w)
        a[:, i] = tensor.reshape(-1)
    return _classify_action(a, g.l)


def _classify_action(a: np.ndarray, l: int) -> GadgetAction:
    unitary = linalg.is_unitary_up_to_scale(a, 1e-8)
    gamma = linalg.unitary_scale(a) if unitary else None
    clifford = unitary and _is_clifford_action(a, l)
    return GadgetAction(a, gamma, unitary, clifford)


def pauli_conjugation_test(a: np.ndarray) -> str:
    """CLIFFORD / UNITARY_NON_CLIFFORD / NON_UNITARY for a 2x2 action."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise ValueError("expected a 2x2 action matrix")
    if not linalg.is_unitary_up_to_scale(a, 1e-8):
        return "NON_UNITARY"
    return "CLIFFORD" if _is_clifford_action(a, 1) else "UNITARY_NON_CLIFFORD"


def build_gadget_I(phi: float, theta: float, u: np.ndarray | None = None) -> Gadget:
    """Two-wire gadget: CZ, with the input wire postselected after U-dagger.

    The ancilla wire survives as the output.  Angles fix U = Rz(phi)Rx(theta)
    unless an explicit U (with those Euler angles) is supplied.
    """
    if u is None:
        u = linalg.rz(phi) @ linalg.rx(theta)
    gamma = CliffordCircuit.build(2, [("CZ", (0, 1))])
    return Gadget(2, 1, np.asarray(u, dtype=complex), (0,), gamma, (0,), (0,))


def build_gadget_J(phi: float, theta: float, u: np.ndarray | None = None) -> Gadget:
    """Two-wire gadget: S then CZ on the ancilla, postselected on the ancilla.

    The input wire passes straight through as the output.
    """
    if u is None:
        u = linalg.rz(phi) @ linalg.rx(theta)
    gamma = CliffordCircuit.build(2, [("S", (1,)), ("CZ", (0, 1))])
    return Gadget(2, 1, np.asarray(u, dtype=complex), (0,), gamma, (1,), (0,))


def gadget_I_closed_form(phi: float, theta: float) -> np.ndarray:
    """The contraction of the I gadget, multiplied out by hand."""
    c2 = math.cos(theta / 2) ** 2
    s2 = math.sin(theta / 2) ** 2
    half_sin = 0.5 * math.sin(theta)
    e = np.exp(1j * phi)
    return np.array(
        [[c2, 1j * half_sin / e], [-1j * half_sin * e, -s2]], dtype=complex
    )


def gadget_J_closed_form(theta: float) -> np.ndarray:
    """The contraction of the J gadget; phi drops out entirely."""
    c = math.cos(theta)
    return (
        np.exp(-0.25j * math.pi)
        / math.sqrt(2)
        * np.array([[1j + c, 0], [0, 1 + 1j * c]], dtype=complex)
    )


# -- brute-force search over two-wire gadgets ---------------------------------

_SEARCH_KEY_DECIMALS = 8


def _phase_canonical_key(m: np.ndarray) -> bytes:
    flat = m.reshape(-1)
    lead = flat[np.argmax(np.abs(flat) > 1e-6)]
    canon = flat * (lead.conjugate() / abs(lead))
    return np.round(canon, _SEARCH_KEY_DECIMALS).tobytes()


def search_gadgets(u: np.ndarray, k: int) -> list[tuple[Gadget, GadgetAction]]:
    """All 2-to-1 gadget classes over U whose action is unitary non-Clifford.

    Enumerates every Clifford class modulo phase (11520 at k=2), every
    ancilla bit, postselect wire and postselect bit, classifies all actions
    in one vectorized pass, and deduplicates by the normalized action up to
    global phase.  Results are sorted by canonical key, so the order is
    stable across runs.
    """
    u = np.asarray(u, dtype=complex)
    if k < 2:
        raise ValueError("a gadget needs at least two wires")
    if k == 3:
        raise CapabilityError(
            "k=3 search needs all 92,897,280 three-wire Clifford classes; "
            "that enumeration is out of desk-scale reach"
        )
    if k > 3:
        raise ValueError("search is specified for k of 2 or 3 only")

    words = enumerate_clifford_words(2)
    mats = np.empty((len(words), 4, 4), dtype=complex)
    eye = np.eye(4, dtype=complex)
    full: dict[tuple[str, tuple[int, ...]], np.ndarray] = {}

    def gate_matrix(name: str, qubits: tuple[int, ...]) -> np.ndarray:
        key = (name, qubits)
        if key not in full:
            if name == "CNOT":
                m = linalg.GATES["CNOT"]
                if qubits == (1, 0):
                    sw = eye[[0, 2, 1, 3]]
                    m = sw @ m @ sw
            else:
                g = linalg.GATES[name]
                m = np.kron(g, np.eye(2)) if qubits == (0,) else np.kron(np.eye(2), g)
            full[key] = m
        return full[key]

    for idx, word in enumerate(words):
        m = eye
        for name, qubits in word:
            m = gate_matrix(name, qubits) @ m
        mats[idx] = m

    ud = u.conj().T
    results: dict[bytes, tuple[Gadget, GadgetAction]] = {}
    right = np.kron(np.eye(2), u)  # U feeds the ancilla wire (wire 1)
    for post_wire in (0, 1):
        left = np.kron(ud, np.eye(2)) if post_wire == 0 else np.kron(np.eye(2), ud)
        w = left @ mats @ right
        for a_bit in (0, 1):
            cols = [a_bit, 2 + a_bit]  # input wire 0 = i, wire 1 = a
            for b_bit in (0, 1):
                if post_wire == 0:
                    rows = [2 * b_bit, 2 * b_bit + 1]
                else:
                    rows = [b_bit, 2 + b_bit]
                actions = w[:, rows][:, :, cols]
                keep = _vectorized_non_clifford(actions)
                for idx in np.flatnonzero(keep):
                    action = _classify_action(actions[idx], 1)
                    assert action.is_unitary and not action.is_clifford
                    key = _phase_canonical_key(
                        linalg.normalized_action(action.matrix, 1)
                    )
                    if key in results:
                        continue
                    gadget = Gadget(
                        2,
                        1,
                        u,
                        (a_bit,),
                        CliffordCircuit(2, words[idx]),
                        (post_wire,),
                        (b_bit,),
                    )
                    results[key] = (gadget, action)
    return [results[key] for key in sorted(results)]


def _vectorized_non_clifford(actions: np.ndarray) -> np.ndarray:
    """Boolean mask: action unitary up to scale but not Clifford (2x2 batch)."""
    adag = np.conj(np.swapaxes(actions, -1, -2))
    prod = adag @ actions
    gammas = np.trace(prod, axis1=-2, axis2=-1).real / 2.0
    resid = np.abs(prod - gammas[:, None, None] * np.eye(2)).max(axis=(-2, -1))
    unitary = (gammas > 1e-8) & (resid <= 1e-8 * np.maximum(1.0, gammas))
    dets = (
        actions[:, 0, 0] * actions[:, 1, 1] - actions[:, 0, 1] * actions[:, 1, 0]
    )
    safe = np.where(unitary, dets, 1.0)
    atilde = actions / np.sqrt(safe)[:, None, None]
    atdag = np.conj(np.swapaxes(atilde, -1, -2))
    clifford = np.ones(len(actions), dtype=bool)
    paulis = [linalg.GATES["X"], linalg.GATES["Y"], linalg.GATES["Z"]]
    for p in (linalg.GATES["X"], linalg.GATES["Z"]):
        image = atilde @ p @ atdag
        coeffs = np.stack(
            [np.trace(q @ image, axis1=-2, axis2=-1) / 2.0 for q in paulis], axis=1
        )
        mags = np.abs(coeffs)
        is_pauli = (np.abs(mags.max(axis=1) - 1.0) <= 1e-9) & (
            np.sort(mags, axis=1)[:, :-1] <= 1e-9
        ).all(axis=1)
        clifford &= is_pauli
    return unitary & ~clifford


# -- bounded-budget word search (stand-in for a real compiler) -----------------


def compile_word(
    target: np.ndarray,
    generators: list[np.ndarray],
    max_length: int,
    beam_width: int = DEFAULT_BEAM_WIDTH,
) -> tuple[tuple[int, ...], float]:
    """Best inverse-free word over the generators within the length budget.

    Breadth-first with beam pruning by distance to the target; deduplication
    is up to global phase.  Because expansion is deterministic and pruning
    depends only on the level, a longer budget explores a superset of a
    shorter one, so the returned distance is monotone in max_length.
    """
    if not generators:
        raise ValueError("need at least one generator")
    target = np.asarray(target, dtype=complex)
    gens = [np.asarray(g, dtype=complex) for g in generators]
    for g in [target, *gens]:
        if g.shape != (2, 2) or not linalg.is_unitary(g, 1e-8):
            raise ValueError("target and generators must be 2x2 unitaries")
    if max_length > WORD_LENGTH_CAP:
        raise CapabilityError(
            f"word budget {max_length} exceeds the cap of {WORD_LENGTH_CAP}"
        )

    best_word: tuple[int, ...] = ()
    best_dist = float(linalg.phase_invariant_distance(np.eye(2), target))
    beam: list[tuple[np.ndarray, tuple[int, ...]]] = [(np.eye(2, dtype=complex), ())]
    seen = {_phase_canonical_key(np.eye(2, dtype=complex))}
    for _ in range(max_length):
        candidates: list[tuple[np.ndarray, tuple[int, ...]]] = []
        for m, word in beam:
            for gi, g in enumerate(gens):
                m2 = g @ m
                key = _phase_canonical_key(m2)
                if key in seen:
                    continue
                seen.add(key)
                candidates.append((m2, word + (gi,)))
        if not candidates:
            break
        stack = np.stack([m for m, _ in candidates])
        dists = linalg.phase_invariant_distance_batch(stack, target)
        for (m2, word), d in zip(candidates, dists):
            if d < best_dist - 1e-12:
                best_dist, best_word = float(d), word
        order = sorted(range(len(candidates)), key=lambda i: (dists[i], i))
        beam = [candidates[i] for i in order[:beam_width]]
    return best_word, best_dist


# -- gadget description files ---------------------------------------------------


def parse_gadget_file(text: str, u: np.ndarray) -> Gadget:
    """Parse the gadget description format.

    Header `gadget k=K l=L`, one `ancilla B...` line giving the ancilla bits
    in wire order, one `post wire=W bit=B` line per postselected wire, then
    the Clifford circuit in the shared text format.
    """
    lines = text.splitlines()
    header = None
    ancilla: tuple[int, ...] | None = None
    posts: list[tuple[int, int]] = []
    consumed = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        consumed = lineno
        if not line:
            continue
        fields = line.split()
        if header is None:
            if fields[0] != "gadget":
                raise ParseError(f"line {lineno}: expected 'gadget k=K l=L' header")
            header = _parse_kv(fields[1:], ("k", "l"), lineno)
            continue
        if fields[0] == "ancilla":
            try:
                ancilla = tuple(int(f) for f in fields[1:])
            except ValueError:
                raise ParseError(f"line {lineno}: bad ancilla bits") from None
            if set(ancilla) - {0, 1}:
                raise ParseError(f"line {lineno}: ancilla bits must be 0/1")
            continue
        if fields[0] == "post":
            kv = _parse_kv(fields[1:], ("wire", "bit"), lineno)
            posts.append((kv["wire"], kv["bit"]))
            continue
        if fields[0] == "qubits":
            consumed = lineno - 1
            break
        raise ParseError(f"line {lineno}: unexpected {fields[0]!r} in gadget file")
    if header is None:
        raise ParseError("missing 'gadget' header")
    if ancilla is None:
        raise ParseError("missing 'ancilla' line")
    if not posts:
        raise ParseError("missing 'post' lines")
    circuit = parse_circuit("\n".join(lines[consumed:]))
    if circuit.n != header["k"]:
        raise ParseError(
            f"circuit is on {circuit.n} qubits but the gadget declares k={header['k']}"
        )
    try:
        return Gadget(
            header["k"],
            header["l"],
            np.asarray(u, dtype=complex),
            ancilla,
            circuit,
            tuple(w for w, _ in posts),
            tuple(b for _, b in posts),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _parse_kv(fields: list[str], keys: tuple[str, ...], lineno: int) -> dict[str, int]:
    out: dict[str, int] = {}
    for f in fields:
        key, _, val = f.partition("=")
        if key not in keys or not val:
            raise ParseError(f"line {lineno}: expected {'/'.join(keys)} assignments")
        try:
            out[key] = int(val)
        except ValueError:
            raise ParseError(f"line {lineno}: bad integer in {f!r}") from None
    if set(out) != set(keys):
        raise ParseError(f"line {lineno}: need all of {', '.join(keys)}")
    return out
