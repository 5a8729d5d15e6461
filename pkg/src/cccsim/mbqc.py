"""Cluster-state gadget verifier: teleportation chains, conjugated gadgets,
rotation-angle extraction, and the rational-angle universality decision.

Every gadget here is contracted numerically from its circuit, wire by wire;
the closed forms the tests compare against are computed independently.  The
universality decision, by contrast, is pure arithmetic on exact angles: it
reduces to whether cos of the induced rotation angle lands in {0, +-1/2,
+-1}, the only values a rational-multiple-of-pi rotation can take with a
rational cosine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .angles import ExactAngle

_EYE = np.eye(2, dtype=complex)


def _two_wire(after_top, after_bottom, before_top, before_bottom) -> np.ndarray:
    """(after_top x after_bottom) CZ (before_top x before_bottom)."""
    return (
        np.kron(after_top, after_bottom)
        @ linalg.GATES["CZ"]
        @ np.kron(before_top, before_bottom)
    )


def _postselect_top(w: np.ndarray, bit: int) -> np.ndarray:
    """1-to-1 action: top wire enters and is measured, bottom wire exits."""
    return np.array(
        [[w[2 * bit + j, 2 * i] for i in (0, 1)] for j in (0, 1)], dtype=complex
    )


def teleport_stage(bit: int) -> np.ndarray:
    """One CZ+H teleportation cell with postselection outcome `bit`.

    Top wire: input, CZ, H, <bit|.  Bottom wire: |0>, H, CZ, output.
    Contracts to (X^bit) H / sqrt(2).
    """
    w = _two_wire(linalg.GATES["H"], _EYE, _EYE, linalg.GATES["H"])
    return _postselect_top(w, bit)


def teleport_chain(postselect_bits: str) -> np.ndarray:
    """Contraction of a chain of teleportation cells, first bit first."""
    if not postselect_bits or set(postselect_bits) - {"0", "1"}:
        raise ValueError(f"bad postselection string {postselect_bits!r}")
    acc = _EYE
    for b in postselect_bits:
        acc = teleport_stage(int(b)) @ acc
    return acc


def g_gadget(theta, postselect_bit: int) -> np.ndarray:
    """The teleportation cell conjugated by Rz(theta) layers, with an X
    slipped in on the measured wire.

    Top wire: input, Rz(t), CZ, X, Rz(-t), H, <bit|.
    Bottom wire: |0>, H, Rz(t), CZ, Rz(-t), output.
    Contracts to a matrix proportional to (X^bit) H Rz(2 theta).
    """
    t = float(theta)
    rzp, rzm = linalg.rz(t), linalg.rz(-t)
    w = _two_wire(
        linalg.GATES["H"] @ rzm @ linalg.GATES["X"],
        rzm,
        rzp,
        rzp @ linalg.GATES["H"],
    )
    return _postselect_top(w, int(postselect_bit))


def g_closed_form(theta, postselect_bit: int) -> np.ndarray:
    """(X^bit) H Rz(2 theta): what g_gadget must be proportional to."""
    m = linalg.GATES["H"] @ linalg.rz(2 * float(theta))
    if postselect_bit:
        m = linalg.GATES["X"] @ m
    return m


def cz_between_gadget_wires(theta) -> np.ndarray:
    """CZ conjugated by the same Rz(theta) layers; the layers cancel."""
    t = float(theta)
    layer_in = np.kron(linalg.rz(t), linalg.rz(t))
    layer_out = np.kron(linalg.rz(-t), linalg.rz(-t))
    return layer_out @ linalg.GATES["CZ"] @ layer_in


@dataclass(frozen=True, eq=False)
class BlochRotation:
    axis: np.ndarray
    angle: float
    axis_arbitrary: bool = False


def rotation_angle(g: np.ndarray) -> BlochRotation:
    """Rotation angle in [0, pi] and axis of a 2x2 unitary, phase-stripped.

    The global phase is removed by dividing out a square root of the
    determinant and flipping the sign to make the trace nonnegative; the
    angle then satisfies cos(angle/2) = trace/2.
    """
    g = np.asarray(g, dtype=complex)
    if g.shape != (2, 2) or not linalg.is_unitary(g, 1e-8):
        raise ValueError("rotation extraction needs a 2x2 unitary")
    su = g / np.sqrt(complex(np.linalg.det(g)))
    tr = complex(np.trace(su)).real
    if tr < 0:
        su, tr = -su, -tr
    half_cos = min(tr / 2.0, 1.0)
    angle = 2.0 * math.acos(half_cos)
    half_sin = math.sin(angle / 2.0)
    if half_sin < 1e-9:
        return BlochRotation(np.array([0.0, 0.0, 1.0]), 0.0, axis_arbitrary=True)
    m = (su - (tr / 2.0) * _EYE) / (-1j * half_sin)
    axis = np.array([m[0, 1].real, -m[0, 1].imag, m[0, 0].real])
    return BlochRotation(axis / np.linalg.norm(axis), angle)


@dataclass(frozen=True)
class UniversalityVerdict:
    universal: bool
    reason: str
    irrational_witnesses: tuple[str, ...]
    cos_angle_g0: float
    cos_angle_g1: float
    exact_cosines: tuple[Fraction, Fraction] | None


def universality_check(theta: ExactAngle) -> UniversalityVerdict:
    """Decide whether {H Rz(2 theta), X H Rz(2 theta)} is a universal pair.

    Requires a rational multiple of pi: the decision is arithmetic.  The
    Bloch rotation angles of the two gates satisfy cos(angle0) = -cos^2
    theta and cos(angle1) = -sin^2 theta; a rational rotation with rational
    cosine forces the cosine into {0, +-1/2, +-1}, which happens exactly
    when theta is a multiple of pi/4.  Off those multiples both gates rotate
    by irrational multiples of pi, which is what universality needs.
    """
    if theta.kind != "RATIONAL_PI":
        raise ValueError(
            "universality is decided arithmetically; theta must be an exact "
            "rational multiple of pi"
        )
    cos0 = -math.cos(float(theta)) ** 2
    cos1 = -math.sin(float(theta)) ** 2
    if not theta.in_quarter_pi_z():
        return UniversalityVerdict(
            universal=True,
            reason=(
                "theta is not a multiple of pi/4: both gate rotations are "
                "irrational multiples of pi (rational cosine outside "
                "{0, +-1/2, +-1})"
            ),
            irrational_witnesses=("G0", "G1"),
            cos_angle_g0=cos0,
            cos_angle_g1=cos1,
            exact_cosines=None,
        )
    frac = theta.as_pi_fraction()
    if frac.denominator in (1, 2):
        # cos^2 theta is 0 or 1: rotation angles are pi/2 and pi
        exact = (Fraction(-1), Fraction(0)) if frac.denominator == 1 else (
            Fraction(0),
            Fraction(-1),
        )
        family = "{pi/2, pi}"
    else:
        # odd multiple of pi/4: both cosines are -1/2, both angles 2 pi / 3
        exact = (Fraction(-1, 2), Fraction(-1, 2))
        family = "{2pi/3, 2pi/3}"
    return UniversalityVerdict(
        universal=False,
        reason=f"theta is a multiple of pi/4: rotation angles fall in the "
        f"rational family {family}",
        irrational_witnesses=(),
        cos_angle_g0=cos0,
        cos_angle_g1=cos1,
        exact_cosines=exact,
    )
