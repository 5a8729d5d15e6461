"""Monte Carlo anticoncentration trials, 2-design moment checks, and the
exact parameter arithmetic behind the hardness argument.

The anticoncentration bound holds for any fixed conjugating unitary and
outcome string, so a trial prepares the conjugated reference states once and
only redraws the random Clifford.  Parameter arithmetic stays in Fractions
end to end; floats are converted through their decimal string so that 1/5
arrives as 1/5 and not as its binary neighbour.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from . import linalg
from .ccc import OutcomeDistribution, apply_circuit, tv_distance
from .errors import CapabilityError
from .stabilizer import random_clifford, tableau_to_circuit

MIN_TRIAL_SAMPLES = 100


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class SupremacyParams:
    a: Fraction
    c: Fraction
    epsilon: Fraction

    @property
    def fraction(self) -> Fraction:
        return (1 - self.a) ** 2 / 2 - self.c

    @property
    def mult_error(self) -> Fraction:
        return 2 * self.epsilon / (self.a * self.c)

    @property
    def valid(self) -> bool:
        return self.fraction > 0 and self.mult_error < 1


def supremacy_parameters(a, c, epsilon) -> SupremacyParams:
    """Exact rational check of the two hardness-argument constraints."""
    values = {"a": _as_fraction(a), "c": _as_fraction(c), "epsilon": _as_fraction(epsilon)}
    for name, v in values.items():
        if not 0 < v < 1:
            raise ValueError(f"{name} must lie in (0, 1), got {v}")
    return SupremacyParams(**values)


def paley_zygmund_bound(a, mean: float, second_moment: float) -> float:
    """(1-a)^2 mean^2 / second_moment, the tail lower bound at level a*mean."""
    a = float(a)
    if not 0 <= a < 1:
        raise ValueError(f"a must lie in [0, 1), got {a}")
    if second_moment <= 0:
        raise ValueError("second moment must be positive")
    return (1 - a) ** 2 * mean**2 / second_moment


@dataclass(frozen=True, eq=False)
class AnticoncentrationReport:
    n: int
    u_description: str
    y: str
    num_samples: int
    seed: int
    a: float
    mean_p: float
    mean_p_squared: float
    mean_se: float
    second_moment_se: float
    p_values: np.ndarray = field(repr=False)

    @property
    def theory_mean(self) -> float:
        return 2.0**-self.n

    @property
    def theory_second_moment(self) -> float:
        return 2 * (1 - 2.0**-self.n) / (2 ** (2 * self.n) - 1)

    def tail_fraction(self, a=None) -> float:
        """Fraction of draws with p >= a / 2^n."""
        a = self.a if a is None else float(a)
        if not 0 <= a < 1:
            raise ValueError(f"a must lie in [0, 1), got {a}")
        return float(np.mean(self.p_values >= a / 2**self.n))

    def pz_bound(self, a=None) -> float:
        """Large-n limit of the Paley-Zygmund tail bound, (1-a)^2 / 2."""
        a = self.a if a is None else float(a)
        if not 0 <= a < 1:
            raise ValueError(f"a must lie in [0, 1), got {a}")
        return (1 - a) ** 2 / 2

    def as_dict(self) -> dict:
        """JSON-ready summary; raw p values are exported separately as CSV."""
        return {
            "n": self.n,
            "u_description": self.u_description,
            "y": self.y,
            "num_samples": self.num_samples,
            "seed": self.seed,
            "a": self.a,
            "mean_p": self.mean_p,
            "mean_se": self.mean_se,
            "mean_p_squared": self.mean_p_squared,
            "second_moment_se": self.second_moment_se,
            "theory_mean": self.theory_mean,
            "theory_second_moment": self.theory_second_moment,
            "tail_fraction": self.tail_fraction(),
            "pz_bound": self.pz_bound(),
        }


def anticoncentration_trial(
    n: int,
    u: np.ndarray,
    y: str,
    num_samples: int,
    a=0.2,
    seed: int = 0,
    u_description: str = "unitary",
) -> AnticoncentrationReport:
    """Estimate the moments and tail of p = |<y| U*^n Gamma U^n |0^n>|^2
    over uniformly random Cliffords Gamma.

    The conjugation by U only relabels the fixed bra and ket, so the states
    U^n|0^n> and U^n|y> are built once and each draw costs one Clifford
    synthesis plus a statevector pass.
    """
    if n > linalg.dense_cap():
        raise CapabilityError(
            f"anticoncentration trial at n={n} exceeds the dense cap of "
            f"{linalg.dense_cap()}"
        )
    if num_samples < MIN_TRIAL_SAMPLES:
        raise ValueError(f"need at least {MIN_TRIAL_SAMPLES} samples, got {num_samples}")
    if len(y) != n or set(y) - {"0", "1"}:
        raise ValueError(f"bad outcome string {y!r} for n={n}")
    a = float(a)
    if not 0 <= a < 1:
        raise ValueError(f"a must lie in [0, 1), got {a}")

    u = np.asarray(u, dtype=complex)
    psi = reduce(np.kron, [u[:, 0]] * n)
    phi = reduce(np.kron, [u[:, int(bit)] for bit in y])

    rng = np.random.default_rng(seed)
    p_values = np.empty(num_samples)
    for i in range(num_samples):
        circuit = tableau_to_circuit(random_clifford(n, rng))
        amp = np.vdot(phi, apply_circuit(psi, circuit))
        p_values[i] = abs(amp) ** 2

    squares = p_values**2
    return AnticoncentrationReport(
        n=n,
        u_description=u_description,
        y=y,
        num_samples=num_samples,
        seed=seed,
        a=a,
        mean_p=float(p_values.mean()),
        mean_p_squared=float(squares.mean()),
        mean_se=float(p_values.std(ddof=1) / math.sqrt(num_samples)),
        second_moment_se=float(squares.std(ddof=1) / math.sqrt(num_samples)),
        p_values=p_values,
    )


def markov_set_audit(exact: OutcomeDistribution, approx: OutcomeDistribution, c) -> float:
    """Fraction of outcomes whose error fits the per-outcome Markov budget.

    With realized total-variation error e, the budget is 2e/(c 2^n); the
    returned fraction always lands at or above 1 - c.
    """
    c = float(c)
    if not 0 < c < 1:
        raise ValueError(f"c must lie in (0, 1), got {c}")
    if exact.n != approx.n:
        raise ValueError("qubit count mismatch")
    threshold = 2 * tv_distance(exact, approx) / (c * 2**exact.n)
    fraction = float(np.mean(np.abs(approx.probs - exact.probs) <= threshold))
    assert fraction >= 1 - c
    return fraction
