"""Analytic predictions for the detected particles.

Everything here is built directly from the closed-form output of the scheme -
Dicke-state superpositions whose coefficients depend on a single interference
phase - and never touches the stage-by-stage engine, so the two routes can be
checked against each other.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from enum import Enum

from .states import PureState, detector_outcome, pure_state_from_terms

#: Exact powers of i; complex exponentiation would introduce rounding.
_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)


class EntangledClassId(Enum):
    """The four families of alternating-sign Dicke superpositions."""

    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"


@dataclass(frozen=True)
class DickeIndex:
    """Number of detected particles ``n`` and of primed ports ``r``."""

    n: int
    r: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0 <= self.r <= self.n:
            raise ValueError(f"r must lie in [0, {self.n}], got {self.r}")


@dataclass(frozen=True)
class EntangledClass:
    """A class identifier together with the detected-particle count it acts on.

    F1 and F2 exist for even ``n >= 2``; F3 and F4 for odd ``n >= 1``.
    """

    class_id: EntangledClassId
    n: int

    def __post_init__(self) -> None:
        even = self.class_id in (EntangledClassId.F1, EntangledClassId.F2)
        if even and (self.n < 2 or self.n % 2):
            raise ValueError(f"{self.class_id.value} requires even n >= 2, got n={self.n}")
        if not even and (self.n < 1 or self.n % 2 == 0):
            raise ValueError(f"{self.class_id.value} requires odd n >= 1, got n={self.n}")

    @property
    def dicke_r_values(self) -> tuple[int, ...]:
        """The r values the class superposes, in ascending order."""
        if self.class_id in (EntangledClassId.F1, EntangledClassId.F3):
            return tuple(range(0, self.n + 1, 2))
        return tuple(range(1, self.n + 1, 2))


def dicke_state(n: int, r: int) -> PureState:
    """Normalized equal superposition of all detector outcomes with ``r`` primed ports."""
    index = DickeIndex(n, r)
    amp = 1.0 / math.sqrt(math.comb(index.n, index.r))
    terms = []
    for primed_slots in itertools.combinations(range(index.n), index.r):
        ports = tuple(1 if k in primed_slots else 0 for k in range(index.n))
        terms.append((detector_outcome(ports), amp))
    return pure_state_from_terms(terms)


def predicted_output_state(n: int, xi: float) -> PureState:
    """Detected-particle state for ``n`` detected particles at interference phase ``xi``.

    Every outcome with ``r`` primed ports carries the amplitude
    ``(1/sqrt(2))^(n+1) * (i^r + i^(n-r) e^(i xi))``; the result has unit norm
    for any ``xi``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    phase = cmath.exp(1j * float(xi))
    scale = 0.5 ** ((n + 1) / 2)
    terms = []
    for ports in itertools.product((0, 1), repeat=n):
        r = sum(ports)
        coefficient = _I_POW[r % 4] + _I_POW[(n - r) % 4] * phase
        terms.append((detector_outcome(ports), scale * coefficient))
    return pure_state_from_terms(terms)


def entangled_class_state(cls: EntangledClass) -> PureState:
    """Normalized alternating-sign Dicke superposition for the given class.

    Each contributing Dicke component enters as its unnormalized sum of
    product outcomes, so all outcomes share one magnitude and only the sign
    alternates with the component index.
    """
    r_values = cls.dicke_r_values
    total = sum(math.comb(cls.n, r) for r in r_values)
    amp = 1.0 / math.sqrt(total)
    terms = []
    for position, r in enumerate(r_values):
        sign = -amp if position % 2 else amp
        for primed_slots in itertools.combinations(range(cls.n), r):
            ports = tuple(1 if k in primed_slots else 0 for k in range(cls.n))
            terms.append((detector_outcome(ports), sign))
    return pure_state_from_terms(terms)


def xi_for_class(n: int, class_id: EntangledClassId, m: int = 0) -> float:
    """An interference phase producing ``class_id`` at ``n`` detected particles.

    ``m`` selects among the equivalent phases, which repeat every 2 pi.
    """
    EntangledClass(class_id, n)  # parity and range checks
    residue = n % 4
    if class_id == EntangledClassId.F1:
        return 2 * m * math.pi if residue == 0 else (2 * m + 1) * math.pi
    if class_id == EntangledClassId.F2:
        return (2 * m + 1) * math.pi if residue == 0 else 2 * m * math.pi
    if class_id == EntangledClassId.F3:
        return (2 * m - 0.5) * math.pi if residue == 1 else (2 * m + 0.5) * math.pi
    return (2 * m + 0.5) * math.pi if residue == 1 else (2 * m - 0.5) * math.pi


def predicted_probability(n: int, r: int, xi: float) -> float:
    """Coincidence probability of any single outcome with ``r`` primed ports
    at full path identity."""
    index = DickeIndex(n, r)
    return (1.0 + math.cos(float(xi) + (index.n - 2 * index.r) * math.pi / 2)) / 2**index.n


def bell_psi_plus() -> PureState:
    """(|01> + |10>)/sqrt(2) on two detected particles."""
    amp = math.sqrt(0.5)
    return pure_state_from_terms(
        [(detector_outcome((0, 1)), amp), (detector_outcome((1, 0)), amp)]
    )


def bell_phi_minus() -> PureState:
    """(|00> - |11>)/sqrt(2) on two detected particles."""
    amp = math.sqrt(0.5)
    return pure_state_from_terms(
        [(detector_outcome((0, 0)), amp), (detector_outcome((1, 1)), -amp)]
    )


def ghz_class_three() -> PureState:
    """(|000> - |110> - |101> - |011>)/2, the three-detected GHZ-class output."""
    return pure_state_from_terms(
        [
            (detector_outcome((0, 0, 0)), 0.5),
            (detector_outcome((1, 1, 0)), -0.5),
            (detector_outcome((1, 0, 1)), -0.5),
            (detector_outcome((0, 1, 1)), -0.5),
        ]
    )
