"""Two-source interferometer engine.

Evolves the joint emission state through the three stages of the scheme:
source superposition, path identity of the aligned particles (with optional
attenuation), and 50-50 beam splitters on the detected particles.  Stages are
pure functions over immutable states and reject out-of-order application.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, replace
from typing import Iterator

from .errors import ConfigError, StageOrderError, StructureError
from .states import (
    DensityMatrix,
    LabelKind,
    Outcome,
    PathLabel,
    PureState,
    aligned_beam,
    detector,
    loss,
    partial_trace,
    primed_detector,
    primed_source_beam,
    pure_state_from_terms,
    source_beam,
    to_density,
)

#: Capacity bound on the number of particles per source.
MAX_PARTICLES = 16

_DETECTOR_KINDS = frozenset({LabelKind.DETECTOR_UNPRIMED, LabelKind.DETECTOR_PRIMED})


@dataclass(frozen=True)
class SchemeConfig:
    """Full experiment description.

    ``phi`` holds the beam-splitter arm phases for detected particles
    ``1..n_particles-n_aligned``; ``theta`` and ``transmission`` hold the
    propagation phases and attenuator amplitude transmissions for the aligned
    particles ``n_particles-n_aligned+1..n_particles``.  Empty phase tuples
    default to zeros, an omitted ``transmission`` defaults to all ones.
    """

    n_particles: int
    n_aligned: int
    phi0: float = 0.0
    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    transmission: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        n, m = self.n_particles, self.n_aligned
        if not isinstance(n, int) or not isinstance(m, int):
            raise ConfigError("n_particles and n_aligned must be integers")
        if n < 1:
            raise ConfigError(f"n_particles must be >= 1, got {n}")
        if n > MAX_PARTICLES:
            raise ConfigError(f"n_particles must be <= {MAX_PARTICLES}, got {n}")
        if not 0 <= m <= n:
            raise ConfigError(f"n_aligned must lie in [0, {n}], got {m}")

        phi = tuple(float(x) for x in self.phi) or (0.0,) * (n - m)
        theta = tuple(float(x) for x in self.theta) or (0.0,) * m
        trans = self.transmission
        trans = (1.0,) * m if trans is None else tuple(float(t) for t in trans)
        if len(phi) != n - m:
            raise ConfigError(f"phi must have {n - m} entries, got {len(phi)}")
        if len(theta) != m:
            raise ConfigError(f"theta must have {m} entries, got {len(theta)}")
        if len(trans) != m:
            raise ConfigError(f"transmission must have {m} entries, got {len(trans)}")
        for name, values in (("phi0", (self.phi0,)), ("phi", phi), ("theta", theta)):
            if any(not math.isfinite(v) for v in values):
                raise ConfigError(f"{name} contains a non-finite phase")
        if any(not 0.0 <= t <= 1.0 for t in trans):
            raise ConfigError(f"transmission values must lie in [0, 1], got {trans}")
        object.__setattr__(self, "phi0", float(self.phi0))
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "transmission", trans)

    @property
    def n_detected(self) -> int:
        return self.n_particles - self.n_aligned

    @property
    def detected_range(self) -> range:
        """Particle indices 1..N-M headed for beam splitters."""
        return range(1, self.n_detected + 1)

    @property
    def aligned_range(self) -> range:
        """Particle indices N-M+1..N whose paths are made identical."""
        return range(self.n_detected + 1, self.n_particles + 1)

    @property
    def xi(self) -> float:
        """Interference phase phi0 + sum(phi) - sum(theta) the output depends on."""
        return self.phi0 + sum(self.phi) - sum(self.theta)

    def phi_for(self, j: int) -> float:
        if j not in self.detected_range:
            raise ValueError(f"particle {j} is not a detected particle")
        return self.phi[j - 1]

    def theta_for(self, l: int) -> float:
        if l not in self.aligned_range:
            raise ValueError(f"particle {l} is not an aligned particle")
        return self.theta[l - self.n_detected - 1]

    def transmission_for(self, l: int) -> float:
        if l not in self.aligned_range:
            raise ValueError(f"particle {l} is not an aligned particle")
        return self.transmission[l - self.n_detected - 1]

    def replace_phase(self, variable: str, value: float) -> SchemeConfig:
        """New config with one phase replaced.

        ``variable`` is ``"phi0"``, ``"phi.<j>"`` for a detected particle, or
        ``"theta.<l>"`` for an aligned particle.
        """
        value = float(value)
        if variable == "phi0":
            return replace(self, phi0=value)
        family, _, tail = variable.partition(".")
        if family in ("phi", "theta") and tail.isdigit():
            index = int(tail)
            if family == "phi" and index in self.detected_range:
                phi = list(self.phi)
                phi[index - 1] = value
                return replace(self, phi=tuple(phi))
            if family == "theta" and index in self.aligned_range:
                theta = list(self.theta)
                theta[index - self.n_detected - 1] = value
                return replace(self, theta=tuple(theta))
        raise ValueError(f"unknown phase variable {variable!r} for this scheme")


@dataclass(frozen=True)
class DetectionOutcome:
    """Which detector of each pair fired: one 0 (unprimed) or 1 (primed) per
    detected particle."""

    ports: tuple[int, ...]

    def __post_init__(self) -> None:
        ports = tuple(int(p) for p in self.ports)
        if not ports:
            raise ValueError("a detection outcome needs at least one port")
        if any(p not in (0, 1) for p in ports):
            raise ValueError(f"ports must be 0 or 1, got {ports}")
        object.__setattr__(self, "ports", ports)

    def bitstring(self) -> str:
        return "".join(str(p) for p in self.ports)

    def __len__(self) -> int:
        return len(self.ports)

    @staticmethod
    def all_outcomes(n_detected: int) -> tuple[DetectionOutcome, ...]:
        """All 2^n outcomes in ascending bitstring order."""
        if n_detected < 1:
            raise ValueError("n_detected must be >= 1")
        return tuple(
            DetectionOutcome(ports) for ports in itertools.product((0, 1), repeat=n_detected)
        )


def build_two_source_state(cfg: SchemeConfig) -> PureState:
    """Equal-amplitude superposition of the two emission branches."""
    unprimed = tuple(source_beam(j) for j in range(1, cfg.n_particles + 1))
    primed = tuple(primed_source_beam(j) for j in range(1, cfg.n_particles + 1))
    amp = math.sqrt(0.5)
    return pure_state_from_terms(
        [(unprimed, amp), (primed, amp * cmath.exp(1j * cfg.phi0))]
    )


def _with_label(outcome: Outcome, slot: int, label: PathLabel) -> Outcome:
    return outcome[:slot] + (label,) + outcome[slot + 1 :]


def _require_source_stage(label: PathLabel, particle: int, operation: str) -> None:
    if label.kind in _DETECTOR_KINDS:
        raise StageOrderError(f"cannot {operation} particle {particle}: it is already detected")
    if label.kind in (LabelKind.ALIGNED_BEAM, LabelKind.LOSS):
        raise StageOrderError(f"cannot {operation} particle {particle}: it is already aligned")
    if label.index != particle:
        raise StructureError(
            f"slot {particle} carries label {label}, which belongs to particle {label.index}"
        )


def apply_path_identity(
    psi: PureState, particle: int, theta: float, transmission: float = 1.0
) -> PureState:
    """Make the paths of ``particle`` identical, optionally attenuating.

    The unprimed source beam picks up the propagation phase and splits into
    the aligned beam (amplitude ``transmission``) and the loss mode; the
    primed source beam feeds the aligned beam with amplitude unchanged.
    """
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {transmission}")
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    if not 1 <= particle <= psi.particle_count:
        raise ValueError(f"particle {particle} out of range 1..{psi.particle_count}")

    slot = particle - 1
    phase = cmath.exp(1j * theta)
    passed = float(transmission)
    lost = math.sqrt(max(0.0, 1.0 - passed * passed))
    terms: list[tuple[Outcome, complex]] = []
    for outcome, amp in psi.amplitudes.items():
        label = outcome[slot]
        _require_source_stage(label, particle, "align")
        if label.kind == LabelKind.SOURCE_BEAM:
            terms.append((_with_label(outcome, slot, aligned_beam(particle)), amp * phase * passed))
            terms.append((_with_label(outcome, slot, loss(particle)), amp * phase * lost))
        else:
            terms.append((_with_label(outcome, slot, aligned_beam(particle)), amp))
    return pure_state_from_terms(terms)


def apply_beam_splitter(psi: PureState, particle: int, phi: float) -> PureState:
    """Superpose the two source beams of ``particle`` on a 50-50 beam splitter.

    Unprimed input maps to ``(d + i d')/sqrt(2)``; primed input to
    ``e^{i phi} (d' + i d)/sqrt(2)``.
    """
    if not math.isfinite(phi):
        raise ValueError("phi must be finite")
    if not 1 <= particle <= psi.particle_count:
        raise ValueError(f"particle {particle} out of range 1..{psi.particle_count}")

    slot = particle - 1
    half = math.sqrt(0.5)
    phase = cmath.exp(1j * phi)
    straight = detector(particle)
    crossed = primed_detector(particle)
    terms: list[tuple[Outcome, complex]] = []
    for outcome, amp in psi.amplitudes.items():
        label = outcome[slot]
        _require_source_stage(label, particle, "apply a beam splitter to")
        if label.kind == LabelKind.SOURCE_BEAM:
            terms.append((_with_label(outcome, slot, straight), amp * half))
            terms.append((_with_label(outcome, slot, crossed), amp * half * 1j))
        else:
            terms.append((_with_label(outcome, slot, crossed), amp * phase * half))
            terms.append((_with_label(outcome, slot, straight), amp * phase * half * 1j))
    return pure_state_from_terms(terms)


def run_scheme(cfg: SchemeConfig) -> PureState:
    """Full evolution: source superposition, alignment stage, beam splitters.

    Returns the normalized joint state over detector, aligned-beam, and loss
    labels.  At least one particle must reach the beam splitters; with all
    particles aligned the two emission branches interfere and the literal
    substitution rule no longer conserves probability.
    """
    if cfg.n_detected == 0:
        raise ConfigError("run_scheme needs at least one detected particle (n_aligned < n_particles)")
    state = build_two_source_state(cfg)
    for l in cfg.aligned_range:
        state = apply_path_identity(state, l, cfg.theta_for(l), cfg.transmission_for(l))
    for j in cfg.detected_range:
        state = apply_beam_splitter(state, j, cfg.phi_for(j))
    return state


def detected_particles(psi: PureState) -> tuple[int, ...]:
    """Particles carrying detector labels in every term of ``psi``."""
    detected = []
    for particle in range(1, psi.particle_count + 1):
        kinds = {label.kind for label in psi.particle_labels(particle)}
        if kinds <= _DETECTOR_KINDS:
            detected.append(particle)
        elif kinds & _DETECTOR_KINDS:
            raise StructureError(
                f"particle {particle} mixes detector and non-detector labels"
            )
    return tuple(detected)


def _iter_port_matches(
    psi: PureState, outcome: DetectionOutcome
) -> Iterator[tuple[Outcome, complex]]:
    detected = detected_particles(psi)
    if not detected:
        raise ValueError("state has no detected particles")
    if len(outcome) != len(detected):
        raise ValueError(
            f"outcome has {len(outcome)} ports but the state has {len(detected)} detected particles"
        )
    wanted = {
        particle - 1: (LabelKind.DETECTOR_UNPRIMED if port == 0 else LabelKind.DETECTOR_PRIMED)
        for particle, port in zip(detected, outcome.ports)
    }
    for full_outcome, amp in psi.amplitudes.items():
        if all(full_outcome[slot].kind == kind for slot, kind in wanted.items()):
            yield full_outcome, amp


def joint_probability(psi: PureState, outcome: DetectionOutcome) -> float:
    """Probability of the coincidence ``outcome``, summed incoherently over the
    undetected aligned-beam and loss modes."""
    return sum(abs(amp) ** 2 for _, amp in _iter_port_matches(psi, outcome))


def loss_probability(psi: PureState) -> float:
    """Probability that at least one aligned particle was absorbed."""
    return sum(
        abs(amp) ** 2
        for outcome, amp in psi.amplitudes.items()
        if any(label.kind == LabelKind.LOSS for label in outcome)
    )


def detection_table(psi: PureState) -> tuple[dict[DetectionOutcome, float], float]:
    """Loss-free coincidence probability per outcome, plus the total loss probability.

    The per-outcome values count only events in which every aligned particle
    survived, so the table and the loss probability partition unity.
    """
    detected = detected_particles(psi)
    if not detected:
        raise ValueError("state has no detected particles")
    slots = [p - 1 for p in detected]
    table = {o: 0.0 for o in DetectionOutcome.all_outcomes(len(detected))}
    lost = 0.0
    for outcome, amp in psi.amplitudes.items():
        weight = abs(amp) ** 2
        if any(label.kind == LabelKind.LOSS for label in outcome):
            lost += weight
            continue
        ports = tuple(
            0 if outcome[slot].kind == LabelKind.DETECTOR_UNPRIMED else 1 for slot in slots
        )
        table[DetectionOutcome(ports)] += weight
    return table, lost


def conditional_detected_state(psi: PureState) -> DensityMatrix:
    """State of the detected particles after tracing out aligned and loss modes."""
    detected = detected_particles(psi)
    if not detected:
        raise ValueError("state has no detected particles to condition on")
    return partial_trace(to_density(psi), detected)
