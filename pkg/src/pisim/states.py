"""Sparse algebra of multi-particle path states.

Particles are distinguishable, labelled subsystems carrying a single path
degree of freedom.  A pure state is a sparse complex superposition over
product assignments of :class:`PathLabel` values; density matrices are dense
arrays over the product basis actually spanned by their source states.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import IntEnum
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyStateError, NormalizationError, StructureError, ValidationError

#: Amplitudes at or below this magnitude are treated as exact cancellations.
AMPLITUDE_EPSILON = 1e-14
#: Tolerance on |<psi|psi> - 1| wherever a normalized state is required.
NORM_TOLERANCE = 1e-12
HERMITICITY_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
#: Eigenvalues of a density matrix may dip this far below zero numerically.
EIGENVALUE_FLOOR = -1e-10
#: Refuse to materialize density matrices beyond this dimension.
MAX_DENSITY_DIM = 4096


class LabelKind(IntEnum):
    """Kinds of single-particle modes.

    The enum order fixes the canonical basis ordering: unprimed before primed,
    detector ports before the undetected aligned/loss modes they follow.
    """

    SOURCE_BEAM = 0
    PRIMED_SOURCE_BEAM = 1
    DETECTOR_UNPRIMED = 2
    DETECTOR_PRIMED = 3
    ALIGNED_BEAM = 4
    LOSS = 5


_KIND_GLYPHS = {
    LabelKind.SOURCE_BEAM: "b{0}",
    LabelKind.PRIMED_SOURCE_BEAM: "b{0}'",
    LabelKind.DETECTOR_UNPRIMED: "d{0}",
    LabelKind.DETECTOR_PRIMED: "d{0}'",
    LabelKind.ALIGNED_BEAM: "a{0}",
    LabelKind.LOSS: "v{0}",
}


@dataclass(frozen=True, order=True)
class PathLabel:
    """A single-particle mode: source beam, detector port, aligned beam, or loss mode."""

    kind: LabelKind
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"label index must be a positive integer, got {self.index!r}")

    def __str__(self) -> str:
        return _KIND_GLYPHS[self.kind].format(self.index)

    def __repr__(self) -> str:
        return f"PathLabel({self})"


def source_beam(j: int) -> PathLabel:
    """Beam of particle ``j`` emitted by the first source."""
    return PathLabel(LabelKind.SOURCE_BEAM, j)


def primed_source_beam(j: int) -> PathLabel:
    """Beam of particle ``j`` emitted by the second source."""
    return PathLabel(LabelKind.PRIMED_SOURCE_BEAM, j)


def detector(j: int) -> PathLabel:
    """Unprimed output port of beam splitter ``j``."""
    return PathLabel(LabelKind.DETECTOR_UNPRIMED, j)


def primed_detector(j: int) -> PathLabel:
    """Primed output port of beam splitter ``j``."""
    return PathLabel(LabelKind.DETECTOR_PRIMED, j)


def aligned_beam(j: int) -> PathLabel:
    """Beam of particle ``j`` downstream of the alignment region.

    Both emission branches feed this mode once the paths of particle ``j``
    have been made identical, so carrying a dedicated kind keeps the stage
    history readable off the state itself.
    """
    return PathLabel(LabelKind.ALIGNED_BEAM, j)


def loss(j: int) -> PathLabel:
    """Mode of particle ``j`` absorbed by the attenuator; orthogonal to all beams."""
    return PathLabel(LabelKind.LOSS, j)


#: One basis ket of the joint space: one label per particle, slots 1..N.
Outcome = tuple[PathLabel, ...]


def detector_outcome(ports: Sequence[int], particles: Sequence[int] | None = None) -> Outcome:
    """Product outcome of detector labels for 0/1 ``ports`` (0 -> d_k, 1 -> d_k')."""
    if particles is None:
        particles = range(1, len(ports) + 1)
    labels = []
    for port, particle in zip(ports, particles):
        if port not in (0, 1):
            raise ValueError(f"port must be 0 or 1, got {port!r}")
        labels.append(detector(particle) if port == 0 else primed_detector(particle))
    return tuple(labels)


def format_outcome(outcome: Outcome) -> str:
    return "|" + " ".join(str(label) for label in outcome) + ">"


@dataclass(frozen=True)
class PureState:
    """Sparse superposition over product path labels, one label per particle.

    Immutable after construction; every stored amplitude has magnitude above
    :data:`AMPLITUDE_EPSILON`.  Build instances with
    :func:`pure_state_from_terms`.
    """

    particle_count: int
    amplitudes: Mapping[Outcome, complex]

    def __post_init__(self) -> None:
        if self.particle_count < 1:
            raise StructureError("a state needs at least one particle")
        if not self.amplitudes:
            raise EmptyStateError("state has no terms")
        for outcome, amp in self.amplitudes.items():
            if len(outcome) != self.particle_count:
                raise StructureError(
                    f"outcome {format_outcome(outcome)} has {len(outcome)} labels, "
                    f"expected {self.particle_count}"
                )
            if abs(amp) <= AMPLITUDE_EPSILON:
                raise ValueError(f"amplitude {amp!r} is below the pruning threshold")
        object.__setattr__(self, "amplitudes", MappingProxyType(dict(self.amplitudes)))

    def amplitude(self, outcome: Outcome) -> complex:
        """Amplitude of ``outcome``; zero when the outcome is absent."""
        return self.amplitudes.get(tuple(outcome), 0j)

    def terms(self) -> list[tuple[Outcome, complex]]:
        """Terms in canonical (label-sorted) order."""
        return sorted(self.amplitudes.items(), key=lambda item: item[0])

    @property
    def term_count(self) -> int:
        return len(self.amplitudes)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm() - 1.0) <= NORM_TOLERANCE

    def normalized(self) -> PureState:
        """Unit-norm copy of this state."""
        scale = 1.0 / self.norm()
        return PureState(self.particle_count, {o: a * scale for o, a in self.amplitudes.items()})

    def particle_labels(self, particle: int) -> tuple[PathLabel, ...]:
        """Sorted distinct labels carried by 1-based ``particle`` across all terms."""
        if not 1 <= particle <= self.particle_count:
            raise ValueError(f"particle {particle} out of range 1..{self.particle_count}")
        slot = particle - 1
        return tuple(sorted({outcome[slot] for outcome in self.amplitudes}))

    def __repr__(self) -> str:
        body = " + ".join(f"({a:.4g}){format_outcome(o)}" for o, a in self.terms()[:4])
        tail = " + ..." if self.term_count > 4 else ""
        return f"PureState({body}{tail})"


def pure_state_from_terms(terms: Iterable[tuple[Outcome, complex]]) -> PureState:
    """Superpose ``(outcome, amplitude)`` pairs, summing duplicates and pruning
    amplitudes that cancel below :data:`AMPLITUDE_EPSILON`."""
    accumulated: dict[Outcome, complex] = {}
    length: int | None = None
    for outcome, amp in terms:
        outcome = tuple(outcome)
        if length is None:
            length = len(outcome)
        elif len(outcome) != length:
            raise StructureError(
                f"outcome {format_outcome(outcome)} has {len(outcome)} labels, expected {length}"
            )
        value = complex(amp)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError(f"amplitude for {format_outcome(outcome)} is not finite")
        accumulated[outcome] = accumulated.get(outcome, 0j) + value
    if length is None:
        raise EmptyStateError("no terms provided")
    pruned = {o: a for o, a in accumulated.items() if abs(a) > AMPLITUDE_EPSILON}
    if not pruned:
        raise EmptyStateError("all amplitudes cancelled")
    return PureState(length, pruned)


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b> in the orthonormal outcome basis; conjugate-linear in ``a``."""
    if a.particle_count != b.particle_count:
        raise StructureError(
            f"particle counts differ: {a.particle_count} vs {b.particle_count}"
        )
    if a.term_count > b.term_count:
        return inner_product(b, a).conjugate()
    return sum(amp.conjugate() * b.amplitude(outcome) for outcome, amp in a.amplitudes.items())


def state_fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 - global-phase-insensitive overlap of two normalized states."""
    return abs(inner_product(a, b)) ** 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace operator on a subset of particles.

    ``basis`` lists the outcomes (restricted to ``kept_particles``) indexing
    the rows and columns, in canonical sorted order.
    """

    kept_particles: tuple[int, ...]
    basis: tuple[Outcome, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        kept = tuple(self.kept_particles)
        if not kept or any(kept[i] >= kept[i + 1] for i in range(len(kept) - 1)):
            raise ValidationError("kept_particles must be a nonempty ascending tuple")
        basis = tuple(tuple(o) for o in self.basis)
        if any(len(o) != len(kept) for o in basis):
            raise ValidationError("every basis outcome must cover exactly the kept particles")
        if list(basis) != sorted(set(basis)):
            raise ValidationError("basis must be sorted and free of duplicates")
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (len(basis), len(basis)):
            raise ValidationError(
                f"matrix shape {matrix.shape} does not match basis size {len(basis)}"
            )
        deviation = np.abs(matrix - matrix.conj().T).max()
        if deviation > HERMITICITY_TOLERANCE:
            raise ValidationError(f"matrix is not Hermitian (max deviation {deviation:.3e})")
        trace = matrix.trace()
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise ValidationError(f"trace is {trace:.15g}, expected 1")
        smallest = np.linalg.eigvalsh(matrix).min()
        if smallest < EIGENVALUE_FLOOR:
            raise ValidationError(f"matrix has negative eigenvalue {smallest:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "kept_particles", kept)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_index", {o: i for i, o in enumerate(basis)})

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index_of(self, outcome: Outcome) -> int:
        try:
            return self._index[tuple(outcome)]  # type: ignore[attr-defined]
        except KeyError:
            raise ValueError(f"outcome {format_outcome(outcome)} is not in the basis") from None

    def __repr__(self) -> str:
        return f"DensityMatrix(particles={self.kept_particles}, dim={self.dim})"


def _product_basis(label_sets: Sequence[Sequence[PathLabel]]) -> tuple[Outcome, ...]:
    size = math.prod(len(s) for s in label_sets)
    if size > MAX_DENSITY_DIM:
        raise ValueError(f"density matrix basis would have {size} states (cap {MAX_DENSITY_DIM})")
    return tuple(itertools.product(*label_sets))


def to_density(psi: PureState) -> DensityMatrix:
    """Projector |psi><psi| over all particles of a normalized state."""
    if not psi.is_normalized:
        raise NormalizationError(f"state norm is {psi.norm():.15g}, expected 1")
    label_sets = [psi.particle_labels(p) for p in range(1, psi.particle_count + 1)]
    basis = _product_basis(label_sets)
    vector = np.array([psi.amplitude(o) for o in basis], dtype=complex)
    return DensityMatrix(
        tuple(range(1, psi.particle_count + 1)), basis, np.outer(vector, vector.conj())
    )


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the ``keep`` subset of ``rho.kept_particles``."""
    keep = tuple(sorted(set(keep)))
    if not keep:
        raise ValueError("keep must name at least one particle")
    missing = [p for p in keep if p not in rho.kept_particles]
    if missing:
        raise ValueError(f"particles {missing} are not part of this density matrix")
    if keep == rho.kept_particles:
        return rho

    positions = [rho.kept_particles.index(p) for p in keep]
    traced_positions = [i for i in range(len(rho.kept_particles)) if i not in positions]
    kept_parts = [tuple(o[i] for i in positions) for o in rho.basis]
    traced_parts = [tuple(o[i] for i in traced_positions) for o in rho.basis]

    new_basis = tuple(sorted(set(kept_parts)))
    new_index = {o: i for i, o in enumerate(new_basis)}
    reduced = np.zeros((len(new_basis), len(new_basis)), dtype=complex)

    groups: dict[tuple[PathLabel, ...], list[int]] = {}
    for row, traced in enumerate(traced_parts):
        groups.setdefault(traced, []).append(row)
    for rows in groups.values():
        for i in rows:
            for j in rows:
                reduced[new_index[kept_parts[i]], new_index[kept_parts[j]]] += rho.matrix[i, j]
    return DensityMatrix(keep, new_basis, reduced)


def density_from_mixture(components: Iterable[tuple[float, PureState]]) -> DensityMatrix:
    """Convex mixture ``sum_k w_k |psi_k><psi_k|`` of normalized pure states."""
    components = list(components)
    if not components:
        raise ValueError("mixture needs at least one component")
    weights = [float(w) for w, _ in components]
    if any(w < -AMPLITUDE_EPSILON for w in weights):
        raise ValueError("mixture weights must be nonnegative")
    if abs(sum(weights) - 1.0) > TRACE_TOLERANCE:
        raise ValueError(f"mixture weights sum to {sum(weights):.15g}, expected 1")
    count = components[0][1].particle_count
    label_sets: list[set[PathLabel]] = [set() for _ in range(count)]
    for _, psi in components:
        if psi.particle_count != count:
            raise StructureError("mixture components must share a particle count")
        if not psi.is_normalized:
            raise NormalizationError("mixture components must be normalized")
        for p in range(1, count + 1):
            label_sets[p - 1].update(psi.particle_labels(p))
    basis = _product_basis([sorted(s) for s in label_sets])
    matrix = np.zeros((len(basis), len(basis)), dtype=complex)
    for weight, psi in components:
        vector = np.array([psi.amplitude(o) for o in basis], dtype=complex)
        matrix += weight * np.outer(vector, vector.conj())
    return DensityMatrix(tuple(range(1, count + 1)), basis, matrix)
