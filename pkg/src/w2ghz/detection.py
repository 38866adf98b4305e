"""Non-number-resolving photon detection with finite efficiency.

Each output mode feeds a pair of detectors, one per linear polarization.  A
detector with efficiency eta_d misses each photon independently, so the
no-click element on a slot holding k photons weighs (1 - eta_d)^k and the
click element weighs the complement.  Dark counts are neglected.

A run is accepted when every output mode fires exactly one of its two
detectors; the parity of fired V detectors then decides which of the two
maximally entangled three-atom states the atoms collapse to.  Everything
else (double clicks, silent modes) is rejected.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .atom_cavity import EFFECTIVE_LEVELS, EMITTED_LEVELS, GROUND_LEVELS
from .hilbert import DensityMatrix, HilbertSpace, Operator, StateVector, fidelity
from .photonics import OUTPUT_MODES, JointAtomPhotonState

DETECTORS = ("D7H", "D7V", "D8H", "D8V", "D9H", "D9V")
_DETECTOR_SLOT = {name: (int(name[1]), name[2]) for name in DETECTORS}
_SLOT_DETECTOR = {slot: name for name, slot in _DETECTOR_SLOT.items()}


class OutcomeClass(Enum):
    GHZ_PLUS = "GHZ_PLUS"
    GHZ_MINUS = "GHZ_MINUS"
    REJECT = "REJECT"


@dataclass(frozen=True)
class ClickPattern:
    """A subset of the six detectors that fired."""

    fired: frozenset[str]

    def __post_init__(self):
        unknown = set(self.fired) - set(DETECTORS)
        if unknown:
            raise ValueError(f"unknown detector name(s) {sorted(unknown)}; valid: {DETECTORS}")
        object.__setattr__(self, "fired", frozenset(self.fired))

    @classmethod
    def of(cls, *names: str) -> "ClickPattern":
        return cls(frozenset(names))

    @property
    def sorted_names(self) -> tuple[str, ...]:
        return tuple(sorted(self.fired))

    @property
    def v_count(self) -> int:
        return sum(1 for name in self.fired if name.endswith("V"))

    def __str__(self) -> str:
        return "{" + ",".join(self.sorted_names) + "}"


def all_patterns() -> list[ClickPattern]:
    """The complete exclusive outcome algebra: all 2^6 click subsets."""
    out = []
    for n in range(len(DETECTORS) + 1):
        for combo in itertools.combinations(DETECTORS, n):
            out.append(ClickPattern.of(*combo))
    return out


def classify_pattern(pattern: ClickPattern) -> OutcomeClass:
    """Accepted patterns fire exactly one detector per output mode; an odd
    number of fired V detectors signals the (+) entangled class, an even
    number the (-) class.  Everything else is rejected."""
    for mode in OUTPUT_MODES:
        fired_here = [name for name in pattern.fired if _DETECTOR_SLOT[name][0] == mode]
        if len(fired_here) != 1:
            return OutcomeClass.REJECT
    return OutcomeClass.GHZ_PLUS if pattern.v_count % 2 == 1 else OutcomeClass.GHZ_MINUS


def accepted_patterns() -> list[ClickPattern]:
    return [p for p in all_patterns() if classify_pattern(p) is not OutcomeClass.REJECT]


def povm_elements(eta_d: float, n_max: int = 2) -> tuple[Operator, Operator]:
    """(no-click, click) POVM pair of one detector slot, truncated at n_max
    photons: Pi_off = sum_k (1-eta_d)^k |k><k| and Pi_click = 1 - Pi_off."""
    if not 0.0 <= eta_d <= 1.0:
        raise ValueError(f"eta_d must lie in [0, 1], got {eta_d}")
    space = HilbertSpace.of(("photons", n_max + 1))
    off = np.diag([(1.0 - eta_d) ** k for k in range(n_max + 1)]).astype(np.complex128)
    click = np.eye(n_max + 1, dtype=np.complex128) - off
    return Operator(space, off, hermitian=True), Operator(space, click, hermitian=True)


def _pattern_weight(occupation, pattern: ClickPattern, eta_d: float) -> float:
    """Probability weight of a click pattern given definite slot occupations."""
    counts = {slot: count for slot, count in occupation}
    weight = 1.0
    for name in DETECTORS:
        k = counts.get(_DETECTOR_SLOT[name], 0)
        p_off = (1.0 - eta_d) ** k if k else 1.0
        weight *= (1.0 - p_off) if name in pattern.fired else p_off
        if weight == 0.0:
            return 0.0
    return weight


def _infer_atom_basis(configs) -> tuple[str, ...]:
    levels = {level for config in configs for level in config}
    if levels <= set(EMITTED_LEVELS):
        return EMITTED_LEVELS
    if levels <= set(GROUND_LEVELS):
        return GROUND_LEVELS
    return EFFECTIVE_LEVELS


def atomic_space(atoms, basis=EMITTED_LEVELS) -> HilbertSpace:
    return HilbertSpace.of(*((atom, len(basis)) for atom in atoms))


def measure(state: JointAtomPhotonState, pattern: ClickPattern, eta_d: float,
            atom_basis: tuple[str, ...] | None = None):
    """Probability of a click pattern and the conditional atomic state.

    The POVM elements are diagonal in the occupation basis, so the pattern
    probability is the occupation-weighted squared amplitude and the
    conditional state coherently combines atomic configurations that share an
    occupation.  A zero-probability pattern returns (0.0, None) rather than
    failing on normalization.
    """
    if not 0.0 <= eta_d <= 1.0:
        raise ValueError(f"eta_d must lie in [0, 1], got {eta_d}")
    by_occupation: dict = {}
    for (config, occ), amp in state.terms.items():
        by_occupation.setdefault(occ, []).append((config, amp))

    probability = 0.0
    weighted: dict = {}
    for occ, members in by_occupation.items():
        w = _pattern_weight(occ, pattern, eta_d)
        if w == 0.0:
            continue
        for config, amp in members:
            probability += w * abs(amp) ** 2
        for (c1, a1), (c2, a2) in itertools.product(members, members):
            weighted[(c1, c2)] = weighted.get((c1, c2), 0.0) + w * a1 * np.conj(a2)

    if probability <= 0.0:
        return 0.0, None

    configs = {c for pair in weighted for c in pair}
    basis = atom_basis if atom_basis is not None else _infer_atom_basis(configs)
    space = atomic_space(state.atoms, basis)
    rho = np.zeros((space.total_dim, space.total_dim), dtype=np.complex128)
    for (c1, c2), value in weighted.items():
        i = space.basis_index(*(basis.index(level) for level in c1))
        j = space.basis_index(*(basis.index(level) for level in c2))
        rho[i, j] += value
    return probability, DensityMatrix(space, rho / probability, normalized=True)


def success_probability_ideal(eta_d: float) -> float:
    """Total accepted-pattern probability of the lossless protocol:
    3 * eta_d^3 / 4."""
    if not 0.0 <= eta_d <= 1.0:
        raise ValueError(f"eta_d must lie in [0, 1], got {eta_d}")
    return 3.0 * eta_d**3 / 4.0


@dataclass(frozen=True)
class DetectionReport:
    """Full outcome distribution over the 2^6 click patterns.

    ``pattern_probabilities`` sums to the squared norm of the measured state
    (1 for a normalized input).  Conditional states are stored for accepted
    patterns with non-zero probability.
    """

    pattern_probabilities: dict
    conditional_states: dict
    total_success_probability: float

    def probability(self, pattern: ClickPattern) -> float:
        return self.pattern_probabilities.get(pattern, 0.0)

    def to_json_dict(self) -> dict:
        out = {}
        for pattern in sorted(self.pattern_probabilities, key=lambda p: p.sorted_names):
            cls = classify_pattern(pattern)
            entry = {
                "probability": self.pattern_probabilities[pattern],
                "class": cls.value,
            }
            state = self.conditional_states.get(pattern)
            if state is not None:
                target = ghz_pair_states(state.space)[0 if cls is OutcomeClass.GHZ_PLUS else 1]
                entry["fidelity"] = fidelity(state, target)
            out["+".join(pattern.sorted_names) if pattern.fired else "none"] = entry
        return out


def enumerate_outcomes(state: JointAtomPhotonState, eta_d: float) -> DetectionReport:
    """Evaluate every click pattern of the exclusive outcome algebra."""
    probabilities: dict = {}
    conditionals: dict = {}
    success = 0.0
    for pattern in all_patterns():
        p, rho = measure(state, pattern, eta_d)
        probabilities[pattern] = p
        if classify_pattern(pattern) is not OutcomeClass.REJECT:
            success += p
            if rho is not None:
                conditionals[pattern] = rho
    return DetectionReport(probabilities, conditionals, success)


def ghz_pair_states(space: HilbertSpace) -> tuple[StateVector, StateVector]:
    """The two maximally entangled all-atoms-alike states over the emitted
    basis: (|eL eL eL> + |eR eR eR>)/sqrt2 and (-|eL eL eL> + |eR eR eR>)/sqrt2."""
    if any(dim != 2 for dim in space.dims):
        raise ValueError(f"expected two-level atoms, got dims {space.dims}")
    n = len(space.dims)
    plus = np.zeros(space.total_dim, dtype=np.complex128)
    minus = np.zeros(space.total_dim, dtype=np.complex128)
    lo = space.basis_index(*([0] * n))
    hi = space.basis_index(*([1] * n))
    plus[lo] = plus[hi] = 1.0 / math.sqrt(2.0)
    minus[lo] = -1.0 / math.sqrt(2.0)
    minus[hi] = 1.0 / math.sqrt(2.0)
    return StateVector(space, plus), StateVector(space, minus)
