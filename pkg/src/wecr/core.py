"""Entropy, grade and recyclability of a single electronic component.

A component is described by the mass fractions of the materials it is made
of. From that composition we derive

* the Shannon entropy ``H`` of the fractions, in bits,
* the material grade ``D``, a weighted sum of the recoverable fractions in
  which chemically combined materials are discounted by their valence rank,
* the recyclability ``R = 100 * D / (N * H)`` where ``N`` is the number of
  valences counted for the component,

and finally a recycling zone from ``R``. Everything here is a pure function;
nothing touches the filesystem.

The valence total ``N`` is stored per component. Where it comes from
(per material, per component, or a global constant) is left to whoever
curates the composition data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from wecr.errors import (
    AllZeroError,
    CompositionError,
    NegativeFractionError,
    NotNormalizedError,
    RankExceedsValencesError,
    ZeroEntropyError,
)

NORMALIZATION_TOL = 1e-9
AMPLIFICATION = 100.0

# Lower bounds of the recycling zones, in R units (/bit).
RECOVERY_THRESHOLD = 18.0
MODERATE_THRESHOLD = 30.0
EASY_THRESHOLD = 50.0


class Bonding(str, Enum):
    PHYSICAL = "physical"
    CHEMICAL = "chemical"


class Zone(str, Enum):
    BELOW_RECOVERY = "BelowRecovery"
    DIFFICULT = "Difficult"
    MODERATE = "Moderate"
    EASY = "Easy"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MaterialEntry:
    name: str
    fraction: float
    valence_rank: int = 1
    bonding: Bonding = Bonding.PHYSICAL
    recoverable: bool = True


@dataclass(frozen=True)
class ComponentSpec:
    """Full material composition of one component.

    ``valence_total`` is the ``N`` used both in the chemical-grade discount
    and in the recyclability denominator.
    """

    component_id: str
    materials: tuple[MaterialEntry, ...]
    valence_total: int

    def __post_init__(self):
        object.__setattr__(self, "materials", tuple(self.materials))

    @property
    def fractions(self) -> list[float]:
        return [m.fraction for m in self.materials]

    @property
    def n_materials(self) -> int:
        return len(self.materials)

    @property
    def n_recoverable(self) -> int:
        return sum(1 for m in self.materials if m.recoverable)

    def check(self) -> None:
        """Raise on the first broken structural invariant.

        The fraction sum is checked separately by :func:`check_normalized`.
        """
        if not self.materials:
            raise CompositionError(f"{self.component_id}: composition has no materials")
        if isinstance(self.valence_total, bool) or not isinstance(self.valence_total, int) \
                or self.valence_total < 1:
            raise CompositionError(
                f"{self.component_id}: valence_total must be a positive integer")
        seen = set()
        for m in self.materials:
            if not m.name:
                raise CompositionError(f"{self.component_id}: material with empty name")
            if m.name in seen:
                raise CompositionError(f"{self.component_id}: duplicate material {m.name!r}")
            seen.add(m.name)
            if not math.isfinite(m.fraction) or m.fraction < 0:
                raise NegativeFractionError(
                    f"{self.component_id}: fraction of {m.name!r} is {m.fraction}")
            if m.fraction > 1:
                raise CompositionError(
                    f"{self.component_id}: fraction of {m.name!r} exceeds 1")
            if m.valence_rank < 1:
                raise CompositionError(
                    f"{self.component_id}: valence_rank of {m.name!r} must be >= 1")
            if m.valence_rank > self.valence_total:
                raise RankExceedsValencesError(
                    f"{self.component_id}: valence_rank {m.valence_rank} of {m.name!r} "
                    f"exceeds valence_total {self.valence_total}")
        if self.n_recoverable < 1:
            raise CompositionError(f"{self.component_id}: no recoverable material")


@dataclass(frozen=True)
class RecyclabilityResult:
    entropy_bits: float
    grade: float
    recyclability: float
    zone: Zone


def normalize(raw_fractions: Iterable[float]) -> list[float]:
    """Scale nonnegative amounts (percentages, grams, ...) to fractions summing to 1."""
    values = [float(v) for v in raw_fractions]
    if not values:
        raise AllZeroError("no fractions given")
    for v in values:
        if v < 0 or math.isnan(v):
            raise NegativeFractionError(f"negative fraction {v}")
    total = math.fsum(values)
    if total == 0:
        raise AllZeroError("every fraction is zero")
    return [v / total for v in values]


def check_normalized(fractions: Sequence[float]) -> None:
    """Raise unless ``fractions`` are nonnegative and sum to 1 within tolerance."""
    for p in fractions:
        if p < 0 or math.isnan(p):
            raise NegativeFractionError(f"negative fraction {p}")
    total = math.fsum(fractions)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NotNormalizedError(f"fractions sum to {total!r}, not 1")


def entropy_bits(fractions: Sequence[float]) -> float:
    """Shannon entropy in bits, with 0*log2(0) taken as 0.

    The fractions are used exactly as given once they pass the tolerance
    check; renormalizing here would perturb near-pure compositions, whose
    entropy is tiny, by far more than their rounding error. ``math.fsum``
    rounds the exact sum once, so the result does not depend on the order
    of the fractions.
    """
    check_normalized(fractions)
    h = -math.fsum(p * math.log2(p) for p in fractions if p > 0)
    return h + 0.0  # drop the sign of -0.0


def compute_entropy(spec: ComponentSpec) -> float:
    return entropy_bits(spec.fractions)


def compute_grade(spec: ComponentSpec) -> float:
    """Material grade D of the recoverable materials.

    Physically mixed materials count with their full fraction. Chemically
    combined ones are discounted by ``1 - (j - 1) / N`` where ``j`` is the
    valence rank; rank 1 therefore carries no discount.
    """
    n_val = spec.valence_total
    terms = []
    for m in spec.materials:
        if m.valence_rank > n_val:
            raise RankExceedsValencesError(
                f"valence_rank {m.valence_rank} of {m.name!r} exceeds valence_total {n_val}")
        if not m.recoverable:
            continue
        if m.bonding is Bonding.CHEMICAL:
            terms.append((1.0 - (m.valence_rank - 1) / n_val) * m.fraction)
        else:
            terms.append(m.fraction)
    return math.fsum(terms)


def compute_recyclability(grade: float, entropy: float, valence_total: int) -> float:
    if entropy == 0:
        raise ZeroEntropyError("recyclability is undefined at zero entropy")
    if entropy < 0:
        raise ValueError(f"entropy must be positive, got {entropy}")
    if valence_total < 1:
        raise ValueError(f"valence_total must be >= 1, got {valence_total}")
    if grade < 0:
        raise ValueError(f"grade must be nonnegative, got {grade}")
    return AMPLIFICATION * grade / (valence_total * entropy)


def classify_zone(recyclability: float) -> Zone:
    # half-open bands, lower bound inclusive
    if recyclability < RECOVERY_THRESHOLD:
        return Zone.BELOW_RECOVERY
    if recyclability < MODERATE_THRESHOLD:
        return Zone.DIFFICULT
    if recyclability < EASY_THRESHOLD:
        return Zone.MODERATE
    return Zone.EASY


def assess_component(spec: ComponentSpec) -> RecyclabilityResult:
    spec.check()
    check_normalized(spec.fractions)
    ps = normalize(spec.fractions)
    spec = replace(spec, materials=tuple(
        replace(m, fraction=p) for m, p in zip(spec.materials, ps)))
    h = compute_entropy(spec)
    d = compute_grade(spec)
    r = compute_recyclability(d, h, spec.valence_total)
    return RecyclabilityResult(entropy_bits=h, grade=d, recyclability=r, zone=classify_zone(r))
