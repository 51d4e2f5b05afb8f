"""Composite systems, observer splits, commutants, and entanglement checks.

A composite state space is the Cartesian product of its slots; component
observables are lifted to act on one coordinate and leave the others
alone, with bottom absorbing the whole tuple.  Correlations are
possibilistic: they are read off the certainty set of a preparing
proposition, with an outcome counted as possible at a state when its
spectral proposition does not annihilate that state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .algebra import (
    BOTTOM,
    AlgebraError,
    Observable,
    Proposition,
    Semigroup,
    StateSpace,
    closure,
    commutes,
    compose,
    state_str,
)


class PreparationError(AlgebraError):
    """A correlation was requested for an empty preparation."""


@dataclass(frozen=True)
class CompositeSystem:
    """An ordered product of component state spaces with lifting machinery."""

    components: tuple
    space: StateSpace

    @classmethod
    def build(cls, components: Sequence[StateSpace]) -> "CompositeSystem":
        comps = tuple(components)
        if not comps:
            raise AlgebraError("composite needs at least one component")
        labels = tuple(itertools.product(*(c.labels for c in comps)))
        return cls(comps, StateSpace(labels))

    @property
    def arity(self) -> int:
        return len(self.components)

    def lift(self, slot: int, obs: Observable) -> Observable:
        """Embed a component observable: acts on ``slot``, identity elsewhere."""
        comp = self.components[slot]
        if obs.space.labels != comp.labels:
            raise AlgebraError(
                f"observable {obs.name or '?'} does not live on slot {slot + 1}")
        images = []
        for z in self.space.labels:
            w = obs(z[slot])
            if w is BOTTOM:
                images.append(None)
            else:
                images.append(self.space.index(z[:slot] + (w,) + z[slot + 1:]))
        name = f"s{slot + 1}_{obs.name}" if obs.name else f"s{slot + 1}"
        family = None
        if obs.family is not None:
            family = tuple(
                (outcome, self.lift_proposition(slot, prop))
                for outcome, prop in obs.family)
        lifted = Observable(self.space, images, name, family=family)
        return lifted

    def lift_proposition(self, slot: int, prop: Proposition) -> Proposition:
        lifted = self.lift(slot, prop)
        name = f"s{slot + 1}_{prop.name}" if prop.name else f"s{slot + 1}"
        return lifted.as_proposition(name)

    def tuple_filter(self, tuples: Iterable[tuple], name: str = "") -> Proposition:
        """The proposition fixing exactly the given tuple states."""
        for t in tuples:
            self.space.index(t)
        return Proposition.filter(self.space, tuples, name=name)


def product(*systems: StateSpace) -> CompositeSystem:
    """Cartesian product of component state spaces (two or more slots)."""
    return CompositeSystem.build(systems)


def certainty_set(p: Proposition) -> tuple:
    """States where the proposition already holds: its fixed points."""
    return p.certainty_set


def commutant(subset: Iterable[Observable], semigroup: Semigroup) -> tuple:
    """Elements of the semigroup commuting with every member of ``subset``."""
    members = list(subset)
    for m in members:
        if m not in semigroup.names:
            raise AlgebraError(
                f"{m.name or 'element'} is not in the ambient semigroup")
    return tuple(b for b in semigroup.elements
                 if all(commutes(b, m) for m in members))


@dataclass(frozen=True)
class SplitReport:
    """What an observer's choice of generators carves out of a semigroup."""

    subsemigroup: Semigroup
    ambient_size: int
    exterior: tuple
    complementary_pairs: tuple   # (inside, outside) with inside*outside != outside*inside
    overlap: tuple               # inside elements noncommuting with some exterior element

    @property
    def size(self) -> int:
        return len(self.subsemigroup)


def epistemic_split(semigroup: Semigroup, generators: Sequence[Observable]) -> SplitReport:
    """Close the chosen generators and scan the exterior for complementarity.

    The overlap lists subsemigroup elements that fail to commute with some
    exterior element; a non-empty overlap shows the chosen observables are
    not confined to the commutant of what was left out.
    """
    for g in generators:
        if g not in semigroup.names:
            raise AlgebraError(
                f"generator {g.name or '?'} is not in the ambient semigroup")
    if generators:
        sub = closure(generators)
    else:
        sub = closure([Proposition.filter(semigroup.space, semigroup.space.labels, name="1")])
    inside = set(sub.elements)
    exterior = tuple(b for b in semigroup.elements if b not in inside)
    pairs = []
    overlap = []
    for a in sub.elements:
        hit = False
        for b in exterior:
            if not commutes(a, b):
                pairs.append((a, b))
                hit = True
        if hit:
            overlap.append(a)
    return SplitReport(sub, len(semigroup), exterior, tuple(pairs), tuple(overlap))


def possible_outcomes(obs: Observable, z) -> tuple:
    """Outcomes whose spectral proposition does not annihilate ``z``."""
    if obs.family is None:
        raise AlgebraError(f"{obs.name or 'observable'} has no spectral family")
    if z is BOTTOM:
        return ()
    return tuple(outcome for outcome, prop in obs.family if prop(z) is not BOTTOM)


@dataclass(frozen=True)
class CorrelationTable:
    """Joint and marginal possible outcomes over a preparation's certainty set.

    The score 1 - |joint| / (|marginal1| * |marginal2|) is an artifact
    convention for "how far from the full product" the joint set is; it is
    not a probability.
    """

    preparation: str
    states: tuple
    joint: tuple
    marginal1: tuple
    marginal2: tuple
    score: float
    functional_12: bool
    functional_21: bool

    @property
    def perfect_dependence(self) -> bool:
        return self.functional_12 and self.functional_21


def possibilistic_correlation(prep: Proposition, local1: Observable,
                              local2: Observable) -> CorrelationTable:
    """Tabulate joint possible outcomes of two observables on a preparation."""
    states = certainty_set(prep)
    if not states:
        raise PreparationError(
            f"preparation {prep.name or '?'} has an empty certainty set")
    joint = []
    found1: set = set()
    found2: set = set()
    for z in states:
        out1 = possible_outcomes(local1, z)
        out2 = possible_outcomes(local2, z)
        found1.update(out1)
        found2.update(out2)
        for a in out1:
            for b in out2:
                if (a, b) not in joint:
                    joint.append((a, b))
    m1 = [o for o in local1.spectrum if o in found1]
    m2 = [o for o in local2.spectrum if o in found2]
    joint.sort(key=lambda ab: (m1.index(ab[0]), m2.index(ab[1])))
    denom = len(m1) * len(m2)
    score = 1.0 - len(joint) / denom if denom else 0.0
    score = min(1.0, max(0.0, score))
    func12 = all(sum(1 for (a, b) in joint if a == a0) == 1 for a0 in m1)
    func21 = all(sum(1 for (a, b) in joint if b == b0) == 1 for b0 in m2)
    return CorrelationTable(prep.name or "prep", states, tuple(joint),
                            tuple(m1), tuple(m2), score, func12, func21)


@dataclass(frozen=True)
class NoSignalingResult:
    """Outcome of the remote-invariance check, with a witness on failure."""

    ok: bool
    witness_state: Optional[str] = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def check_no_signaling(prep: Proposition, local1: Observable,
                       local2: Observable) -> NoSignalingResult:
    """Applying any outcome of ``local2`` must leave the possible outcomes
    of ``local1`` unchanged on every prepared state."""
    states = certainty_set(prep)
    if not states:
        raise PreparationError(
            f"preparation {prep.name or '?'} has an empty certainty set")
    for z in states:
        base = set(possible_outcomes(local1, z))
        seen = set()
        for outcome, prop in local2.family:
            w = prop(z)
            if w is BOTTOM:
                continue
            seen.update(possible_outcomes(local1, w))
        if seen != base:
            return NoSignalingResult(
                False, state_str(z),
                f"outcomes {sorted(map(str, base))} became {sorted(map(str, seen))}")
    return NoSignalingResult(True)
