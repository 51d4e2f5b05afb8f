"""Finite state spaces and their observable semigroups.

Observables are total maps on the states plus an adjoined absurd element
``BOTTOM``; composing maps gives the semigroup product.  Propositions are
the idempotent observables, with yes/no semantics read off their fixed
points.  Observables may carry a spectral family: one proposition per
outcome, subject to three laws (mutual annihilation, compatibility with
the observable's own map, and completeness).  No probabilities appear
anywhere in this module; all semantics are possibilistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union


class AlgebraError(Exception):
    """Raised when a construction violates a structural requirement."""


class IncompatibleError(AlgebraError):
    """Meet/join requested for noncommuting propositions."""


class _Bottom:
    """The absurd state: the result of a proposition that fails."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "bot"


BOTTOM = _Bottom()

#: A state label: a plain name, or a tuple of names in a composite space.
State = Union[str, tuple]


def state_str(z) -> str:
    """Render a state for reports: atoms bare, tuples as (a|b), bottom as 'bot'."""
    if z is BOTTOM:
        return "bot"
    if isinstance(z, tuple):
        return "(" + "|".join(state_str(c) for c in z) + ")"
    return str(z)


@dataclass(frozen=True)
class StateSpace:
    """An ordered finite set of distinct state labels (bottom adjoined implicitly)."""

    labels: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise AlgebraError("state space must be non-empty")
        if len(set(labels)) != len(labels):
            raise AlgebraError("state labels must be distinct")
        if any(z is BOTTOM for z in labels):
            raise AlgebraError("bottom is not a state label")
        object.__setattr__(self, "_index", {z: i for i, z in enumerate(labels)})

    def __len__(self):
        return len(self.labels)

    def __contains__(self, z):
        return z in self._index

    def index(self, z) -> int:
        try:
            return self._index[z]
        except KeyError:
            raise AlgebraError(f"unknown state {state_str(z)}") from None


class Observable:
    """A total map on states with bottom fixed, optionally with a spectral family.

    Equality and hashing use only the underlying map (and the space), so a
    semigroup closure deduplicates by action, not by name.
    """

    __slots__ = ("space", "name", "images", "_family")

    def __init__(self, space: StateSpace, images: Sequence[Optional[int]],
                 name: str = "", family=None):
        self.space = space
        self.images = tuple(images)
        self.name = name
        if len(self.images) != len(space):
            raise AlgebraError("image table does not match the state space")
        for i in self.images:
            if i is not None and not (0 <= i < len(space)):
                raise AlgebraError("image index out of range")
        # family: ordered tuple of (outcome label, Proposition)
        self._family = tuple(family) if family else None

    # -- construction -------------------------------------------------

    @classmethod
    def from_map(cls, space: StateSpace, mapping: Mapping, name: str = "",
                 default: str = "bottom", family=None) -> "Observable":
        """Build from a partial state->state dict.

        Unlisted states go to bottom (``default='bottom'``) or to
        themselves (``default='identity'``).
        """
        images = []
        for z in space.labels:
            if z in mapping:
                w = mapping[z]
                images.append(None if w is BOTTOM else space.index(w))
            else:
                images.append(None if default == "bottom" else space.index(z))
        return cls(space, images, name, family=family)

    @classmethod
    def from_blocks(cls, space: StateSpace, blocks: Sequence[tuple],
                    mapping: Optional[Mapping] = None, name: str = "",
                    validate: bool = True) -> "Observable":
        """Observable with a declared outcome partition.

        ``blocks`` is an ordered sequence of (outcome label, states).  The
        spectral family consists of the block filters; the map defaults to
        the identity and must stay inside each block (bottom allowed), so
        that the family laws hold by construction.
        """
        seen = {}
        for outcome, members in blocks:
            if outcome in seen:
                raise AlgebraError(f"duplicate outcome {outcome}")
            seen[outcome] = tuple(members)
        if validate:
            flat = [z for _, members in blocks for z in members]
            if len(flat) != len(set(flat)):
                raise AlgebraError(f"outcome blocks of {name or 'observable'} overlap")
            if set(flat) != set(space.labels):
                raise AlgebraError(f"outcome blocks of {name or 'observable'} do not cover the space")
        block_of = {}
        for outcome, members in blocks:
            for z in members:
                space.index(z)
                block_of[z] = outcome
        images = []
        for z in space.labels:
            w = mapping.get(z, z) if mapping else z
            if w is BOTTOM:
                images.append(None)
                continue
            if validate and block_of.get(z) is not None and block_of.get(w) != block_of.get(z):
                raise AlgebraError(
                    f"map of {name or 'observable'} leaves outcome block at {state_str(z)}")
            images.append(space.index(w))
        fam = tuple((outcome, Proposition.filter(space, members, name=f"{name}_{outcome}" if name else str(outcome)))
                    for outcome, members in blocks)
        return cls(space, images, name, family=fam)

    def with_family(self, family) -> "Observable":
        """Attach an explicit spectral family (outcome, Proposition) sequence."""
        return Observable(self.space, self.images, self.name, family=tuple(family))

    def renamed(self, name: str) -> "Observable":
        return Observable(self.space, self.images, name, family=self._family)

    # -- structure ----------------------------------------------------

    @property
    def family(self):
        return self._family

    @property
    def spectrum(self) -> Optional[tuple]:
        if self._family is None:
            return None
        return tuple(outcome for outcome, _ in self._family)

    def outcome_proposition(self, outcome) -> "Proposition":
        for o, p in self._family or ():
            if o == outcome:
                return p
        raise AlgebraError(f"{self.name or 'observable'} has no outcome {outcome}")

    # -- action -------------------------------------------------------

    def __call__(self, z):
        if z is BOTTOM:
            return BOTTOM
        i = self.images[self.space.index(z)]
        return BOTTOM if i is None else self.space.labels[i]

    def is_idempotent(self) -> bool:
        for i in self.images:
            if i is not None and self.images[i] != i:
                return False
        return True

    def is_identity(self) -> bool:
        return all(i == k for k, i in enumerate(self.images))

    def as_proposition(self, name: Optional[str] = None) -> "Proposition":
        if not self.is_idempotent():
            raise AlgebraError(f"{self.name or 'map'} is not idempotent")
        return Proposition(self.space, self.images, name if name is not None else self.name)

    def __mul__(self, other: "Observable") -> "Observable":
        return compose(self, other)

    def __eq__(self, other):
        return (isinstance(other, Observable)
                and self.space.labels == other.space.labels
                and self.images == other.images)

    def __hash__(self):
        return hash((self.space.labels, self.images))

    def __repr__(self):
        pairs = ", ".join(
            f"{state_str(z)}->{state_str(self(z))}" for z in self.space.labels)
        return f"<{type(self).__name__} {self.name or '?'}: {pairs}>"


class Proposition(Observable):
    """An idempotent observable; a yes/no question about the system.

    The certainty set is the set of fixed points ("true with certainty");
    the support is where the map does not collapse to bottom.  States in
    the support that are not fixed become true after the constructive
    measurement.
    """

    def __init__(self, space, images, name=""):
        super().__init__(space, images, name, family=None)
        if not self.is_idempotent():
            raise AlgebraError(f"proposition {name or '?'} is not idempotent")

    @classmethod
    def filter(cls, space: StateSpace, members: Iterable, name: str = "") -> "Proposition":
        """The proposition that keeps ``members`` and annihilates the rest."""
        keep = set(members)
        for z in keep:
            space.index(z)
        images = [i if space.labels[i] in keep else None for i in range(len(space))]
        return cls(space, images, name)

    @classmethod
    def from_parts(cls, space: StateSpace, fixes: Iterable,
                   sends: Optional[Mapping] = None, name: str = "") -> "Proposition":
        """Proposition fixing ``fixes`` and collapsing ``sends`` into them."""
        mapping = {z: z for z in fixes}
        for z, w in (sends or {}).items():
            if z in mapping:
                raise AlgebraError(f"{state_str(z)} both fixed and sent")
            mapping[z] = w
        obs = Observable.from_map(space, mapping, name=name, default="bottom")
        return obs.as_proposition(name)

    @property
    def support(self) -> tuple:
        return tuple(z for z in self.space.labels if self(z) is not BOTTOM)

    @property
    def certainty_set(self) -> tuple:
        return tuple(z for z in self.space.labels if self(z) == z)

    @property
    def is_filter(self) -> bool:
        return self.support == self.certainty_set

    @property
    def spectrum(self) -> tuple:
        spec = []
        if self.support:
            spec.append("yes")
        if len(self.support) < len(self.space):
            spec.append("no")
        return tuple(spec)

    @property
    def family(self):
        yes = Proposition.filter(self.space, self.certainty_set,
                                 name=f"{self.name}_yes" if self.name else "yes")
        no = Proposition.filter(
            self.space, [z for z in self.space.labels if self(z) is BOTTOM],
            name=f"{self.name}_no" if self.name else "no")
        return (("yes", yes), ("no", no))

    def renamed(self, name: str) -> "Proposition":
        return Proposition(self.space, self.images, name)


def identity(space: StateSpace) -> Proposition:
    """The always-true proposition (the semigroup unit)."""
    return Proposition(space, range(len(space)), name="1")


def zero(space: StateSpace) -> Proposition:
    """The never-true proposition (constant bottom)."""
    return Proposition(space, [None] * len(space), name="0")


def compose(a: Observable, b: Observable) -> Observable:
    """``a`` applied after ``b``: (a*b)(z) = a(b(z))."""
    if a.space.labels != b.space.labels:
        raise AlgebraError("cannot compose observables over different state spaces")
    images = tuple(None if i is None else a.images[i] for i in b.images)
    name = f"{a.name}*{b.name}" if a.name and b.name else ""
    return Observable(a.space, images, name)


def commutes(a: Observable, b: Observable) -> bool:
    """True iff the two maps agree in either application order."""
    if a.space.labels != b.space.labels:
        raise AlgebraError("observables live on different state spaces")
    return compose(a, b).images == compose(b, a).images


@dataclass(frozen=True)
class FamilyLaw:
    """One spectral-family law check, with a witness state on failure."""

    law: str
    detail: str
    passed: bool
    witness: Optional[str] = None


@dataclass(frozen=True)
class FamilyReport:
    subject: str
    laws: tuple

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.laws)

    def failures(self):
        return [row for row in self.laws if not row.passed]


def _first_disagreement(a: Observable, b: Observable):
    for z in a.space.labels:
        if a(z) != b(z):
            return z
    return None


def verify_spectral_family(a: Observable) -> FamilyReport:
    """Check the three spectral laws of an observable's declared family.

    Outcome propositions must mutually annihilate, commute with the
    observable itself, and join to the identity.  Each law is reported
    with a witness state on failure; nothing is raised.
    """
    if a.family is None:
        raise AlgebraError(f"{a.name or 'observable'} has no declared spectral family")
    space = a.space
    zero_p = zero(space)
    rows = []
    fam = list(a.family)
    for i, (alpha, pa) in enumerate(fam):
        for beta, pb in fam[i + 1:]:
            ab = compose(pa, pb)
            ba = compose(pb, pa)
            bad = _first_disagreement(ab, zero_p) or _first_disagreement(ba, zero_p)
            rows.append(FamilyLaw(
                "orthogonality", f"{alpha}-{beta}", bad is None,
                None if bad is None else state_str(bad)))
    for alpha, pa in fam:
        bad = _first_disagreement(compose(a, pa), compose(pa, a))
        rows.append(FamilyLaw(
            "commutation", str(alpha), bad is None,
            None if bad is None else state_str(bad)))
    covered = set()
    for _, pa in fam:
        covered.update(pa.support)
    # the join of pairwise-annihilating propositions is the filter on the
    # union of their supports, so completeness reduces to coverage
    missing = [z for z in space.labels if z not in covered]
    rows.append(FamilyLaw(
        "completeness", "join", not missing,
        None if not missing else state_str(missing[0])))
    return FamilyReport(a.name or "observable", tuple(rows))


def negate(p: Proposition) -> Proposition:
    """The filter on the complement of the support; annihilates p both ways."""
    comp = [z for z in p.space.labels if p(z) is BOTTOM]
    return Proposition.filter(p.space, comp, name=f"not_{p.name}" if p.name else "")


def meet(p1: Proposition, p2: Proposition) -> Proposition:
    """Conjunction of compatible propositions: their composition."""
    if not commutes(p1, p2):
        raise IncompatibleError(
            f"meet of noncommuting propositions {p1.name or '?'}, {p2.name or '?'}")
    name = f"{p1.name}_and_{p2.name}" if p1.name and p2.name else ""
    return compose(p1, p2).as_proposition(name)


def join(p1: Proposition, p2: Proposition) -> Proposition:
    """Adjunction via De Morgan from meet and negation."""
    if not commutes(p1, p2):
        raise IncompatibleError(
            f"join of noncommuting propositions {p1.name or '?'}, {p2.name or '?'}")
    name = f"{p1.name}_or_{p2.name}" if p1.name and p2.name else ""
    return negate(meet(negate(p1), negate(p2))).renamed(name)


def join_all(props: Sequence[Proposition]) -> Proposition:
    if not props:
        raise AlgebraError("join of an empty family")
    out = props[0]
    for p in props[1:]:
        out = join(out, p)
    return out


def proposition_logic(op: str, p1: Proposition,
                      p2: Optional[Proposition] = None) -> Proposition:
    """Dispatcher for the three proposition connectives."""
    if op == "negate":
        return negate(p1)
    if p2 is None:
        raise AlgebraError(f"{op} needs two propositions")
    if op == "meet":
        return meet(p1, p2)
    if op == "join":
        return join(p1, p2)
    raise AlgebraError(f"unknown proposition operation {op!r}")


@dataclass(frozen=True)
class RelabelingMap:
    """A total function between outcome spectra, used to redefine observables."""

    source: tuple
    mapping: Mapping
    name: str = ""

    def __post_init__(self):
        missing = [o for o in self.source if o not in self.mapping]
        if missing:
            raise AlgebraError(f"relabeling undefined on outcome {missing[0]}")

    def __call__(self, outcome):
        return self.mapping[outcome]

    @property
    def target(self) -> tuple:
        out = []
        for o in self.source:
            t = self.mapping[o]
            if t not in out:
                out.append(t)
        return tuple(out)


def function_of(a: Observable, f: RelabelingMap) -> Observable:
    """Redefine ``a`` through ``f``: each new outcome's proposition is the
    join of the old ones mapped onto it; the state map is unchanged."""
    report = verify_spectral_family(a)
    if not report.passed:
        bad = report.failures()[0]
        raise AlgebraError(
            f"spectral family of {a.name or 'observable'} violates {bad.law}")
    spec = a.spectrum
    if tuple(f.source) != tuple(spec):
        extra = [o for o in spec if o not in f.source]
        if extra:
            raise AlgebraError(f"relabeling does not cover outcome {extra[0]}")
    groups = {}
    order = []
    for outcome, prop in a.family:
        t = f(outcome)
        if t not in groups:
            groups[t] = []
            order.append(t)
        groups[t].append(prop)
    fam = tuple((t, join_all(groups[t]).renamed(f"{a.name}_{t}" if a.name else str(t)))
                for t in order)
    name = f"{f.name}({a.name})" if f.name and a.name else a.name
    return Observable(a.space, a.images, name, family=fam)


@dataclass(frozen=True)
class Semigroup:
    """A composition-closed finite set of observables with stable names."""

    space: StateSpace
    elements: tuple
    names: Mapping

    def __len__(self):
        return len(self.elements)

    def __contains__(self, obs):
        return obs in self.names

    def name_of(self, obs: Observable) -> str:
        return self.names[obs]

    def by_name(self, name: str):
        for obs, n in self.names.items():
            if n == name:
                return obs
        raise AlgebraError(f"no semigroup element named {name}")


def closure(generators: Sequence[Observable], max_size: Optional[int] = None) -> Semigroup:
    """Least composition-closed superset of the generators, with 1 and 0.

    Breadth-first products; termination is bounded by the number of maps
    on the space.  Element names record one generating word.
    """
    gens = list(generators)
    if not gens:
        raise AlgebraError("closure needs at least one generator's state space")
    space = gens[0].space
    for g in gens:
        if g.space.labels != space.labels:
            raise AlgebraError("generators live on different state spaces")
    names: dict = {}
    order: list = []

    def add(obs, name):
        if obs not in names:
            names[obs] = name or f"e{len(names)}"
            order.append(obs)
            return True
        return False

    for g in gens:
        add(g, g.name)
    one = identity(space)
    zero_el = zero(space)
    add(one, "1")
    add(zero_el, "0")
    frontier = list(order)
    while frontier:
        new = []
        for a in list(order):
            for b in frontier:
                for left, right in ((a, b), (b, a)):
                    prod = compose(left, right)
                    if prod not in names:
                        add(prod, f"{names[left]}*{names[right]}")
                        new.append(prod)
                        if max_size is not None and len(names) > max_size:
                            raise AlgebraError(f"closure exceeded {max_size} elements")
        frontier = new
    return Semigroup(space, tuple(order), names)


def is_increasing(family: Sequence[Proposition]) -> bool:
    """Absorption test for an ordered proposition family.

    For sigma <= tau the earlier proposition must absorb the later one in
    both orders: P_tau P_sigma = P_sigma P_tau = P_sigma.
    """
    props = list(family)
    for i, early in enumerate(props):
        for late in props[i:]:
            if compose(late, early).images != early.images:
                return False
            if compose(early, late).images != early.images:
                return False
    return True
