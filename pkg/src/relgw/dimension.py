"""Expected dimensions of curve counts and indices of degeneration strata.

Everything here is exact integer bookkeeping.  The raw dimension of a moduli
problem ignores homological constraints; each constraint subtracts its
codimension, and a count is admissible exactly when the result is zero.
Multi-level strata are indexed per component, with one reparametrization
count per positive level and a matching correction per internal node; those
two corrections are applied by the strata module, not here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import HomologyClass
from .spaces import DivisorPair, RuledSetup, Space


class InvariantError(Exception):
    """An ill-posed invariant: wrong basis, bad contact data, bad genus."""


class DefinedZero(Exception):
    """The count is zero by definition, not by a dimension argument.

    Raised when a class pairs negatively with the chosen divisor, so the
    relative moduli space is empty before any constraint is imposed.  Callers
    catch this; it is a verdict, not a failure.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


_PLACES = (None, "X", "Y", "split")


@dataclass(frozen=True)
class Insertion:
    """One constraint: a homology class, possibly with a descendent power,
    possibly tied to the divisor with a contact order.

    `order` is None for an absolute insertion and the contact multiplicity
    (>= 1) otherwise.  `pulled_back` marks absolute constraints of the shape
    projection^-1(class in the divisor); they can always be pushed off a
    fixed fiber direction.  `place` is only meaningful as input to the
    splitting enumeration and never enters a canonical key.
    """

    cls: HomologyClass
    descendents: int = 0
    order: int | None = None
    pulled_back: bool = False
    place: str | None = None

    def __post_init__(self):
        if self.cls.is_zero or self.cls.grade is None:
            raise InvariantError("constraint classes must be homogeneous and nonzero")
        if self.descendents < 0:
            raise InvariantError("descendent power must be >= 0")
        if self.order is not None:
            if self.order < 1:
                raise InvariantError("contact order must be >= 1")
            if self.descendents:
                raise InvariantError("contact insertions carry no descendents")
        if self.place not in _PLACES:
            raise InvariantError(f"unknown placement {self.place!r}")

    @property
    def relative(self) -> bool:
        return self.order is not None

    def token(self) -> str:
        if self.relative:
            return f"({self.order},{self.cls.encode()})"
        parts = []
        if self.descendents:
            parts.append(f"tau{self.descendents}:")
        if self.pulled_back:
            parts.append("pb:")
        parts.append(self.cls.encode())
        return "".join(parts)


def _abs_sort_key(ins: Insertion):
    return (ins.cls.grade, ins.cls.encode(), ins.descendents, ins.pulled_back)


def _rel_sort_key(ins: Insertion):
    return (-ins.order, ins.cls.encode())


@dataclass(frozen=True)
class InvariantSpec:
    """A single connected-domain count: target, genus, class, constraints.

    `target` is a Space for absolute counts or a DivisorPair for relative
    ones.  Relative insertions use classes in the divisor's basis; absolute
    insertions use the ambient basis.
    """

    target: Space | DivisorPair
    genus: int
    beta: HomologyClass
    absolutes: tuple[Insertion, ...] = ()
    relatives: tuple[Insertion, ...] = ()
    connected: bool = True

    def __post_init__(self):
        object.__setattr__(self, "absolutes", tuple(self.absolutes))
        object.__setattr__(self, "relatives", tuple(self.relatives))
        if self.genus < 0:
            raise InvariantError("genus must be >= 0")
        if self.relatives and self.pair is None:
            raise InvariantError("contact insertions need a divisor pair target")
        if self.beta.basis.name != self.space.basis.name:
            raise InvariantError("class lives in the wrong basis")
        for ins in self.absolutes:
            if ins.relative:
                raise InvariantError("contact insertion listed as absolute")
            if ins.cls.basis.name != self.space.basis.name:
                raise InvariantError(f"absolute constraint {ins.token()} in wrong basis")
        for ins in self.relatives:
            if not ins.relative:
                raise InvariantError("absolute insertion listed as relative")
            if ins.cls.basis.name != self.pair.divisor.basis.name:
                raise InvariantError(f"contact constraint {ins.token()} in wrong basis")

    @property
    def pair(self) -> DivisorPair | None:
        return self.target if isinstance(self.target, DivisorPair) else None

    @property
    def space(self) -> Space:
        return self.target.ambient if isinstance(self.target, DivisorPair) else self.target

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def contact_orders(self) -> tuple[int, ...]:
        return tuple(ins.order for ins in self.relatives)

    def key(self) -> str:
        """Canonical text form; equal keys mean the same count."""
        a = ",".join(i.token() for i in sorted(self.absolutes, key=_abs_sort_key))
        head = "pair" if self.pair is not None else "space"
        out = f"{head}:{self.target.name};g={self.genus};b={self.beta.encode()};abs={a}"
        if self.pair is not None:
            r = ",".join(i.token() for i in sorted(self.relatives, key=_rel_sort_key))
            out += f";rel={r}"
        if not self.connected:
            out += ";conn=0"
        return out


def _contact_tokens(contacts) -> str:
    items = sorted(contacts, key=lambda mc: (-mc[0], mc[1].encode()))
    return ",".join(f"({m},{c.encode()})" for m, c in items)


@dataclass(frozen=True)
class RubberTriple:
    """A count in a P1-bundle over the divisor, taken modulo the fiberwise
    scaling action, with contact data along both distinguished sections.

    `alpha` is the section part of the class (a curve class of the divisor)
    and `fiber_deg` the fiber part.  `zero` and `inf` list (multiplicity,
    constraint class in the divisor) per contact point.
    """

    ruled: RuledSetup
    genus: int
    alpha: HomologyClass
    fiber_deg: int
    zero: tuple[tuple[int, HomologyClass], ...]
    inf: tuple[tuple[int, HomologyClass], ...]
    interior: tuple[Insertion, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zero", tuple(self.zero))
        object.__setattr__(self, "inf", tuple(self.inf))
        object.__setattr__(self, "interior", tuple(self.interior))
        if self.genus < 0:
            raise InvariantError("genus must be >= 0")
        dbasis = self.ruled.base.divisor.basis.name
        if self.alpha.basis.name != dbasis:
            raise InvariantError("section part must be a divisor curve class")
        beta = self.ruled.class_of(self.alpha, self.fiber_deg)
        for contacts, divclass, side in ((self.zero, self.ruled.dzero_class, "zero"),
                                         (self.inf, self.ruled.dinf_class, "infinity")):
            deg = self.ruled.total.intersect(beta, divclass)
            _check_contacts(contacts, deg, side, dbasis)

    def key(self) -> str:
        return (f"rubber:{self.ruled.base.name};g={self.genus};"
                f"a={self.alpha.encode()};f={self.fiber_deg};"
                f"zero={_contact_tokens(self.zero)};inf={_contact_tokens(self.inf)}")

    def mirrored(self) -> "RubberTriple":
        """Swap the roles of the two sections.

        Only defined when the section part meets both of them equally,
        which covers every fiber-class count; anything else fails the
        contact-sum check on construction.
        """
        return RubberTriple(self.ruled, self.genus, self.alpha, self.fiber_deg,
                            self.inf, self.zero, self.interior)


def _check_contacts(contacts, deg: int, side: str, dbasis: str) -> None:
    for m, c in contacts:
        if m < 1:
            raise InvariantError("contact multiplicities must be >= 1")
        if c.basis.name != dbasis or c.is_zero or c.grade is None:
            raise InvariantError(f"bad contact constraint at {side}")
    if deg < 0:
        # the class misses this section; excess stays in the index formula
        if contacts:
            raise InvariantError(f"contacts at {side} but degree {deg} < 0")
    elif sum(m for m, _ in contacts) != deg:
        raise InvariantError(f"contact multiplicities at {side} must sum to {deg}")


# ---------------------------------------------------------------------------
# dimension formulas


def raw_dimension(spec: InvariantSpec) -> int:
    """Dimension of the moduli problem before homological constraints.

    Contact points only contribute their tangency excess here; the condition
    that they land on the divisor at all is charged per constraint by
    constraint_codim, with the fundamental class as the free default.
    """
    if spec.pair is not None:
        d = spec.pair.contact_count(spec.beta)
        if d < 0:
            raise DefinedZero(f"class meets divisor in {d} < 0 points")
        if sum(spec.contact_orders) != d:
            raise InvariantError(f"contact orders must sum to {d}")
    n, g = spec.n, spec.genus
    k, r = len(spec.absolutes), len(spec.relatives)
    excess = sum(o - 1 for o in spec.contact_orders)
    return n * (1 - g) + spec.space.c1(spec.beta) + k + r + 3 * (g - 1) - excess


def constraint_codim(ins: Insertion, n: int) -> int:
    """Codimension charged by one insertion in an n-fold."""
    codim = n - ins.cls.grade
    if not ins.relative:
        codim += ins.descendents
    return codim


def expected_dimension(spec: InvariantSpec) -> int:
    total = raw_dimension(spec)
    for ins in spec.absolutes + spec.relatives:
        total -= constraint_codim(ins, spec.n)
    return total


def is_admissible(spec: InvariantSpec) -> bool:
    """True when the constrained problem is zero-dimensional."""
    return expected_dimension(spec) == 0


# ---------------------------------------------------------------------------
# per-component and per-level indices


def component_index(*, n: int, genus: int, c1: int, marks: int,
                    deg_inf: int, r_inf: int, codims: int,
                    deg_zero: int | None = None, r_zero: int = 0) -> int:
    """Index of a single component of a level curve.

    `marks` counts every special point on the component: contact nodes on
    both sides plus interior marked points.  `codims` is the total constraint
    codimension carried by those points.  Bottom-level components touch only
    one divisor, hence deg_zero=None there.  Degrees enter through their
    excess over the number of contacts and are kept even when negative.
    The reparametrization count of the level is not included.
    """
    total = n * (1 - genus) + c1 + 3 * (genus - 1) + marks
    total -= deg_inf - r_inf
    if deg_zero is not None:
        total -= deg_zero - r_zero
    return total - codims


def level_index(setup: RuledSetup, alpha: HomologyClass, fiber_deg: int,
                zero, inf, genus: int = 0, interior=()) -> int:
    """Index of one connected component sitting at a positive level.

    The component lives in the P1-bundle of `setup` in class
    lift(alpha) + fiber_deg * fiber.  `zero` and `inf` are (multiplicity,
    constraint class in the divisor) lists; `interior` holds absolute
    insertions with classes in the bundle's basis.  Includes the -1 for the
    fiberwise scaling of the level, so a multi-component level should be
    summed with component_index instead.
    """
    dbasis = setup.base.divisor.basis.name
    beta = setup.class_of(alpha, fiber_deg)
    total = setup.total
    deg_zero = total.intersect(beta, setup.dzero_class)
    deg_inf = total.intersect(beta, setup.dinf_class)
    _check_contacts(zero, deg_zero, "zero", dbasis)
    _check_contacts(inf, deg_inf, "infinity", dbasis)
    n = total.n
    codims = sum(n - c.grade for _, c in list(zero) + list(inf))
    for ins in interior:
        if ins.relative:
            raise InvariantError("interior insertions must be absolute")
        codims += constraint_codim(ins, n)
    marks = len(list(zero)) + len(list(inf)) + len(list(interior))
    return component_index(n=n, genus=genus, c1=total.c1(beta), marks=marks,
                           deg_inf=deg_inf, r_inf=len(list(inf)), codims=codims,
                           deg_zero=deg_zero, r_zero=len(list(zero))) - 1


def projection_index(n: int, c1_alpha: int, contacts: int, delta: int) -> int:
    """Dimension of the projected count down in the divisor.

    For a genus-0 component at a positive level with `contacts` contact
    points whose constraint classes have total grade `delta`, this equals
    level_index; the identity is exercised by the test grid.
    """
    return (n - 1) + c1_alpha + contacts - 3 + delta - contacts * (n - 1)


def predicted_index(spec: InvariantSpec, higher_levels: int) -> int:
    """Index any stratum with the given number of positive levels must have,
    assuming its contact pattern along the last divisor matches `spec`."""
    if higher_levels < 0:
        raise InvariantError("level count must be >= 0")
    return expected_dimension(spec) - higher_levels
