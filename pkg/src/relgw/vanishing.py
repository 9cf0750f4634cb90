"""Vanishing verdicts and the reduction of absolute counts to relative ones.

`decide` runs a fixed sequence of cheap structural checks against an
invariant specification and reports the first that applies.  A verdict is
never a computation of the number itself; it only says "this count is zero
and here is why", "nothing rules it out", or "it equals another count".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dimension import (
    DefinedZero,
    Insertion,
    InvariantError,
    InvariantSpec,
    expected_dimension,
)
from .lattice import HomologyClass
from .spaces import DivisorPair

ZERO = "zero"
ADMISSIBLE = "admissible"
REDUCES = "reduces"
UNKNOWN = "unknown"

NEGATIVE_INTERSECTION = "negative-intersection"
DIMENSION_MISMATCH = "dimension-mismatch"
PROJECTIVE_HYPERPLANE = "projective-hyperplane"
RULED_PULLED_BACK = "ruled-pulled-back"
FIBER_MULTIPLE = "fiber-multiple"
HYPOTHESIS_FAILED = "hypothesis-failed"
NEGATIVE_CONTACT = "negative-contact"

# pairs whose divisor is a linear hyperplane section of projective space
_HYPERPLANE_FAMILY = ("p1_point", "p2_hyperplane", "p3_hyperplane", "p4_hyperplane")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a structural check.

    kind is one of ZERO, ADMISSIBLE, REDUCES, UNKNOWN.  Zero verdicts carry a
    machine-readable reason; reductions carry the equivalent specification
    and the rational factor relating the two counts.
    """

    kind: str
    reason: str | None = None
    target: InvariantSpec | None = None
    factor: Fraction | None = None
    trace: tuple[str, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.kind == ZERO

    @property
    def is_admissible(self) -> bool:
        return self.kind == ADMISSIBLE

    def describe(self) -> str:
        if self.kind == ZERO:
            return f"zero[{self.reason}]"
        if self.kind == REDUCES:
            return f"reduces[{self.reason}] x{self.factor}"
        if self.kind == UNKNOWN:
            return f"unknown[{self.reason}]"
        return "admissible"


def decide(spec: InvariantSpec) -> Verdict:
    """Apply the vanishing checks in their fixed order.

    Order matters: negative contact degree first (the count is zero by
    definition), then the dimension gate, then the three geometric rules
    that only see genus-zero relative specifications.
    """
    pair = spec.pair
    try:
        e = expected_dimension(spec)
    except DefinedZero as stop:
        return Verdict(ZERO, NEGATIVE_INTERSECTION, trace=(str(stop),))

    # the hyperplane family vanishes as a family, so it outranks the
    # instance-by-instance dimension gate in the report
    if (pair is not None and spec.genus == 0
            and pair.name in _HYPERPLANE_FAMILY and not spec.absolutes):
        d = pair.contact_count(spec.beta)
        n = spec.n
        if d > 0 and (n > 1 or d > 1):
            return Verdict(
                ZERO, PROJECTIVE_HYPERPLANE,
                trace=(f"degree {d} curves against the hyperplane in dimension {n}",))

    if e != 0:
        return Verdict(ZERO, DIMENSION_MISMATCH, trace=(f"expected dimension {e}",))
    if pair is None or spec.genus != 0:
        return Verdict(ADMISSIBLE)

    s, r = len(spec.absolutes), len(spec.relatives)

    meta = pair.ruled
    if meta is not None:
        ell = meta.fiber_degree(spec.beta)
        X = pair.ambient
        if (ell is None
                and X.intersect(spec.beta, meta.dzero_class) >= 0
                and all(a.pulled_back for a in spec.absolutes)):
            return Verdict(
                ZERO, RULED_PULLED_BACK,
                trace=("every constraint is invariant under translation "
                       "along the ruling",))
        if ell is not None and ell > 1:
            return Verdict(ZERO, FIBER_MULTIPLE,
                           trace=(f"class is {ell} times the fiber",))
        if ell == 1 and s > 0 and s + r > 3:
            return Verdict(
                ZERO, FIBER_MULTIPLE,
                trace=(f"fiber class with {s} absolute and {r} relative "
                       "insertions",))

    return Verdict(ADMISSIBLE)


def check_degeneration_hypothesis(
        pair: DivisorPair,
        beta: HomologyClass,
        search_area: int | None = None) -> tuple[bool, HomologyClass | None]:
    """Test the positivity hypothesis behind the absolute-relative identity.

    The identity fails when some effective curve class alpha inside the
    divisor meets it to order -k with k >= 2, has small enough first Chern
    number, and leaves an effective remainder beta - i(alpha) in the ambient
    space.  Returns (True, None) when no such class exists, otherwise
    (False, witness).

    Candidates are enumerated by their area inside the divisor; the default
    budget is wide enough to cover every catalog geometry, including ones
    where the inclusion collapses area.
    """
    X, D = pair.ambient, pair.divisor
    xmodel, dmodel = X.effective, D.effective
    if xmodel is None or dmodel is None:
        raise InvariantError(
            f"pair {pair.name} has no effective-class model on both sides")
    if search_area is None:
        search_area = 2 * int(X.area(beta)) + 2
    n = X.n
    for alpha in dmodel.classes(search_area):
        k = -pair.normal_degree(alpha)
        if k < 2:
            continue
        image = pair.inclusion(alpha)
        remainder = beta - image
        if remainder.is_zero or not xmodel.is_effective(remainder):
            continue
        bound = (n - 3) * (k - 2) if n >= 3 else 0
        if X.c1(image) <= bound:
            return False, alpha
    return True, None


def abs_rel_identity(spec: InvariantSpec, pair: DivisorPair) -> Verdict:
    """Rewrite an absolute count as a relative one with fundamental tails.

    Under the degeneration hypothesis the absolute invariant equals the
    relative invariant of (X, D) with the same insertions plus beta.D extra
    contact points of order one carrying the fundamental class of D.
    """
    if spec.pair is not None:
        raise InvariantError("identity starts from an absolute count")
    if spec.target.basis.name != pair.ambient.basis.name:
        raise InvariantError(
            f"count lives on {spec.target.name}, pair on {pair.ambient.name}")
    ok, witness = check_degeneration_hypothesis(pair, spec.beta)
    if not ok:
        return Verdict(
            UNKNOWN, HYPOTHESIS_FAILED,
            trace=(f"violating divisor class {witness.encode()}",))
    d = pair.contact_count(spec.beta)
    if d < 0:
        return Verdict(
            UNKNOWN, NEGATIVE_CONTACT,
            trace=(f"class meets the divisor in degree {d}",))
    tails = tuple(Insertion(pair.divisor.fundamental, order=1) for _ in range(d))
    relative = InvariantSpec(pair, spec.genus, spec.beta,
                             spec.absolutes, spec.relatives + tails)
    return Verdict(
        REDUCES, "fundamental-tails", target=relative, factor=Fraction(1),
        trace=(f"{d} contact points of order one on the fundamental class",))
