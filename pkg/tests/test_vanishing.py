"""Vanishing verdicts, the positivity hypothesis, and the tail reduction."""

import itertools
from fractions import Fraction

import pytest

from relgw.dimension import Insertion, InvariantError, InvariantSpec
from relgw.lattice import cls, gen
from relgw.spaces import builtin
from relgw.strata import _partitions
from relgw.vanishing import (
    ADMISSIBLE,
    DIMENSION_MISMATCH,
    FIBER_MULTIPLE,
    HYPOTHESIS_FAILED,
    NEGATIVE_INTERSECTION,
    RULED_PULLED_BACK,
    ZERO,
    abs_rel_identity,
    check_degeneration_hypothesis,
    decide,
)


def antidiag_point_spec():
    pair = builtin("s2xs2_antidiag")
    X = pair.ambient
    return InvariantSpec(pair, 0, X.gen("a1"), (Insertion(X.point),), ())


def test_negative_contact_degree_is_zero():
    v = decide(antidiag_point_spec())
    assert v.kind == ZERO and v.reason == NEGATIVE_INTERSECTION


def test_dimension_gate():
    p2 = builtin("p2")
    lam = p2.gen("lambda")
    short = InvariantSpec(p2, 0, lam, (Insertion(p2.point),), ())
    v = decide(short)
    assert v.kind == ZERO and v.reason == DIMENSION_MISMATCH
    two_points = InvariantSpec(p2, 0, lam, (Insertion(p2.point),) * 2, ())
    assert decide(two_points).kind == ADMISSIBLE


def test_hyperplane_family_census():
    # every relative count of lines against the hyperplane dies except the
    # single point condition on the line itself
    pairs = ["p1_point", "p2_hyperplane", "p3_hyperplane", "p4_hyperplane"]
    admissible = []
    total = 0
    for name in pairs:
        pair = builtin(name)
        X, D = pair.ambient, pair.divisor
        line = [e for e, g in X.basis.elements if g == 1][0]
        constraints = [gen(D.basis, e) for e, _ in D.basis.elements]
        for d in range(1, 6):
            beta = X.gen(line, d)
            for mu in _partitions(d):
                for combo in itertools.product(constraints, repeat=len(mu)):
                    rel = tuple(Insertion(c, order=m) for m, c in zip(mu, combo))
                    spec = InvariantSpec(pair, 0, beta, (), rel)
                    verdict = decide(spec)
                    total += 1
                    assert verdict.kind in (ZERO, ADMISSIBLE)
                    if verdict.kind == ADMISSIBLE:
                        admissible.append((name, d, mu))
    assert total > 2000
    assert admissible == [("p1_point", 1, (1,))]


def test_fiber_triple_is_admissible():
    pair = builtin("t2_ruled_section")
    X, D = pair.ambient, pair.divisor
    f = X.gen("f")
    tail = (Insertion(D.point, order=1),)
    bare = InvariantSpec(pair, 0, f, (), tail)
    assert decide(bare).kind == ADMISSIBLE
    pulled = Insertion(f, pulled_back=True)
    triple = InvariantSpec(pair, 0, f, (pulled, pulled), tail)
    assert decide(triple).kind == ADMISSIBLE


def test_fiber_class_insertion_bound():
    pair = builtin("t2_ruled_section")
    X, D = pair.ambient, pair.divisor
    f = X.gen("f")
    pulled = Insertion(f, pulled_back=True)
    spec = InvariantSpec(pair, 0, f, (pulled,) * 3, (Insertion(D.point, order=1),))
    v = decide(spec)
    assert v.kind == ZERO and v.reason == FIBER_MULTIPLE


def test_translation_vanishing():
    pair = builtin("t2_ruled_section")
    X = pair.ambient
    section = cls(X.basis, {"s": 1, "f": 1})
    pulled = Insertion(X.gen("f"), pulled_back=True)
    spec = InvariantSpec(pair, 0, section, (pulled, pulled), ())
    v = decide(spec)
    assert v.kind == ZERO and v.reason == RULED_PULLED_BACK


def test_translation_needs_all_pulled_back():
    pair = builtin("t2_ruled_section")
    X = pair.ambient
    section = cls(X.basis, {"s": 1, "f": 1})
    plain = Insertion(X.gen("f"))
    spec = InvariantSpec(pair, 0, section, (plain, plain), ())
    assert decide(spec).kind == ADMISSIBLE


def test_hypothesis_blowup_classes():
    pair = builtin("p4blow2_hyperplane")
    X, D = pair.ambient, pair.divisor
    ok, witness = check_degeneration_hypothesis(pair, X.gen("lambda", 2))
    assert ok and witness is None
    deep = cls(X.basis, {"lambda": 4, "eps1": -2, "eps2": -2})
    ok, witness = check_degeneration_hypothesis(pair, deep)
    assert not ok
    assert witness == cls(D.basis, {"lambda": 2, "eps1": -2, "eps2": -2})


def test_hypothesis_antidiagonal():
    pair = builtin("s2xs2_antidiag")
    X, D = pair.ambient, pair.divisor
    ok, witness = check_degeneration_hypothesis(pair, X.gen("a1"))
    assert not ok
    assert witness == D.gen("fund")


def test_identity_adds_fundamental_tails():
    pair = builtin("p2_hyperplane")
    X, D = pair.ambient, pair.divisor
    conics = InvariantSpec(X, 0, X.gen("lambda", 2), (Insertion(X.point),) * 2, ())
    v = abs_rel_identity(conics, pair)
    assert v.kind == "reduces" and v.factor == Fraction(1)
    assert v.target.pair.name == "p2_hyperplane"
    assert v.target.contact_orders == (1, 1)
    assert all(i.cls == D.fundamental for i in v.target.relatives)
    assert v.target.absolutes == conics.absolutes


def test_identity_with_no_contacts():
    pair = builtin("p2blow1_exc")
    X = pair.ambient
    spec = InvariantSpec(X, 0, X.gen("lambda"), (Insertion(X.point),) * 2, ())
    v = abs_rel_identity(spec, pair)
    assert v.kind == "reduces"
    assert v.target.relatives == ()
    assert v.target.beta == X.gen("lambda")


def test_identity_blocked_by_witness():
    pair = builtin("s2xs2_antidiag")
    X = pair.ambient
    spec = InvariantSpec(X, 0, X.gen("a1"), (Insertion(X.point),), ())
    v = abs_rel_identity(spec, pair)
    assert v.kind == "unknown" and v.reason == HYPOTHESIS_FAILED


def test_identity_requires_absolute_input():
    with pytest.raises(InvariantError):
        abs_rel_identity(antidiag_point_spec(), builtin("s2xs2_antidiag"))
