"""Dimension and index formulas pinned against hand-checked values."""

import random

import pytest

from relgw.dimension import (DefinedZero, Insertion, InvariantError,
                             InvariantSpec, RubberTriple, component_index,
                             constraint_codim, expected_dimension,
                             is_admissible, level_index, predicted_index,
                             projection_index, raw_dimension)
from relgw.lattice import cls, gen
from relgw.spaces import builtin


def rel(pair, order, name):
    return Insertion(gen(pair.divisor.basis, name), order=order)


def absins(space, name, desc=0):
    return Insertion(gen(space.basis, name), descendents=desc)


def free_marks(space, k):
    return tuple(absins(space, "fund") for _ in range(k))


def test_exceptional_line_family():
    pair = builtin("p2blow1_exc")
    spec = InvariantSpec(pair, 0, gen(pair.ambient.basis, "lambda"),
                         absolutes=(absins(pair.ambient, "pt"),))
    assert raw_dimension(spec) == 3
    assert expected_dimension(spec) == 1


def test_conic_tangent_contact():
    pair = builtin("p2_hyperplane")
    spec = InvariantSpec(pair, 0, gen(pair.ambient.basis, "lambda", 2),
                         absolutes=free_marks(pair.ambient, 3),
                         relatives=(rel(pair, 2, "pt"),))
    assert raw_dimension(spec) == 8
    assert expected_dimension(spec) == 6
    assert predicted_index(spec, 0) == 6
    assert predicted_index(spec, 1) == 5


def test_conic_two_simple_contacts():
    pair = builtin("p2_hyperplane")
    spec = InvariantSpec(pair, 0, gen(pair.ambient.basis, "lambda", 2),
                         absolutes=free_marks(pair.ambient, 3),
                         relatives=(rel(pair, 1, "fund"), rel(pair, 1, "fund")))
    assert raw_dimension(spec) == 10
    assert expected_dimension(spec) == 8


def test_genus_one_cubic():
    pair = builtin("p2_hyperplane")
    spec = InvariantSpec(pair, 1, gen(pair.ambient.basis, "lambda", 3),
                         relatives=(rel(pair, 2, "fund"), rel(pair, 1, "fund")))
    assert raw_dimension(spec) == 10
    assert expected_dimension(spec) == 8


def test_deep_blowup_pair_admissible():
    pair = builtin("p4blow2_hyperplane")
    X = pair.ambient
    spec = InvariantSpec(pair, 0, gen(X.basis, "lambda", 2),
                         absolutes=(absins(X, "pt"), absins(X, "pt"),
                                    absins(X, "pi"), absins(X, "pi"),
                                    absins(X, "pi")),
                         relatives=(rel(pair, 1, "lambda"), rel(pair, 1, "fund")))
    assert raw_dimension(spec) == 18
    assert expected_dimension(spec) == 0
    assert is_admissible(spec)


def test_degree_one_through_divisor_point():
    pair = builtin("p1_point")
    spec = InvariantSpec(pair, 0, gen(pair.ambient.basis, "fund"),
                         relatives=(rel(pair, 1, "pt"),))
    assert raw_dimension(spec) == 1
    assert expected_dimension(spec) == 0


def test_negative_contact_is_defined_zero():
    pair = builtin("s2xs2_antidiag")
    spec = InvariantSpec(pair, 0, gen(pair.ambient.basis, "a1"),
                         absolutes=(absins(pair.ambient, "pt"),))
    with pytest.raises(DefinedZero) as err:
        raw_dimension(spec)
    assert "-1" in err.value.reason


def test_contact_orders_must_sum_to_degree():
    pair = builtin("p2_hyperplane")
    spec = InvariantSpec(pair, 0, gen(pair.ambient.basis, "lambda", 2),
                         relatives=(rel(pair, 1, "pt"),))
    with pytest.raises(InvariantError):
        raw_dimension(spec)


def test_codim_examples():
    pair = builtin("p2_hyperplane")
    assert constraint_codim(rel(pair, 1, "fund"), 2) == 1
    assert constraint_codim(rel(pair, 2, "pt"), 2) == 2
    assert constraint_codim(absins(pair.ambient, "pt", desc=1), 2) == 3
    assert constraint_codim(absins(pair.ambient, "fund"), 2) == 0


def test_insertion_validation():
    p2 = builtin("p2")
    with pytest.raises(InvariantError):
        Insertion(gen(p2.basis, "pt"), order=0)
    with pytest.raises(InvariantError):
        Insertion(gen(p2.basis, "pt"), order=1, descendents=1)
    with pytest.raises(InvariantError):
        Insertion(cls(p2.basis, {}))
    # mixed-grade classes never get as far as an insertion
    with pytest.raises(Exception):
        gen(p2.basis, "pt") + gen(p2.basis, "lambda")


def test_fiber_bubble_is_rigid():
    q = builtin("q_of:p2_hyperplane")
    db = q.base.divisor.basis
    fund, pt = gen(db, "fund"), gen(db, "pt")
    assert level_index(q, cls(db, {}), 2, [(1, fund), (1, fund)], [(2, pt)]) == 0


def test_section_bubble_with_interior_point():
    q = builtin("q_of:p2blow1_exc")
    db = q.base.divisor.basis
    interior = (Insertion(gen(q.total.basis, "pt")),)
    got = level_index(q, gen(db, "fund"), 0, [(1, gen(db, "fund"))], [],
                      interior=interior)
    assert got == 0


def test_section_component_with_plane_constraint():
    y = builtin("y_of:p4blow2_hyperplane")
    db = y.base.divisor.basis
    alpha = cls(db, {"lambda": 2, "eps1": -2, "eps2": -2})
    assert level_index(y, alpha, 1, [], [(1, gen(db, "pi"))]) == 0
    assert level_index(y, alpha, 1, [], [(1, gen(db, "eps1s"))]) == 0


def test_contacts_rejected_when_degree_negative():
    y = builtin("y_of:p4blow2_hyperplane")
    db = y.base.divisor.basis
    alpha = cls(db, {"lambda": 2, "eps1": -2, "eps2": -2})
    with pytest.raises(InvariantError):
        level_index(y, alpha, 1, [(1, gen(db, "pt"))], [(1, gen(db, "pi"))])


def test_contact_multiplicities_checked():
    q = builtin("q_of:p2_hyperplane")
    db = q.base.divisor.basis
    with pytest.raises(InvariantError):
        level_index(q, cls(db, {}), 2, [(1, gen(db, "fund"))],
                    [(2, gen(db, "pt"))])


def _random_contacts(rng, deg, names, db):
    if deg < 0:
        return []
    out = []
    left = deg
    while left:
        m = rng.randint(1, left)
        out.append((m, gen(db, rng.choice(names))))
        left -= m
    return out


def test_projection_identity_grid():
    rng = random.Random(71)
    setups = ["q_of:p2_hyperplane", "q_of:p2blow1_exc", "q_of:p4blow2_hyperplane",
              "y_of:p4blow2_hyperplane", "y_of:t2_ruled_section"]
    checked = 0
    for name in setups:
        setup = builtin(name)
        D = setup.base.divisor
        curves = D.basis.names(1)
        all_names = list(D.basis.names())
        for _ in range(120):
            alpha = cls(D.basis, {g: rng.randint(-2, 2) for g in curves})
            d = rng.randint(0, 4)
            beta = setup.class_of(alpha, d)
            if beta.is_zero:
                continue
            deg0 = setup.total.intersect(beta, setup.dzero_class)
            degi = setup.total.intersect(beta, setup.dinf_class)
            zero = _random_contacts(rng, deg0, all_names, D.basis)
            inf = _random_contacts(rng, degi, all_names, D.basis)
            got = level_index(setup, alpha, d, zero, inf)
            contacts = len(zero) + len(inf)
            delta = sum(c.grade for _, c in zero + inf)
            want = projection_index(setup.total.n, D.c1(alpha), contacts, delta)
            assert got == want
            checked += 1
    assert checked > 300


def test_fundamental_contacts_cost_one_each():
    pair = builtin("p2_hyperplane")
    X = pair.ambient
    rng = random.Random(3)
    for _ in range(40):
        k = rng.randint(0, 3)
        degree = rng.randint(1, 4)
        spec = InvariantSpec(pair, rng.randint(0, 2),
                             gen(X.basis, "lambda", degree),
                             absolutes=tuple(absins(X, rng.choice(["pt", "lambda", "fund"]))
                                             for _ in range(k)),
                             relatives=tuple(rel(pair, 1, "fund")
                                             for _ in range(degree)))
        abs_cost = sum(constraint_codim(i, 2) for i in spec.absolutes)
        assert expected_dimension(spec) == raw_dimension(spec) - degree - abs_cost


def test_expected_dimension_permutation_invariant():
    pair = builtin("p4blow2_hyperplane")
    X = pair.ambient
    absolutes = [absins(X, "pt"), absins(X, "pi"), absins(X, "lambda", desc=1)]
    relatives = [rel(pair, 1, "lambda"), rel(pair, 1, "fund")]
    beta = gen(X.basis, "lambda", 2)
    specs = [InvariantSpec(pair, 0, beta, tuple(a), tuple(r))
             for a, r in [(absolutes, relatives),
                          (absolutes[::-1], relatives[::-1])]]
    assert expected_dimension(specs[0]) == expected_dimension(specs[1])
    assert specs[0].key() == specs[1].key()


def test_canonical_keys():
    p3 = builtin("p3")
    lam = gen(p3.basis, "lambda")
    spec = InvariantSpec(p3, 0, lam, tuple(absins(p3, "lambda") for _ in range(4)))
    assert spec.key() == "space:p3;g=0;b=lambda;abs=lambda,lambda,lambda,lambda"

    pair = builtin("p2_hyperplane")
    spec2 = InvariantSpec(pair, 0, gen(pair.ambient.basis, "lambda", 2),
                          absolutes=free_marks(pair.ambient, 2),
                          relatives=(rel(pair, 1, "fund"), rel(pair, 1, "pt")))
    assert spec2.key() == "pair:p2_hyperplane;g=0;b=2*lambda;abs=fund,fund;rel=(1,fund),(1,pt)"

    tagged = InvariantSpec(p3, 0, lam, (absins(p3, "lambda", desc=2),))
    assert "tau2:lambda" in tagged.key()


def test_main_stratum_index_equals_expected_dimension():
    pair = builtin("p2_hyperplane")
    spec = InvariantSpec(pair, 0, gen(pair.ambient.basis, "lambda", 2),
                         absolutes=free_marks(pair.ambient, 3),
                         relatives=(rel(pair, 2, "pt"),))
    got = component_index(n=2, genus=0, c1=6, marks=4, deg_inf=2, r_inf=1,
                          codims=2)
    assert got == expected_dimension(spec) == 6


def test_rubber_triple_keys_and_mirror():
    q = builtin("q_of:p2_hyperplane")
    db = q.base.divisor.basis
    fund, pt = gen(db, "fund"), gen(db, "pt")
    r = RubberTriple(q, 0, cls(db, {}), 2,
                     zero=((1, fund), (1, fund)), inf=((2, pt),))
    assert r.key() == "rubber:p2_hyperplane;g=0;a=0;f=2;zero=(1,fund),(1,fund);inf=(2,pt)"
    m = r.mirrored()
    assert m.key() == "rubber:p2_hyperplane;g=0;a=0;f=2;zero=(2,pt);inf=(1,fund),(1,fund)"
    assert m.mirrored().key() == r.key()

    lifted = RubberTriple(q, 0, gen(db, "fund"), 2,
                          zero=((1, pt),), inf=((2, pt),))
    with pytest.raises(InvariantError):
        lifted.mirrored()


def test_rubber_contact_sums_checked():
    q = builtin("q_of:p2_hyperplane")
    db = q.base.divisor.basis
    with pytest.raises(InvariantError):
        RubberTriple(q, 0, cls(db, {}), 2, zero=((1, gen(db, "fund")),),
                     inf=((2, gen(db, "pt")),))
