"""Built-in catalog of target spaces, divisor pairs, ruled models and fiber sums.

Every catalog object is immutable and constructed once; `builtin(name)` is the
single entry point.  Parametric ids use prefixes: `y_of:<pair>` (section-at-
infinity P1-bundle over the divisor), `q_of:<pair>` (the dual-twist bundle used
for neck levels), `fibersum_of:<pair>` (the pair glued to its ruled model).
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import (GradedBasis, HomologyClass, IntersectionForm, LatticeError,
                      LatticeMap, LinearFunctional, ProductTable, cls, gen)


class CatalogError(Exception):
    pass


class EffectiveModel:
    """Connected-effectivity data for a space.

    `is_effective` answers for a single connected curve; sums of effective
    classes are handled by the enumerators, not here.
    """

    def __init__(self, basis: GradedBasis, area: LinearFunctional,
                 missable: frozenset[str] = frozenset(),
                 exceptional: frozenset[str] = frozenset()):
        self.basis = basis
        self.area = area
        self.missable = missable
        self.exceptional = exceptional

    def is_effective(self, c: HomologyClass) -> bool:
        raise NotImplementedError

    def min_genus(self, c: HomologyClass) -> int:
        return 0

    def is_isolated(self, c: HomologyClass) -> bool:
        return False

    def classes(self, max_area: int) -> list[HomologyClass]:
        out = [c for c in self._candidates(max_area)
               if self.is_effective(c) and 0 < self.area(c) <= max_area]
        out.sort(key=lambda c: (self.area(c), c.encode()))
        return out

    def _candidates(self, max_area: int):
        raise NotImplementedError

    def in_missable(self, c: HomologyClass) -> bool:
        return bool(self.missable) and all(n in self.missable for n, _ in c.coeffs)

    def has_exceptional_support(self, c: HomologyClass) -> bool:
        return any(n in self.exceptional for n, _ in c.coeffs)


class _LineModel(EffectiveModel):
    """Single curve generator: effective classes are its positive multiples."""

    def __init__(self, basis, area, generator: str, min_g: int = 0, **kw):
        super().__init__(basis, area, **kw)
        self.generator = generator
        self._min_g = min_g

    def is_effective(self, c):
        return c.grade == 1 and set(n for n, _ in c.coeffs) == {self.generator} \
            and c.coeff(self.generator) > 0

    def min_genus(self, c):
        return self._min_g

    def _candidates(self, max_area):
        unit = self.area(gen(self.basis, self.generator))
        return [gen(self.basis, self.generator, d) for d in range(1, max_area // unit + 1)]


class _BlowOneModel(EffectiveModel):
    """Plane blown up at a point: d*lambda - m*eps with 0 <= m <= d, plus m*eps."""

    def is_effective(self, c):
        if c.grade != 1:
            return False
        d, m = c.coeff("lambda"), -c.coeff("eps")
        if d > 0:
            return 0 <= m <= d
        return d == 0 and m < 0  # pure exceptional multiples m*eps, m > 0

    def is_isolated(self, c):
        return c.coeff("lambda") == 0 and c.coeff("eps") > 0

    def _candidates(self, max_area):
        # effective d*lambda - m*eps has area 3d - m >= 2d, so d <= area / 2
        out = []
        for d in range(0, max_area // 2 + 2):
            for m in range(-max_area, max_area + 1):
                if d == 0 and m >= 0:
                    continue
                out.append(cls(self.basis, {"lambda": d, "eps": -m}))
        return out


class _BlowTwoModel(EffectiveModel):
    """Two-point blowups (used for both the 3- and 4-dimensional catalog spaces).

    Connected branches: s*lambda - m1*eps1 - m2*eps2 with s > 0 and either
    m1 = m2 = s or m1, m2 >= 0, m1 + m2 <= s; pure exceptional m*eps_j, m > 0.
    """

    def is_effective(self, c):
        if c.grade != 1:
            return False
        s = c.coeff("lambda")
        m1, m2 = -c.coeff("eps1"), -c.coeff("eps2")
        if s > 0:
            return (m1 == m2 == s) or (m1 >= 0 and m2 >= 0 and m1 + m2 <= s)
        if s == 0:
            return (m1 < 0 and m2 == 0) or (m2 < 0 and m1 == 0)
        return False

    def is_isolated(self, c):
        s = c.coeff("lambda")
        m1, m2 = -c.coeff("eps1"), -c.coeff("eps2")
        if s == 0:
            return True  # exceptional multiples live inside one exceptional locus
        return s > 0 and m1 == m2 == s  # covers of the rigid line through both points

    def _candidates(self, max_area):
        # the (s, s, s) classes have area lam*s - 2s, as low as s itself
        out = []
        for s in range(0, max_area + 2):
            for m1 in range(-max_area, s + 1):
                for m2 in range(-max_area, s + 1):
                    if s == 0 and (m1 >= 0 and m2 >= 0):
                        continue
                    out.append(cls(self.basis, {"lambda": s, "eps1": -m1, "eps2": -m2}))
        return out


class _RuledT2Model(EffectiveModel):
    """Degree-1 ruled surface over the torus: m*f (spheres) and s + m*f (tori)."""

    def is_effective(self, c):
        if c.grade != 1:
            return False
        m, k = c.coeff("f"), c.coeff("s")
        return (k == 0 and m > 0) or (k == 1 and m >= 0)

    def min_genus(self, c):
        return 1 if c.coeff("s") == 1 else 0

    def _candidates(self, max_area):
        out = [gen(self.basis, "f", m) for m in range(1, max_area + 1)]
        out += [cls(self.basis, {"s": 1, "f": m}) for m in range(0, max_area + 1)]
        return out


class _TorusBaseModel(EffectiveModel):
    """Curve classes in the torus itself: positive multiples of the base, genus 1."""

    def is_effective(self, c):
        return c.grade == 1 and c.coeff("fund") > 0

    def min_genus(self, c):
        return 1

    def _candidates(self, max_area):
        return [gen(self.basis, "fund", m) for m in range(1, max_area + 1)]


class _QuadricProductModel(EffectiveModel):
    def is_effective(self, c):
        if c.grade != 1:
            return False
        a, b = c.coeff("a1"), c.coeff("a2")
        if a >= 0 and b >= 0 and a + b > 0:
            return True
        return a == -b and a != 0 and a > 0  # antidiagonal spheres m*(a1 - a2)

    def _candidates(self, max_area):
        out = []
        for a in range(-max_area, max_area + 1):
            for b in range(-max_area, max_area + 1):
                if (a, b) != (0, 0):
                    out.append(cls(self.basis, {"a1": a, "a2": b}))
        return out


@dataclass(frozen=True)
class Space:
    name: str
    n: int
    basis: GradedBasis
    form: IntersectionForm
    c1: LinearFunctional
    area: LinearFunctional
    effective: EffectiveModel | None = None
    products: ProductTable | None = None

    def gen(self, name: str, k: int = 1) -> HomologyClass:
        return gen(self.basis, name, k)

    def cls(self, coeffs) -> HomologyClass:
        return cls(self.basis, coeffs)

    def zero(self) -> HomologyClass:
        return cls(self.basis, {})

    @property
    def point(self) -> HomologyClass:
        return gen(self.basis, self.basis.point)

    @property
    def fundamental(self) -> HomologyClass:
        return gen(self.basis, self.basis.fundamental)

    def intersect(self, a, b) -> int:
        return self.form.intersect(a, b)


@dataclass(frozen=True)
class RuledMeta:
    """Marks a divisor pair whose ambient space is a P1-bundle with the divisor
    as the section at infinity; `dzero_class` is the opposite section."""

    fiber: HomologyClass
    dzero_class: HomologyClass

    def fiber_degree(self, beta: HomologyClass) -> int | None:
        """ell if beta = ell * fiber, else None."""
        rest = beta - self.fiber.scale(_fiber_mult(beta, self.fiber))
        m = _fiber_mult(beta, self.fiber)
        return m if rest.is_zero else None


def _fiber_mult(beta: HomologyClass, fiber: HomologyClass) -> int:
    (fname, fc), = fiber.coeffs
    if fc != 1:
        raise CatalogError("fiber class must be a basis generator")
    return beta.coeff(fname)


@dataclass(frozen=True)
class DivisorPair:
    """A space with a chosen smooth divisor and the lattice data relating them."""

    name: str
    ambient: Space
    divisor: Space
    inclusion: LatticeMap          # curve classes of D -> curve classes of X
    push: LatticeMap | None        # all even grades of D -> X, grade-preserving
    divisor_class: HomologyClass   # in grade n-1 of X
    normal_degree: LinearFunctional  # degree of the normal bundle on D-curves
    ruled: RuledMeta | None = None

    def __post_init__(self):
        X, D = self.ambient, self.divisor
        if self.divisor_class.grade not in (None, X.n - 1):
            raise CatalogError(f"{self.name}: divisor class has wrong grade")
        for g in D.basis.names(1):
            a = gen(D.basis, g)
            nd = self.normal_degree(a)
            if X.intersect(self.inclusion(a), self.divisor_class) != nd:
                raise CatalogError(f"{self.name}: normal degree mismatch on {g}")
            if X.c1(self.inclusion(a)) != D.c1(a) + nd:
                raise CatalogError(f"{self.name}: adjunction mismatch on {g}")

    def contact_count(self, beta: HomologyClass) -> int:
        return self.ambient.intersect(beta, self.divisor_class)


@dataclass(frozen=True)
class RuledSetup:
    """P1-bundle over the divisor of `base`, with its two distinguished sections.

    `twist` is +1 for the model whose zero section has the original normal
    bundle (used in fiber sums) and -1 for the dual-twist model used for neck
    levels.
    """

    name: str
    base: DivisorPair
    total: Space
    twist: int
    fiber: HomologyClass
    lift: LatticeMap               # curve classes of D -> total, zero-section lift
    projection: LatticeMap         # curve classes of total -> D
    dzero_class: HomologyClass
    dinf_class: HomologyClass
    infinity_pair: DivisorPair | None = None

    def class_of(self, alpha: HomologyClass, ell: int) -> HomologyClass:
        return self.lift(alpha) + self.fiber.scale(ell)

    def c1_total(self, alpha: HomologyClass, ell: int) -> int:
        return self.total.c1(self.class_of(alpha, ell))


@dataclass(frozen=True)
class FiberSumSetup:
    """A pair (X, D) glued along D to its +1-twist ruled model (Y, D+).

    For every catalog pair the sum deforms back to X, so the glued total space
    is the ambient of the left pair.
    """

    name: str
    left: DivisorPair
    ruled: RuledSetup

    @property
    def total(self) -> Space:
        return self.left.ambient

    @property
    def right(self) -> DivisorPair:
        assert self.ruled.infinity_pair is not None
        return self.ruled.infinity_pair


def _functional(name, basis, values):
    return LinearFunctional(name, basis, tuple(values.items()))


def _basis(name, n, elements):
    return GradedBasis(name, n, tuple(elements))


def _form(basis, pairs):
    return IntersectionForm(basis, tuple(pairs))


def _space_pn(n: int) -> Space:
    names_by_n = {
        0: [("pt", 0)],
        1: [("pt", 0), ("fund", 1)],
        2: [("pt", 0), ("lambda", 1), ("fund", 2)],
        3: [("pt", 0), ("lambda", 1), ("pi", 2), ("fund", 3)],
        4: [("pt", 0), ("lambda", 1), ("pi", 2), ("h3", 3), ("fund", 4)],
    }
    b = _basis(f"p{n}", n, names_by_n[n])
    ordered = [e for e, _ in b.elements]
    pairs = []
    for i, e in enumerate(ordered):
        for f in ordered[i:]:
            if b.grade(e) + b.grade(f) == n:
                pairs.append((e, f, 1))
    form = _form(b, pairs)
    curve = "fund" if n == 1 else "lambda"
    c1 = _functional("c1", b, {} if n == 0 else {curve: n + 1})
    area = _functional("area", b, {} if n == 0 else {curve: 1})
    products = None
    if n >= 1:
        # h_a . h_b = h_{a+b-n} written on the named generators
        entries = []
        for e, _ in b.elements:
            for f, _ in b.elements:
                ge, gf = b.grade(e), b.grade(f)
                g = ge + gf - n
                if 0 <= g and ge < n and gf < n and e <= f:
                    target = [x for x, gx in b.elements if gx == g]
                    if target:
                        entries.append((e, f, gen(b, target[0])))
        products = ProductTable(b, tuple(entries))
    model = None
    if n >= 1:
        model = _LineModel(b, area, curve, missable=frozenset(e for e, _ in b.elements))
    return Space(f"p{n}", n, b, form, c1, area, model, products)


def _space_p2blow1() -> Space:
    b = _basis("p2blow1", 2, [("pt", 0), ("lambda", 1), ("eps", 1), ("fund", 2)])
    form = _form(b, [("pt", "fund", 1), ("lambda", "lambda", 1), ("eps", "eps", -1)])
    c1 = _functional("c1", b, {"lambda": 3, "eps": 1})
    area = _functional("area", b, {"lambda": 3, "eps": 1})
    model = _BlowOneModel(b, area, missable=frozenset({"pt", "lambda", "fund"}),
                          exceptional=frozenset({"eps"}))
    return Space("p2blow1", 2, b, form, c1, area, model)


def _space_p3blow2() -> Space:
    b = _basis("p3blow2", 3, [
        ("pt", 0), ("lambda", 1), ("eps1", 1), ("eps2", 1),
        ("pi", 2), ("eps1s", 2), ("eps2s", 2), ("fund", 3)])
    form = _form(b, [("pt", "fund", 1), ("lambda", "pi", 1),
                     ("eps1", "eps1s", 1), ("eps2", "eps2s", 1)])
    c1 = _functional("c1", b, {"lambda": 4, "eps1": 2, "eps2": 2})
    area = _functional("area", b, {"lambda": 3, "eps1": 1, "eps2": 1})
    model = _BlowTwoModel(b, area,
                          missable=frozenset({"pt", "lambda", "pi", "fund"}),
                          exceptional=frozenset({"eps1", "eps2", "eps1s", "eps2s"}))
    pt, lam = gen(b, "pt"), gen(b, "lambda")
    products = ProductTable(b, (
        ("pi", "pi", lam),
        ("pi", "lambda", pt),
        ("eps1", "eps1s", pt),
        ("eps2", "eps2s", pt),
        ("eps1s", "eps1s", gen(b, "eps1", -1)),
        ("eps2s", "eps2s", gen(b, "eps2", -1)),
        ("pi", "eps1s", cls(b, {})),
        ("pi", "eps2s", cls(b, {})),
        ("eps1s", "eps2s", cls(b, {})),
        ("lambda", "eps1s", cls(b, {})),
        ("lambda", "eps2s", cls(b, {})),
        ("pi", "eps1", cls(b, {})),
        ("pi", "eps2", cls(b, {})),
    ))
    return Space("p3blow2", 3, b, form, c1, area, model, products)


def _space_p4blow2() -> Space:
    b = _basis("p4blow2", 4, [
        ("pt", 0), ("lambda", 1), ("eps1", 1), ("eps2", 1),
        ("pi", 2), ("sig1", 2), ("sig2", 2),
        ("h", 3), ("e1", 3), ("e2", 3), ("fund", 4)])
    form = _form(b, [("pt", "fund", 1), ("lambda", "h", 1),
                     ("eps1", "e1", -1), ("eps2", "e2", -1),
                     ("pi", "pi", 1), ("sig1", "sig1", -1), ("sig2", "sig2", -1)])
    c1 = _functional("c1", b, {"lambda": 5, "eps1": 3, "eps2": 3})
    area = _functional("area", b, {"lambda": 3, "eps1": 1, "eps2": 1})
    model = _BlowTwoModel(b, area,
                          missable=frozenset({"pt", "lambda", "pi", "h", "fund"}),
                          exceptional=frozenset({"eps1", "eps2", "sig1", "sig2", "e1", "e2"}))
    return Space("p4blow2", 4, b, form, c1, area, model)


def _space_t2_ruled() -> Space:
    b = _basis("t2_ruled", 2, [("pt", 0), ("f", 1), ("s", 1), ("fund", 2)])
    form = _form(b, [("pt", "fund", 1), ("f", "s", 1), ("s", "s", -1)])
    c1 = _functional("c1", b, {"f": 2, "s": -1})
    area = _functional("area", b, {"f": 1, "s": 2})
    model = _RuledT2Model(b, area)
    return Space("t2_ruled", 2, b, form, c1, area, model)


def _space_t2_base() -> Space:
    b = _basis("t2_base", 1, [("pt", 0), ("fund", 1)])
    form = _form(b, [("pt", "fund", 1)])
    c1 = _functional("c1", b, {"fund": 0})
    area = _functional("area", b, {"fund": 1})
    model = _TorusBaseModel(b, area)
    return Space("t2_base", 1, b, form, c1, area, model, ProductTable(b, ()))


def _space_s2xs2() -> Space:
    b = _basis("s2xs2", 2, [("pt", 0), ("a1", 1), ("a2", 1), ("fund", 2)])
    form = _form(b, [("pt", "fund", 1), ("a1", "a2", 1)])
    c1 = _functional("c1", b, {"a1": 2, "a2": 2})
    area = _functional("area", b, {"a1": 1, "a2": 1})
    model = _QuadricProductModel(b, area)
    return Space("s2xs2", 2, b, form, c1, area, model)


def _space_antidiag() -> Space:
    b = _basis("antidiag_sphere", 1, [("pt", 0), ("fund", 1)])
    form = _form(b, [("pt", "fund", 1)])
    c1 = _functional("c1", b, {"fund": 2})
    area = _functional("area", b, {"fund": 2})
    return Space("antidiag_sphere", 1, b, form, c1, area,
                 _LineModel(b, area, "fund"), ProductTable(b, ()))


def _pair_pn(n: int, x: Space, d: Space) -> DivisorPair:
    bx, bd = x.basis, d.basis
    # one basis element per grade on both sides, matched by grade
    grade_images = {}
    for e, g in bd.elements:
        tgt = [f for f, gf in bx.elements if gf == g][0]
        grade_images[e] = gen(bx, tgt)
    push = LatticeMap("push", bd, bx, tuple(grade_images.items()))
    curves = tuple((e, grade_images[e]) for e in bd.names(1))
    incl = LatticeMap("incl", bd, bx, curves)
    divisor_class = gen(bx, [f for f, gf in bx.elements if gf == n - 1][0])
    nd = _functional("normal", bd, {e: 1 for e in bd.names(1)})
    return DivisorPair(f"p{n}_hyperplane" if n > 1 else "p1_point",
                       x, d, incl, push, divisor_class, nd)


def _build_ruled(pair: DivisorPair, twist: int, name: str) -> RuledSetup:
    D = pair.divisor
    X = pair.ambient
    n = X.n
    curve_names = D.basis.names(1)
    lift_names = {g: f"{g}_0" for g in curve_names}
    elements = [("pt", 0), ("f", 1)] + [(lift_names[g], 1) for g in curve_names]
    if n >= 3:
        elements += [("dzero", n - 1), ("dinf", n - 1)]
    elements += [("fund", n)]
    b = _basis(name, n, elements)

    nd = {g: pair.normal_degree(gen(D.basis, g)) for g in curve_names}
    pairs = [("pt", "fund", 1)]
    if n >= 3:
        pairs += [("f", "dzero", 1), ("f", "dinf", 1)]
        for g in curve_names:
            pairs += [(lift_names[g], "dzero", twist * nd[g]),
                      (lift_names[g], "dinf", 0)]
    else:
        for g in curve_names:
            pairs += [("f", lift_names[g], 1),
                      (lift_names[g], lift_names[g], twist * nd[g])]
    form = _form(b, pairs)

    c1_vals = {"f": 2}
    area_vals = {"f": 1}
    for g in curve_names:
        c1_vals[lift_names[g]] = D.c1(gen(D.basis, g)) + twist * nd[g]
        area_vals[lift_names[g]] = D.area(gen(D.basis, g))
    total = Space(name, n, b, form, _functional("c1", b, c1_vals),
                  _functional("area", b, area_vals))

    lift = LatticeMap("lift", D.basis, b,
                      tuple((g, gen(b, lift_names[g])) for g in curve_names))
    proj_images = [("f", cls(D.basis, {}))]
    proj_images += [(lift_names[g], gen(D.basis, g)) for g in curve_names]
    projection = LatticeMap("proj", b, D.basis, tuple(proj_images))

    if n >= 3:
        dzero = gen(b, "dzero")
        dinf = gen(b, "dinf")
    else:
        base = D.basis.names(1)[0]
        dzero = gen(b, lift_names[base])
        dinf = dzero - gen(b, "f").scale(twist * nd[base])

    infinity_pair = None
    if twist == +1:
        incl = LatticeMap("incl", D.basis, b, tuple(
            (g, gen(b, lift_names[g]) - gen(b, "f").scale(nd[g]))
            for g in curve_names))
        nplus = _functional("normal", D.basis, {g: -nd[g] for g in curve_names})
        infinity_pair = DivisorPair(
            name, total, D, incl, None, dinf, nplus,
            ruled=RuledMeta(gen(b, "f"), dzero))

    return RuledSetup(name, pair, total, twist, gen(b, "f"), lift, projection,
                      dzero, dinf, infinity_pair)


def _pair_p2blow1_exc(x: Space, d: Space) -> DivisorPair:
    bd, bx = d.basis, x.basis
    incl = LatticeMap("incl", bd, bx, (("fund", gen(bx, "eps")),))
    push = LatticeMap("push", bd, bx, (("pt", gen(bx, "pt")), ("fund", gen(bx, "eps"))))
    nd = _functional("normal", bd, {"fund": -1})
    return DivisorPair("p2blow1_exc", x, d, incl, push, gen(bx, "eps"), nd)


def _pair_p4blow2_hyperplane(x: Space, d: Space) -> DivisorPair:
    bd, bx = d.basis, x.basis
    dclass = cls(bx, {"h": 1, "e1": -1, "e2": -1})
    incl = LatticeMap("incl", bd, bx, (
        ("lambda", gen(bx, "lambda")), ("eps1", gen(bx, "eps1")),
        ("eps2", gen(bx, "eps2"))))
    push = LatticeMap("push", bd, bx, (
        ("pt", gen(bx, "pt")),
        ("lambda", gen(bx, "lambda")), ("eps1", gen(bx, "eps1")),
        ("eps2", gen(bx, "eps2")),
        ("pi", gen(bx, "pi")),
        ("eps1s", gen(bx, "sig1", -1)), ("eps2s", gen(bx, "sig2", -1)),
        ("fund", dclass)))
    nd = _functional("normal", bd, {"lambda": 1, "eps1": 1, "eps2": 1})
    return DivisorPair("p4blow2_hyperplane", x, d, incl, push, dclass, nd)


def _pair_t2_section(x: Space, d: Space) -> DivisorPair:
    bd, bx = d.basis, x.basis
    incl = LatticeMap("incl", bd, bx, (("fund", gen(bx, "s")),))
    push = LatticeMap("push", bd, bx, (("pt", gen(bx, "pt")), ("fund", gen(bx, "s"))))
    nd = _functional("normal", bd, {"fund": -1})
    meta = RuledMeta(gen(bx, "f"), cls(bx, {"s": 1, "f": 1}))
    return DivisorPair("t2_ruled_section", x, d, incl, push, gen(bx, "s"), nd, meta)


def _pair_s2xs2(x: Space, d: Space) -> DivisorPair:
    bd, bx = d.basis, x.basis
    dclass = cls(bx, {"a1": 1, "a2": -1})
    incl = LatticeMap("incl", bd, bx, (("fund", dclass),))
    push = LatticeMap("push", bd, bx, (("pt", gen(bx, "pt")), ("fund", dclass)))
    nd = _functional("normal", bd, {"fund": -2})
    return DivisorPair("s2xs2_antidiag", x, d, incl, push, dclass, nd)


_CACHE: dict[str, object] = {}

_ALIASES = {
    "pn:1": "p1", "pn:2": "p2", "pn:3": "p3", "pn:4": "p4",
    "p2blow1": "p2blow1", "p4blow2_with_hyperplane": "p4blow2_hyperplane",
    "ruled_t2_deg1": "t2_ruled_section",
}


def _normalize(name: str) -> str:
    key = name.strip().lower()
    key = key.replace("q_of(", "q_of:").replace("y_of(", "y_of:")
    key = key.replace("fibersum_of(", "fibersum_of:")
    key = key.rstrip(")")
    return _ALIASES.get(key, key)


def builtin(name: str):
    """Return a catalog Space, DivisorPair, RuledSetup or FiberSumSetup by id."""
    key = _normalize(name)
    if key in _CACHE:
        return _CACHE[key]
    obj = _build(key)
    _CACHE[key] = obj
    return obj


def _build(key: str):
    simple = {
        "p0": lambda: _space_pn(0),
        "p1": lambda: _space_pn(1),
        "p2": lambda: _space_pn(2),
        "p3": lambda: _space_pn(3),
        "p4": lambda: _space_pn(4),
        "p2blow1": _space_p2blow1,
        "p3blow2": _space_p3blow2,
        "p4blow2": _space_p4blow2,
        "t2_ruled": _space_t2_ruled,
        "t2_base": _space_t2_base,
        "s2xs2": _space_s2xs2,
        "antidiag_sphere": _space_antidiag,
    }
    if key in simple:
        return simple[key]()
    if key == "p1_point":
        return _pair_pn(1, builtin("p1"), builtin("p0"))
    if key in ("p2_hyperplane", "p3_hyperplane", "p4_hyperplane"):
        n = int(key[1])
        return _pair_pn(n, builtin(f"p{n}"), builtin(f"p{n-1}"))
    if key == "p2blow1_exc":
        return _pair_p2blow1_exc(builtin("p2blow1"), builtin("p1"))
    if key == "p4blow2_hyperplane":
        return _pair_p4blow2_hyperplane(builtin("p4blow2"), builtin("p3blow2"))
    if key == "t2_ruled_section":
        return _pair_t2_section(builtin("t2_ruled"), builtin("t2_base"))
    if key == "s2xs2_antidiag":
        return _pair_s2xs2(builtin("s2xs2"), builtin("antidiag_sphere"))
    if key.startswith("y_of:"):
        pair = builtin(key[len("y_of:"):])
        if not isinstance(pair, DivisorPair):
            raise CatalogError(f"{key}: base is not a divisor pair")
        return _build_ruled(pair, +1, key)
    if key.startswith("q_of:"):
        pair = builtin(key[len("q_of:"):])
        if not isinstance(pair, DivisorPair):
            raise CatalogError(f"{key}: base is not a divisor pair")
        return _build_ruled(pair, -1, key)
    if key.startswith("fibersum_of:"):
        pair = builtin(key[len("fibersum_of:"):])
        if not isinstance(pair, DivisorPair):
            raise CatalogError(f"{key}: base is not a divisor pair")
        ruled = builtin("y_of:" + pair.name)
        return FiberSumSetup(key, pair, ruled)
    raise CatalogError(f"unknown catalog id {key!r}")


def pair_registry() -> tuple[str, ...]:
    return ("p1_point", "p2_hyperplane", "p3_hyperplane", "p4_hyperplane",
            "p2blow1_exc", "p4blow2_hyperplane", "t2_ruled_section",
            "s2xs2_antidiag")
