"""Sectioned text files declaring spaces, classes, counts and commands.

The format is line oriented.  A section starts with a bracketed header and
owns the indented-or-not `key = value` lines up to the next header:

    [space p4blow2]
    [divisor p4blow2_hyperplane in p4blow2]
    [class beta = 4*lambda - 2*eps1 - 2*eps2]
    [invariant main]
    genus = 0
    class = beta
    abs = pt, pt, pi@split, pi@split, pi@split
    [run decompose p4blow2_hyperplane main]

Blank lines and `#` comments are skipped; everything else must parse, and
every diagnostic carries the 1-based line and column it points at.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .dimension import Insertion, InvariantError, InvariantSpec
from .lattice import GradeError, HomologyClass, cls, gen
from .spaces import CatalogError, DivisorPair, Space, builtin
from .strata import Contact, LevelComponent, StratumType

__all__ = [
    "ScenarioError",
    "RunDirective",
    "Scenario",
    "parse_scenario",
    "serialize",
]


class ScenarioError(Exception):
    """Parse or resolution failure, pinned to a position in the text."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class RunDirective:
    command: str
    args: tuple[str, ...]
    line: int = field(compare=False, default=0)


@dataclass
class Scenario:
    """Everything a file declares, with all names resolved."""

    spaces: dict[str, Space] = field(default_factory=dict)
    pairs: dict[str, DivisorPair] = field(default_factory=dict)
    classes: dict[str, HomologyClass] = field(default_factory=dict)
    invariants: dict[str, InvariantSpec] = field(default_factory=dict)
    strata: dict[str, StratumType] = field(default_factory=dict)
    runs: tuple[RunDirective, ...] = ()

    def invariant(self, name: str) -> InvariantSpec:
        if name not in self.invariants:
            raise ScenarioError(f"unknown invariant {name!r}", 0)
        return self.invariants[name]


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_HEADER = re.compile(r"\[\s*(" + _NAME + r")((?:\s+[^\s\]]+)*)\s*\]\s*$")
_TERM = re.compile(
    r"\s*(?P<sign>[+-]?)\s*(?:(?P<num>\d+)(?P<frac>/\d+)?\s*\*\s*)?(?P<name>"
    + _NAME + r")")
_PLACES = ("X", "Y", "split")


def _split_list(text: str, base_col: int):
    """Comma-split with column tracking; parens shield nested commas."""
    items, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            items.append((text[start:i], base_col + start))
            start = i + 1
    items.append((text[start:], base_col + start))
    return [(s.strip(), col + len(s) - len(s.lstrip()))
            for s, col in items if s.strip()]


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.sc = Scenario()
        self.runs: list[RunDirective] = []
        # declaration order of spaces, and which one owns each class
        self.space_order: list[str] = []
        self.class_owner: dict[str, str] = {}
        self.current_space: str | None = None

    # -- lattice-level pieces ------------------------------------------

    def fail(self, message, line, col=1):
        raise ScenarioError(message, line, col)

    def parse_comb(self, basis, text, line, col) -> HomologyClass:
        """Integer combination of basis generators, e.g. 2*lambda - eps1."""
        pos, coeffs = 0, {}
        while pos < len(text):
            m = _TERM.match(text, pos)
            if not m:
                self.fail("expected a class term", line, col + pos)
            if m.group("frac"):
                self.fail("non-integer class coefficient "
                          f"{m.group('num')}{m.group('frac')}",
                          line, col + m.start("num"))
            name = m.group("name")
            if name not in basis.names():
                self.fail(f"unknown generator {name!r} in basis {basis.name}",
                          line, col + m.start("name"))
            k = int(m.group("num") or 1)
            if m.group("sign") == "-":
                k = -k
            if pos > 0 and not m.group("sign"):
                self.fail("missing + or - between terms", line, col + m.start())
            coeffs[name] = coeffs.get(name, 0) + k
            pos = m.end()
        if not coeffs:
            self.fail("empty class expression", line, col)
        try:
            return cls(basis, coeffs)
        except GradeError as e:
            self.fail(str(e), line, col)

    def resolve_class(self, space, text, line, col) -> HomologyClass:
        """A declared class name, a generator, or an inline combination."""
        if text in self.sc.classes:
            c = self.sc.classes[text]
            if c.basis is not space.basis:
                self.fail(f"class {text!r} lives in {c.basis.name}, "
                          f"not {space.basis.name}", line, col)
            return c
        return self.parse_comb(space.basis, text, line, col)

    def parse_insertion(self, space, text, line, col) -> Insertion:
        place = None
        at = text.rfind("@")
        if at >= 0 and "(" not in text[at:]:
            tag = text[at + 1:].strip()
            if tag not in _PLACES:
                self.fail(f"unknown placement {tag!r} (use X, Y or split)",
                          line, col + at + 1)
            place = tag
            text = text[:at].rstrip()
        desc = 0
        m = re.match(r"tau(\d+)\((.*)\)$", text)
        if m:
            desc = int(m.group(1))
            text = m.group(2).strip()
        pulled = False
        m = re.match(r"pull\((.*)\)$", text)
        if m:
            pulled = True
            text = m.group(1).strip()
        c = self.resolve_class(space, text, line, col)
        try:
            return Insertion(c, descendents=desc, pulled_back=pulled,
                             place=place)
        except InvariantError as e:
            self.fail(str(e), line, col)

    def parse_relative(self, divisor, text, line, col) -> Insertion:
        m = re.match(r"\(\s*(\d+)\s*,\s*(.*?)\s*\)$", text)
        if not m:
            self.fail("relative entries look like (order, class)", line, col)
        c = self.resolve_class(divisor, m.group(2), line, col + m.start(2))
        try:
            return Insertion(c, order=int(m.group(1)))
        except InvariantError as e:
            self.fail(str(e), line, col)

    def parse_contact(self, divisor, text, line, col) -> Contact:
        parts = text.split(":")
        if len(parts) not in (2, 3) or not parts[0].strip().isdigit():
            self.fail("contacts look like mult:node or mult:node:class",
                      line, col)
        constraint = None
        if len(parts) == 3:
            constraint = self.resolve_class(divisor, parts[2].strip(), line,
                                            col + len(parts[0]) + len(parts[1]) + 2)
        return Contact(parts[1].strip(), int(parts[0]), constraint)

    # -- catalog lookups -----------------------------------------------

    def lookup(self, kind, name, line, col):
        try:
            obj = builtin(name)
        except CatalogError:
            self.fail(f"unknown {kind} id {name!r}", line, col)
        if kind == "space" and not isinstance(obj, Space):
            self.fail(f"{name!r} is not a space id", line, col)
        if kind == "divisor" and not isinstance(obj, DivisorPair):
            self.fail(f"{name!r} is not a divisor pair id", line, col)
        return obj

    def named_space(self, name, line, col) -> Space:
        if name in self.sc.spaces:
            return self.sc.spaces[name]
        self.fail(f"unknown space {name!r} (declare it with [space ...])",
                  line, col)

    def named_pair(self, name, line, col) -> DivisorPair:
        if name in self.sc.pairs:
            return self.sc.pairs[name]
        obj = self.lookup("divisor", name, line, col)
        return obj

    def fresh(self, namespace, name, line, col):
        for held in (self.sc.spaces, self.sc.pairs, self.sc.classes,
                     self.sc.invariants, self.sc.strata):
            if name in held:
                self.fail(f"duplicate name {name!r}", line, col)

    # -- sections --------------------------------------------------------

    def parse(self) -> Scenario:
        i = 0
        while i < len(self.lines):
            raw = self.lines[i]
            text = raw.split("#", 1)[0].rstrip()
            if not text.strip():
                i += 1
                continue
            m = _HEADER.match(text.strip())
            if not m:
                self.fail("expected a [section] header",
                          i + 1, 1 + len(raw) - len(raw.lstrip()))
            kind, args, header_line = m.group(1), m.group(2).split(), i + 1
            body, i = self.collect_body(i + 1)
            handler = getattr(self, "section_" + kind, None)
            if handler is None:
                self.fail(f"unknown section kind {kind!r}", header_line, 2)
            handler(args, header_line, body)
        self.sc.runs = tuple(self.runs)
        return self.sc

    def collect_body(self, start):
        """Lines up to the next header; keeps (lineno, text) with comments cut."""
        body, i = [], start
        while i < len(self.lines):
            raw = self.lines[i]
            text = raw.split("#", 1)[0].rstrip()
            if text.strip().startswith("["):
                break
            if text.strip():
                body.append((i + 1, text.strip(),
                             1 + len(raw) - len(raw.lstrip())))
            i += 1
        return body, i

    def fields(self, body, allowed, line):
        out = {}
        for lineno, text, col in body:
            if "=" not in text:
                self.fail("expected key = value", lineno, col)
            key, value = text.split("=", 1)
            key = key.strip()
            if key not in allowed:
                self.fail(f"unknown field {key!r}", lineno, col)
            if key in out:
                self.fail(f"duplicate field {key!r}", lineno, col)
            vcol = col + text.index("=") + 1 + len(value) - len(value.lstrip())
            out[key] = (value.strip(), lineno, vcol)
        return out

    def section_space(self, args, line, body):
        if len(args) != 1:
            self.fail("usage: [space <catalog-id>]", line)
        if body:
            self.fail("[space] sections take no body", body[0][0], body[0][2])
        name = args[0]
        self.fresh("space", name, line, 2)
        self.sc.spaces[name] = self.lookup("space", name, line, 2)
        self.space_order.append(name)
        self.current_space = name

    def section_divisor(self, args, line, body):
        if len(args) != 3 or args[1] != "in":
            self.fail("usage: [divisor <pair-id> in <space>]", line)
        if body:
            self.fail("[divisor] sections take no body", body[0][0], body[0][2])
        name, ambient_name = args[0], args[2]
        self.fresh("divisor", name, line, 2)
        ambient = self.named_space(ambient_name, line, 2)
        pair = self.lookup("divisor", name, line, 2)
        if pair.ambient is not ambient:
            self.fail(f"pair {name!r} sits in {pair.ambient.name}, "
                      f"not {ambient_name}", line, 2)
        self.sc.pairs[name] = pair

    def section_class(self, args, line, body):
        if len(args) < 3 or args[1] != "=":
            self.fail("usage: [class <name> = <combination>]", line)
        if body:
            self.fail("[class] sections take no body", body[0][0], body[0][2])
        name = args[0]
        self.fresh("class", name, line, 2)
        if self.current_space is None:
            self.fail("declare a [space] before classes", line, 2)
        space = self.sc.spaces[self.current_space]
        raw = self.lines[line - 1].split("#", 1)[0]
        col = raw.index("=") + 2
        comb = raw[col - 1:].rsplit("]", 1)[0].strip()
        col += len(raw[col - 1:]) - len(raw[col - 1:].lstrip())
        c = self.parse_comb(space.basis, comb, line, col)
        self.sc.classes[name] = c
        self.class_owner[name] = self.current_space

    def section_invariant(self, args, line, body):
        if len(args) != 1:
            self.fail("usage: [invariant <name>]", line)
        name = args[0]
        self.fresh("invariant", name, line, 2)
        got = self.fields(body, ("space", "pair", "genus", "class", "abs",
                                 "rel", "connected"), line)
        if "space" in got and "pair" in got:
            self.fail("give space= or pair=, not both", got["pair"][1], 1)
        if "genus" not in got or "class" not in got:
            self.fail("invariants need genus= and class=", line, 1)

        if "pair" in got:
            value, lineno, col = got["pair"]
            target = self.named_pair(value, lineno, col)
            space = target.ambient
        elif "space" in got:
            value, lineno, col = got["space"]
            target = self.named_space(value, lineno, col)
            space = target
        else:
            # fall back to the space the named class was declared in
            cname = got["class"][0]
            owner = self.class_owner.get(cname, self.current_space)
            if owner is None:
                self.fail("no space in scope; add space= or pair=", line, 1)
            target = space = self.sc.spaces[owner]

        value, lineno, col = got["genus"]
        if not value.isdigit():
            self.fail("genus must be a non-negative integer", lineno, col)
        genus = int(value)

        value, lineno, col = got["class"]
        beta = self.resolve_class(space, value, lineno, col)

        absolutes = []
        if "abs" in got:
            value, lineno, col = got["abs"]
            for text, tcol in _split_list(value, col):
                absolutes.append(self.parse_insertion(space, text, lineno, tcol))

        relatives = []
        if "rel" in got:
            if "pair" not in got:
                self.fail("rel= needs a pair= target", got["rel"][1], got["rel"][2])
            value, lineno, col = got["rel"]
            for text, tcol in _split_list(value, col):
                relatives.append(
                    self.parse_relative(target.divisor, text, lineno, tcol))

        connected = True
        if "connected" in got:
            value, lineno, col = got["connected"]
            if value not in ("true", "false"):
                self.fail("connected must be true or false", lineno, col)
            connected = value == "true"

        try:
            spec = InvariantSpec(target, genus, beta, tuple(absolutes),
                                 tuple(relatives), connected)
        except InvariantError as e:
            self.fail(str(e), line, 1)
        self.sc.invariants[name] = spec

    def section_stratum(self, args, line, body):
        if len(args) != 1:
            self.fail("usage: [stratum <name>]", line)
        name = args[0]
        self.fresh("stratum", name, line, 2)

        pair = None
        comps: list[LevelComponent] = []
        matchings: list[tuple[str, str]] = []
        insertions: list[Insertion] = []
        nodes: set[str] = set()

        for lineno, text, col in body:
            if text.startswith("comp "):
                if pair is None:
                    self.fail("set pair= before components", lineno, col)
                comps.append(self.parse_component(pair, text[5:], lineno,
                                                  col + 5, nodes))
                continue
            if "=" not in text:
                self.fail("expected key = value", lineno, col)
            key, value = (s.strip() for s in text.split("=", 1))
            vcol = col + text.index("=") + 2
            if key == "pair":
                pair = self.named_pair(value, lineno, vcol)
            elif key == "match":
                for item, icol in _split_list(value, vcol):
                    if "->" not in item:
                        self.fail("matchings look like node->node", lineno, icol)
                    a, b = (s.strip() for s in item.split("->", 1))
                    for node in (a, b):
                        if node not in nodes:
                            self.fail(f"unknown node {node!r}", lineno, icol)
                    matchings.append((a, b))
            elif key == "abs":
                if pair is None:
                    self.fail("set pair= before abs", lineno, col)
                for item, icol in _split_list(value, vcol):
                    insertions.append(
                        self.parse_insertion(pair.ambient, item, lineno, icol))
            else:
                self.fail(f"unknown field {key!r}", lineno, col)

        if pair is None:
            self.fail("strata need a pair= line", line, 1)
        try:
            stratum = StratumType(pair, tuple(comps), tuple(matchings),
                                  tuple(insertions))
        except InvariantError as e:
            self.fail(str(e), line, 1)
        self.sc.strata[name] = stratum

    def parse_component(self, pair, text, lineno, col, nodes) -> LevelComponent:
        got = {}
        for chunk in text.split():
            if "=" not in chunk:
                self.fail("component fields look like key=value", lineno, col)
            key, value = chunk.split("=", 1)
            if key in got:
                self.fail(f"duplicate component field {key!r}", lineno, col)
            got[key] = value
        if "level" not in got or not got["level"].isdigit():
            self.fail("components need level=<int>", lineno, col)
        level = int(got["level"])
        genus = int(got.get("genus", "0"))

        def contacts(key):
            out = []
            for item, icol in _split_list(got.get(key, ""), col):
                c = self.parse_contact(pair.divisor, item, lineno, icol)
                if c.node in nodes:
                    self.fail(f"duplicate node {c.node!r}", lineno, icol)
                nodes.add(c.node)
                out.append(c)
            return tuple(out)

        zero, inf = contacts("zero"), contacts("inf")
        try:
            if level == 0:
                if "class" not in got:
                    self.fail("level-0 components need class=", lineno, col)
                c = self.resolve_class(pair.ambient, got["class"], lineno, col)
                return LevelComponent(0, genus, cls=c, zero=zero, inf=inf)
            if "alpha" not in got:
                self.fail("positive-level components need alpha=", lineno, col)
            if got["alpha"] == "0":
                alpha = cls(pair.divisor.basis, {})
            else:
                alpha = self.resolve_class(pair.divisor, got["alpha"],
                                           lineno, col)
            return LevelComponent(level, genus, alpha=alpha,
                                  fiber=int(got.get("fiber", "0")),
                                  zero=zero, inf=inf)
        except InvariantError as e:
            self.fail(str(e), lineno, col)

    def section_run(self, args, line, body):
        if body:
            self.fail("[run] sections take no body", body[0][0], body[0][2])
        if not args:
            self.fail("usage: [run <command> <args...>]", line)
        self.runs.append(RunDirective(args[0], tuple(args[1:]), line))


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario file; empty text gives an empty scenario."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# canonical text form


def _class_text(scenario: Scenario, c: HomologyClass) -> str:
    for name, known in scenario.classes.items():
        if known == c:
            return name
    return c.encode()


def _insertion_text(scenario: Scenario, ins: Insertion) -> str:
    text = _class_text(scenario, ins.cls)
    if ins.pulled_back:
        text = f"pull({text})"
    if ins.descendents:
        text = f"tau{ins.descendents}({text})"
    if ins.place is not None:
        text = f"{text}@{ins.place}"
    return text


def _contact_text(scenario: Scenario, c: Contact) -> str:
    if c.constraint is None:
        return f"{c.mult}:{c.node}"
    return f"{c.mult}:{c.node}:{_class_text(scenario, c.constraint)}"


def serialize(scenario: Scenario) -> str:
    """Canonical text that parses back to an equal scenario."""
    out: list[str] = []
    owners: dict[str, list[str]] = {}
    for name, c in scenario.classes.items():
        for sname, space in scenario.spaces.items():
            if space.basis is c.basis:
                owners.setdefault(sname, []).append(name)
                break

    for sname in scenario.spaces:
        out.append(f"[space {sname}]")
        for cname in owners.get(sname, ()):
            out.append(f"[class {cname} = {scenario.classes[cname].encode()}]")
    for pname, pair in scenario.pairs.items():
        out.append(f"[divisor {pname} in {pair.ambient.name}]")

    for iname, spec in scenario.invariants.items():
        out.append(f"[invariant {iname}]")
        if spec.pair is not None:
            out.append(f"pair = {spec.pair.name}")
        else:
            out.append(f"space = {spec.space.name}")
        out.append(f"genus = {spec.genus}")
        out.append(f"class = {_class_text(scenario, spec.beta)}")
        if spec.absolutes:
            out.append("abs = " + ", ".join(
                _insertion_text(scenario, a) for a in spec.absolutes))
        if spec.relatives:
            out.append("rel = " + ", ".join(
                f"({r.order},{_class_text(scenario, r.cls)})"
                for r in spec.relatives))
        if not spec.connected:
            out.append("connected = false")

    for sname, stratum in scenario.strata.items():
        out.append(f"[stratum {sname}]")
        out.append(f"pair = {stratum.pair.name}")
        for comp in stratum.components:
            bits = [f"level={comp.level}", f"genus={comp.genus}"]
            if comp.level == 0:
                bits.append(f"class={_class_text(scenario, comp.cls)}")
            else:
                alpha = ("0" if comp.alpha.is_zero
                         else _class_text(scenario, comp.alpha))
                bits.append(f"alpha={alpha}")
                if comp.fiber:
                    bits.append(f"fiber={comp.fiber}")
            for key, slots in (("zero", comp.zero), ("inf", comp.inf)):
                if slots:
                    bits.append(f"{key}=" + ",".join(
                        _contact_text(scenario, c) for c in slots))
            out.append("comp " + " ".join(bits))
        if stratum.matchings:
            out.append("match = " + ", ".join(
                f"{a}->{b}" for a, b in stratum.matchings))
        if stratum.insertions:
            out.append("abs = " + ", ".join(
                _insertion_text(scenario, a) for a in stratum.insertions))

    for directive in scenario.runs:
        out.append("[run " + " ".join((directive.command,) + directive.args)
                   + "]")
    return "\n".join(out) + ("\n" if out else "")
