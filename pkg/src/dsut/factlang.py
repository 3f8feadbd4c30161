"""Reader and writer for ``.dsut`` fact files.

A fact file is a sequence of ground Prolog-style facts::

    object_(layer(3), component_(sql_server,1), type_('MySQL Server 5.6'), parameters_([])).
    connection_(layer(3), component_(web_server,1), component_(sql_server,1), parameters_([])).
    map_(layer(3), component_(web_server,1), component_(vserver,1), parameters_([])).
    requirement_(layer(3), component_(ss,_), component_(dns_server,_), parameters_([])).
    requirement_(layer(2), _, _).

Only the four fact names above are recognised. ``%`` starts a line comment.
The parser is a small hand-written recursive descent over a token stream; it
keeps line/column positions so every error points at the offending token.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from dsut.errors import ParseError, ShapeError

LAYERS = (1, 2, 3, 4)

_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'"}


# --------------------------------------------------------------------------
# Fact records
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class ComponentRef:
    """A ``(class, index)`` pair naming one component on some layer."""

    cls: str
    index: int

    def __str__(self) -> str:
        return f"({self.cls},{self.index})"


@dataclass(frozen=True)
class ComponentPattern:
    """Requirement endpoint: an exact component, a whole class, or anything.

    ``kind`` is one of ``"exact"``, ``"class_all"`` or ``"any"``.
    """

    kind: str
    cls: str | None = None
    index: int | None = None

    @classmethod
    def exact(cls, name: str, index: int) -> "ComponentPattern":
        return cls("exact", name, index)

    @classmethod
    def class_all(cls, name: str) -> "ComponentPattern":
        return cls("class_all", name)

    @classmethod
    def any(cls) -> "ComponentPattern":
        return cls("any")

    @property
    def is_any(self) -> bool:
        return self.kind == "any"

    def sort_key(self) -> tuple:
        return ({"any": 0, "class_all": 1, "exact": 2}[self.kind], self.cls or "", self.index or 0)

    def __str__(self) -> str:
        if self.kind == "any":
            return "_"
        if self.kind == "class_all":
            return f"({self.cls},_)"
        return f"({self.cls},{self.index})"


Position = tuple[int, int]


@dataclass(frozen=True)
class ObjectFact:
    layer: int
    ref: ComponentRef
    type_label: str | None
    params: tuple[str, ...] = ()
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ConnectionFact:
    layer: int
    a: ComponentRef
    b: ComponentRef
    params: tuple[str, ...] = ()
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class MapFact:
    layer: int
    upper: ComponentRef
    lower: ComponentRef
    params: tuple[str, ...] = ()
    pos: Position | None = field(default=None, compare=False)


@dataclass(frozen=True)
class RequirementFact:
    layer: int
    source: ComponentPattern
    target: ComponentPattern
    params: tuple[str, ...] = ()
    pos: Position | None = field(default=None, compare=False)


Fact = Union[ObjectFact, ConnectionFact, MapFact, RequirementFact]


def _object_key(f: ObjectFact):
    return (-f.layer, f.ref)


def _edge_key(f):
    ends = (f.a, f.b) if isinstance(f, ConnectionFact) else (f.upper, f.lower)
    return (-f.layer, *ends, f.params)


def _requirement_key(f: RequirementFact):
    return (-f.layer, f.source.sort_key(), f.target.sort_key(), f.params)


@dataclass(eq=False)
class FactSet:
    """Facts grouped by kind, each list in source order.

    Equality is structural and order-insensitive: two fact sets are equal
    when they hold the same facts (positions ignored), which is what makes
    ``parse(render(parse(x))) == parse(x)`` hold for unsorted input.
    """

    object_facts: list[ObjectFact] = field(default_factory=list)
    connection_facts: list[ConnectionFact] = field(default_factory=list)
    map_facts: list[MapFact] = field(default_factory=list)
    requirement_facts: list[RequirementFact] = field(default_factory=list)

    def add(self, fact: Fact) -> None:
        if isinstance(fact, ObjectFact):
            self.object_facts.append(fact)
        elif isinstance(fact, ConnectionFact):
            self.connection_facts.append(fact)
        elif isinstance(fact, MapFact):
            self.map_facts.append(fact)
        else:
            self.requirement_facts.append(fact)

    def extend(self, other: "FactSet") -> "FactSet":
        for fact in other:
            self.add(fact)
        return self

    def __iter__(self):
        yield from self.object_facts
        yield from self.connection_facts
        yield from self.map_facts
        yield from self.requirement_facts

    def __len__(self) -> int:
        return sum(1 for _ in self)

    def canonical(self) -> tuple:
        return (
            tuple(sorted(self.object_facts, key=_object_key)),
            tuple(sorted(self.connection_facts, key=_edge_key)),
            tuple(sorted(self.map_facts, key=_edge_key)),
            tuple(sorted(self.requirement_facts, key=_requirement_key)),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FactSet):
            return NotImplemented
        return self.canonical() == other.canonical()


# --------------------------------------------------------------------------
# Terms and tokens
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str
    quoted: bool
    pos: Position


@dataclass(frozen=True)
class Int:
    value: int
    pos: Position


@dataclass(frozen=True)
class Wildcard:
    pos: Position


@dataclass(frozen=True)
class ListTerm:
    items: tuple
    pos: Position


@dataclass(frozen=True)
class Compound:
    name: str
    args: tuple
    pos: Position


Term = Union[Atom, Int, Wildcard, ListTerm, Compound]


@dataclass(frozen=True)
class _Token:
    kind: str  # atom, quoted, int, wild, punct, eof
    text: str
    line: int
    col: int


_PUNCT = set("(),.[]")


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for ch in text[i : i + count]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += count

    while i < n:
        ch = text[i]
        if ch in " \t\r\n\f\v":
            advance(1)
        elif ch == "%":
            end = text.find("\n", i)
            advance((n if end < 0 else end) - i)
        elif ch in _PUNCT:
            tokens.append(_Token("punct", ch, line, col))
            advance(1)
        elif ch == "'":
            start_line, start_col = line, col
            j = i + 1
            chars = []
            while True:
                if j >= n:
                    raise ParseError("unterminated quoted atom", start_line, start_col)
                c = text[j]
                if c == "\\":
                    if j + 1 >= n:
                        raise ParseError("unterminated quoted atom", start_line, start_col)
                    chars.append(_ESCAPES.get(text[j + 1], text[j + 1]))
                    j += 2
                elif c == "'":
                    break
                else:
                    chars.append(c)
                    j += 1
            tokens.append(_Token("quoted", "".join(chars), start_line, start_col))
            advance(j + 1 - i)
        elif ch.isascii() and ch.isdigit():
            j = i
            while j < n and text[j].isascii() and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            advance(j - i)
        elif ch == "_":
            j = i + 1
            if j < n and (text[j].isascii() and (text[j].isalnum() or text[j] == "_")):
                raise ParseError("named variables are not supported; use '_'", line, col)
            tokens.append(_Token("wild", "_", line, col))
            advance(1)
        elif ch.isascii() and ch.islower():
            j = i
            while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("atom", text[i:j], line, col))
            advance(j - i)
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", tok.line, tok.col)
        return self.take()

    def facts(self) -> list[Compound]:
        out = []
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind != "atom":
                raise ParseError(f"expected a fact name, found {tok.text!r}", tok.line, tok.col)
            term = self.term()
            if not isinstance(term, Compound):
                raise ParseError("expected '(' after fact name", *_after(tok))
            self.expect(".")
            out.append(term)
        return out

    def args(self, close: str) -> tuple:
        items = [self.term()]
        while self.peek().kind == "punct" and self.peek().text == ",":
            self.take()
            items.append(self.term())
        self.expect(close)
        return tuple(items)

    def term(self) -> Term:
        tok = self.take()
        pos = (tok.line, tok.col)
        if tok.kind == "atom":
            nxt = self.peek()
            if nxt.kind == "punct" and nxt.text == "(":
                self.take()
                return Compound(tok.text, self.args(")"), pos)
            return Atom(tok.text, False, pos)
        if tok.kind == "quoted":
            return Atom(tok.text, True, pos)
        if tok.kind == "int":
            return Int(int(tok.text), pos)
        if tok.kind == "wild":
            return Wildcard(pos)
        if tok.kind == "punct" and tok.text == "[":
            nxt = self.peek()
            if nxt.kind == "punct" and nxt.text == "]":
                self.take()
                return ListTerm((), pos)
            return ListTerm(self.args("]"), pos)
        found = tok.text or "end of input"
        raise ParseError(f"expected a term, found {found!r}", tok.line, tok.col)


def _after(tok: _Token) -> Position:
    return (tok.line, tok.col + len(tok.text))


# --------------------------------------------------------------------------
# Shape checking
# --------------------------------------------------------------------------


def _shape(msg: str, term) -> ShapeError:
    return ShapeError(msg, *term.pos)


def _unwrap(term, name: str, arity: int) -> tuple:
    if not isinstance(term, Compound) or term.name != name or len(term.args) != arity:
        raise _shape(f"expected {name}/{arity}", term)
    return term.args


def _layer(term, *, check_range: bool = True) -> int:
    (value,) = _unwrap(term, "layer", 1)
    if not isinstance(value, Int):
        raise _shape("layer number must be an integer", value)
    if check_range and value.value not in LAYERS:
        raise _shape(f"layer {value.value} out of range 1..4", value)
    return value.value


def _component(term) -> ComponentRef:
    name, index = _unwrap(term, "component_", 2)
    if not isinstance(name, Atom) or name.quoted:
        raise _shape("component class must be a bare atom", name)
    if not isinstance(index, Int) or index.value < 1:
        raise _shape("component index must be a positive integer", index)
    return ComponentRef(name.name, index.value)


def _pattern(term) -> ComponentPattern:
    if isinstance(term, Wildcard):
        return ComponentPattern.any()
    name, index = _unwrap(term, "component_", 2)
    if not isinstance(name, Atom) or name.quoted:
        raise _shape("component class must be a bare atom", name)
    if isinstance(index, Wildcard):
        return ComponentPattern.class_all(name.name)
    if not isinstance(index, Int) or index.value < 1:
        raise _shape("component index must be a positive integer or '_'", index)
    return ComponentPattern.exact(name.name, index.value)


def _params(term) -> tuple[str, ...]:
    (lst,) = _unwrap(term, "parameters_", 1)
    if not isinstance(lst, ListTerm):
        raise _shape("parameters_ expects a list", lst)
    return tuple(term_text(t) for t in lst.items)


def _type_label(term) -> str | None:
    if not isinstance(term, Compound) or term.name != "type_":
        raise _shape("expected type_/1", term)
    (value,) = term.args
    if isinstance(value, ListTerm):
        if value.items:
            raise _shape("type_ list must be empty (virtual object)", value)
        return None
    if isinstance(value, Atom):
        return value.name
    raise _shape("type_ expects an atom, a quoted string or []", value)


def _object(term: Compound) -> ObjectFact:
    args = term.args
    if len(args) == 3:
        # nested variant: type_([], parameters_([])) nests the parameter list
        typ = args[2]
        if isinstance(typ, Compound) and typ.name == "type_" and len(typ.args) == 2:
            label = _type_label(Compound("type_", typ.args[:1], typ.pos))
            return ObjectFact(_layer(args[0]), _component(args[1]), label, _params(typ.args[1]), term.pos)
    if len(args) != 4:
        raise _shape("object_ expects (layer, component_, type_, parameters_)", term)
    return ObjectFact(
        _layer(args[0]), _component(args[1]), _type_label(args[2]), _params(args[3]), term.pos
    )


def _edge(term: Compound, cls):
    if len(term.args) != 4:
        raise _shape(f"{term.name} expects (layer, component_, component_, parameters_)", term)
    a = term.args
    return cls(_layer(a[0]), _component(a[1]), _component(a[2]), _params(a[3]), term.pos)


def _requirement(term: Compound) -> RequirementFact:
    a = term.args
    if len(a) not in (3, 4):
        raise _shape("requirement_ expects (layer, pattern, pattern[, parameters_])", term)
    params = _params(a[3]) if len(a) == 4 else ()
    # range is checked by validation (BAD_REQ_LAYER), not here
    return RequirementFact(_layer(a[0], check_range=False), _pattern(a[1]), _pattern(a[2]), params, term.pos)


_BUILDERS = {
    "object_": _object,
    "connection_": lambda t: _edge(t, ConnectionFact),
    "map_": lambda t: _edge(t, MapFact),
    "requirement_": _requirement,
}


def parse_facts(text: str) -> FactSet:
    """Parse fact-file text into a :class:`FactSet`.

    Raises :class:`ParseError` on syntax errors and :class:`ShapeError` when a
    fact's arguments do not fit its shape. Nothing is returned on failure.
    """
    facts = FactSet()
    for term in _Parser(text).facts():
        builder = _BUILDERS.get(term.name)
        if builder is None:
            raise _shape(f"unknown fact {term.name!r}", term)
        facts.add(builder(term))
    return facts


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------


def quote(text: str) -> str:
    body = text.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t")
    return f"'{body}'"


def atom_text(name: str) -> str:
    return name if _ATOM_RE.match(name) else quote(name)


def term_text(term: Term) -> str:
    """Canonical source text of a term; used to store opaque parameters."""
    if isinstance(term, Atom):
        return quote(term.name) if term.quoted else term.name
    if isinstance(term, Int):
        return str(term.value)
    if isinstance(term, Wildcard):
        return "_"
    if isinstance(term, ListTerm):
        return "[" + ", ".join(term_text(t) for t in term.items) + "]"
    return f"{term.name}(" + ", ".join(term_text(t) for t in term.args) + ")"


def _ref(ref: ComponentRef) -> str:
    return f"component_({ref.cls},{ref.index})"


def _pat(p: ComponentPattern) -> str:
    if p.kind == "any":
        return "_"
    if p.kind == "class_all":
        return f"component_({p.cls},_)"
    return f"component_({p.cls},{p.index})"


def _plist(params: Iterable[str]) -> str:
    return "parameters_([" + ", ".join(params) + "])"


def render_fact(fact: Fact) -> str:
    if isinstance(fact, ObjectFact):
        label = "[]" if fact.type_label is None else quote(fact.type_label)
        return f"object_(layer({fact.layer}), {_ref(fact.ref)}, type_({label}), {_plist(fact.params)})."
    if isinstance(fact, ConnectionFact):
        return f"connection_(layer({fact.layer}), {_ref(fact.a)}, {_ref(fact.b)}, {_plist(fact.params)})."
    if isinstance(fact, MapFact):
        return f"map_(layer({fact.layer}), {_ref(fact.upper)}, {_ref(fact.lower)}, {_plist(fact.params)})."
    head = f"requirement_(layer({fact.layer}), {_pat(fact.source)}, {_pat(fact.target)}"
    if fact.source.is_any and fact.target.is_any and not fact.params:
        return head + ")."
    return f"{head}, {_plist(fact.params)})."


def render_facts(facts: FactSet) -> str:
    """Canonical text: one fact per line, grouped by kind, sorted in each group."""
    lines = [render_fact(f) for group in facts.canonical() for f in group]
    return "".join(line + "\n" for line in lines)
