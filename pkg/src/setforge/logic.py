"""First-order membership logic over extensional digraphs.

The language has two atom shapes, ``x in y`` and ``x = y``, the usual
connectives, and two quantifiers ranging over the nodes of a graph.
Formulas are plain frozen dataclasses; the evaluator compiles a formula
to nested closures once and then runs it against environments, which
keeps class definition over every node affordable.

Syntax accepted by :func:`parse`::

    formula := iff
    iff     := imp ("<->" iff)?
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "!" unary | ("exists" | "all") var "." formula | atom
    atom    := var "in" var | var "=" var | "(" formula ")"

Precedence, tightest first: !, &, |, ->, <->. A quantifier body extends
as far right as possible. The Unicode spellings ∈ ∀ ∃ ¬ ∧ ∨ → ↔ are
accepted on input only; the printer emits ASCII.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Union

from .errors import FormulaError, ParseError, UnknownNodeError
from .graph import ExtensionalDigraph, NodeId, extensionality_violation

Var = str


@dataclass(frozen=True)
class Member:
    left: Var
    right: Var


@dataclass(frozen=True)
class Equal:
    left: Var
    right: Var


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: Var
    body: "Formula"


Formula = Union[Member, Equal, Not, And, Or, Implies, Iff, Exists, ForAll]

_KEYWORDS = frozenset({"in", "exists", "all"})


def free_variables(f: Formula) -> frozenset[Var]:
    if isinstance(f, (Member, Equal)):
        return frozenset({f.left, f.right})
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Exists, ForAll)):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# parsing


_UNICODE_ALIASES = {
    "∈": "in",
    "∀": "all",
    "∃": "exists",
    "¬": "!",
    "∧": "&",
    "∨": "|",
    "→": "->",
    "↔": "<->",
}

_Token = tuple[str, str, int]  # kind, text, offset


def _tokenize(text: str) -> Iterator[_Token]:
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _UNICODE_ALIASES:
            alias = _UNICODE_ALIASES[c]
            yield (alias, alias, i)
            i += 1
            continue
        if text.startswith("<->", i):
            yield ("<->", "<->", i)
            i += 3
            continue
        if text.startswith("->", i):
            yield ("->", "->", i)
            i += 2
            continue
        if c in "()!&|=.":
            yield (c, c, i)
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                yield (word, word, i)
            else:
                yield ("name", word, i)
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    yield ("eof", "", n)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"expected {what}, got {tok[1] or 'end of input'!r}", tok[2])
        return self.take()

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek()[0] == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.or_()
        if self.peek()[0] == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def or_(self) -> Formula:
        node = self.and_()
        while self.peek()[0] == "|":
            self.take()
            node = Or(node, self.and_())
        return node

    def and_(self) -> Formula:
        node = self.unary()
        while self.peek()[0] == "&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        tok = self.peek()
        if tok[0] == "!":
            self.take()
            return Not(self.unary())
        if tok[0] in {"exists", "all"}:
            self.take()
            var = self.expect("name", "a variable name")[1]
            self.expect(".", "'.' after the bound variable")
            body = self.formula()
            return Exists(var, body) if tok[0] == "exists" else ForAll(var, body)
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok[0] == "(":
            self.take()
            inner = self.formula()
            closing = self.peek()
            if closing[0] != ")":
                raise ParseError("expected ')'", closing[2])
            self.take()
            return inner
        if tok[0] == "name":
            left = self.take()[1]
            op = self.peek()
            if op[0] == "in":
                self.take()
                right = self.expect("name", "a variable name")[1]
                return Member(left, right)
            if op[0] == "=":
                self.take()
                right = self.expect("name", "a variable name")[1]
                return Equal(left, right)
            raise ParseError("expected 'in' or '=' after a variable", op[2])
        raise ParseError(f"expected a formula, got {tok[1] or 'end of input'!r}", tok[2])


def parse(text: str) -> Formula:
    """Parse formula text. Offsets in errors are 0-based character positions."""
    parser = _Parser(text)
    out = parser.formula()
    trailing = parser.peek()
    if trailing[0] != "eof":
        raise ParseError(f"unexpected trailing input {trailing[1]!r}", trailing[2])
    return out


# ---------------------------------------------------------------------------
# printing


_PREC_IFF = 1
_PREC_IMP = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_NOT = 5
_PREC_ATOM = 6


def _print(f: Formula, parent: int) -> str:
    if isinstance(f, Member):
        return f"{f.left} in {f.right}"
    if isinstance(f, Equal):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        return "!" + _print(f.body, _PREC_NOT)
    if isinstance(f, (Exists, ForAll)):
        word = "exists" if isinstance(f, Exists) else "all"
        text = f"{word} {f.var}. {_print(f.body, 0)}"
        return f"({text})" if parent > 0 else text
    if isinstance(f, And):
        text = f"{_print(f.left, _PREC_AND)} & {_print(f.right, _PREC_AND + 1)}"
        mine = _PREC_AND
    elif isinstance(f, Or):
        text = f"{_print(f.left, _PREC_OR)} | {_print(f.right, _PREC_OR + 1)}"
        mine = _PREC_OR
    elif isinstance(f, Implies):
        text = f"{_print(f.left, _PREC_IMP + 1)} -> {_print(f.right, _PREC_IMP)}"
        mine = _PREC_IMP
    elif isinstance(f, Iff):
        text = f"{_print(f.left, _PREC_IFF + 1)} <-> {_print(f.right, _PREC_IFF)}"
        mine = _PREC_IFF
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if mine < parent else text


def print_formula(f: Formula) -> str:
    """Render ``f`` in the ASCII grammar; parse(print_formula(f)) == f."""
    return _print(f, 0)


# ---------------------------------------------------------------------------
# evaluation


_MISSING = object()


def _compile(
    f: Formula, nodes: list[NodeId], extensions: Mapping[NodeId, frozenset[NodeId]]
) -> Callable[[dict[Var, NodeId]], bool]:
    if isinstance(f, Member):
        left, right = f.left, f.right
        return lambda env: env[left] in extensions[env[right]]
    if isinstance(f, Equal):
        left, right = f.left, f.right
        return lambda env: env[left] == env[right]
    if isinstance(f, Not):
        body = _compile(f.body, nodes, extensions)
        return lambda env: not body(env)
    if isinstance(f, And):
        a = _compile(f.left, nodes, extensions)
        b = _compile(f.right, nodes, extensions)
        return lambda env: a(env) and b(env)
    if isinstance(f, Or):
        a = _compile(f.left, nodes, extensions)
        b = _compile(f.right, nodes, extensions)
        return lambda env: a(env) or b(env)
    if isinstance(f, Implies):
        a = _compile(f.left, nodes, extensions)
        b = _compile(f.right, nodes, extensions)
        return lambda env: not a(env) or b(env)
    if isinstance(f, Iff):
        a = _compile(f.left, nodes, extensions)
        b = _compile(f.right, nodes, extensions)
        return lambda env: a(env) is b(env)
    if isinstance(f, (Exists, ForAll)):
        body = _compile(f.body, nodes, extensions)
        var = f.var
        want = isinstance(f, Exists)

        def run(env: dict[Var, NodeId]) -> bool:
            prev = env.get(var, _MISSING)
            try:
                for node in nodes:
                    env[var] = node
                    if body(env) is want:
                        return want
                return not want
            finally:
                if prev is _MISSING:
                    env.pop(var, None)
                else:
                    env[var] = prev  # type: ignore[assignment]

        return run
    raise TypeError(f"not a formula: {f!r}")


def eval_formula(
    g: ExtensionalDigraph, f: Formula, env: Mapping[Var, NodeId] | None = None
) -> bool:
    """Evaluate ``f`` over the nodes of ``g``.

    Quantifiers enumerate nodes in sorted NodeId order, so witness
    search is deterministic. Every free variable must be bound to a
    node of the graph.
    """
    bound = dict(env or {})
    missing = sorted(free_variables(f) - bound.keys())
    if missing:
        raise FormulaError(f"unbound variable {missing[0]!r}")
    for var, node in bound.items():
        if node not in g.nodes:
            raise UnknownNodeError(f"binding {var}={node!r} names an unknown node")
    compiled = _compile(f, g.sorted_nodes(), g.extensions)
    return compiled(bound)


def define_class(g: ExtensionalDigraph, f: Formula) -> frozenset[NodeId]:
    """The set of nodes satisfying a formula with one free variable."""
    fv = sorted(free_variables(f))
    if len(fv) != 1:
        raise FormulaError(
            f"class definition needs exactly one free variable, got {fv or 'none'}"
        )
    var = fv[0]
    compiled = _compile(f, g.sorted_nodes(), g.extensions)
    env: dict[Var, NodeId] = {}
    selected = []
    for node in g.sorted_nodes():
        env[var] = node
        if compiled(env):
            selected.append(node)
    return frozenset(selected)


# ---------------------------------------------------------------------------
# axiom probes


AXIOM_NAMES = ("extensionality", "foundation_minimal", "infinity")


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of a structural axiom check.

    ``witness`` carries the offending node(s) on failure, or the found
    node when an existence claim holds.
    """

    axiom: str
    holds: bool
    witness: tuple[NodeId, ...]
    detail: str


def _check_extensionality(g: ExtensionalDigraph) -> AxiomReport:
    pair = extensionality_violation(g)
    if pair is None:
        return AxiomReport("extensionality", True, (), "all extensions distinct")
    x, y = pair
    return AxiomReport(
        "extensionality", False, pair, f"nodes {x!r} and {y!r} share an extension"
    )


def _check_foundation_minimal(g: ExtensionalDigraph) -> AxiomReport:
    for x in g.sorted_nodes():
        ext = g.extensions[x]
        if not ext:
            continue
        if not any(g.extensions[m].isdisjoint(ext) for m in ext):
            return AxiomReport(
                "foundation_minimal",
                False,
                (x,),
                f"every member of {x!r} meets its extension again",
            )
    return AxiomReport(
        "foundation_minimal", True, (), "every nonempty node has a minimal member"
    )


def _check_infinity(g: ExtensionalDigraph) -> AxiomReport:
    for i in g.sorted_nodes():
        members = g.extensions[i]
        if not any(not g.extensions[e] for e in members):
            continue
        closed = all(
            any(g.extensions[s] == g.extensions[x] | {x} for s in members)
            for x in members
        )
        if closed:
            return AxiomReport(
                "infinity", True, (i,), f"{i!r} contains an empty node and successors"
            )
    return AxiomReport(
        "infinity", False, (), "no node is successor-closed around an empty member"
    )


def check_axiom(g: ExtensionalDigraph, axiom: str) -> AxiomReport:
    """Run one structural axiom probe. See AXIOM_NAMES for valid names."""
    if axiom == "extensionality":
        return _check_extensionality(g)
    if axiom == "foundation_minimal":
        return _check_foundation_minimal(g)
    if axiom == "infinity":
        return _check_infinity(g)
    raise ValueError(f"unknown axiom {axiom!r}")


@dataclass(frozen=True)
class ComprehensionReport:
    node: NodeId
    subset: frozenset[NodeId]
    witness: NodeId | None

    @property
    def holds(self) -> bool:
        return self.witness is not None


def comprehension_instance(
    g: ExtensionalDigraph, x: NodeId, f: Formula
) -> ComprehensionReport:
    """Filter the members of ``x`` by a one-free-variable formula and
    look for a node representing the result."""
    if x not in g.nodes:
        raise UnknownNodeError(f"unknown node {x!r}")
    fv = sorted(free_variables(f))
    if len(fv) != 1:
        raise FormulaError(
            f"comprehension needs exactly one free variable, got {fv or 'none'}"
        )
    var = fv[0]
    compiled = _compile(f, g.sorted_nodes(), g.extensions)
    env: dict[Var, NodeId] = {}
    subset = set()
    for z in sorted(g.extensions[x]):
        env[var] = z
        if compiled(env):
            subset.add(z)
    wanted = frozenset(subset)
    witness = None
    for node in g.sorted_nodes():
        if g.extensions[node] == wanted:
            witness = node
            break
    return ComprehensionReport(node=x, subset=wanted, witness=witness)


# ---------------------------------------------------------------------------
# code-detection formulas


def _is_doubleton_of(setvar: Var, first: Var, second: Var) -> Formula:
    """b = {first, second} spelled out in raw membership."""
    z = "z" if setvar != "z" else "w"
    return ForAll(z, Iff(Member(z, setvar), Or(Equal(z, first), Equal(z, second))))


def quine_code_formula(var: Var = "p") -> Formula:
    """Selects p when some b other than p satisfies b = {p, b}.

    On a loop-coded graph this picks out exactly the guarded tuple
    nodes: the self-membership forces b to carry a self-loop, and the
    only self-looped nodes whose other member is p are p's codes.
    """
    return Exists(
        "b",
        And(_is_doubleton_of("b", "b", var), Not(Equal("b", var))),
    )


def chain_code_formula(bound: int, var: Var = "p") -> Formula:
    """Bounded unfolding of the descending-chain code shape.

    Selects p when nodes b_0 .. b_bound exist with b_j = {b_{j+1}, p}
    for every j below ``bound``. On a graph whose codes are chains of
    length L this keeps every guarded tuple node selected as long as
    bound < L (the chain itself provides the b_j); larger bounds run
    off the truncated end. The unfolding is coarser than the unbounded
    shape it approximates, so on small graphs other descending
    configurations can satisfy it as well.
    """
    if bound < 1:
        raise ValueError("unfolding bound must be at least 1")
    names = [f"b{j}" for j in range(bound + 1)]
    body: Formula | None = None
    for j in range(bound):
        clause = _is_doubleton_of(names[j], names[j + 1], var)
        body = clause if body is None else And(body, clause)
    assert body is not None
    out = body
    for name in reversed(names):
        out = Exists(name, out)
    return out
