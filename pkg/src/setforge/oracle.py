"""Independent reference path for checking completions.

Instead of enumerating missing subsets over node bitmasks the way the
completion engine does, this module decorates a graph into honest set
values (hereditarily finite sets over atoms and self-membered codes),
grows the value universe stage by stage with itertools, and converts
back. The two paths share no enumeration code, so agreement between
them is evidence, not an echo.

Values are interned: building the same set twice yields the same
object, and a collection whose members coincide with the membership
extension of an atom or a self-membered code collapses onto it. That
mirrors extensional identification and keeps "one value per extension"
true by construction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .completion import Budget, DEFAULT_BUDGET
from .errors import BudgetExceededError, DecorationError, SetforgeError
from .graph import (
    Code,
    Deficiency,
    ExtensionalDigraph,
    NodeId,
    Provenance,
    Seed,
    is_isomorphic,
    require_extensional,
)


@dataclass(frozen=True, eq=False)
class SetValue:
    """Base class; use the module constructors, never the classes."""

    key: str = field(init=False, default="")

    def __lt__(self, other: "SetValue") -> bool:
        return self.key < other.key


@dataclass(frozen=True, eq=False)
class Atom(SetValue):
    label: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "key", f"atom({self.label})")


@dataclass(frozen=True, eq=False)
class LoopCode(SetValue):
    """A value b with b = {b} ∪ rest; the label keeps distinct loops
    with equal rest distinct, exactly like atoms."""

    label: str
    rest: tuple[SetValue, ...]

    def __post_init__(self) -> None:
        inner = ",".join(m.key for m in self.rest)
        object.__setattr__(self, "key", f"loop({self.label};{inner})")


@dataclass(frozen=True, eq=False)
class Collection(SetValue):
    members: tuple[SetValue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "key", "{" + ",".join(m.key for m in self.members) + "}")


_registry: dict[str, SetValue] = {}


def _intern(value: SetValue) -> SetValue:
    return _registry.setdefault(value.key, value)


def atom(label: str) -> SetValue:
    return _intern(Atom(label=label))


def loop_code(label: str, rest: Iterable[SetValue] = ()) -> SetValue:
    ordered = tuple(sorted(set(rest), key=lambda v: v.key))
    return _intern(LoopCode(label=label, rest=ordered))


def collection(members: Iterable[SetValue]) -> SetValue:
    """The set of the given values, collapsed onto an existing atom or
    loop code when the member set equals that value's own extension."""
    unique = {v.key: v for v in members}
    ordered = tuple(sorted(unique.values(), key=lambda v: v.key))
    as_set = frozenset(ordered)
    for v in ordered:
        if not isinstance(v, Collection) and value_extension(v) == as_set:
            return v
    return _intern(Collection(members=ordered))


def value_extension(v: SetValue) -> frozenset[SetValue]:
    if isinstance(v, Atom):
        return frozenset({v})
    if isinstance(v, LoopCode):
        return frozenset({v, *v.rest})
    if isinstance(v, Collection):
        return frozenset(v.members)
    raise TypeError(f"not a set value: {v!r}")


def _stage_guard(count: int, budget: Budget, what: str) -> None:
    if not budget.subset_count_allowed(count):
        raise BudgetExceededError(
            f"{what} needs 2**{count} subset enumerations, over the budget "
            f"of {budget.max_subsets_enumerated}"
        )


def _one_stage(values: set[SetValue], budget: Budget, what: str) -> list[SetValue]:
    """All subsets of ``values`` not already represented by one of them,
    as fresh collection values, deterministically ordered."""
    _stage_guard(len(values), budget, what)
    represented = {value_extension(v) for v in values}
    snapshot = sorted(values, key=lambda v: v.key)
    fresh: list[SetValue] = []
    for size in range(len(snapshot) + 1):
        for combo in itertools.combinations(snapshot, size):
            if frozenset(combo) in represented:
                continue
            fresh.append(collection(combo))
    return fresh


def hf_universe(
    k: int, atoms: Iterable[str] = (), budget: Budget = DEFAULT_BUDGET
) -> frozenset[SetValue]:
    """The k-th stage of the hereditarily finite universe over atoms.

    Each stage keeps the previous values and adds every subset of them.
    Atom semantics make {a} collapse onto a, so duplicates never arise.
    Stages 5 and up are unreachable by size; with atoms the fourth
    already is, hence the tighter bound.
    """
    labels = list(atoms)
    if k < 0:
        raise ValueError("stage must be non-negative")
    limit = 3 if labels else 4
    if k > limit:
        raise ValueError(
            f"stage {k} with {len(labels)} atoms is out of reach by doubling; "
            f"the limit here is {limit}"
        )
    values: set[SetValue] = {atom(lbl) for lbl in labels}
    if len(values) != len(labels):
        raise ValueError("atom labels must be distinct")
    for stage in range(1, k + 1):
        values.update(_one_stage(values, budget, f"stage {stage}"))
    return frozenset(values)


def decorate(g: ExtensionalDigraph) -> dict[NodeId, SetValue]:
    """Read each node as the set value its memberships describe.

    A node with only a self-loop becomes an atom named by the node; a
    self-looped node with further members becomes a self-membered code
    value over its other members' values. Any membership cycle that is
    not a plain self-loop has no honest value and raises
    DecorationError.
    """
    done: dict[NodeId, SetValue] = {}
    in_progress: set[NodeId] = set()

    def visit(x: NodeId) -> SetValue:
        got = done.get(x)
        if got is not None:
            return got
        if x in in_progress:
            raise DecorationError(f"membership cycle through {x!r} is not a self-loop")
        in_progress.add(x)
        ext = g.extensions[x]
        if x in ext:
            others = tuple(visit(m) for m in sorted(ext - {x}))
            value = loop_code(x, others) if others else atom(x)
        else:
            value = collection(visit(m) for m in sorted(ext))
        in_progress.discard(x)
        done[x] = value
        return value

    for x in g.sorted_nodes():
        visit(x)
    return done


def _value_stage(v: SetValue, memo: dict[SetValue, int]) -> int:
    got = memo.get(v)
    if got is not None:
        return got
    if isinstance(v, Collection):
        out = 1 + max((_value_stage(m, memo) for m in v.members), default=0)
    else:
        out = 0
    memo[v] = out
    return out


def values_to_graph(values: Iterable[SetValue]) -> ExtensionalDigraph:
    """Render a membership-closed family of values as a digraph.

    Atoms keep their label as node id; everything else gets an id
    derived from its canonical text. Collections are stamped with the
    first universe stage that contains them, which is also the level a
    completion of the empty graph would create them at.
    """
    family = sorted(set(values), key=lambda v: v.key)
    family_set = frozenset(family)
    ids: dict[SetValue, NodeId] = {}
    for v in family:
        ids[v] = v.label if isinstance(v, Atom) else f"hf:{v.key}"
    extensions: dict[NodeId, frozenset[NodeId]] = {}
    provenance: dict[NodeId, Provenance] = {}
    stage_memo: dict[SetValue, int] = {}
    for v in family:
        members = value_extension(v)
        if not members <= family_set:
            raise ValueError(f"family is not membership-closed at {v.key}")
        extensions[ids[v]] = frozenset(ids[m] for m in members)
        if isinstance(v, Atom):
            provenance[ids[v]] = Seed(label=v.label)
        elif isinstance(v, LoopCode):
            provenance[ids[v]] = Code(kind="loop", detail=v.label)
        else:
            provenance[ids[v]] = Deficiency(
                level=_value_stage(v, stage_memo),
                members=tuple(sorted(extensions[ids[v]])),
            )
    return ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )


def oracle_complete(
    g: ExtensionalDigraph, n: int, budget: Budget = DEFAULT_BUDGET
) -> ExtensionalDigraph:
    """Reference completion: decorate, run n stages on values, convert back.

    Seed nodes keep their ids and provenance; stage-r additions are
    stamped like level-r completion nodes, so a correct completion of
    the same graph is label-preservingly isomorphic to the result.
    """
    if n < 0:
        raise ValueError("stage count must be non-negative")
    require_extensional(g)
    decoration = decorate(g)
    node_of: dict[SetValue, NodeId] = {}
    for x, v in decoration.items():
        if v in node_of:
            raise SetforgeError(
                f"decoration conflated {node_of[v]!r} and {x!r}; input was not extensional"
            )
        node_of[v] = x
    values: set[SetValue] = set(node_of)
    added_at: dict[SetValue, int] = {}
    for stage in range(1, n + 1):
        fresh = _one_stage(values, budget, f"stage {stage}")
        if len(values) + len(fresh) > budget.max_nodes:
            raise BudgetExceededError(
                f"completion step would grow the graph to "
                f"{len(values) + len(fresh)} nodes, over the budget of "
                f"{budget.max_nodes}"
            )
        for v in fresh:
            added_at[v] = stage
        values.update(fresh)

    ids: dict[SetValue, NodeId] = {}
    for v in sorted(values, key=lambda v: v.key):
        if v in node_of:
            ids[v] = node_of[v]
        else:
            candidate = f"hf:{v.key}"
            if candidate in g.nodes:
                raise SetforgeError(f"generated id {candidate!r} collides with a seed id")
            ids[v] = candidate
    extensions: dict[NodeId, frozenset[NodeId]] = {}
    provenance: dict[NodeId, Provenance] = {}
    for v, node in ids.items():
        extensions[node] = frozenset(ids[m] for m in value_extension(v))
        if v in node_of:
            provenance[node] = g.provenance[node]
        else:
            provenance[node] = Deficiency(
                level=added_at[v], members=tuple(sorted(extensions[node]))
            )
    return ExtensionalDigraph(
        nodes=frozenset(extensions), extensions=extensions, provenance=provenance
    )


@dataclass(frozen=True)
class ComparisonVerdict:
    isomorphic: bool
    detail: str


def _extension_size_histogram(g: ExtensionalDigraph) -> dict[int, int]:
    hist: dict[int, int] = {}
    for ext in g.extensions.values():
        hist[len(ext)] = hist.get(len(ext), 0) + 1
    return hist


def _level_histogram(g: ExtensionalDigraph) -> dict[object, int]:
    hist: dict[object, int] = {}
    for x in g.nodes:
        p = g.provenance[x]
        key: object
        if isinstance(p, Deficiency):
            key = ("deficiency", p.level)
        elif isinstance(p, Seed):
            key = "seed"
        else:
            key = ("code", p.kind)
        hist[key] = hist.get(key, 0) + 1
    return hist


def compare(a: ExtensionalDigraph, b: ExtensionalDigraph) -> ComparisonVerdict:
    """Isomorphism verdict with a distinguishing invariant on failure."""
    if is_isomorphic(a, b):
        return ComparisonVerdict(True, "isomorphic")
    probes = [
        ("node counts", lambda g: len(g.nodes)),
        ("edge counts", lambda g: len(g.edges)),
        (
            "self-loop counts",
            lambda g: sum(1 for x in g.nodes if x in g.extensions[x]),
        ),
        ("extension size histograms", _extension_size_histogram),
        ("provenance histograms", _level_histogram),
    ]
    for name, probe in probes:
        va, vb = probe(a), probe(b)
        if va != vb:
            return ComparisonVerdict(False, f"{name} differ: {va!r} vs {vb!r}")
    return ComparisonVerdict(False, "no label-preserving bijection exists")
