"""Deficiency completion of extensional digraphs.

One completion step finds every subset of the current node set that no
node represents (the *deficiency* of the graph) and adds a fresh node
for each, wired to exactly its members.  Iterating the step yields a
level-indexed universe in which, at matching level offsets, pairs,
unions, relative subsets and relative power sets of earlier nodes are
all represented; :func:`witness_report` checks those four clauses
directly.

Level sizes grow as a tower of exponentials (an extensional graph with
``k`` nodes represents exactly ``k`` of its ``2**k`` subsets, so the
next level has ``2**k`` nodes).  Every entry point therefore takes an
explicit :class:`Budget` and refuses, rather than attempts, infeasible
steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetExceededError, SetforgeError
from .graph import (
    Deficiency,
    ExtensionalDigraph,
    NodeId,
    require_extensional,
    subset_node_id,
)

DEFAULT_MAX_SUBSETS = 2**20
DEFAULT_MAX_NODES = 2**20


@dataclass(frozen=True)
class Budget:
    """Hard resource ceilings for completion-like enumeration.

    ``max_subsets_enumerated`` bounds ``2**n`` for a single step over an
    ``n``-node graph; ``max_nodes`` bounds the node count of any graph a
    step is allowed to produce.
    """

    max_nodes: int = DEFAULT_MAX_NODES
    max_subsets_enumerated: int = DEFAULT_MAX_SUBSETS

    def __post_init__(self) -> None:
        if self.max_nodes < 1 or self.max_subsets_enumerated < 1:
            raise ValueError("budget bounds must be positive")

    def subset_count_allowed(self, node_count: int) -> bool:
        """Whether enumerating all ``2**node_count`` subsets fits.

        Compared in the exponent to keep huge ``2**n`` values out of
        arithmetic entirely.
        """
        return node_count < self.max_subsets_enumerated.bit_length()


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class LeveledUniverse:
    """A graph together with the cumulative node set of every level.

    ``levels[n]`` is the node set after ``n`` completion steps;
    ``levels[0]`` is the seed.  ``seed_level_count`` records how many
    leading levels were present before any completion step ran (always 1
    for universes produced by :func:`complete`).
    """

    graph: ExtensionalDigraph
    levels: tuple[frozenset[NodeId], ...]
    seed_level_count: int = 1

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("a leveled universe needs at least one level")
        if self.levels[-1] != self.graph.nodes:
            raise ValueError("top level must equal the graph's node set")
        for lower, upper in zip(self.levels, self.levels[1:]):
            if not lower <= upper:
                raise ValueError("levels must be cumulative")

    @property
    def level_sizes(self) -> list[int]:
        return [len(level) for level in self.levels]

    def level_graph(self, n: int) -> ExtensionalDigraph:
        """The induced graph on ``levels[n]``.

        Because completion-created nodes only ever point at older nodes,
        the induced subgraph on a level is exactly the graph as it stood
        when that level was the top.
        """
        wanted = self.levels[n]
        return ExtensionalDigraph(
            nodes=wanted,
            extensions={x: self.graph.extensions[x] for x in wanted},
            provenance={x: self.graph.provenance[x] for x in wanted},
        )


def _deficiency_masks(g: ExtensionalDigraph, budget: Budget) -> tuple[list[NodeId], list[int]]:
    """All unrepresented subsets of ``g``'s nodes, as bitmasks over the
    sorted node list.  Masks come back in ascending numeric order."""
    require_extensional(g)
    nodes = g.sorted_nodes()
    n = len(nodes)
    if not budget.subset_count_allowed(n):
        raise BudgetExceededError(
            f"deficiency of a {n}-node graph needs 2**{n} subset enumerations, "
            f"over the budget of {budget.max_subsets_enumerated}"
        )
    index = {x: i for i, x in enumerate(nodes)}
    represented = set()
    for ext in g.extensions.values():
        mask = 0
        for m in ext:
            mask |= 1 << index[m]
        represented.add(mask)
    missing = [mask for mask in range(1 << n) if mask not in represented]
    return nodes, missing


def _mask_members(mask: int, nodes: list[NodeId]) -> tuple[NodeId, ...]:
    # nodes is sorted, and bits are consumed low to high, so the result
    # arrives already sorted by node id.
    members = []
    while mask:
        low = mask & -mask
        members.append(nodes[low.bit_length() - 1])
        mask ^= low
    return tuple(members)


def deficiency(g: ExtensionalDigraph, budget: Budget = DEFAULT_BUDGET) -> list[tuple[NodeId, ...]]:
    """Subsets of the node set that no node represents.

    Each subset is a sorted tuple of node ids and the list itself is in
    lexicographic order.  The empty graph yields ``[()]``: nothing
    represents the empty set.  Raises NonExtensionalError for
    non-extensional input and BudgetExceededError when ``2**n`` exceeds
    the subset budget.
    """
    nodes, masks = _deficiency_masks(g, budget)
    return sorted(_mask_members(m, nodes) for m in masks)


def complete_step(u: LeveledUniverse, budget: Budget = DEFAULT_BUDGET) -> LeveledUniverse:
    """Append one completion level: a fresh node per missing subset.

    New node ids are content-addressed from the member list, so the
    operation is deterministic and agrees across graphs that share
    subset nodes.  New nodes carry Deficiency provenance stamped with
    the new level index.
    """
    g = u.graph
    nodes, masks = _deficiency_masks(g, budget)
    projected = len(g.nodes) + len(masks)
    if projected > budget.max_nodes:
        raise BudgetExceededError(
            f"completion step would grow the graph to {projected} nodes, "
            f"over the budget of {budget.max_nodes}"
        )
    level = len(u.levels)
    extensions = dict(g.extensions)
    provenance = dict(g.provenance)
    for mask in masks:
        members = _mask_members(mask, nodes)
        node = subset_node_id(members)
        if node in extensions:
            raise SetforgeError(
                f"generated id {node!r} collides with an existing node of different extension"
            )
        extensions[node] = frozenset(members)
        provenance[node] = Deficiency(level=level, members=members)
    new_graph = ExtensionalDigraph(
        nodes=frozenset(extensions),
        extensions=extensions,
        provenance=provenance,
    )
    return LeveledUniverse(
        graph=new_graph,
        levels=u.levels + (new_graph.nodes,),
        seed_level_count=u.seed_level_count,
    )


def complete(
    g: ExtensionalDigraph,
    n: int,
    budget: Budget = DEFAULT_BUDGET,
) -> LeveledUniverse:
    """Run ``n`` completion steps starting from seed level ``g``.

    The result has ``n + 1`` levels.  Fails with BudgetExceededError as
    soon as any single step is infeasible; nothing is silently
    truncated.
    """
    if n < 0:
        raise ValueError("level count must be non-negative")
    require_extensional(g)
    u = LeveledUniverse(graph=g, levels=(g.nodes,))
    for _ in range(n):
        u = complete_step(u, budget)
    return u


def affordable_levels(seed_size: int, requested: int, budget: Budget = DEFAULT_BUDGET) -> int:
    """How many completion steps of an extensional ``seed_size``-node
    graph the budget permits, capped at ``requested``.

    Uses the exact growth law for extensional graphs (next size is
    ``2**size``), so the answer matches what :func:`complete` would
    survive.
    """
    size = seed_size
    steps = 0
    while steps < requested:
        # Both guards compare in the exponent so no huge integers are built.
        if not budget.subset_count_allowed(size) or size >= budget.max_nodes.bit_length():
            break
        size = 2**size
        steps += 1
    return steps


@dataclass(frozen=True)
class WitnessFailure:
    level: int
    clause: str
    detail: str


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of the pairing/union/subsets/power-set clause checks.

    ``checked`` lists every (level, clause) combination that was
    checkable given the universe's height; ``failures`` the ones that
    did not hold, with a concrete counterexample each.
    """

    checked: tuple[tuple[int, str], ...]
    failures: tuple[WitnessFailure, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary_lines(self) -> list[str]:
        lines = []
        failed = {(f.level, f.clause): f for f in self.failures}
        for level, clause in self.checked:
            f = failed.get((level, clause))
            status = f"FAIL ({f.detail})" if f else "pass"
            lines.append(f"level {level} {clause}: {status}")
        return lines


def witness_report(u: LeveledUniverse) -> WitnessReport:
    """Check the four finite model-construction clauses on a universe.

    For each level ``n`` where the needed higher level exists:

    * pairing: every (unordered, possibly equal) pair from level ``n``
      is some node of level ``n+1``;
    * union: the union of the members' extensions of each level-``n``
      node is represented at level ``n+1``;
    * subsets: every subset of a level-``n`` node's extension is
      represented at level ``n+1``;
    * power set: the set of *all* subset-representatives of a level-``n``
      node is represented at level ``n+2``.

    Requires at least three levels, otherwise no clause is checkable at
    any level together with power set at the same offset discipline.
    """
    if len(u.levels) < 3:
        raise ValueError("witness_report needs a universe with at least 3 levels")
    g = u.graph
    by_extension: dict[frozenset[NodeId], NodeId] = {}
    for x, ext in g.extensions.items():
        by_extension[ext] = x

    checked: list[tuple[int, str]] = []
    failures: list[WitnessFailure] = []
    top = len(u.levels) - 1

    def represented_in(target: frozenset[NodeId], level: int) -> bool:
        node = by_extension.get(target)
        return node is not None and node in u.levels[level]

    for n in range(top):
        level_nodes = sorted(u.levels[n])
        checked.append((n, "pairing"))
        for i, x0 in enumerate(level_nodes):
            for x1 in level_nodes[i:]:
                if not represented_in(frozenset((x0, x1)), n + 1):
                    failures.append(
                        WitnessFailure(n, "pairing", f"pair {{{x0}, {x1}}} missing at level {n + 1}")
                    )
        checked.append((n, "union"))
        for x in level_nodes:
            union: set[NodeId] = set()
            for y in g.extensions[x]:
                union |= g.extensions[y]
            if not represented_in(frozenset(union), n + 1):
                failures.append(
                    WitnessFailure(n, "union", f"union of {x} missing at level {n + 1}")
                )
        checked.append((n, "subsets"))
        for x in level_nodes:
            ext = sorted(g.extensions[x])
            for mask in range(1 << len(ext)):
                subset = frozenset(ext[i] for i in range(len(ext)) if mask >> i & 1)
                if not represented_in(subset, n + 1):
                    failures.append(
                        WitnessFailure(
                            n,
                            "subsets",
                            f"subset {{{', '.join(sorted(subset))}}} of {x} missing at level {n + 1}",
                        )
                    )
        if n + 2 <= top:
            checked.append((n, "power_set"))
            for x in level_nodes:
                ext = g.extensions[x]
                representatives = frozenset(
                    z for z, zext in g.extensions.items() if zext <= ext
                )
                if not represented_in(representatives, n + 2):
                    failures.append(
                        WitnessFailure(n, "power_set", f"power set of {x} missing at level {n + 2}")
                    )
    return WitnessReport(checked=tuple(checked), failures=tuple(failures))
