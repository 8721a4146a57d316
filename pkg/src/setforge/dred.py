"""Depth/rank certificates for Foundation over extensional digraphs.

A Dred is a graph plus a depth map and a finite family of partial rank
maps.  The four conditions checked by :func:`verify_dred`:

1. the graph is extensional;
2. along every edge, the member's depth exceeds the container's by at
   most one;
3. the same depth bound holds whenever one node's extension is included
   in another's;
4. for each carried index ``i``, the rank map ``r_i`` is defined on
   exactly the nodes of depth below ``i`` and increases strictly along
   every edge inside that domain.

The carried family must reach ``i = max depth + 1`` (``coverage``), so
every node lies in the domain of the top rank map.  That is what makes
:func:`foundation_witness` total: for any node with members, rank
minimality hands back a member disjoint from it, which is exactly the
Foundation axiom's witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .completion import Budget, DEFAULT_BUDGET, LeveledUniverse, deficiency
from .errors import BudgetExceededError, DredConditionError, SetforgeError
from .graph import Deficiency, ExtensionalDigraph, NodeId, extensionality_violation, subset_node_id


@dataclass(frozen=True)
class Dred:
    """An extensional digraph with depth and partial rank annotations.

    ``ranks`` maps each carried index ``i`` to a map defined on the
    nodes of depth strictly below ``i``.  Treat all three fields as
    immutable.
    """

    graph: ExtensionalDigraph
    depth: dict[NodeId, int]
    ranks: dict[int, dict[NodeId, int]]

    def max_depth(self) -> int:
        return max(self.depth.values(), default=0)


@dataclass(frozen=True)
class DredViolation:
    condition: str
    detail: str


@dataclass(frozen=True)
class DredReport:
    violations: tuple[DredViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary_lines(self) -> list[str]:
        if self.ok:
            return ["all DRED conditions hold"]
        return [f"{v.condition}: {v.detail}" for v in self.violations]


def verify_dred(h: Dred) -> DredReport:
    """Exhaustively check the DRED conditions, reporting every violation.

    Condition 3 is checked by enumerating subsets of each extension when
    that is cheap and falling back to a pairwise scan otherwise, so the
    work stays near-linear on completion outputs.
    """
    g = h.graph
    violations: list[DredViolation] = []
    nodes = g.sorted_nodes()

    pair = extensionality_violation(g)
    if pair is not None:
        violations.append(
            DredViolation("extensionality", f"nodes {pair[0]!r} and {pair[1]!r} share an extension")
        )

    for x in nodes:
        if x not in h.depth:
            violations.append(DredViolation("depth_domain", f"no depth for node {x!r}"))
        elif h.depth[x] < 0:
            violations.append(DredViolation("depth_domain", f"negative depth at {x!r}"))
    for x in h.depth:
        if x not in g.nodes:
            violations.append(DredViolation("depth_domain", f"depth given for unknown node {x!r}"))
    if any(v.condition == "depth_domain" for v in violations):
        return DredReport(tuple(violations))

    depth = h.depth
    for y in nodes:
        dy = depth[y]
        for z in sorted(g.extensions[y]):
            if depth[z] > dy + 1:
                violations.append(
                    DredViolation(
                        "edge_depth",
                        f"edge ({z!r}, {y!r}): depth {depth[z]} > {dy} + 1",
                    )
                )

    if pair is None:
        by_extension = {ext: x for x, ext in g.extensions.items()}
        n = len(nodes)
        for y in nodes:
            ext_y = sorted(g.extensions[y])
            bound = depth[y] + 1
            if (1 << len(ext_y)) <= max(64, 2 * n):
                for mask in range(1 << len(ext_y)):
                    subset = frozenset(ext_y[i] for i in range(len(ext_y)) if mask >> i & 1)
                    x = by_extension.get(subset)
                    if x is not None and depth[x] > bound:
                        violations.append(
                            DredViolation(
                                "subset_depth",
                                f"ext({x!r}) <= ext({y!r}) but depth {depth[x]} > {depth[y]} + 1",
                            )
                        )
            else:
                ext_set = g.extensions[y]
                for x in nodes:
                    if g.extensions[x] <= ext_set and depth[x] > bound:
                        violations.append(
                            DredViolation(
                                "subset_depth",
                                f"ext({x!r}) <= ext({y!r}) but depth {depth[x]} > {depth[y]} + 1",
                            )
                        )

    keys = sorted(h.ranks)
    needed = h.max_depth() + 1
    if any(k < 1 for k in keys):
        violations.append(DredViolation("rank_family", "rank indices must be positive"))
    elif keys != list(range(1, len(keys) + 1)):
        violations.append(
            DredViolation("rank_family", f"rank indices {keys} are not an initial segment 1..I")
        )
    elif not keys or keys[-1] < needed:
        violations.append(
            DredViolation(
                "rank_family",
                f"family stops at i={keys[-1] if keys else 0} but max depth {needed - 1} "
                f"requires coverage up to i={needed}",
            )
        )

    for i in keys:
        if i < 1:
            continue
        r = h.ranks[i]
        domain = {x for x in nodes if depth[x] < i}
        for x in sorted(domain - set(r)):
            violations.append(
                DredViolation("rank_domain", f"r_{i} undefined at {x!r} (depth {depth[x]} < {i})")
            )
        for x in sorted(set(r) - domain):
            violations.append(
                DredViolation(
                    "rank_domain",
                    f"r_{i} defined at {x!r} whose depth is not below {i}",
                )
            )
        for y in nodes:
            if y not in r:
                continue
            ry = r[y]
            for z in sorted(g.extensions[y]):
                if z in r and not r[z] < ry:
                    violations.append(
                        DredViolation(
                            "rank_increase",
                            f"r_{i}({z!r}) = {r[z]} not below r_{i}({y!r}) = {ry} along edge",
                        )
                    )
    return DredReport(tuple(violations))


def require_dred(h: Dred) -> None:
    report = verify_dred(h)
    if not report.ok:
        first = report.violations[0]
        raise DredConditionError(
            f"dred condition violated ({first.condition}): {first.detail}", report
        )


def bounded_deficiency(
    h: Dred,
    budget: Budget = DEFAULT_BUDGET,
    image: Callable[[NodeId], int] | None = None,
) -> list[tuple[NodeId, ...]]:
    """Deficiency restricted to subsets whose image is a finite set.

    ``image`` defaults to the depth map.  Materialising the image of a
    subset of a finite graph always yields a finite set, so on this
    carrier nothing is pruned and the result agrees with plain
    :func:`~setforge.completion.deficiency`; the enumeration still
    matters because it demands the image function be total on every
    candidate member.  An infinite carrier is where the restriction
    would start discarding subsets.
    """
    fn = image if image is not None else lambda x: h.depth[x]
    out = []
    for members in deficiency(h.graph, budget):
        for z in members:
            fn(z)
        out.append(members)
    return out


@dataclass(frozen=True)
class DredLeveledUniverse:
    """A leveled universe whose graph carries depth/rank annotations."""

    universe: LeveledUniverse
    depth: dict[NodeId, int]
    ranks: dict[int, dict[NodeId, int]]

    @property
    def graph(self) -> ExtensionalDigraph:
        return self.universe.graph

    @property
    def levels(self) -> tuple[frozenset[NodeId], ...]:
        return self.universe.levels

    def dred(self) -> Dred:
        return Dred(self.universe.graph, self.depth, self.ranks)

    def level_dred(self, n: int) -> Dred:
        """The Dred induced on ``levels[n]``.

        Depth and rank restrictions are plain dict restrictions because
        completion only appends annotations for new nodes.
        """
        level_graph = self.universe.level_graph(n)
        wanted = level_graph.nodes
        depth = {x: self.depth[x] for x in wanted}
        ranks = {i: {x: r[x] for x in r if x in wanted} for i, r in self.ranks.items()}
        return Dred(level_graph, depth, ranks)


def dred_complete(
    h: Dred,
    n: int,
    budget: Budget = DEFAULT_BUDGET,
) -> DredLeveledUniverse:
    """Iterate bounded-deficiency completion, propagating depth and rank.

    A node added for subset ``X`` gets depth ``max`` of its members'
    depths (0 for the empty set) and, for every carried index ``i``
    above that depth, rank ``max(r_i(member) + 1)`` (0 for the empty
    set).  The DRED conditions are re-verified after every step and a
    violation is surfaced as DredConditionError rather than assumed
    away; with these recipes no violation is expected, and the
    verification is the evidence.
    """
    if n < 0:
        raise ValueError("level count must be non-negative")
    require_dred(h)
    graph = h.graph
    depth = dict(h.depth)
    ranks = {i: dict(r) for i, r in h.ranks.items()}
    levels = (graph.nodes,)
    current = Dred(graph, depth, ranks)
    for _ in range(n):
        level = len(levels)
        additions = bounded_deficiency(current, budget)
        projected = len(current.graph.nodes) + len(additions)
        if projected > budget.max_nodes:
            raise BudgetExceededError(
                f"completion step would grow the graph to {projected} nodes, "
                f"over the budget of {budget.max_nodes}"
            )
        extensions = dict(current.graph.extensions)
        provenance = dict(current.graph.provenance)
        for members in additions:
            node = subset_node_id(members)
            if node in extensions:
                raise SetforgeError(
                    f"generated id {node!r} collides with an existing node of different extension"
                )
            extensions[node] = frozenset(members)
            provenance[node] = Deficiency(level=level, members=members)
            depth[node] = max((depth[m] for m in members), default=0)
            for i, r in ranks.items():
                if depth[node] < i:
                    r[node] = max((r[m] + 1 for m in members), default=0)
        graph = ExtensionalDigraph(frozenset(extensions), extensions, provenance)
        levels = levels + (graph.nodes,)
        current = Dred(graph, depth, ranks)
        require_dred(current)
    return DredLeveledUniverse(
        universe=LeveledUniverse(graph=graph, levels=levels),
        depth=depth,
        ranks=ranks,
    )


def foundation_witness(h: Dred, x: NodeId, *, skip_verify: bool = False) -> NodeId:
    """A member of ``x`` that shares no member with ``x``.

    Picks ``n`` one above the deepest member and returns the member of
    minimal ``r_n`` (ties broken by node id).  Any member of both ``x``
    and the witness would have strictly smaller ``r_n`` than the
    witness, contradicting minimality, so the returned node is
    E-minimal inside ``x``.

    Verifies the Dred first (pass ``skip_verify=True`` after an
    external :func:`verify_dred` run to amortise the gate).
    """
    if not skip_verify:
        require_dred(h)
    members = h.graph.extensions.get(x)
    if members is None:
        raise DredConditionError(f"unknown node {x!r}")
    if not members:
        raise ValueError(f"node {x!r} has empty extension; foundation needs a member")
    n = 1 + max(h.depth[m] for m in members)
    r = h.ranks.get(n)
    if r is None:
        raise DredConditionError(f"no rank family r_{n} to order the members of {x!r}")
    return min(members, key=lambda m: (r[m], m))


def dred_from_graph(g: ExtensionalDigraph) -> Dred:
    """Equip a well-founded graph with the trivial certificate: all
    depths zero and ``r_1`` the von Neumann rank.

    Fails with DredConditionError if the membership relation has a
    cycle, since no rank function can exist then.
    """
    rank: dict[NodeId, int] = {}
    pending = dict(g.extensions)
    while pending:
        progressed = False
        for x in sorted(pending):
            members = pending[x]
            if all(m in rank for m in members):
                rank[x] = max((rank[m] + 1 for m in members), default=0)
                del pending[x]
                progressed = True
        if not progressed:
            cyclic = sorted(pending)[0]
            raise DredConditionError(
                f"membership cycle through {cyclic!r}; no rank function exists"
            )
    return Dred(graph=g, depth={x: 0 for x in g.nodes}, ranks={1: rank})
