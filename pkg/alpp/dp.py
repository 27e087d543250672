"""
Dynamic program over a nice tree decomposition for ALPP.

A partial solution below a node is an edge set H whose components are paths;
every component either stays a single vertex or ends up as an (A, ell)-path.
A state describes H restricted to the bag:

    degs    degree in H of every bag vertex (sorted bag order)
    labels  component of every bag vertex, numbered by first occurrence
    blocks  per component: (A-vertices already forgotten, edge count lambda)
    edges   the H edges with both ends in the bag

and the table keeps the largest number kappa of completed (A, ell)-paths for
every state. In "subset" mode forgotten A-vertices are kept as a set, in
"counted" mode only their number is kept; both give the same maxima.
"""

import logging
from itertools import combinations
from typing import Optional

from alpp.decomposition import NiceTreeDecomposition, NodeKind
from alpp.errors import ContractViolation
from alpp.graph import Instance, PathPacking, SolveResult, edge_key, verify_packing

logger = logging.getLogger(__name__)

SUBSET = "subset"
COUNTED = "counted"
STATE_MODES = (SUBSET, COUNTED)


class _Context:
    def __init__(self, instance: Instance, mode: str):
        self.graph = instance.graph
        self.terminals = instance.terminals
        self.ell = instance.ell
        self.subset = mode == SUBSET

    def cap(self, v: int) -> int:
        return 1 if v in self.terminals else 2

    def forget_terminal(self, forgotten, v: int):
        return forgotten | {v} if self.subset else forgotten + 1

    def merge(self, parts):
        if self.subset:
            return frozenset().union(*parts)
        return sum(parts)

    def count(self, forgotten) -> int:
        return len(forgotten) if self.subset else forgotten

    def feasible(self, alpha: int, lam: int) -> bool:
        """A component with two A-vertices is a closed path and must have length ell."""
        if lam > self.ell or alpha > 2:
            return False
        return lam == 0 or (alpha == 2) == (lam == self.ell)


def _canonical(bag, degs, raw_labels, raw_blocks, edges):
    relabel: dict = {}
    labels = []
    for raw in raw_labels:
        if raw not in relabel:
            relabel[raw] = len(relabel)
        labels.append(relabel[raw])
    blocks = [None] * len(relabel)
    for raw, new in relabel.items():
        blocks[new] = raw_blocks[raw]
    return (tuple(degs), tuple(labels), tuple(blocks), frozenset(edges))


def _offer(table: dict, sig, kappa: int, back):
    if sig not in table or table[sig][0] < kappa:
        table[sig] = (kappa, back)


def _leaf() -> dict:
    return {((), (), (), frozenset()): (0, None)}


def _introduce(ctx: _Context, child: dict, child_bag: tuple, v: int) -> dict:
    bag = tuple(sorted(child_bag + (v,)))
    position = {u: i for i, u in enumerate(child_bag)}
    nbrs = [u for u in child_bag if ctx.graph.has_edge(u, v)]
    v_in_a = v in ctx.terminals
    table: dict = {}
    for sig, (kappa, _) in child.items():
        degs, labels, blocks, edges = sig
        open_nbrs = [u for u in nbrs if degs[position[u]] < ctx.cap(u)]
        for size in range(min(ctx.cap(v), len(open_nbrs)) + 1):
            for chosen in combinations(open_nbrs, size):
                merged = {labels[position[u]] for u in chosen}
                if len(merged) != size:
                    continue  # two neighbours on one path would close a cycle
                forgotten = ctx.merge([blocks[b][0] for b in merged])
                lam = sum(blocks[b][1] for b in merged) + size
                in_bag = sum(
                    1 for u in child_bag if u in ctx.terminals and labels[position[u]] in merged
                )
                if not ctx.feasible(ctx.count(forgotten) + in_bag + v_in_a, lam):
                    continue
                new_degs, raw_labels = [], []
                for u in bag:
                    if u == v:
                        new_degs.append(size)
                        raw_labels.append(-1)
                        continue
                    i = position[u]
                    new_degs.append(degs[i] + (u in chosen))
                    raw_labels.append(-1 if labels[i] in merged else labels[i])
                raw_blocks = dict(enumerate(blocks))
                raw_blocks[-1] = (forgotten, lam)
                new_edges = edges | {edge_key(u, v) for u in chosen}
                new_sig = _canonical(bag, new_degs, raw_labels, raw_blocks, new_edges)
                _offer(table, new_sig, kappa, (sig, chosen))
    return table


def _close(ctx: _Context, forgotten, lam: int) -> Optional[int]:
    """Completed paths gained when a component leaves the bag for good (None if invalid)."""
    if lam == 0:
        return 0
    if ctx.count(forgotten) == 2 and lam == ctx.ell:
        return 1
    return None


def _forget(ctx: _Context, child: dict, child_bag: tuple, v: int) -> dict:
    i = child_bag.index(v)
    bag = child_bag[:i] + child_bag[i + 1 :]
    v_in_a = v in ctx.terminals
    table: dict = {}
    for sig, (kappa, _) in child.items():
        degs, labels, blocks, edges = sig
        if not v_in_a and degs[i] == 1:
            continue  # a path ending outside A never becomes an (A, ell)-path
        label = labels[i]
        forgotten, lam = blocks[label]
        if v_in_a:
            forgotten = ctx.forget_terminal(forgotten, v)
        raw_blocks = dict(enumerate(blocks))
        gain = 0
        if label in labels[:i] + labels[i + 1 :]:
            raw_blocks[label] = (forgotten, lam)
        else:
            gain = _close(ctx, forgotten, lam)
            if gain is None:
                continue
        new_sig = _canonical(
            bag,
            degs[:i] + degs[i + 1 :],
            labels[:i] + labels[i + 1 :],
            raw_blocks,
            {e for e in edges if v not in e},
        )
        _offer(table, new_sig, kappa + gain, sig)
    return table


def _join(ctx: _Context, left: dict, right: dict, bag: tuple) -> dict:
    by_edges: dict = {}
    for sig in right:
        by_edges.setdefault(sig[3], []).append(sig)
    position = {u: i for i, u in enumerate(bag)}
    table: dict = {}
    for sig1, (kappa1, _) in left.items():
        degs1, labels1, blocks1, edges = sig1
        bag_degree = [0] * len(bag)
        for u, w in edges:
            bag_degree[position[u]] += 1
            bag_degree[position[w]] += 1
        for sig2 in by_edges.get(edges, ()):
            degs2, labels2, blocks2, _ = sig2
            degs = [a + b - c for a, b, c in zip(degs1, degs2, bag_degree)]
            if any(d > ctx.cap(u) for u, d in zip(bag, degs)):
                continue
            combined = _merge_components(ctx, bag, labels1, blocks1, labels2, blocks2, edges)
            if combined is None:
                continue
            raw_labels, raw_blocks = combined
            new_sig = _canonical(bag, degs, raw_labels, raw_blocks, edges)
            _offer(table, new_sig, kappa1 + right[sig2][0], (sig1, sig2))
    return table


def _merge_components(ctx, bag, labels1, blocks1, labels2, blocks2, edges):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for l1, l2 in zip(labels1, labels2):
        a, b = find((0, l1)), find((1, l2))
        if a != b:
            parent[a] = b
    groups: dict = {}
    for j, u in enumerate(bag):
        group = groups.setdefault(find((0, labels1[j])), {"members": set(), "sides": set()})
        group["members"].add(u)
        group["sides"].update({(0, labels1[j]), (1, labels2[j])})
    raw_labels = [find((0, l1)) for l1 in labels1]
    raw_blocks = {}
    for root, group in groups.items():
        members = group["members"]
        inner = sum(1 for u, w in edges if u in members)
        # union of two forests sharing `members` and `inner` edges is a tree
        # iff C1 + C2 + inner = |members| + 1
        if len(group["sides"]) + inner != len(members) + 1:
            return None
        parts = [(blocks1 if side == 0 else blocks2)[label] for side, label in group["sides"]]
        forgotten = ctx.merge([p[0] for p in parts])
        lam = sum(p[1] for p in parts) - inner
        alpha = ctx.count(forgotten) + sum(1 for u in members if u in ctx.terminals)
        if not ctx.feasible(alpha, lam):
            return None
        raw_blocks[root] = (forgotten, lam)
    return raw_labels, raw_blocks


def _root_value(ctx: _Context, bag: tuple, sig) -> Optional[int]:
    """Completed paths when every remaining bag vertex is forgotten at the root."""
    degs, labels, blocks, _ = sig
    gain = 0
    for label, (forgotten, lam) in enumerate(blocks):
        members = [u for u, b in zip(bag, labels) if b == label]
        for u in members:
            if u in ctx.terminals:
                forgotten = ctx.forget_terminal(forgotten, u)
        closed = _close(ctx, forgotten, lam)
        if closed is None:
            return None
        gain += closed
    for u, d in zip(bag, degs):
        if u not in ctx.terminals and d == 1:
            return None
    return gain


def _signature_bound(instance: Instance, bag_size: int) -> int:
    a = len(instance.terminals)
    return ((a * a + a + 1) * (instance.ell + 1) * 3) ** bag_size


def _projection(ctx: _Context, bag: tuple, sig) -> tuple:
    degs, labels, blocks, _ = sig
    alpha = {}
    for label, (forgotten, _) in enumerate(blocks):
        inside = {u for u, b in zip(bag, labels) if b == label and u in ctx.terminals}
        alpha[label] = frozenset(forgotten) | inside
    return tuple((alpha[b], blocks[b][1], d) for b, d in zip(labels, degs))


def _extract_paths(instance: Instance, edges: set) -> list[tuple[int, ...]]:
    adjacency: dict[int, list[int]] = {}
    for u, v in edges:
        adjacency.setdefault(u, []).append(v)
        adjacency.setdefault(v, []).append(u)
    paths = []
    seen: set[int] = set()
    for a in sorted(adjacency):
        if a in seen or len(adjacency[a]) != 1:
            continue
        path = [a]
        seen.add(a)
        while True:
            step = [w for w in adjacency[path[-1]] if w not in seen]
            if not step:
                break
            seen.add(step[0])
            path.append(step[0])
        paths.append(tuple(path))
    return paths


def solve_dp(
    instance: Instance, ntd: NiceTreeDecomposition, state_mode: str = SUBSET
) -> SolveResult:
    """Maximum number of disjoint (A, ell)-paths by DP over `ntd`."""
    if state_mode not in STATE_MODES:
        raise ValueError(f"unknown state mode {state_mode!r}")
    if instance.ell >= instance.n:
        return SolveResult(False, stats={"dp_nodes": 0}, maximum=0, algorithm="dp")
    ntd.validate(instance.graph)
    ctx = _Context(instance, state_mode)

    tables: list[dict] = []
    bags = [tuple(sorted(node.bag)) for node in ntd.nodes]
    total_states = 0
    largest = 0
    for i, node in enumerate(ntd.nodes):
        if node.kind is NodeKind.LEAF:
            table = _leaf()
        elif node.kind is NodeKind.INTRODUCE:
            (c,) = node.children
            table = _introduce(ctx, tables[c], bags[c], node.vertex)
        elif node.kind is NodeKind.FORGET:
            (c,) = node.children
            table = _forget(ctx, tables[c], bags[c], node.vertex)
        else:
            c1, c2 = node.children
            table = _join(ctx, tables[c1], tables[c2], bags[i])
        if ctx.subset and table:
            distinct = len({_projection(ctx, bags[i], sig) for sig in table})
            bound = _signature_bound(instance, len(bags[i]))
            if distinct > bound:
                raise ContractViolation(f"node {i}: {distinct} signatures exceed bound {bound}")
        tables.append(table)
        total_states += len(table)
        largest = max(largest, len(table))

    root = ntd.root
    best, best_sig = -1, None
    for sig, (kappa, _) in tables[root].items():
        gain = _root_value(ctx, bags[root], sig)
        if gain is not None and kappa + gain > best:
            best, best_sig = kappa + gain, sig
    stats = {
        "dp_nodes": len(ntd.nodes),
        "dp_states": total_states,
        "max_table": largest,
        "width": ntd.width,
    }
    if best_sig is None:
        raise ContractViolation("root table has no consistent state")

    chosen: set[tuple[int, int]] = set()
    stack = [(root, best_sig)]
    while stack:
        i, sig = stack.pop()
        node = ntd.nodes[i]
        back = tables[i][sig][1]
        if node.kind is NodeKind.INTRODUCE:
            child_sig, picked = back
            chosen.update(edge_key(u, node.vertex) for u in picked)
            stack.append((node.children[0], child_sig))
        elif node.kind is NodeKind.FORGET:
            stack.append((node.children[0], back))
        elif node.kind is NodeKind.JOIN:
            stack.append((node.children[0], back[0]))
            stack.append((node.children[1], back[1]))

    packing = PathPacking(tuple(_extract_paths(instance, chosen))).canonical()
    verdict = verify_packing(instance, packing, expected_count=best)
    if not verdict:
        raise ContractViolation(f"reconstructed packing is {verdict}")
    logger.debug(f"dp: maximum {best}, {total_states} states over {len(ntd.nodes)} nodes")
    decision = best >= instance.k
    witness = PathPacking(packing.paths[: instance.k]) if decision else None
    return SolveResult(decision, witness, stats, maximum=best, algorithm="dp")
