"""
Line-oriented text formats: instances, packings, weighted (extended)
instances, multicoloured-clique inputs and tree decompositions.

All parsers report problems as MalformedInputError carrying the 1-based line
number. Serialisers always emit canonical form (sorted terminals and edges,
dense ids), so serialize(parse(text)) is idempotent.
"""

import hashlib
import logging
from typing import Iterable, Iterator, Optional, Sequence

from alpp.errors import MalformedInputError
from alpp.graph import (
    KINDS,
    ExtendedInstance,
    Graph,
    Instance,
    PathPacking,
    canonicalize,
    edge_key,
)

logger = logging.getLogger(__name__)


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def _ints(fields: Sequence[str], number: int, what: str) -> list[int]:
    try:
        values = [int(f) for f in fields]
    except ValueError:
        raise MalformedInputError(f"{what}: expected integers, got {' '.join(fields)}", number)
    if any(v < 0 for v in values):
        raise MalformedInputError(f"{what}: ids and counts must be non-negative", number)
    return values


def _dense_ids(n: int, used: Iterable[int], number: int) -> tuple[dict[int, int], Optional[tuple[int, ...]]]:
    """Map file ids onto 0..n-1.

    Files whose ids already fit below n keep them. Otherwise the distinct ids
    are renumbered in sorted order and any spare slots become isolated
    vertices labelled after the largest id.
    """
    used = sorted(set(used))
    if not used or used[-1] < n:
        return {v: v for v in used}, None
    if len(used) > n:
        raise MalformedInputError(
            f"{len(used)} distinct vertex ids but header declares n={n}", number
        )
    index = {v: i for i, v in enumerate(used)}
    spare = range(used[-1] + 1, used[-1] + 1 + n - len(used))
    return index, tuple(used) + tuple(spare)


def parse_instance(text: str) -> Instance:
    header = None
    terminals: list[tuple[int, int]] = []
    edges: list[tuple[int, int, int]] = []
    last = 0
    for number, fields in _lines(text):
        last = number
        tag = fields[0]
        if tag == "p":
            if header is not None:
                raise MalformedInputError("duplicate header", number)
            if len(fields) != 6 or fields[1] not in KINDS:
                raise MalformedInputError(
                    "header must be 'p alpp|sapp <n> <m> <k> <ell>'", number
                )
            header = (fields[1], *_ints(fields[2:], number, "header"))
        elif header is None:
            raise MalformedInputError(f"'{tag}' line before the header", number)
        elif tag == "t":
            if len(fields) != 2:
                raise MalformedInputError("terminal line must be 't <v>'", number)
            terminals.append((number, _ints(fields[1:], number, "terminal")[0]))
        elif tag == "e":
            if len(fields) != 3:
                raise MalformedInputError("edge line must be 'e <u> <v>'", number)
            u, v = _ints(fields[1:], number, "edge")
            edges.append((number, u, v))
        else:
            raise MalformedInputError(f"unknown line type '{tag}'", number)
    if header is None:
        raise MalformedInputError("missing 'p' header", last or 1)
    kind, n, m, k, ell = header
    if len(edges) != m:
        raise MalformedInputError(f"header declares {m} edges, found {len(edges)}", last)

    index, labels = _dense_ids(
        n, [v for _, v in terminals] + [x for _, u, v in edges for x in (u, v)], last
    )
    seen_terminals: set[int] = set()
    for number, v in terminals:
        if v in seen_terminals:
            raise MalformedInputError(f"terminal {v} listed twice", number)
        seen_terminals.add(v)
    seen_edges: set[tuple[int, int]] = set()
    dense_edges = []
    for number, u, v in edges:
        if u == v:
            raise MalformedInputError(f"self-loop at vertex {u}", number)
        key = edge_key(index[u], index[v])
        if key in seen_edges:
            raise MalformedInputError(f"duplicate edge {u}-{v}", number)
        seen_edges.add(key)
        dense_edges.append(key)
    if k < 1 or ell < 1:
        raise MalformedInputError("k and ell must be positive", 1)
    return Instance(
        graph=Graph.from_edges(n, dense_edges),
        terminals=frozenset(index[v] for v in seen_terminals),
        k=k,
        ell=ell,
        kind=kind,
        labels=labels,
    )


def serialize_instance(instance: Instance, comments: Sequence[str] = ()) -> str:
    g = instance.graph
    out = [f"# {c}" for c in comments]
    out.append(f"p {instance.kind} {g.n} {g.m} {instance.k} {instance.ell}")
    out.extend(f"t {a}" for a in instance.sorted_terminals)
    out.extend(f"e {u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"


def canonical_text(text: str) -> str:
    return serialize_instance(canonicalize(parse_instance(text)))


def instance_digest(instance: Instance) -> str:
    return hashlib.sha256(
        serialize_instance(canonicalize(instance)).encode("utf-8")
    ).hexdigest()


def serialize_packing(
    packing: Optional[PathPacking], decision: bool, instance: Optional[Instance] = None
) -> str:
    out = [f"decision {'yes' if decision else 'no'}"]
    for path in packing or ():
        names = (instance.label(v) if instance else v for v in path)
        out.append("path " + " ".join(str(v) for v in names))
    return "\n".join(out) + "\n"


def parse_packing(text: str, instance: Optional[Instance] = None) -> tuple[Optional[bool], PathPacking]:
    """Read `decision` / `path` lines; file labels are mapped back to dense ids."""
    index = None
    if instance is not None and instance.labels is not None:
        index = {label: v for v, label in enumerate(instance.labels)}
    decision = None
    paths = []
    for number, fields in _lines(text):
        if fields[0] == "decision":
            if len(fields) != 2 or fields[1] not in ("yes", "no"):
                raise MalformedInputError("decision line must be 'decision yes|no'", number)
            decision = fields[1] == "yes"
        elif fields[0] == "path":
            ids = _ints(fields[1:], number, "path")
            if index is not None:
                missing = [v for v in ids if v not in index]
                if missing:
                    raise MalformedInputError(f"unknown vertex {missing[0]}", number)
                ids = [index[v] for v in ids]
            paths.append(tuple(ids))
        else:
            raise MalformedInputError(f"unknown line type '{fields[0]}'", number)
    return decision, PathPacking(tuple(paths))


def parse_extended(text: str) -> ExtendedInstance:
    header = None
    edges: dict[tuple[int, int], int] = {}
    triples = []
    names: dict[int, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("# name "):
            parts = stripped.split(maxsplit=3)
            if len(parts) == 4 and parts[2].isdigit():
                names[int(parts[2])] = parts[3]
    for number, fields in _lines(text):
        tag = fields[0]
        if tag == "p":
            if len(fields) != 5 or fields[1] != "xalpp":
                raise MalformedInputError("header must be 'p xalpp <n> <m> <r>'", number)
            header = _ints(fields[2:], number, "header")
        elif header is None:
            raise MalformedInputError(f"'{tag}' line before the header", number)
        elif tag == "e":
            if len(fields) != 4:
                raise MalformedInputError("edge line must be 'e <u> <v> <w>'", number)
            u, v, w = _ints(fields[1:], number, "edge")
            if u == v:
                raise MalformedInputError(f"self-loop at vertex {u}", number)
            if not (u < header[0] and v < header[0]):
                raise MalformedInputError(f"edge {u}-{v} out of range", number)
            if w < 1:
                raise MalformedInputError("edge weights must be positive", number)
            if edge_key(u, v) in edges:
                raise MalformedInputError(f"duplicate edge {u}-{v}", number)
            edges[edge_key(u, v)] = w
        elif tag == "q":
            if len(fields) != 4:
                raise MalformedInputError("triple line must be 'q <s> <t> <len>'", number)
            triples.append(tuple(_ints(fields[1:], number, "triple")))
        else:
            raise MalformedInputError(f"unknown line type '{tag}'", number)
    if header is None:
        raise MalformedInputError("missing 'p xalpp' header", 1)
    n, m, r = header
    if len(edges) != m or len(triples) != r:
        raise MalformedInputError(
            f"header declares {m} edges / {r} triples, found {len(edges)} / {len(triples)}"
        )
    name_tuple = None
    if names:
        name_tuple = tuple(names.get(v, str(v)) for v in range(n))
    return ExtendedInstance(Graph.from_edges(n, edges), edges, tuple(triples), name_tuple)


def serialize_extended(x: ExtendedInstance, comments: Sequence[str] = ()) -> str:
    g = x.graph
    out = [f"# {c}" for c in comments]
    if x.names is not None:
        out.extend(f"# name {v} {x.names[v]}" for v in range(g.n))
    out.append(f"p xalpp {g.n} {g.m} {x.r}")
    out.extend(f"e {u} {v} {x.weights[(u, v)]}" for u, v in g.edges)
    out.extend(f"q {s} {t} {length}" for s, t, length in x.triples)
    return "\n".join(out) + "\n"


def parse_mcc(text: str):
    from alpp.reductions import McccInput

    header = None
    edges = []
    for number, fields in _lines(text):
        if fields[0] == "p":
            if len(fields) != 4 or fields[1] != "mcc":
                raise MalformedInputError("header must be 'p mcc <k> <n>'", number)
            header = _ints(fields[2:], number, "header")
        elif header is None:
            raise MalformedInputError(f"'{fields[0]}' line before the header", number)
        elif fields[0] == "e":
            if len(fields) != 5:
                raise MalformedInputError("edge line must be 'e <c1> <j1> <c2> <j2>'", number)
            c1, j1, c2, j2 = _ints(fields[1:], number, "edge")
            edges.append(((c1, j1), (c2, j2)))
        else:
            raise MalformedInputError(f"unknown line type '{fields[0]}'", number)
    if header is None:
        raise MalformedInputError("missing 'p mcc' header", 1)
    try:
        return McccInput(k=header[0], n=header[1], edges=tuple(edges))
    except ValueError as e:
        raise MalformedInputError(str(e))


def serialize_mcc(mcc) -> str:
    out = [f"p mcc {mcc.k} {mcc.n}"]
    out.extend(f"e {c1} {j1} {c2} {j2}" for (c1, j1), (c2, j2) in mcc.edges)
    return "\n".join(out) + "\n"


def parse_td(text: str, instance: Optional[Instance] = None):
    """PACE-style decomposition: 's td <bags> <width+1> <n>', 'b <id> <v...>', tree edges."""
    from alpp.decomposition import TreeDecomposition

    index = None
    if instance is not None and instance.labels is not None:
        index = {label: v for v, label in enumerate(instance.labels)}
    header = None
    bags: dict[int, frozenset[int]] = {}
    tree_edges = []
    for number, fields in _lines(text):
        if fields[0] == "s":
            if len(fields) != 5 or fields[1] != "td":
                raise MalformedInputError("header must be 's td <bags> <width+1> <n>'", number)
            header = _ints(fields[2:], number, "header")
        elif header is None:
            raise MalformedInputError(f"'{fields[0]}' line before the header", number)
        elif fields[0] == "b":
            ids = _ints(fields[1:], number, "bag")
            if not ids or not 1 <= ids[0] <= header[0]:
                raise MalformedInputError("bag id out of range", number)
            vertices = ids[1:]
            if index is not None:
                if any(v not in index for v in vertices):
                    raise MalformedInputError("bag names an unknown vertex", number)
                vertices = [index[v] for v in vertices]
            bags[ids[0] - 1] = frozenset(vertices)
        else:
            ids = _ints(fields[1:] if fields[0] == "e" else fields, number, "tree edge")
            if len(ids) != 2 or not all(1 <= i <= header[0] for i in ids):
                raise MalformedInputError("tree edge must name two bag ids", number)
            tree_edges.append((ids[0] - 1, ids[1] - 1))
    if header is None:
        raise MalformedInputError("missing 's td' header", 1)
    if len(bags) != header[0]:
        raise MalformedInputError(f"header declares {header[0]} bags, found {len(bags)}")
    return TreeDecomposition(
        bags=tuple(bags[i] for i in range(header[0])),
        tree_edges=tuple(tree_edges),
    )


def serialize_td(td, n: int, instance: Optional[Instance] = None) -> str:
    label = instance.label if instance is not None else (lambda v: v)
    out = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags, start=1):
        out.append(" ".join(["b", str(i)] + [str(label(v)) for v in sorted(bag)]))
    out.extend(f"e {i + 1} {j + 1}" for i, j in td.tree_edges)
    return "\n".join(out) + "\n"


__all__ = [
    "canonical_text",
    "instance_digest",
    "parse_extended",
    "parse_instance",
    "parse_mcc",
    "parse_packing",
    "parse_td",
    "serialize_extended",
    "serialize_instance",
    "serialize_mcc",
    "serialize_packing",
    "serialize_td",
]
