import pytest

from alpp.decomposition import TreeDecomposition
from alpp.errors import MalformedInputError
from alpp.formats import (
    canonical_text,
    instance_digest,
    parse_extended,
    parse_instance,
    parse_mcc,
    parse_packing,
    parse_td,
    serialize_extended,
    serialize_instance,
    serialize_mcc,
    serialize_packing,
    serialize_td,
)
from alpp.graph import SAPP, Graph, Instance, PathPacking

PATH4 = """\
# a path on four vertices
p alpp 4 3 1 3
t 0
t 3
e 0 1
e 1 2
e 2 3
"""


def test_parse_instance_reads_header_terminals_edges():
    inst = parse_instance(PATH4)
    assert inst.n == 4
    assert inst.k == 1 and inst.ell == 3
    assert inst.terminals == {0, 3}
    assert inst.graph.edges == ((0, 1), (1, 2), (2, 3))
    assert inst.labels is None


def test_parse_sapp_kind():
    inst = parse_instance("p sapp 2 1 1 1\nt 0\nt 1\ne 1 0\n")
    assert inst.kind == SAPP


def test_sparse_ids_are_relabelled_densely():
    inst = parse_instance("p alpp 3 2 1 2\nt 10\nt 30\ne 10 20\ne 20 30\n")
    assert inst.labels == (10, 20, 30)
    assert inst.terminals == {0, 2}
    assert inst.graph.edges == ((0, 1), (1, 2))


def test_serialize_is_canonical_and_idempotent():
    text = "p alpp 4 3 1 3\nt 3\nt 0\ne 3 2\ne 1 0\ne 2 1\n"
    once = canonical_text(text)
    assert once == canonical_text(once)
    assert once.splitlines() == ["p alpp 4 3 1 3", "t 0", "t 3", "e 0 1", "e 1 2", "e 2 3"]


def test_serialize_writes_comments_first():
    text = serialize_instance(parse_instance(PATH4), ["made by hand"])
    assert text.startswith("# made by hand\np alpp 4 3 1 3\n")


def test_digest_ignores_comments_and_order():
    a = parse_instance(PATH4)
    b = parse_instance("p alpp 4 3 1 3\nt 3\nt 0\ne 2 3\ne 0 1\ne 1 2\n")
    assert instance_digest(a) == instance_digest(b)
    assert len(instance_digest(a)) == 64
    assert instance_digest(a) != instance_digest(a.with_k(2))


@pytest.mark.parametrize(
    "text, line",
    [
        ("t 0\np alpp 2 0 1 1\n", 1),
        ("p alpp 2 1 1 1\ne 0 0\n", 2),
        ("p alpp 2 2 1 1\ne 0 1\ne 1 0\n", 3),
        ("p alpp 2 0 1 1\nt 0\nt 0\n", 3),
        ("p alpp 2 0 1 1\nx 0\n", 2),
        ("p alpp 2 0 1 1\nt a\n", 2),
        ("p alpp 2 1 1\n", 1),
        ("p alpp 2 0 1 1\np alpp 2 0 1 1\n", 2),
    ],
)
def test_malformed_instances_report_line(text, line):
    with pytest.raises(MalformedInputError) as info:
        parse_instance(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_edge_count_mismatch_is_malformed():
    with pytest.raises(MalformedInputError):
        parse_instance("p alpp 3 2 1 2\ne 0 1\n")


def test_missing_header_is_malformed():
    with pytest.raises(MalformedInputError):
        parse_instance("# nothing here\n")


def test_too_many_ids_for_header_is_malformed():
    with pytest.raises(MalformedInputError):
        parse_instance("p alpp 2 2 1 1\ne 5 6\ne 6 7\n")


def test_packing_round_trip_with_labels():
    inst = parse_instance("p alpp 3 2 1 2\nt 10\nt 30\ne 10 20\ne 20 30\n")
    text = serialize_packing(PathPacking(((0, 1, 2),)), True, inst)
    assert text == "decision yes\npath 10 20 30\n"
    decision, packing = parse_packing(text, inst)
    assert decision is True
    assert packing.paths == ((0, 1, 2),)


def test_packing_without_witness():
    assert serialize_packing(None, False) == "decision no\n"
    assert parse_packing("decision no\n") == (False, PathPacking())


@pytest.mark.parametrize("text", ["decision maybe\n", "path 1 x\n", "walk 1 2\n"])
def test_malformed_packings(text):
    with pytest.raises(MalformedInputError):
        parse_packing(text)


def test_packing_with_unknown_label_is_malformed():
    inst = parse_instance("p alpp 3 2 1 2\nt 10\nt 30\ne 10 20\ne 20 30\n")
    with pytest.raises(MalformedInputError):
        parse_packing("path 10 25 30\n", inst)


XALPP = """\
p xalpp 4 3 1
e 0 1 2
e 1 2 1
e 2 3 5
q 0 2 3
"""


def test_parse_extended():
    x = parse_extended(XALPP)
    assert x.r == 1
    assert x.weight(1, 0) == 2
    assert x.max_weight == 5
    assert x.path_weight((0, 1, 2)) == 3
    assert x.triples == ((0, 2, 3),)


def test_extended_names_survive_serialisation():
    x = parse_extended(XALPP)
    named = type(x)(x.graph, x.weights, x.triples, ("s", "a", "t", "z"))
    back = parse_extended(serialize_extended(named, ["weighted"]))
    assert back.names == ("s", "a", "t", "z")
    assert back.weights == x.weights
    assert back.name(3) == "z"


@pytest.mark.parametrize(
    "text",
    [
        "p xalpp 2 1 0\ne 0 1 0\n",
        "p xalpp 2 1 0\ne 0 5 1\n",
        "p xalpp 2 0 1\nq 0 1\n",
        "p xalpp 3 0 2\nq 0 1 1\nq 1 2 1\n",
        "p alpp 2 0 1 1\n",
    ],
)
def test_malformed_extended(text):
    with pytest.raises(MalformedInputError):
        parse_extended(text)


def test_mcc_round_trip_normalizes_edges():
    mcc = parse_mcc("p mcc 2 2\ne 2 1 1 2\ne 1 1 2 2\n")
    assert mcc.edges == (((1, 1), (2, 2)), ((1, 2), (2, 1)))
    assert serialize_mcc(mcc) == "p mcc 2 2\ne 1 1 2 2\ne 1 2 2 1\n"


@pytest.mark.parametrize(
    "text",
    [
        "p mcc 2 2\ne 1 1 1 2\n",
        "p mcc 2 2\ne 1 3 2 1\n",
        "p mcc 2 2\ne 1 1 2 1\ne 2 1 1 1\n",
        "e 1 1 2 1\n",
    ],
)
def test_malformed_mcc(text):
    with pytest.raises(MalformedInputError):
        parse_mcc(text)


def test_td_round_trip():
    td = TreeDecomposition((frozenset({0, 1}), frozenset({1, 2})), ((0, 1),))
    text = serialize_td(td, 3)
    assert text.splitlines() == ["s td 2 2 3", "b 1 0 1", "b 2 1 2", "e 1 2"]
    back = parse_td(text)
    assert back == td
    back.validate(Graph.from_edges(3, [(0, 1), (1, 2)]))


def test_td_accepts_plain_pace_edge_lines():
    td = parse_td("s td 2 2 3\nb 1 0 1\nb 2 1 2\n1 2\n")
    assert td.tree_edges == ((0, 1),)


def test_td_maps_labels():
    inst = Instance(Graph.from_edges(2, [(0, 1)]), {0, 1}, 1, 1, labels=(5, 9))
    td = parse_td("s td 1 2 2\nb 1 5 9\n", inst)
    assert td.bags == (frozenset({0, 1}),)
    assert serialize_td(td, 2, inst).splitlines()[1] == "b 1 5 9"


@pytest.mark.parametrize(
    "text",
    [
        "b 1 0\n",
        "s td 2 1 2\nb 1 0\n",
        "s td 1 1 1\nb 3 0\n",
        "s td 2 1 2\nb 1 0\nb 2 1\ne 1 5\n",
    ],
)
def test_malformed_td(text):
    with pytest.raises(MalformedInputError):
        parse_td(text)
