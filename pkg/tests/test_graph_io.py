"""Weight-graph JSON interchange: canonical form, round trips, parse errors."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quchain import ParseError, WeightGraph, dumps_graph, loads_graph, read_graph, write_graph


def test_k2_round_trip_byte_identical(tmp_path):
    g = WeightGraph(nodes=[(0, 0.5), (1, 0.5)], edges=[(0, 1, 0.5)], offset=0.5)
    path = tmp_path / "k2.json"
    write_graph(g, path)
    text = path.read_text()
    g2 = read_graph(path)
    assert g2 == g
    write_graph(g2, path)
    assert path.read_text() == text


def test_canonical_ordering():
    g = WeightGraph(nodes=[(1, 2.0), (0, 1.0), (2, 0.0)], edges=[(2, 0, 1.0), (1, 0, -1.0)])
    assert [i for i, _ in g.nodes] == [0, 1, 2]
    assert g.edges == [(0, 1, -1.0), (0, 2, 1.0)]


def test_seventeen_digit_reals():
    g = WeightGraph(nodes=[(0, math.pi)], edges=[], offset=0.1)
    text = dumps_graph(g)
    assert "3.1415926535897931" in text
    assert "0.10000000000000001" in text
    assert loads_graph(text).nodes[0][1] == math.pi


def test_dangling_edge_is_parse_error():
    text = '{"offset": 0, "nodes": [{"id": 0, "w": 0}], "edges": [{"u": 0, "v": 7, "w": 1}]}'
    with pytest.raises(ParseError) as err:
        loads_graph(text)
    assert "edges[0].v" in str(err.value)


def test_empty_node_list_rejected():
    with pytest.raises(ParseError):
        loads_graph('{"offset": 0, "nodes": [], "edges": []}')


def test_unknown_field_rejected():
    text = '{"offset": 0, "nodes": [{"id": 0, "w": 0, "color": 1}], "edges": []}'
    with pytest.raises(ParseError) as err:
        loads_graph(text)
    assert "color" in str(err.value) and "nodes[0]" in str(err.value)


def test_malformed_json_reports_location():
    with pytest.raises(ParseError) as err:
        loads_graph('{"offset": 0,\n "nodes": [}')
    assert "line 2" in str(err.value)


def test_duplicate_edge_rejected():
    text = (
        '{"offset": 0, "nodes": [{"id": 0, "w": 0}, {"id": 1, "w": 0}],'
        ' "edges": [{"u": 0, "v": 1, "w": 1}, {"u": 1, "v": 0, "w": 2}]}'
    )
    with pytest.raises(ParseError):
        loads_graph(text)


def test_self_loop_rejected():
    with pytest.raises(ValueError):
        WeightGraph(nodes=[(0, 0.0)], edges=[(0, 0, 1.0)])


def test_non_contiguous_ids_rejected():
    with pytest.raises(ValueError):
        WeightGraph(nodes=[(0, 0.0), (2, 0.0)], edges=[])


@st.composite
def weight_graphs(draw):
    n = draw(st.integers(1, 8))
    finite = st.floats(
        min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
    )
    nodes = [(i, draw(finite)) for i in range(n)]
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.sets(st.sampled_from(pairs))) if pairs else set()
    edges = [(u, v, draw(finite)) for u, v in sorted(chosen)]
    return WeightGraph(nodes=nodes, edges=edges, offset=draw(finite))


@given(weight_graphs())
@settings(max_examples=60, deadline=None)
def test_round_trip_is_identity_on_canonical_form(g):
    text = dumps_graph(g)
    g2 = loads_graph(text)
    assert g2 == g
    assert dumps_graph(g2) == text
