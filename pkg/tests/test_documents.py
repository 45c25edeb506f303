import io
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plausinet import algebras as A
from plausinet import bayesnet as B
from plausinet import documents as D
from plausinet.core import WorldSpace

F = Fraction


def model_doc(kind, key, params, variables=("X1", "X2")):
    return {"version": 1, "variables": list(variables), "measure": {"kind": kind, key: params}}


@pytest.mark.parametrize(
    "text,value",
    [("1/3", F(1, 3)), ("0", F(0)), (" 2 / 4 ", F(1, 2)), (1, F(1))],
)
def test_parse_rational(text, value):
    assert D.parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "0.5", 0.5, True, "x", None, "1e3"])
def test_parse_rational_rejects(bad):
    with pytest.raises(D.DocumentError):
        D.parse_rational(bad)


def test_ranks():
    assert D.parse_rank("inf") == A.INF and D.parse_rank(3) == 3
    assert D.format_rank(A.INF) == "inf"
    with pytest.raises(D.DocumentError):
        D.parse_rank(-1)


@pytest.mark.parametrize(
    "domain,value",
    [
        (A.PROBABILITY_DOMAIN, F(2, 7)),
        (A.RANK_DOMAIN, A.INF),
        (A.RANK_DOMAIN, 4),
        (A.StarDomain(2), A.StarFunction((F(1, 2), None))),
        (A.StarDomain(2), A.BOTTOM),
        (A.StarDomain(2), A.TOP),
        (A.INTERVAL_DOMAIN, A.IntervalValue(F(1, 4), F(1, 2))),
    ],
)
def test_value_round_trip(domain, value):
    assert D.parse_value(domain, json.loads(json.dumps(D.format_value(domain, value)))) == value


def test_parse_value_checks_membership():
    # vectors are canonicalized into the collapsed classes
    assert D.parse_value(A.StarDomain(2), ["1", "*"]) is A.TOP
    with pytest.raises(D.DocumentError):
        D.parse_value(A.StarDomain(2), ["1/2"])
    with pytest.raises(D.DocumentError):
        D.parse_value(A.PROBABILITY_DOMAIN, "3/2")


def test_parse_event_forms():
    s = WorldSpace(2)
    names = ["A", "B"]
    assert D.parse_event("W", s, names) == s.full
    assert D.parse_event("{0,3}", s, names) == 0b1001
    assert D.parse_event("{}", s, names) == 0
    assert D.parse_event("A=1&B=0", s, names) == 0b0010
    for bad in ["C=1", "A=2", "{9}"]:
        with pytest.raises(D.DocumentError):
            D.parse_event(bad, s, names)


@pytest.mark.parametrize(
    "kind,params",
    [
        ("probability", ["1/2", "1/4", "1/4", "0"]),
        ("ranking", [0, 1, "inf", 2]),
        ("possibility-min", ["1", "1/2", "0", "1/4"]),
        ("possibility-div", ["1", "1/2", "0", "1/4"]),
        ("probset", [["1/2", "1/2", "0", "0"], ["0", "0", "1", "0"]]),
        ("lower-strict", [["1/2", "1/2", "0", "0"], ["1/4", "1/4", "1/4", "1/4"]]),
        ("lower-lenient", [["1/2", "1/2", "0", "0"], ["0", "0", "1", "0"]]),
        ("upper", [["1/2", "1/2", "0", "0"], ["0", "0", "1", "0"]]),
        ("interval", [["1/2", "1/2", "0", "0"], ["0", "0", "1", "0"]]),
        ("lexicographic", [["1", "0", "0", "0"], ["0", "1/2", "1/2", "0"]]),
    ],
)
def test_model_round_trip(kind, params):
    doc = model_doc(kind, D._PARAM_KEY[kind], params)
    model = D.model_from_json(doc)
    assert model.build().kind == kind
    assert D.model_to_json(model) == doc


def test_model_overrides_round_trip():
    doc = model_doc("probability", "weights", ["1/4"] * 4)
    doc["overrides"] = [{"U": [0], "V": [0, 1, 2, 3], "value": "1/3"}]
    model = D.model_from_json(doc)
    assert model.build().unconditional(1) == F(1, 3)
    assert D.model_to_json(model) == doc


@pytest.mark.parametrize(
    "doc",
    [
        {"version": 2, "variables": ["X1"], "measure": {"kind": "probability", "weights": ["1", "0"]}},
        {"version": 1, "measure": {"kind": "probability", "weights": ["1", "0"]}},
        {"version": 1, "variables": ["X1"], "measure": {"kind": "magic", "weights": ["1", "0"]}},
        {"version": 1, "variables": ["X1"], "measure": {"kind": "probability"}},
        {"version": 1, "variables": ["X1"], "measure": {"kind": "probset", "measures": ["1", "0"]}},
    ],
)
def test_malformed_models(doc):
    with pytest.raises(D.DocumentError):
        D.model_from_json(doc)


def test_variable_count_must_match():
    with pytest.raises(D.DocumentError):
        D.model_from_json(model_doc("probability", "weights", ["1", "0"])).build()


@given(st.lists(st.integers(0, 5), min_size=8, max_size=8).filter(any))
def test_probability_document_round_trip(raw):
    ws = [F(x, sum(raw)) for x in raw]
    m = A.make_probability(ws)
    doc = D.model_to_json(D.model_of(m))
    again = D.model_from_json(json.loads(json.dumps(doc))).build()
    assert again.weights == m.weights


# -- networks ---------------------------------------------------------------------


def xor_measure():
    return A.make_probability([F(1, 4), 0, 0, F(1, 4), 0, F(1, 4), F(1, 4), 0])


def test_network_round_trip_with_tables():
    mu = xor_measure()
    g = B.build_network(mu, [0, 1, 2])
    qbn = B.extract_cpts(g, mu)
    names = ["X1", "X2", "X3"]
    doc = D.network_to_json(names, g, qbn)
    assert doc["edges"] == [["X1", "X3"], ["X2", "X3"]]
    assert set(doc["cpts"]["X3"]) == {"X1=0,X2=0", "X1=0,X2=1", "X1=1,X2=0", "X1=1,X2=1"}
    net = D.network_from_json(json.loads(json.dumps(doc)))
    assert net.dag == g and net.nodes == names
    assert B.reconstruct(net.qbn) == mu.world_values()
    assert D.network_to_json(names, net.dag, net.qbn) == doc


@pytest.mark.parametrize("kind", ["ranking", "probset", "possibility-div"])
def test_network_round_trip_other_algebras(kind):
    import random

    rng = random.Random(3)
    g = B.Dag(3, {(0, 1), (1, 2)})
    m = B.random_factored_measure(kind, g, rng)
    qbn = B.extract_cpts(g, m)
    doc = D.network_to_json(["A", "B", "C"], g, qbn)
    net = D.network_from_json(json.loads(json.dumps(doc)))
    assert B.reconstruct(net.qbn) == m.world_values()


def test_undefined_rows_serialize():
    mu = A.make_probability([F(1, 2), 0, F(1, 2), 0])
    g = B.Dag(2, {(0, 1)})
    doc = D.network_to_json(["A", "B"], g, B.extract_cpts(g, mu))
    assert doc["cpts"]["B"]["A=1"] == "undefined"
    assert D.network_from_json(doc).qbn.cpts[1].rows[(1,)] is B.UNDEFINED


@pytest.mark.parametrize(
    "doc",
    [
        {"version": 1, "nodes": ["A", "B"], "edges": [["A", "B"], ["B", "A"]]},
        {"version": 1, "nodes": ["A", "B"], "edges": [["A", "C"]]},
        {"version": 1, "nodes": ["A", "B"], "edges": [["A", "B"], ["A", "B"]]},
        {"version": 1, "nodes": ["A", "A"], "edges": []},
        {"version": 1, "nodes": ["A", "B"], "edges": [], "algebra": "probability", "cpts": {"A": {"": {"1": "1", "0": "0"}}}},
        {
            "version": 1,
            "nodes": ["A", "B"],
            "edges": [["A", "B"]],
            "algebra": "probability",
            "cpts": {"A": {"": {"1": "1", "0": "0"}}, "B": {"A=1": {"1": "1", "0": "0"}}},
        },
        {"version": 1, "nodes": ["A"], "edges": [], "algebra": "probset", "cpts": {"A": {"": {"1": "top", "0": "bottom"}}}},
    ],
)
def test_malformed_networks(doc):
    with pytest.raises(D.DocumentError):
        D.network_from_json(doc)


def test_read_json_from_stdin(monkeypatch, tmp_path):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"a": 1}'))
    assert D.read_json("-") == {"a": 1}
    with pytest.raises(D.DocumentError):
        D.read_json(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(D.DocumentError):
        D.read_json(str(bad))
