import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from plausinet import algebras as A
from plausinet import axioms as X
from plausinet import documents as D
from plausinet.cli import main

import oracles

MODELS = Path(__file__).resolve().parent.parent / "models"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    assert doc["exit"] == code
    return code, doc["records"]


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


# -- axioms ----------------------------------------------------------------------


def test_axioms_uniform_passes(capsys):
    code, records = run_json(capsys, "axioms", MODELS / "fair_coins.json")
    assert code == 0
    laws = [r for r in records if r["record"] == "law"]
    assert {r["status"] for r in laws} == {"pass"}
    assert len(laws) == len(X.LAWS)


def test_axioms_lenient_lower_prints_cpl5_witness(capsys):
    code, out, _ = run(capsys, "axioms", MODELS / "lower_lenient.json")
    assert code == 1
    assert "law law=CPl5 status=fail required=yes" in out
    assert "witness law=CPl5" in out


def test_axioms_zero_denominator_is_a_parse_error(capsys, tmp_path):
    p = write(tmp_path, "bad.json", {"version": 1, "variables": ["X1"], "measure": {"kind": "probability", "weights": ["1/0", "1"]}})
    code, out, err = run(capsys, "axioms", p)
    assert code == 2
    assert "zero denominator" in err


def test_axioms_sampled_mode(capsys, tmp_path):
    p = write(tmp_path, "u4.json", D.model_to_json(D.model_of(A.uniform(4))))
    code, records = run_json(capsys, "axioms", p, "--samples", "100", "--seed", "3")
    assert code == 0
    assert {r["mode"] for r in records if r["record"] == "law"} == {"sampled"}
    code, _, _ = run(capsys, "axioms", p, "--exhaustive")
    assert code == 2


def test_axioms_report_is_golden(capsys):
    code, out, _ = run(capsys, "axioms", MODELS / "fair_coins.json")
    assert out.splitlines() == [
        'model kind=probability n=2 claims=["acceptable","alg4_prime","algebraic","coherent","determined","monotonic","standard"]',
        "law law=CPl1-4 status=pass required=yes checked=240 failures=0 mode=exhaustive",
        "law law=CPl5 status=pass required=yes checked=1280 failures=0 mode=exhaustive",
        "law law=Acc1-4 status=pass required=yes checked=240 failures=0 mode=exhaustive",
        "law law=Alg1-4 status=pass required=yes checked=605 failures=0 mode=exhaustive alg4_prime=pass",
        "law law=standard status=pass required=yes checked=16 failures=0 mode=exhaustive",
        "law law=determined status=pass required=yes checked=80 failures=0 mode=exhaustive",
        "law law=monotonic status=pass required=yes checked=441 failures=0 mode=exhaustive unrestricted=pass",
        "implication name=cpl5-from-monotonic status=pass",
        "implication name=standard-from-determined status=pass",
        "exit code=0",
    ]


# -- indep ---------------------------------------------------------------------------


def test_indep_fair_coins(capsys):
    code, out, _ = run(capsys, "indep", MODELS / "fair_coins.json", "--x", "X1", "--y", "X2", "--z", "")
    assert code == 0
    assert "independent=yes" in out


def test_indep_double_coin(capsys):
    code, out, _ = run(capsys, "indep", MODELS / "double_coin.json", "--x", "X1", "--y", "X2")
    assert code == 3
    assert 'note="NI holds, type-1 holds, I fails"' in out


def test_indep_overlapping_sets(capsys):
    code, _, _ = run(capsys, "indep", MODELS / "fair_coins.json", "--x", "X1", "--y", "X1,X2")
    assert code == 2


def test_indep_raw_events(capsys):
    code, records = run_json(capsys, "indep", MODELS / "double_coin.json", "--events", "X1=1|X2=1|W")
    assert code == 3
    result = records[-1]
    assert result["noninteractive"] is True and result["type1"] is True
    code, _, _ = run(capsys, "indep", MODELS / "double_coin.json", "--events", "{0}|{1}|{1,2}")
    assert code == 2  # {1,2} has no mass under either measure
    code, _, _ = run(capsys, "indep", MODELS / "double_coin.json", "--events", "{0}|{1}")
    assert code == 2


def test_indep_unknown_variable(capsys):
    code, _, err = run(capsys, "indep", MODELS / "fair_coins.json", "--x", "X1", "--y", "Q")
    assert code == 2 and "unknown variable" in err


def test_indep_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO((MODELS / "fair_coins.json").read_text()))
    code, _, _ = run(capsys, "indep", "-", "--x", "X1", "--y", "X2")
    assert code == 0


# -- buildbn -------------------------------------------------------------------------------


def test_buildbn_xor(capsys, tmp_path):
    out = tmp_path / "net.json"
    code, _, _ = run(capsys, "buildbn", MODELS / "xor.json", "--order", "X1,X2,X3", "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["edges"] == [["X1", "X3"], ["X2", "X3"]]
    # idempotent for fixed inputs
    code, text, _ = run(capsys, "buildbn", MODELS / "xor.json", "--order", "X1,X2,X3")
    assert json.loads(text) == doc


def test_buildbn_independent_coins(capsys):
    code, text, _ = run(capsys, "buildbn", MODELS / "fair_coins.json")
    assert code == 0 and json.loads(text)["edges"] == []


def test_buildbn_non_algebraic(capsys):
    code, _, err = run(capsys, "buildbn", MODELS / "lower_lenient.json")
    assert code == 2
    assert "measure provides no ⊗" in err


def test_buildbn_bad_order(capsys):
    code, _, _ = run(capsys, "buildbn", MODELS / "xor.json", "--order", "X1,X2")
    assert code == 2


# -- dsep ------------------------------------------------------------------------------------


def test_dsep_collider_marginal(capsys):
    code, out, _ = run(capsys, "dsep", MODELS / "collider.json", "--x", "A", "--y", "B")
    assert code == 0 and "verdict=d-separated" in out


def test_dsep_collider_given_child_with_witness(capsys, tmp_path):
    wfile = tmp_path / "witness.json"
    code, out, _ = run(capsys, "dsep", MODELS / "collider.json", "--x", "A", "--y", "B", "--z", "C", "--witness-out", wfile)
    assert code == 1
    assert "verdict=connected" in out and "found=yes" in out
    model = D.model_from_json(json.loads(wfile.read_text()))
    assert not oracles.ci_prob(model.params, 3, {0}, {1}, {2})
    # the emitted model answers the query as dependent
    code, _, _ = run(capsys, "indep", wfile, "--x", "A", "--y", "B", "--z", "C")
    assert code == 3


def test_dsep_inline_witness(capsys):
    code, records = run_json(capsys, "dsep", MODELS / "collider.json", "--x", "A", "--y", "B", "--z", "C", "--witness")
    assert code == 1
    assert records[-1]["found"] is True
    assert records[-1]["model"]["measure"]["kind"] == "probability"


def test_dsep_unknown_node(capsys):
    code, _, _ = run(capsys, "dsep", MODELS / "collider.json", "--x", "A", "--y", "Q")
    assert code == 2


# -- verify -----------------------------------------------------------------------------------


def test_verify_probability_all(capsys):
    code, records = run_json(capsys, "verify", MODELS / "xor.json")
    assert code == 0
    suites = {r.get("suite") for r in records}
    assert {"axioms", "semigraphoid", "construction", "dsep-sound", "ni-vs-i"} <= suites


def test_verify_double_coin_ni_vs_i(capsys):
    code, out, _ = run(capsys, "verify", MODELS / "double_coin.json", "--suite", "ni-vs-i")
    assert code == 0
    assert 'law="NI=>I" status=pass' in out
    assert 'note="NI⇏I witness (expected)"' in out


def test_verify_corrupted_model_gives_replayable_witness(capsys, tmp_path):
    doc = json.loads((MODELS / "fair_coins.json").read_text())
    doc["overrides"] = [{"U": [0], "V": [0, 1, 2, 3], "value": "1/3"}]
    p = write(tmp_path, "corrupt.json", doc)
    code, records = run_json(capsys, "verify", p, "--suite", "axioms")
    assert code == 1
    cpm = D.model_from_json(doc).build()
    base = D.model_from_json(json.loads((MODELS / "fair_coins.json").read_text())).build()
    witnesses = [r for r in records if r["record"] == "witness"]
    assert witnesses
    for r in witnesses:
        w = X.Witness(r["law"], {k: cpm.space.event(v) for k, v in r["events"].items()})
        assert X.replay_witness(cpm, w)
        assert not X.replay_witness(base, w)


def test_verify_non_algebraic_model(capsys):
    code, records = run_json(capsys, "verify", MODELS / "lower_lenient.json", "--suite", "construction")
    assert code == 0
    assert records[-1]["status"] == "n/a"


def test_verify_respects_caps(capsys, tmp_path):
    p = write(tmp_path, "u4.json", D.model_to_json(D.model_of(A.uniform(4))))
    code, _, _ = run(capsys, "verify", p, "--suite", "ni-vs-i")
    assert code == 2


# -- reconstruct ---------------------------------------------------------------------------------


def test_reconstruct_fair_coins_edgeless(capsys, tmp_path):
    net = write(tmp_path, "net.json", {"version": 1, "nodes": ["X1", "X2"], "edges": []})
    code, records = run_json(capsys, "reconstruct", MODELS / "fair_coins.json", net)
    assert code == 0
    rows = [r for r in records if r["record"] == "world"]
    assert [(r["reconstructed"], r["original"]) for r in rows] == [("1/4", "1/4")] * 4


def test_reconstruct_ranking_chain(capsys, tmp_path):
    net = tmp_path / "chain.json"
    assert run(capsys, "buildbn", MODELS / "ranking_chain.json", "--out", net)[0] == 0
    assert json.loads(net.read_text())["edges"] == [["A", "B"], ["B", "C"]]
    code, records = run_json(capsys, "reconstruct", MODELS / "ranking_chain.json", net)
    assert code == 0
    ranks = json.loads((MODELS / "ranking_chain.json").read_text())["measure"]["ranks"]
    rows = [r for r in records if r["record"] == "world"]
    assert [r["reconstructed"] for r in rows] == [oracles.rank(ranks, 1 << w) for w in range(8)]


def test_reconstruct_incompatible(capsys, tmp_path):
    net = write(tmp_path, "net.json", {"version": 1, "nodes": ["X1", "X2"], "edges": []})
    code, out, _ = run(capsys, "reconstruct", MODELS / "double_coin.json", net)
    assert code == 1 and "compatible=no" in out


def test_reconstruct_algebra_mismatch(capsys, tmp_path):
    net = tmp_path / "net.json"
    run(capsys, "buildbn", MODELS / "fair_coins.json", "--out", net)
    doc = json.loads((MODELS / "fair_coins.json").read_text())
    doc["measure"] = {"kind": "possibility-div", "possibilities": ["1", "1", "1", "1"]}
    model = write(tmp_path, "poss.json", doc)
    assert run(capsys, "reconstruct", model, net)[0] == 2


# -- plumbing ----------------------------------------------------------------------------------------


def test_seed_from_environment(capsys, monkeypatch):
    args = ("dsep", MODELS / "collider.json", "--x", "A", "--y", "B", "--z", "C", "--witness")
    monkeypatch.setenv("PLAUSINET_SEED", "11")
    a = run_json(capsys, *args)[1][-1]["model"]
    b = run_json(capsys, *args, "--seed", "11")[1][-1]["model"]
    c = run_json(capsys, *args, "--seed", "12")[1][-1]["model"]
    assert a == b != c


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", str(MODELS / "xor.json"), "--suite", "nonsense"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "plausinet", "indep", str(MODELS / "double_coin.json"), "--x", "X1", "--y", "X2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 3
    assert "I fails" in proc.stdout
