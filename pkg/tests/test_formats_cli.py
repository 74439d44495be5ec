import io
import json
import os

import pytest

from lscat.category import INFINITE
from lscat.cli import (
    builtin_corpus_dir,
    main,
    run_corpus,
)
from lscat.formats import (
    ParseError,
    ValidationError,
    emit_report,
    expectation_mismatches,
    parse_scenario,
)


CORPUS = builtin_corpus_dir()


def corpus_file(name):
    return os.path.join(CORPUS, name)


def test_parse_corpus_scenario():
    sc = parse_scenario(corpus_file("v_descent_bounds.json"))
    assert sc.kind == "theorem"
    assert sc.pair is not None
    assert sc.band == (-1.0, 3.0)


def test_parse_band_errors(tmp_path):
    doc = {
        "kind": "theorem",
        "space": {"points": ["a"], "relation": []},
        "map": {"a": "a"},
        "function": {"a": 0.0},
        "band": [2.0, 1.0],
        "theorems": ["band_bound"],
    }
    with pytest.raises(ValidationError):
        parse_scenario(doc)


def test_parse_unknown_theorem():
    doc = {
        "kind": "theorem",
        "space": {"points": ["a"], "relation": []},
        "map": {"a": "a"},
        "function": {"a": 0.0},
        "band": [0.0, 1.0],
        "theorems": ["nope"],
    }
    with pytest.raises(ValidationError):
        parse_scenario(doc)


def test_parse_infinite_band():
    doc = {
        "kind": "theorem",
        "space": {"points": ["a"], "relation": []},
        "map": {"a": "a"},
        "function": {"a": 0.0},
        "band": [0.0, "inf"],
        "theorems": ["identity_band_bound"],
    }
    sc = parse_scenario(doc)
    assert sc.band[1] is INFINITE


def test_parse_complex():
    from lscat.formats import parse_complex

    K = parse_complex({"vertices": ["a", "b", "c"],
                       "maximal": [["a", "b"], ["b", "c"], ["a", "c"]]})
    assert K.f_vector() == (3, 3)
    with pytest.raises(ParseError):
        parse_complex({"vertices": ["a"]})
    with pytest.raises(ValidationError):
        parse_complex({"vertices": ["a"], "maximal": [["a", "z"]]})


def test_parse_error_carries_location(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ParseError) as err:
        parse_scenario(str(bad))
    assert "bad.json" in str(err.value)


def test_emit_report_deterministic():
    report = {"b": [1.0, INFINITE], "a": {"x": 0.5}}
    one = emit_report(report, "structured")
    two = emit_report(report, "structured")
    assert one == two
    assert '"inf"' in one
    parsed = json.loads(one)
    assert parsed["b"] == [1.0, "inf"]


def test_emit_report_text_renders_ledger():
    report = {
        "hypotheses": {
            "lyapunov": {"status": "checked", "ok": True, "witness": None,
                         "note": None},
        },
        "verdict": "HOLDS",
    }
    text = emit_report(report, "text")
    assert "lyapunov" in text
    assert "HOLDS" in text


def test_expectation_mismatches_subset_semantics():
    actual = {"verdict": "HOLDS", "values": {"x": 1, "y": 2}}
    assert expectation_mismatches({"values": {"x": 1}}, actual) == []
    bad = expectation_mismatches({"values": {"x": 3}}, actual)
    assert bad == [("values.x", 3, 1)]
    missing = expectation_mismatches({"nope": 1}, actual)
    assert missing[0][2] == "<missing>"


def test_corpus_runs_clean(tmp_path):
    buf = io.StringIO()
    code, summary = run_corpus(fmt="structured", out=buf)
    assert code == 0
    assert summary["mismatched"] == 0
    assert summary["fixtures"] == 14
    # determinism of the emitted bytes
    buf2 = io.StringIO()
    run_corpus(fmt="structured", out=buf2)
    assert buf.getvalue() == buf2.getvalue()


def test_corpus_empty_dir(tmp_path):
    buf = io.StringIO()
    code, summary = run_corpus(str(tmp_path), fmt="structured", out=buf)
    assert code == 0
    assert summary["fixtures"] == 0


def test_corpus_corrupted_fixture(tmp_path):
    (tmp_path / "broken.json").write_text("{")
    buf = io.StringIO()
    code, summary = run_corpus(str(tmp_path), fmt="structured", out=buf)
    assert code == 2
    assert summary["input_errors"]


def test_corpus_manifest_covers_counterexamples():
    required = {
        "strict-equivariant-vs-quotient",
        "strict-mod-vs-pair-arc",
        "strict-pair-vs-difference-wedge",
        "nonequivalence-constant-map",
        "noncompact-halfline-descent",
        "halffixed-circle-nondiscrete",
        "band-pair-strict-wedge-cone",
        "band-mod-strict-halfcircle",
    }
    tags = []
    for name in os.listdir(CORPUS):
        if not name.endswith(".json"):
            continue
        with open(corpus_file(name)) as fh:
            doc = json.load(fh)
        if doc.get("models"):
            tags.append(doc["models"])
    assert sorted(tags) == sorted(required), "each counterexample has "
    "exactly one fixture"


def test_cli_space_validate(tmp_path, capsys):
    f = tmp_path / "space.json"
    f.write_text(json.dumps({
        "space": {"points": ["c", "a", "b"],
                  "relation": [["c", "a"], ["c", "b"]]},
    }))
    assert main(["space", "validate", str(f)]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "space": {"points": ["a", "b"],
                  "relation": [["a", "b"], ["b", "a"]]},
    }))
    assert main(["space", "validate", str(bad)]) == 2


def test_cli_cat_and_verify(capsys):
    assert main(["cat", corpus_file("boundary_pair_arc.json"),
                 "--format", "structured"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"][0]["value"] == 1
    assert main(["verify", corpus_file("halfcircle_boundary_band.json")]) == 0
    capsys.readouterr()


def test_cli_engine_verify(capsys):
    assert main(["engine", "verify", corpus_file("v_descent_engine.json"),
                 "--format", "structured"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["report"]["verdict"] == "INEQUALITY_HOLDS"


def test_cli_engine_expectation_mismatch(tmp_path, capsys):
    with open(corpus_file("v_descent_engine.json")) as fh:
        doc = json.load(fh)
    doc["expect"]["rhs"] = 99
    f = tmp_path / "broken_expect.json"
    f.write_text(json.dumps(doc))
    assert main(["engine", "verify", str(f)]) == 1
    capsys.readouterr()


def test_cli_numeric_ps_check(capsys):
    assert main(["numeric", "ps-check", "--fixture", "quadratic",
                 "--tau", "1.0", "--n-max", "100",
                 "--format", "structured"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["report"]["chain_ok"] is True


def test_cli_corpus_run(capsys):
    assert main(["corpus", "run", "--format", "structured"]) == 0
    capsys.readouterr()


def test_cli_rejects_wrong_kind(tmp_path, capsys):
    assert main(["verify", corpus_file("v_descent_engine.json")]) == 2
    capsys.readouterr()
