import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakdisc import cli, verify, weak
from weakdisc.config import ConfigError, ExperimentConfig, SweepSpec, load_config, parse_config
from weakdisc.emit import data_section, emit, parse_csv, parse_jsonl, render
from weakdisc.sweep import FIELDS, evaluate_point, run_sweep

KNOWN_DEFECT_CHECKS = {
    "first-order pointer vectors vs exact evolution",
    "coupling-axis deviation enters at second order",
    "closed-form beta vs trace beta",
}


# -- config ------------------------------------------------------------------

def test_defaults_when_keys_missing():
    assert parse_config({}) == ExperimentConfig()


def test_complex_eta():
    assert parse_config({"eta": [0.1, -0.2]}).eta == complex(0.1, -0.2)


@pytest.mark.parametrize("raw, field", [
    ({"g": 0.1, "gg": 1}, "gg"),
    ({"eps": -1e-3}, "eps"),
    ({"samples": 0}, "samples"),
    ({"seed": 2 ** 64}, "seed"),
    ({"g": "big"}, "g"),
    ({"sweep": {"param": "g", "start": 0.1, "stop": 1, "count": 1}}, "sweep.count"),
    ({"sweep": {"param": "samples", "start": 1, "stop": 2, "count": 3}}, "sweep.param"),
])
def test_invalid_config_names_field(raw, field):
    with pytest.raises(ConfigError, match=f"field '{field}'"):
        parse_config(raw)


def test_json_error_has_line_and_column(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"g": 0.1,\n "eps": }')
    with pytest.raises(ConfigError, match="line 2, column"):
        load_config(path)


def test_sweep_spacing():
    np.testing.assert_allclose(SweepSpec("eta", 1e-3, 1, 4, "log").points(), [1e-3, 1e-2, 1e-1, 1])
    np.testing.assert_allclose(SweepSpec("g", 0, 1, 3).points(), [0, 0.5, 1])


def test_with_param_keeps_integer_fields():
    c = ExperimentConfig().with_param("seed", 12).with_param("samples", 5)
    assert c.seed == 12 and isinstance(c.seed, int) and c.samples == 5


# -- sweep -------------------------------------------------------------------

def test_row_complete_or_marked():
    row = evaluate_point(ExperimentConfig(eta=0.5, g=0.1, samples=100))
    assert set(row) == set(FIELDS)
    assert row["p_approx"] is None and row["status"].startswith("skipped: p_approx")
    assert row["p_exact"] is not None
    ok = evaluate_point(ExperimentConfig(samples=100))
    assert ok["status"] == "ok" and all(ok[f] is not None for f in FIELDS)


def test_sweep_over_g_shape():
    cfg = parse_config({"eta": 1e-3, "samples": 200,
                        "sweep": {"param": "g", "start": 0.01, "stop": math.pi / 2, "count": 40}})
    rows = run_sweep(cfg)
    assert [r["g"] for r in rows] == pytest.approx(list(np.linspace(0.01, math.pi / 2, 40)))
    p = [r["p_exact"] for r in rows]
    assert p[-1] == pytest.approx(0, abs=1e-15)
    assert max(p) / rows[0]["p_idp"] > 0.99
    # rises as g decreases, until g approaches 10 eta
    upper = [pi for r, pi in zip(rows, p) if r["g"] >= 0.05]
    assert all(a >= b for a, b in zip(upper, upper[1:]))
    # mean beta_B follows 1 + const / g^2
    for r in rows:
        expected = 1 + (2 / r["g"]) ** 2 * 2 * r["eps"] ** 2 / r["delta_f_mag"] ** 2
        assert abs(r["mean_beta_b"] - expected) <= 4 * r["std_error_b"]


def test_sweep_order_independent_of_workers():
    cfg = parse_config({"samples": 500, "sweep": {"param": "eps", "start": 1e-4, "stop": 1e-2,
                                                  "count": 7, "spacing": "log"}})
    assert run_sweep(cfg, workers=1) == run_sweep(cfg, workers=4)


# -- emit --------------------------------------------------------------------

_doubles = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=5, deadline=None)
@given(st.lists(st.lists(_doubles, min_size=3, max_size=3), min_size=100, max_size=100))
def test_round_trip_100_rows(values):
    fields = ("a", "b", "c")
    rows = [dict(zip(fields, v)) for v in values]
    for fmt, parse in (("csv", parse_csv), ("jsonl", parse_jsonl)):
        meta, back = parse(render(rows, fmt, {"seed": 1}, fields))
        assert meta["seed"] in ("1", 1)
        for r, b in zip(rows, back):
            for f in fields:
                assert float(b[f]) == r[f]  # bit-identical doubles


def test_empty_stream_has_header_only():
    text = render([], "csv", {"seed": 0})
    assert text.splitlines()[-1] == ",".join(FIELDS)
    assert parse_csv(text)[1] == []
    assert parse_jsonl(render([], "jsonl", {"seed": 0})) == ({"seed": 0}, [])


def test_unbounded_values_serialize_as_inf():
    rows = [{"a": math.inf, "b": None, "c": 0.1}]
    text = render(rows, "csv", {}, ("a", "b", "c"))
    assert text.splitlines()[1] == "inf,,0.10000000000000001"
    line = render(rows, "jsonl", {}, ("a", "b", "c")).splitlines()[1]
    assert json.loads(line)["a"] == "inf"
    assert parse_jsonl(render(rows, "jsonl", {}, ("a", "b", "c")))[1][0]["a"] == math.inf


def test_csv_uses_crlf_and_metadata_comments():
    text = render([{"a": 1.5}], "csv", {"seed": 3, "rng_algorithm": "x"}, ("a",))
    assert text.startswith("# seed: 3\r\n# rng_algorithm: x\r\n")
    assert data_section(text) == "a\r\n1.5\r\n"


def test_emit_unwritable_destination(tmp_path):
    with pytest.raises(OSError):
        emit([], "csv", tmp_path / "missing" / "out.csv")


# -- cli ---------------------------------------------------------------------

def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"g": 0.1, "typo": 2}')
    assert cli.main(["sweep", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert "field 'typo'" in capsys.readouterr().err
    assert cli.main(["sweep", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_IO
    assert cli.main(["sweep", "--out", str(tmp_path / "no" / "x.csv")]) == cli.EXIT_IO
    assert cli.main(["sweep", "--format", "xml"]) == cli.EXIT_CONFIG
    assert cli.main(["mc-beta", "--seed", "-1"]) == cli.EXIT_CONFIG


def test_cli_sweep_to_stdout_and_seed_override(capsys):
    assert cli.main(["sweep", "--seed", "42", "--quick"]) == 0
    meta, rows = parse_csv(capsys.readouterr().out)
    assert meta["seed"] == "42" and "Philox" in meta["rng_algorithm"]
    assert meta["artifact_version"]
    assert rows[0]["seed"] == 42 and rows[0]["samples"] == 1000


def test_cli_mc_beta_and_idp(tmp_path):
    out = tmp_path / "mc.jsonl"
    assert cli.main(["mc-beta", "--format", "jsonl", "--out", str(out), "--seed", "1"]) == 0
    meta, rows = parse_jsonl(out.read_text())
    assert meta["seed"] == 1
    assert abs(rows[0]["mean_beta_a"] - 3) <= 3 * rows[0]["std_error_a"]
    cfg = tmp_path / "idp.json"
    cfg.write_text('{"sweep": {"param": "eta", "start": 0.01, "stop": 1, "count": 3, "spacing": "log"}}')
    out = tmp_path / "idp.csv"
    assert cli.main(["idp", "--config", str(cfg), "--out", str(out)]) == 0
    _, rows = parse_csv(out.read_text())
    assert [r["eta_re"] for r in rows] == pytest.approx([0.01, 0.1, 1])
    assert rows[0]["p_idp"] == pytest.approx(1 - 1 / math.sqrt(1.0002))


# -- verify ------------------------------------------------------------------

def test_verify_covers_every_module():
    assert {c.module for c in verify.CHECKS} == set(verify.MODULES)


def test_verify_exit_zero_when_checks_pass(monkeypatch):
    passing = [c for c in verify.CHECKS if c.name not in KNOWN_DEFECT_CHECKS]
    monkeypatch.setattr(verify, "CHECKS", passing)
    assert verify.run_verify(quick=True, stream=io.StringIO()) == 0


def test_verify_names_failing_checks():
    stream = io.StringIO()
    status = verify.run_verify(quick=True, stream=stream)
    table = stream.getvalue()
    assert status == 1  # the checks encoding the known formula defects fail on this build
    failed = table.splitlines()[-1]
    assert failed.startswith("failed: ")
    assert set(failed[len("failed: "):].split(", ")) == KNOWN_DEFECT_CHECKS


def test_verify_catches_printed_coefficient_fault(monkeypatch):
    true_coeffs = weak.bloch_update_coeffs

    def printed(k_A, k_B, f, n, g):
        c = true_coeffs(k_A, k_B, f, n, g)
        m = float(np.dot(n, k_B))
        d = c.alpha1 + c.alpha2 * m + c.alpha3
        return weak.UpdateCoeffs(c.c1, (c.alpha2 + c.alpha3 * m) / d, c.c3,
                                 c.alpha1, c.alpha2, c.alpha3, c.alpha4)

    target = [c for c in verify.CHECKS if c.name.startswith("update-coefficient")]
    monkeypatch.setattr(verify, "CHECKS", target)
    assert verify.run_verify(quick=True, stream=io.StringIO()) == 0
    monkeypatch.setattr(weak, "bloch_update_coeffs", printed)
    stream = io.StringIO()
    assert verify.run_verify(quick=True, stream=stream) == 1
    assert "failed: update-coefficient reconstruction" in stream.getvalue()
    assert cli.main(["verify", "--quick"]) == 1
