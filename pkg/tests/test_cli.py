"""CLI dispatch, cache semantics, and report serialization."""

import json
import os
import threading

import pytest
from click.testing import CliRunner

from shintani import cli
from shintani.cli import Config, cache_roundtrip, emit_report, parallel_map


def run(args, **kw):
    return CliRunner().invoke(cli.main, args, catch_exceptions=False, **kw)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def test_class_number_command():
    r = run(["class-number", "23"])
    assert r.exit_code == 0
    payload = json.loads(r.output)
    assert payload == [{"D": 23, "H": "3"}]


def test_classes_square_regime():
    r = run(["classes", "--disc", "9"])
    assert r.exit_code == 0
    payload = json.loads(r.output)[0]
    assert payload["regime"] == "square"
    assert payload["reps"] == [[0, 3, 0], [0, 3, 1], [0, 3, 2]]


def test_chi_command():
    r = run(["chi", "--delta", "-3", "--form", "0,3,2"])
    assert json.loads(r.output)[0]["chi"] == -1


def test_usage_error_exit_code():
    r = run(["chi", "--delta", "-3", "--form", "zzz"])
    assert r.exit_code == 2
    r = CliRunner().invoke(cli.main, ["no-such-command"])
    assert r.exit_code == 2


def test_verify_hecke_single():
    r = run(["--precision", "25", "verify", "--identity", "hecke",
             "--delta", "-4", "--D", "3"])
    assert r.exit_code == 0
    rows = json.loads(r.output)
    assert len(rows) == 1
    row = rows[0]
    assert row["identity_id"] == "hecke"
    assert float(row["target"]) == 2.0
    assert row["pass"] is True


def test_verify_tolerance_override_failure_exit():
    r = CliRunner().invoke(cli.main,
                           ["--tolerance", "1e-40", "verify", "--identity",
                            "class-number", "--delta", "-3"],
                           catch_exceptions=False)
    # the L1 route cannot hit 1e-40, so the suite must fail with exit 1
    assert r.exit_code == 1


def test_cm_trace_command():
    r = run(["cm-trace", "--delta", "1", "--D", "-4", "--F", "J"])
    row = json.loads(r.output)[0]
    assert abs(float(row["value"]) - 492) < 1e-8


def test_e32_command():
    r = run(["e32", "--dmax", "4"])
    rows = json.loads(r.output)
    assert rows[0] == {"D": 0, "H": "-1/12"}
    assert rows[3]["H"] == "1/3"


def test_eta_check_command():
    r = run(["eta-check", "--k", "0", "--samples", "3"])
    rows = json.loads(r.output)
    assert rows
    for row in rows:
        assert float(row["xi_error"]) < 1e-6
        assert float(row["laplace_error"]) < 1e-4


def test_theta_command():
    r = run(["theta", "--delta", "-3", "--radius", "12"])
    row = json.loads(r.output)[0]
    assert "value.re" in row and "tail_bound" in row


def test_f_series_command():
    r = run(["f-series", "--delta", "-3", "--dmax", "1"])
    rows = json.loads(r.output)
    assert rows[0]["index"] == -3 and float(rows[0]["coefficient"]) == 1.0
    assert abs(float(rows[1]["coefficient"]) + 248) < 1e-6
    assert abs(float(rows[1]["imag_residual"])) < 1e-8


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def test_cache_write_then_read_identical(tmp_path):
    cfg = Config(cache_dir=str(tmp_path))
    calls = []

    def compute():
        calls.append(1)
        return {"x": 1, "y": "2/3"}

    v1 = cache_roundtrip(cfg, "op", {"a": 1}, compute)
    v2 = cache_roundtrip(cfg, "op", {"a": 1}, compute)
    assert v1 == v2 and len(calls) == 1
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    raw1 = files[0].read_bytes()
    cache_roundtrip(cfg, "op", {"a": 1}, compute)
    assert files[0].read_bytes() == raw1


def test_cache_version_bump_invalidates(tmp_path, monkeypatch):
    cfg = Config(cache_dir=str(tmp_path))
    calls = []
    compute = lambda: calls.append(1) or 7
    cache_roundtrip(cfg, "op", {}, compute)
    monkeypatch.setattr(cli, "CODE_VERSION", "999.0")
    cache_roundtrip(cfg, "op", {}, compute)
    assert len(calls) == 2


def test_cache_corrupt_recomputes(tmp_path, capsys):
    cfg = Config(cache_dir=str(tmp_path))
    cache_roundtrip(cfg, "op", {"a": 2}, lambda: 5)
    path = cli.cache_path(cfg, "op", {"a": 2})
    with open(path, "w") as fh:
        fh.write("{ not json")
    assert cache_roundtrip(cfg, "op", {"a": 2}, lambda: 6) == 6


def test_cache_atomic_under_concurrent_readers(tmp_path, monkeypatch):
    # readers see either the old or the new complete file, never a partial:
    # every write goes to a temp file followed by an atomic rename
    cfg = Config(cache_dir=str(tmp_path))
    big = {"data": list(range(5000))}
    cache_roundtrip(cfg, "op", {"a": 3}, lambda: big)
    path = cli.cache_path(cfg, "op", {"a": 3})
    stop = threading.Event()
    bad = []

    def reader():
        while not stop.is_set():
            try:
                with open(path) as fh:
                    payload = json.load(fh)
                if payload["value"] != big:
                    bad.append(payload)
            except (json.JSONDecodeError, OSError) as exc:
                bad.append(repr(exc))

    threads = [threading.Thread(target=reader) for _ in range(4)]
    for t in threads:
        t.start()
    # stale versions force a recompute and an atomic overwrite each round
    for i in range(20):
        monkeypatch.setattr(cli, "CODE_VERSION", f"bump-{i}")
        cache_roundtrip(cfg, "op", {"a": 3}, lambda: big)
    stop.set()
    for t in threads:
        t.join()
    assert not bad


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def test_emit_empty_json(capsys):
    emit_report([], "json")
    assert capsys.readouterr().out.strip() == "[]"


def test_report_roundtrip(capsys):
    emit_report([{"a": 1.5, "b": "x", "c": {"d": 2}}], "json")
    out = capsys.readouterr().out
    assert json.loads(out) == [{"a": "1.5", "b": "x", "c.d": 2}]


def test_csv_header_matches_json_keys(capsys):
    rows = [{"a": 1, "b": 2.0, "c": "z"}]
    emit_report(rows, "json")
    json_keys = list(json.loads(capsys.readouterr().out)[0].keys())
    emit_report(rows, "csv")
    header = capsys.readouterr().out.splitlines()[0].split(",")
    assert header == json_keys


def test_float_seventeen_digits(capsys):
    import math
    emit_report([{"x": math.pi}], "json")
    out = json.loads(capsys.readouterr().out)[0]["x"]
    assert out == format(math.pi, ".17g")


def test_determinism_across_threads():
    cfg1 = Config(threads=1)
    sq = lambda n: n * n
    assert parallel_map(sq, range(20), 1) == parallel_map(sq, range(20), 4)


def test_config_validation():
    with pytest.raises(ValueError):
        Config(precision_digits=5)
    with pytest.raises(ValueError):
        Config(threads=0)


def test_env_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("SHINTANI_CACHE_DIR", str(tmp_path))
    r = run(["class-number", "12"])
    assert r.exit_code == 0
    assert list(tmp_path.iterdir())


def test_verify_byte_identical_across_thread_counts():
    args = ["verify", "--identity", "class-number", "--delta", "-3",
            "--delta", "-4"]
    # runtime_ms varies between runs; compare with it masked
    import re
    def masked(threads):
        r = run(["--threads", str(threads)] + args)
        assert r.exit_code == 0
        return re.sub(r'"runtime_ms": "\d+"?|"runtime_ms": \d+', '"runtime_ms": 0',
                      r.output)
    assert masked(1) == masked(3)


def test_lift_coeff_command():
    r = run(["lift-coeff", "--delta", "-4", "--D", "3", "--grid", "5",
             "--radius", "28"])
    row = json.loads(r.output)[0]
    assert abs(float(row["coefficient"]) - float(row["target"])) < 5e-2
