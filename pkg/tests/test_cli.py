import csv
import io
import json

from motive_forge.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--json")
    return code, json.loads(out), err


QUINTIC = (5, 1, 1, 1, 1, 1)
OCTIC = (8, 1, 1, 2, 2, 2)


def test_weights_list_csv():
    code, out, err = run("weights", "list", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:6] == ["m", "q1", "q2", "q3", "q4", "q5"]
    assert len(rows) == 148
    assert "1806" in err  # the note on the largest pair goes to stderr


def test_weights_list_json_notes():
    code, doc, err = run_json("weights", "list")
    assert code == 0 and doc["schema"] == 1 and doc["count"] == 147
    assert doc["notes"] and err == ""
    assert max(r["m"] for r in doc["rows"]) == 1806


def test_global_flags_before_verb():
    code, out, _ = run("--format", "csv", "weights", "list")
    assert code == 0
    assert out.startswith("m,q1")
    code, out, _ = run("--json", "weights", "check", *QUINTIC)
    assert json.loads(out)["admissible"] is True


def test_inadmissible_pair_exit_2():
    code, out, err = run("weights", "check", 5, 1, 1, 1, 1, 2)
    assert code == 2 and out == ""
    assert "inadmissible pair" in err and "condition" in err


def test_usage_error_exit_2():
    assert run("weights")[0] == 2
    assert run("weights", "check", 5, 1, 1)[0] == 2
    assert run("bogus")[0] == 2


def test_weights_summary_octic():
    code, doc, _ = run_json("weights", "summary", *OCTIC)
    assert code == 0
    assert (doc["h11"], doc["h21"]) == (2, 86)


def test_motives_table_octic():
    code, doc, _ = run_json("motives", "table", *OCTIC)
    assert code == 0
    assert len(doc["rows"]) == 16


def test_mirror_commands():
    code, doc, _ = run_json("mirror", "invariants", *OCTIC)
    assert code == 0 and doc["ok"]
    code, doc, _ = run_json("mirror", "group", *QUINTIC)
    assert code == 0 and doc["order"] == 125


def test_monomials_commands():
    code, doc, _ = run_json("monomials", "classify", *QUINTIC)
    assert code == 0 and doc["classes"] == 6
    code, out, _ = run("monomials", "correspond", *OCTIC)
    assert code == 0 and "ConifoldOnly" in out


def test_polytope_commands():
    code, doc, _ = run_json("polytope", "hodge", *OCTIC)
    assert code == 0 and doc["ok"]
    code, doc, _ = run_json("polytope", "info", *QUINTIC)
    assert code == 0


def test_zeta_factors_and_big_ints():
    # 461^6 > 2^53, so the top coefficients must be emitted as strings
    code, doc, _ = run_json("zeta", "factors", *QUINTIC, "--q", 461)
    assert code == 0 and doc["q"] == 461
    coeffs = [c for r in doc["rows"] for c in r["P3"]]
    assert [c for c in coeffs if isinstance(c, str)]
    for c in coeffs:
        if isinstance(c, int):
            assert abs(c) <= 2**53
        else:
            assert abs(int(c)) > 2**53


def test_zeta_needs_q():
    code, _, err = run("zeta", "factors", *QUINTIC)
    assert code == 2 and "--q" in err


def test_zeta_unsupported_field():
    code, _, err = run("zeta", "factors", *QUINTIC, "--q", 7)
    assert code == 2 and "q=7" in err


def test_zeta_count_routes():
    code, doc, _ = run_json("zeta", "count", *QUINTIC, "--q", 11, "--routes", "weil,brute")
    assert code == 0 and doc["N_motive"] == -461
    code, _, err = run("zeta", "count", *QUINTIC, "--q", 11, "--routes", "weil,magic")
    assert code == 2 and "magic" in err


def test_zeta_mirror_and_verify():
    code, doc, _ = run_json("zeta", "mirror", *QUINTIC, "--q", 11)
    assert code == 0 and doc["equal"] is True
    code, doc, _ = run_json("zeta", "verify", *QUINTIC, "--q", 11)
    assert code == 0 and doc["failed"] == 0


def test_padic_gk():
    code, doc, _ = run_json("padic", "gk", "--p", 7, "--prec", 10)
    assert code == 0 and len(doc["rows"]) == 5


def test_verify_all_default():
    code, doc, _ = run_json("verify-all")
    assert code == 0 and doc["failed"] == 0 and len(doc["fixtures"]) == 4


def test_verify_all_pair_requires_q():
    assert run("verify-all", "--pair", *QUINTIC)[0] == 2
    code, doc, _ = run_json("verify-all", "--pair", *OCTIC, "--q", 17)
    assert code == 0 and doc["checks"] > 0


def strip_hits(doc):
    return {k: v for k, v in doc.items() if k != "cache_hits"}


def test_cache_cold_and_warm_match(tmp_path):
    args = ("zeta", "factors", *OCTIC, "--q", 17, "--cache", tmp_path)
    _, cold, _ = run_json(*args)
    _, warm, _ = run_json(*args)
    assert cold["cache_hits"] == 0 and warm["cache_hits"] == len(warm["rows"])
    assert strip_hits(cold) == strip_hits(warm)
    assert (tmp_path / "factors-v1.txt").exists()


def test_cache_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("MOTIVE_FORGE_CACHE", str(tmp_path))
    run_json("zeta", "factors", *QUINTIC, "--q", 11)
    _, doc, _ = run_json("zeta", "factors", *QUINTIC, "--q", 11)
    assert doc["cache_hits"] == 3


def test_console_entry_point():
    import subprocess
    import sys
    cmd = [sys.executable, "-m", "motive_forge", "weights", "check", *map(str, QUINTIC)]
    res = subprocess.run(cmd, capture_output=True, text=True)
    assert res.returncode == 0 and "admissible" in res.stdout
