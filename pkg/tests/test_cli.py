"""Command-line surface: exit codes, JSON report round-tripping, input file
parsing, and the reproduction diff.
"""

import io
import json
from fractions import Fraction
from types import SimpleNamespace

import pytest

import parreg.cli as cli
from parreg.classify import (
    EquationSpec,
    SystemSpec,
    classify_equation,
    classify_system,
)
from parreg.cli import (
    EXIT_BUDGET,
    EXIT_DIFF,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    decode_value,
    encode_value,
    main,
    parse_rational,
    read_matrix_file,
    read_rows_file,
)
from parreg.witness import WitnessPrime


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


# ---------------------------------------------------------------------------
# JSON codec


def roundtrip(v):
    return decode_value(json.loads(json.dumps(encode_value(v))))


def test_codec_scalars_and_containers():
    cases = [
        None,
        True,
        7,
        -3,
        "text",
        1.5,
        Fraction(-3, 7),
        (1, (2, 3), Fraction(1, 2)),
        frozenset({1, 2, 3}),
        [1, [2], {"k": (1, 2)}],
        {"plain": 1, "nested": {"deep": Fraction(9, 4)}},
        {(0, 1): 5, (2,): Fraction(1, 3)},
        WitnessPrime(43, 2, ((Fraction(2), False), (Fraction(3), False)), True),
        EquationSpec(2, 3, 1, 1, 2),
        SystemSpec(((16, 17, 1), (33, 4063, 1)), 8),
    ]
    for v in cases:
        assert roundtrip(v) == v


def test_codec_verdicts_exact():
    small = SimpleNamespace(witness_bound=5000)
    verdicts = [
        classify_equation(EquationSpec(2, 3, 1, 1, 2)),
        classify_equation(EquationSpec(1, 7, 1, 1, 3)),
        classify_equation(EquationSpec(1, 1, -1, 1, 3)),
        classify_equation(EquationSpec(3, 13, 1, 1, 8), config=small),
        classify_system(SystemSpec(((1, 2, 1), (2, 4, 2)), 2)),
        classify_system(SystemSpec(((16, 17, 1), (33, 4063, 1)), 8), config=small),
    ]
    for v in verdicts:
        back = roundtrip(v)
        assert back == v
        assert back.certificates == v.certificates


def test_codec_rejects_unknown_type():
    with pytest.raises(TypeError):
        encode_value(object())


# ---------------------------------------------------------------------------
# config


def test_config_validation():
    with pytest.raises(cli.DegenerateInput):
        RunConfig(witness_bound=0)
    with pytest.raises(cli.DegenerateInput):
        RunConfig(threads=-1)
    assert run(["classify", "2", "3", "1", "1", "2", "--bound", "-5"])[0] == EXIT_USAGE
    assert run(["classify", "2", "3", "1", "1", "2", "--threads", "-1"])[0] == EXIT_USAGE


# ---------------------------------------------------------------------------
# classify / system


def test_classify_text():
    code, text = run(["classify", "2", "3", "1", "1", "2"])
    assert code == EXIT_OK
    assert "equation 2x + 3y = 1 w^1 z^2" in text
    assert "N: NOT_PR" in text and "Q\\{0}: NOT_PR" in text
    assert "[R7] square NOT_PR over Q" in text
    assert "p=43" in text and "(supporting)" in text


def test_classify_json_report():
    code, text = run(["classify", "2", "3", "1", "1", "2", "--json"])
    assert code == EXIT_OK
    rep = json.loads(text)
    assert rep["schema"] == "parreg-report/1"
    assert rep["command"] == "classify"
    assert rep["config"]["output"] == "json"
    v = decode_value(rep["result"])
    assert v == classify_equation(EquationSpec(2, 3, 1, 1, 2))


def test_classify_rejects_degenerate():
    assert run(["classify", "0", "1", "1", "1", "1"])[0] == EXIT_USAGE
    assert run(["classify", "1", "1", "1", "0", "1"])[0] == EXIT_USAGE


def test_argparse_usage_errors():
    assert main(["classify", "1", "2"]) == EXIT_USAGE  # missing arguments
    assert main(["no-such-command"]) == EXIT_USAGE


def test_system_from_file(tmp_path):
    rows = tmp_path / "rows.txt"
    rows.write_text("# obstructed pair\n16 17 1\n33 4063 1  # second row\n")
    code, text = run(["system", str(rows), "8", "--bound", "2000"])
    assert code == EXIT_OK
    assert "system n=8 rows (16,17,1); (33,4063,1)" in text
    assert "[S3] system_intersection NOT_PR over Z I={33}" in text
    assert "p=23" in text
    assert "reason: Q:system:scope-Z-only" in text


def test_system_file_errors(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing but comments\n")
    assert run(["system", str(empty), "2"])[0] == EXIT_USAGE
    short = tmp_path / "short.txt"
    short.write_text("1 2\n")
    assert run(["system", str(short), "2"])[0] == EXIT_USAGE
    frac = tmp_path / "frac.txt"
    frac.write_text("1/2 1 1\n")
    assert run(["system", str(frac), "2"])[0] == EXIT_USAGE
    assert run(["system", str(tmp_path / "missing.txt"), "2"])[0] == EXIT_USAGE


# ---------------------------------------------------------------------------
# witness / verify


def test_witness_command():
    code, text = run(["witness", "2", "2", "3", "5"])
    assert code == EXIT_OK
    assert "witness prime 43 (n=2)" in text
    assert "2: n-th power residue = False" in text


def test_witness_exhausted():
    code, text = run(["witness", "8", "3", "13", "16", "--bound", "20000"])
    assert code == EXIT_OK
    assert "no witness prime <= 20000" in text


def test_witness_bad_target():
    assert run(["witness", "2", "abc"])[0] == EXIT_USAGE
    assert run(["witness", "2", "0"])[0] == EXIT_USAGE


def test_verify_needs_a_coloring():
    assert run(["verify", "1", "1", "1", "1", "1"])[0] == EXIT_USAGE


def test_verify_valuation_coloring():
    code, text = run(
        ["verify", "1", "1", "1", "1", "1", "--p", "43", "--lo", "1", "--hi", "50"]
    )
    assert code == EXIT_OK
    assert "box [1,50] engine=bucketed scanned=125000" in text
    assert "first (1, 1, 43, 44)" in text


def test_verify_json_result():
    code, text = run(
        [
            "verify", "1", "1", "1", "1", "1",
            "--p", "43", "--lo", "1", "--hi", "50", "--json",
        ]
    )
    assert code == EXIT_OK
    result = decode_value(json.loads(text)["result"])
    assert result["found"] == (1, 1, 43, 44)
    assert result["candidates_scanned"] == 125000
    assert result["subject"] == ("equation", 1, 1, 1, 1, 1)


def test_verify_mod_probe():
    code, text = run(
        [
            "verify", "1", "1", "1", "1", "1",
            "--mod", "3", "--lo", "1", "--hi", "12", "--stop-on-find",
        ]
    )
    assert code == EXIT_OK
    assert "monochromatic solutions: 1" in text


# ---------------------------------------------------------------------------
# columns


def test_columns_certified(tmp_path):
    mat = tmp_path / "m.txt"
    mat.write_text("# Schur triple\n1 1 -1\n")
    code, text = run(["columns", str(mat)])
    assert code == EXIT_OK
    assert "columns condition holds" in text
    assert "C1 = {1, 3}" in text
    assert "C2 = {2}" in text


def test_columns_refused(tmp_path):
    mat = tmp_path / "m.txt"
    mat.write_text("2 3 -1\n")
    code, text = run(["columns", str(mat)])
    assert code == EXIT_OK
    assert "no columns-condition certificate" in text


def test_columns_rational_entries(tmp_path):
    mat = tmp_path / "m.txt"
    mat.write_text("1/2 1/2 -1/2\n")
    code, text = run(["columns", str(mat), "--json"])
    assert code == EXIT_OK
    result = decode_value(json.loads(text)["result"])
    assert result["ordered_partition"][0] == frozenset({1, 3})


def test_columns_dimension_budget(tmp_path):
    mat = tmp_path / "wide.txt"
    mat.write_text(" ".join(["1"] * 17) + "\n")
    assert run(["columns", str(mat)])[0] == EXIT_BUDGET


# ---------------------------------------------------------------------------
# density


def test_density_single_target():
    code, text = run(["density", "3", "2", "--bound", "1000"])
    assert code == EXIT_OK
    assert "admissible=167 hits=111 density=111/167" in text


def test_density_joint():
    code, text = run(["density", "4", "36", "9", "--bound", "1000"])
    assert code == EXIT_OK
    assert "targets 36, 9 n=4 bound=1000" in text
    assert "none=" in text


def test_density_csv(tmp_path):
    path = tmp_path / "rows.csv"
    code, text = run(["density", "2", "2", "3", "--bound", "100", "--csv", str(path)])
    assert code == EXIT_OK
    assert f"wrote 23 rows to {path}" in text
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "prime,mod24,hit_2,hit_3"
    assert len(lines) == 24


# ---------------------------------------------------------------------------
# sieve cache plumbing


def test_sieve_cache_flag(tmp_path):
    cache = tmp_path / "primes.bin"
    code, text = run(
        ["witness", "2", "2", "3", "5", "--bound", "5000", "--sieve-cache", str(cache)]
    )
    assert code == EXIT_OK and "witness prime 43" in text
    assert cache.exists()


def test_sieve_cache_env(tmp_path, monkeypatch):
    cache = tmp_path / "env_primes.bin"
    monkeypatch.setenv("PARREG_SIEVE_CACHE", str(cache))
    code, text = run(["witness", "2", "2", "3", "5", "--bound", "5000"])
    assert code == EXIT_OK and "witness prime 43" in text
    assert cache.exists()


# ---------------------------------------------------------------------------
# reproduce


def test_reproduce_matches_fixture():
    code, text = run(["reproduce"])
    assert code == EXIT_OK
    assert "21/21 rows match" in text
    assert text.count("PASS") == 21
    assert "FAIL" not in text


def test_reproduce_diff_detected(monkeypatch):
    monkeypatch.setattr(
        cli, "reproduction_table", lambda config, prime_sieve=None: {"x": 1, "y": 2}
    )
    monkeypatch.setattr(cli, "_fixture", lambda: {"x": 1, "y": 3})
    code, text = run(["reproduce"])
    assert code == EXIT_DIFF
    assert "PASS  x" in text and "FAIL  y" in text
    assert "1/2 rows match" in text


def test_reproduce_emit(monkeypatch):
    monkeypatch.setattr(
        cli, "reproduction_table", lambda config, prime_sieve=None: {"x": 1}
    )
    code, text = run(["reproduce", "--emit"])
    assert code == EXIT_OK
    assert json.loads(text) == {"x": 1}


# ---------------------------------------------------------------------------
# parsing helpers


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-7") == Fraction(-7)
    with pytest.raises(cli.DegenerateInput):
        parse_rational("x")
    with pytest.raises(cli.DegenerateInput):
        parse_rational("1/0")


def test_read_files_strip_comments(tmp_path):
    mat = tmp_path / "m.txt"
    mat.write_text("# leading comment\n1 1 -1  # trailing\n\n2 0 1\n")
    M = read_matrix_file(str(mat))
    assert M.entries == ((Fraction(1), Fraction(1), Fraction(-1)),
                         (Fraction(2), Fraction(0), Fraction(1)))
    rows = tmp_path / "r.txt"
    rows.write_text("1 -1 1\n2 3 1\n")
    assert read_rows_file(str(rows)) == ((1, -1, 1), (2, 3, 1))


def test_error_messages_go_to_stderr(capsys):
    code = main(["classify", "0", "1", "1", "1", "1"])
    assert code == EXIT_USAGE
    captured = capsys.readouterr()
    assert "error:" in captured.err
