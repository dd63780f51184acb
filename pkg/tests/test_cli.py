"""Command line behaviour: output formats, exit codes, error routing."""

import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from symnabla.cli import build_parser, main
from symnabla.errors import TransportError
from symnabla.oeis import parse_bfile

FIXTURES = Path(__file__).parent / "fixtures"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_term_plain(capsys):
    code, out, err = run_cli(capsys, "term", "--k", "8", "--n", "1883")
    assert (code, out, err) == (0, "4997448\n", "")


def test_term_methods_agree(capsys):
    for method in ("auto", "brute", "matrix", "reduce"):
        code, out, _ = run_cli(
            capsys, "term", "--k", "8", "--n", "59", "--method", method
        )
        assert code == 0 and out == "13624\n"


def test_term_json(capsys):
    code, out, _ = run_cli(capsys, "term", "--k", "8", "--n", "27", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload == {"k": 8, "n": 27, "method": "auto", "value": 2216}


def test_seq_plain(capsys):
    code, out, _ = run_cli(capsys, "seq", "--k", "1", "--limit", "5")
    assert code == 0 and out == "1 1 1 1 1 1\n"


def test_seq_csv(capsys):
    code, out, _ = run_cli(
        capsys, "seq", "--k", "4", "--limit", "4", "--format", "csv"
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "value"]
    assert rows[1:] == [["0", "1"], ["1", "4"], ["2", "4"], ["3", "12"], ["4", "4"]]


def test_seq_bfile_roundtrips(capsys):
    code, out, _ = run_cli(
        capsys, "seq", "--k", "2", "--limit", "8", "--format", "bfile"
    )
    assert code == 0
    bf = parse_bfile(out)
    assert bf.as_dict() == {0: 1, 1: 2, 2: 2, 3: 4, 4: 2, 5: 4, 6: 4, 7: 8, 8: 2}


def test_seq_json(capsys):
    code, out, _ = run_cli(
        capsys, "seq", "--k", "8", "--limit", "3", "--format", "json"
    )
    payload = json.loads(out)
    assert payload == {"k": 8, "method": "auto", "values": [1, 8, 8, 48]}


def test_sparse_rows(capsys):
    code, out, _ = run_cli(capsys, "sparse", "--k", "8", "--count", "4")
    assert code == 0 and out == "1 8 48 296\n"
    code, out, _ = run_cli(capsys, "sparse", "--k", "7", "--count", "4")
    assert code == 0 and out == "1 7 43 265\n"


def test_sparse_bfile_indexes_by_exponent(capsys):
    code, out, _ = run_cli(
        capsys, "sparse", "--k", "8", "--count", "3", "--format", "bfile"
    )
    assert out == "0 1\n1 8\n2 48\n"


def test_chains_plain(capsys):
    code, out, _ = run_cli(capsys, "chains", "--k", "8", "--n", "1")
    assert code == 0
    assert out.splitlines() == [
        "A base=1 len=4",
        "A base=3 len=2",
        "C base=5 len=1",
        "C base=7 len=1",
    ]


def test_chains_json(capsys):
    code, out, _ = run_cli(
        capsys, "chains", "--k", "8", "--n", "2", "--format", "json"
    )
    payload = json.loads(out)
    assert len(payload) == 18
    assert payload[0] == {"kind": "A", "base": "1", "length": 2}
    assert sum(c["length"] for c in payload) == 48


def test_structure_plain(capsys):
    code, out, _ = run_cli(capsys, "structure", "--k", "8", "--n", "2")
    assert code == 0 and out == "(32,10,12,4,4)\n"


def test_structure_json(capsys):
    code, out, _ = run_cli(
        capsys, "structure", "--k", "8", "--n", "2", "--format", "json"
    )
    payload = json.loads(out)
    assert payload == {
        "k": 8,
        "t": 2,
        "b": 32,
        "c": 10,
        "u": 12,
        "v": 4,
        "r": 4,
    }


def test_structure_small_k(capsys):
    code, out, _ = run_cli(capsys, "structure", "--k", "5", "--n", "2")
    assert code == 0
    assert out.count(",") == 2  # three components below k = 8


def test_verify_pass(capsys):
    code, out, _ = run_cli(capsys, "verify", "--k", "8", "--max-n", "4")
    assert code == 0
    assert out.startswith("PASS k=8 powers 0..4")


def test_verify_json(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--k", "7", "--max-n", "5", "--format", "json"
    )
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["k"] == 7
    assert len(payload["vectors"]) == 6
    assert payload["failures"] == []


def test_reduce_plain_with_trace(capsys):
    code, out, _ = run_cli(capsys, "reduce", "--n", "27", "--trace")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n=27 bits=11011 rule=suffix_011 value=2216"
    assert lines[-1] == "value 2216"


def test_reduce_plain_no_trace(capsys):
    code, out, _ = run_cli(capsys, "reduce", "--n", "27")
    assert (code, out) == (0, "value 2216\n")


def test_reduce_json_with_trace(capsys):
    code, out, _ = run_cli(
        capsys, "reduce", "--n", "27", "--trace", "--format", "json"
    )
    payload = json.loads(out)
    assert payload["n"] == 27 and payload["value"] == 2216
    assert payload["trace"]["rule"] == "suffix_011"


def test_reduce_optional_rules(capsys):
    code, out, _ = run_cli(capsys, "reduce", "--n", "1883", "--optional-rules")
    assert (code, out) == (0, "value 4997448\n")


def test_oeis_agree(capsys):
    code, out, _ = run_cli(
        capsys,
        "oeis",
        "--k",
        "2",
        "--bfile",
        str(FIXTURES / "b001316.txt"),
        "--limit",
        "16",
    )
    assert (code, out) == (0, "AGREE 0..16\n")


def test_oeis_defaults_to_full_coverage(capsys):
    code, out, _ = run_cli(
        capsys, "oeis", "--k", "3", "--bfile", str(FIXTURES / "b048883.txt")
    )
    assert (code, out) == (0, "AGREE 0..63\n")


def test_oeis_json(capsys):
    code, out, _ = run_cli(
        capsys,
        "oeis",
        "--k",
        "1",
        "--bfile",
        str(FIXTURES / "b000012.txt"),
        "--limit",
        "10",
        "--format",
        "json",
    )
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["sequence_id"] == "A000012"
    assert payload["limit"] == 10


def test_oeis_mismatch_exits_4(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 2\n2 2\n3 5\n")
    code, out, _ = run_cli(
        capsys, "oeis", "--k", "2", "--bfile", str(bad), "--limit", "3"
    )
    assert code == 4
    assert out == "MISMATCH at n=3: computed 4, b-file 5\n"


def test_oeis_missing_file_exits_2(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "oeis", "--k", "2", "--bfile", str(tmp_path / "nope.txt")
    )
    assert code == 2
    assert err.startswith("error:")


def test_oeis_fetch_without_network_exits_2(capsys, tmp_path, monkeypatch):
    def refuse(*args, **kwargs):
        raise TransportError("no network in tests")

    monkeypatch.setattr("symnabla.cli.fetch_bfile", refuse)
    code, _, err = run_cli(
        capsys, "oeis", "--k", "2", "--fetch", "--cache-dir", str(tmp_path)
    )
    assert code == 2
    assert "no network in tests" in err


def test_oeis_fetch_uses_cache(capsys, tmp_path):
    cache = tmp_path / "cache"
    cache.mkdir()
    src = (FIXTURES / "b001316.txt").read_text()
    (cache / "b001316.txt").write_text(src)
    code, out, _ = run_cli(
        capsys,
        "oeis",
        "--k",
        "2",
        "--fetch",
        "--cache-dir",
        str(cache),
        "--limit",
        "20",
    )
    assert (code, out) == (0, "AGREE 0..20\n")


def test_domain_error_exits_2(capsys):
    code, _, err = run_cli(capsys, "term", "--k", "0", "--n", "1")
    assert code == 2
    assert err == "error: k must be in 1..64, got 0\n"


def test_size_limit_exits_3(capsys):
    code, _, err = run_cli(
        capsys,
        "term",
        "--k",
        "8",
        "--n",
        "511",
        "--method",
        "brute",
        "--max-elements",
        "1000",
    )
    assert code == 3
    assert "over the cap 1000" in err


def test_verify_failure_exits_4(capsys, monkeypatch):
    """A doctored verification report routes to exit code 4."""
    import symnabla.cli as cli_mod

    class FakeReport:
        ok = False
        failures = ()
        vectors = ()

        def summary(self):
            return "FAIL fabricated"

    monkeypatch.setattr(cli_mod, "verify_transfer", lambda *a, **kw: FakeReport())
    code, out, _ = run_cli(capsys, "verify", "--k", "8", "--max-n", "2")
    assert code == 4
    assert out == "FAIL fabricated\n"


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["term", "--k", "8"])  # missing --n
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["sparse", "--k", "8", "--count", "3", "--format", "nonsense"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["oeis", "--k", "2"])  # needs --bfile or --fetch
    assert exc.value.code == 2


def test_chains_format_excludes_bfile():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["chains", "--k", "8", "--n", "1", "--format", "bfile"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "symnabla", "term", "--k", "8", "--n", "27"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "2216\n"


def test_console_script_help():
    proc = subprocess.run(
        [sys.executable, "-m", "symnabla", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    for name in ("term", "seq", "sparse", "chains", "structure", "verify", "reduce"):
        assert name in proc.stdout
