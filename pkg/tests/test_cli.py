"""End-to-end command line behaviour: exit codes, JSON stability, piping."""

from __future__ import annotations

import io
import json
import sys

import pytest

from multiarr.catalog import parse_fixture, shipped_fixture
from multiarr.cli import main
from multiarr.induction import clear_memo
from multiarr.rank2 import euler_multiplicity


def run_cli(capsys, argv: list[str], stdin_text: str | None = None):
    if stdin_text is not None:
        old_stdin = sys.stdin
        sys.stdin = io.StringIO(stdin_text)
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 0
    finally:
        if stdin_text is not None:
            sys.stdin = old_stdin
    out, err = capsys.readouterr()
    return code, out, err


def payload_of(out: str) -> dict:
    doc = json.loads(out)
    assert set(doc) == {"status", "payload"}
    return doc["payload"]


def test_lattice_human(capsys) -> None:
    code, out, _ = run_cli(capsys, ["lattice", "--spec", "A:3:3:0"])
    assert code == 0
    assert "9 hyperplanes in dimension 3" in out
    assert "flats per rank: 0: 1, 1: 9, 2: 12, 3: 1" in out


def test_lattice_rank_limit_json(capsys) -> None:
    code, out, _ = run_cli(capsys, ["lattice", "--spec", "A:3:3:0", "--max-rank", "1", "--json"])
    assert code == 0
    payload = payload_of(out)
    assert payload["counts"] == {"0": 1, "1": 9}
    assert all(f["rank"] <= 1 for f in payload["flats"])


def test_charpoly_output(capsys) -> None:
    code, out, _ = run_cli(capsys, ["charpoly", "--spec", "A:3:3:0"])
    assert code == 0
    assert "chi(A:3:3:0; t) = t^3 - 9*t^2 + 24*t - 16" in out
    assert "exponents {1, 4, 4}" in out
    code, out, _ = run_cli(capsys, ["charpoly", "--spec", "A:3:3:0", "--json"])
    assert payload_of(out)["coefficients"] == [-16, 24, -9, 1]


def test_json_bytes_are_input_determined(capsys) -> None:
    def snap() -> str:
        clear_memo()
        code, out, _ = run_cli(capsys, ["indfree", "--spec", "A:2:3:0", "--json"])
        assert code == 0
        return out

    first, second = snap(), snap()
    assert first == second
    assert '"verdict":"yes"' in first


def test_negative_verdict_exit_code(capsys) -> None:
    code, out, _ = run_cli(capsys, ["indfree", "--spec", "A:3:3:0"])
    assert code == 2
    assert "not inductively free" in out


def test_budget_exit_code(capsys) -> None:
    clear_memo()
    code, out, _ = run_cli(capsys, ["indfree", "--spec", "A:3:3:0", "--budget", "1"])
    assert code == 3
    assert "undecided within the budget" in out
    clear_memo()


def test_usage_errors_exit_one(capsys) -> None:
    code, _, err = run_cli(capsys, ["no-such-command"])
    assert code == 1 and "usage" in err
    code, _, err = run_cli(capsys, ["lattice"])
    assert code == 1 and "need an input" in err
    code, _, err = run_cli(capsys, ["lattice", "--spec", "A:3:x:0"])
    assert code == 1 and "expected integers" in err
    code, _, err = run_cli(capsys, ["lattice", "--spec", "A:3:3:0", "--fixture", "g33_a1"])
    assert code == 1 and "not allowed with" in err
    code, _, err = run_cli(capsys, ["lattice", "--fixture", "/nope/missing.arr"])
    assert code == 1 and "neither a file nor a shipped fixture" in err


def test_hyperplane_resolution_variants(capsys) -> None:
    # same hyperplane three ways: printed label, 1-based position, respelled scalar
    by_label = run_cli(capsys, ["ziegler", "--spec", "A:3:3:0", "--h0", "H_{1,2}(-z - 1)", "--json"])
    by_position = run_cli(capsys, ["ziegler", "--spec", "A:3:3:0", "--h0", "3", "--json"])
    by_expr = run_cli(capsys, ["ziegler", "--spec", "A:3:3:0", "--h0", "H_{1,2}(z^2)", "--json"])
    assert by_label[0] == by_position[0] == by_expr[0] == 0
    assert by_label[1] == by_position[1] == by_expr[1]
    assert payload_of(by_label[1])["h0"] == "H_{1,2}(-z - 1)"


def test_hyperplane_resolution_failures(capsys) -> None:
    for h0 in ("H_9", "H_{1,2}(7)", "nonsense", "99"):
        code, _, err = run_cli(capsys, ["ziegler", "--spec", "A:3:3:0", "--h0", h0])
        assert code == 1, h0
        assert "error:" in err


def test_euler_output_is_a_fixture(capsys) -> None:
    code, out, _ = run_cli(capsys, ["euler", "--fixture", "g33_a2_kappa.arr", "--h0", "a1"])
    assert code == 0
    parsed = parse_fixture(out)
    direct = euler_multiplicity(shipped_fixture("g33_a2_kappa"), 0)
    assert parsed.key() == direct.key()


def test_ziegler_pipes_into_refute(capsys) -> None:
    code, fixture_text, _ = run_cli(capsys, ["ziegler", "--fixture", "g33_a1", "--h0", "a1"])
    assert code == 0
    code, out, _ = run_cli(
        capsys,
        ["refute", "--fixture", "-", "--exponents", "7 9 11", "--json"],
        stdin_text=fixture_text,
    )
    assert code == 0
    payload = payload_of(out)
    assert payload["verdict"] == "chain_found"
    assert len(payload["chain"]) == 27


def test_refute_negative_exit_code(capsys) -> None:
    code, out, _ = run_cli(capsys, ["refute", "--fixture", "g33_a2_kappa", "--exponents", "7,10,10"])
    assert code == 2
    assert "not additively free" in out
    code, _, err = run_cli(capsys, ["refute", "--fixture", "g33_a2_kappa", "--exponents", "1,2"])
    assert code == 1 and "error:" in err


def test_indfree_ziegler_shortcut(capsys) -> None:
    code, out, _ = run_cli(capsys, ["indfree", "--spec", "A:3:4:0", "--ziegler", "H_{1,2}(1)"])
    assert code == 0
    assert "exponents {4, 6, 7}" in out
    assert "final exponents {4, 6, 7}" in out
    code, _, err = run_cli(capsys, ["indfree", "--fixture", "g33_a2_kappa", "--ziegler", "a1"])
    assert code == 1 and "needs a simple input" in err


def test_hereditary_requires_simple(capsys) -> None:
    code, out, _ = run_cli(capsys, ["hereditary", "--spec", "A:2:3:0"])
    assert code == 0 and "hereditarily inductively free" in out
    code, _, err = run_cli(capsys, ["hereditary", "--fixture", "g33_a2_kappa"])
    assert code == 1 and "needs a simple input" in err


def test_shipped_table_replay(capsys) -> None:
    code, out, _ = run_cli(capsys, ["table", "--shipped-table", "g33_a2_kappa", "--json"])
    assert code == 0
    payload = payload_of(out)
    assert payload["rows"] == 13
    assert payload["final_exponents"] == [7, 9, 11]
    code, _, err = run_cli(capsys, ["table", "--shipped-table", "nope"])
    assert code == 1 and "no shipped table" in err


def test_emitted_table_replays(capsys, tmp_path) -> None:
    code, out, _ = run_cli(capsys, ["indfree", "--spec", "A:2:3:0", "--json"])
    assert code == 0
    doc = tmp_path / "braid.json"
    doc.write_text(out, encoding="utf-8")
    code, out, _ = run_cli(capsys, ["table", "--replay", str(doc)])
    assert code == 0
    assert "4 rows replayed" in out and "{1, 2, 3}" in out

    broken = json.loads(doc.read_text(encoding="utf-8"))
    broken["payload"]["rows"][0][2] = [9, 9]
    bad = tmp_path / "broken.json"
    bad.write_text(json.dumps(broken), encoding="utf-8")
    code, _, err = run_cli(capsys, ["table", "--replay", str(bad)])
    assert code == 1
    assert "replay failed" in err


def test_table_emit_mode_refuses_negative_inputs(capsys) -> None:
    code, _, err = run_cli(capsys, ["table", "--spec", "A:3:3:0"])
    assert code == 1
    assert "verdict is no" in err


def test_verify_subset_and_threads(capsys) -> None:
    code, out, _ = run_cli(capsys, ["verify-paper", "--only", "3"])
    assert code == 0
    assert "1/1 checks passed" in out
    code, out, _ = run_cli(capsys, ["verify-paper", "--only", "3,9", "--threads", "2", "--json"])
    assert code == 0
    payload = payload_of(out)
    assert {r["name"] for r in payload["results"]} == {"fixture-derivation", "refuter-regressions"}
    assert payload["passed"] is True
    code, _, err = run_cli(capsys, ["verify-paper", "--only", "nosuch"])
    assert code == 1
    assert "unknown check" in err


def test_help_documents_the_missing_parents(capsys) -> None:
    code, out, _ = run_cli(capsys, ["--help"])
    assert code == 0
    assert "rank-5 parent" in out
