"""
unit tests for promisecalc.cli
"""
import json

from pytest import fixture, mark, raises

from promisecalc.cli import EXIT_FAILURE, EXIT_OK, EXIT_PARSE, main

BODY_1 = "0 <= X <= 2 and 0 <= X/(X-1) <= 2"
BODY_2 = "0 <= X <= 2 and 0 < X/(X-1) < 2"


@fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """no config file and no environment overrides"""
    monkeypatch.chdir(tmp_path)
    for key in ("ALPHA", "BETA", "SEED", "LOGLEVEL"):
        monkeypatch.delenv(f"PROMISECALC_{key}", raising=False)


@mark.parametrize(
    "argv, expected",
    [
        (["meadow", "eval", "1/0"], "0"),
        (["meadow", "eval", "X/(X-1)", "--env", "X=1"], "0"),
        (["meadow", "eval", "X/(X-1)", "--env", "X=3"], "3/2"),
        (["meadow", "eval", "1/0 = 0", "--semantics", "partial"], "undefined"),
        (["meadow", "eval", "1/0 = 0"], "true"),
        (["meadow", "solve", BODY_1, "--var", "X"], "{0, 1, 2}"),
        (["meadow", "solve", BODY_2, "--var", "X"], "{}"),
    ],
)
def test_cli_01(capsys, argv, expected):
    """test main() - meadow eval and solve"""
    assert main(argv) == EXIT_OK
    assert capsys.readouterr().out.strip() == expected


def test_cli_02(capsys):
    """test main() - meadow check exit codes"""
    assert main(["meadow", "check", "X/X = 1", "X != 0"]) == EXIT_OK
    assert main(["meadow", "check", BODY_2, "X = 1"]) == EXIT_FAILURE
    assert "counterexamples {1}" in capsys.readouterr().out


def test_cli_03(capsys):
    """test main() - meadow input errors"""
    assert main(["meadow", "eval", "X +"]) == EXIT_PARSE
    assert "column" in capsys.readouterr().err
    assert main(["meadow", "eval", "X + 1"]) == EXIT_FAILURE
    assert "unbound variable X" in capsys.readouterr().err


def test_cli_04(capsys):
    """test main() - creep and catalog"""
    assert main(["meadow", "creep", BODY_1]) == EXIT_OK
    assert "creep" in capsys.readouterr().out
    assert main(["meadow", "catalog", "--bound", "8"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1] == "guarded rewrites: all creep-free"


@mark.parametrize(
    "account, shortfall, expected",
    [
        ("account_exact", "0", EXIT_OK),
        ("account_short", "50", EXIT_OK),
        ("account_short", "0", EXIT_FAILURE),
        ("account_overshort", "50", EXIT_FAILURE),
    ],
)
def test_cli_05(corpus, account, shortfall, expected):
    """test main() - budget conformance exit codes"""
    argv = ["budget", str(corpus / "t_q.tuplix"), str(corpus / f"{account}.tuplix"),
            "--subst", "f=40, c=25", "--subst", "n=30, v=200", "--shortfall", shortfall]
    assert main(argv) == expected


def test_cli_06(corpus, tmp_path, capsys):
    """test main() - budget input errors"""
    exact = str(corpus / "account_exact.tuplix")
    assert main(["budget", str(corpus / "t_q.tuplix"), exact]) == EXIT_FAILURE
    assert "open budget" in capsys.readouterr().err
    assert main(["budget", str(tmp_path / "missing.tuplix"), exact]) == EXIT_PARSE
    bad = tmp_path / "bad.tuplix"
    bad.write_text("income 12\n")
    assert main(["budget", str(bad), exact]) == EXIT_PARSE


def test_cli_07(corpus, capsys):
    """test main() - run prints the trace"""
    assert main(["run", str(corpus / "money_transfer.scn")]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    records = [json.loads(line) for line in lines]
    assert records[0]["kind"] == "run"
    assert records[0]["payload"]["scenario"] == "money_transfer"
    assert any(r.get("private") for r in records)


def test_cli_08(corpus, capsys):
    """test main() - public export"""
    assert main(["run", str(corpus / "double_spend.scn"), "--public"]) == EXIT_OK
    out = capsys.readouterr().out
    assert not any(json.loads(line).get("private") for line in out.splitlines())
    assert "divert the payment" not in out


def test_cli_09(corpus, tmp_path, capsys):
    """test main() - trace to a file, summary to stdout"""
    out = tmp_path / "trace.jsonl"
    assert main(["run", str(corpus / "money_transfer.scn"), "--out", str(out), "--alpha", "1/2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "promises: 10"
    assert "  B in A: 3/4" in lines
    assert "obligations: 3" in lines
    assert out.read_text().startswith('{"kind":"run"')


def test_cli_10(corpus, tmp_path, capsys):
    """test main() - scenario errors"""
    bad = tmp_path / "bad.scn"
    bad.write_text("agents A\nat 1 promise\n")
    assert main(["run", str(bad)]) == EXIT_PARSE
    assert "line 2" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.scn")]) == EXIT_PARSE
    assert main(["run", str(corpus / "money_transfer.scn"), "--alpha", "3/2"]) == EXIT_PARSE


def test_cli_11(corpus, capsys):
    """test main() - strict runs fail on error records"""
    path = str(corpus / "double_spend.scn")
    assert main(["run", path]) == EXIT_OK
    assert main(["run", path, "--strict"]) == EXIT_FAILURE
    assert "1 error records" in capsys.readouterr().err


@mark.parametrize(
    "argv",
    [
        [],
        ["meadow"],
        ["meadow", "solve", "X = 1"],
        ["run"],
        ["budget", "a.tuplix"],
        ["--log-level", "9", "meadow", "eval", "1"],
        ["meadow", "eval", "X", "--env", "X"],
    ],
)
def test_cli_12(argv):
    """test main() - usage errors"""
    with raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_cli_13(tmp_path, capsys):
    """test main() - literal budget with negative entries"""
    budget = tmp_path / "budget.tuplix"
    budget.write_text("income: 10\nvenue: -4\n")
    account = tmp_path / "account.tuplix"
    account.write_text("income: 10\nvenue: -4\n")
    assert main(["budget", str(budget), str(account)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "budget net result: 6" in out
    assert "conforms with shortfall 0" in out
    account.write_text("income: 10\nvenue: -5\n")
    assert main(["budget", str(budget), str(account)]) == EXIT_FAILURE
    assert main(["budget", str(budget), str(account), "--shortfall", "1"]) == EXIT_OK
