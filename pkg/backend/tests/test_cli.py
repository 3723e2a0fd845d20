import pytest

from app.cli import EXIT_DIVERGED, EXIT_INPUT, EXIT_OK, main
from app.suites import ADD


@pytest.fixture
def program(tmp_path):
    def write(source, name="prog.pcf"):
        path = tmp_path / name
        path.write_text(source, encoding="utf-8")
        return str(path)

    return write


@pytest.mark.parametrize(
    "source, printed",
    [
        ("succ (succ zero)", "nat:2"),
        ("pred zero", "nat:0"),
        ("ifz zero", "bool:tt"),
        ("ifz (succ zero)", "bool:ff"),
        (f"({ADD}) (succ (succ zero)) (succ (succ (succ zero)))", "nat:5"),
    ],
)
def test_eval_prints_the_value(program, capsys, source, printed):
    assert main(["eval", program(source)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == printed


def test_eval_of_a_divergent_program(program, capsys):
    assert main(["eval", program("fix f. f"), "--max-steps", "50"]) == EXIT_DIVERGED
    assert capsys.readouterr().out.strip() == "DIVERGED"


@pytest.mark.parametrize("source", ["", "succ", "succ tt", "fun x: nat. x", "zero @"])
def test_bad_programs_are_input_errors(program, capsys, source):
    assert main(["eval", program(source)]) == EXIT_INPUT
    assert capsys.readouterr().err.startswith("error: ")


def test_missing_file_is_an_input_error(tmp_path, capsys):
    assert main(["eval", str(tmp_path / "absent.pcf")]) == EXIT_INPUT


@pytest.mark.parametrize(
    "argv",
    [[], ["frobnicate"], ["verify", "--suite", "nope"], ["eval", "x.pcf", "--max-steps", "0"], ["verify"]],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_INPUT
    assert "usage error" in capsys.readouterr().err


def test_trace_prints_play_and_snapshots(program, capsys):
    assert main(["trace", program("succ zero")]) == EXIT_OK
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "1: qhatE_{} @init"
    assert "2: yesE_{} @1" in lines
    assert "P-MOVE 1" in lines
    assert "TAPE" in lines
    assert any(line.startswith("STACK") for line in lines)
    assert "TRUNCATED" not in lines


def test_trace_of_a_divergent_program_is_truncated(program, capsys):
    assert main(["trace", program("fix f. f"), "--max-steps", "20"]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("TRUNCATED")


def test_dump_lists_description_and_machine(program, capsys):
    assert main(["dump", program("fun x: nat. succ x")]) == EXIT_OK
    out = capsys.readouterr().out
    for title in ("DESCRIPTION", "STATES", "TRANSITIONS"):
        assert title in out.splitlines()
    assert "Atomic succ" in out


def test_verify_tags(capsys):
    assert main(["verify", "--suite", "tags", "--seeds", "5", "--seed", "7"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("tags: ")
    assert out[0].endswith("checks passed (seed 7)")
    passed, total = out[0].split()[1].split("/")
    assert passed == total


def test_verify_games_at_small_depth(capsys):
    assert main(["verify", "--suite", "games", "--depth", "4", "--seeds", "1"]) == EXIT_OK
    assert "FAIL" not in capsys.readouterr().out
