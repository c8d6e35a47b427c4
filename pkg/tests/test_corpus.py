import pytest

from lyre import config
from lyre.cli import _run_file
from lyre.corpus import Expectation, compare, discover, read_expectation, run_case

CASES = discover(config.CORPUS_DIR)


def test_corpus_is_not_empty():
    assert len(CASES) >= 20


@pytest.mark.parametrize("path, expected", CASES, ids=[p.rsplit("/", 1)[-1] for p, _ in CASES])
def test_golden_program(path, expected):
    result = run_case(path, expected, _run_file)
    assert result.passed, result.problems


def test_read_expectation(tmp_path):
    path = tmp_path / "x.expected"
    path.write_text("flags: --strategy recmod --trace\nok\nresult: 7\nexit: 0\n\n", encoding="utf-8")
    assert read_expectation(str(path)) == Expectation(("--strategy", "recmod", "--trace"), ("ok", "result: 7"), 0)


def test_malformed_expectation(tmp_path):
    path = tmp_path / "x.expected"
    path.write_text("result: 7\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_expectation(str(path))


def test_error_lines_match_by_prefix():
    expectation = Expectation((), ("error: NameClash",), 1)
    assert compare(expectation, ["error: NameClash: both operands export x"], 1) == []
    assert compare(expectation, ["error: FreezeMismatch: x"], 1)
    assert compare(expectation, ["error: NameClash: x"], 2)


def test_programs_without_expectations_are_skipped(tmp_path):
    (tmp_path / "lonely.lyre").write_text("let main = 1", encoding="utf-8")
    assert discover(str(tmp_path)) == []
