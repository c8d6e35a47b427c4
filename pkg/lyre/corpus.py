# Golden corpus: <name>.lyre programs next to <name>.expected files.
#
# An expectation file holds a flags: line, the expected stdout lines and a
# final exit: line. An expected error: line matches any actual line
# that starts with it, so expectations may stop at the error tag.
import glob
import logging
import os
import shlex
from dataclasses import dataclass, field

from . import config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Expectation:
    flags: tuple
    lines: tuple
    exit_code: int


@dataclass
class CaseResult:
    name: str
    passed: bool
    problems: list = field(default_factory=list)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        detail = f" ({'; '.join(self.problems)})" if self.problems else ""
        return f"{status} {self.name}{detail}"


def read_expectation(path):
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 2 or not lines[0].startswith("flags:") or not lines[-1].startswith("exit:"):
        raise ValueError(f"{path}: expected a 'flags:' first line and an 'exit:' last line")
    flags = tuple(shlex.split(lines[0][len("flags:"):]))
    return Expectation(flags, tuple(lines[1:-1]), int(lines[-1][len("exit:"):]))


def _line_matches(expected, actual):
    if expected.startswith("error:"):
        return actual.startswith(expected)
    return expected == actual


def compare(expectation, lines, exit_code):
    problems = []
    if exit_code != expectation.exit_code:
        problems.append(f"exit {exit_code}, expected {expectation.exit_code}")
    if len(lines) != len(expectation.lines):
        problems.append(f"{len(lines)} output lines, expected {len(expectation.lines)}")
    for number, (want, got) in enumerate(zip(expectation.lines, lines), start=1):
        if not _line_matches(want, got):
            problems.append(f"line {number}: {got!r}, expected {want!r}")
            break
    return problems


def discover(directory=config.CORPUS_DIR):
    # Sorted paths of corpus programs that have an expectation file
    pattern = os.path.join(directory, "*" + config.CORPUS_SUFFIX)
    found = []
    for path in sorted(glob.glob(pattern)):
        expected = path[: -len(config.CORPUS_SUFFIX)] + config.EXPECTED_SUFFIX
        if os.path.exists(expected):
            found.append((path, expected))
        else:
            logger.warning("[Corpus] %s has no %s file, skipped", path, config.EXPECTED_SUFFIX)
    return found


def run_case(path, expected_path, runner):
    # runner(path, flags) -> object with `lines` and `exit_code`
    name = os.path.basename(path)[: -len(config.CORPUS_SUFFIX)]
    expectation = read_expectation(expected_path)
    report = runner(path, list(expectation.flags))
    problems = compare(expectation, report.lines, report.exit_code)
    logger.info("[Corpus] %s: %s", name, "ok" if not problems else problems[0])
    return CaseResult(name, not problems, problems)


def run_corpus(directory, runner):
    return [run_case(path, expected, runner) for path, expected in discover(directory)]
