import pytest

from procaug.corpus import parse_corpus
from procaug.embeddings import EmbeddingTable

OXALIC = "Oxalic\tMAT\nacid\tMAT\nwere\tO\ndissolved\tPP\nin\tO\ndeionized\tDESC\nwater\tMAT\n"
BORAC = "Borac\tMAT\nacid\tMAT\nwas\tO\nadded\tPP\nto\tO\nboiling\tDESC\nalcohol\tMAT\n"

# pH example; predicates underlined in the original: input {mixed, adjusted}, source {adjusted, using}
PH_INPUT = [
    ("The", "O"), ("pH", "O"), ("of", "O"), ("the", "O"), ("mixed", "PP"), ("solution", "MAT"),
    ("was", "O"), ("adjusted", "PP"), ("to", "O"), ("6", "NUM"), ("with", "O"), ("ammonia", "MAT"),
    ("(", "O"), ("28", "NUM"), ("%", "UNIT"), (")", "O"),
]
PH_SOURCE = [
    ("The", "O"), ("pH", "O"), ("value", "O"), ("of", "O"), ("the", "O"), ("K2HPO4", "MAT"),
    ("was", "O"), ("adjusted", "PP"), ("to", "O"), ("0.1", "NUM"), ("using", "PP"), ("0.1", "NUM"),
    ("M", "UNIT"), ("phospate", "MAT"), ("solutions", "MAT"),
]


def conll(pairs):
    return "".join(f"{t}\t{l}\n" for t, l in pairs)


@pytest.fixture
def oxalic_borac():
    return parse_corpus(OXALIC + "\n" + BORAC)


@pytest.fixture
def ph_corpus():
    return parse_corpus(conll(PH_INPUT) + "\n" + conll(PH_SOURCE))


@pytest.fixture
def tiny_table():
    return EmbeddingTable(["a", "b"], [[1.0, 0.0], [0.0, 1.0]])


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
