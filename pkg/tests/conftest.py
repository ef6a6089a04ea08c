import pytest

from mogen import PathMultiset


def corpus_from(*entries: tuple[str, int]) -> PathMultiset:
    """Build a corpus from ("A,C,D", freq) entries; vocabulary follows
    first appearance."""
    return PathMultiset.from_sequences(
        (labels.split(","), freq) for labels, freq in entries
    )


@pytest.fixture
def pair_corpus() -> PathMultiset:
    """Two paths from A: one to B, one to C."""
    return corpus_from(("A,B", 1), ("A,C", 1))


@pytest.fixture
def chain_corpus() -> PathMultiset:
    """A single deterministic chain observed ten times."""
    return corpus_from(("A,C,D,E", 10))


def fig_toy(
    acde: int, acdf: int, bcde: int, bcdf: int, de: int
) -> PathMultiset:
    """The running toy network (A,B feed C->D, which exits to E or F) with
    five possible paths; zero-frequency paths are omitted."""
    entries = [
        ("A,C,D,E", acde),
        ("A,C,D,F", acdf),
        ("B,C,D,E", bcde),
        ("B,C,D,F", bcdf),
        ("D,E", de),
    ]
    return corpus_from(*[(labels, f) for labels, f in entries if f > 0])
