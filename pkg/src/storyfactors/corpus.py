"""Document-term contingency tables and vocabulary filtering.

Tables are plain integer count matrices with ordered labels: rows follow
the chronology of the text units, columns are the vocabulary in order of
first appearance.  Filtering is a pipeline of passes (stopwords, word
length, lexicon, frequency thresholds, empty-row removal) and is
idempotent: applying the same filter twice changes nothing.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

from .textprep import TokenList


@dataclass(frozen=True)
class ContingencyTable:
    """Counts of column items per row document, with stable label order."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: np.ndarray  # shape (rows, cols), non-negative integers

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(
                f"counts shape {counts.shape} does not match "
                f"{len(self.row_labels)} rows x {len(self.col_labels)} cols"
            )
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        if len(set(self.row_labels)) != len(self.row_labels):
            raise ValueError("duplicate row labels")
        if len(set(self.col_labels)) != len(self.col_labels):
            raise ValueError("duplicate column labels")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def column_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def document_frequencies(self) -> np.ndarray:
        """Number of rows in which each column occurs at least once."""
        return (self.counts > 0).sum(axis=0)

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.col_labels, self.row_labels, self.counts.T.copy())


@dataclass(frozen=True)
class CorpusFilter:
    """Vocabulary filter; defaults keep everything."""

    min_total_count: int = 1
    min_doc_count: int = 1
    min_word_length: int = 1
    stopwords: frozenset[str] = field(default_factory=frozenset)
    lexicon: frozenset[str] | None = None


@dataclass(frozen=True)
class Segmentation:
    """Assignment of chronologically ordered units to contiguous segments.

    ``assignment`` maps every unit label to a 1-based segment id; segment
    ids must form contiguous runs 1..k in unit order.
    """

    name: str
    assignment: dict[str, int]

    def segments(self) -> list[int]:
        return sorted(set(self.assignment.values()))

    @classmethod
    def from_sizes(cls, name: str, labels: Sequence[str], sizes: Sequence[int]) -> "Segmentation":
        if sum(sizes) != len(labels):
            raise ValueError(f"segment sizes sum to {sum(sizes)}, expected {len(labels)}")
        if any(size <= 0 for size in sizes):
            raise ValueError("segment sizes must be positive")
        assignment: dict[str, int] = {}
        cursor = 0
        for segment_id, size in enumerate(sizes, start=1):
            for label in labels[cursor : cursor + size]:
                assignment[label] = segment_id
            cursor += size
        return cls(name, assignment)


def build_table(
    token_lists: Iterable[TokenList],
    unit: str = "sentence",
    paragraph_ids: Mapping[int, int] | None = None,
) -> ContingencyTable:
    """Cross-tabulate tokens into a documents-by-words count table.

    ``unit`` selects the row documents: ``"sentence"`` keeps one row per
    sentence (including empty ones), ``"paragraph"`` sums sentences into
    their paragraphs via ``paragraph_ids`` (sentence id -> paragraph id).
    Columns are the distinct tokens in order of first appearance.
    """
    token_lists = list(token_lists)
    if unit not in ("sentence", "paragraph"):
        raise ValueError(f"unknown unit {unit!r}")
    if unit == "paragraph":
        if paragraph_ids is None:
            raise ValueError("paragraph unit requires sentence-to-paragraph ids")
        missing = [t.sentence_id for t in token_lists if t.sentence_id not in paragraph_ids]
        if missing:
            raise ValueError(f"no paragraph id for sentence {missing[0]}")

    col_index: dict[str, int] = {}
    for tl in token_lists:
        for token in tl.tokens:
            if token not in col_index:
                col_index[token] = len(col_index)
    vocabulary = list(col_index)
    if not vocabulary:
        raise ValueError("empty corpus: no tokens in any document")

    if unit == "sentence":
        doc_of = {tl.sentence_id: i for i, tl in enumerate(token_lists)}
        row_labels = tuple(str(tl.sentence_id) for tl in token_lists)
    else:
        assert paragraph_ids is not None
        seen: list[int] = []
        for tl in token_lists:
            pid = paragraph_ids[tl.sentence_id]
            if pid not in seen:
                seen.append(pid)
        doc_of = {tl.sentence_id: seen.index(paragraph_ids[tl.sentence_id]) for tl in token_lists}
        row_labels = tuple(str(pid) for pid in seen)

    counts = np.zeros((len(row_labels), len(vocabulary)), dtype=np.int64)
    for tl in token_lists:
        i = doc_of[tl.sentence_id]
        for token in tl.tokens:
            counts[i, col_index[token]] += 1
    return ContingencyTable(row_labels, tuple(vocabulary), counts)


def apply_filter(table: ContingencyTable, filt: CorpusFilter) -> ContingencyTable:
    """Run the filter passes in their fixed order and drop emptied rows.

    Pass order: stopword removal, minimum word length, lexicon allow-list,
    then the frequency thresholds evaluated against the table as it stands
    at that point (document frequencies are not recomputed after columns
    drop), and finally removal of all-zero rows.
    """
    keep = np.ones(len(table.col_labels), dtype=bool)
    words = np.array(table.col_labels)
    if filt.stopwords:
        keep &= ~np.isin(words, sorted(filt.stopwords))
    if filt.min_word_length > 1:
        keep &= np.array([len(w) >= filt.min_word_length for w in words])
    if filt.lexicon is not None:
        keep &= np.isin(words, sorted(filt.lexicon))

    counts = table.counts[:, keep]
    kept_words = words[keep]
    totals = counts.sum(axis=0)
    doc_freq = (counts > 0).sum(axis=0)
    freq_ok = (totals >= filt.min_total_count) & (doc_freq >= filt.min_doc_count)
    counts = counts[:, freq_ok]
    kept_words = kept_words[freq_ok]

    if counts.shape[1] == 0:
        raise ValueError("empty vocabulary: filter removed every column")

    row_ok = counts.sum(axis=1) > 0
    dropped = [label for label, ok in zip(table.row_labels, row_ok) if not ok]
    if dropped:
        logger.info("filter emptied %d rows: %s", len(dropped), ", ".join(dropped))
    counts = counts[row_ok]
    row_labels = tuple(label for label, ok in zip(table.row_labels, row_ok) if ok)
    return ContingencyTable(row_labels, tuple(kept_words), counts.copy())


def aggregate(table: ContingencyTable, segmentation: Segmentation) -> ContingencyTable:
    """Sum consecutive row blocks into one row per segment.

    Every row label must be assigned; segment ids must be contiguous runs
    in row order.  Column labels and column totals are unchanged.
    """
    segment_ids = []
    for label in table.row_labels:
        if label not in segmentation.assignment:
            raise ValueError(f"row {label!r} missing from segmentation {segmentation.name!r}")
        segment_ids.append(segmentation.assignment[label])
    order = segmentation.segments()
    if order != list(range(1, len(order) + 1)):
        raise ValueError("segment ids must be 1..k")
    previous = 0
    for sid in segment_ids:
        if sid < previous:
            raise ValueError(f"segmentation {segmentation.name!r} is not contiguous in row order")
        previous = sid
    counts = np.zeros((len(order), len(table.col_labels)), dtype=np.int64)
    for row, sid in enumerate(segment_ids):
        counts[sid - 1] += table.counts[row]
    return ContingencyTable(tuple(str(sid) for sid in order), table.col_labels, counts)


def load_word_list(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line file; ``#`` starts a comment."""
    words: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.split("#", 1)[0].strip()
        if word:
            words.add(word)
    return frozenset(words)


def table_to_csv(table: ContingencyTable) -> str:
    """Serialize a table: header of word labels, one row per document."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["doc_id", *table.col_labels])
    for label, row in zip(table.row_labels, table.counts):
        writer.writerow([label, *row.tolist()])
    return buffer.getvalue()


def table_from_csv(data: str) -> ContingencyTable:
    """Parse :func:`table_to_csv` output; exact round-trip."""
    reader = csv.reader(io.StringIO(data))
    header = next(reader, None)
    if not header or header[0] != "doc_id":
        raise ValueError("table CSV must start with a doc_id header column")
    col_labels = tuple(header[1:])
    row_labels: list[str] = []
    rows: list[list[int]] = []
    for row in reader:
        if not row:
            continue
        row_labels.append(row[0])
        rows.append([int(cell) for cell in row[1:]])
    counts = np.array(rows, dtype=np.int64).reshape(len(row_labels), len(col_labels))
    return ContingencyTable(tuple(row_labels), col_labels, counts)
