"""Sentence and paragraph segmentation, speaker annotation, tokenization.

The segmenter is deliberately small and deterministic: paragraphs are
blank-line separated blocks, sentences end at ``.``, ``!`` or ``?`` unless
the period terminates a listed abbreviation.  Runs of terminators count as
one boundary, and closing quotes directly after a terminator stay with the
sentence they close.
"""

from __future__ import annotations

import csv
import io
import unicodedata
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

_TERMINATORS = frozenset(".!?")
# Closing punctuation that belongs to the sentence it terminates.
_TRAILERS = frozenset("'\"’”)]")
_WORD_CHARS = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")


@dataclass(frozen=True)
class SentenceRecord:
    """One segmented sentence with its position in the document."""

    sentence_id: int
    paragraph_id: int
    speaker: str | None
    text: str


@dataclass(frozen=True)
class TokenList:
    """Tokens of one sentence, in text order."""

    sentence_id: int
    tokens: tuple[str, ...]


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """Read an abbreviation file: one entry per line, ``#`` starts a comment.

    Entries are matched case-sensitively against the token preceding a
    period, so ``No`` and ``no`` are distinct entries.
    """
    entries: set[str] = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.split("#", 1)[0].strip()
        if entry:
            entries.add(entry)
    return frozenset(entries)


def _split_paragraphs(raw_text: str) -> list[str]:
    paragraphs: list[str] = []
    block: list[str] = []
    for line in raw_text.splitlines():
        if line.strip():
            block.append(line.strip())
        elif block:
            paragraphs.append(" ".join(block))
            block = []
    if block:
        paragraphs.append(" ".join(block))
    return paragraphs


def _word_before(text: str, index: int) -> str:
    """Maximal run of word characters immediately left of ``index``."""
    start = index
    while start > 0 and text[start - 1] in _WORD_CHARS:
        start -= 1
    return text[start:index]


def _split_sentences(paragraph: str, abbreviations: frozenset[str]) -> list[str]:
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(paragraph)
    while i < n:
        ch = paragraph[i]
        if ch not in _TERMINATORS:
            i += 1
            continue
        if ch == "." and _word_before(paragraph, i) in abbreviations:
            i += 1
            continue
        # Collapse a run of terminators into one boundary.
        while i < n and paragraph[i] in _TERMINATORS:
            i += 1
        # Closing quotes stay with the sentence only when the whole run of
        # them really closes it (end of paragraph or followed by whitespace).
        run_end = i
        while run_end < n and paragraph[run_end] in _TRAILERS:
            run_end += 1
        if run_end > i and (run_end == n or paragraph[run_end] in " \t"):
            i = run_end
        sentence = paragraph[start:i].strip()
        if sentence:
            sentences.append(sentence)
        start = i
    tail = paragraph[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def segment_text(raw_text: str, abbreviations: frozenset[str] = frozenset()) -> list[SentenceRecord]:
    """Segment ``raw_text`` into sentence records.

    Paragraphs are separated by one or more blank lines; line breaks inside
    a paragraph count as spaces.  Sentence and paragraph ids are 1-based
    and increase in text order.  Speakers are left unset; see
    :func:`annotate_speakers`.
    """
    records: list[SentenceRecord] = []
    sentence_id = 1
    for paragraph_id, paragraph in enumerate(_split_paragraphs(raw_text), start=1):
        for sentence in _split_sentences(paragraph, abbreviations):
            records.append(SentenceRecord(sentence_id, paragraph_id, None, sentence))
            sentence_id += 1
    return records


def load_speaker_map(path: str | Path) -> dict[int, str]:
    """Read a ``paragraph_id,label`` CSV into a dict."""
    mapping: dict[int, str] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["paragraph_id", "label"]:
            raise ValueError(f"speaker map header must be paragraph_id,label, got {header!r}")
        for row in reader:
            if not row:
                continue
            paragraph_id, label = int(row[0]), row[1].strip()
            if paragraph_id in mapping:
                raise ValueError(f"duplicate paragraph id {paragraph_id} in speaker map")
            mapping[paragraph_id] = label
    return mapping


def annotate_speakers(
    records: Iterable[SentenceRecord], speaker_map: Mapping[int, str]
) -> list[SentenceRecord]:
    """Attach a speaker label to every sentence via its paragraph id.

    The map must cover exactly the paragraph ids present in ``records``;
    anything missing or unknown raises ``ValueError`` naming the id.
    """
    records = list(records)
    present = {record.paragraph_id for record in records}
    for paragraph_id in sorted(present):
        if paragraph_id not in speaker_map:
            raise ValueError(f"no speaker for paragraph id {paragraph_id}")
    for paragraph_id in sorted(speaker_map):
        if paragraph_id not in present:
            raise ValueError(f"unknown paragraph id {paragraph_id} in speaker map")
    return [replace(record, speaker=speaker_map[record.paragraph_id]) for record in records]


def tokenize_text(text: str) -> tuple[str, ...]:
    """Normalize ``text`` to lowercase a-z tokens.

    Accents fold to their base letter, digits vanish, and apostrophes along
    with every other punctuation mark act as separators, so ``"It's D--"``
    yields ``(it, s, d)``.
    """
    folded = unicodedata.normalize("NFKD", text)
    out: list[str] = []
    for ch in folded:
        if unicodedata.combining(ch):
            continue
        lower = ch.lower()
        if lower.isdigit():
            continue
        out.append(lower if "a" <= lower <= "z" else " ")
    return tuple("".join(out).split())


def tokenize(record: SentenceRecord) -> TokenList:
    """Tokenize one sentence record."""
    return TokenList(record.sentence_id, tokenize_text(record.text))


def sentences_to_csv(records: Iterable[SentenceRecord]) -> str:
    """Serialize sentence records to CSV with RFC-4180 quoting."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["sentence_id", "paragraph_id", "speaker", "text"])
    for record in records:
        writer.writerow(
            [record.sentence_id, record.paragraph_id, record.speaker or "", record.text]
        )
    return buffer.getvalue()


def sentences_from_csv(data: str) -> list[SentenceRecord]:
    """Parse the output of :func:`sentences_to_csv`; exact round-trip."""
    reader = csv.reader(io.StringIO(data))
    header = next(reader, None)
    if header != ["sentence_id", "paragraph_id", "speaker", "text"]:
        raise ValueError(f"unexpected sentence CSV header: {header!r}")
    records = []
    for row in reader:
        if not row:
            continue
        sentence_id, paragraph_id, speaker, text = row
        records.append(
            SentenceRecord(int(sentence_id), int(paragraph_id), speaker or None, text)
        )
    return records
