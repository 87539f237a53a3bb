"""End-to-end batch pipeline: config file in, CSV tables and SVG plots out.

A run is segment -> tokenize -> build -> filter -> (aggregate) -> fit_ca
-> cluster -> cut -> v-test -> plot, where the aggregate stage only runs
when the config defines a segmentation.  Every stage appends one line of
counts to the run summary; any failure is re-raised as a
:class:`StageError` naming the stage, and files already written by the
failed run are removed so a broken output directory never looks like a
finished one.  All outputs are pure functions of the config and input
files, so two runs over the same inputs are byte-identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import ca, characterize, clustering, corpus, plots, textprep

logger = logging.getLogger(__name__)

# Stage order; CLI subcommands stop after the stage mapped in cli.py.
STAGES = (
    "segment",
    "tokenize",
    "build",
    "filter",
    "aggregate",
    "fit_ca",
    "cluster",
    "cut",
    "vtest",
    "plot",
)

_UNITS = ("sentence", "paragraph")
_CRITERIA = ("ward", "constrained")


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    """Flat, file-loadable description of one batch run."""

    input_text: Path
    abbreviations: Path | None = None
    stopwords: Path | None = None
    lexicon: Path | None = None
    speakers: Path | None = None
    unit: str = "sentence"
    min_total_count: int = 1
    min_doc_count: int = 1
    min_word_length: int = 1
    segment_sizes: tuple[int, ...] | None = None
    segment_by: str = "paragraph"
    segment_file: Path | None = None
    axes: int = 0  # retained axes for the clustering embedding; 0 = all
    cluster: str = "constrained"
    cut: str = "max-gap"  # "max-gap" or an integer k
    vtest_alpha: float = 0.05
    plot_axes: tuple[int, int] = (1, 2)
    plot_top_k: int = 20
    out_dir: Path | None = None

    def validate(self) -> None:
        for name in ("input_text", "abbreviations", "stopwords", "lexicon",
                     "speakers", "segment_file"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ValueError(f"{name} file not found: {path}")
        if self.unit not in _UNITS:
            raise ValueError(f"unit must be one of {_UNITS}, got {self.unit!r}")
        for name in ("min_total_count", "min_doc_count", "min_word_length"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.segment_sizes is not None:
            if self.segment_file is not None:
                raise ValueError("give segment sizes/ranges or a segment file, not both")
            if any(s < 1 for s in self.segment_sizes):
                raise ValueError("segment sizes must be positive")
        if self.segment_by not in ("paragraph", "row"):
            raise ValueError(f"segment_by must be 'paragraph' or 'row', got {self.segment_by!r}")
        if self.unit == "paragraph" and self.segment_by == "paragraph" and self.segment_sizes:
            pass  # paragraph rows segmented by paragraph ranges: allowed
        if self.axes < 0:
            raise ValueError("axes must be >= 0 (0 selects the full factor space)")
        if self.cluster not in _CRITERIA:
            raise ValueError(f"cluster must be one of {_CRITERIA}, got {self.cluster!r}")
        if self.cut != "max-gap":
            try:
                k = int(self.cut)
            except ValueError:
                raise ValueError(f"cut must be 'max-gap' or an integer, got {self.cut!r}") from None
            if k < 1:
                raise ValueError("cut k must be >= 1")
        if not 0.0 < self.vtest_alpha < 1.0:
            raise ValueError("vtest_alpha must lie strictly between 0 and 1")
        ax, ay = self.plot_axes
        if ax < 1 or ay < 1 or ax == ay:
            raise ValueError(f"plot_axes must name two distinct axes, got {self.plot_axes}")
        if self.plot_top_k < 1:
            raise ValueError("plot_top_k must be >= 1")


_PATH_KEYS = ("input_text", "abbreviations", "stopwords", "lexicon",
              "speakers", "segment_file")
_INT_KEYS = ("min_total_count", "min_doc_count", "min_word_length", "axes",
             "plot_top_k")


def _parse_ranges(ranges: str) -> tuple[int, ...]:
    """Turn '1-19,20-45,...' into segment sizes, checking the partition."""
    sizes = []
    expected = 1
    for piece in ranges.split(","):
        lo_s, _, hi_s = piece.strip().partition("-")
        lo, hi = int(lo_s), int(hi_s or lo_s)
        if lo != expected or hi < lo:
            raise ValueError(
                f"segment ranges must partition 1..N contiguously; "
                f"expected a range starting at {expected}, got {piece.strip()!r}")
        sizes.append(hi - lo + 1)
        expected = hi + 1
    return tuple(sizes)


def parse_config(path: str | Path) -> PipelineConfig:
    """Read a flat ``key = value`` config file.

    ``#`` starts a comment; blank lines are skipped; unknown keys are an
    error.  Input-file paths are resolved relative to the config file's
    directory; ``out_dir`` is kept as written (relative to the working
    directory, and overridable from the CLI).
    """
    path = Path(path)
    base = path.parent
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        if key in raw:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value

    kwargs: dict = {}
    for key, value in raw.items():
        if key in _PATH_KEYS:
            kwargs[key] = (base / value).resolve()
        elif key in _INT_KEYS:
            kwargs[key] = int(value)
        elif key == "segment_sizes":
            kwargs[key] = tuple(int(v) for v in value.split(","))
        elif key == "segment_ranges":
            kwargs["segment_sizes"] = _parse_ranges(value)
        elif key == "vtest_alpha":
            kwargs[key] = float(value)
        elif key == "plot_axes":
            ax, _, ay = value.partition(",")
            kwargs[key] = (int(ax), int(ay))
        elif key in ("unit", "segment_by", "cluster", "cut"):
            kwargs[key] = value
        elif key == "out_dir":
            kwargs[key] = Path(value)
        else:
            raise ValueError(f"{path}: unknown config key {key!r}")
    if "input_text" not in kwargs:
        raise ValueError(f"{path}: missing required key 'input_text'")
    config = PipelineConfig(**kwargs)
    config.validate()
    return config


@dataclass
class PipelineResult:
    """Artifacts of one run: file paths, stage summary, and live objects."""

    out_dir: Path
    files: dict[str, Path] = field(default_factory=dict)
    summary: list[str] = field(default_factory=list)
    sentences: list[textprep.SentenceRecord] | None = None
    table: corpus.ContingencyTable | None = None  # the analysed (final) table
    model: ca.CAModel | None = None
    dendrogram: clustering.Dendrogram | None = None
    partition: clustering.Partition | None = None
    report: characterize.VTestReport | None = None


def _segmentation_for(
    config: PipelineConfig,
    table: corpus.ContingencyTable,
    paragraph_of: dict[str, int],
) -> corpus.Segmentation:
    if config.segment_file is not None:
        assignment = {}
        for line in Path(config.segment_file).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            label, _, seg = line.partition(",")
            assignment[label.strip()] = int(seg)
        missing = [lab for lab in table.row_labels if lab not in assignment]
        if missing:
            raise ValueError(f"segment file covers no segment for rows: {missing[:5]}")
        return corpus.Segmentation("file", {lab: assignment[lab] for lab in table.row_labels})
    sizes = config.segment_sizes
    assert sizes is not None
    edges = np.cumsum(sizes)
    if config.segment_by == "row":
        if int(edges[-1]) != len(table.row_labels):
            raise ValueError(
                f"segment sizes sum to {int(edges[-1])} but the table has "
                f"{len(table.row_labels)} rows")
        assignment = {
            lab: int(np.searchsorted(edges, pos + 1, side="left")) + 1
            for pos, lab in enumerate(table.row_labels)
        }
        return corpus.Segmentation("rows", assignment)
    # segment_by paragraph: rows are mapped through their paragraph id.
    top = max(paragraph_of[lab] for lab in table.row_labels)
    if int(edges[-1]) < top:
        raise ValueError(
            f"segment sizes cover paragraphs 1..{int(edges[-1])} but the "
            f"table reaches paragraph {top}")
    assignment = {
        lab: int(np.searchsorted(edges, paragraph_of[lab], side="left")) + 1
        for lab in table.row_labels
    }
    return corpus.Segmentation("paragraphs", assignment)


def run_pipeline(
    config: PipelineConfig,
    out_dir: str | Path | None = None,
    upto: str = "plot",
) -> PipelineResult:
    """Execute the pipeline through stage ``upto`` and write its artifacts.

    Returns a :class:`PipelineResult`; raises :class:`StageError` on any
    failure after deleting the files this run had already written.
    """
    if upto not in STAGES:
        raise ValueError(f"unknown stage {upto!r}; expected one of {STAGES}")
    config.validate()
    target = STAGES.index(upto)
    directory = Path(out_dir) if out_dir is not None else config.out_dir
    if directory is None:
        raise ValueError("no output directory: set out_dir in the config or pass --out")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    result = PipelineResult(out_dir=directory)

    def write(name: str, filename: str, content: str) -> None:
        path = directory / filename
        path.write_text(content, encoding="utf-8")
        result.files[name] = path

    stage = STAGES[0]
    try:
        # segment
        stage = "segment"
        text = Path(config.input_text).read_text(encoding="utf-8")
        abbreviations = (textprep.load_abbreviations(config.abbreviations)
                         if config.abbreviations else frozenset())
        records = textprep.segment_text(text, abbreviations=abbreviations)
        if config.speakers is not None:
            speaker_map = textprep.load_speaker_map(config.speakers)
            records = textprep.annotate_speakers(records, speaker_map)
        result.sentences = records
        n_paragraphs = max(r.paragraph_id for r in records)
        write("sentences", "sentences.csv", textprep.sentences_to_csv(records))
        result.summary.append(
            f"segment: {len(records)} sentences, {n_paragraphs} paragraphs")
        if target >= STAGES.index("tokenize"):
            # tokenize
            stage = "tokenize"
            token_lists = [textprep.tokenize(r) for r in records]
            occurrences = sum(len(tl.tokens) for tl in token_lists)
            distinct = len({tok for tl in token_lists for tok in tl.tokens})
            result.summary.append(
                f"tokenize: {distinct} distinct words, {occurrences} occurrences")
        if target >= STAGES.index("build"):
            # build
            stage = "build"
            paragraph_ids = {r.sentence_id: r.paragraph_id for r in records}
            table = corpus.build_table(token_lists, unit=config.unit,
                                       paragraph_ids=paragraph_ids)
            result.summary.append(
                f"build: {table.shape[0]} {config.unit} rows x {table.shape[1]} words")
        if target >= STAGES.index("filter"):
            # filter
            stage = "filter"
            stopwords = (corpus.load_word_list(config.stopwords)
                         if config.stopwords else frozenset())
            lexicon = (corpus.load_word_list(config.lexicon)
                       if config.lexicon else None)
            filt = corpus.CorpusFilter(
                min_total_count=config.min_total_count,
                min_doc_count=config.min_doc_count,
                min_word_length=config.min_word_length,
                stopwords=stopwords,
                lexicon=lexicon,
            )
            table = corpus.apply_filter(table, filt)
            result.table = table
            write("table", "table.csv", corpus.table_to_csv(table))
            result.summary.append(
                f"filter: {table.shape[1]} words, {table.total} occurrences, "
                f"{table.shape[0]} non-empty rows")
        if target >= STAGES.index("aggregate") and (
                config.segment_sizes is not None or config.segment_file is not None):
            # aggregate
            stage = "aggregate"
            paragraph_of = {str(r.sentence_id): r.paragraph_id for r in records}
            if config.unit == "paragraph":
                paragraph_of = {lab: int(lab) for lab in table.row_labels}
            segmentation = _segmentation_for(config, table, paragraph_of)
            table = corpus.aggregate(table, segmentation)
            result.table = table
            write("segments", "table_segments.csv", corpus.table_to_csv(table))
            result.summary.append(f"aggregate: {table.shape[0]} segments")
        if target >= STAGES.index("fit_ca"):
            # fit_ca
            stage = "fit_ca"
            model = ca.fit_ca(table)
            result.model = model
            write("inertia", "inertia.csv", ca.inertia_table_csv(model))
            write("row_coords", "row_coordinates.csv", ca.coordinates_csv(model, "row"))
            write("col_coords", "col_coordinates.csv", ca.coordinates_csv(model, "col"))
            write("row_contrib", "row_contributions.csv", ca.contributions_csv(model, "row"))
            write("col_contrib", "col_contributions.csv", ca.contributions_csv(model, "col"))
            result.summary.append(
                f"fit_ca: {model.n_axes} axes, total inertia {model.total_inertia:.6g}")
        if target >= STAGES.index("cluster"):
            # cluster
            stage = "cluster"
            n_axes = model.n_axes if config.axes == 0 else min(config.axes, model.n_axes)
            coords = model.row_coords[:, :n_axes]
            if config.cluster == "ward":
                cloud = clustering.PointCloud(table.row_labels, coords,
                                              masses=model.row_masses.copy())
                dendrogram = clustering.ward_cluster(cloud)
            else:
                cloud = clustering.PointCloud(table.row_labels, coords)
                dendrogram = clustering.constrained_complete_link(cloud)
            result.dendrogram = dendrogram
            write("dendrogram", "dendrogram.txt",
                  clustering.dendrogram_to_text(dendrogram))
            result.summary.append(
                f"cluster: {config.cluster} tree over {len(table.row_labels)} rows "
                f"({n_axes} axes)")
        if target >= STAGES.index("cut"):
            # cut
            stage = "cut"
            if config.cut == "max-gap":
                partition = clustering.cut_max_gap(dendrogram)
            else:
                partition = clustering.cut_k(dendrogram, int(config.cut))
            result.partition = partition
            write("partition", "partition.csv", clustering.partition_to_csv(partition))
            sizes = "/".join(str(len(partition.members(c + 1)))
                             for c in range(partition.k))
            result.summary.append(f"cut: {partition.k} clusters (sizes {sizes})")
        if target >= STAGES.index("vtest"):
            # vtest
            stage = "vtest"
            report = characterize.characterize_clusters(
                table, partition, alpha=config.vtest_alpha)
            result.report = report
            write("vtest", "vtest.csv", characterize.report_to_csv(report))
            result.summary.append(
                f"vtest: {len(report.entries)} significant word/cluster pairs "
                f"at alpha {config.vtest_alpha:g}")
        if target >= STAGES.index("plot"):
            # plot
            stage = "plot"
            ax, ay = config.plot_axes
            ax = min(ax, model.n_axes)
            ay = min(ay, model.n_axes)
            if ax == ay:
                raise ValueError(
                    f"cannot draw a plane: axes {config.plot_axes} collapse onto "
                    f"axis {ax} in a model with {model.n_axes} fitted axes")
            aggregated = "segments" in result.files
            if aggregated:
                plane = plots.render_factor_plane(
                    model, ax, ay, side="row",
                    selection=("labels", list(table.row_labels)),
                    trajectory=True, title="segment trajectory")
                write("plane_rows", "factor_plane_segments.svg", plane)
            words = plots.render_factor_plane(
                model, ax, ay, side="col",
                selection=("top", min(config.plot_top_k, len(table.col_labels))),
                title=f"top {min(config.plot_top_k, len(table.col_labels))} "
                      "contributing words")
            write("plane_cols", "factor_plane_words.svg", words)
            tree = plots.render_dendrogram(dendrogram, cut=partition.k,
                                           title=f"{config.cluster} dendrogram")
            write("tree", "dendrogram.svg", tree)
            result.summary.append(
                f"plot: {len([k for k in result.files if k.startswith('plane')]) + 1} "
                "SVG files")
    except StageError:
        raise
    except Exception as exc:
        for path in result.files.values():
            try:
                path.unlink()
            except OSError:  # pragma: no cover - cleanup best effort
                logger.warning("could not remove partial output %s", path)
        raise StageError(stage, exc) from exc
    return result


def config_with_overrides(config: PipelineConfig, out_dir: Path | None) -> PipelineConfig:
    """CLI helper: apply the --out override without mutating the original."""
    if out_dir is None:
        return config
    return replace(config, out_dir=Path(out_dir))
