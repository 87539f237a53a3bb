"""SVG renderers: well-formedness, selection rules, layout invariants."""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from storyfactors import ca, clustering, plots
from storyfactors.corpus import ContingencyTable


def _model(rows=12, cols=60, seed=4):
    rng = np.random.default_rng(seed)
    counts = rng.integers(0, 7, size=(rows, cols))
    counts += 1
    table = ContingencyTable(
        tuple(f"s{i}" for i in range(rows)),
        tuple(f"word{j:02d}" for j in range(cols)),
        counts,
    )
    return ca.fit_ca(table)


def _constrained_dendrogram(n=10, seed=6):
    rng = np.random.default_rng(seed)
    coords = np.cumsum(rng.uniform(0.5, 2.0, size=(n, 2)), axis=0)
    cloud = clustering.PointCloud(tuple(f"s{i}" for i in range(n)), coords)
    return clustering.constrained_complete_link(cloud)


def test_factor_plane_is_well_formed_xml():
    svg = plots.render_factor_plane(_model(), title="plane & <test>")
    root = ET.fromstring(svg)
    assert root.tag == "{http://www.w3.org/2000/svg}svg"


def test_factor_plane_has_no_external_references():
    svg = plots.render_factor_plane(_model())
    assert svg.count("http") == 1  # only the xmlns declaration
    assert "href" not in svg
    assert "url(#arrow)" not in svg  # no trajectory, no arrows


def test_top_k_selection_draws_k_points():
    svg = plots.render_factor_plane(_model(), selection=("top", 40))
    assert svg.count("<circle") == 40
    # 40 point labels plus the two axis annotations.
    assert svg.count("<text") == 42


def test_top_k_larger_than_vocabulary_draws_everything():
    model = _model(cols=6)
    svg = plots.render_factor_plane(model, selection=("top", 99))
    assert svg.count("<circle") == 6


def test_trajectory_draws_arrows_between_consecutive_rows():
    model = _model(rows=8, cols=12)
    svg = plots.render_factor_plane(
        model, side="col", selection=("top", 5), trajectory=True
    )
    assert svg.count('marker-end="url(#arrow)"') == 7
    assert svg.count("<circle") == 5 + 8  # word points plus segment points


def test_row_side_trajectory_does_not_duplicate_row_points():
    model = _model(rows=8, cols=12)
    svg = plots.render_factor_plane(
        model, side="row", selection=("labels", model.row_labels), trajectory=True
    )
    assert svg.count("<circle") == 8


def test_axis_annotations_show_inertia_percent():
    model = _model()
    svg = plots.render_factor_plane(model, axis_x=1, axis_y=2)
    ev = model.singular_values**2
    pct = 100.0 * ev[0] / ev.sum()
    assert f"factor 1 ({pct:.1f}%)" in svg


def test_selection_rules():
    model = _model(cols=8)
    top = plots._select_points(model, 1, 2, "col", ("top", 3))
    assert len(top) == 3
    score = model.col_contrib[:, 0] + model.col_contrib[:, 1]
    best = model.col_labels[int(np.argmax(score))]
    assert best in top
    # Model order is preserved.
    assert top == [lab for lab in model.col_labels if lab in top]

    near = plots._select_points(model, 1, 2, "col", ("origin", 1.0))
    assert near == list(model.col_labels)
    radius = np.hypot(model.col_coords[:, 0], model.col_coords[:, 1])
    half = plots._select_points(model, 1, 2, "col", ("origin", 0.5))
    cutoff = 0.5 * radius.max()
    assert set(half) == {lab for lab, r in zip(model.col_labels, radius) if r <= cutoff}

    explicit = plots._select_points(
        model, 1, 2, "col", ("labels", [model.col_labels[4], model.col_labels[1]])
    )
    assert explicit == [model.col_labels[1], model.col_labels[4]]


def test_selection_validation():
    model = _model(cols=8)
    with pytest.raises(ValueError, match="empty selection"):
        plots.render_factor_plane(model, selection=("top", 0))
    with pytest.raises(ValueError, match="empty selection"):
        plots.render_factor_plane(model, selection=("labels", []))
    with pytest.raises(ValueError, match="unknown col labels: nope"):
        plots.render_factor_plane(model, selection=("labels", ["nope"]))
    with pytest.raises(ValueError, match="fraction"):
        plots.render_factor_plane(model, selection=("origin", 0.0))
    with pytest.raises(ValueError, match="selection"):
        plots.render_factor_plane(model, selection=("best", 3))


def test_axis_and_side_validation():
    model = _model(cols=8)
    with pytest.raises(ValueError, match="outside fitted range"):
        plots.render_factor_plane(model, axis_x=0)
    with pytest.raises(ValueError, match="outside fitted range"):
        plots.render_factor_plane(model, axis_y=model.n_axes + 1)
    with pytest.raises(ValueError, match="must differ"):
        plots.render_factor_plane(model, axis_x=2, axis_y=2)
    with pytest.raises(ValueError, match="side"):
        plots.render_factor_plane(model, side="diagonal")


def test_rendering_is_deterministic():
    model = _model()
    assert plots.render_factor_plane(model) == plots.render_factor_plane(model)
    dendrogram = _constrained_dendrogram()
    assert plots.render_dendrogram(dendrogram) == plots.render_dendrogram(dendrogram)


def test_dendrogram_is_well_formed_xml():
    svg = plots.render_dendrogram(_constrained_dendrogram(), cut=3, title="tree")
    root = ET.fromstring(svg)
    assert root.tag == "{http://www.w3.org/2000/svg}svg"
    assert "href" not in svg


def test_two_leaf_dendrogram_renders():
    cloud = clustering.PointCloud(("a", "b"), np.array([[0.0], [1.0]]))
    svg = plots.render_dendrogram(clustering.ward_cluster(cloud))
    ET.fromstring(svg)
    assert ">a</text>" in svg and ">b</text>" in svg


def test_cut_line_between_straddled_heights():
    dendrogram = _constrained_dendrogram()
    svg = plots.render_dendrogram(dendrogram, cut=3)
    assert 'stroke-dasharray="6,4"' in svg
    assert "k = 3" in svg
    no_cut = plots.render_dendrogram(dendrogram)
    assert "stroke-dasharray" not in no_cut
    # Extreme cuts still draw a line.
    assert "k = 1" in plots.render_dendrogram(dendrogram, cut=1)
    assert f"k = {dendrogram.n_leaves}" in plots.render_dendrogram(
        dendrogram, cut=dendrogram.n_leaves
    )
    with pytest.raises(ValueError, match="cut"):
        plots.render_dendrogram(dendrogram, cut=0)


def test_constrained_leaves_stay_chronological():
    dendrogram = _constrained_dendrogram(n=12)
    assert plots._leaf_order(dendrogram) == list(range(12))


def test_ward_leaf_order_is_a_permutation():
    rng = np.random.default_rng(9)
    cloud = clustering.PointCloud(
        tuple(f"p{i}" for i in range(9)), rng.normal(size=(9, 3))
    )
    order = plots._leaf_order(clustering.ward_cluster(cloud))
    assert sorted(order) == list(range(9))


def test_many_leaves_drop_individual_labels():
    rng = np.random.default_rng(10)
    n = 45
    coords = np.cumsum(rng.uniform(0.5, 1.5, size=(n, 1)), axis=0)
    cloud = clustering.PointCloud(tuple(f"s{i}" for i in range(n)), coords)
    svg = plots.render_dendrogram(clustering.constrained_complete_link(cloud))
    assert "45 leaves" in svg
    assert "rotate(-90" not in svg
