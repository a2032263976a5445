import numpy as np

import mlconstructive as mc
from mlconstructive.analysis import generate_instances, held_karp
from mlconstructive.candidates import build_candidate_lists, build_promising_list
from mlconstructive.fragments import PartialSolution
from mlconstructive.render import (
    BLUE,
    GREEN,
    RED,
    SIZE,
    OfflineEdgeSource,
    from_blob,
    local_view,
    render_context,
    to_blob,
    to_ppm,
)

from oracles import count_marked_points


def small_setup(seed=50, n=40):
    inst = generate_instances(1, n, n, seed=seed)[0]
    cls = build_candidate_lists(inst)
    return inst, cls


def test_image_shape_and_binary_values():
    inst, cls = small_setup()
    img = render_context(inst, cls, PartialSolution(inst.n), 0, 1)
    assert img.shape == (96, 96, 3)
    assert img.dtype == np.float32
    assert set(np.unique(img)) <= {0.0, 1.0}


def test_empty_partial_solution_blue_channel_zero():
    inst, cls = small_setup()
    img = render_context(inst, cls, PartialSolution(inst.n), 2, 3)
    assert not img[:, :, BLUE].any()


def test_render_deterministic():
    inst, cls = small_setup()
    ps = PartialSolution(inst.n)
    ps.accept_edge(0, 1)
    a = render_context(inst, cls, ps, 2, 3)
    b = render_context(inst, cls, ps, 2, 3)
    assert (a == b).all()


def test_geometry_stays_inside_inscribed_circle():
    inst, cls = small_setup(seed=51)
    img = render_context(inst, cls, PartialSolution(inst.n), 0, 1)
    ys, xs = np.nonzero(img.any(axis=2))
    center = SIZE // 2
    radii = np.hypot(ys - center, xs - center)
    # marks dilate by one pixel past the projected point
    assert radii.max() <= center + 1.5


def test_translation_invariance():
    inst, cls = small_setup(seed=52)
    shifted = mc.from_coords(inst.coords + np.array([1000.0, -500.0]),
                             edge_weight_type=inst.edge_weight_type)
    cls2 = build_candidate_lists(shifted)
    a = render_context(inst, cls, PartialSolution(inst.n), 4, 7)
    b = render_context(shifted, cls2, PartialSolution(inst.n), 4, 7)
    assert (a == b).all()


def test_uniform_scaling_invariance():
    inst, cls = small_setup(seed=53)
    for factor in (2.0, 0.5):
        scaled = mc.from_coords(inst.coords * factor,
                                edge_weight_type=inst.edge_weight_type)
        cls2 = build_candidate_lists(scaled)
        a = render_context(inst, cls, PartialSolution(inst.n), 1, 9)
        b = render_context(scaled, cls2, PartialSolution(inst.n), 1, 9)
        assert (a == b).all()


def test_degenerate_coincident_points_all_marks_at_center():
    inst = mc.from_coords([(5.0, 5.0)] * 4, edge_weight_type="EUC_2D_REAL")
    cls = build_candidate_lists(inst)
    img = render_context(inst, cls, PartialSolution(inst.n), 0, 1)
    ys, xs = np.nonzero(img.any(axis=2))
    center = SIZE // 2
    assert abs(ys - center).max() <= 1 and abs(xs - center).max() <= 1


def test_red_mark_count_matches_local_view():
    # well separated points so no two 3x3 marks merge
    rng = np.random.default_rng(54)
    coords = np.stack(np.meshgrid(np.arange(5), np.arange(5)), -1).reshape(-1, 2)
    inst = mc.from_coords(coords * 100.0, edge_weight_type="EUC_2D_REAL")
    cls = build_candidate_lists(inst, k=4)
    img = render_context(inst, cls, PartialSolution(inst.n), 0, 24)
    verts = local_view(cls, 0, 24)
    assert count_marked_points(img, RED) == len(verts)
    assert len(verts) <= 2 * cls.k + 2


def test_blue_edges_need_both_endpoints_visible():
    inst, cls = small_setup(seed=55, n=60)
    ps = PartialSolution(inst.n)
    i, j = 0, 1
    view = set(local_view(cls, i, j))
    outside = [v for v in range(inst.n) if v not in view]
    assert len(outside) >= 2
    ps.accept_edge(outside[0], outside[1])
    img = render_context(inst, cls, ps, i, j)
    assert not img[:, :, BLUE].any()


def test_green_channel_single_segment():
    inst, cls = small_setup(seed=56)
    img = render_context(inst, cls, PartialSolution(inst.n), 3, 8)
    assert count_marked_points(img, GREEN) == 1
    assert img[:, :, GREEN].sum() >= 2


def test_offline_source_replays_optimal_edges():
    inst = generate_instances(1, 12, 12, seed=57)[0]
    opt = held_karp(inst)
    cls = build_candidate_lists(inst)
    entries = build_promising_list(cls, 2)
    src = OfflineEdgeSource(inst.n, opt.edges())
    assert src.ps.t == 0  # nothing precedes the first entry
    for e in entries:
        src.advance(e.i, e.j)
    expected = {
        (min(e.i, e.j), max(e.i, e.j))
        for e in entries
        if (min(e.i, e.j), max(e.i, e.j)) in opt.edges()
    }
    assert src.ps.edges == expected


def test_online_blue_matches_replay_of_accepted_edges():
    from mlconstructive import policies as pol
    from mlconstructive.driver import ml_constructive

    inst = generate_instances(1, 30, 30, seed=58)[0]
    cls = build_candidate_lists(inst)
    _, trace = ml_constructive(inst, pol.AlwaysPolicy())
    replay = PartialSolution(inst.n)
    for r in trace.records:
        if r.decision:
            replay.accept_edge(r.i, r.j)
    live = PartialSolution(inst.n)
    for r in trace.records:
        if r.decision:
            live.accept_edge(r.i, r.j)
    a = render_context(inst, cls, replay, 0, 1)
    b = render_context(inst, cls, live, 0, 1)
    assert (a == b).all()


def test_ppm_and_blob_roundtrip():
    inst, cls = small_setup(seed=59)
    img = render_context(inst, cls, PartialSolution(inst.n), 0, 1)
    ppm = to_ppm(img)
    assert ppm.startswith(b"P6 96 96 255\n")
    assert len(ppm) == len(b"P6 96 96 255\n") + 96 * 96 * 3
    blob = to_blob(img)
    assert len(blob) == 96 * 96 * 3 * 4
    assert (from_blob(blob) == img).all()
