import json

import numpy as np
import pytest

from mlconstructive import cli, network, weights
from mlconstructive.analysis import generate_instances
from mlconstructive.instance import parse_tsplib, to_tsplib


@pytest.fixture
def instance_file(tmp_path):
    inst = generate_instances(1, 30, 30, seed=90)[0]
    path = tmp_path / "rand.tsp"
    path.write_text(to_tsplib(inst))
    return path, inst


def run_cli(argv):
    cli.main(argv)


def test_solve_writes_tour(instance_file, tmp_path, capsys):
    path, inst = instance_file
    out = tmp_path / "out.tour"
    run_cli(["solve", "--instance", str(path), "--policy", "cw",
             "--output", str(out)])
    stdout = capsys.readouterr().out
    assert "policy=cw" in stdout and "length=" in stdout
    text = out.read_text()
    assert "TOUR_SECTION" in text and text.count("\n") >= inst.n


def test_solve_gap_with_manifest(instance_file, tmp_path, capsys):
    path, inst = instance_file
    manifest = tmp_path / "optima.jsonl"
    manifest.write_text(json.dumps({"name": inst.name, "optimum": 4.0}) + "\n")
    run_cli(["solve", "--instance", str(path), "--policy", "y",
             "--manifest", str(manifest)])
    assert "gap=" in capsys.readouterr().out


def test_solve_deterministic(instance_file, capsys):
    path, _ = instance_file
    run_cli(["solve", "--instance", str(path), "--policy", "f"])
    a = capsys.readouterr().out.split("seconds=")[0]
    run_cli(["solve", "--instance", str(path), "--policy", "f"])
    b = capsys.readouterr().out.split("seconds=")[0]
    assert a == b


def test_solve_ml_c_with_weights(instance_file, tmp_path, capsys):
    path, _ = instance_file
    wpath = tmp_path / "w.mlcw"
    weights.save_bundle_file(wpath, network.random_records(91))
    run_cli(["solve", "--instance", str(path), "--policy", "ml-c",
             "--weights", str(wpath), "--k", "8"])
    assert "policy=ml-c" in capsys.readouterr().out


def test_missing_instance_exit_code():
    with pytest.raises(SystemExit) as exc:
        run_cli(["solve", "--instance", "/no/such.tsp", "--policy", "cw"])
    assert exc.value.code == cli.EXIT_PARSE_ERROR


def test_unknown_policy_exit_code(instance_file):
    path, _ = instance_file
    with pytest.raises(SystemExit) as exc:
        run_cli(["solve", "--instance", str(path), "--policy", "bogus"])
    assert exc.value.code == cli.EXIT_PARSE_ERROR


def test_ml_c_without_weights_exit_code(instance_file, monkeypatch):
    monkeypatch.delenv("MLC_WEIGHTS", raising=False)
    path, _ = instance_file
    with pytest.raises(SystemExit) as exc:
        run_cli(["solve", "--instance", str(path), "--policy", "ml-c"])
    assert exc.value.code == cli.EXIT_MISSING_INPUT


def test_ml_c_weights_env_fallback(instance_file, tmp_path, monkeypatch, capsys):
    path, _ = instance_file
    wpath = tmp_path / "w.mlcw"
    weights.save_bundle_file(wpath, network.random_records(92))
    monkeypatch.setenv("MLC_WEIGHTS", str(wpath))
    run_cli(["solve", "--instance", str(path), "--policy", "ml-c", "--k", "8"])
    assert "policy=ml-c" in capsys.readouterr().out


def test_ml_c_corrupt_weights_exit_code(instance_file, tmp_path):
    path, _ = instance_file
    wpath = tmp_path / "bad.mlcw"
    wpath.write_bytes(b"not a bundle at all")
    with pytest.raises(SystemExit) as exc:
        run_cli(["solve", "--instance", str(path), "--policy", "ml-c",
                 "--weights", str(wpath)])
    assert exc.value.code == cli.EXIT_MISSING_INPUT


def test_ml_sc_needs_opt_tour(instance_file):
    path, _ = instance_file
    with pytest.raises(SystemExit) as exc:
        run_cli(["solve", "--instance", str(path), "--policy", "ml-sc"])
    assert exc.value.code == cli.EXIT_MISSING_INPUT


def test_gen_then_solve_roundtrip(tmp_path, capsys):
    outdir = tmp_path / "gen"
    run_cli(["gen", "--count", "2", "--n", "12", "--seed", "93",
             "--exact", "--output", str(outdir)])
    capsys.readouterr()
    tsp_files = sorted(outdir.glob("*.tsp"))
    assert len(tsp_files) == 2
    assert (outdir / "optima.jsonl").exists()
    run_cli(["solve", "--instance", str(tsp_files[0]), "--policy", "cw",
             "--manifest", str(outdir / "optima.jsonl")])
    out = capsys.readouterr().out
    assert "gap=" in out


def test_gen_with_opt_tour_drives_ml_sc(tmp_path, capsys):
    outdir = tmp_path / "gen"
    run_cli(["gen", "--count", "1", "--n", "12", "--seed", "94",
             "--exact", "--output", str(outdir)])
    capsys.readouterr()
    tsp = next(outdir.glob("*.tsp"))
    tour = next(outdir.glob("*.tour"))
    manifest = outdir / "optima.jsonl"
    run_cli(["solve", "--instance", str(tsp), "--policy", "ml-sc",
             "--opt-tour", str(tour), "--manifest", str(manifest)])
    out = capsys.readouterr().out
    assert "gap=0.000" in out


def test_benchmark_outputs_csv_and_summary(tmp_path, capsys):
    outdir = tmp_path / "gen"
    run_cli(["gen", "--count", "2", "--n", "14", "--seed", "95",
             "--exact", "--output", str(outdir)])
    capsys.readouterr()
    tsps = [str(p) for p in sorted(outdir.glob("*.tsp"))]
    run_cli(["benchmark", "--instances", *tsps, "--policies", "cw,y,f",
             "--manifest", str(outdir / "optima.jsonl")])
    out = capsys.readouterr().out
    assert out.startswith("instance,cw,f,y")
    summary = json.loads(out[out.index("{"):])
    assert set(summary) == {"cw", "y", "f"}


def test_benchmark_without_manifest_exit_code(instance_file, monkeypatch):
    monkeypatch.delenv("MLC_MANIFEST", raising=False)
    path, _ = instance_file
    with pytest.raises(SystemExit) as exc:
        run_cli(["benchmark", "--instances", str(path), "--policies", "cw"])
    assert exc.value.code == cli.EXIT_MISSING_INPUT


def test_stats_csv_shape(tmp_path, capsys):
    out = tmp_path / "stats.csv"
    run_cli(["stats", "--count", "5", "--n-min", "10", "--n-max", "12",
             "--seed", "96", "--output", str(out)])
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "position,pdf,optimal_rate"
    assert len(lines) >= 6
    pdf_total = sum(float(l.split(",")[1]) for l in lines[1:])
    assert pdf_total == pytest.approx(1.0, abs=0.01)


def test_render_blob_and_ppm(instance_file, tmp_path, capsys):
    path, _ = instance_file
    blob = tmp_path / "ctx.blob"
    run_cli(["render", "--instance", str(path), "--edge", "0,1",
             "--output", str(blob)])
    assert blob.stat().st_size == 96 * 96 * 3 * 4
    ppm = tmp_path / "ctx.ppm"
    run_cli(["render", "--instance", str(path), "--edge", "0,1",
             "--format", "ppm", "--output", str(ppm)])
    assert ppm.read_bytes().startswith(b"P6 96 96 255\n")


def test_render_bad_edge_exit_code(instance_file, tmp_path):
    path, _ = instance_file
    with pytest.raises(SystemExit) as exc:
        run_cli(["render", "--instance", str(path), "--edge", "zero-one",
                 "--output", str(tmp_path / "x")])
    assert exc.value.code == cli.EXIT_PARSE_ERROR


def test_no_command_parse_error():
    with pytest.raises(SystemExit) as exc:
        run_cli([])
    assert exc.value.code == 2
