import csv
import json

import pytest

from vemmhd.cli import EXIT_CONFIG, EXIT_NO_CONVERGENCE, EXIT_OK, build_parser, main
from vemmhd.mesh import read_mesh


def test_parser_knows_every_command():
    parser = build_parser()
    for cmd in ("convergence", "hartmann", "solve", "mesh-info"):
        args = parser.parse_args([cmd])
        assert args.subcommand == cmd


def test_unknown_family_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["convergence", "--family", "hexagon"])
    assert info.value.code == EXIT_CONFIG
    assert capsys.readouterr().err.startswith("ERROR[usage]:")


def test_mesh_info_quad(capsys):
    assert main(["mesh-info", "--family", "quad", "--n0", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "cells=16 h=0.353553"


def test_mesh_info_round_trip(tmp_path, capsys):
    path = tmp_path / "m.json"
    assert main(["mesh-info", "--family", "voronoi", "--n0", "3", "--seed", "2", "--write-mesh", str(path)]) == EXIT_OK
    first = capsys.readouterr().out
    assert read_mesh(path).n_cells == 9
    assert main(["mesh-info", "--mesh", str(path)]) == EXIT_OK
    assert capsys.readouterr().out == first


def test_mesh_info_rejects_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"vertices": [[0, 0], [1, 0], [2, 0]], "cells": [[0, 1, 2]]}), encoding="utf-8")
    assert main(["mesh-info", "--mesh", str(path)]) == EXIT_CONFIG
    err = capsys.readouterr().err.strip()
    assert err.startswith("ERROR[") and len(err.splitlines()) == 1


def test_k0_is_rejected(capsys):
    assert main(["convergence", "--k", "0"]) == EXIT_CONFIG
    assert "k must be >= 1" in capsys.readouterr().err


def test_convergence_writes_one_row_per_level(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["convergence", "--k", "1", "--family", "quad", "--levels", "2", "--n0", "2", "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open(encoding="utf-8")))
    assert len(rows) == 2
    assert rows[0]["rate_u0"] == "" and rows[1]["rate_u0"] != ""
    assert all(float(r["div_norm"]) <= 1e-10 for r in rows)


def test_convergence_output_is_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["convergence", "--family", "voronoi", "--levels", "1", "--n0", "3", "--seed", "5", "--out"]
    assert main(argv + [str(a)]) == EXIT_OK
    assert main(argv + [str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_no_convergence_exit_code(capsys):
    code = main(["solve", "--n0", "3", "--max-iter", "1", "--tol", "1e-14"])
    assert code == EXIT_NO_CONVERGENCE
    assert "ERROR[no_convergence]" in capsys.readouterr().err


def test_hartmann_zero_gradient(tmp_path):
    out = tmp_path / "profile.csv"
    code = main(["hartmann", "--preset", "ha1", "--G", "0", "--levels", "1", "--n0", "1", "--out", str(out)])
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.open(encoding="utf-8")))
    assert len(rows) == 41
    assert all(abs(float(r["u1_numeric"])) < 1e-10 and float(r["u1_analytic"]) == 0.0 for r in rows)


def test_hartmann_rejects_convergence_preset(capsys):
    assert main(["hartmann", "--preset", "example1_k1", "--levels", "1", "--n0", "1"]) == EXIT_CONFIG
    assert "ERROR[config]" in capsys.readouterr().err


def test_config_file_is_overridden_by_flags(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("family: tri\nn0: 2\n", encoding="utf-8")
    assert main(["mesh-info", "--config", str(cfg)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("cells=8 ")
    assert main(["mesh-info", "--config", str(cfg), "--family", "quad"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("cells=4 ")


def test_convergence_preset_with_level_override(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert main(["convergence", "--preset", "example1_k1", "--levels", "2", "--n0", "2", "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open(encoding="utf-8")))
    assert len(rows) == 2
    assert "rate check (example1_k1):" in capsys.readouterr().out
