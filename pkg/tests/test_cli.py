"""Command line driver, exercised in process through main(argv)."""

import json

import numpy as np
import pytest

import psfront.cli as cli


def read_lines(path):
    return path.read_text().splitlines()


# -- generate ----------------------------------------------------------------

def test_generate_writes_quad_mesh_and_cache(tmp_path, capsys):
    rc = cli.main(["generate", "--preset", "pseudosphere", "--grid", "33",
                   "--out", str(tmp_path)])
    assert rc == 0
    lines = read_lines(tmp_path / "pseudosphere_lam1_n33.obj")
    verts = [l for l in lines if l.startswith("v ")]
    faces = [l for l in lines if l.startswith("f ")]
    assert len(verts) == 33 * 33
    assert len(faces) == 32 * 32
    assert faces[0] == "f 1 34 35 2"
    cache = np.load(tmp_path / "pseudosphere_n33_frame.npz")
    assert int(cache["n_trunc"]) == 16
    assert cache["Uhat"].shape == (33, 33, 33, 2, 2)
    assert cache["phihat"].shape == (33, 33)
    assert "wrote" in capsys.readouterr().out


def test_generate_warns_on_degenerate_image(tmp_path, capsys):
    rc = cli.main(["generate", "--preset", "vacuum", "--grid", "17",
                   "--out", str(tmp_path)])
    assert rc == 0
    assert "not regular" in capsys.readouterr().err
    assert (tmp_path / "vacuum_lam1_n17.obj").exists()


def test_generate_one_mesh_per_lambda(tmp_path):
    rc = cli.main(["generate", "--preset", "c0_kink", "--amplitude", "0.5",
                   "--grid", "17", "--lambda", "0.5,1,2",
                   "--out", str(tmp_path)])
    assert rc == 0
    for tag in ("lam0.5", "lam1", "lam2"):
        assert (tmp_path / f"c0_kink0.5_{tag}_n17.obj").exists()


def test_generate_ply_format(tmp_path):
    rc = cli.main(["generate", "--preset", "pseudosphere", "--grid", "17",
                   "--format", "ply", "--out", str(tmp_path)])
    assert rc == 0
    verts, faces = cli.read_ply(tmp_path / "pseudosphere_lam1_n17.ply")
    assert verts.shape == (289, 3)
    assert len(faces) == 256
    assert faces[0] == [0, 17, 18, 1]


# -- verify ------------------------------------------------------------------

def test_verify_default_run_passes(tmp_path, capsys):
    rc = cli.main(["verify", "--preset", "pseudosphere",
                   "--out", str(tmp_path)])
    assert rc == 0
    assert "all checks passed" in capsys.readouterr().out
    summary = json.loads((tmp_path / "verify_pseudosphere_n129.json")
                         .read_text())
    assert summary["pass"] is True
    checks = summary["lambdas"]["1"]["checks"]
    assert len(checks) == 12
    assert all(entry["pass"] for entry in checks.values())


def test_verify_fails_with_tight_tolerance(tmp_path, capsys):
    rc = cli.main(["verify", "--preset", "pseudosphere", "--grid", "65",
                   "--tol", "1e-15", "--out", str(tmp_path)])
    assert rc == 1
    assert "FAIL: K+1 residual" in capsys.readouterr().err
    summary = json.loads((tmp_path / "verify_pseudosphere_n65.json")
                         .read_text())
    assert summary["pass"] is False


def test_verify_degenerate_image_passes_with_zero_regular_nodes(tmp_path):
    rc = cli.main(["verify", "--preset", "vacuum", "--grid", "17",
                   "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "verify_vacuum_n17.json").read_text())
    assert summary["lambdas"]["1"]["regular nodes"] == 0


# -- export ------------------------------------------------------------------

def test_export_csv_is_deterministic(tmp_path):
    for sub in ("a", "b"):
        rc = cli.main(["export", "--preset", "pseudosphere", "--grid", "33",
                       "--format", "csv", "--out", str(tmp_path / sub)])
        assert rc == 0
    fa = (tmp_path / "a" / "pseudosphere_lam1_n33.csv").read_bytes()
    fb = (tmp_path / "b" / "pseudosphere_lam1_n33.csv").read_bytes()
    assert fa == fb
    lines = fa.decode().splitlines()
    assert lines[0] == "x,y,fx,fy,fz,Nx,Ny,Nz,E,F,G,K,omega"
    assert len(lines) == 33 * 33 + 1


def test_export_frame_glyphs_are_orthonormal(tmp_path):
    rc = cli.main(["export", "--preset", "pseudosphere", "--grid", "33",
                   "--glyphs", "--out", str(tmp_path)])
    assert rc == 0
    data = np.loadtxt(tmp_path / "pseudosphere_lam1_n33_glyphs.csv",
                      delimiter=",", skiprows=1)
    assert data.shape == (33, 13)
    triple = data[:, 4:13].reshape(33, 3, 3)
    gram = np.einsum("nik,njk->nij", triple, triple)
    assert np.abs(gram - np.eye(3)).max() < 1e-8


def test_export_coordinate_curves(tmp_path):
    rc = cli.main(["export", "--preset", "pseudosphere", "--grid", "17",
                   "--curves", "--stride", "8", "--out", str(tmp_path)])
    assert rc == 0
    lines = read_lines(tmp_path / "pseudosphere_lam1_n17_curves.obj")
    polys = [l for l in lines if l.startswith("l ")]
    assert len(polys) == 6
    assert all(len(p.split()) == 18 for p in polys)


def test_ply_writer_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    f = rng.normal(size=(4, 3, 3))
    path = tmp_path / "mesh.ply"
    cli.write_ply(path, f)
    verts, faces = cli.read_ply(path)
    assert np.array_equal(verts, f.reshape(-1, 3))
    assert len(faces) == 6
    assert faces[0] == [0, 3, 4, 1]


# -- sweep and oracle --------------------------------------------------------

def test_sweep_builds_frame_once(tmp_path, monkeypatch):
    calls = []
    orig = cli._build_state

    def counting(cfg):
        calls.append(cfg.name)
        return orig(cfg)

    monkeypatch.setattr(cli, "_build_state", counting)
    rc = cli.main(["sweep", "--preset", "pseudosphere", "--grid", "33",
                   "--lambda", "0.5,1,2", "--out", str(tmp_path)])
    assert rc == 0
    assert calls == ["pseudosphere"]
    rows = np.loadtxt(tmp_path / "sweep_pseudosphere_n33.csv",
                      delimiter=",", skiprows=1)
    assert rows.shape == (3, 9)
    assert np.array_equal(rows[:, 0], [0.5, 1.0, 2.0])


def test_oracle_sg_reports_and_writes_csv(tmp_path, capsys):
    rc = cli.main(["oracle-sg", "--preset", "pseudosphere", "--grid", "33",
                   "--out-csv", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out[-1].startswith("wrote ")
    report = json.loads("\n".join(out[:-1]))
    assert report["preset"] == "pseudosphere"
    assert report["grid"] == 33
    assert report["final delta"] < 1e-12
    assert report["iterations"] <= 20
    lines = read_lines(tmp_path / "goursat_pseudosphere_n33.csv")
    assert lines[0] == "x,y,phi"
    assert len(lines) == 33 * 33 + 1


# -- configuration -----------------------------------------------------------

@pytest.mark.parametrize("argv,needle", [
    (["generate", "--preset", "pseudosphere", "--grid", "2"],
     "at least 3 nodes"),
    (["generate", "--preset", "pseudosphere", "--lambda=-1"],
     "must be positive"),
    (["generate", "--preset", "pseudosphere", "--trunc", "0"],
     "truncation degree"),
    (["generate", "--preset", "c0_kink", "--grid", "17"],
     "requires --amplitude"),
    (["verify", "--preset", "pseudosphere", "--grid", "9",
      "--tol", "bogus=1"], "unknown tolerance name"),
])
def test_bad_configuration_exits_2(tmp_path, capsys, argv, needle):
    rc = cli.main(argv + ["--out", str(tmp_path)])
    assert rc == 2
    err = capsys.readouterr().err
    assert "psfront: error" in err
    assert needle in err


def test_unknown_preset_in_config_file_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "nope", "grid": 9}))
    rc = cli.main(["generate", "--config", str(cfg),
                   "--out", str(tmp_path)])
    assert rc == 2
    assert "unknown preset" in capsys.readouterr().err


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "vacuum", "grid": 9,
                               "lambdas": [1.0], "out": str(tmp_path)}))
    assert cli.main(["generate", "--config", str(cfg)]) == 0
    assert (tmp_path / "vacuum_lam1_n9.obj").exists()
    assert cli.main(["generate", "--config", str(cfg), "--grid", "17"]) == 0
    assert (tmp_path / "vacuum_lam1_n17.obj").exists()
