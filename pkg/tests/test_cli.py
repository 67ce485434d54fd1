import json
import math

import numpy as np
import pytest

from rigidfold import (
    crane_schedule,
    generate_crane,
    generate_miura,
    generate_waterbomb_base,
    serialize_pattern,
    waterbomb_symmetric_oracle,
)
from rigidfold.cli import export_obj, main, parse_obj
from rigidfold.embedding import embed
from rigidfold.pattern import CreasePattern


@pytest.fixture()
def miura_file(tmp_path, miura33):
    path = tmp_path / "miura.json"
    path.write_text(serialize_pattern(miura33))
    return path


@pytest.fixture()
def waterbomb_file(tmp_path, waterbomb):
    path = tmp_path / "wb.json"
    path.write_text(serialize_pattern(waterbomb))
    return path


class TestValidateCommand:
    def test_ok_pattern(self, miura_file, capsys):
        assert main(["validate", "--pattern", str(miura_file)]) == 0
        assert json.loads(capsys.readouterr().out)["ok"] is True

    def test_hole_pattern_fails(self, tmp_path, capsys):
        verts = [[0, 0], [3, 0], [3, 3], [0, 3],
                 [1, 1], [2, 1], [2, 2], [1, 2]]
        p = CreasePattern(
            verts,
            [[1, 5, "U"], [2, 6, "U"], [3, 7, "U"], [0, 4, "U"]],
            [[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4]],
            [[0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]],
        )
        path = tmp_path / "hole.json"
        path.write_text(serialize_pattern(p))
        assert main(["validate", "--pattern", str(path)]) == 1
        report = json.loads(capsys.readouterr().out)
        assert any(v["kind"] == "holes-unsupported" for v in report["violations"])

    def test_missing_file(self, tmp_path):
        assert main(["validate", "--pattern", str(tmp_path / "nope.json")]) == 2

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        assert main(["validate", "--pattern", str(bad)]) == 1


class TestInfoCommand:
    def test_waterbomb_dof(self, waterbomb_file, capsys):
        assert main(["info", "--pattern", str(waterbomb_file)]) == 0
        info = json.loads(capsys.readouterr().out)
        assert info["dof"] == 5
        assert info["creases"] == 8
        assert info["interior_vertices"] == 1

    def test_miura_dof(self, miura_file, capsys):
        assert main(["info", "--pattern", str(miura_file)]) == 0
        assert json.loads(capsys.readouterr().out)["dof"] == 1

    def test_flat_unassigned_warns(self, tmp_path, capsys):
        p = generate_miura(1, 1)
        stripped = CreasePattern(
            p.vertices, [(c.a, c.b, "U") for c in p.creases],
            p.boundary, p.facets,
        )
        path = tmp_path / "u.json"
        path.write_text(serialize_pattern(stripped))
        assert main(["info", "--pattern", str(path)]) == 0
        assert "warning" in json.loads(capsys.readouterr().out)


class TestFoldCommand:
    def test_miura_run_artifacts(self, miura_file, miura33, tmp_path, capsys):
        i1 = miura33.meta["driven_crease"]
        i2 = miura33.meta["follower_crease"]
        sched = {"stages": [
            {"controlled": [{"crease": i1, "target": -math.pi / 2}],
             "hold": [], "steps": 18},
        ]}
        spath = tmp_path / "sched.json"
        spath.write_text(json.dumps(sched))
        out = tmp_path / "run"
        code = main([
            "fold", "--pattern", str(miura_file), "--schedule", str(spath),
            "--out", str(out), "--every", "6", "--eps", "1e-13",
        ])
        assert code == 0
        angles = (out / "angles.csv").read_text().splitlines()
        assert len(angles) == 20  # header + seed + 18 steps
        rows = [list(map(float, line.split(","))) for line in angles[1:]]
        for row in rows:
            gap = abs(
                math.tan(row[1 + i2] / 2)
                - math.cos(math.pi / 3) * math.tan(row[1 + i1] / 2)
            )
            assert gap < 1e-8
        residuals = (out / "residuals.csv").read_text().splitlines()[1:]
        assert all(float(line.split(",")[1]) < 1e-9 for line in residuals)
        assert (out / "step_0000.obj").exists()
        assert (out / "step_0006.obj").exists()
        assert (out / "step_0018.obj").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["steps"] == 18

    def test_crane_stages_flagged(self, tmp_path, capsys):
        crane = generate_crane()
        cpath = tmp_path / "crane.json"
        cpath.write_text(serialize_pattern(crane))
        spath = tmp_path / "sched.json"
        spath.write_text(json.dumps(crane_schedule(crane, steps_per_stage=12).to_dict()))
        out = tmp_path / "crun"
        code = main([
            "fold", "--pattern", str(cpath), "--schedule", str(spath),
            "--out", str(out), "--every", "12", "--seed-magnitude", "0",
        ])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["stage_ends"] == [12, 24, 36]
        assert manifest["max_residual"] < 1e-9

    def test_empty_schedule_single_obj(self, miura_file, tmp_path, capsys):
        spath = tmp_path / "empty.json"
        spath.write_text(json.dumps({"stages": []}))
        out = tmp_path / "erun"
        assert main([
            "fold", "--pattern", str(miura_file), "--schedule", str(spath),
            "--out", str(out),
        ]) == 0
        objs = sorted(out.glob("*.obj"))
        assert len(objs) == 1

    def test_blocked_drive_exits_3(self, tmp_path, capsys):
        crane = generate_crane()
        cpath = tmp_path / "crane.json"
        cpath.write_text(serialize_pattern(crane))
        ids = crane.meta["names"]
        drive = crane.crease_index[tuple(sorted((ids["O"], ids["M3"])))]
        hold = [i for i in range(crane.n_creases) if i != drive]
        spath = tmp_path / "blocked.json"
        spath.write_text(json.dumps({"stages": [
            {"controlled": [{"crease": drive, "target": math.pi / 2}],
             "hold": hold, "steps": 2},
        ]}))
        out = tmp_path / "blocked_run"
        code = main([
            "fold", "--pattern", str(cpath), "--schedule", str(spath),
            "--out", str(out), "--seed-magnitude", "0",
        ])
        assert code == 3

    def test_determinism_byte_identical(self, miura_file, miura33, tmp_path, capsys):
        i1 = miura33.meta["driven_crease"]
        spath = tmp_path / "s.json"
        spath.write_text(json.dumps({"stages": [
            {"controlled": [{"crease": i1, "target": -1.0}], "hold": [], "steps": 5},
        ]}))
        outs = []
        for sub in ("r1", "r2"):
            out = tmp_path / sub
            main(["fold", "--pattern", str(miura_file), "--schedule", str(spath),
                  "--out", str(out)])
            outs.append((out / "angles.csv").read_bytes())
        assert outs[0] == outs[1]


class TestRelaxCommand:
    def test_bistable_wells(self, waterbomb_file, waterbomb, tmp_path, capsys):
        rm, rv = waterbomb_symmetric_oracle(5 * math.pi / 8)
        springs = {"k_per_length": 1.0, "creases": [
            {"crease": i, "k": None,
             "rest": rm if i in waterbomb.meta["mountains"] else rv}
            for i in range(8)
        ]}
        spath = tmp_path / "springs.json"
        spath.write_text(json.dumps(springs))
        finals = {}
        for name, theta in (("up", 3 * math.pi / 4), ("down", 0.0)):
            m, v = waterbomb_symmetric_oracle(theta)
            state = np.zeros(8)
            state[waterbomb.meta["mountains"]] = m
            state[waterbomb.meta["valleys"]] = v
            stpath = tmp_path / f"{name}.json"
            stpath.write_text(json.dumps({"rho": list(state)}))
            out = tmp_path / f"relax_{name}"
            code = main([
                "relax", "--pattern", str(waterbomb_file), "--springs", str(spath),
                "--state", str(stpath), "--out", str(out),
            ])
            assert code == 0
            finals[name] = np.array(
                json.loads((out / "final_state.json").read_text())["rho"]
            )
            assert (out / "energy.csv").exists()
            manifest = json.loads((out / "manifest.json").read_text())
            assert manifest["converged"]
        assert abs(finals["up"][0] - rm) < 1e-4
        assert abs(finals["up"][0] - finals["down"][0]) > 0.1

    def test_rest_compatible_start_zero_steps(self, waterbomb_file, waterbomb,
                                              tmp_path, capsys):
        rm, rv = waterbomb_symmetric_oracle(5 * math.pi / 8)
        springs = {"k_per_length": 1.0, "creases": [
            {"crease": i, "k": None,
             "rest": rm if i in waterbomb.meta["mountains"] else rv}
            for i in range(8)
        ]}
        spath = tmp_path / "springs.json"
        spath.write_text(json.dumps(springs))
        state = np.zeros(8)
        state[waterbomb.meta["mountains"]] = rm
        state[waterbomb.meta["valleys"]] = rv
        stpath = tmp_path / "rest.json"
        stpath.write_text(json.dumps({"rho": list(state)}))
        out = tmp_path / "rrun"
        assert main([
            "relax", "--pattern", str(waterbomb_file), "--springs", str(spath),
            "--state", str(stpath), "--out", str(out),
        ]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["steps"] <= 1
        assert manifest["final_energy"] < 1e-10


class TestObjExport:
    def test_unit_square(self):
        p = CreasePattern(
            [[0, 0], [1, 0], [1, 1], [0, 1]], [],
            [[0, 1], [1, 2], [2, 3], [3, 0]], [[0, 1, 2, 3]],
        )
        e = embed(p, np.zeros(0))
        text = export_obj(e, p.facets)
        lines = text.strip().splitlines()
        assert sum(1 for t in lines if t.startswith("v ")) == 4
        assert sum(1 for t in lines if t.startswith("f ")) == 2  # fan split

    def test_roundtrip_distances(self, miura33, miura_run):
        s = miura_run["traj"].states[12]
        e = embed(miura33, s)
        verts, faces = parse_obj(export_obj(e, miura33.facets))
        assert verts.shape == e.coords.shape
        rng = np.random.default_rng(41)
        idx = rng.integers(0, len(verts), size=(30, 2))
        for i, j in idx:
            d1 = np.linalg.norm(verts[i] - verts[j])
            d2 = np.linalg.norm(e.coords[i] - e.coords[j])
            assert abs(d1 - d2) < 1e-12

    def test_obj_grammar(self, miura33):
        e = embed(miura33, np.zeros(miura33.n_creases))
        for line in export_obj(e, miura33.facets).strip().splitlines():
            parts = line.split()
            assert parts[0] in ("v", "f")
            if parts[0] == "v":
                assert len(parts) == 4
                [float(x) for x in parts[1:]]
            else:
                assert len(parts) == 4
                ids = [int(x) for x in parts[1:]]
                assert all(1 <= i <= len(e.coords) for i in ids)

    def test_export_command(self, waterbomb_file, tmp_path, capsys):
        out = tmp_path / "wb.obj"
        assert main([
            "export-obj", "--pattern", str(waterbomb_file), "--out", str(out),
        ]) == 0
        verts, faces = parse_obj(out.read_text())
        assert len(verts) == 9
        assert len(faces) == 8


class TestMeasureCommand:
    def test_flat_dimensions(self, miura_file, miura33, tmp_path, capsys):
        stpath = tmp_path / "flat.json"
        stpath.write_text(json.dumps({"rho": [0.0] * miura33.n_creases}))
        assert main([
            "measure", "--pattern", str(miura_file), "--state", str(stpath),
        ]) == 0
        dims = json.loads(capsys.readouterr().out)
        assert dims["H"] == 0.0
        assert dims["L"] > dims["W"] > 0
