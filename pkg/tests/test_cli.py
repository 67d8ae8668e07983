import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frgeom.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_SOLVER, cmd_shoot, main
from frgeom.config import RunConfig, emit, parse
from frgeom.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def write_config(tmp_path, d, name="run.json"):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return p


def run(tmp_path, d, *extra):
    cfg = write_config(tmp_path, d)
    return main([d["command"], "--config", str(cfg), "--out", str(tmp_path / "out"), *extra])


class TestConfig:
    def test_defaults_filled(self):
        c = RunConfig.from_dict({"command": "shoot", "coefficients": "reciprocal"})
        assert c.params["n_steps"] == 1000 and c.grid == {"n_points": 16, "weights": "uniform"}

    @settings(max_examples=40, deadline=None)
    @given(
        st.sampled_from(["shoot", "connect", "report", "profile"]),
        st.sampled_from(["reciprocal", "fisher_rao", "extended", "reciprocal_sq"]),
        st.integers(2, 20),
        st.integers(8, 5000),
        st.booleans(),
    )
    def test_round_trip(self, command, preset, n, steps, svg):
        c = RunConfig.from_dict({"command": command, "coefficients": {"preset": preset},
                                 "grid": {"n_points": n}, "output": {"svg": svg}})
        if command in ("shoot", "profile", "report"):
            c = c.with_overrides(steps=steps)
        text = emit(c)
        assert parse(text) == c
        assert emit(parse(text)) == text

    def test_expression_round_trip(self):
        d = {"command": "report",
             "coefficients": {"expression": {"c1": [{"coef": 1, "power": -1}],
                                             "c2": [{"coef": 0.5, "power": 0}]}}}
        c = RunConfig.from_dict(d)
        assert parse(emit(c)) == c
        assert c.spec().C2(3.0) == 0.5

    @pytest.mark.parametrize("bad", [
        {"command": "fly", "coefficients": "reciprocal"},
        {"command": "shoot"},
        {"command": "shoot", "coefficients": "nope"},
        {"command": "shoot", "coefficients": "reciprocal", "params": {"n_steps": 4}},
        {"command": "shoot", "coefficients": "reciprocal", "params": {"warp": 1}},
        {"command": "connect", "coefficients": "reciprocal", "params": {"theta1": 4.0}},
        {"command": "shoot", "coefficients": {"profile": "pseudosphere"}},
        {"command": "shoot", "coefficients": "reciprocal", "grid": {"weights": [1.0]}},
        {"command": "shoot", "coefficients": "reciprocal", "output": {"svg": "yes"}},
    ])
    def test_rejects(self, bad):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(bad)

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            parse("{not json")


class TestShoot:
    def test_reciprocal_fan_signature(self, tmp_path):
        d = json.loads((CONFIGS / "reciprocal_fan.json").read_text())
        d["output"]["dir"] = str(tmp_path / "fan")
        files = cmd_shoot(RunConfig.from_dict(d))
        assert (tmp_path / "fan" / "planar.svg") in files
        rows = read_csv(tmp_path / "fan" / "planar.csv")
        assert list(rows[0]) == ["geodesic", "r_t0", "t", "x", "y"]
        for g, c in enumerate(d["params"]["r_t0"]):
            pts = [(float(r["x"]), float(r["y"])) for r in rows if r["geodesic"] == str(g)]
            radius = np.hypot(*np.array(pts).T)
            if c == 0:
                assert np.max(np.abs(radius - 1)) < 1e-9
                assert math.dist(pts[0], pts[-1]) < 1e-6
            elif c > 0:
                assert np.all(np.diff(radius) > 0)
            else:
                assert np.all(np.diff(radius) < 0)

    def test_fisher_rao_straight_lines(self, tmp_path):
        d = {"command": "shoot", "coefficients": "fisher_rao",
             "params": {"r_t0": [-0.3, 0.0, 0.4], "t_end": 1.0, "n_steps": 200}}
        assert run(tmp_path, d) == EXIT_OK
        rows = read_csv(tmp_path / "out" / "planar.csv")
        for g in "012":
            xy = np.array([(float(r["x"]), float(r["y"])) for r in rows if r["geodesic"] == g])
            d1 = xy[1:] - xy[0]
            cross = d1[:, 0] * d1[-1, 1] - d1[:, 1] * d1[-1, 0]
            assert np.max(np.abs(cross)) < 1e-10

    def test_path_csv_header_and_fields(self, tmp_path):
        d = {"command": "shoot", "coefficients": "reciprocal", "grid": {"n_points": 3},
             "params": {"r_t0": [0.1], "t_end": 1.0, "n_steps": 16}, "output": {"fields": True}}
        assert run(tmp_path, d) == EXIT_OK
        header = (tmp_path / "out" / "geodesic_00.csv").read_text().splitlines()[0]
        assert header == "t,s,r,theta,s_t,theta_t,A0_drift,f_0,f_1,f_2"

    def test_deterministic(self, tmp_path):
        d = {"command": "shoot", "coefficients": "extended",
             "params": {"r_t0": [-0.2, 0.3], "t_end": 1.0, "n_steps": 100}, "output": {"svg": True}}
        outs = []
        for k in range(2):
            d["output"]["dir"] = str(tmp_path / f"o{k}")
            assert main(["shoot", "--config", str(write_config(tmp_path, d))]) == EXIT_OK
            outs.append({p.name: p.read_bytes() for p in (tmp_path / f"o{k}").iterdir()})
        assert outs[0] == outs[1]

    def test_boundary_hit_exit_code(self, tmp_path):
        d = {"command": "shoot", "coefficients": "fisher_rao",
             "params": {"r_t0": [-2.0], "psi_norm": 0.0, "t_end": 1.0, "n_steps": 100}}
        assert run(tmp_path, d) == EXIT_SOLVER
        assert (tmp_path / "out" / "geodesic_00.csv").exists()
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["geodesics"][0]["boundary_hit"]
        d["params"]["allow_boundary_hits"] = True
        assert run(tmp_path, d) == EXIT_OK


class TestConnect:
    def test_reciprocal_example(self, tmp_path):
        d = {"command": "connect", "coefficients": "reciprocal",
             "params": {"r0": 1.0, "r1": math.e, "theta1": math.pi / 2}}
        assert run(tmp_path, d) == EXIT_OK
        s = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert s["distance"] == pytest.approx(math.sqrt(4 + 4 * (math.pi / 2) ** 2), rel=1e-8)
        assert s["iterations"] > 0 and s["drift"]["A0"] < 1e-10
        assert read_csv(tmp_path / "out" / "path.csv")

    def test_identical(self, tmp_path):
        d = {"command": "connect", "coefficients": "extended", "params": {"r0": 1.3, "r1": 1.3}}
        assert run(tmp_path, d) == EXIT_OK
        assert json.loads((tmp_path / "out" / "summary.json").read_text())["distance"] == 0.0

    def test_radial_to_small_r(self, tmp_path):
        d = {"command": "connect", "coefficients": "fisher_rao", "params": {"r0": 1.0, "r1": 1e-3}}
        assert run(tmp_path, d) == EXIT_OK
        s = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert s["distance"] == pytest.approx(2 * (1 - 1e-3))

    def test_unreachable_exit_code(self, tmp_path):
        d = {"command": "connect", "coefficients": "fisher_rao",
             "params": {"r0": 1.0, "r1": 1.0, "theta1": math.pi}}
        assert run(tmp_path, d) == EXIT_SOLVER
        s = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert s["status"] == "failed"


class TestReport:
    def test_extended(self, tmp_path):
        d = {"command": "report", "coefficients": "extended"}
        assert run(tmp_path, d, "--svg") == EXIT_OK
        text = (tmp_path / "out" / "report.txt").read_text()
        line = next(l for l in text.splitlines() if l.startswith("w_minus:"))
        assert float(line.split()[1]) == pytest.approx(-(math.sqrt(2) + math.asinh(1)), abs=1e-6)
        assert "w_plus: inf" in text and "[curvature]" in text and "valid_samples:" in text
        assert (tmp_path / "out" / "curvature.svg").exists()

    def test_reciprocal(self, tmp_path):
        assert main(["report", "--preset", "reciprocal", "--out", str(tmp_path)]) == EXIT_OK
        assert "verdict: complete" in (tmp_path / "report.txt").read_text()

    def test_sphere_completion(self, tmp_path):
        assert main(["report", "--preset", "sphere_completion", "--out", str(tmp_path)]) == EXIT_OK
        assert "completion_hint: both" in (tmp_path / "report.txt").read_text()

    def test_curvature_csv(self, tmp_path):
        assert main(["report", "--preset", "fisher_rao", "--steps", "7", "--out", str(tmp_path)]) == EXIT_OK
        rows = read_csv(tmp_path / "curvature.csv")
        assert len(rows) == 7 and all(r["valid"] == "false" for r in rows)
        assert all(abs(float(r["sec_mixed"])) < 1e-8 for r in rows)


class TestProfile:
    def test_pseudosphere(self, tmp_path):
        d = {"command": "profile", "coefficients": {"profile": "pseudosphere"},
             "params": {"s_range": [0.0, 2.0], "n": 21}}
        assert run(tmp_path, d, "--svg") == EXIT_OK
        rows = read_csv(tmp_path / "out" / "profile.csv")
        assert list(rows[0]) == ["s", "c1", "c2", "valid"]
        assert float(rows[-1]["c2"]) == pytest.approx(math.exp(-2.0), rel=1e-14)
        assert (tmp_path / "out" / "profile.svg").exists()

    def test_fisher_rao_empty(self, tmp_path):
        assert main(["profile", "--preset", "fisher_rao", "--out", str(tmp_path)]) == EXIT_SOLVER
        rows = read_csv(tmp_path / "profile.csv")
        assert rows and all(r["valid"] == "false" for r in rows)


class TestExitCodes:
    def test_missing_source(self):
        assert main(["shoot"]) == EXIT_CONFIG

    def test_bad_config(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{")
        assert main(["shoot", "--config", str(p)]) == EXIT_CONFIG

    def test_missing_file(self, tmp_path):
        assert main(["shoot", "--config", str(tmp_path / "missing.json")]) == EXIT_IO

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["report", "--preset", "reciprocal", "--out", str(blocker / "sub")]) == EXIT_IO

    def test_wrong_command_for_config(self, tmp_path):
        p = write_config(tmp_path, {"command": "report", "coefficients": "reciprocal"})
        assert main(["shoot", "--config", str(p)]) == EXIT_CONFIG

    def test_tol_not_applicable(self):
        assert main(["shoot", "--preset", "reciprocal", "--tol", "1e-3"]) == EXIT_CONFIG
