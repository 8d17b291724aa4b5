import json
import math

import numpy as np
import pytest

from ellbilliards.billiard import BilliardConfig, build_billiard, grid_points
from ellbilliards.cli import RunConfig, main
from ellbilliards.confocal import ConfocalFamily
from ellbilliards.exceptions import ConfigError
from ellbilliards.serialize import SWEEP_COLUMNS, parse_point

FIXTURE = {"a_c": 2.0, "b_c": 1.0, "N": 4, "tau": 1, "u0": 0.0}


@pytest.fixture
def write_config(tmp_path):
    def write(data, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


def run(cmd, config, out, *extra):
    return main([cmd, "--config", config, "--out", str(out), *extra])


class TestConfig:
    def test_missing_field(self, write_config, tmp_path, capsys):
        cfg = write_config({"a_c": 2.0, "N": 4, "tau": 1})
        assert run("build", cfg, tmp_path / "o") == 2
        assert "b_c" in capsys.readouterr().err

    def test_missing_tau(self, write_config, tmp_path, capsys):
        assert run("build", write_config({"a_c": 2.0, "b_c": 1.0, "N": 4}), tmp_path / "o") == 2
        assert "tau" in capsys.readouterr().err

    def test_unknown_field(self, write_config, tmp_path, capsys):
        assert run("build", write_config({**FIXTURE, "colour": "red"}), tmp_path / "o") == 2
        assert "colour" in capsys.readouterr().err

    @pytest.mark.parametrize("bad", [{"N": 6, "tau": 2}, {"b_c": 3.0}, {"N": 4, "tau": 2}, {"a_c": "two"}])
    def test_invalid_parameters(self, write_config, tmp_path, bad):
        assert run("build", write_config({**FIXTURE, **bad}), tmp_path / "o") == 2

    def test_unreadable(self, tmp_path):
        assert run("build", str(tmp_path / "nope.json"), tmp_path / "o") == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run("build", str(bad), tmp_path / "o") == 2

    def test_bad_flags(self, write_config, tmp_path):
        cfg = write_config(FIXTURE)
        assert run("verify", cfg, tmp_path / "o", "--tolerance", "k116") == 2
        assert run("verify", cfg, tmp_path / "o", "--tolerance", "nope=1e-3") == 2
        assert main(["frobnicate"]) == 2

    def test_u0_sweep_object(self):
        cfg = RunConfig.from_dict({**FIXTURE, "u0": {"start": 0.5, "count": 7}})
        assert (cfg.u0, cfg.samples) == (0.5, 7)
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**FIXTURE, "u0": {"begin": 0.5}})

    def test_explicit_delta(self):
        fam = ConfocalFamily(2.0, 1.0)
        cfg = RunConfig.from_dict({"a_c": 2.0, "b_c": 1.0, "delta_u": fam.K / 2}).billiard_config()
        assert not cfg.is_periodic
        with pytest.raises(ConfigError):
            RunConfig.from_dict({**FIXTURE, "delta_u": 0.3}).billiard_config()


class TestBuild:
    def test_fixture(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("build", write_config(FIXTURE), out) == 0
        data = json.loads((out / "billiard.json").read_text())
        pts = np.array([v["point"] for v in data["vertices"]])
        expected = [(0, math.sqrt(3)), (-math.sqrt(6), 0), (0, -math.sqrt(3)), (math.sqrt(6), 0)]
        assert np.max(np.abs(pts - expected)) < 1e-12
        assert data["k_e"] == pytest.approx(2.0, abs=1e-12)
        assert data["vertices"][0]["v"] == pytest.approx(2 * math.sqrt(6), abs=1e-10)
        assert data["turning_number"] == 1

    def test_star(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("build", write_config({**FIXTURE, "N": 5, "tau": 2}), out) == 0
        assert json.loads((out / "billiard.json").read_text())["turning_number"] == 2

    def test_all_outputs(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("build", write_config({**FIXTURE, "outputs": ["csv", "json", "svg"]}), out) == 0
        assert (out / "billiard.csv").read_text().startswith("index,u,t,x,y\n")
        assert (out / "billiard.svg").read_text().startswith("<svg")

    def test_open_stretch(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("build", write_config({"a_c": 2.0, "b_c": 1.0, "delta_u": 0.4, "count": 6}), out) == 0
        assert len(json.loads((out / "billiard.json").read_text())["vertices"]) == 6
        assert run("build", write_config({"a_c": 2.0, "b_c": 1.0, "delta_u": 0.4}), out) == 2


class TestVerify:
    def test_fixture_passes(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("verify", write_config(FIXTURE), out) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["passed"]
        names = {c["name"] for c in report["checks"]}
        assert {"k116_prod_l_eq_prod_r", "reflection_vs_canonical", "porism_random_starts"} <= names

    def test_perturbed_vertex(self, write_config, tmp_path):
        out = tmp_path / "o"
        # off the symmetry axis: moving P_2 along x keeps l_2 = r_2
        cfg = write_config({**FIXTURE, "perturb_vertex": {"index": 2, "offset": [1e-3, 1e-3]}})
        assert run("verify", cfg, out) == 1
        checks = {c["name"]: c for c in json.loads((out / "report.json").read_text())["checks"]}
        assert checks["k116_prod_l_eq_prod_r"]["status"] == "fail"

    def test_odd_not_applicable(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("verify", write_config({**FIXTURE, "N": 7, "tau": 2}), out) == 0
        checks = {c["name"]: c for c in json.loads((out / "report.json").read_text())["checks"]}
        for name in ("k117_prod_r_eq_ke_pow_half_N", "alternating_sine_sum_full", "central_symmetry_theta"):
            assert checks[name]["status"] == "not-applicable"

    def test_tolerance_override(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("verify", write_config({**FIXTURE, "N": 6}), out, "--tolerance", "k116=1e-30") in (0, 1)
        checks = {c["name"]: c for c in json.loads((out / "report.json").read_text())["checks"]}
        assert checks["k116_prod_l_eq_prod_r"]["tolerance"] == 1e-30

    def test_with_sweep(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("verify", write_config({**FIXTURE, "N": 5}), out, "--samples", "5") == 0
        names = [c["name"] for c in json.loads((out / "report.json").read_text())["checks"]]
        assert "sweep:constant_perimeter" in names


class TestGrid:
    def test_nonagon_svg(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("grid", write_config({**FIXTURE, "N": 9}), out) == 0
        svg = (out / "grid.svg").read_text()
        assert svg.count('class="grid-ellipse"') == 3
        assert 'class="ray"' not in svg

    def test_square_infinity(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("grid", write_config(FIXTURE), out) == 0
        data = json.loads((out / "grid.json").read_text())
        assert data["grid_ellipses"] == [{"j": 1, "at_infinity": True}]
        assert all(p["at_infinity"] for p in data["grid_points"])
        assert 'class="ray"' in (out / "grid.svg").read_text()

    def test_roundtrip_bit_exact(self, write_config, tmp_path):
        out = tmp_path / "o"
        cfg = {**FIXTURE, "N": 9, "u0": 0.3}
        assert run("grid", write_config(cfg), out) == 0
        data = json.loads((out / "grid.json").read_text())
        fam = ConfocalFamily(2.0, 1.0)
        grid = grid_points(build_billiard(BilliardConfig.periodic(fam, 9, 1, 0.3)))
        for entry in data["grid_points"]:
            lib = grid.grid_points[(entry["i"] - 1, entry["j"])]
            assert parse_point(entry) == (float(lib[0]), float(lib[1]))


class TestSweep:
    def test_csv(self, write_config, tmp_path):
        out = tmp_path / "o"
        assert run("sweep", write_config({**FIXTURE, "N": 5}), out, "--samples", "12") == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == ",".join(SWEEP_COLUMNS)
        assert len(lines) == 13
        perim = [float(line.split(",")[1]) for line in lines[1:]]
        assert np.ptp(perim) / perim[0] < 1e-9


class TestDeterminism:
    @pytest.mark.parametrize("cmd, files", [
        ("build", ["billiard.json", "billiard.csv", "billiard.svg"]),
        ("verify", ["report.json"]),
        ("grid", ["grid.json", "grid.svg"]),
        ("sweep", ["sweep.csv"]),
    ])
    def test_byte_identical(self, write_config, tmp_path, cmd, files):
        cfg = write_config({**FIXTURE, "N": 8, "tau": 3, "u0": 0.2, "outputs": ["csv", "json", "svg"]})
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(cmd, cfg, a, "--seed", "7", "--samples", "6") == 0
        assert run(cmd, cfg, b, "--seed", "7", "--samples", "6") == 0
        for name in files:
            assert (a / name).read_bytes() == (b / name).read_bytes()
