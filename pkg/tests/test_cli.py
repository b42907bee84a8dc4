import json

import numpy as np
import pytest
from click.testing import CliRunner

from skeltop.cli import main
from skeltop.phantom import PhantomSpec, generate
from skeltop import volio


@pytest.fixture
def runner():
    return CliRunner()


def _write_phantom(tmp_path, name="vol.bin", **kw):
    spec = PhantomSpec(**kw)
    vol, _ = generate(spec)
    path = tmp_path / name
    volio.write_volume(vol, path)
    return path, vol


class TestPhantomCommand:
    def test_torus(self, runner, tmp_path):
        out = tmp_path / "torus.bin"
        result = runner.invoke(main, ["phantom", "kind=torus", "radius=2",
                                      "dims=32,32,12", "--out", str(out)])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["expected"] == {"b0": 1, "b1": 1, "b2": 0, "chi": 0}
        assert out.exists()

    def test_multi_tube(self, runner, tmp_path):
        out = tmp_path / "mt.bin"
        result = runner.invoke(main, ["phantom", "kind=multi_tube", "n=3",
                                      "radius=1", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["expected"]["b0"] == 3

    def test_invalid_kind_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["phantom", "kind=banana",
                                      "--out", str(tmp_path / "x.bin")])
        assert result.exit_code == 2

    def test_unconstructible_exits_1(self, runner, tmp_path):
        result = runner.invoke(main, ["phantom", "kind=torus", "radius=4",
                                      "dims=10,10,10",
                                      "--out", str(tmp_path / "x.bin")])
        assert result.exit_code == 1
        assert "error:" in result.output


class TestSkeletonizeCommand:
    def test_euler_on_torus(self, runner, tmp_path):
        in_path, vol = _write_phantom(tmp_path, kind="torus",
                                      dims=(32, 32, 12), radius=2)
        out_path = tmp_path / "skel.bin"
        result = runner.invoke(main, ["skeletonize", "--method", "euler",
                                      "--in", str(in_path),
                                      "--out", str(out_path)])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["input_betti"] == body["output_betti"]
        assert body["input_betti"]["b1"] == 1
        skel = volio.load_any(out_path, binary=True)
        assert not np.any(skel.data & ~vol.data)

    def test_soft_reports_errors(self, runner, tmp_path):
        in_path, _ = _write_phantom(tmp_path, kind="random_vessel_tree",
                                    dims=(48, 48, 32), radius=3, seed=2,
                                    n_branches=6)
        result = runner.invoke(main, ["skeletonize", "--method", "soft",
                                      "--iterations", "10",
                                      "--in", str(in_path),
                                      "--out", str(tmp_path / "s.bin")])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["output_betti"] != body["input_betti"]

    def test_missing_in_flag_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["skeletonize",
                                      "--out", str(tmp_path / "x.bin")])
        assert result.exit_code == 2

    def test_missing_file_exits_1(self, runner, tmp_path):
        result = runner.invoke(main, ["skeletonize",
                                      "--in", str(tmp_path / "nope.bin"),
                                      "--out", str(tmp_path / "x.bin")])
        assert result.exit_code == 1


class TestMetricsCommand:
    def test_perfect_json(self, runner, tmp_path):
        p, _ = _write_phantom(tmp_path, kind="straight_tube",
                              dims=(32, 16, 16), radius=2)
        result = runner.invoke(main, ["metrics", "--pred", str(p),
                                      "--gt", str(p), "--format", "json"])
        assert result.exit_code == 0, result.output
        body = json.loads(result.output)
        assert body["dice"] == 1.0 and body["cl_dice"] == 1.0

    def test_csv_format(self, runner, tmp_path):
        p, _ = _write_phantom(tmp_path, kind="straight_tube",
                              dims=(32, 16, 16), radius=2)
        result = runner.invoke(main, ["metrics", "--pred", str(p),
                                      "--gt", str(p), "--format", "csv"])
        assert result.exit_code == 0, result.output
        header, row = result.output.strip().splitlines()
        assert header.startswith("dice,cl_dice")
        assert row.startswith("1.0,1.0")

    def test_dimension_mismatch_exits_1(self, runner, tmp_path):
        a, _ = _write_phantom(tmp_path, "a.bin", kind="straight_tube",
                              dims=(32, 16, 16), radius=2)
        b, _ = _write_phantom(tmp_path, "b.bin", kind="straight_tube",
                              dims=(48, 16, 16), radius=2)
        result = runner.invoke(main, ["metrics", "--pred", str(a),
                                      "--gt", str(b)])
        assert result.exit_code == 1


class TestBenchCommand:
    def test_single_method_small(self, runner, tmp_path):
        csv_path = tmp_path / "bench.csv"
        result = runner.invoke(main, ["bench", "--methods", "euler",
                                      "--dims", "48,48,32", "--repeats", "1",
                                      "--radius", "2", "--branches", "4",
                                      "--csv", str(csv_path)])
        assert result.exit_code == 0, result.output
        assert "euler" in result.output
        assert "not reproduced" in result.output
        assert csv_path.read_text().startswith("method,repeat,runtime_ms")

    def test_unknown_method_exits_2(self, runner):
        result = runner.invoke(main, ["bench", "--methods", "warp"])
        assert result.exit_code == 2

    def test_bad_dims_exits_2(self, runner):
        result = runner.invoke(main, ["bench", "--dims", "48,48"])
        assert result.exit_code == 2


def test_version_flag(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
