import argparse
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from finslerkit.cli import parse_radii, run


def call(*argv):
    buf = io.StringIO()
    status = run(list(argv), stdout=buf)
    return status, json.loads(buf.getvalue())


def test_list_metrics():
    status, doc = call("list-metrics")
    assert status == 0 and "funk" in doc["results"]["metrics"]
    assert set(doc) == {"tool_version", "config", "results", "verdict"}


def test_tensors_euclidean():
    status, doc = call("tensors", "--metric", "euclidean", "--dim", "3", "--point", "0,0,0", "--vector", "1,0,0")
    assert status == 0
    assert np.allclose(doc["results"]["g"], np.eye(3))
    assert np.allclose(doc["results"]["C"], 0.0)


def test_tensors_csv(tmp_path):
    status, _ = call("tensors", "--metric", "euclidean", "--dim", "2", "--point", "0,0", "--vector", "1,0",
                     "--out", str(tmp_path), "--format", "json,csv")
    assert status == 0
    lines = (tmp_path / "tensors_tensors.csv").read_text().splitlines()
    assert lines[0] == "tensor,index,value"
    assert "g,0 0,1.0" in lines
    assert json.loads((tmp_path / "tensors.json").read_text())["verdict"] == "pass"


def test_eigen_bound():
    status, doc = call("eigen-bound", "--theorem", "7.4", "--n", "2", "--a", "1", "--lambda", "1", "--snorm", "0")
    assert status == 0 and doc["results"]["bound"] == 0.25
    status, doc = call("eigen-bound", "--theorem", "7.4", "--n", "2", "--a", "1", "--snorm", "2")
    assert status == 2 and doc["results"]["error"]["type"] == "HypothesisError"


def test_verify_funk_laplacian(tmp_path):
    status, doc = call("verify", "--theorem", "5.3", "--metric", "funk", "--dim", "2",
                       "--radii", "0.1:1.5:x1.1", "--samples", "60", "--out", str(tmp_path))
    assert status == 0 and doc["verdict"] == "pass"
    assert doc["results"]["theorem"] == "5.3"
    assert (tmp_path / "funk_thm5.3.json").exists()


def test_verify_hypothesis_failure():
    status, doc = call("verify", "--theorem", "5.2", "--metric", "euclidean", "--dim", "2", "--samples", "10")
    assert status == 2 and doc["verdict"] == "error"


def test_validate():
    status, doc = call("validate", "--metric", "randers", "--b", "1.2,0")
    assert status == 1 and doc["results"]["error"]["type"] == "StrongConvexityError"
    status, doc = call("validate", "--metric", "sphere", "--dim", "2", "--radii", "1,2,3.5")
    assert status == 0 and doc["results"]["warnings"]


def test_usage_errors(tmp_path):
    assert call("tensors", "--metric", "euclidean", "--dim", "2", "--point", "0,0")[0] == 1
    assert call("tensors", "--metric", "nonesuch", "--dim", "2", "--point", "0,0", "--vector", "1,0")[0] == 1
    assert call("tensors", "--metric", "funk", "--dim", "2", "--point", "2,0", "--vector", "1,0")[0] == 1
    assert run(["no-such-command"], stdout=io.StringIO()) == 1
    status, doc = call("tensors", "--config", str(tmp_path / "missing.yaml"), "--out", str(tmp_path))
    assert status == 1 and (tmp_path / "tensors.json").exists()


def test_radius_grids():
    assert parse_radii("0.1:0.4:+0.1") == pytest.approx([0.1, 0.2, 0.3, 0.4])
    geo = parse_radii("0.1:1.5:x1.1")
    assert geo[0] == 0.1 and geo[-1] == 1.5
    assert parse_radii("0.5,1") == [0.5, 1.0]
    for bad in ("0.1:1", "0.1:1:*2", "1:0.1:+0.1", "0.1:1:x0.9"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_radii(bad)


def test_config_file(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("metric:\n  kind: randers\n  dim: 2\n  parameters:\n    b: [0.3, 0]\npoint: 0.1,0.2\nvector: [1, 0]\n")
    status, doc = call("tensors", "--config", str(cfg))
    assert status == 0
    g = np.array(doc["results"]["g"])
    assert g.shape == (2, 2) and not np.allclose(g, np.eye(2))
    assert doc["config"]["point"] == [0.1, 0.2]
    status, doc = call("tensors", "--config", str(cfg), "--point", "0,0")
    assert doc["config"]["point"] == [0.0, 0.0]
    bad = tmp_path / "bad.yaml"
    bad.write_text("metric: euclidean\nbogus: 1\n")
    assert call("tensors", "--config", str(bad))[0] == 1


def test_deterministic_output(tmp_path):
    argv = ["verify", "--theorem", "4.1", "--metric", "randers", "--b", "0.2,0", "--base", "hyperbolic-disk",
            "--side", "lower", "--samples", "20", "--seed", "3"]
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        call(*argv, "--out", str(d), "--format", "json,csv")
        outs.append([(d / f).read_bytes() for f in ("randers_thm4.1.json", "randers_thm4.1.csv")])
    assert outs[0] == outs[1]


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "finslerkit.cli", "eigen-bound", "--theorem", "7.4",
                          "--n", "3", "--a", "1"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["results"]["bound"] == 1.0
