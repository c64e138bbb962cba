import json
import math

import numpy as np
import pytest

from circula.circular import WrappedCauchy, resultant_length
from circula.cli import main, rose_table
from circula.io import (
    LoadError,
    load_csv,
    load_model,
    model_from_dict,
    model_from_summary,
    model_to_dict,
    save_model,
    write_csv,
)
from circula.vine import CircularSeries, ModelSpec, simulate
from conftest import random_model

TWO_PI = 2 * math.pi


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadCsv:
    def test_excerpt(self, excerpt_path):
        s = load_csv(excerpt_path)
        assert (s.T, s.m) == (12, 3)
        np.testing.assert_allclose(s.data[0], [6.2169, 2.4155, 2.6791])
        assert s.names == ("pine_grove", "hood_river", "brookings")
        assert s.times[0] == "2015-02-06T00:00"

    def test_no_time_column_and_wrapping(self, tmp_path):
        s = load_csv(write(tmp_path, "a.csv", "a,b\n7.0,-1.0\n0.5,0.25\n"))
        assert s.data[0, 0] == pytest.approx(7.0 - TWO_PI)
        assert s.data[0, 0] == pytest.approx(0.7168, abs=1e-4)
        assert s.data[0, 1] == pytest.approx(TWO_PI - 1.0)
        assert s.times is None

    def test_bad_cell(self, tmp_path):
        with pytest.raises(LoadError, match=r"row 3, column 'b'.*'abc'"):
            load_csv(write(tmp_path, "a.csv", "a,b\n1,2\n3,abc\n"))

    def test_ragged(self, tmp_path):
        with pytest.raises(LoadError, match="row 2 has 1 fields"):
            load_csv(write(tmp_path, "a.csv", "a,b\n1\n"))

    @pytest.mark.parametrize("text", ["", "a,b\n", "time\n1\n"])
    def test_empty(self, tmp_path, text):
        with pytest.raises(LoadError):
            load_csv(write(tmp_path, "a.csv", text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(LoadError, match="cannot read"):
            load_csv(tmp_path / "nope.csv")

    def test_not_finite(self, tmp_path):
        with pytest.raises(LoadError, match="not finite"):
            load_csv(write(tmp_path, "a.csv", "a\nnan\n"))

    def test_write_round_trip(self, tmp_path, rng):
        s = simulate(random_model(3, 1, rng), 200, seed=1, names=("x", "y", "z"))
        write_csv(s, tmp_path / "s.csv")
        back = load_csv(tmp_path / "s.csv")
        d = np.abs(np.angle(np.exp(1j * (back.data - s.data))))
        assert d.max() < 1e-6
        assert back.names == ("x", "y", "z")


class TestModelFile:
    def test_round_trip(self, tmp_path, rng):
        model = random_model(3, 2, rng)
        save_model(model, tmp_path / "m.json")
        assert load_model(tmp_path / "m.json") == model

    def test_counts_enforced(self, rng):
        d = model_to_dict(random_model(2, 1, rng))
        d["serial"].pop()
        with pytest.raises(LoadError, match="model.serial: expected 4 entries"):
            model_from_dict(d)

    @pytest.mark.parametrize("path,value,match", [
        (("serial", 1, "rho"), 1.5, r"model.serial\[1\].rho"),
        (("cross", 0, "q"), 0, r"model.cross\[0\].q"),
        (("marginals", 1, "rho"), -0.2, r"model.marginals\[1\]"),
        (("cross", 0, "l1"), "two", r"model.cross\[0\].l1"),
    ])
    def test_field_errors(self, rng, path, value, match):
        d = model_to_dict(random_model(2, 1, rng))
        d[path[0]][path[1]][path[2]] = value
        with pytest.raises(LoadError, match=match):
            model_from_dict(d)

    def test_bad_index(self, rng):
        d = model_to_dict(random_model(2, 1, rng))
        d["cross"][0]["l1"], d["cross"][0]["l2"] = 1, 2
        with pytest.raises(LoadError):
            model_from_dict(d)

    def test_invalid_json(self, tmp_path):
        with pytest.raises(LoadError, match="invalid JSON"):
            load_model(write(tmp_path, "m.json", "{"))


def _independence_model_file(tmp_path, m=3, p=2):
    save_model(ModelSpec(m, p), tmp_path / "ind.json")
    return tmp_path / "ind.json"


class TestCli:
    def test_simulate_independence(self, tmp_path):
        mf = _independence_model_file(tmp_path)
        out = tmp_path / "sim.csv"
        assert main(["simulate", "--model", str(mf), "--T", "1000", "--seed", "4", "--out", str(out)]) == 0
        s = load_csv(out)
        assert (s.T, s.m) == (1000, 3)
        for j in range(3):
            assert resultant_length(s.data[:, j]) < 0.06

    def test_simulate_single_row_stdout(self, tmp_path, capsys):
        mf = _independence_model_file(tmp_path)
        assert main(["simulate", "--model", str(mf), "--T", "1", "--seed", "1"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "series1,series2,series3"
        assert len(lines) == 2

    def test_simulate_deterministic(self, tmp_path):
        mf = tmp_path / "m.json"
        save_model(random_model(2, 1, np.random.default_rng(0)), mf)
        for name in ("a.csv", "b.csv"):
            main(["simulate", "--model", str(mf), "--T", "50", "--seed", "9", "--out", str(tmp_path / name)])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_simulate_schema_error(self, tmp_path, capsys):
        bad = write(tmp_path, "bad.json", json.dumps({"m": 1, "p": 0, "marginals": [{"mu": 0}],
                                                     "cross": [], "serial": []}))
        assert main(["simulate", "--model", str(bad), "--T", "5"]) == 1
        assert "model.marginals[0].rho: missing" in capsys.readouterr().err

    def test_loglik_independence(self, tmp_path, excerpt_path, capsys):
        mf = _independence_model_file(tmp_path)
        assert main(["loglik", "--model", str(mf), "--data", str(excerpt_path)]) == 0
        first = capsys.readouterr().out.strip()
        assert float(first) == pytest.approx(-36 * math.log(TWO_PI), rel=1e-9)
        main(["loglik", "--model", str(mf), "--data", str(excerpt_path)])
        assert capsys.readouterr().out.strip() == first

    def test_loglik_mismatch(self, tmp_path, excerpt_path, capsys):
        mf = _independence_model_file(tmp_path, m=2)
        assert main(["loglik", "--model", str(mf), "--data", str(excerpt_path)]) == 1
        assert "dimension mismatch" in capsys.readouterr().err

    def test_loglik_separates_shuffled(self, tmp_path, capsys):
        model = ModelSpec(2, 1, [WrappedCauchy(1, 0.3), WrappedCauchy(2, 0.3)],
                          cross={(2, 1): 0.7}, serial={(1, 1, 1): 0.8, (2, 2, 1): 0.8})
        mf = tmp_path / "m.json"
        save_model(model, mf)
        s = simulate(model, 200, seed=3)
        write_csv(s, tmp_path / "d.csv")
        main(["loglik", "--model", str(mf), "--data", str(tmp_path / "d.csv")])
        original = float(capsys.readouterr().out)
        rng = np.random.default_rng(0)
        shuffled = []
        for _ in range(5):
            data = s.data.copy()
            for j in range(2):
                data[:, j] = rng.permutation(data[:, j])
            write_csv(CircularSeries(data), tmp_path / "sh.csv")
            main(["loglik", "--model", str(mf), "--data", str(tmp_path / "sh.csv")])
            shuffled.append(float(capsys.readouterr().out))
        assert np.mean(shuffled) < original

    def test_rose(self, tmp_path, capsys):
        data = write(tmp_path, "r.csv", "a\n0.1\n1.0\n3.2\n6.0\n")
        assert main(["rose", "--data", str(data), "--column", "a", "--bins", "4"]) == 0
        rows = capsys.readouterr().out.strip().splitlines()
        assert rows[0] == "bin_start_rad,bin_end_rad,count,relative_frequency"
        assert [int(r.split(",")[2]) for r in rows[1:]] == [2, 0, 1, 1]

    def test_rose_density_and_errors(self, tmp_path, excerpt_path, capsys):
        mf = _independence_model_file(tmp_path)
        assert main(["rose", "--data", str(excerpt_path), "--column", "2", "--bins", "8",
                     "--model", str(mf)]) == 0
        rows = [r.split(",") for r in capsys.readouterr().out.strip().splitlines()[1:]]
        assert sum(int(r[2]) for r in rows) == 12
        assert all(float(r[4]) == pytest.approx(1 / TWO_PI, abs=1e-6) for r in rows)
        assert main(["rose", "--data", str(excerpt_path), "--column", "nowhere"]) == 1
        err = capsys.readouterr().err
        assert "available: pine_grove, hood_river, brookings" in err
        assert main(["rose", "--data", str(excerpt_path), "--column", "1", "--bins", "1"]) == 1

    def test_rose_partition(self, rng):
        x = rng.uniform(0, TWO_PI, 997)
        rows = rose_table(x, 13)
        assert sum(r[2] for r in rows) == 997
        assert sum(r[3] for r in rows) == pytest.approx(1.0)

    def test_fit_p0(self, tmp_path, capsys):
        model = ModelSpec(2, 0, [WrappedCauchy(1, 0.5), WrappedCauchy(3, 0.4)], cross={(2, 1): 0.6})
        write_csv(simulate(model, 150, seed=2), tmp_path / "d.csv")
        out = tmp_path / "s.json"
        args = ["fit", "--data", str(tmp_path / "d.csv"), "--p", "0", "--iters", "400",
                "--warmup", "100", "--seed", "5", "--out", str(out)]
        assert main(args) == 0
        table = capsys.readouterr().out
        d = json.loads(out.read_text())
        assert [e["name"] for e in d["parameters"]] == ["mu_1", "mu_2", "rho_1", "rho_2", "rho_12,0"]
        assert "rho_12,0" in table
        assert d["metadata"]["chains"] == 3 and d["metadata"]["seed"] == 5
        first = out.read_bytes()
        main(args)
        assert out.read_bytes() == first

        # summary names round-trip into a model file
        mf = tmp_path / "point.json"
        assert main(["summary", str(out), "--model-out", str(mf)]) == 0
        point = load_model(mf)
        assert point.cross(2, 1).binding_rho == pytest.approx(d["parameters"][4]["mean"])
        assert model_from_summary(d) == point

    def test_fit_missing_data(self, tmp_path, capsys):
        assert main(["fit", "--data", str(tmp_path / "none.csv")]) == 1
        assert "cannot read" in capsys.readouterr().err
