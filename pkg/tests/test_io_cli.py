import json
import math
import subprocess
import sys

import numpy as np
import pytest

from blockentropy.cli import main
from blockentropy.constraints import Full, Hull, Singleton
from blockentropy.errors import SpecParseError, SpecValidationError
from blockentropy.fixtures import NAMES, fixture_path, load_fixture
from blockentropy.io import (
    decode_matrix,
    dumps,
    encode_matrix,
    parse_spec,
    spec_digest,
    spec_from_dict,
    spec_to_dict,
)

GIBBS2 = {"blocks": [2, 2], "marginal": {"type": "singleton", "q": [0.5, 0.5]},
          "conditionals": [{"type": "full"}, {"type": "full"}]}


def write_json(tmp_path, obj, name="spec.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return str(p)


class TestParse:
    def test_gibbs_example(self, tmp_path):
        c = parse_spec(write_json(tmp_path, GIBBS2))
        assert c.r == 2 and c.decomposition.block_dims == (2, 2)
        assert c.marginal.is_singleton
        assert all(isinstance(cs, Full) for cs in c.conditionals)

    def test_vertex_outside_simplex(self, tmp_path):
        bad = dict(GIBBS2, marginal={"type": "vertices", "vertices": [[0.6, 0.6]]})
        with pytest.raises(SpecValidationError) as exc:
            parse_spec(write_json(tmp_path, bad))
        assert exc.value.path == "marginal.vertices[0]"

    def test_non_hermitian_hull(self, tmp_path):
        bad = dict(GIBBS2, conditionals=[
            {"type": "full"},
            {"type": "hull", "matrices": [[[0.5, 0.3], [0.0, 0.5]]]},
        ])
        with pytest.raises(SpecValidationError) as exc:
            parse_spec(write_json(tmp_path, bad))
        assert exc.value.path == "conditionals[1].matrices[0]"

    @pytest.mark.parametrize("mutate, path", [
        (lambda d: d.pop("blocks"), "spec.blocks"),
        (lambda d: d.update(blocks=[2, 0]), "blocks"),
        (lambda d: d.update(conditionals=[{"type": "full"}]), "conditionals"),
        (lambda d: d.update(marginal={"type": "singleton", "q": [1.0]}), "marginal.q"),
        (lambda d: d.update(marginal={"type": "cube"}), "marginal.type"),
        (lambda d: d["conditionals"].__setitem__(0, {"type": "fixed", "matrix": [[1.0]]}),
         "conditionals[0].matrix"),
    ])
    def test_validation_paths(self, tmp_path, mutate, path):
        data = json.loads(json.dumps(GIBBS2))
        mutate(data)
        with pytest.raises(SpecValidationError) as exc:
            parse_spec(write_json(tmp_path, data))
        assert exc.value.path == path

    def test_malformed(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json", encoding="utf-8")
        with pytest.raises(SpecParseError):
            parse_spec(str(p))
        with pytest.raises(SpecParseError):
            parse_spec(str(tmp_path / "missing.json"))
        with pytest.raises(SpecParseError):
            parse_spec(write_json(tmp_path, [1, 2]))

    def test_complex_entries(self):
        m = decode_matrix([[[0.5, 0], [0, 0.5]], [[0, -0.5], [0.5, 0]]])
        np.testing.assert_array_equal(m, [[0.5, 0.5j], [-0.5j, 0.5]])
        np.testing.assert_array_equal(decode_matrix(encode_matrix(m)), m)

    @pytest.mark.parametrize("name", NAMES)
    def test_round_trip(self, name):
        c = load_fixture(name)
        back = spec_from_dict(json.loads(json.dumps(spec_to_dict(c))))
        assert back.decomposition == c.decomposition
        assert back.marginal == c.marginal
        for a, b in zip(back.conditionals, c.conditionals):
            assert a.kind == b.kind
            if isinstance(a, Singleton):
                np.testing.assert_array_equal(a.state, b.state)
            if isinstance(a, Hull):
                for x, y in zip(a.generators, b.generators):
                    np.testing.assert_array_equal(x, y)
        assert spec_digest(back) == spec_digest(c)

    def test_non_finite_serialisation(self):
        assert json.loads(dumps({"a": math.inf, "b": np.float64("nan")})) == {"a": "inf", "b": "nan"}


def run_cli(*args):
    return main([str(a) for a in args])


class TestCli:
    def test_minimize_gibbs_r3(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert run_cli("minimize", "--spec", fixture_path("gibbs_uniform_r3"), "--out", out) == 0
        rep = json.loads(out.read_text())
        assert rep["command"] == "minimize" and rep["tool"] == "blockentropy"
        assert abs(rep["payload"]["s_min"] - math.log(3)) <= 1e-12
        assert "s_min=" in capsys.readouterr().out

    def test_verify_deterministic(self, tmp_path):
        outs = []
        for k in range(2):
            out = tmp_path / f"v{k}.json"
            assert run_cli("verify", "--spec", fixture_path("mixed_hull"), "--seed", 42,
                           "--samples", 300, "--out", out) == 0
            outs.append(json.loads(out.read_text()))
        assert dumps(outs[0]["payload"]) == dumps(outs[1]["payload"])
        assert outs[0]["inputs"] == outs[1]["inputs"]

    def test_verify_csv(self, tmp_path):
        out = tmp_path / "v.csv"
        assert run_cli("verify", "--spec", fixture_path("classical_simplex2"), "--samples", 50,
                       "--format", "csv", "--out", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "key,value"
        assert any(line.startswith("violations,") for line in lines)

    def test_sharpness_csv(self, tmp_path):
        out = tmp_path / "s.json"
        assert run_cli("sharpness", "--spec", fixture_path("classical_segment"), "--q", "0.2,0.8",
                       "--v", "1,-1", "--eps", "1e-2,1e-3,1e-4", "--out", out) == 0
        rows = (tmp_path / "s.csv").read_text().splitlines()
        assert rows[0] == "distance,gap" and len(rows) == 4
        d, g = map(float, rows[-1].split(","))
        assert d == pytest.approx(2e-4) and g == pytest.approx(1e-4 * math.log(4), rel=1e-3)
        payload = json.loads(out.read_text())["payload"]
        assert payload["classical"]["fitted_exponent"] == pytest.approx(1.0, abs=0.05)

    def test_sharpness_quantum(self, tmp_path):
        out = tmp_path / "q.json"
        assert run_cli("sharpness", "--spec", fixture_path("quantum_simplex2"), "--q", "1,0",
                       "--v=-1,1", "--eps", "0.3,1e-2,1e-3", "--out", out) == 0
        payload = json.loads(out.read_text())["payload"]
        assert payload["quantum"]["gap_identity_error"] <= 1e-9
        assert payload["classical"]["derivative_divergent"] is True

    def test_gibbs(self, tmp_path):
        obs = write_json(tmp_path, {"matrix": np.diag([0.0, 0.0, 1.0, 1.0]).tolist()}, "h.json")
        out = tmp_path / "g.json"
        assert run_cli("gibbs", "--observable", obs, "--samples", 200, "--out", out) == 0
        rep = json.loads(out.read_text())
        assert rep["inputs"]["block_dims"] == [2, 2]
        assert rep["payload"]["explicit_violations"] == 0

    def test_selftest(self, capsys):
        assert run_cli("selftest") == 0
        assert "FAIL" not in capsys.readouterr().out


class TestExitCodes:
    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli("verify")
        assert exc.value.code == 1
        assert run_cli("verify", "--spec", fixture_path("classical_simplex2"), "--samples", 0) == 1
        assert run_cli("sharpness", "--spec", fixture_path("classical_segment"), "--q", "0.2,0.8",
                       "--v", "1,-1", "--eps", "1e-3,1e-2") == 1

    def test_parse_and_validation(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{", encoding="utf-8")
        assert run_cli("minimize", "--spec", p) == 2
        bad = dict(GIBBS2, marginal={"type": "vertices", "vertices": [[0.6, 0.6]]})
        assert run_cli("minimize", "--spec", write_json(tmp_path, bad)) == 2

    def test_numerical(self):
        assert run_cli("sharpness", "--spec", fixture_path("classical_segment"), "--q", "0.2,0.8",
                       "--v=-1,1", "--eps", "1e-2,1e-3") == 3

    def test_violation(self, tmp_path):
        spec = {"blocks": [4], "marginal": {"type": "singleton", "q": [1.0]},
                "conditionals": [{"type": "hull", "matrices": [
                    np.diag([0.5, 0.5, 0, 0]).tolist(), np.diag([0, 0, 0.49, 0.51]).tolist()]}]}
        assert run_cli("verify", "--spec", write_json(tmp_path, spec), "--samples", 400) == 4

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "blockentropy", "minimize", "--spec",
                              fixture_path("classical_simplex2")], capture_output=True, text=True)
        assert res.returncode == 0 and res.stdout.startswith("s_min=0")
