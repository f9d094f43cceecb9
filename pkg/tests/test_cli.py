import json
import math

import pytest

from lempertkit.cli import EXIT_INPUT, EXIT_OK, EXIT_UNCERTIFIED, EXIT_VERIFY, main, run

DIAGONAL = '{"a": [[0.5, 0.0], [0.5, 0.0]], "alpha": [[0.0, 0.0], [0.0, 0.0]], "r": [1, 1], ' \
           '"alpha0": [0.0, 0.0], "q": [1.0, 1.0]}'


def _json(argv):
    code, text, _ = run(argv)
    return code, json.loads(text)


class TestDist:
    def test_axis_pair(self):
        code, out = _json(["dist", "--domain", "diamond", "--w", "0.5,0,0,0", "--z", "0,0,0.3,0"])
        assert code == EXIT_OK
        assert abs(out["value"] - 0.858770) < 1e-4
        assert abs(out["value"] - math.atanh(0.8 / 1.15)) < 1e-12
        assert out["schema_version"] == "1"

    def test_same_point(self):
        code, out = _json(["dist", "--w", "0.1,0,0.2,0", "--z", "0.1,0,0.2,0"])
        assert code == EXIT_OK and out["value"] == 0.0 and out["width"] == 0.0

    def test_sandwich_and_determinism(self):
        argv = ["dist", "--w", "0.2,0,0,0.1", "--z=-0.3,0,0.25,0", "--seed", "3"]
        a, b = run(argv), run(argv)
        assert a == b
        out = json.loads(a[1])
        assert a[0] == EXIT_OK and out["certified"] and out["width"] < 2e-4

    def test_uncertified(self):
        code, out = _json(["dist", "--w", "0.2,0,0,0.1", "--z=-0.3,0,0.25,0", "--width", "1e-300"])
        assert code == EXIT_UNCERTIFIED and not out["certified"]

    def test_outside(self, capsys):
        assert main(["dist", "--w", "0.9,0,0.3,0", "--z", "0,0,0,0"]) == EXIT_INPUT
        assert "not inside" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [
        ["dist", "--w", "0.1,0", "--z", "0,0,0,0"],
        ["dist", "--domain", "polydisc", "--w", "0,0,0,0", "--z", "0,0,0,0"],
        ["dist", "--w", "0,0,0,0"],
        ["bogus"],
        ["dist", "--w", "0,0,0,0", "--z", "0,0,0,0", "--width", "-1"],
    ])
    def test_bad_input(self, argv):
        assert main(argv) == EXIT_INPUT


class TestMetric:
    def test_diamond_origin(self):
        code, out = _json(["metric", "--z", "0,0,0,0", "--X", "1,0,1,0"])
        assert code == EXIT_OK and out["value"] == pytest.approx(2.0) and out["achiever"] == "MDiamond"

    def test_ball(self):
        code, out = _json(["metric", "--domain", "ball", "--z", "0,0,0,0", "--X", "3,0,4,0"])
        assert code == EXIT_OK and out["value"] == pytest.approx(5.0)

    def test_generic_diamond_has_certificate(self):
        code, out = _json(["metric", "--z", "0.2,0,0.2,0", "--X=1,0,-1,0"])
        assert code == EXIT_OK
        c = out["certificate"]
        assert c["upper"] - c["lower"] < 2e-4
        assert c["lower"] - 1e-4 <= out["value"] <= c["upper"] + 1e-4


class TestGeodesic:
    def test_evaluate_and_validate(self):
        code, out = _json(["geodesic", DIAGONAL, "--lambda", "0.4,0", "--validate"])
        assert code == EXIT_OK
        assert out["values"][0]["f"] == [[0.2, 0.0], [0.2, 0.0]]
        assert out["validation"]["valid"] and out["validation"]["left_inverse_residual"] < 1e-8

    def test_invalid_relation(self):
        bad = DIAGONAL.replace('"a": [[0.5, 0.0], [0.5, 0.0]]', '"a": [[0.6, 0.0], [0.5, 0.0]]')
        code, out = _json(["geodesic", bad, "--validate"])
        assert code == EXIT_VERIFY and not out["validation"]["valid"]

    def test_bad_json(self):
        assert main(["geodesic", "{not json"]) == EXIT_INPUT
        assert main(["geodesic", DIAGONAL, "--lambda", "1,0"]) == EXIT_INPUT


class TestIndicatrix:
    def test_csv(self, tmp_path):
        path = tmp_path / "ind.csv"
        assert main(["indicatrix", "--domain", "ball", "--n", "8", "--out", str(path)]) == EXIT_OK
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# schema_version=1")
        assert lines[1] == "x1_re,x1_im,x2_re,x2_im,radius,flag"
        assert len(lines) == 10

    def test_classify_needs_directions(self):
        assert main(["indicatrix", "--n", "8", "--classify"]) == EXIT_INPUT


class TestVerify:
    def test_quick_geodesics(self):
        code, out = _json(["verify", "geodesics", "--quick"])
        assert code == EXIT_OK and out["failing"] == []
        assert all(c["passed"] for c in out["checks"])

    def test_unknown_suite(self):
        assert main(["verify", "everything"]) == EXIT_INPUT


def test_threads_variable(monkeypatch):
    monkeypatch.setenv("LEMPERTKIT_THREADS", "zero")
    assert main(["metric", "--z", "0,0,0,0", "--X", "1,0,0,0"]) == EXIT_INPUT
    monkeypatch.setenv("LEMPERTKIT_THREADS", "1")
    assert main(["metric", "--z", "0,0,0,0", "--X", "1,0,0,0"]) == EXIT_OK
