import json
from pathlib import Path

import pytest

from twistmoments.cli import main


def run(args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    code = run(["--curve", "11A_i", "--xmax", "5000", "--out", d / "o", "theta-build"])
    assert code == 0
    return d / "o"


class TestExitCodes:
    def test_usage_error(self, tmp_path):
        assert run(["--no-such-flag", "ingest"]) == 1

    def test_missing_curve_flag(self, tmp_path):
        assert run(["--out", tmp_path, "sweep"]) == 1

    def test_data_error_missing_cache(self, tmp_path):
        assert run(["--curve", "11A_i", "--xmax", "100", "--out", tmp_path, "sweep"]) == 2

    def test_data_error_unknown_curve(self, tmp_path):
        assert run(["--curve", "nope", "--out", tmp_path, "theta-build"]) == 2

    def test_convergence_error(self, tmp_path):
        code = run(["--out", tmp_path, "rmt-density", "--n-dim", "5",
                    "--tmin", "1e-12", "--tmax", "1.0"])
        assert code == 3

    def test_help_ok(self):
        assert run(["--help"]) == 0


class TestOutputs:
    def test_ingest(self, tmp_path):
        assert run(["--out", tmp_path, "ingest"]) == 0
        lines = (tmp_path / "ingest.csv").read_text().splitlines()
        assert lines[0] == "name,sign,conductor,modulus,kappa,n_forms,n_classes"
        assert len(lines) == 27
        assert lines[1].startswith("11A_i,imaginary,11,11,2.91763323388,2,5")

    def test_sweep_and_moments(self, workdir):
        assert run(["--curve", "11A_i", "--xmax", "5000", "--out", workdir, "sweep"]) == 0
        sweep = (workdir / "11A_i_sweep.csv").read_text().splitlines()
        assert sweep[0] == "d,abs_d,c,lvalue,unit_disc"
        assert sweep[1].startswith("-3,3,")
        assert run(["--curve", "11A_i", "--xmax", "5000", "--out", workdir,
                    "moments", "--kmax", "2"]) == 0
        moments = (workdir / "11A_i_moments.csv").read_text().splitlines()
        assert moments[0] == "k,samples,raw_sum,mean"

    def test_histogram_clt_dist_vanish_rq(self, workdir):
        base = ["--curve", "11A_i", "--xmax", "5000", "--pmax", "1000", "--out", workdir]
        assert run(base + ["histogram", "--bins", "40"]) == 0
        assert run(base + ["clt"]) == 0
        assert run(base + ["dist"]) == 0
        assert run(base + ["vanish"]) == 0
        assert run(base + ["rq", "--qmax", "10"]) == 0
        meta = json.loads((workdir / "11A_i_clt_meta.json").read_text())
        assert {"ks_gaussian", "ks_rmt_n20", "samples"} <= meta.keys()
        rq = (workdir / "11A_i_rq.csv").read_text().splitlines()
        assert rq[0].startswith("q,a_q,n_plus,n_minus")

    def test_rmt_outputs(self, tmp_path):
        assert run(["--out", tmp_path, "--nodes", "24", "rmt-moments",
                    "--nmax", "3", "--kmax", "2", "--mc-samples", "500"]) == 0
        lines = (tmp_path / "rmt_moments.csv").read_text().splitlines()
        assert lines[0] == "N,k,product,polynomial,contour,mc_mean,mc_stderr"
        assert len(lines) == 7
        assert run(["--out", tmp_path, "rmt-density", "--n-dim", "4",
                    "--points", "50"]) == 0
        dens = (tmp_path / "rmt_density_N4.csv").read_text().splitlines()
        assert dens[0] == "t,density"

    def test_upsilon_and_compare(self, workdir):
        base = ["--curve", "11A_i", "--xmax", "5000", "--pmax", "1000",
                "--nodes", "24", "--out", workdir]
        assert run(base + ["upsilon", "--k", "1"]) == 0
        poly = json.loads((workdir / "11A_i_upsilon_k1.json").read_text())
        assert poly["k"] == 1 and len(poly["coefficients"]) == 1
        assert run(base + ["predict-compare", "--kmax", "1"]) == 0
        cmp_lines = (workdir / "11A_i_predict_compare.csv").read_text().splitlines()
        assert cmp_lines[0] == "k,samples,empirical_sum,predicted_sum,ratio"

    def test_json_format(self, tmp_path):
        assert run(["--out", tmp_path, "--format", "json", "ingest"]) == 0
        data = json.loads((tmp_path / "ingest.csv").read_text())
        assert data[0]["name"] == "11A_i"


class TestDeterminism:
    def test_byte_identical_runs(self, tmp_path):
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert run(["--curve", "11A_i", "--xmax", "4000", "--out", out,
                        "theta-build"]) == 0
            assert run(["--curve", "11A_i", "--xmax", "4000", "--out", out,
                        "sweep"]) == 0
            assert run(["--curve", "11A_i", "--xmax", "4000", "--pmax", "500",
                        "--out", out, "moments"]) == 0
            assert run(["--out", out, "--nodes", "16", "--seed", "9",
                        "rmt-moments", "--nmax", "2", "--kmax", "1",
                        "--mc-samples", "200"]) == 0
        for name in ("11A_i_x4000.coeffs", "11A_i_sweep.csv",
                     "11A_i_moments.csv", "rmt_moments.csv"):
            a = (tmp_path / "a" / name).read_bytes()
            b = (tmp_path / "b" / name).read_bytes()
            assert a == b, name
