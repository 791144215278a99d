"""End-to-end CLI coverage: shapes, exit codes, determinism."""

import json

import pytest

from specseq import InvariantError, build_model
from specseq.cli import RunConfig, main


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, argv):
    code, out = run_cli(capsys, argv)
    return code, json.loads(out)


@pytest.fixture
def acyclic_path(tmp_path, acyclic_fk):
    path = tmp_path / "acyclic.json"
    path.write_text(json.dumps(acyclic_fk.to_json()))
    return str(path)


@pytest.fixture
def torus2_path(tmp_path, torus2):
    path = tmp_path / "torus2.json"
    path.write_text(json.dumps(torus2.to_json()))
    return str(path)


def alpha_blob():
    return {"scale": "1", "images": {"xi1": {"eta1eta2": "1"}}}


class TestCompute:
    def test_frozen_pages_and_abutment(self, capsys, acyclic_path):
        code, out = run_json(
            capsys, ["compute", "--input", acyclic_path, "--pages", "4"]
        )
        assert code == 0
        assert out["pages"] == {
            "1": {"0,0": 1, "2,-1": 1},
            "2": {"0,0": 1, "2,-1": 1},
            "3": {},
            "4": {},
        }
        assert out["abutment"]["ok"] is True
        assert out["abutment"]["r_star"] == 3

    def test_with_maps_reports_the_nonzero_differential(self, capsys, acyclic_path):
        code, out = run_json(
            capsys,
            ["compute", "--input", acyclic_path, "--pages", "3", "--with-maps"],
        )
        assert code == 0
        assert list(out["maps"]["2"]) == ["0,0"]
        assert out["maps"]["1"] == {} and out["maps"]["3"] == {}

    def test_out_file_matches_stdout(self, capsys, tmp_path, acyclic_path):
        target = tmp_path / "report.json"
        code, out = run_cli(
            capsys, ["compute", "--input", acyclic_path, "--out", str(target)]
        )
        assert code == 0
        assert target.read_text() == out


class TestOracleAndDecalage:
    def test_oracle_agrees_on_the_micro_example(self, capsys, acyclic_path):
        code, out = run_json(capsys, ["oracle", "--input", acyclic_path])
        assert code == 0
        assert out["ok"] is True
        assert out["mismatches"] == []

    def test_decalage_renumbering_holds(self, capsys, acyclic_path):
        code, out = run_json(capsys, ["decalage", "--input", acyclic_path])
        assert code == 0
        assert out["ok"] is True


class TestModel:
    def test_torus2_table(self, capsys):
        code, out = run_json(capsys, ["model", "torus", "--n", "2"])
        assert code == 0
        assert out["name"] == "torus2"
        assert out["e2_table"] == {
            "0,0": 1, "0,1": 2, "0,2": 1, "1,0": 2, "1,1": 4,
            "1,2": 2, "2,0": 1, "2,1": 2, "2,2": 1,
        }

    def test_product_of_files(self, capsys, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        a.write_text(json.dumps(build_model("torus", 1).to_json()))
        b.write_text(json.dumps(build_model("pn", 1).to_json()))
        code, out = run_json(
            capsys, ["model", "product", "--a", str(a), "--b", str(b)]
        )
        assert code == 0
        assert out["name"] == "torus1xpn1"
        degrees = [0] * 5
        for key, v in out["e2_table"].items():
            p, q = map(int, key.split(","))
            degrees[p + q] += v
        assert degrees == [1, 2, 2, 2, 1]

    def test_product_needs_both_factors(self, capsys, tmp_path):
        a = tmp_path / "a.json"
        a.write_text(json.dumps(build_model("torus", 1).to_json()))
        code, out = run_json(capsys, ["model", "product", "--a", str(a)])
        assert code == 3
        assert out["error"] == "parse"

    def test_missing_n_is_a_parse_error(self, capsys):
        code, out = run_json(capsys, ["model", "torus"])
        assert code == 3


class TestExtDims:
    def test_torus2(self, capsys, torus2_path):
        code, out = run_json(capsys, ["ext-dims", "--model", torus2_path])
        assert code == 0
        assert out == {"model": "torus2", "ext_dimensions": [1, 4, 6, 4, 1]}


class TestD2:
    def test_alpha_derivation_report(self, capsys, tmp_path, torus2_path):
        alpha = tmp_path / "alpha.json"
        alpha.write_text(json.dumps(alpha_blob()))
        code, out = run_json(
            capsys, ["d2", "--model", torus2_path, "--alpha", str(alpha)]
        )
        assert code == 0
        assert out["serre_sign"] == {"ok": True, "witness": None}
        assert out["is_zero"] is False
        assert out["datum"]["images"] == {"xi1": {"eta1eta2": "1"}}

    def test_scale_zero_kills_the_derivation(self, capsys, tmp_path, torus2_path):
        alpha = tmp_path / "alpha.json"
        alpha.write_text(json.dumps(alpha_blob()))
        code, out = run_json(
            capsys,
            ["d2", "--model", torus2_path, "--alpha", str(alpha), "--scale", "0"],
        )
        assert code == 0
        assert out["is_zero"] is True

    def test_default_datum_is_zero(self, capsys, torus2_path):
        code, out = run_json(capsys, ["d2", "--model", torus2_path])
        assert code == 0
        assert out["is_zero"] is True


class TestCertify:
    def test_zero_derivation_certifies(self, capsys, tmp_path, torus2, torus2_path):
        alg = torus2.pa.A
        from specseq import Derivation

        zero = Derivation(alg, (2, -1), [alg.zero()] * alg.dim())
        dpath = tmp_path / "zero.json"
        dpath.write_text(json.dumps(zero.to_json()))
        code, out = run_json(
            capsys,
            ["certify", "--algebra", torus2_path, "--derivation", str(dpath)],
        )
        assert code == 0
        assert out["verdict"] == "certified"

    def test_embedded_derivation_key(self, capsys, tmp_path, torus2):
        from specseq import Derivation

        alg = torus2.pa.A
        zero = Derivation(alg, (2, -1), [alg.zero()] * alg.dim())
        blob = torus2.to_json()
        blob["derivation"] = zero.to_json()
        path = tmp_path / "bundle.json"
        path.write_text(json.dumps(blob))
        code, out = run_json(capsys, ["certify", "--algebra", str(path)])
        assert code == 0
        assert out["verdict"] == "certified"

    def test_obstructed_instance_exits_2(self, capsys, tmp_path, torus2, torus2_path):
        from specseq import ObstructionDatum, d2_from_alpha

        d = d2_from_alpha(ObstructionDatum.from_json(torus2, alpha_blob()))
        dpath = tmp_path / "d.json"
        dpath.write_text(json.dumps(d.to_json()))
        code, out = run_json(
            capsys,
            ["certify", "--algebra", torus2_path, "--derivation", str(dpath)],
        )
        assert code == 2
        assert out["verdict"] == "failed(primitive-component-only)"
        assert out["failed_step"] == "primitive-component-only"

    def test_require_square_zero_step(self, capsys, tmp_path, torus2, torus2_path):
        from specseq import Derivation

        alg = torus2.pa.A
        zero = Derivation(alg, (2, -1), [alg.zero()] * alg.dim())
        dpath = tmp_path / "zero.json"
        dpath.write_text(json.dumps(zero.to_json()))
        code, out = run_json(
            capsys,
            [
                "certify", "--algebra", torus2_path,
                "--derivation", str(dpath), "--require-square-zero",
            ],
        )
        assert code == 0
        assert out["steps"][0]["id"] == "square-zero"

    def test_wrong_bidegree_exits_4(self, capsys, tmp_path, torus2, torus2_path):
        from specseq import Derivation

        alg = torus2.pa.A
        bad = Derivation(alg, (1, 0), [alg.zero()] * alg.dim(), check=False)
        dpath = tmp_path / "bad.json"
        dpath.write_text(json.dumps(bad.to_json()))
        code, out = run_json(
            capsys,
            ["certify", "--algebra", torus2_path, "--derivation", str(dpath)],
        )
        assert code == 4
        assert out["error"] == "invariant"

    def test_missing_derivation_exits_3(self, capsys, torus2_path):
        code, out = run_json(capsys, ["certify", "--algebra", torus2_path])
        assert code == 3
        assert out["location"] == "derivation"


class TestErrors:
    def test_missing_file_exits_3_with_location(self, capsys):
        code, out = run_json(capsys, ["compute", "--input", "/no/such/file.json"])
        assert code == 3
        assert out["error"] == "parse"
        assert out["location"] == "/no/such/file.json"

    def test_invalid_json_exits_3(self, capsys, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("{not json")
        code, out = run_json(capsys, ["compute", "--input", str(path)])
        assert code == 3
        assert "invalid JSON" in out["message"]

    def test_config_validation(self):
        with pytest.raises(InvariantError):
            RunConfig("fuzz", cases=0)
        with pytest.raises(InvariantError):
            RunConfig("compute", pages=0)
        with pytest.raises(InvariantError):
            RunConfig("fuzz", threads=0)


class TestFuzz:
    def test_small_run_is_clean_and_deterministic(self, capsys):
        argv = ["fuzz", "--cases", "6", "--seed", "3"]
        code1, out1 = run_cli(capsys, argv)
        code2, out2 = run_cli(capsys, argv)
        assert code1 == code2 == 0
        assert out1 == out2
        blob = json.loads(out1)
        assert blob["counterexamples"] == 0
        assert blob["failures"] == []

    def test_threads_do_not_change_the_bytes(self, capsys, monkeypatch):
        argv = ["fuzz", "--cases", "6", "--seed", "11"]
        code1, out1 = run_cli(capsys, argv)
        monkeypatch.setenv("SS_THREADS", "2")
        code2, out2 = run_cli(capsys, argv)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_kind_filters(self, capsys):
        code, out = run_json(
            capsys, ["fuzz", "--cases", "4", "--seed", "5", "--kind", "complexes"]
        )
        assert code == 0
        assert out["verdicts"] == {}
        code, out = run_json(
            capsys, ["fuzz", "--cases", "4", "--seed", "5", "--kind", "derivations"]
        )
        assert code == 0
        assert sum(out["verdicts"].values()) == 4
