import json

import pytest

from mathieu_curve.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestNuCommand:
    def test_monodromy_json(self, capsys):
        code, out = run(capsys, "nu", "--lambda", "25.02", "--q", "1", "--method", "monodromy")
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "monodromy"
        assert abs(payload["nu"] - 4.9999152) < 1e-4

    def test_band_edge_flagged(self, capsys):
        code, out = run(capsys, "nu", "--lambda", "4", "--q", "1e-9", "--method", "monodromy")
        assert code == 0
        payload = json.loads(out)
        assert payload["nu"] == 2.0 and payload["band_edge"]

    def test_wkb_alpha_agrees_with_monodromy(self, capsys):
        _, out_m = run(capsys, "nu", "--lambda", "25.02", "--q", "1", "--method", "monodromy")
        _, out_w = run(capsys, "nu", "--lambda", "25.02", "--q", "1", "--method", "wkb-alpha")
        nm = json.loads(out_m)["nu"]
        nw = json.loads(out_w)["nu"]
        assert abs(nm - nw) < 1e-6

    def test_wkb_alpha_regime_guard(self, capsys):
        code, _ = run(capsys, "nu", "--lambda", "1.0", "--q", "1", "--method", "wkb-alpha")
        assert code == 2

    def test_wkb_beta_runs(self, capsys):
        code, out = run(capsys, "nu", "--lambda", "86", "--q", "50", "--method", "wkb-beta")
        assert code == 0
        payload = json.loads(out)
        assert payload["nu"] == pytest.approx(0.497, abs=0.05)

    def test_free_equation_band_edge(self, capsys):
        code, out = run(capsys, "nu", "--lambda", "4", "--q", "0", "--method", "monodromy")
        assert code == 0
        payload = json.loads(out)
        assert payload["nu"] == 2.0 and payload["band_edge"]

    def test_hill_method(self, capsys):
        code, out = run(capsys, "nu", "--lambda", "25.02", "--q", "1", "--method", "hill")
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "hill"
        assert abs(payload["nu"] - 5.0) < 1e-3

    def test_text_format(self, capsys):
        code, out = run(capsys, "--format", "text", "nu", "--lambda", "6.25", "--q", "0", "--method", "monodromy")
        assert code == 0
        assert out.startswith("nu = 2.5")


class TestSeriesCommand:
    def test_eigen1_json_round_trip(self, capsys):
        code, out = run(capsys, "series", "--which", "eigen1", "--order", "8")
        assert code == 0
        payload = json.loads(out)
        rows = {r["q_power"]: r for r in payload["rows"]}
        # denominators are monic: 1/(2(nu^2-1)) -> (1/2)/(nu^2 - 1)
        assert rows[2]["num"] == {"0": "1/2"}
        assert rows[2]["den"] == {"0": "-1", "2": "1"}

    def test_inverse_text(self, capsys):
        code, out = run(capsys, "--format", "text", "series", "--which", "inverse", "--order", "21")
        assert code == 0
        assert "lambda^(-19/2): (-1/4)*q^2 + (-65637/64)*q^4 + (-722007/256)*q^6" in out

    def test_eigen2_latex(self, capsys):
        code, out = run(capsys, "--format", "latex", "series", "--which", "eigen2", "--order", "7")
        assert code == 0
        assert out.startswith("\\lambda_\\nu =")
        assert "q^(-7/2)" in out

    def test_eigen2_json_exact(self, capsys):
        code, out = run(capsys, "series", "--which", "eigen2", "--order", "7")
        payload = json.loads(out)
        rows = {r["q_power_times_2"]: r["poly"] for r in payload["rows"]}
        assert rows[1] == {"1": "-4"}
        assert rows[-7]["9"] == "175045/268435456"

    def test_unknown_series_usage_error(self, capsys):
        assert main(["series", "--which", "nope"]) == 2


class TestOperatorsCommand:
    def test_m3_json(self, capsys):
        code, out = run(capsys, "operators", "--m", "3")
        assert code == 0
        payload = json.loads(out)
        assert payload[0] == {"coeff": "31/15120", "wpow": 3, "dpow": 6}
        assert payload[-1] == {"coeff": "41/896", "wpow": 0, "dpow": 3}

    def test_bad_order(self, capsys):
        assert main(["operators", "--m", "9"]) == 2


class TestVerifyCommand:
    def test_claims_suite_passes(self, capsys):
        code, out = run(capsys, "verify", "--suite", "claims")
        assert code == 0
        for line in out.strip().splitlines():
            rec = json.loads(line)
            assert rec["pass"], rec

    def test_crosscheck_suite_passes(self, capsys):
        code, out = run(capsys, "verify", "--suite", "crosscheck")
        assert code == 0

    def test_operators_suite_passes(self, capsys):
        code, out = run(capsys, "--tol", "1e-5", "verify", "--suite", "operators")
        assert code == 0
        recs = [json.loads(l) for l in out.strip().splitlines()]
        assert len(recs) == 8 and all(r["pass"] for r in recs)

    def test_records_sorted(self, capsys):
        _, out = run(capsys, "verify", "--suite", "claims")
        ids = [json.loads(l)["check"] for l in out.strip().splitlines()]
        assert ids == sorted(ids)

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code = main(["--out", str(target), "operators", "--m", "1"])
        assert code == 0
        assert json.loads(target.read_text())[0]["coeff"] == "1/6"
