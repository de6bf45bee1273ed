import json
import math
import os
from pathlib import Path

import pytest

import nlwlab
from nlwlab import plots

SMALL = """
[model]
p = 3
mode = flux_decay
[grid]
dr = 0.1
r_max = 20
T = 4
[diagnostics]
suite = energy
[output]
record_csv = true
"""


def test_thresholds():
    assert nlwlab.critical_exponent(3, 3.0) == pytest.approx(0.5)
    assert nlwlab.scattering_threshold(3) == pytest.approx((1 + math.sqrt(17)) / 2)
    assert nlwlab.gamma0_window(3, 3.0, "flux_decay") == pytest.approx((1.0, 2.0))


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError, match="model.q"):
        nlwlab.parse_config("[model]\nq = 1\n")
    with pytest.raises(ValueError):
        nlwlab.parse_config("[model]\np = 5.1\n")
    c = nlwlab.parse_config(SMALL)
    assert c["grid"]["dr"] == 0.1
    assert nlwlab.config_hash(SMALL) == nlwlab.config_hash(SMALL + "\n# comment\n")


def test_analysis_verdicts():
    pairs = [(u, 7.0 * (1.0 + u) ** -1.5) for u in range(2, 33)]
    fit = nlwlab.fit_power_law(pairs, 2, 32)
    assert fit["exponent"] == pytest.approx(-1.5, abs=1e-12)
    assert not nlwlab.plateau_check([(25, 0.5), (50, 0.75), (100, 0.9375)], 0.05)["pass"]
    order, status = nlwlab.convergence_order(1.01, 1.0025, 1.000625)
    assert order == pytest.approx(2.0) and status == "ok"


def test_solve_diagnose_and_readers(tmp_path):
    run = tmp_path / "run"
    manifest = nlwlab.solve(SMALL, run)
    assert manifest["schema_version"] == nlwlab.schema_version
    assert manifest["energies"]["E0"] == pytest.approx(6.2541242294478891444, rel=1e-4)
    report = nlwlab.diagnose(run, "energy,decay")
    names = [it["name"] for it in report["items"]]
    assert names == ["energy", "decay"]
    assert plots.read_report(run)["summary"] == report["summary"]
    series = sorted((run / "series").glob("*.csv"))
    assert series
    meta, pairs = plots.read_series_csv(series[0])
    assert meta["schema_version"] == 1 and pairs
    meta, cols = plots.read_record_csv(run / "record.csv")
    assert set(cols) == {"t", "r", "phi", "dphi_dt", "dphi_dr"}
    assert cols["phi"][0] == pytest.approx(1.0)
    assert json.loads(nlwlab.render_report(str(run), "json"))["summary"] == report["summary"]


def test_reference_config_parses():
    src = Path(os.environ.get("NLWLAB_SOURCE_DIR", Path(__file__).parents[2]))
    c = nlwlab.parse_config((src / "configs" / "reference.ini").read_text())
    assert c["model"]["p"] == 3
