import json

import pytest

from moritak.catalog import write_catalog
from moritak.generate import SuiteConfig
from moritak.morita import K1_NOTE
from moritak.suite import PROPERTIES, report_without_timing, run_property, run_suite, trials_for

TINY = SuiteConfig(seed=3, trials=2)


def test_schema():
    rep = run_suite(TINY, "fredholm")
    assert {"suite", "seed", "properties", "wall_ms"} <= set(rep)
    for p in rep["properties"]:
        assert {"name", "paper_ref", "trials", "max_residual", "pass"} <= set(p)
    assert rep["note"] == K1_NOTE
    json.dumps(rep)


def test_deterministic_apart_from_timing():
    a, b = run_suite(TINY), run_suite(TINY)
    assert json.dumps(report_without_timing(a)) == json.dumps(report_without_timing(b))


def test_suite_selection():
    names = {p["name"] for p in run_suite(TINY, "morita")["properties"]}
    assert names == {p.name for p in PROPERTIES if p.suite == "morita"}
    with pytest.raises(ValueError):
        run_suite(TINY, "kk")


def test_small_run_passes():
    assert run_suite(TINY)["pass"]


def test_trial_scaling():
    cfg = SuiteConfig(trials=50)
    counts = {p.name: trials_for(p, cfg) for p in PROPERTIES}
    assert counts["index-realization"] == counts["index-algebra"] == counts["pseudo-inverse"] == 100
    assert counts["functoriality"] == 30
    assert counts["morita-isomorphism"] == counts["bimodule-axioms"] == 50
    assert counts["catalog"] == 1


def test_failing_trial_is_recorded():
    from moritak.errors import NumericalDegeneracyError
    from moritak.suite import Property

    def boom(rng, cfg):
        raise NumericalDegeneracyError("synthetic")

    entry = run_property(Property("boom", "synthetic", "fredholm", 0.0, boom), TINY)
    assert not entry["pass"] and entry["max_residual"] is None
    assert "synthetic" in entry["errors"][0]


def test_corrupted_fixture(tmp_path):
    paths = write_catalog(tmp_path)
    bad = [p for p in paths if p.endswith("corrupted_bimodule.json")][0]
    good = [p for p in paths if p.endswith("cn3.json")][0]
    rep = run_suite(SuiteConfig(seed=1, trials=1), "morita", fixtures=[good, bad])
    by_name = {p["name"]: p for p in rep["properties"]}
    assert by_name[f"fixture:{good}"]["pass"]
    assert not by_name[f"fixture:{bad}"]["pass"]
    assert by_name[f"fixture:{bad}"]["errors"][0].startswith("axiom-violation (c)")
    assert not rep["pass"]


def test_no_k1_claims():
    rep = run_suite(TINY)
    assert not any("K1" in p["name"] or "K1" in p["paper_ref"] for p in rep["properties"])
