"""Acceptance gate: one PASS/FAIL line per criterion at seed 42, 50 trials.

The full report is produced once through the command-line entry point and
shared by every criterion.  The lines are printed in the terminal summary
(see ``conftest.py``) and also when this file is run as a script.
"""

import json

import numpy as np
import pytest

from moritak.bimodule import linking_algebra
from moritak.catalog import column_space, rectangular
from moritak.cli import main
from moritak.documents import load
from moritak.morita import K1_NOTE, induced_map_fredholm, multiplicity_matrix

SEED, TRIALS = 42, 50
RESULTS = []


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance") / "report.json"
    rc = main(["verify", "--seed", str(SEED), "--trials", str(TRIALS), "-o", str(out)])
    report = load(out).payload
    return rc, report, {p["name"]: p for p in report["properties"]}


def record(number, title, ok, detail=""):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _prop(props, name, trials, limit=None):
    p = props[name]
    ok = p["pass"] and p["trials"] >= trials
    detail = f"{p['trials']} trials, max residual {p['max_residual']}"
    if limit is not None:
        ok = ok and p["max_residual"] is not None and p["max_residual"] < limit
        detail += f" < {limit:g}"
    return ok, detail


def test_criterion_01_index_realization(run):
    record(1, "index realization", *_prop(run[2], "index-realization", 100, 0.5))


def test_criterion_02_index_algebra(run):
    record(2, "index algebra", *_prop(run[2], "index-algebra", 100, 0.5))


def test_criterion_03_pseudo_inverse(run):
    record(3, "pseudo-inverse contract", *_prop(run[2], "pseudo-inverse", 100, 1e-9))


def test_criterion_04_regularization(run):
    record(4, "regularization", *_prop(run[2], "regularization", 50, 0.5))


def test_criterion_05_quasi_stable(run):
    record(5, "quasi-stable rank rigidity", *_prop(run[2], "quasi-stable-rank", 50, 0.5))


def test_criterion_06_bimodule_axioms(run):
    # 4 random elements per bimodule: 200 elements over 50 bimodules
    ok, detail = _prop(run[2], "bimodule-axioms", 50, 1e-8)
    record(6, "bimodule axioms and positivity", ok, detail)


def test_criterion_07_dual_path(run):
    record(7, "dual-path induced map", *_prop(run[2], "dual-path-induced-map", 50, 0.5))


def test_criterion_08_functoriality(run):
    record(8, "functoriality", *_prop(run[2], "functoriality", 30, 0.5))


def test_criterion_09_morita_isomorphism(run):
    record(9, "imprimitivity bimodules induce K0 isomorphisms",
           *_prop(run[2], "morita-isomorphism", 50, 0.5))


def test_criterion_10_conjugate_tensor(run):
    record(10, "conjugate tensor identification", *_prop(run[2], "conjugate-tensor", 50, 0.5))


def test_criterion_11_catalog(run):
    suite_ok, _ = _prop(run[2], "catalog", 1, 0.5)
    cn3 = column_space(3)
    fred, mult = induced_map_fredholm(cn3), multiplicity_matrix(cn3)
    unit_image = fred(cn3.left.unit_class()).vector
    link = linking_algebra(rectangular([1], [1]))
    ok = (suite_ok and fred.matrix == mult.matrix == ((1,),) and unit_image == (3,)
          and link.block_sizes == (2,) and link.multiplicities == (1,))
    record(11, "canonical catalog", ok,
           f"fredholm {fred.matrix}, multiplicity {mult.matrix}, [1] -> {unit_image}, L blocks {link.block_sizes}")


def test_criterion_12_k1_not_claimed(run):
    rc, report, props = run
    claims = [n for n, p in props.items() if "k1" in (n + p["paper_ref"]).lower()]
    ok = report.get("note") == K1_NOTE and "K1" in report["note"] and not claims
    record(12, "K1 stated as not reproducible, no K1 claims", ok, f"note present: {bool(report.get('note'))}")


def test_suite_exit_code_and_runtime(run):
    rc, report, _ = run
    ok = rc == 0 and report["pass"] and report["wall_ms"] < 60_000
    line = f"overall     {'PASS' if ok else 'FAIL'}  verify --seed {SEED} --trials {TRIALS}  [exit {rc}, {report['wall_ms']} ms < 60000]"
    RESULTS.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
