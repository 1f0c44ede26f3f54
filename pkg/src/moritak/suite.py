"""Randomized property batteries with a deterministic, machine-readable report.

Each property runs a number of seeded trials.  A trial returns a residual
(for integer identities, the total absolute discrepancy) and a verdict; an
exception inside a trial counts as a failure and its message is recorded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import generate as gen
from .algebra import K0Class, k0_of_projection, zero_class
from .bimodule import (axiom_residuals, check_conjugate_tensor, is_left_full,
                       is_right_full, isometry_defect, left_inner, linking_algebra,
                       make_bimodule, op_tensor, right_inner)
from .catalog import column_space, rectangular
from .documents import DocumentError, load
from .errors import AxiomViolationError, MoritaError
from .fredholm import (index, pseudo_inverse, regularize_unitized,
                       standard_index_op)
from .hilbert import check_quasi_stable, direct_sum, dsum, module_rank
from .morita import (K1_NOTE, induced_map_fredholm, multiplicity_matrix,
                     second_representative, verify_functoriality, verify_morita_iso)

SUITES = ("all", "fredholm", "morita")


@dataclass(frozen=True)
class Property:
    name: str
    paper_ref: str
    suite: str
    scale: float
    trial: Callable
    threshold: float = 0.0


def _gap(a: K0Class, b: K0Class) -> int:
    return int(sum(abs(x - y) for x, y in zip(a.vector, b.vector)))


# -- fredholm battery -----------------------------------------------------------


def _index_realization(rng, cfg):
    alg = gen.random_algebra(rng, cfg)
    n = int(rng.integers(1, cfg.max_ambient_rank + 1))
    p, q = gen.random_projection(rng, alg, n), gen.random_projection(rng, alg, n)
    got = index(standard_index_op(p, q), cfg.tol)
    want = k0_of_projection(p) - k0_of_projection(q)
    gap = _gap(got, want)
    return float(gap), gap == 0


def _index_algebra(rng, cfg):
    alg = gen.random_algebra(rng, cfg)
    m, n, p = (gen.random_module(rng, alg, cfg) for _ in range(3))
    t1, t2 = gen.random_operator(rng, m, n), gen.random_operator(rng, n, p)
    i1, i2 = index(t1, cfg.tol), index(t2, cfg.tol)
    gaps = [
        _gap(index(t1.adjoint(), cfg.tol), -i1),
        _gap(index(gen.random_invertible(rng, n) @ t1 @ gen.random_invertible(rng, m), cfg.tol), i1),
        _gap(index(dsum(t1, t2), cfg.tol), i1 + i2),
        _gap(index(t2 @ t1, cfg.tol), i1 + i2),
        _gap(index(gen.random_operator(rng, m, m), cfg.tol), zero_class(alg)),
    ]
    return float(sum(gaps)), not any(gaps)


def _pseudo_inverse_contract(rng, cfg):
    alg = gen.random_algebra(rng, cfg)
    w = pseudo_inverse(gen.random_operator_pair(rng, alg, cfg), cfg.tol)
    worst = max(w.residuals().values())
    return worst, worst < 1e-9


def _regularization(rng, cfg):
    alg = gen.random_algebra(rng, cfg)
    t = gen.random_operator_pair(rng, alg, cfg)
    reg = regularize_unitized(t, cfg.tol)
    u = reg.unitization
    ind_t = index(reg.lifted, cfg.tol)
    w = pseudo_inverse(reg.regular, cfg.tol)
    ker = k0_of_projection(w.kernel_projection)
    gaps = [
        _gap(w.index, ind_t),
        _gap(ker, u.unitized.unit_class() * reg.n),
        abs(u.augmentation_k0(ind_t)),
        _gap(u.restrict_k0(ind_t), index(t, cfg.tol)),
    ]
    return float(sum(gaps)), not any(gaps)


def _quasi_stable(rng, cfg):
    alg = gen.random_algebra(rng, cfg)
    inst = gen.random_quasi_stable(rng, alg, cfg)
    check = check_quasi_stable(inst.operator, (inst.m, inst.n, inst.x), cfg.tol)
    gap = _gap(module_rank(inst.m), module_rank(inst.n))
    # a module of different rank can never be quasi-stably isomorphic to M
    other = gen.random_module(rng, alg, cfg)
    rigid = True
    if module_rank(other) != module_rank(inst.m):
        stray = gen.random_operator(rng, direct_sum(inst.m, inst.x), direct_sum(other, inst.x), False)
        rigid = not check_quasi_stable(stray, (inst.m, other, inst.x), cfg.tol).ok
    return float(gap) + (0.0 if rigid else 1.0), bool(check.ok) and gap == 0 and rigid


# -- morita battery ---------------------------------------------------------------


def _axioms(rng, cfg):
    x = gen.random_bimodule(rng, cfg)
    res = axiom_residuals(x.left, x.right, x.space)
    worst_axiom = max(res.values())
    worst = 0.0
    ok = worst_axiom < 1e-8
    for _ in range(4):
        z = x.random_element(rng)
        a, b = left_inner(x, z, z), right_inner(x, z, z)
        floor = min(a.min_eigenvalue(), b.min_eigenvalue())
        norm_gap = abs(a.norm() - b.norm())
        iso = isometry_defect(x, z)
        worst = max(worst, max(-floor, 0.0), norm_gap, iso)
        ok = ok and floor >= -1e-9 and norm_gap <= 1e-9 and iso <= 1e-9
    return max(worst_axiom, worst), ok


def _dual_path(rng, cfg):
    x = gen.random_left_full(rng, cfg)
    oracle = multiplicity_matrix(x, cfg.tol)
    fred = induced_map_fredholm(x, cfg.tol)
    gap = int(np.abs(oracle.array - fred.array).sum())
    for i in range(x.left.k):
        pad = gen.random_projection(rng, x.left, 1)
        t = second_representative(x.left, i, pad)
        col = index(op_tensor(t, x, cfg.tol).as_operator(), cfg.tol).vector
        gap += int(np.abs(np.array(col) - fred.array[:, i]).sum())
    return float(gap), gap == 0


def _functoriality(rng, cfg):
    x, y = gen.random_chain(rng, cfg)
    ok = verify_functoriality(x, y, cfg.tol)
    return (0.0 if ok else 1.0), ok


def _main_theorem(rng, cfg):
    x = gen.random_imprimitivity(rng, cfg)
    full = is_left_full(x, cfg.tol) and is_right_full(x, cfg.tol)
    rep = verify_morita_iso(x, cfg.tol)
    oracle = multiplicity_matrix(x, cfg.tol)
    cols_ok = all(sorted(c) == [0] * (len(c) - 1) + [1] for c in rep.forward.array.T.tolist())
    bad = len(rep.failures) + (0 if cols_ok else 1) + (0 if oracle == rep.forward else 1)
    return float(bad), full and rep.ok and cols_ok and oracle == rep.forward


def _conjugate_tensor(rng, cfg):
    x = gen.random_bimodule(rng, cfg)
    ok = check_conjugate_tensor(x, cfg.tol)
    return (0.0 if ok else 1.0), ok


def _negative_control(rng, cfg):
    x = gen.random_bimodule(rng, cfg)
    # a bimodule filling all d_A x d_B matrices (less one dimension) cannot be pushed out
    while x.dim + 1 >= x.shape[0] * x.shape[1]:
        x = gen.random_bimodule(rng, cfg)
    try:
        make_bimodule(x.left, x.right, gen.corrupt_bimodule_basis(rng, x), cfg.tol)
    except AxiomViolationError:
        return 0.0, True
    return 1.0, False


def _catalog(rng, cfg):
    cn3 = column_space(3)
    fred, mult = induced_map_fredholm(cn3, cfg.tol), multiplicity_matrix(cn3, cfg.tol)
    unit = fred(cn3.left.unit_class())
    link = linking_algebra(rectangular([1], [1]), cfg.tol)
    checks = [fred.matrix == ((1,),), mult.matrix == ((1,),), unit.vector == (3,),
              link.block_sizes == (2,) and link.multiplicities == (1,)]
    return float(checks.count(False)), all(checks)


PROPERTIES = (
    Property("index-realization", "index of v -> qv on pA^n equals [p] - [q]", "fredholm", 2.0,
             _index_realization),
    Property("index-algebra", "index under adjoint, invertible sandwich, direct sum, composition",
             "fredholm", 2.0, _index_algebra),
    Property("pseudo-inverse", "TST = T, STS = S, kernel and cokernel projections", "fredholm", 2.0,
             _pseudo_inverse_contract),
    Property("regularization", "regular lift over the unitization keeps the index", "fredholm", 1.0,
             _regularization),
    Property("quasi-stable-rank", "quasi-stably isomorphic modules have equal rank", "fredholm", 1.0,
             _quasi_stable),
    Property("bimodule-axioms", "bimodule axioms, positivity and norm identities", "morita", 1.0,
             _axioms),
    Property("dual-path-induced-map", "induced map by Fredholm index vs multiplicity oracle",
             "morita", 1.0, _dual_path),
    Property("functoriality", "induced map of a tensor product composes", "morita", 0.6,
             _functoriality),
    Property("morita-isomorphism", "imprimitivity bimodules induce K0 isomorphisms", "morita", 1.0,
             _main_theorem),
    Property("conjugate-tensor", "X (x) X* spans the left inner products", "morita", 1.0,
             _conjugate_tensor),
    Property("negative-control", "corrupted bimodules are rejected with an axiom violation",
             "morita", 0.2, _negative_control),
    Property("catalog", "canonical examples", "morita", 0.0, _catalog),
)


def trials_for(prop: Property, cfg: gen.SuiteConfig) -> int:
    return max(1, int(round(prop.scale * cfg.trials)))


def run_property(prop: Property, cfg: gen.SuiteConfig) -> dict:
    worst, ok, errors = 0.0, True, []
    n = trials_for(prop, cfg)
    for t in range(n):
        rng = gen.trial_rng(cfg.seed, prop.name, t)
        try:
            resid, good = prop.trial(rng, cfg)
        except MoritaError as exc:
            resid, good = None, False
            errors.append(f"trial {t}: {type(exc).__name__}: {exc}")
        # an aborted trial has no residual; the report then carries null
        worst = None if worst is None or resid is None else max(worst, float(resid))
        if not good:
            ok = False
            if not errors or not errors[-1].startswith(f"trial {t}:"):
                errors.append(f"trial {t}: property violated (residual {resid:.3e})")
    entry = {"name": prop.name, "paper_ref": prop.paper_ref, "trials": n,
             "max_residual": worst, "pass": ok}
    if errors:
        entry["errors"] = errors[:5]
    return entry


def check_fixture(path, cfg: gen.SuiteConfig) -> dict:
    """A property entry for one fixture document: it must parse and validate."""
    entry = {"name": f"fixture:{path}", "paper_ref": "fixture document validates",
             "trials": 1, "max_residual": 0.0, "pass": True}
    try:
        load(path)
    except DocumentError as exc:
        axiom = getattr(exc, "axiom", None)
        kind = f"axiom-violation ({axiom})" if axiom else exc.category
        entry.update({"pass": False, "max_residual": None, "errors": [f"{kind}: {exc}"]})
    except OSError as exc:
        entry.update({"pass": False, "max_residual": None, "errors": [f"unreadable: {exc}"]})
    return entry


def run_suite(cfg: gen.SuiteConfig = gen.SuiteConfig(), suite: str = "all", fixtures=()) -> dict:
    """Run the selected battery and return the report dictionary."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    props = [p for p in PROPERTIES if suite == "all" or p.suite == suite]
    entries = [run_property(p, cfg) for p in props]
    entries.extend(check_fixture(f, cfg) for f in fixtures)
    return {
        "suite": suite,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "tol": cfg.tol,
        "properties": entries,
        "pass": all(e["pass"] for e in entries),
        "note": K1_NOTE,
        "wall_ms": int(round(1000 * (time.perf_counter() - start))),
    }


def report_without_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "wall_ms"}
