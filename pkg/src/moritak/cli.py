"""Command-line front end.

Exit codes: 0 success, 1 validation or property failure, 2 usage error
(bad arguments or unreadable files).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import matrix_core as mc
from .algebra import Algebra, k0_of_projection, minimal_projection
from .bimodule import (Bimodule, conjugate, corner_bimodule, external_tensor,
                       internal_tensor, linking_algebra)
from .catalog import write_catalog
from .documents import Document, DocumentError, LinkingAlgebraDoc, dump, load, serialize
from .errors import MoritaError
from .fredholm import index
from .generate import GENERATED_KINDS, SuiteConfig, generate
from .hilbert import HilbertModule, ModuleOperator, module_rank
from .morita import K1_NOTE, induced_map_fredholm, multiplicity_matrix
from .suite import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path, *kinds) -> Document:
    try:
        doc = load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    if kinds and doc.kind not in kinds:
        raise DocumentError("bad-value", "/kind", f"expected a {' or '.join(kinds)} document, got {doc.kind!r}")
    return doc


def _emit(args, data: dict, text: str):
    if args.format == "json":
        print(json.dumps(data))
    else:
        print(text)


def _write(value, path):
    try:
        dump(value, path)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args):
    doc = _load(args.file)
    _emit(args, {"valid": True, "kind": doc.kind}, f"ok {doc.kind}")
    return EXIT_OK


def cmd_k0(args):
    doc = _load(args.file, "algebra", "module")
    if doc.kind == "algebra":
        alg: Algebra = doc.payload
        gens = [k0_of_projection(minimal_projection(alg, i)) for i in range(alg.k)]
        data = {"generators": [list(g.vector) for g in gens], "unit": list(alg.unit_class().vector)}
        text = "\n".join([f"e{i}\t{g}" for i, g in enumerate(gens)] + [f"unit\t{alg.unit_class()}"])
    else:
        c = k0_of_projection(doc.payload.projection, args.tol)
        data, text = {"class": list(c.vector)}, str(c)
    _emit(args, data, text)
    return EXIT_OK


def cmd_rank(args):
    m: HilbertModule = _load(args.file, "module").payload
    r = module_rank(m)
    _emit(args, {"rank": list(r.vector)}, str(r))
    return EXIT_OK


def cmd_index(args):
    t: ModuleOperator = _load(args.file, "operator").payload
    c = index(t, args.tol)
    _emit(args, {"index": list(c.vector)}, str(c))
    return EXIT_OK


def cmd_induced_map(args):
    x: Bimodule = _load(args.file, "bimodule").payload
    maps = {}
    # the oracle goes first so a failure of the main path cannot hide it
    if args.method in ("multiplicity", "both"):
        maps["multiplicity"] = multiplicity_matrix(x, args.tol)
    if args.method in ("fredholm", "both"):
        maps["fredholm"] = induced_map_fredholm(x, args.tol)
    agree = len({m.matrix for m in maps.values()}) == 1
    data = {k: [list(r) for r in m.matrix] for k, m in maps.items()}
    data["agree"] = agree
    text = "\n".join(f"{k}\t{json.dumps([list(r) for r in m.matrix])}" for k, m in maps.items())
    if args.figures:
        from .plotting import induced_map_figure
        data["figure"] = induced_map_figure(maps, args.figures)
        text += f"\nfigure\t{data['figure']}"
    _emit(args, data, text)
    return EXIT_OK if agree else EXIT_FAIL


def _binary(args, op):
    x = _load(args.x, "bimodule").payload
    y = _load(args.y, "bimodule").payload
    z = op(x, y, args.tol)
    _write(z, args.output)
    _emit(args, {"output": args.output, "dim": z.dim}, f"wrote {args.output} (dim {z.dim})")
    return EXIT_OK


def cmd_tensor(args):
    return _binary(args, internal_tensor)


def cmd_etensor(args):
    return _binary(args, external_tensor)


def cmd_conjugate(args):
    x = _load(args.file, "bimodule").payload
    y = conjugate(x)
    _write(y, args.output)
    _emit(args, {"output": args.output, "dim": y.dim}, f"wrote {args.output} (dim {y.dim})")
    return EXIT_OK


def cmd_link(args):
    x = _load(args.file, "bimodule").payload
    view = linking_algebra(x, args.tol)
    data = {"blocks": list(view.block_sizes), "multiplicities": list(view.multiplicities), "dim": view.dim}
    if args.output:
        _write(LinkingAlgebraDoc(view.space, view.p_left), args.output)
        data["output"] = args.output
    _emit(args, data, f"blocks\t{list(view.block_sizes)}\nmultiplicities\t{list(view.multiplicities)}")
    return EXIT_OK


def _read_matrix(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError("syntax", "", str(exc)) from None
    a = np.array(raw, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise DocumentError("bad-value", "", "expected a matrix of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def cmd_corner(args):
    link: LinkingAlgebraDoc = _load(args.file, "linking-algebra").payload
    pa = _read_matrix(args.pa) if args.pa else link.p_left
    d = link.space.shape[0]
    if pa.shape != (d, d):
        raise DocumentError("invariant", "/p_left", f"corner projection must be {d}x{d}")
    x = corner_bimodule(link.space, pa, np.eye(d) - pa, args.tol)
    data = {"left": x.left.to_json(), "right": x.right.to_json(), "dim": x.dim}
    if args.output:
        _write(x, args.output)
        data["output"] = args.output
    _emit(args, data, f"left\t{json.dumps(x.left.to_json())}\nright\t{json.dumps(x.right.to_json())}\ndim\t{x.dim}")
    return EXIT_OK


def cmd_verify(args):
    cfg = SuiteConfig(seed=args.seed, trials=args.trials, tol=args.tol)
    report = run_suite(cfg, args.suite, args.fixture or ())
    if args.output:
        _write(Document("report", report), args.output)
    if args.figures:
        from .plotting import report_figure
        report["figure"] = report_figure(report, args.figures)
    if args.format == "json":
        print(json.dumps(report))
    else:
        lines = ["name\ttrials\tmax_residual\tpass"]
        for p in report["properties"]:
            r = "-" if p["max_residual"] is None else f"{p['max_residual']:.3e}"
            lines.append(f"{p['name']}\t{p['trials']}\t{r}\t{'PASS' if p['pass'] else 'FAIL'}")
            lines.extend(f"#\t{e}" for e in p.get("errors", []))
        lines.append(f"# {K1_NOTE}")
        lines.append(f"# wall_ms {report['wall_ms']}")
        if "figure" in report:
            lines.append(f"# figure {report['figure']}")
        print("\n".join(lines))
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_examples(args):
    paths = write_catalog(args.write)
    _emit(args, {"written": paths}, "\n".join(paths))
    return EXIT_OK


def cmd_generate(args):
    cfg = SuiteConfig(seed=args.seed, tol=args.tol)
    doc = generate(args.kind, cfg, args.trial)
    if args.output:
        _write(doc, args.output)
    else:
        print(serialize(doc))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _positive_float(s):
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not v > 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError("tolerance must be a positive finite number")
    return v


def _positive_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=argparse.SUPPRESS,
                        help=f"relative tolerance (default {mc.DEFAULT_TOL:g})")
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="moritak", parents=[common],
                                     description="Fredholm index and Morita K0 maps for multi-matrix algebras.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "parse and validate a document").add_argument("file")
    add("k0", cmd_k0, "K0 generators of an algebra, or the class of a module's projection").add_argument("file")
    add("rank", cmd_rank, "rank of a module in K0").add_argument("file")
    add("index", cmd_index, "Fredholm index of an operator").add_argument("file")
    p = add("induced-map", cmd_induced_map, "K0 map induced by a bimodule")
    p.add_argument("file")
    p.add_argument("--method", choices=("fredholm", "multiplicity", "both"), default="both")
    p.add_argument("--figures", metavar="DIR")
    for name, func, help_ in (("tensor", cmd_tensor, "internal tensor product X (x)_B Y"),
                              ("etensor", cmd_etensor, "external tensor product")):
        p = add(name, func, help_)
        p.add_argument("x")
        p.add_argument("y")
        p.add_argument("-o", "--output", required=True)
    p = add("conjugate", cmd_conjugate, "conjugate bimodule X*")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p = add("link", cmd_link, "decompose the linking algebra of a bimodule")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p = add("corner", cmd_corner, "bimodule between the corners of a linking algebra")
    p.add_argument("file")
    p.add_argument("--pa", metavar="MATRIX.json", help="corner projection as [re, im] matrix JSON")
    p.add_argument("-o", "--output")
    p = add("verify", cmd_verify, "run the randomized property suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=_positive_int, default=50)
    p.add_argument("--fixture", action="append", metavar="FILE",
                   help="also require this document to validate (repeatable)")
    p.add_argument("--figures", metavar="DIR")
    p.add_argument("-o", "--output", metavar="REPORT.json")
    p = add("examples", cmd_examples, "write the canonical example catalog")
    p.add_argument("--write", required=True, metavar="DIR")
    p = add("generate", cmd_generate, "write a random instance")
    p.add_argument("kind", choices=GENERATED_KINDS)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "tol"):
        args.tol = mc.DEFAULT_TOL
    if not hasattr(args, "format"):
        args.format = "text"
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"moritak: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DocumentError as exc:
        axiom = getattr(exc, "axiom", None)
        label = f"axiom-violation ({axiom})" if axiom else exc.category
        print(f"moritak: {label} at {exc.path or '/'}: {exc.message}", file=sys.stderr)
        return EXIT_FAIL
    except MoritaError as exc:
        print(f"moritak: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
