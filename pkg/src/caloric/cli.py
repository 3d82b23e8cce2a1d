"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 validation, 3 internal inconsistency,
4 numerical tolerance breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import __version__
from .energy import (
    CylinderSpec,
    PolynomialField,
    caccioppoli_ratio,
    spectral_ancient_solutions,
    volume_growth_fit,
)
from .errors import CaloricError, InternalInconsistency, NotCaloric, SpectralFailure
from .graph import (
    WeightedGraph,
    cutoff,
    divergence_residual,
    gamma,
    green_identity_residual,
    grid_graph,
    load_graph,
    path_graph,
    product_rule_residual,
    random_exact_function,
    random_graph,
    random_tree,
    star_graph,
)
from .lattice import GeneratingSet, load_generating_set, monomial_basis
from .poly import parse_poly
from .spaces import (
    caloric_basis,
    caloric_dimension_formula,
    harmonic_basis,
    harmonic_dimension_formula,
    heat_matrix_rank,
    poisson_solve,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INTERNAL, EXIT_NUMERIC = range(5)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CALORIC_THREADS", "1")))
    except ValueError:
        return 1


def _pmap(fn: Callable, items: Sequence) -> list:
    workers = min(_threads(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _generators(args) -> GeneratingSet:
    if getattr(args, "generators", None):
        return load_generating_set(args.generators, args.n)
    return GeneratingSet.standard(args.n)


def _emit(doc: dict, rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        json.dump(doc, out, indent=2)
        out.write("\n")
        return
    if not rows:
        return
    writer = csv.DictWriter(out, fieldnames=list(rows[0]), delimiter="\t", lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _tsv_cell(v) for k, v in r.items()})


def _tsv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return json.dumps(v)
    return v


def read_tsv(text: str) -> list[dict[str, str]]:
    """Parse TSV output back into rows of strings."""
    return list(csv.DictReader(io.StringIO(text), delimiter="\t"))


# dims


def _dims_row(job) -> dict:
    S, k = job
    n = S.n
    cal = caloric_basis(S, k).dimension
    har = harmonic_basis(S, k).dimension
    row = {
        "k": k,
        "dim_P": len(monomial_basis(n, k, False)),
        "dim_P_hat": len(monomial_basis(n, k, True)),
        "dim_harmonic": har,
        "harmonic_formula": harmonic_dimension_formula(n, k),
        "dim_caloric": cal,
        "formula": caloric_dimension_formula(n, k),
        "heat_rank": heat_matrix_rank(S, k),
        "dim_P_hat_minus_2": len(monomial_basis(n, k - 2, True)),
    }
    row["match"] = row["dim_caloric"] == row["formula"]
    row["surjective"] = row["heat_rank"] == row["dim_P_hat_minus_2"]
    if k >= 2 and k % 2 == 0:
        bound = (k // 2 + 1) * har
        row["bound"] = bound
        row["bound_satisfied"] = cal <= bound
    else:
        row["bound"] = None
        row["bound_satisfied"] = None
    return row


def cmd_dims(args, out) -> int:
    if args.n < 1 or args.k_max < 0:
        raise ValueError("need --n >= 1 and --k-max >= 0")
    S = _generators(args)
    rows = _pmap(_dims_row, [(S, k) for k in range(args.k_max + 1)])
    doc = {"command": "dims", "n": S.n, "generators": [list(g) for g in S.generators], "rows": rows}
    _emit(doc, rows, args.output, out)
    ok = all(r["match"] and r["surjective"] and r["bound_satisfied"] is not False for r in rows)
    return EXIT_OK if ok else EXIT_INTERNAL


# basis


def cmd_basis(args, out) -> int:
    S = _generators(args)
    if args.k < 0:
        raise ValueError("--k must be nonnegative")
    basis = caloric_basis(S, args.k) if args.kind == "caloric" else harmonic_basis(S, args.k)
    doc = basis.to_dict()
    rows = [{"index": i, "polynomial": p} for i, p in enumerate(doc["polynomials"])]
    _emit(doc, rows, args.output, out)
    return EXIT_OK


# poisson


def cmd_poisson(args, out) -> int:
    S = _generators(args)
    g = parse_poly(args.g, args.n)
    u = poisson_solve(S, g, top_layer=Fraction(args.top_layer))
    doc = {"command": "poisson", "n": S.n, "g": str(g), "u": str(u), "verified": True}
    if args.output == "json":
        _emit(doc, [], "json", out)
    else:
        out.write(f"{u}\n")
    return EXIT_OK


# caccioppoli


def _radius(text: str) -> Fraction:
    try:
        R = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid radius {text!r}") from None
    return R


def _lattice_report(job):
    field, center, R, dilation = job
    return caccioppoli_ratio(field, CylinderSpec(center, R, dilation))


def cmd_caccioppoli(args, out) -> int:
    for R in args.radii:
        if R < 1:
            raise ValueError(f"radius {R} is below 1; the inequality needs R >= 1")
    if args.u is not None:
        if args.n is None or args.box is None:
            raise ValueError("--u needs --n and --box")
        S = _generators(args)
        u = parse_poly(args.u, args.n)
        field = PolynomialField(S, u, args.box)
        if not field.is_caloric():
            raise NotCaloric(f"{u} does not solve the heat equation on the given lattice")
        center = tuple(int(v) for v in args.center.split(",")) if args.center else (0,) * S.n
        source = {"u": str(u), "n": S.n, "box": args.box, "generators": [list(g) for g in S.generators]}
    else:
        if args.graph is None or args.spectral is None:
            raise ValueError("give either --u or both --graph and --spectral")
        G = load_graph(args.graph)
        fields = spectral_ancient_solutions(G, args.spectral + 1)
        field = fields[args.spectral]
        center = args.center if args.center is not None else G.vertices[0]
        source = {"graph": str(args.graph), "spectral_index": args.spectral, "theta": field.thetas[0]}
    reports = _pmap(_lattice_report, [(field, center, R, args.dilation) for R in args.radii])
    rows = [r.to_dict() for r in reports]
    doc = {
        "command": "caccioppoli",
        "source": source,
        "center": list(center) if isinstance(center, tuple) else center,
        "rows": rows,
        "max_ratio": max((r["ratio_float"] for r in rows), default=None),
    }
    _emit(doc, rows, args.output, out)
    return EXIT_OK


# checks


def _graph_from_args(args) -> WeightedGraph:
    if args.graph:
        return load_graph(args.graph)
    rng = random.Random(args.seed)
    size = args.size
    if args.family == "path":
        return path_graph(size, [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(size - 1)])
    if args.family == "grid":
        return grid_graph(size, size)
    if args.family == "tree":
        return random_tree(size, rng)
    if args.family == "random":
        return random_graph(size, 0.3, rng)
    if args.family == "star":
        return star_graph(size)
    raise ValueError("give --graph or --family")


def run_checks(G: WeightedGraph, seed: int, trials: int = 20) -> list[dict]:
    """Exact identity checks on G; every residual must be exactly zero."""
    rng = random.Random(seed)
    interior = [i for i in range(len(G)) if i not in G.boundary]
    rows = []

    worst = Fraction(0)
    for _ in range(trials):
        f = random_exact_function(G, rng)
        g = random_exact_function(G, rng, support=interior)
        worst = max(worst, abs(green_identity_residual(G, f, g)))
    rows.append({"check": "green", "instances": trials, "max_abs_residual": str(worst), "pass": worst == 0})

    worst = Fraction(0)
    count = 0
    for _ in range(max(1, trials // 4)):
        f = random_exact_function(G, rng)
        g = random_exact_function(G, rng)
        for i, j, _w in G.edges():
            for x, y in ((i, j), (j, i)):
                worst = max(worst, abs(product_rule_residual(G, f, g, x, y)))
                count += 1
    rows.append({"check": "product_rule", "instances": count, "max_abs_residual": str(worst), "pass": worst == 0})

    ok = True
    for _ in range(trials):
        ok &= all(v >= 0 for v in gamma(G, random_exact_function(G, rng)))
    c = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    ok &= all(v == 0 for v in gamma(G, [c] * len(G)))
    rows.append({"check": "gamma_nonnegative", "instances": trials + 1, "max_abs_residual": "0", "pass": ok})

    ok = True
    radii = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))
    for R in radii:
        try:
            eta = cutoff(G, rng.randrange(len(G)), R)
        except InternalInconsistency:
            ok = False
            continue
        ok &= all(0 <= v <= 1 for v in eta)
    rows.append({"check": "cutoff_bounds", "instances": len(radii), "max_abs_residual": "0", "pass": ok})

    if not G.boundary:
        worst = Fraction(0)
        for _ in range(trials):
            worst = max(worst, abs(divergence_residual(G, random_exact_function(G, rng))))
        rows.append({"check": "divergence", "instances": trials, "max_abs_residual": str(worst), "pass": worst == 0})
    return rows


def cmd_checks(args, out) -> int:
    G = _graph_from_args(args)
    rows = run_checks(G, args.seed)
    doc = {
        "command": "checks",
        "vertices": len(G),
        "edges": G.edge_count,
        "seed": args.seed,
        "rows": rows,
        "all_pass": all(r["pass"] for r in rows),
    }
    _emit(doc, rows, args.output, out)
    return EXIT_OK if doc["all_pass"] else EXIT_INTERNAL


# volume


def cmd_volume(args, out) -> int:
    G = load_graph(args.graph)
    fit = volume_growth_fit(G, args.x0, args.r_max)
    rows = [{"R": R, "measure": str(m)} for R, m in fit.table]
    doc = {"command": "volume", "x0": args.x0, "alpha": fit.alpha, "rows": rows}
    _emit(doc, rows, args.output, out)
    if args.output == "tsv":
        out.write(f"# alpha\t{fit.alpha!r}\n")
    return EXIT_OK


# wiring


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="caloric", description="Harmonic and caloric polynomial spaces on lattices and graphs.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n_required=True):
        sp.add_argument("--n", type=int, required=n_required, help="lattice dimension")
        sp.add_argument("--generators", help="generating-set file, one comma-separated vector per line")
        sp.add_argument("--output", choices=("json", "tsv"), default="json")

    sp = sub.add_parser("dims", help="dimension table for k = 0..k_max")
    common(sp)
    sp.add_argument("--k-max", type=int, required=True)
    sp.set_defaults(func=cmd_dims)

    sp = sub.add_parser("basis", help="exact basis of a harmonic or caloric space")
    common(sp)
    sp.add_argument("--kind", choices=("harmonic", "caloric"), required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_basis)

    sp = sub.add_parser("poisson", help="solve (Delta - d/dt) u = g")
    common(sp)
    sp.add_argument("--g", required=True, help="right-hand side, e.g. 'x1^2 t'")
    sp.add_argument("--top-layer", default="0", help="constant used for the top time layer")
    sp.set_defaults(func=cmd_poisson, output="tsv")

    sp = sub.add_parser("caccioppoli", help="energy ratios on parabolic cylinders")
    common(sp, n_required=False)
    sp.add_argument("--u", help="caloric polynomial on the lattice")
    sp.add_argument("--box", type=int, help="half-width of the lattice window")
    sp.add_argument("--graph", help="graph file for spectral solutions")
    sp.add_argument("--spectral", type=int, help="index of the eigenmode (0 = constant)")
    sp.add_argument("--center", help="base vertex: comma-separated lattice point or graph vertex id")
    sp.add_argument("--radii", type=_radius, nargs="+", required=True)
    sp.add_argument("--dilation", type=int, default=36)
    sp.set_defaults(func=cmd_caccioppoli)

    sp = sub.add_parser("checks", help="exact Green / product-rule / Gamma / cutoff checks")
    sp.add_argument("--graph")
    sp.add_argument("--family", choices=("path", "grid", "tree", "random", "star"))
    sp.add_argument("--size", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", choices=("json", "tsv"), default="json")
    sp.set_defaults(func=cmd_checks)

    sp = sub.add_parser("volume", help="measure of balls and fitted growth exponent")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--x0", required=True)
    sp.add_argument("--r-max", type=int, default=32)
    sp.add_argument("--output", choices=("json", "tsv"), default="json")
    sp.set_defaults(func=cmd_volume)
    return p


def main(argv: Iterable[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    try:
        return args.func(args, out)
    except InternalInconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except SpectralFailure as exc:
        print(f"numerical tolerance breach: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CaloricError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
