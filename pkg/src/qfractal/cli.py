"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 size limit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .clt import convergence_table, kappa_of, parse_key, spectral_histogram
from .errors import InvalidInput, QFractalError
from .graphs import Family, FamilySpec, Protograph, WeightedGraph, block_from_dict, p_laplacian
from .ifs import IFSSpec, ifs_catalog, ifs_moment, ladder_moment
from .io import (CONVERGENCE_COLUMNS, MOMENT_COLUMNS, atomic_write, csv_text, dump_json,
                 load_graph, load_json)
from .qdecomp import (extract_jacobi, kappa_power, mixed_moment, quantum_components, stratify,
                      vacuum_moment)
from .scheme import scheme_report


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _parse_levels(text: str) -> List[int]:
    """``"2:6"`` (inclusive), ``"2:12:2"`` or ``"4,8,16"``."""
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            step = parts[2] if len(parts) == 3 else 1
            return list(range(parts[0], parts[1] + 1, step))
        return [int(x) for x in text.split(",") if x.strip()]
    except (ValueError, IndexError) as exc:
        raise InvalidInput(f"bad level range {text!r}") from exc


def _parse_keys(orders: Optional[str], words: Optional[str]) -> list:
    keys: list = []
    if orders:
        keys += [parse_key(int(x)) for x in orders.split(",") if x.strip()]
    if words:
        keys += [parse_key(x) for x in words.split(",") if x.strip()]
    if not keys:
        raise InvalidInput("give --orders and/or --words")
    return keys


def _parse_ifs(text: Optional[str]) -> Optional[IFSSpec]:
    if not text:
        return None
    name, _, q = text.partition(":")
    if name in ("boson", "fermion", "free"):
        return ifs_catalog(name)
    if name == "qdeformed":
        return ifs_catalog(name, q=float(q))
    return IFSSpec.from_dict(load_json(text))


def _family_spec(args) -> FamilySpec:
    kind = Family(args.family)
    block = proto = None
    if kind is Family.FRACTAL:
        if args.block:
            data = load_json(args.block)
            block = block_from_dict(data)
            if "protograph" in data:
                proto = Protograph(tuple(data["protograph"]["forward"]),
                                   tuple(data["protograph"]["backward"]))
        elif args.p is None:
            raise InvalidInput("fractal family needs --block or --p")
    return FamilySpec(kind, p=args.p, block=block, protograph=proto)


def cmd_build(args) -> int:
    kind = Family(args.family)
    if kind is Family.PLAPLACIAN:
        if args.p is None:
            raise InvalidInput("plap needs --p")
        size = args.size if args.size is not None else (3 ** args.levels + 1 if args.levels is not None else None)
        if size is None:
            raise InvalidInput("plap needs --size or --levels")
        g = p_laplacian(size, args.p).to_graph()
    elif kind is Family.FRACTAL:
        if args.levels is None:
            raise InvalidInput("fractal needs --levels")
        g = _family_spec(args).build(args.levels)
    else:
        if args.n is None:
            raise InvalidInput(f"{kind.value} needs --n")
        g = FamilySpec(kind).build(args.n)
    if args.root is not None:
        g = g.with_root(args.root)
    text = g.to_json() + "\n"
    _emit(text, args.out)
    return 0


def _decomposition(g: WeightedGraph, kappa_rule: str, depth: Optional[int]) -> dict:
    strata = stratify(g)
    gj = extract_jacobi(g, depth)
    kappa = kappa_of(g, kappa_rule)
    omega, alpha = gj.scaled(kappa)
    return {
        "n": g.n,
        "root": g.root,
        "layer_sizes": strata.sizes,
        "layers": [list(x) for x in strata.layers],
        "unreachable": list(strata.unreachable),
        "omega_bar": gj.omega.tolist(),
        "alpha_bar": gj.alpha.tolist(),
        "kappa": kappa,
        "omega_scaled": omega.tolist(),
        "alpha_scaled": alpha.tolist(),
    }


def cmd_decompose(args) -> int:
    g = load_graph(args.graph)
    _emit(dump_json(_decomposition(g, args.kappa, args.depth)), args.out)
    return 0


def cmd_moments(args) -> int:
    g = load_graph(args.graph)
    keys = _parse_keys(args.orders, args.words)
    kappa = kappa_of(g, args.kappa)
    limit = _parse_ifs(args.ifs)
    comps = None
    rows = []
    for key in keys:
        if isinstance(key, int):
            value = vacuum_moment(g, key) / kappa_power(kappa, key)
            ref = ifs_moment(limit, key) if limit else None
        else:
            comps = comps or quantum_components(g)
            value = mixed_moment(g, key, kappa, comps)
            ref = ladder_moment(limit, key) if limit else None
        rows.append({
            "level": args.level,
            "order_or_word": key,
            "graph_value": value,
            "ifs_value": "" if ref is None else ref,
            "abs_error": "" if ref is None else abs(value - ref),
        })
    _emit(csv_text(MOMENT_COLUMNS, rows), args.out)
    return 0


def cmd_clt(args) -> int:
    spec = _family_spec(args)
    levels = _parse_levels(args.levels)
    keys = _parse_keys(args.orders, args.words)
    limit = _parse_ifs(args.ifs)
    report = convergence_table(spec, levels, keys, args.kappa, limit, workers=args.workers)
    _emit(csv_text(CONVERGENCE_COLUMNS, report.csv_rows()), args.out)
    manifest = {
        "version": __version__,
        "family": spec.to_dict(),
        "levels": report.levels,
        "keys": [str(k) for k in keys],
        "kappa_rule": args.kappa,
        "limit_ifs": limit.to_dict() if limit else None,
        "seed": args.seed,
        "cauchy": {
            str(row.key): {
                "increments_nonincreasing": row.increments_nonincreasing,
                "monotone_from": row.monotone_from,
                "last_increment": row.increments[-1] if row.increments else None,
            }
            for row in report.rows
        },
    }
    manifest_path = args.manifest or (str(Path(args.out).with_suffix(".manifest.json")) if args.out else None)
    if manifest_path:
        dump_json(manifest, manifest_path)
    return 0


def cmd_scheme(args) -> int:
    g = load_graph(args.graph)
    report = scheme_report(g, thin=not args.no_thin)
    _emit(dump_json(report), args.out)
    return 0


def cmd_spectra(args) -> int:
    g = load_graph(args.graph)
    kappa = kappa_of(g, args.kappa)
    hist = spectral_histogram(g, kappa, args.bins, check_tol=args.tol)
    _emit(dump_json(dict(hist.to_dict(), kappa=kappa)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfractal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)

    def family_flags(p):
        p.add_argument("--family", required=True, choices=[f.value for f in Family])
        p.add_argument("--p", type=float)
        p.add_argument("--block", help="block JSON file")

    p = sub.add_parser("build", help="write a graph as canonical JSON")
    family_flags(p)
    p.add_argument("--n", type=int, help="N for cycle C_{2N+1}, vertices for path, d for hypercube")
    p.add_argument("--size", type=int, help="truncation size for plap")
    p.add_argument("--levels", type=int)
    p.add_argument("--root", type=int)
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("decompose", help="strata and Jacobi coefficients of a graph")
    p.add_argument("graph")
    p.add_argument("--depth", type=int)
    p.add_argument("--kappa", default="degree")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("moments", help="vacuum and mixed moments of a graph as CSV")
    p.add_argument("graph")
    p.add_argument("--orders")
    p.add_argument("--words")
    p.add_argument("--kappa", default="degree")
    p.add_argument("--ifs")
    p.add_argument("--level", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("clt", help="convergence table over a growing family")
    family_flags(p)
    p.add_argument("--levels", required=True, help="e.g. 2:6, 2:12:2 or 4,8,16")
    p.add_argument("--orders")
    p.add_argument("--words")
    p.add_argument("--kappa", default="degree")
    p.add_argument("--ifs", help="boson|fermion|free|qdeformed:q or an IFS JSON file")
    p.add_argument("--manifest")
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_clt)

    p = sub.add_parser("scheme", help="association-scheme report as JSON")
    p.add_argument("graph")
    p.add_argument("--no-thin", action="store_true", help="skip the T-algebra check")
    common(p)
    p.set_defaults(func=cmd_scheme)

    p = sub.add_parser("spectra", help="root spectral histogram as JSON")
    p.add_argument("graph")
    p.add_argument("--kappa", default="degree")
    p.add_argument("--bins", type=int, default=20)
    common(p)
    p.set_defaults(func=cmd_spectra)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QFractalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InvalidInput.exit_code


if __name__ == "__main__":
    sys.exit(main())
