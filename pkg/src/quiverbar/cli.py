"""Command line front end."""
from __future__ import annotations

import argparse
import sys

from .errors import NotBarcodeForm, QuiverBarError

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 1, 2


class CheckFailed(Exception):
    """An internal consistency check did not hold."""


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quiverbar", description="Persistent and zigzag barcodes via quiver factorizations.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, svg=True):
        sp.add_argument("-o", "--output", help="write text output here instead of stdout")
        sp.add_argument("--field", help="override the field tag of the input (F2, F<p>, Q)")
        if svg:
            sp.add_argument("--svg", help="also write an SVG barcode plot")

    def parallel_flags(sp):
        sp.add_argument("--parallel", action="store_true", help="divide-and-conquer reduction")
        sp.add_argument("--leaf-size", type=int, help="largest sub-quiver solved directly (default 4)")
        sp.add_argument("--tasks", type=int, help="worker count (default $QUIVERBAR_TASKS or CPU count)")

    sp = sub.add_parser("factor", help="factor a matrix and check the product")
    sp.add_argument("input")
    sp.add_argument("--kind", default="leup", choices=["leup", "pleu", "uelp", "puel", "lqu"])
    common(sp, svg=False)

    sp = sub.add_parser("homology", help="betti numbers of a complex")
    sp.add_argument("input")
    sp.add_argument("--max-dim", type=int)
    common(sp, svg=False)

    sp = sub.add_parser("persist", help="barcode of a filtration")
    sp.add_argument("input")
    sp.add_argument("--via", default="reduction", choices=["reduction", "quiver", "telescope"])
    sp.add_argument("--max-dim", type=int)
    sp.add_argument("--values", action="store_true", help="report filtration values instead of indices")
    sp.add_argument("--drop-zero", action="store_true", help="omit bars with birth equal to death")
    parallel_flags(sp)
    common(sp)

    sp = sub.add_parser("zigzag", help="barcode of a type-A diagram of complexes")
    sp.add_argument("input")
    sp.add_argument("--dims", help="comma separated homology dimensions (default 0..max-dim)")
    sp.add_argument("--max-dim", type=int)
    parallel_flags(sp)
    common(sp)

    sp = sub.add_parser("quiver", help="barcode of a type-A quiver representation")
    sp.add_argument("input")
    sp.add_argument("--initial", choices=["right", "left"], help="direction of the first sweep")
    sp.add_argument("--backend", choices=["thread", "process"], help="worker kind for --parallel")
    parallel_flags(sp)
    common(sp)
    return p


def _validate(args, parser):
    sub = args.subcommand
    if sub in ("persist", "zigzag", "quiver") and not args.parallel:
        for flag in ("leaf_size", "tasks"):
            if getattr(args, flag) is not None:
                parser.error(f"--{flag.replace('_', '-')} needs --parallel")
        if sub == "quiver" and args.backend is not None:
            parser.error("--backend needs --parallel")
    if sub == "persist" and args.parallel and args.via != "quiver":
        parser.error("--parallel only applies to --via quiver")
    if getattr(args, "leaf_size", None) is not None and args.leaf_size < 1:
        parser.error("--leaf-size must be at least 1")
    if getattr(args, "tasks", None) is not None and args.tasks < 1:
        parser.error("--tasks must be at least 1")
    if sub == "zigzag" and args.dims is not None and args.max_dim is not None:
        parser.error("give --dims or --max-dim, not both")
    if getattr(args, "max_dim", None) is not None and args.max_dim < 0:
        parser.error("--max-dim must be nonnegative")


def _run_factor(args) -> str:
    from .factor import KIND_ORDER, lqu, variant_factorization
    from .sparse import format_matrix, read_matrix

    A = read_matrix(args.input, args.field)
    if args.kind == "lqu":
        fac = lqu(A)
        names, factors = ("L", "Q", "U"), (fac.L, fac.Q, fac.U)
    else:
        fac = variant_factorization(A, args.kind.upper())
        names, factors = KIND_ORDER[fac.kind], fac.factors
    out = []
    for name, M in zip(names, factors):
        out.append(f"factor {name}")
        out.append(format_matrix(M).rstrip("\n"))
    ok = fac.product() == A
    out.append(f"check: {'ok' if ok else 'FAIL'}")
    text = "\n".join(out) + "\n"
    if not ok:
        raise CheckFailed(text)
    return text


def _run_homology(args) -> str:
    from .complexes import read_filtration
    from .homology import betti_numbers

    fc = read_filtration(args.input, args.field)
    betti = betti_numbers(fc.complex, args.max_dim)
    return "".join(f"betti {k} {b}\n" for k, b in enumerate(betti))


def _run_persist(args):
    from .complexes import read_filtration
    from .pipelines import filtration_barcode, to_values

    fc = read_filtration(args.input, args.field)
    kw = {}
    if args.via == "quiver":
        kw = dict(parallel=args.parallel, leaf_size=args.leaf_size or 4, tasks=args.tasks)
    bc = filtration_barcode(fc, args.via, args.max_dim, **kw)
    if args.values:
        bc = to_values(fc, bc)
    if args.drop_zero:
        bc = bc.without_empty()
    return bc


def _run_zigzag(args):
    from .diagram import read_diagram, zigzag_barcode

    d = read_diagram(args.input, args.field)
    if args.dims is not None:
        try:
            dims = sorted({int(x) for x in args.dims.split(",") if x.strip()})
        except ValueError:
            raise QuiverBarError(f"bad --dims value {args.dims!r}") from None
    else:
        top = args.max_dim
        if top is None:
            top = max((cx.dim for cx in d.nodes.values()), default=0)
        dims = list(range(max(top, 0) + 1))
    return zigzag_barcode(d, dims, tasks=args.tasks, parallel=args.parallel, leaf_size=args.leaf_size or 4)


def _run_quiver(args):
    from .quiver import barcode_form_parallel, barcode_form_sequential, extract_barcode, read_quiver

    q = read_quiver(args.input, args.field)
    if args.parallel:
        bf = barcode_form_parallel(
            q, leaf_size=args.leaf_size or 4, tasks=args.tasks,
            backend=args.backend or "thread", orientation=args.initial or "right",
        )
    else:
        bf = barcode_form_sequential(q, initial=args.initial or "right", backward=False)
    return extract_barcode(bf, 0)


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
        _validate(args, parser)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    runners = {
        "factor": _run_factor,
        "homology": _run_homology,
        "persist": _run_persist,
        "zigzag": _run_zigzag,
        "quiver": _run_quiver,
    }
    try:
        result = runners[args.subcommand](args)
    except CheckFailed as exc:
        sys.stdout.write(str(exc))
        print("error: reconstruction check failed", file=sys.stderr)
        return EXIT_CHECK
    except NotBarcodeForm as exc:
        print(f"error: internal check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (QuiverBarError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if isinstance(result, str):
        text = result
    else:
        text = result.to_text()
        if getattr(args, "svg", None):
            with open(args.svg, "w", encoding="utf-8") as fh:
                fh.write(result.to_svg())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
