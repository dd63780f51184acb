"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 resource cap
exceeded, 4 verification mismatch.

Indexing conventions differ by command, deliberately:

* ``term``, ``seq`` and ``reduce`` take the dense index n;
* ``sparse``, ``chains`` and ``structure`` walk the all-ones family and
  take the exponent t, meaning the power set at index 2**t - 1.  So
  ``chains --k 8 --n 1`` describes the base set itself and
  ``structure --k 8 --n 2`` the 48-element power at index 3.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .chains import (
    chain_as_dict,
    chains_to_text,
    decompose,
    structural_vector,
    verify_transfer,
)
from .core import DEFAULT_ELEMENT_CAP, power_card_sequence, sym_power
from .errors import (
    BFileFormatError,
    BFileParseError,
    CoverageError,
    DomainError,
    SizeLimitError,
    TransportError,
)
from .oeis import SEQUENCE_IDS, crosscheck, fetch_bfile, parse_bfile
from .recurrence import matrix_term_range, reduce_term, sparse_term, term


def _print_csv(header: list[str], rows: list[list]) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _seq_values(k: int, limit: int, method: str, max_elements: int) -> list[int]:
    if method == "brute" or (method == "auto" and k > 8):
        return power_card_sequence(k, limit, max_elements=max_elements)
    if k == 8 and method in ("auto", "matrix"):
        try:
            return [int(v) for v in matrix_term_range(limit)]
        except DomainError:
            pass  # overflow guard tripped; fall back to per-index calls
    if k == 8 and method == "reduce":
        cache: dict[int, int] = {}
        return [reduce_term(n, cache=cache) for n in range(limit + 1)]
    return [term(k, n, method, max_elements=max_elements) for n in range(limit + 1)]


def cmd_term(args) -> int:
    value = term(args.k, args.n, args.method, max_elements=args.max_elements)
    if args.format == "plain":
        print(value)
    elif args.format == "csv":
        _print_csv(["k", "n", "value"], [[args.k, args.n, value]])
    elif args.format == "json":
        print(json.dumps({"k": args.k, "n": args.n, "method": args.method, "value": value}))
    else:  # bfile
        print(f"{args.n} {value}")
    return 0


def cmd_seq(args) -> int:
    values = _seq_values(args.k, args.limit, args.method, args.max_elements)
    if args.format == "plain":
        print(" ".join(str(v) for v in values))
    elif args.format == "csv":
        _print_csv(["n", "value"], [[n, v] for n, v in enumerate(values)])
    elif args.format == "json":
        print(json.dumps({"k": args.k, "method": args.method, "values": values}))
    else:  # bfile
        for n, v in enumerate(values):
            print(f"{n} {v}")
    return 0


def cmd_sparse(args) -> int:
    values = [sparse_term(args.k, t) for t in range(args.count)]
    if args.format == "plain":
        print(" ".join(str(v) for v in values))
    elif args.format == "csv":
        _print_csv(["t", "value"], [[t, v] for t, v in enumerate(values)])
    elif args.format == "json":
        print(json.dumps({"k": args.k, "values": values}))
    else:  # bfile
        for t, v in enumerate(values):
            print(f"{t} {v}")
    return 0


def _power_at_exponent(k: int, t: int, max_elements: int):
    if t < 0:
        raise DomainError(f"exponent must be >= 0, got {t}")
    return sym_power(k, (1 << t) - 1, max_elements=max_elements)


def cmd_chains(args) -> int:
    chains = decompose(_power_at_exponent(args.k, args.n, args.max_elements))
    if args.format == "plain":
        print(chains_to_text(chains))
    elif args.format == "csv":
        _print_csv(
            ["kind", "base", "length"],
            [[c.kind, str(c.base_value), c.length] for c in chains],
        )
    else:  # json
        print(json.dumps([chain_as_dict(c) for c in chains]))
    return 0


def cmd_structure(args) -> int:
    sv = structural_vector(
        decompose(_power_at_exponent(args.k, args.n, args.max_elements)), args.k
    )
    if args.format == "plain":
        print(sv)
    elif args.format == "csv":
        names = ["b", "c", "u", "v", "r"] if args.k == 8 else ["b", "c", "r"]
        _print_csv(names, [list(sv.vector())])
    else:  # json
        print(
            json.dumps(
                {
                    "k": args.k,
                    "t": args.n,
                    "b": sv.b,
                    "c": sv.c,
                    "u": sv.u,
                    "v": sv.v,
                    "r": sv.r,
                }
            )
        )
    return 0


def cmd_verify(args) -> int:
    report = verify_transfer(args.k, args.max_n, max_elements=args.max_elements)
    if args.format == "plain":
        print(report.summary())
    else:  # json
        print(
            json.dumps(
                {
                    "k": report.k,
                    "max_n": report.n_max,
                    "ok": report.ok,
                    "vectors": [list(v.vector()) for v in report.vectors],
                    "failures": [f.message() for f in report.failures],
                }
            )
        )
    return 0 if report.ok else 4


def cmd_reduce(args) -> int:
    if args.trace:
        value, trace = reduce_term(
            args.n, trace=True, optional_rules=args.optional_rules
        )
    else:
        value = reduce_term(args.n, optional_rules=args.optional_rules)
        trace = None
    if args.format == "plain":
        if trace is not None:
            print(trace.to_text())
        print(f"value {value}")
    else:  # json
        payload = {
            "n": args.n,
            "value": value,
            "optional_rules": args.optional_rules,
        }
        if trace is not None:
            payload["trace"] = trace.as_dict()
        print(json.dumps(payload))
    return 0


def cmd_oeis(args) -> int:
    if args.bfile is not None:
        try:
            text = open(args.bfile, "r", encoding="utf-8").read()
        except OSError as exc:
            raise DomainError(f"cannot read b-file {args.bfile}: {exc}") from exc
        bfile = parse_bfile(text)
    else:
        bfile = fetch_bfile(
            SEQUENCE_IDS.get(args.k, "A000000"),
            allow_network=True,
            cache_dir=args.cache_dir,
        )
    limit = args.limit
    if limit is None:
        limit = bfile.contiguous_limit_from(0)
        if limit is None:
            raise CoverageError("b-file has no entry for index 0")
    report = crosscheck(args.k, bfile, limit)
    if args.format == "plain":
        print(report.summary())
    else:  # json
        print(
            json.dumps(
                {
                    "k": report.k,
                    "sequence_id": report.sequence_id or SEQUENCE_IDS.get(args.k),
                    "limit": report.limit,
                    "ok": report.ok,
                    "mismatch": report.mismatch,
                }
            )
        )
    return 0 if report.ok else 4


def _add_format(parser, choices=("plain", "csv", "json", "bfile")) -> None:
    parser.add_argument(
        "--format", choices=list(choices), default="plain", help="output format"
    )


def _add_cap(parser) -> None:
    parser.add_argument(
        "--max-elements",
        type=int,
        default=DEFAULT_ELEMENT_CAP,
        dest="max_elements",
        help="abort set construction beyond this many elements (exit 3)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symnabla",
        description=(
            "Cardinalities and chain structure of symmetric powers of {1..k} "
            "under the symmetric-difference product."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("term", help="one sequence term")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="dense index n")
    p.add_argument(
        "--method",
        choices=["auto", "brute", "fast", "matrix", "reduce"],
        default="auto",
    )
    _add_format(p)
    _add_cap(p)
    p.set_defaults(func=cmd_term)

    p = sub.add_parser("seq", help="terms 0..limit")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--limit", type=int, required=True, help="last dense index, inclusive")
    p.add_argument(
        "--method",
        choices=["auto", "brute", "fast", "matrix", "reduce"],
        default="auto",
    )
    _add_format(p)
    _add_cap(p)
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser(
        "sparse", help="terms of the all-ones family (indices 2**t - 1)"
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--count", type=int, required=True, help="number of terms, from t=0")
    _add_format(p)
    p.set_defaults(func=cmd_sparse)

    p = sub.add_parser(
        "chains",
        help="chain decomposition of the power at index 2**t - 1 "
        "(--n is the exponent t, not the dense index)",
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True, metavar="T", help="exponent t")
    _add_format(p, ("plain", "csv", "json"))
    _add_cap(p)
    p.set_defaults(func=cmd_chains)

    p = sub.add_parser(
        "structure",
        help="structural vector of the power at index 2**t - 1 "
        "(--n is the exponent t, not the dense index)",
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True, metavar="T", help="exponent t")
    _add_format(p, ("plain", "csv", "json"))
    _add_cap(p)
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser(
        "verify", help="replay the transfer step against the brute oracle"
    )
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-n", type=int, required=True, dest="max_n")
    _add_format(p, ("plain", "json"))
    _add_cap(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="k=8 term by rewriting, optionally traced")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trace", action="store_true", help="print the derivation")
    p.add_argument(
        "--optional-rules",
        action="store_true",
        help="enable the shortcut rewrites (values never change)",
    )
    _add_format(p, ("plain", "json"))
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("oeis", help="cross-check terms against an OEIS b-file")
    p.add_argument("--k", type=int, required=True, help="1..4")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--bfile", help="path to a local b-file")
    src.add_argument(
        "--fetch",
        action="store_true",
        help="fetch from oeis.org (cached under $SYMNABLA_CACHE)",
    )
    p.add_argument(
        "--limit",
        type=int,
        default=None,
        help="last index to compare (default: the b-file's contiguous coverage)",
    )
    p.add_argument("--cache-dir", default=None)
    _add_format(p, ("plain", "json"))
    p.set_defaults(func=cmd_oeis)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (
        DomainError,
        BFileParseError,
        BFileFormatError,
        CoverageError,
        TransportError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
