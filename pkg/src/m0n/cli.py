"""Command-line surface: exact volumes, intersection numbers, divisor
tables, tensor dumps, cache persistence, and the published-table selfcheck.

Exit codes: 0 success, 1 usage or input error, 2 mathematical disagreement
(formulas differing, or a selfcheck diff).  A 2 always means a software bug,
since the quantities compared are theorems; surfacing it loudly is the
point.  All rational output is exact "p/q" text; JSON mode never emits
floats for mathematical values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .combinat import (
    BoundaryPartition,
    enumerate_boundary_partitions,
    format_rational,
    make_weight_vector,
    parse_weights,
)
from .divisors import (
    QDivisor,
    canonical_divisor,
    chern_divisor,
    d_mu,
    kawamata_divisor,
    psi_class,
    weighted_divisor,
)
from .errors import AdmissibilityWarning, CacheFormatError, EngineError
from .intersect import MemoStore, default_memo, product_number
from .selfcheck import iter_multisets, run_selfcheck
from .volume import cross_check

CACHE_DIR_ENV = "M0N_CACHE_DIR"
CACHE_VERSION = 1
TENSOR_DEFAULT_MAX_N = 7

DIVISOR_KINDS = {
    "canonical": lambda mu, n: canonical_divisor(n),
    "dmu": lambda mu, n: d_mu(mu),
    "weighted": lambda mu, n: weighted_divisor(mu),
    "chern": lambda mu, n: chern_divisor(mu),
    "kawamata": lambda mu, n: kawamata_divisor(mu),
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1 (2 is reserved
    for mathematical disagreement)."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def save_cache(path: str | Path, n: int, products: dict[tuple, Fraction]) -> None:
    """Write the top products for one n as a versioned JSON cache file."""
    entries = []
    for key, value in sorted(products.items()):
        if key[0] != n:
            continue
        entries.append({"key": list(key[1:]), "value": format_rational(value)})
    payload = {"version": CACHE_VERSION, "n": n, "top_products": entries}
    Path(path).write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def load_cache(path: str | Path) -> tuple[int, dict[tuple, Fraction]]:
    """Read a cache file back; validates version, keys, and exact values."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheFormatError(f"cannot read cache {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("version") != CACHE_VERSION:
        raise CacheFormatError(f"cache {path}: unsupported version {payload.get('version')!r}")
    n = payload.get("n")
    if not isinstance(n, int):
        raise CacheFormatError(f"cache {path}: missing n")
    products: dict[tuple, Fraction] = {}
    for entry in payload.get("top_products", []):
        key = entry.get("key")
        raw = entry.get("value")
        if not isinstance(key, list) or len(key) != n - 3:
            raise CacheFormatError(f"cache {path}: bad key {key!r}")
        literals = []
        for lit in key:
            part = BoundaryPartition.parse(lit, n)
            if part.literal() != lit:
                raise CacheFormatError(f"cache {path}: non-canonical literal {lit!r}")
            literals.append(lit)
        if literals != sorted(literals):
            raise CacheFormatError(f"cache {path}: unsorted key {key!r}")
        products[(n, *literals)] = Fraction(raw)
    return n, products


def _cache_file_for(n: int) -> Path | None:
    base = os.environ.get(CACHE_DIR_ENV)
    if not base:
        return None
    return Path(base) / f"top_products_n{n}.json"


def _preload_cache(memo: MemoStore, n: int) -> None:
    path = _cache_file_for(n)
    if path is None or not path.exists():
        return
    _, products = load_cache(path)
    for key, value in products.items():
        memo.put_product(key, value)


def _persist_cache(memo: MemoStore, n: int) -> None:
    path = _cache_file_for(n)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    save_cache(path, n, memo.products)


def _weights_or_exit(text: str, strict: bool):
    weights = parse_weights(text)
    return make_weight_vector(len(weights), weights, strict=strict)


def cmd_volume(args: argparse.Namespace) -> int:
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AdmissibilityWarning)
            mu = _weights_or_exit(args.weights, args.strict)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except (EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    memo = default_memo()
    _preload_cache(memo, mu.n)
    wanted = None if args.formula == "all" else [args.formula]
    try:
        report = cross_check(mu, memo, formulas=wanted)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _persist_cache(memo, mu.n)
    if args.json:
        print(json.dumps(report.to_json(), indent=1))
    else:
        for name, value in sorted(report.results.items()):
            print(f"{name:>20}: {format_rational(value)}")
        for wall in report.walls:
            print(f"wall: weights of {wall!r} sum to 1", file=sys.stderr)
        if len(report.results) > 1:
            print(f"{'agree' if report.agree else 'DISAGREE':>20}")
    return 0 if report.agree else 2


def cmd_intersect(args: argparse.Namespace) -> int:
    try:
        literals = [tok.strip() for tok in args.divisors.split(";")]
        parts = [BoundaryPartition.parse(lit, args.n) for lit in literals]
        memo = default_memo()
        _preload_cache(memo, args.n)
        value = product_number(parts, args.n, memo)
    except (EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _persist_cache(memo, args.n)
    print(format_rational(value))
    return 0


def cmd_psi(args: argparse.Namespace) -> int:
    try:
        if args.ref:
            j, k = (int(tok) for tok in args.ref.split(","))
        else:
            picks = [x for x in range(1, args.n + 1) if x != args.index][:2]
            j, k = picks
        div = psi_class(args.index, j, k, args.n)
    except (EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print_divisor(div, args.json, {"kind": "psi", "index": args.index, "ref": [j, k]})
    return 0


def cmd_divisor(args: argparse.Namespace) -> int:
    try:
        if args.kind == "canonical":
            if args.weights:
                mu = _weights_or_exit(args.weights, args.strict)
                n = mu.n
            else:
                n = args.n
                if n is None:
                    raise ValueError("canonical divisor needs --n or --weights")
            div = canonical_divisor(n)
        else:
            if not args.weights:
                raise ValueError(f"divisor kind {args.kind!r} needs --weights")
            mu = _weights_or_exit(args.weights, args.strict)
            div = DIVISOR_KINDS[args.kind](mu, mu.n)
    except (EngineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _print_divisor(div, args.json, {"kind": args.kind})
    return 0


def _print_divisor(div: QDivisor, as_json: bool, meta: dict) -> None:
    if as_json:
        payload = dict(meta)
        payload["n"] = div.n
        payload["coefficients"] = [
            {"partition": part.literal(), "value": format_rational(coeff)}
            for part, coeff in div
        ]
        print(json.dumps(payload, indent=1))
        return
    if not len(div):
        print("0")
        return
    width = max(len(part.literal()) for part, _ in div)
    for part, coeff in div:
        print(f"D[{part.literal():<{width}}]  {format_rational(coeff)}")


def cmd_tensor(args: argparse.Namespace) -> int:
    if args.n > TENSOR_DEFAULT_MAX_N and not args.force:
        print(
            f"error: full tensor at n={args.n} is combinatorially large; "
            "pass --force to run anyway",
            file=sys.stderr,
        )
        return 1
    memo = default_memo()
    _preload_cache(memo, args.n)
    try:
        products: dict[tuple, Fraction] = {}
        for multiset in iter_multisets(args.n):
            key = MemoStore.product_key(args.n, multiset)
            products[key] = product_number(list(multiset), args.n, memo)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    save_cache(args.out, args.n, products)
    _persist_cache(memo, args.n)
    print(f"wrote {len(products)} products to {args.out}")
    return 0


def cmd_selfcheck(args: argparse.Namespace) -> int:
    memo: MemoStore | None
    if args.no_memo:
        memo = None
    else:
        memo = default_memo()
        _preload_cache(memo, 5)
        _preload_cache(memo, 6)
        if args.cache:
            try:
                _, products = load_cache(args.cache)
            except CacheFormatError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return 1
            for key, value in products.items():
                memo.put_product(key, value)
    result = run_selfcheck(memo)
    if memo is not None:
        _persist_cache(memo, 5)
        _persist_cache(memo, 6)
    if args.json:
        payload = {
            "ok": result.ok,
            "sections": {
                sec: {"ok": good, "total": total}
                for sec, (good, total) in result.section_counts().items()
            },
            "failures": [
                {
                    "section": row.section,
                    "label": row.label,
                    "got": format_rational(row.got),
                    "want": format_rational(row.want),
                }
                for row in result.failures()
            ],
        }
        print(json.dumps(payload, indent=1))
    else:
        for sec, (good, total) in result.section_counts().items():
            print(f"{sec}: {good}/{total} match")
        for row in result.failures():
            print(
                f"DIFF {row.section} {row.label}: got {format_rational(row.got)}, "
                f"expected {format_rational(row.want)}"
            )
        print("selfcheck OK" if result.ok else "selfcheck FAILED")
    return 0 if result.ok else 2


def cmd_cache(args: argparse.Namespace) -> int:
    if args.action == "export":
        memo = default_memo()
        _preload_cache(memo, args.n)
        keep = {k: v for k, v in memo.products.items() if k[0] == args.n}
        if not keep:
            print(f"error: nothing cached for n={args.n}", file=sys.stderr)
            return 1
        save_cache(args.out, args.n, keep)
        print(f"exported {len(keep)} products to {args.out}")
        return 0
    # import
    try:
        n, products = load_cache(getattr(args, "in"))
    except CacheFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    memo = default_memo()
    for key, value in products.items():
        memo.put_product(key, value)
    path = _cache_file_for(n)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_cache(path, n, memo.products)
        print(f"imported {len(products)} products for n={n} into {path}")
    else:
        print(f"imported {len(products)} products for n={n} (in-memory only)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="m0n", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("volume", help="exact volume by every applicable formula")
    p.add_argument("--weights", required=True, help="comma-separated rationals, e.g. 9/10,3/5,3/10,1/5")
    p.add_argument(
        "--formula",
        default="all",
        choices=["all", "ke", "weighted", "psi", "kawamata", "mcmullen"],
    )
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true", help="fail on weight subsets summing to 1")
    p.set_defaults(fn=cmd_volume)

    p = sub.add_parser("intersect", help="intersection number of n-3 vital divisors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--divisors", required=True, help='semicolon-separated block literals, e.g. "1,2 ; 1,2"')
    p.set_defaults(fn=cmd_intersect)

    p = sub.add_parser("psi", help="boundary expansion of a cotangent-line class")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--ref", help="reference pair j,k (default: two smallest other indices)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_psi)

    p = sub.add_parser("divisor", help="coefficient table of a named divisor class")
    p.add_argument("--n", type=int, help="needed only for --kind canonical without weights")
    p.add_argument("--weights")
    p.add_argument("--kind", required=True, choices=sorted(DIVISOR_KINDS))
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(fn=cmd_divisor)

    p = sub.add_parser("tensor", help="all (n-3)-fold products of vital divisors, written as a cache file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true", help=f"allow n > {TENSOR_DEFAULT_MAX_N}")
    p.set_defaults(fn=cmd_tensor)

    p = sub.add_parser("selfcheck", help="recompute and diff the published tables")
    p.add_argument("--no-memo", action="store_true", help="disable all memoization")
    p.add_argument("--cache", help="cache file to preload")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_selfcheck)

    p = sub.add_parser("cache", help="import or export top-product cache files")
    cache_sub = p.add_subparsers(dest="action", required=True)
    pe = cache_sub.add_parser("export")
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--out", required=True)
    pe.set_defaults(fn=cmd_cache)
    pi = cache_sub.add_parser("import")
    pi.add_argument("--in", required=True)
    pi.set_defaults(fn=cmd_cache)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
