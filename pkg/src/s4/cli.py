"""Command-line entry point.

One subcommand per workflow step; every line of output is a single JSON
record so scripts can parse results without screen-scraping.  Exit code
0 means success; each error class maps to its own nonzero code (see
errors.py).

The store directory is the untrusted side of the deployment: key files
must never be placed inside it, and no command ever writes key material
there.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from pathlib import Path

from . import attack, bench, client, core, paillier
from .client import EncodingSpec
from .errors import KeyFormatError, OverwriteRefused, S4Error, TableFormatError
from .store import CspStore

DEFAULT_STORE = "./csp-store"
BENCH_DIR_ENV = "S4_BENCH_DIR"


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit with code 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except S4Error as exc:
        _emit_error(type(exc).__name__, str(exc))
        return exc.exit_code
    except OSError as exc:
        _emit_error("IOError", str(exc))
        return 3
    except ValueError as exc:
        _emit_error("ValueError", str(exc))
        return 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s4",
        description="Split secrets for private SUM/COUNT/AVG on an untrusted store.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    kg = sub.add_parser("keygen", help="generate a private key file")
    kg.add_argument("--k", type=int, required=True, help="threshold (>= 2)")
    group = kg.add_mutually_exclusive_group(required=True)
    group.add_argument("--p", type=int, help="field prime")
    group.add_argument(
        "--auto-p",
        nargs=2,
        type=int,
        metavar=("ROWS", "MAX_VALUE"),
        help="size p as the first prime above ROWS * MAX_VALUE * scale",
    )
    kg.add_argument("--scale", type=int, default=1, help="fixed-point scale (power of ten)")
    kg.add_argument("--out", required=True, help="key file path")
    kg.add_argument("--force", action="store_true", help="overwrite an existing key file")
    kg.add_argument("--seed", type=int, help="deterministic rng seed (NOT secure; demos only)")
    kg.set_defaults(func=_cmd_keygen)

    out = sub.add_parser("outsource", help="split values and ingest them into a store table")
    out.add_argument("--key", required=True)
    out.add_argument("--in", dest="infile", required=True, help="one decimal value per line")
    out.add_argument("--table", required=True)
    out.add_argument("--store", default=DEFAULT_STORE)
    out.add_argument("--scale", type=int, default=1)
    out.add_argument(
        "--reconstruct-all",
        action="store_true",
        help="debug: read every stored row back and print the reconstructed values",
    )
    out.add_argument("--seed", type=int, help="deterministic rng seed (NOT secure; demos only)")
    out.set_defaults(func=_cmd_outsource)

    q = sub.add_parser("query", help="run SUM, COUNT, or AVG against a table")
    q.add_argument("--op", choices=("sum", "count", "avg"), required=True)
    q.add_argument("--table", required=True)
    q.add_argument("--store", default=DEFAULT_STORE)
    q.add_argument("--key", help="key file (required for sum and avg)")
    sel = q.add_mutually_exclusive_group(required=True)
    sel.add_argument("--ids", help="comma-separated record ids")
    sel.add_argument("--all", action="store_true", help="select every row")
    q.add_argument("--scale", type=int, default=1)
    q.set_defaults(func=_cmd_query)

    b = sub.add_parser("bench", help="run the comparison benchmark and write a CSV")
    b.add_argument(
        "--grid",
        choices=("default", "small"),
        default="small",
        help="'default' is the full-scale grid (hours of runtime)",
    )
    b.add_argument("--m", type=int, nargs="+", help="override dataset cardinalities")
    b.add_argument("--k", type=int, nargs="+", help="override thresholds")
    b.add_argument("--paillier-bits", type=int, help="override baseline key size")
    b.add_argument("--repetitions", type=int, help="timed runs per phase (after 1 warm-up)")
    b.add_argument("--phases", nargs="+", choices=bench.PHASES, help="subset of phases to run")
    b.add_argument("--no-paillier", action="store_true", help="skip the baseline entirely")
    b.add_argument(
        "--uncap-paillier",
        action="store_true",
        help="run Paillier phases above m=10^5 (very slow)",
    )
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="CSV path (default: <dir>/results.csv)")
    b.add_argument(
        "--dir",
        help=f"work/result directory (default: ${BENCH_DIR_ENV} or a temp dir)",
    )
    b.set_defaults(func=_cmd_bench)

    ad = sub.add_parser(
        "attack-demo",
        help="recover table secrets from known (secret, splits) pairs",
    )
    ad.add_argument("--table", required=True)
    ad.add_argument("--store", default=DEFAULT_STORE)
    ad.add_argument("--known", required=True, help="CSV of known pairs: secret,a1,...,a{k-1}")
    ad.add_argument("--key", help="key file; enables the exactness scorecard")
    ad.set_defaults(func=_cmd_attack)

    ps = sub.add_parser("paillier-selftest", help="round-trip and homomorphism checks")
    ps.add_argument("--bits", type=int, default=256)
    ps.add_argument("--pairs", type=int, default=25)
    ps.add_argument("--seed", type=int)
    ps.set_defaults(func=_cmd_paillier_selftest)

    return parser


def _cmd_keygen(args) -> int:
    if args.p is not None:
        p = args.p
    else:
        rows, max_value = args.auto_p
        p = client.auto_prime(rows, max_value, args.scale)
    out = Path(args.out)
    if out.exists() and not args.force:
        raise OverwriteRefused(f"{out} exists; pass --force to overwrite")
    key = core.keygen(args.k, p, _rng(args.seed))
    if args.k == 2:
        _emit_warning(
            "k=2 uses no random construction points: each split is an affine "
            "function of its secret, so the store learns secrets up to one "
            "affine unknown"
        )
    core.save_key(key, out)
    _emit({"event": "keygen", "k": key.k, "p": key.p, "path": str(out)})
    return 0


def _cmd_outsource(args) -> int:
    key = core.load_key(args.key)
    _check_key_outside_store(args.key, args.store)
    spec = EncodingSpec(max_value=key.p - 1, scale=args.scale)
    values = [
        line.strip()
        for line in Path(args.infile).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    store = CspStore(args.store)
    added = client.outsource(values, key, spec, store, args.table, _rng(args.seed))
    _emit({"event": "outsource", "table": args.table, "rows": added})
    if args.reconstruct_all:
        for record in store.rows(args.table):
            value = core.reconstruct(list(record.splits), key)
            _emit({"id": record.id, "value": client.render_fraction(client.decode(value, spec))})
    return 0


def _cmd_query(args) -> int:
    store = CspStore(args.store)
    ids = None if args.all else _parse_ids(args.ids)
    if args.op == "count":
        result = client.count_query(store, args.table, ids)
    else:
        if not args.key:
            raise KeyFormatError(f"--key is required for {args.op} queries")
        key = core.load_key(args.key)
        spec = EncodingSpec(max_value=key.p - 1, scale=args.scale)
        if args.op == "sum":
            result = client.sum_query(store, args.table, ids, key, spec)
        else:
            result = client.avg_query(store, args.table, ids, key, spec)
    print(result.json_line())
    return 0


def _cmd_bench(args) -> int:
    overrides = {}
    if args.grid == "small":
        overrides = {"m_list": (10**3,), "repetitions": 3}
    if args.m:
        overrides["m_list"] = tuple(args.m)
    if args.k:
        overrides["k_list"] = tuple(args.k)
    if args.paillier_bits:
        overrides["paillier_bits"] = args.paillier_bits
    if args.repetitions:
        overrides["repetitions"] = args.repetitions
    if args.phases:
        overrides["phases"] = tuple(args.phases)
    if args.no_paillier:
        overrides["include_paillier"] = False
    if args.uncap_paillier:
        overrides["uncap_paillier"] = True
    config = bench.BenchConfig(seed=args.seed, **overrides)

    work_dir = args.dir or os.environ.get(BENCH_DIR_ENV) or tempfile.mkdtemp(prefix="s4-bench-")
    Path(work_dir).mkdir(parents=True, exist_ok=True)
    if args.grid == "default" and not args.m:
        _emit_warning("the default grid runs up to m=10^6 and can take hours")
    records = bench.run_bench(config, work_dir)
    csv_path = Path(args.out) if args.out else Path(work_dir) / "results.csv"
    bench.emit_csv(records, csv_path)
    _emit({"event": "bench", "records": len(records), "csv": str(csv_path)})
    return 0


def _cmd_attack(args) -> int:
    store = CspStore(args.store)
    table = store.table(args.table)
    pairs = _load_pairs(Path(args.known), table.k)
    basis = attack.recover_basis(pairs, table.p)
    _emit(
        {
            "event": "recovered_basis",
            "lambdas": list(basis.lambdas),
            "c": basis.c,
        }
    )
    recovered = attack.recover_secrets(basis, table, table.p)
    for record, value in zip(table.rows(), recovered):
        _emit({"id": record.id, "recovered": value})
    if args.key:
        key = core.load_key(args.key)
        exact = sum(
            1
            for record, value in zip(table.rows(), recovered)
            if core.reconstruct(list(record.splits), key) == value
        )
        _emit(
            {
                "event": "scorecard",
                "rows": len(recovered),
                "exact": exact,
                "exact_fraction": exact / len(recovered) if recovered else 1.0,
            }
        )
    return 0


def _cmd_paillier_selftest(args) -> int:
    rng = _rng(args.seed)
    key = paillier.keygen(args.bits, rng)
    pub = key.public
    check_rng = rng or random.Random()
    max_ct_bits = 0
    for _ in range(args.pairs):
        x = check_rng.randrange(pub.n)
        y = check_rng.randrange(pub.n)
        cx = paillier.encrypt(x, pub, rng)
        cy = paillier.encrypt(y, pub, rng)
        max_ct_bits = max(max_ct_bits, cx.bit_length(), cy.bit_length())
        if paillier.decrypt(cx, key) != x:
            raise S4Error("round-trip failed")
        if paillier.decrypt(paillier.add(cx, cy, pub), key) != (x + y) % pub.n:
            raise S4Error("homomorphic addition failed")
    _emit(
        {
            "event": "paillier_selftest",
            "bits": args.bits,
            "pairs": args.pairs,
            "max_ciphertext_bits": max_ct_bits,
            "ok": True,
        }
    )
    return 0


# -- helpers ----------------------------------------------------------------


def _rng(seed) -> random.Random | None:
    return random.Random(seed) if seed is not None else None


def _parse_ids(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ValueError(f"--ids must be a comma-separated list of integers, got {text!r}") from None


def _load_pairs(path: Path, k: int) -> list[attack.KnownPair]:
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    expected = ",".join(["secret"] + [f"a{i}" for i in range(1, k)])
    if not lines or lines[0] != expected:
        raise TableFormatError(f"{path}: known-pairs header must be {expected!r}")
    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != k:
            raise TableFormatError(f"{path}:{lineno}: expected {k} fields")
        try:
            cells = [int(c) for c in parts]
        except ValueError:
            raise TableFormatError(f"{path}:{lineno}: non-integer cell") from None
        pairs.append(attack.KnownPair(cells[0], tuple(cells[1:])))
    return pairs


def _check_key_outside_store(key_path: str, store_dir: str) -> None:
    key = Path(key_path).resolve()
    store_root = Path(store_dir).resolve()
    if store_root == key or store_root in key.parents:
        raise KeyFormatError(
            f"key file {key} lies inside the store directory {store_root}; "
            "the store is the untrusted side and must never hold key material"
        )


def _emit(record: dict) -> None:
    print(json.dumps(record, sort_keys=True))


def _emit_warning(message: str) -> None:
    print(json.dumps({"warning": message}), file=sys.stderr)


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
