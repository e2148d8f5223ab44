"""Command-line entry point.

Exit codes: 0 success / property holds, 1 property fails (witness printed),
2 usage or input error, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from batchlab import batch, bounds, constructions, tensor
from batchlab.code import DISTANCE_CAP, DUAL_CAP, LinearCode, code_from_generator, format_code, min_distance, parse_generator, systematize
from batchlab.errors import BatchLabError, CapExceeded, NotBatchError

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


@dataclass(frozen=True)
class Config:
    dual_cap: int = DUAL_CAP
    multiset_cap: int = batch.MULTISET_CAP
    tensor_cap: int = tensor.GOOD_COUNT_CAP
    distance_cap: int = DISTANCE_CAP
    sample: int = 0
    output: str = "text"
    seed: int = 0

    def __post_init__(self):
        for name in ("dual_cap", "multiset_cap", "tensor_cap", "distance_cap"):
            if getattr(self, name) <= 0:
                raise BatchLabError(f"{name} must be positive")


class _Result:
    def __init__(self, code: int, doc: dict, lines: list[str]):
        self.code, self.doc, self.lines = code, doc, lines


def _load_code(path: str, do_systematize: bool) -> LinearCode:
    text = Path(path).read_text()
    g = parse_generator(text)
    if do_systematize:
        g, perm = systematize(g)
        print("systematized; new column j = old column " + " ".join(str(p) for p in perm), file=sys.stderr)
    return code_from_generator(g)


def cmd_verify(args, cfg: Config) -> _Result:
    c = _load_code(args.code, args.systematize)
    if args.sample:
        v = batch.sample_k_batch(c, args.k, args.sample, cfg.seed, cfg.dual_cap)
        if v.witness is None:
            return _Result(EXIT_OK, {"result": "NO_COUNTEREXAMPLE", "samples": v.samples},
                           [f"NO COUNTEREXAMPLE IN {v.samples} SAMPLES"])
        witness = v.witness
    else:
        verdict = batch.is_k_batch(c, args.k, cfg.multiset_cap, cfg.dual_cap)
        if verdict.holds:
            return _Result(EXIT_OK, {"result": "OK"}, ["OK"])
        witness = verdict.witness
    idx = list(witness.indices)
    return _Result(EXIT_FALSE, {"result": "COUNTEREXAMPLE", "witness": idx},
                   ["COUNTEREXAMPLE " + " ".join(str(i) for i in idx)])


def cmd_serve(args, cfg: Config) -> _Result:
    c = _load_code(args.code, args.systematize)
    req = batch.BatchRequest(tuple(args.request))
    plan = batch.serve_request(c, req, cfg.dual_cap)
    if plan is None:
        return _Result(EXIT_FALSE, {"result": "UNSERVABLE", "request": list(req.indices)},
                       ["UNSERVABLE " + " ".join(str(i) for i in req.indices)])
    sets = [{"target": s.target, "positions": list(s.positions), "coeffs": list(s.coefficients)} for s in plan.sets]
    return _Result(EXIT_OK, {"result": "PLAN", "sets": sets}, [str(s) for s in plan.sets])


def cmd_batch_number(args, cfg: Config) -> _Result:
    c = _load_code(args.code, args.systematize)
    b = batch.batch_number(c, args.max_k, cfg.multiset_cap, cfg.dual_cap)
    return _Result(EXIT_OK, {"batch_number": b}, [f"BATCH_NUMBER {b}"])


def cmd_certify(args, cfg: Config) -> _Result:
    c = _load_code(args.code, args.systematize)
    cert = tensor.greedy_family(c, args.k, cfg.tensor_cap, dual_cap=cfg.dual_cap)
    Path(args.out).write_text(cert.to_json())
    total = tensor.good_count(c.n, cert.t)
    doc = {"result": "CERTIFIED", "t": cert.t, "E": total, "d_guarantee": cert.d_guarantee,
           "achieved": cert.achieved, "rank": cert.rank}
    line = " ".join(f"{k}={v}" for k, v in doc.items() if k != "result")
    return _Result(EXIT_OK, doc, ["CERTIFIED " + line])


def cmd_check_cert(args, cfg: Config) -> _Result:
    c = _load_code(args.code, args.systematize)
    cert = tensor.Certificate.from_json(Path(args.cert).read_text())
    check = tensor.verify_certificate(cert, c)
    if check:
        return _Result(EXIT_OK, {"result": "VALID"}, ["VALID"])
    return _Result(EXIT_FALSE, {"result": "INVALID", "reason": check.reason}, [f"INVALID {check.reason}"])


def cmd_construct(args, cfg: Config) -> _Result:
    if args.kind == "replication":
        c = constructions.replication(args.n, args.m, args.q)
    elif args.kind == "single-parity":
        c = constructions.single_parity(args.n, args.q)
    elif args.kind == "grid-parity":
        c = constructions.grid_parity(args.s, args.q)
    else:
        c = constructions.random_systematic(args.n, args.r, args.q, args.seed)
    Path(args.out).write_text(format_code(c))
    return _Result(EXIT_OK, {"result": "WROTE", "q": c.q, "n": c.n, "N": c.N, "path": args.out},
                   [f"WROTE q={c.q} n={c.n} N={c.N} {args.out}"])


def cmd_bounds(args, cfg: Config) -> _Result:
    rows = bounds.emit_plot(args.grid_step, args.csv, args.svg)
    return _Result(EXIT_OK, {"result": "WROTE", "rows": len(rows)}, [f"WROTE {len(rows)} rows"])


def cmd_distance(args, cfg: Config) -> _Result:
    c = _load_code(args.code, args.systematize)
    d = min_distance(c, cfg.distance_cap)
    return _Result(EXIT_OK, {"distance": d}, [f"DISTANCE {d}"])


def cmd_bound(args, cfg: Config) -> _Result:
    b = tensor.theorem_bound(args.n, args.N, args.k)
    doc = {"t": b.t, "explicit": b.explicit, "dimension": b.dimension, "fallback": b.fallback,
           "distance": b.distance, "singleton": b.singleton}
    lines = [f"{k} {'n/a' if v is None else (format(v, '.12g') if isinstance(v, float) else v)}" for k, v in doc.items()]
    return _Result(EXIT_OK, doc, lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="batchlab", description="Batch-code verification and redundancy certificates.")
    p.add_argument("--format", choices=["text", "json"], default="text", help="output mode")
    p.add_argument("--dual-cap", type=int, default=DUAL_CAP)
    p.add_argument("--multiset-cap", type=int, default=batch.MULTISET_CAP)
    p.add_argument("--tensor-cap", type=int, default=tensor.GOOD_COUNT_CAP)
    p.add_argument("--distance-cap", type=int, default=DISTANCE_CAP)
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def code_cmd(name: str, func, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--code", required=True, help="code file: 'q n N' then n generator rows")
        sp.add_argument("--systematize", action="store_true", help="row-reduce and permute into [I | A]")
        sp.set_defaults(func=func)
        return sp

    sp = code_cmd("verify", cmd_verify, "check the k-batch property")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--sample", type=int, default=0, help="test this many random multisets instead")
    sp = code_cmd("serve", cmd_serve, "print a recovery plan for one request")
    sp.add_argument("--request", type=int, nargs="+", required=True)
    sp = code_cmd("batch-number", cmd_batch_number, "largest k for which the code is k-batch")
    sp.add_argument("--max-k", type=int, default=None)
    sp = code_cmd("certify", cmd_certify, "build a tensor-rank certificate")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp = code_cmd("check-cert", cmd_check_cert, "independently recheck a certificate")
    sp.add_argument("--cert", required=True)
    code_cmd("distance", cmd_distance, "minimum distance by enumeration")

    sp = sub.add_parser("construct", help="write a baseline code file")
    sp.set_defaults(func=cmd_construct)
    kinds = sp.add_subparsers(dest="kind", required=True)
    for kind, params in [
        ("replication", ["n", "m"]),
        ("single-parity", ["n"]),
        ("grid-parity", ["s"]),
        ("random", ["n", "r"]),
    ]:
        kp = kinds.add_parser(kind)
        for name in params:
            kp.add_argument(f"--{name}", type=int, required=True)
        kp.add_argument("--q", type=int, default=2)
        if kind == "random":
            kp.add_argument("--seed", dest="seed", type=int, default=0)
        kp.add_argument("--out", required=True)

    sp = sub.add_parser("bounds", help="emit the redundancy exponent diagram")
    sp.add_argument("--grid-step", type=float, default=0.01)
    sp.add_argument("--csv", required=True)
    sp.add_argument("--svg", required=True)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("bound", help="evaluate the redundancy lower bounds for (n, N, k)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_bound)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = Config(args.dual_cap, args.multiset_cap, args.tensor_cap, args.distance_cap,
                     getattr(args, "sample", 0), args.format, args.seed)
        res = args.func(args, cfg)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NotBatchError as exc:
        doc = {"result": "NOT_BATCH", "request": list(exc.request or ())}
        if args.format == "json":
            print(json.dumps(doc))
        else:
            print("NOT_BATCH " + " ".join(str(i) for i in exc.request or ()))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FALSE
    except (BatchLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        print(json.dumps({"command": args.command, **res.doc}))
    else:
        for line in res.lines:
            print(line)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
