"""Command-line front end: generate instances, run solvers, verify
matchings, and batch-compare algorithms into CSV.

Exit codes: 0 ok, 2 usage or schema error, 3 domain precondition or
matching violation, 4 enumeration/bitmask budget exceeded.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from pathlib import Path

from . import generators
from .approx import fptas_polymul, greedy_submodular, parse_eps, qptas_bucketing
from .core import (
    BudgetExceededError,
    DomainError,
    Instance,
    Matching,
    all_utilities,
    load_instance,
    load_matching,
    nash_value,
    utilitarian_welfare,
    validate,
)
from .exact import (
    solve_capacity_one,
    solve_dp,
    solve_dp_bounded_capacity,
    solve_exact_bucketing,
)
from .feasibility import exists_nonzero_nash
from .oracle import solve_bruteforce
from .restricted import (
    solve_degree3_capacity2,
    solve_degree_two,
    solve_single_positive_firm,
    solve_symmetric_binary,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_BUDGET = 4

CSV_HEADER = "instance_id,algo,eps,status,time_ms,nash_product,nash_welfare,ratio_vs_oracle"

ALGO_NAMES = ("oracle", "cap1", "dp", "dp2", "buckets", "greedy", "qptas",
              "fptas", "symbin", "deg2", "deg3cap2", "singlefirm", "feasible")


def run_algo(name: str, inst: Instance, eps: str | None = None) -> dict:
    """Run one solver; returns a record dict with status, matching, product.

    Domain precondition failures map to status infeasible-domain and budget
    overruns to budget-exceeded; neither raises.
    """
    record = {
        "algo": name,
        "eps": eps or "",
        "status": "ok",
        "matching": None,
        "nash_product": "0",
        "nash_welfare": 0.0,
    }
    try:
        if name == "feasible":
            ok, mu = exists_nonzero_nash(inst)
            record["feasible"] = ok
            if mu is not None:
                record["matching"] = mu.to_json()["assignment"]
                value = nash_value(inst, mu)
                record["nash_product"] = str(value.product)
                record["nash_welfare"] = _welfare_float(value)
            if not ok:
                record["status"] = "zero-optimum"
            return record
        if name == "oracle":
            result = solve_bruteforce(inst)
            mu, value = result.best, result.value
        elif name == "cap1":
            mu, value = solve_capacity_one(inst)
        elif name == "dp":
            mu, value = solve_dp(inst)
        elif name == "dp2":
            mu, value = solve_dp_bounded_capacity(inst)
        elif name == "buckets":
            mu, value = solve_exact_bucketing(inst)
        elif name == "greedy":
            mu, value = greedy_submodular(inst)
        elif name == "qptas":
            mu, value = qptas_bucketing(inst, _require_eps(eps))
        elif name == "fptas":
            mu, value, level = fptas_polymul(inst, _require_eps(eps))
            record["level"] = level
        elif name == "symbin":
            mu, value = solve_symmetric_binary(inst)
        elif name == "deg2":
            mu, value = solve_degree_two(inst)
        elif name == "deg3cap2":
            result = solve_degree3_capacity2(inst)
            if result is None:
                record["status"] = "zero-optimum"
                return record
            mu, value = result
        elif name == "singlefirm":
            mu, value = solve_single_positive_firm(inst)
        else:
            raise ValueError(f"unknown algorithm {name!r}")
    except DomainError as exc:
        record["status"] = "infeasible-domain"
        record["error"] = str(exc)
        return record
    except BudgetExceededError as exc:
        record["status"] = "budget-exceeded"
        record["error"] = str(exc)
        return record
    record["matching"] = mu.to_json()["assignment"]
    record["nash_product"] = str(value.product)
    record["nash_welfare"] = _welfare_float(value)
    if value.is_zero:
        record["status"] = "zero-optimum"
    return record


def _welfare_float(value) -> float:
    import math
    if value.log_welfare is None:
        return 0.0
    return math.exp(value.log_welfare)


def _require_eps(eps: str | None) -> str:
    if not eps:
        raise DomainError("this algorithm requires --eps p/q")
    return eps


def _status_exit(status: str) -> int:
    if status == "infeasible-domain":
        return EXIT_DOMAIN
    if status == "budget-exceeded":
        return EXIT_BUDGET
    return EXIT_OK


def _dump_json(obj, path: str | None):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x != ""]


def cmd_generate(args) -> int:
    if args.kind == "random":
        if args.m is None or args.n is None:
            print("random kind needs --m and --n", file=sys.stderr)
            return EXIT_USAGE
        caps = (_parse_int_list(args.capacities) if args.capacities
                else [max(1, -(-args.m // args.n))] * args.n)
        if len(caps) != args.n:
            print("capacities length must equal n", file=sys.stderr)
            return EXIT_USAGE
        gen = generators.gen_random(args.m, args.n, caps, args.v_max,
                                    args.density, args.seed)
    elif args.kind == "partition":
        if not args.a:
            print("partition kind needs --a", file=sys.stderr)
            return EXIT_USAGE
        try:
            gen = generators.gen_from_partition(_parse_int_list(args.a), args.strict)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_USAGE
    elif args.kind == "rainbow":
        if args.r is None:
            print("rainbow kind needs --r", file=sys.stderr)
            return EXIT_USAGE
        triples, planted = generators.gen_random_3dm(args.r, args.seed)
        g = generators.gen_rainbow_from_3dm(triples, args.r, planted)
        idx = {t: k for k, t in enumerate(triples)}
        cert = tuple(idx[t] for t in planted)
        gen = generators.gen_from_rainbow(g, certificate=cert)
        gen = generators.GeneratedInstance(gen.instance, gen.kind, gen.theta,
                                           args.seed, gen.certificate)
    else:
        print(f"unknown kind {args.kind!r}", file=sys.stderr)
        return EXIT_USAGE
    _dump_json(gen.to_json(), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    start = time.perf_counter()
    record = run_algo(args.algo, inst, args.eps)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    record["instance_id"] = Path(args.instance).stem
    record["time_ms"] = round(elapsed_ms, 3) if args.timing else None
    _dump_json(record, None)
    return _status_exit(record["status"])


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    mu = load_matching(args.matching)
    violation = validate(inst, mu)
    if violation is not None:
        _dump_json({"ok": False, "violation": {"kind": violation.kind,
                                               "detail": violation.detail}}, None)
        return EXIT_DOMAIN
    value = nash_value(inst, mu)
    _dump_json({
        "ok": True,
        "utilities": all_utilities(inst, mu),
        "nash_product": str(value.product),
        "nash_welfare": _welfare_float(value),
        "utilitarian_welfare": utilitarian_welfare(inst, mu),
    }, None)
    return EXIT_OK


def _bench_instances(spec: dict) -> list[tuple[str, Instance]]:
    out = []
    for entry in spec["instances"]:
        kind = entry["kind"]
        if kind == "random":
            gen = generators.gen_random(
                entry["m"], entry["n"], entry["capacities"],
                entry.get("v_max", 5), entry.get("density", 1.0), entry["seed"])
        elif kind == "partition":
            gen = generators.gen_from_partition(entry["a"], entry.get("strict", False))
        elif kind == "rainbow":
            triples, planted = generators.gen_random_3dm(entry["r"], entry["seed"])
            g = generators.gen_rainbow_from_3dm(triples, entry["r"], planted)
            gen = generators.gen_from_rainbow(g)
        elif kind == "file":
            out.append((entry["id"], load_instance(entry["path"])))
            continue
        else:
            raise KeyError(f"unknown instance kind {kind!r}")
        out.append((entry["id"], gen.instance))
    return out


def cmd_bench(args) -> int:
    try:
        spec = json.loads(Path(args.suite).read_text())
        instances = _bench_instances(spec)
        algos = [(a["name"], a.get("eps")) for a in spec["algos"]]
        for name, _eps in algos:
            if name not in ALGO_NAMES:
                raise KeyError(f"unknown algorithm {name!r}")
    except (KeyError, TypeError, ValueError) as exc:
        print(f"malformed suite spec: {exc}", file=sys.stderr)
        return EXIT_USAGE

    cells = [(inst_id, inst, algo, eps)
             for inst_id, inst in instances for algo, eps in algos]

    def run_cell(cell):
        inst_id, inst, algo, eps = cell
        start = time.perf_counter()
        record = run_algo(algo, inst, eps)
        record["time_ms"] = (time.perf_counter() - start) * 1000.0
        return inst_id, record

    if args.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]

    oracle_products: dict[str, int] = {}
    for inst_id, record in results:
        if record["algo"] == "oracle" and record["status"] in ("ok", "zero-optimum"):
            oracle_products[inst_id] = int(record["nash_product"])

    sizes = {inst_id: inst.m + inst.n for inst_id, inst, _a, _e in cells}
    lines = [CSV_HEADER]
    for inst_id, record in results:
        ratio = ""
        if inst_id in oracle_products and record["status"] in ("ok", "zero-optimum"):
            opt = oracle_products[inst_id]
            got = int(record["nash_product"])
            if opt == 0:
                ratio = "1.0" if got == 0 else ""
            else:
                ratio = repr((got / opt) ** (1.0 / sizes[inst_id]))
        time_field = repr(round(record["time_ms"], 3)) if args.timing else ""
        lines.append(",".join([
            inst_id,
            record["algo"],
            record["eps"],
            record["status"],
            time_field,
            record["nash_product"],
            repr(record["nash_welfare"]),
            ratio,
        ]))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nswmatch",
        description="Nash-welfare-optimal many-to-one matching toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a generated instance as JSON")
    p_gen.add_argument("--kind", required=True)
    p_gen.add_argument("--m", type=int)
    p_gen.add_argument("--n", type=int)
    p_gen.add_argument("--capacities")
    p_gen.add_argument("--v-max", type=int, default=5)
    p_gen.add_argument("--density", type=float, default=1.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--a", help="comma-separated partition values")
    p_gen.add_argument("--strict", action="store_true")
    p_gen.add_argument("--r", type=int, help="rainbow graph class count")
    p_gen.add_argument("--out")
    p_gen.set_defaults(func=cmd_generate)

    p_solve = sub.add_parser("solve", help="run one solver on an instance file")
    p_solve.add_argument("instance")
    p_solve.add_argument("--algo", required=True, choices=ALGO_NAMES)
    p_solve.add_argument("--eps", help="exact rational, e.g. 1/2")
    p_solve.add_argument("--timing", action="store_true")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="check a matching against an instance")
    p_verify.add_argument("instance")
    p_verify.add_argument("matching")
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="run a suite spec, emit CSV")
    p_bench.add_argument("suite")
    p_bench.add_argument("--out")
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--timing", action="store_true",
                         help="fill the time_ms column (output is then not "
                              "byte-reproducible)")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if getattr(args, "eps", None):
        try:
            parse_eps(args.eps)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
