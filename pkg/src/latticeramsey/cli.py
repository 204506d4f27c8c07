"""Command-line driver producing reproducible JSON certificates.

Subcommands: construct, verify, embed, ramsey, bound, code.  Every run emits a
certificate object recording the command, package version, seeds, input file
digests, the outcome, and the result payload; identical runs produce
byte-identical certificates except for the wall-clock field.

Exit codes: 0 property holds / artifact produced, 1 witness or counterexample
found, 2 usage error, 3 search or resample budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from typing import Optional

from . import __version__
from .lattice import Coloring, Permutation, WeightedFamily, elements_of, mask_of
from .oracle import (
    CopyKind,
    SearchExhausted,
    coloring_is_ramsey,
    exhaustive_ramsey_number,
)
from .embedder import (
    counting_bound,
    embed_with_permutation,
    minimal_k,
    sweep_permutations,
)
from . import constructions as cons
from . import verifier as ver

EXIT_OK = 0
EXIT_WITNESS = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3


def derive_seed(master: int, counter: int) -> int:
    """Deterministic per-task sub-seed from one master seed.

    Sub-task i uses the first 8 bytes of sha256("{master}:{i}"), so adding
    tasks never perturbs the streams of existing ones.
    """
    digest = hashlib.sha256(f"{master}:{counter}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _digest_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load_coloring(path: str) -> tuple[Coloring, str]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return Coloring.from_obj(json.loads(text)), hashlib.sha256(text.encode()).hexdigest()


class _Certificate:
    def __init__(self, argv: list[str]):
        self.started = time.monotonic()
        self.obj: dict = {
            "command": argv,
            "version": __version__,
            "seeds": {},
            "inputs": {},
            "outcome": None,
            "result": None,
            "witness": None,
        }

    def emit(self, out_path: Optional[str]) -> None:
        self.obj["wall_clock_s"] = round(time.monotonic() - self.started, 6)
        text = json.dumps(self.obj, sort_keys=True, indent=2)
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="latticeramsey",
        description="Boolean-lattice coloring constructions, embeddings, and verification",
    )
    ap.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("RLL_THREADS", "1")),
        help="worker cap for parallel scans (default: RLL_THREADS or 1)",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("construct", help="build a coloring and write it as JSON")
    c.add_argument("variant", choices=["layered", "pairs", "modp", "lll"])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--d", type=int)
    c.add_argument("--p", type=int, help="modp: prime override")
    c.add_argument("--blue-layers", type=str, help="layered: explicit blue layer indices")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--p-incl", type=float, help="lll: membership density override")
    c.add_argument("--max-resamples", type=int, default=10**6)
    c.add_argument("-o", "--output", type=str, help="write the coloring JSON here")

    v = sub.add_parser("verify", help="run structural checks against a coloring file")
    v.add_argument("--coloring", type=str, required=True)
    v.add_argument("--blue-free", type=int, help="certify no blue copy of this dimension")
    v.add_argument("--kind", choices=["induced", "weak"], default="weak")
    v.add_argument("--conditions", action="store_true", help="check the family conditions")
    v.add_argument("--distance", type=int, help="check pairwise distance of the extras")
    v.add_argument(
        "--code-statement", type=str, help="N,m,k,p,d: exact coverage counts"
    )
    v.add_argument(
        "--red-bound", type=str, help="n,m: red supersets-per-bottom certificate"
    )
    v.add_argument("--ramsey", type=str, help="m,n: exhaustive oracle on this coloring")

    e = sub.add_parser("embed", help="run the recursive embedder")
    e.add_argument("--coloring", type=str, required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int, required=True)
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--pi", type=str, help="comma-separated image of [n+1..n+k]")
    g.add_argument("--all", action="store_true", help="sweep all k! permutations")
    g.add_argument("--sample", type=int, help="sweep this many sampled permutations")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("-o", "--output", type=str)

    r = sub.add_parser("ramsey", help="exhaustive tiny-scale threshold scan")
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--kind", choices=["induced", "weak"], required=True)
    r.add_argument("--max-N", type=int, default=4, dest="max_n")
    r.add_argument("-o", "--output", type=str)

    b = sub.add_parser("bound", help="exact factorial-versus-power counting bound")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--c", type=float)
    b.add_argument("--minimal", action="store_true", help="report the least usable k")
    b.add_argument("-o", "--output", type=str)

    w = sub.add_parser("code", help="constructive witness for the residue code")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--k", type=int)
    w.add_argument("--d", type=int)
    w.add_argument("--avoid", type=str, required=True, help="the m-set Y, e.g. '35,36'")
    w.add_argument("--y", type=int, required=True, help="element of Y to re-add")
    w.add_argument("-o", "--output", type=str)

    return ap


def _cmd_construct(args, cert: _Certificate) -> int:
    out: Optional[str] = args.output
    if args.variant == "layered":
        if args.m is None:
            raise ValueError("layered construction needs --m")
        blue = _parse_int_list(args.blue_layers) if args.blue_layers else None
        coloring = cons.layered_coloring(args.m, args.n, blue)
        cert.obj["result"] = {"construction": "layered", "coloring": coloring.to_obj()}
    elif args.variant == "pairs":
        code = cons.greedy_pair_code(args.n)
        coloring = cons.induced_q2_coloring(args.n)
        cert.obj["result"] = {
            "construction": "pairs",
            "k": code.k,
            "assignments": len(code.assignments),
            "feasible": code.feasible,
            "candidates_per_pair": code.candidates_per_pair,
            "max_blocked": code.max_blocked,
            "coloring": coloring.to_obj(),
        }
    elif args.variant == "modp":
        if args.m is None:
            raise ValueError("modp construction needs --m")
        params = cons.weak_parameters(args.n, args.m, args.k, args.d, args.p)
        coloring = cons.weak_construction(args.n, args.m, args.k, args.d, args.p)
        cert.obj["result"] = {
            "construction": "modp",
            "params": params.to_obj(),
            "coloring": coloring.to_obj(),
        }
    else:  # lll
        if args.m is None:
            raise ValueError("lll construction needs --m")
        seed = derive_seed(args.seed, 0)
        cert.obj["seeds"] = {"master": args.seed, "family": seed}
        cfg = cons.LllConfig(
            args.n,
            args.m,
            p_inclusion=args.p_incl,
            seed=seed,
            max_resamples=args.max_resamples,
        )
        try:
            fam = cons.lll_family(cfg)
        except cons.ResampleBudgetExceeded as exc:
            cert.obj["outcome"] = "exhausted"
            cert.obj["result"] = {
                "construction": "lll",
                "resamples": exc.resamples,
                "violations": exc.violations,
                "density": cfg.density,
                "default_density": cons.LllConfig.default_density(args.n, args.m),
            }
            cert.emit(out)
            return EXIT_EXHAUSTED
        coloring = cons.probabilistic_coloring(args.n, args.m, fam)
        cert.obj["result"] = {
            "construction": "lll",
            "members": len(fam.members),
            "density": cfg.density,
            "default_density": cons.LllConfig.default_density(args.n, args.m),
            "coloring": coloring.to_obj(),
        }
    cert.obj["outcome"] = "ok"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(coloring.to_obj(), fh, sort_keys=True)
            fh.write("\n")
        cert.obj["result"]["written"] = out
        cert.emit(None)
    else:
        cert.emit(None)
    return EXIT_OK


def _extras_family(coloring: Coloring) -> WeightedFamily:
    if coloring.blue_code is not None and not coloring.blue_extra:
        return coloring.blue_code
    sizes = {s.bit_count() for s in coloring.blue_extra}
    if len(sizes) != 1:
        raise ValueError("coloring extras do not form a single-weight family")
    return WeightedFamily(
        coloring.ground_n, sizes.pop(), members=tuple(sorted(coloring.blue_extra))
    )


def _cmd_verify(args, cert: _Certificate) -> int:
    coloring, digest = _load_coloring(args.coloring)
    cert.obj["inputs"][args.coloring] = digest
    checks: dict = {}
    witness_found = False

    if args.blue_free is not None:
        kind = CopyKind(args.kind)
        res = ver.certify_blue_free(coloring, args.blue_free, kind)
        checks["blue_free"] = res.to_obj()
        witness_found |= not res.ok
    if args.conditions:
        res2 = ver.check_conditions(_extras_family(coloring))
        checks["conditions"] = res2.to_obj()
        witness_found |= not res2.ok
    if args.distance is not None:
        res3 = ver.check_min_distance(_extras_family(coloring), args.distance)
        checks["distance"] = res3.to_obj()
        witness_found |= not res3.ok
    if args.code_statement:
        vals = _parse_int_list(args.code_statement)
        if len(vals) != 5:
            raise ValueError("--code-statement needs N,m,k,p,d")
        res4 = ver.check_code_statement(*vals)
        checks["code_statement"] = res4.to_obj()
        witness_found |= not res4.ok
    if args.red_bound:
        vals = _parse_int_list(args.red_bound)
        if len(vals) != 2:
            raise ValueError("--red-bound needs n,m")
        res5 = ver.certify_red_singleton_bound(coloring, vals[0], vals[1])
        checks["red_bound"] = res5.to_obj()
        witness_found |= not res5.ok
    if args.ramsey:
        vals = _parse_int_list(args.ramsey)
        if len(vals) != 2:
            raise ValueError("--ramsey needs m,n")
        outcome = coloring_is_ramsey(coloring, vals[0], vals[1], CopyKind(args.kind))
        checks["ramsey"] = {
            "neither": outcome.neither,
            "blue_witness": None
            if outcome.blue_witness is None
            else outcome.blue_witness.to_obj(),
            "red_witness": None
            if outcome.red_witness is None
            else outcome.red_witness.to_obj(),
        }
        witness_found |= not outcome.neither

    if not checks:
        raise ValueError("no verification requested")
    cert.obj["result"] = checks
    cert.obj["outcome"] = "witness" if witness_found else "ok"
    cert.emit(None)
    return EXIT_WITNESS if witness_found else EXIT_OK


def _cmd_embed(args, cert: _Certificate) -> int:
    coloring, digest = _load_coloring(args.coloring)
    cert.obj["inputs"][args.coloring] = digest
    n, k = args.n, args.k
    if args.pi:
        perm = Permutation(n, k, tuple(_parse_int_list(args.pi)))
        rec = embed_with_permutation(coloring, n, k, perm)
        cert.obj["result"] = rec.to_obj()
        cert.obj["outcome"] = "ok" if rec.succeeded else "witness"
        cert.emit(args.output)
        return EXIT_OK if rec.succeeded else EXIT_WITNESS
    if args.all:
        report = sweep_permutations(coloring, n, k, mode="all")
    else:
        seed = derive_seed(args.seed, 0)
        cert.obj["seeds"] = {"master": args.seed, "sweep": seed}
        report = sweep_permutations(
            coloring, n, k, mode="sample", sample_count=args.sample, seed=seed
        )
    cert.obj["result"] = report.to_obj()
    cert.obj["outcome"] = "ok" if report.success is not None else "witness"
    cert.emit(args.output)
    return EXIT_OK if report.success is not None else EXIT_WITNESS


def _cmd_ramsey(args, cert: _Certificate) -> int:
    kind = CopyKind(args.kind)
    result = exhaustive_ramsey_number(
        args.m, args.n, kind, max_n=args.max_n, workers=args.threads
    )
    cert.obj["result"] = result.to_obj()
    if result.status == "exhausted":
        cert.obj["outcome"] = "exhausted"
        cert.emit(args.output)
        return EXIT_EXHAUSTED
    cert.obj["outcome"] = "ok" if result.value is not None else "unknown"
    cert.emit(args.output)
    return EXIT_OK


def _cmd_bound(args, cert: _Certificate) -> int:
    result: dict = {"n": args.n}
    if args.c is not None:
        result["report"] = counting_bound(args.n, args.c).to_obj()
    if args.minimal:
        result["minimal_k"] = minimal_k(args.n)
    if args.c is None and not args.minimal:
        raise ValueError("bound needs --c and/or --minimal")
    cert.obj["result"] = result
    cert.obj["outcome"] = "ok"
    cert.emit(args.output)
    return EXIT_OK


def _cmd_code(args, cert: _Certificate) -> int:
    params = cons.weak_parameters(args.n, args.m, args.k, args.d)
    code = cons.modp_code(params.ground, params.k, params.d, params.p)
    avoid = mask_of(_parse_int_list(args.avoid))
    witness = cons.code_witness(
        params.ground, params.m, params.k, code, avoid, args.y
    )
    cert.obj["result"] = {
        "params": params.to_obj(),
        "avoid": elements_of(avoid),
        "y": args.y,
        "witness": elements_of(witness),
        "member": elements_of(witness | (1 << (args.y - 1))),
    }
    cert.obj["outcome"] = "ok"
    cert.emit(args.output)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    cert = _Certificate(argv)
    handlers = {
        "construct": _cmd_construct,
        "verify": _cmd_verify,
        "embed": _cmd_embed,
        "ramsey": _cmd_ramsey,
        "bound": _cmd_bound,
        "code": _cmd_code,
    }
    try:
        return handlers[args.cmd](args, cert)
    except SearchExhausted as exc:
        cert.obj["outcome"] = "exhausted"
        cert.obj["result"] = {"error": str(exc)}
        cert.emit(None)
        return EXIT_EXHAUSTED
    except cons.ResampleBudgetExceeded as exc:
        cert.obj["outcome"] = "exhausted"
        cert.obj["result"] = {"error": str(exc)}
        cert.emit(None)
        return EXIT_EXHAUSTED
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
