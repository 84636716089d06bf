"""Command-line entry point: ``simulate``, ``optimize``, ``decode``, ``code-info``."""

from __future__ import annotations

import argparse
import json
import math
import sys

from .channel import read_llr_file
from .codes import AlistParseError, CodeConstructionError, LinearCode, load_alist, load_code, sphere_union_rate
from .decoder import DEFAULT_MAX_QUERIES, DecoderConfig, Variant, decode
from .sim import (OptimizationError, StoppingRule, emit_results, optimize_parameters,
                  parse_grid, sweep, write_results)


def _limit(text: str) -> int | None:
    if text.lower() in ("inf", "none", "0"):
        return None
    return int(text)


def _add_code_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--code", help="named code, e.g. ebch-32-21, bch-15-7, hamming-8-4")
    g.add_argument("--alist", help="parity-check matrix in alist format")


def _add_decoder_args(p: argparse.ArgumentParser, default: str = "sygrand") -> None:
    p.add_argument("--decoder", choices=[v.value for v in Variant], default=default)
    p.add_argument("--theta", type=float, default=0.71)
    p.add_argument("--lmax", type=_limit, default=3, help="list size cap ('inf' for none)")
    p.add_argument("--t", type=int, default=50, dest="t_budget", help="ORDEPT query budget")
    p.add_argument("--cmax", type=_limit, default=3, help="ORDEPT candidate cap")
    p.add_argument("--max-queries", type=int, default=DEFAULT_MAX_QUERIES)
    p.add_argument("--no-parity", action="store_true",
                   help="do not restrict ORBGRAND guesses to even parity on even-weight codes")


def _add_sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ebn0", required=True, help="grid as start:step:stop or a comma list (dB)")
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-trials", type=int, default=10**7)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)


def _code(args) -> LinearCode:
    if args.alist:
        with open(args.alist) as fh:
            return load_alist(fh.read(), label=args.alist)
    return load_code(args.code)


def _config(args, variant: str | None = None) -> DecoderConfig:
    variant = Variant(variant or args.decoder)
    common = dict(max_queries=args.max_queries, use_parity_constraint=not args.no_parity)
    if variant is Variant.SYGRAND:
        return DecoderConfig.sygrand(args.theta, args.lmax, **common)
    if variant is Variant.ORDEPT:
        return DecoderConfig.ordept(args.t_budget, args.cmax, **common)
    return DecoderConfig.orbgrand(**common)


def _rule(args) -> StoppingRule:
    return StoppingRule(args.min_errors, args.max_trials)


def cmd_simulate(args) -> int:
    code = _code(args)
    reference = _config(args, args.reference) if args.reference else None
    result = sweep(code, _config(args), parse_grid(args.ebn0), _rule(args), args.seed,
                   reference=reference, paired=args.paired, workers=args.workers)
    if args.out:
        write_results(result, args.out)
    else:
        sys.stdout.write(emit_results(result)[0])
    return 0


def cmd_optimize(args) -> int:
    code = _code(args)
    try:
        res = optimize_parameters(code, _config(args, args.reference), parse_grid(args.ebn0),
                                  _rule(args), args.seed, l_cap=args.lmax_cap,
                                  theta_step=args.theta_step, workers=args.workers)
    except OptimizationError as exc:
        print(f"optimize: {exc}", file=sys.stderr)
        return 2
    print(f"l_max*={res.l_max} theta*={res.theta:g}")
    print(res.table())
    return 0


def cmd_decode(args) -> int:
    code = _code(args)
    llr = read_llr_file(args.llr)
    out = decode(code, llr, _config(args))
    record = dict(codeword=out.codeword.to_hex(), queries=out.queries,
                  status=out.status.value, list_size=out.list_size,
                  p_not_in_list=out.p_not_in_list)
    print(json.dumps(record))
    return 0


def cmd_code_info(args) -> int:
    code = _code(args)
    info = dict(label=code.label, n=code.n, k=code.k, rate=code.rate,
                even_weight=code.even_weight,
                sphere_union_rate=sphere_union_rate(code.n, code.k),
                log2_first_candidate_reduction=math.log2(code.n + 1))
    print(json.dumps(info))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sygrand", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="BLER and guesswork sweep")
    _add_code_args(p)
    _add_decoder_args(p)
    _add_sim_args(p)
    p.add_argument("--reference", choices=[v.value for v in Variant],
                   help="also run this decoder and report log2 guesswork ratios")
    p.add_argument("--paired", action=argparse.BooleanOptionalAction, default=True,
                   help="reference sees the same channel realisations (default on)")
    p.add_argument("--out", help="CSV path; a .json report is written alongside")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="two-stage (l_max, theta) search")
    _add_code_args(p)
    _add_decoder_args(p, default="orbgrand")
    _add_sim_args(p)
    p.add_argument("--reference", choices=[v.value for v in Variant], default="orbgrand")
    p.add_argument("--lmax-cap", type=int, default=16)
    p.add_argument("--theta-step", type=float, default=0.01)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("decode", help="decode one LLR vector")
    _add_code_args(p)
    _add_decoder_args(p)
    p.add_argument("--llr", required=True, help="whitespace-separated LLRs")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("code-info", help="code parameters")
    _add_code_args(p)
    p.set_defaults(func=cmd_code_info)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, AlistParseError, CodeConstructionError) as exc:
        print(f"sygrand {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
