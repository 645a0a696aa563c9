"""Command-line front end.

    goldbach-audit classify 20 22
    goldbach-audit gsystem 22
    goldbach-audit partitions 12 100
    goldbach-audit bounds 3000000 --strict-constants
    goldbach-audit audit 22
    goldbach-audit scan --start 8 --end 1000000 --mode verify-very-strong --workers 4

Single-target commands print one JSON object per target.  ``scan`` writes
its report to stdout and progress plus the summary to stderr.

Exit codes: 0 clean, 1 scan finished with violations, 2 usage, 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .bounds import F_MIN_ARGUMENT, check_eq1, check_phi_bound, check_pi_bound, f_of
from .classification import bertrand_witness, classify, fast_counts
from .errors import (
    AuditNotApplicableError,
    CheckpointCorruptError,
    EmptySystemError,
    InvalidArgumentError,
    OutOfRangeError,
    ResourceLimitError,
    ResumeRefusedError,
)
from .gsystem import audit_chain, build_gsystem, count_partitions, distinct_odd_witness
from .scan import DEFAULT_SEGMENT, FORMATS, MODES, SPF_CAP, ScanConfig, expected_units, scan_range
from .sieve import build_sieve, build_spf

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("goldbach_audit")


def _even(text: str) -> int:
    try:
        v = int(text.replace("_", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 4 or v % 2:
        raise argparse.ArgumentTypeError(f"expected an even integer >= 4, got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _tables(limit: int):
    return build_sieve(max(limit, 3)), build_spf(max(min(limit, SPF_CAP), 2))


def _dump(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def cmd_classify(args) -> int:
    table, spf = _tables(max(args.targets))
    for t in args.targets:
        c = classify(table, spf, t)
        row = {"two_n": t, "h": c.h, "s": c.s, "q_primes": list(c.q_primes)}
        if not args.counts_only:
            row.update(
                p_primes=c.p_primes.tolist(),
                x_composites=c.x_composites.tolist(),
                a_integers=c.a_integers.tolist(),
            )
        counts = fast_counts(table, spf, t)
        row["phi_2n"] = counts.phi_2n
        if t > 6:
            row["bertrand_witness"] = bertrand_witness(table, t)
        _dump(row)
    return EXIT_OK


def cmd_gsystem(args) -> int:
    table, spf = _tables(max(args.targets))
    for t in args.targets:
        c = classify(table, spf, t)
        if c.h == 0:
            _dump({"two_n": t, "equations": []})
            continue
        g = build_gsystem(c)
        _dump({
            "two_n": t,
            "all_composite": g.all_composite,
            "equations": [
                {"j": e.j, "p": e.p, "complement": e.complement, "prime": e.complement_is_prime}
                for e in g.equations
            ],
        })
    return EXIT_OK


def cmd_partitions(args) -> int:
    table = build_sieve(max(max(args.targets), 3))
    for t in args.targets:
        pc = count_partitions(table, t)
        _dump({"two_n": t, "r": pc.r, "r_star": pc.r_star,
               "witness_p": distinct_odd_witness(table, t)})
    return EXIT_OK


def cmd_bounds(args) -> int:
    table, spf = _tables(max(args.targets))
    for t in args.targets:
        row = {"two_n": t, "strict_constants": args.strict_constants,
               "pi_bound_holds": check_pi_bound(table, t),
               "phi_bound_holds": check_phi_bound(spf, t) if t <= spf.limit else None}
        if t >= F_MIN_ARGUMENT:
            rep = check_eq1(fast_counts(table, spf, t), strict=args.strict_constants)
            row.update(
                f_value=rep.f_value,
                f_value_other=f_of(t, strict=not args.strict_constants),
                s_minus_h=rep.s_minus_h,
                eq1_holds=rep.eq1_holds,
                eq1_marginal=rep.eq1_marginal,
            )
        _dump(row)
    return EXIT_OK


def cmd_audit(args) -> int:
    table, spf = _tables(max(args.targets))
    for t in args.targets:
        c = classify(table, spf, t)
        try:
            rep = audit_chain(c, build_gsystem(c))
        except (AuditNotApplicableError, EmptySystemError) as exc:
            _dump({"two_n": t, "audit_applicable": False, "reason": str(exc)})
            continue
        _dump({
            "two_n": t, "audit_applicable": True, "h": rep.h, "s": rep.s,
            "premise_holds": rep.premise_holds,
            "top_relation_holds": rep.top_relation_holds,
            "forward_checked": rep.forward_checked,
            "forward_violations": list(rep.forward_violations),
            "forward_not_applicable": len(rep.forward_not_applicable),
            "backward_checked": rep.backward_checked,
            "backward_violations": list(rep.backward_violations),
            "backward_not_applicable": len(rep.backward_not_applicable),
            "floor_last_holds": rep.floor_last_holds,
            "floor_second_last_holds": rep.floor_second_last_holds,
            "h_minus_s_plus_1": rep.h_minus_s_plus_1,
        })
    return EXIT_OK


def cmd_scan(args) -> int:
    config = ScanConfig(
        start=args.start,
        end=args.end,
        mode=args.mode,
        workers=args.workers,
        segment=args.segment,
        output_format=args.format,
        checkpoint_path=args.checkpoint,
        strict_constants=args.strict_constants,
    )
    total = expected_units(config)

    def progress(done: int, last: int) -> None:
        log.info("unit %d done, through 2N = %d (of %d units this run)", done, last, total)

    summary = scan_range(config, sys.stdout, on_unit=progress)
    sys.stdout.flush()
    sys.stderr.write(json.dumps(summary.as_dict()) + "\n")
    return summary.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goldbach-audit",
        description="Goldbach partition counts, type-P classification and proof-step audits.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def targets(p):
        p.add_argument("targets", nargs="+", type=_even, metavar="2N")

    p = sub.add_parser("classify", help="Q/P/X/A sets of 2N")
    targets(p)
    p.add_argument("--counts-only", action="store_true", help="omit the materialised sets")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gsystem", help="equations 2N - P_j = a_{n_j}")
    targets(p)
    p.set_defaults(func=cmd_gsystem)

    p = sub.add_parser("partitions", help="r(2N) and r*(2N)")
    targets(p)
    p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("bounds", help="pi/phi bounds, f(2N) and s - h > f(2N)")
    targets(p)
    p.add_argument("--strict-constants", action="store_true",
                   help="use e^gamma and 2*1.25506 instead of 1.781 and 2.510")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("audit", help="evaluate the inequality rows for 2N")
    targets(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("scan", help="scan a range of even targets")
    p.add_argument("--start", type=_even, required=True)
    p.add_argument("--end", type=_even, required=True)
    p.add_argument("--mode", choices=MODES, default="verify-very-strong")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--segment", type=_positive, default=DEFAULT_SEGMENT,
                   help="targets per work unit")
    p.add_argument("--format", choices=FORMATS, default="json-lines")
    p.add_argument("--checkpoint", default=None, help="checkpoint file (resumed if present)")
    p.add_argument("--strict-constants", action="store_true")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        log.error("%s", exc)
        return EXIT_RESOURCE
    except (InvalidArgumentError, OutOfRangeError, ResumeRefusedError, CheckpointCorruptError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK
    except MemoryError:
        log.error("out of memory")
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
