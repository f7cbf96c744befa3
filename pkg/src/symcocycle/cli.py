"""Command-line interface.

Subcommands:
  certify        full pipeline: derived order, envelope, p-quotient, verdict
  oracle         direct linear-algebra computation of the symmetric cohomology
  derived        order of the derived subgroup of a group file
  envelope       write the conjugation-envelope presentation to a .fpres file
  verify-cocycle check a cochain dump against the cocycle identity

Exit codes: 0 completed computation (any verdict), 1 runtime/file errors,
2 usage errors, 3 cross-check disagreement between the two routes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .certify import Certificate, attach_oracle, certify, file_checksum
from .cocycle import (
    SymmetricCochain,
    extract_nontrivial_cocycle,
    symmetric_h2,
    verify_cocycle,
)
from .errors import ParseError, ResourceLimitError, ValidationError
from .groups import FiniteGroup, conjugacy_classes, derived_subgroup, load_group_file
from .pquotient import DEFAULT_COLLECT_CAP
from .presentation import dump_fpres, envelope_presentation

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DISAGREEMENT = 3


def _collect_cap() -> int:
    raw = os.environ.get("QENV_MAX_STEPS")
    if not raw:
        return DEFAULT_COLLECT_CAP
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"QENV_MAX_STEPS must be an integer, got {raw!r}") from None


def _load(path: str) -> FiniteGroup:
    try:
        return load_group_file(path)
    except OSError as exc:
        raise ParseError(f"cannot read group file {path}: {exc}") from exc


def cmd_certify(args) -> int:
    G = _load(args.group)
    cert = certify(
        G,
        args.prime,
        args.maxclass,
        fixture_checksum=file_checksum(args.group),
        tool_version=__version__,
        collect_cap=_collect_cap(),
    )
    status = EXIT_OK
    cochain = None
    if args.with_oracle or args.emit_cocycle:
        cert = attach_oracle(cert, G)
        oracle_trivial = not cert.oracle_invariant_factors
        if args.emit_cocycle:
            cochain = extract_nontrivial_cocycle(G)
            if cochain is not None:
                with open(args.emit_cocycle, "w", encoding="utf-8") as fh:
                    fh.write(cochain.dump())
                cert.cocycle_path = args.emit_cocycle
            else:
                print("no nontrivial symmetric cocycle exists; nothing written")
        if cert.verdict == "NONTRIVIAL" and oracle_trivial:
            print("DISAGREEMENT: quotient route says NONTRIVIAL, oracle is trivial")
            status = EXIT_DISAGREEMENT
    if args.report:
        cert.write(args.report)
    sys.stdout.write(cert.to_text())
    return status


def cmd_oracle(args) -> int:
    G = _load(args.group)
    h2 = symmetric_h2(G)
    part = conjugacy_classes(G)
    report = {
        "group_order": G.order,
        "class_count": part.class_count,
        "oracle_invariant_factors": list(h2.invariant_factors),
        "nontrivial": not h2.is_trivial,
    }
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            if args.report.endswith(".json"):
                fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
            else:
                for key, value in report.items():
                    fh.write(f"{key}: {value}\n")
    print(f"symmetric cohomology: {h2}")
    return EXIT_OK


def cmd_derived(args) -> int:
    G = _load(args.group)
    print(len(derived_subgroup(G)))
    return EXIT_OK


def cmd_envelope(args) -> int:
    G = _load(args.group)
    P = envelope_presentation(G)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dump_fpres(P))
    print(
        f"{P.ngens} generators, {G.order * G.order} raw relators,"
        f" {len(P.relators)} after reduction -> {args.out}"
    )
    return EXIT_OK


def cmd_verify_cocycle(args) -> int:
    G = _load(args.group)
    with open(args.cochain, "r", encoding="utf-8") as fh:
        cochain = SymmetricCochain.parse(fh.read())
    ok, witness = verify_cocycle(G, cochain)
    if ok:
        print("COCYCLE")
    else:
        print(f"NOT_COCYCLE at triple {witness}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symcocycle",
        description="Certify nontrivial symmetric 2-cocycle classes of finite groups.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_cert = sub.add_parser("certify", help="run the full certification pipeline")
    p_cert.add_argument("--group", required=True, help=".mtab or .perm group file")
    p_cert.add_argument("--prime", type=int, default=2, help="quotient prime (default 2)")
    p_cert.add_argument(
        "--class", dest="maxclass", type=int, default=3, help="quotient class bound (default 3)"
    )
    p_cert.add_argument("--report", help="write the certificate (.json by extension)")
    p_cert.add_argument(
        "--with-oracle", action="store_true", help="cross-check with the direct oracle"
    )
    p_cert.add_argument(
        "--emit-cocycle", metavar="PATH", help="write an explicit non-coboundary cocycle"
    )
    p_cert.set_defaults(func=cmd_certify)

    p_oracle = sub.add_parser("oracle", help="direct symmetric-cohomology computation")
    p_oracle.add_argument("--group", required=True)
    p_oracle.add_argument("--report", help="write a small report (.json by extension)")
    p_oracle.set_defaults(func=cmd_oracle)

    p_derived = sub.add_parser("derived", help="order of the derived subgroup")
    p_derived.add_argument("--group", required=True)
    p_derived.set_defaults(func=cmd_derived)

    p_env = sub.add_parser("envelope", help="write the envelope presentation")
    p_env.add_argument("--group", required=True)
    p_env.add_argument("--out", required=True, help="output .fpres path")
    p_env.set_defaults(func=cmd_envelope)

    p_vc = sub.add_parser("verify-cocycle", help="check a cochain dump")
    p_vc.add_argument("--group", required=True)
    p_vc.add_argument("--cochain", required=True)
    p_vc.set_defaults(func=cmd_verify_cocycle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, ResourceLimitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
