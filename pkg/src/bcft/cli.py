"""Command-line front end for every pipeline stage.

Each subcommand delegates to one module operation and emits a single
structured document (``--format structured``) or a plain text listing
(``--format text``).  Every run prints its fully-resolved
configuration, defaults included, to stderr before the results,
so stdout stays machine-readable.

Exit codes: 0 success; 1 validation error (bad flags, malformed input,
rejected model data); 2 check failure (a mathematical consistency
check exceeded its tolerance), kept distinct so CI can assert on it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CHECK = 2

DEFAULT_PRECISION = 50
DEFAULT_ORDER = 400
DEFAULT_TOL = 1e-8


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with the validation code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, "%s: error: %s\n" % (self.prog, message))


def _add_common(p: argparse.ArgumentParser, order_default: int = DEFAULT_ORDER):
    g = p.add_argument_group("model selection")
    g.add_argument("--model", choices=["su2", "minimal"], help="built-in family")
    g.add_argument("--level", type=int, help="su2 level k")
    g.add_argument("--p", type=int, help="minimal-model label p")
    g.add_argument("--pp", type=int, help="minimal-model label p' (2 <= p' < p)")
    g.add_argument("--model-file", help="path to a structured model document")
    n = p.add_argument_group("numeric knobs")
    n.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    n.add_argument("--order", type=int, default=order_default)
    n.add_argument(
        "--beta", type=float, default=None, help="inverse temperature (default 2*pi)"
    )
    o = p.add_argument_group("output")
    o.add_argument("--out", default=None, help="write results to this file")
    o.add_argument("--format", choices=["text", "structured"], default="text")
    o.add_argument("--threads", type=int, default=1, help="cap internal parallelism")
    o.add_argument("--cache", default=None, metavar="DIR", help="enable the on-disk cache")


def _add_invariant_choice(p: argparse.ArgumentParser):
    g = p.add_argument_group("invariant selection")
    g.add_argument(
        "--diagonal",
        action="store_true",
        help="use the diagonal invariant with the regular nimrep (default)",
    )
    g.add_argument(
        "--invariant-tag",
        help="pick the physical invariant with this tag (built-in families)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="bcft", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("models", help="build and validate modular data")
    _add_common(p)

    p = sub.add_parser("fusion", help="fusion coefficients via the Verlinde sum")
    _add_common(p)

    p = sub.add_parser("invariants", help="enumerate physical modular invariants")
    _add_common(p)

    nim = sub.add_parser("nimreps", help="fusion-graph representations")
    nimsub = nim.add_subparsers(dest="subcommand", required=True, metavar="ACTION")
    p = nimsub.add_parser("enumerate", help="all nimreps of a given boundary count")
    _add_common(p)
    p.add_argument("--size", type=int, required=True, help="number of boundaries")
    p = nimsub.add_parser("verify", help="check a stored nimrep against the fusion ring")
    _add_common(p)
    p.add_argument("--nimrep-file", required=True, help="structured nimrep document")
    p = nimsub.add_parser("generate", help="grow a nimrep from a fusion graph")
    _add_common(p)
    p.add_argument(
        "--generator-file", required=True, help="JSON adjacency matrix of the graph"
    )

    p = sub.add_parser("characters", help="exact q-series of every sector")
    _add_common(p)

    p = sub.add_parser("annulus", help="boundary-pair character content")
    _add_common(p)
    p.add_argument(
        "--nimrep",
        default="regular",
        help='"regular" or a path to a structured nimrep document',
    )
    p.add_argument("--pair", required=True, help="boundary pair, e.g. 1,2")

    chk = sub.add_parser("check", help="channel-duality residual checks")
    chksub = chk.add_subparsers(dest="subcommand", required=True, metavar="CHECK")
    p = chksub.add_parser("s-transform", help="characters against the S matrix")
    _add_common(p)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p = chksub.add_parser("heat-kernel", help="open/closed channel agreement")
    _add_common(p)
    _add_invariant_choice(p)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("indices", help="index chain of a chiral extension")
    _add_common(p)
    p.add_argument(
        "--theta",
        required=True,
        help='sector content, e.g. "0:1,2:1" (indices) or "1,1:1;1,3:1" (names)',
    )

    p = sub.add_parser("report", help="full document for one (model, invariant, nimrep)")
    _add_common(p)
    _add_invariant_choice(p)

    return parser


# ---------------------------------------------------------------------------
# resolution helpers


def _resolve_model(args):
    from .modular_data import build_minimal, build_su2, load_model

    if args.model_file:
        doc = json.loads(Path(args.model_file).read_text(encoding="utf-8"))
        return load_model(doc, args.precision)
    if args.model == "su2":
        if args.level is None:
            raise ValueError("--model su2 needs --level")
        return build_su2(args.level, args.precision)
    if args.model == "minimal":
        if args.p is None or args.pp is None:
            raise ValueError("--model minimal needs --p and --pp")
        return build_minimal(args.p, args.pp, args.precision)
    raise ValueError("select a model with --model or --model-file")


def _model_descriptor(args) -> dict:
    """Canonical cache-key ingredient for the selected model."""
    if args.model_file:
        data = Path(args.model_file).read_bytes()
        return {"file_sha256": hashlib.sha256(data).hexdigest()}
    if args.model == "su2":
        return {"family": "su2", "level": args.level}
    if args.model == "minimal":
        return {"family": "minimal", "p": args.p, "pp": args.pp}
    return {}


def _parse_pair(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError('--pair must look like "1,2"')
    return int(parts[0]), int(parts[1])


def _parse_theta(md, text: str) -> dict:
    """Sector multiplicities from "KEY:MULT" items.

    Items are separated by ";" (needed when sector names contain
    commas) or "," when unambiguous; KEY is a sector index or name.
    """
    items = text.split(";") if ";" in text else text.split(",")
    theta = {}
    for item in items:
        key, sep, mult = item.rpartition(":")
        if not sep:
            raise ValueError('--theta items must look like "KEY:MULT"')
        try:
            idx = int(key)
        except ValueError:
            idx = md.sector_named(key)
        theta[idx] = int(mult)
    return theta


def _resolve_invariant_and_nimrep(args, md, fr):
    from .invariants import diagonal_invariant, enumerate_physical
    from .nimreps import enumerate_su2_nimreps, regular_nimrep, spectrum_match

    tag = getattr(args, "invariant_tag", None)
    if tag is None:
        return diagonal_invariant(md), regular_nimrep(fr)
    matches = [z for z in enumerate_physical(md) if z.tag == tag]
    if not matches:
        raise ValueError("no physical invariant tagged %r for this model" % tag)
    Z = matches[0]
    if md.family != "su2":
        raise ValueError("--invariant-tag requires an su2 model")
    for nr in enumerate_su2_nimreps(md, Z.size):
        if spectrum_match(nr, Z, md).ok:
            return Z, nr
    from .errors import CheckFailure

    raise CheckFailure("no nimrep matches the spectrum of invariant %s" % tag)


def _load_nimrep(args, fr):
    from .nimreps import nimrep_from_document, regular_nimrep

    if args.nimrep == "regular":
        return regular_nimrep(fr)
    doc = json.loads(Path(args.nimrep).read_text(encoding="utf-8"))
    return nimrep_from_document(doc)


def _cached(args, operation: str, inputs: dict, compute):
    """Run compute() through the cache when --cache is set."""
    if not args.cache:
        return compute()
    from .persistence import Cache, cache_key, make_entry

    cache = Cache(args.cache)
    key = cache_key(operation, inputs, args.precision, getattr(args, "order", None))
    payload = cache.load(key)
    if payload is not None:
        return payload
    doc = compute()
    cache.store(make_entry(operation, inputs, doc, args.precision, getattr(args, "order", None)))
    return doc


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (document, exit_code)


def _cmd_models(args):
    from .modular_data import model_to_document

    if not (args.model or args.model_file):
        return {
            "format": "bcft-model-list/1",
            "families": [
                {"family": "su2", "flags": "--model su2 --level K"},
                {"family": "minimal", "flags": "--model minimal --p P --pp PP"},
                {"family": "custom", "flags": "--model-file PATH"},
            ],
        }, EXIT_OK
    md = _resolve_model(args)
    doc = _cached(
        args, "models", _model_descriptor(args), lambda: model_to_document(md)
    )
    return doc, EXIT_OK


def _cmd_fusion(args):
    from .fusion import fusion_document, verlinde

    md = _resolve_model(args)
    doc = _cached(
        args,
        "fusion",
        _model_descriptor(args),
        lambda: fusion_document(verlinde(md)),
    )
    return doc, EXIT_OK


def _cmd_invariants(args):
    from .invariants import enumerate_physical, invariant_document
    from .modular_data import model_name

    md = _resolve_model(args)

    def compute():
        invs = enumerate_physical(md)
        return {
            "format": "bcft-invariant-list/1",
            "model": model_name(md),
            "count": len(invs),
            "invariants": [invariant_document(z) for z in invs],
        }

    return _cached(args, "invariants", _model_descriptor(args), compute), EXIT_OK


def _cmd_nimreps_enumerate(args):
    from .modular_data import model_name
    from .nimreps import enumerate_su2_nimreps, nimrep_document

    md = _resolve_model(args)

    def compute():
        nrs = enumerate_su2_nimreps(md, args.size)
        return {
            "format": "bcft-nimrep-list/1",
            "model": model_name(md),
            "size": args.size,
            "count": len(nrs),
            "nimreps": [nimrep_document(nr) for nr in nrs],
        }

    inputs = dict(_model_descriptor(args), size=args.size)
    return _cached(args, "nimreps-enumerate", inputs, compute), EXIT_OK


def _cmd_nimreps_verify(args):
    from .fusion import verlinde
    from .nimreps import nimrep_from_document, verify

    md = _resolve_model(args)
    doc = json.loads(Path(args.nimrep_file).read_text(encoding="utf-8"))
    nr = nimrep_from_document(doc)
    rep = verify(nr, verlinde(md))
    out = {
        "format": "bcft-verify/1",
        "ok": rep.ok,
        "violations": [list(map(str, v)) for v in rep.violations],
    }
    return out, EXIT_OK if rep.ok else EXIT_CHECK


def _cmd_nimreps_generate(args):
    from .nimreps import generate_from_generator, nimrep_document

    md = _resolve_model(args)
    G = json.loads(Path(args.generator_file).read_text(encoding="utf-8"))
    nr = generate_from_generator(tuple(tuple(int(x) for x in row) for row in G), md)
    return nimrep_document(nr), EXIT_OK


def _cmd_characters(args):
    from .characters import characters_for, qseries_document
    from .modular_data import model_name

    md = _resolve_model(args)

    def compute():
        chis = characters_for(md, args.order)
        return {
            "format": "bcft-characters/1",
            "model": model_name(md),
            "order": args.order,
            "characters": [
                {"sector": sec.name, "series": qseries_document(chi)}
                for sec, chi in zip(md.sectors, chis)
            ],
        }

    return _cached(args, "characters", _model_descriptor(args), compute), EXIT_OK


def _cmd_annulus(args):
    from .fusion import verlinde
    from .modular_data import model_name
    from .report import annulus, annulus_document

    md = _resolve_model(args)
    fr = verlinde(md)
    nr = _load_nimrep(args, fr)
    a, b = _parse_pair(args.pair)

    def compute():
        spectrum = annulus(md, nr, a, b, args.order)
        doc = {"format": "bcft-annulus/1", "model": model_name(md)}
        doc.update(annulus_document(md, spectrum))
        return doc

    inputs = dict(_model_descriptor(args), nimrep=args.nimrep, pair=[a, b])
    return _cached(args, "annulus", inputs, compute), EXIT_OK


def _cmd_check_s_transform(args):
    from .characters import s_transform_residual
    from .hp import num_str
    from .modular_data import model_name

    md = _resolve_model(args)
    res = s_transform_residual(md, args.order, args.beta, args.precision, tol=args.tol)
    ok = res < args.tol
    doc = {
        "format": "bcft-check/1",
        "check": "s-transform",
        "model": model_name(md),
        "residual": num_str(res, args.precision),
        "tolerance": repr(args.tol),
        "ok": ok,
    }
    return doc, EXIT_OK if ok else EXIT_CHECK


def _cmd_check_heat_kernel(args):
    from .fusion import verlinde
    from .hp import num_str
    from .modular_data import model_name
    from .nimreps import psi_matrix
    from .report import heat_kernel_check

    md = _resolve_model(args)
    fr = verlinde(md)
    Z, nr = _resolve_invariant_and_nimrep(args, md, fr)
    psi = psi_matrix(nr, Z, md)
    worst = 0
    for a in nr.labels:
        for b in nr.labels:
            res = heat_kernel_check(
                md, nr, Z, a, b, args.beta, args.order, args.precision,
                tol=args.tol, psi=psi,
            )
            worst = max(worst, res)
    ok = worst < args.tol
    doc = {
        "format": "bcft-check/1",
        "check": "heat-kernel",
        "model": model_name(md),
        "invariant_tag": Z.tag,
        "pairs": nr.size * nr.size,
        "max_residual": num_str(worst, args.precision),
        "tolerance": repr(args.tol),
        "ok": ok,
    }
    return doc, EXIT_OK if ok else EXIT_CHECK


def _cmd_indices(args):
    from .modular_data import model_name
    from .report import index_document, index_report

    md = _resolve_model(args)
    theta = _parse_theta(md, args.theta)

    def compute():
        rep = index_report(md, theta)
        doc = {"model": model_name(md)}
        doc.update(index_document(md, rep))
        doc["format"] = "bcft-index/1"
        return doc

    inputs = dict(
        _model_descriptor(args),
        theta=sorted([k, v] for k, v in theta.items()),
    )
    return _cached(args, "indices", inputs, compute), EXIT_OK


def _cmd_report(args):
    from .fusion import verlinde
    from .report import full_report

    md = _resolve_model(args)
    fr = verlinde(md)
    Z, nr = _resolve_invariant_and_nimrep(args, md, fr)

    def compute():
        return full_report(md, Z, nr, args.order, args.beta, args.precision)

    inputs = dict(
        _model_descriptor(args),
        invariant_tag=getattr(args, "invariant_tag", None),
        beta=repr(args.beta) if args.beta is not None else "2*pi",
    )
    return _cached(args, "report", inputs, compute), EXIT_OK


_HANDLERS = {
    ("models", None): _cmd_models,
    ("fusion", None): _cmd_fusion,
    ("invariants", None): _cmd_invariants,
    ("nimreps", "enumerate"): _cmd_nimreps_enumerate,
    ("nimreps", "verify"): _cmd_nimreps_verify,
    ("nimreps", "generate"): _cmd_nimreps_generate,
    ("characters", None): _cmd_characters,
    ("annulus", None): _cmd_annulus,
    ("check", "s-transform"): _cmd_check_s_transform,
    ("check", "heat-kernel"): _cmd_check_heat_kernel,
    ("indices", None): _cmd_indices,
    ("report", None): _cmd_report,
}


# ---------------------------------------------------------------------------
# output


def _print_config(args):
    """Fully-resolved configuration, defaults included, on stderr."""
    command = " ".join(
        x for x in [args.command, getattr(args, "subcommand", None)] if x
    )
    lines = ["resolved configuration:", "  command: %s" % command]
    skip = {"command", "subcommand"}
    for key in sorted(vars(args)):
        if key in skip:
            continue
        val = getattr(args, key)
        if key == "beta":
            val = "2*pi" if val is None else repr(val)
        elif key == "cache":
            val = val if val else "disabled"
        elif key == "out":
            val = val if val else "stdout"
        elif val is None:
            val = "-"
        lines.append("  %s: %s" % (key.replace("_", "-"), val))
    sys.stderr.write("\n".join(lines) + "\n")


def _emit(args, doc):
    from .persistence import canonical_json, export

    if args.format == "structured":
        text = canonical_json(doc) + "\n"
    else:
        text = export(doc, "text")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads and args.threads > 0:
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, str(args.threads))
    _print_config(args)

    from .errors import (
        CheckFailure,
        DegenerateExponents,
        IntegralityFailure,
        MigrationError,
        ModelValidationError,
        NegativityFailure,
        RationalizationFailure,
        SearchBudgetExceeded,
        SizeMismatch,
        SpectralRadiusTooLarge,
    )

    check_errors = (
        CheckFailure,
        DegenerateExponents,
        IntegralityFailure,
        NegativityFailure,
        RationalizationFailure,
        SearchBudgetExceeded,
        SizeMismatch,
        SpectralRadiusTooLarge,
    )
    handler = _HANDLERS[(args.command, getattr(args, "subcommand", None))]
    try:
        doc, code = handler(args)
    except check_errors as exc:
        sys.stderr.write("check failed: %s\n" % exc)
        return EXIT_CHECK
    except (ModelValidationError, MigrationError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_VALIDATION
    _emit(args, doc)
    return code


if __name__ == "__main__":
    sys.exit(main())
