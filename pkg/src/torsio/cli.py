"""Command line interface.

Exit codes: 0 success, 1 numerical failure, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import chainlib, resolve_path
from .alexander import abelian_torsion, alexander_polynomial, twisted_alexander
from .fgroup import (MalformedInput, MutationMove, NotAMutation, classify_mutation, load_knot,
                     mutant_presentation, positive_move)
from .mutlab import InsufficientSamples, MutationPair, sign_part, verify_main_theorem
from .repspace import (NoSolution, ReducibleOnly, Representation, dump_representations,
                       is_regular, solve_representations, tangent_to_cocycle)
from .torsionform import BadCertificate, PeripheralCertificate, orientation_sign, torsion_form
from .twisted import CoefficientSystem, twisted_complex, untwisted_real_complex

OK, NUMERICAL, MALFORMED = 0, 1, 2


class CommandFailed(Exception):
    """Numerical failure with a message for stderr."""


def load_entry(name):
    try:
        return load_knot(resolve_path(name).read_text())
    except FileNotFoundError as exc:
        raise MalformedInput(str(exc)) from exc


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _regular_reps(entry, theta, starts, seed):
    try:
        reps = solve_representations(entry.presentation, entry.meridian, theta, starts, seed)
    except (NoSolution, ReducibleOnly) as exc:
        raise CommandFailed(str(exc)) from exc
    return [r for r in reps if is_regular(r)[0]]


# ---------------------------------------------------------------------------
# subcommands


def cmd_torsion(args):
    entry = load_entry(args.knot)
    if entry.certificate is None:
        raise MalformedInput(f"{entry.name} carries no peripheral certificate")
    cert = PeripheralCertificate.from_json(entry.certificate)
    cert.validate(entry.presentation, entry.meridian, entry.longitude)
    reps = _regular_reps(entry, args.theta, args.starts, args.seed)
    if args.tangent_index >= len(reps):
        raise CommandFailed(f"only {len(reps)} regular representations at theta = {args.theta}")
    rep = reps[args.tangent_index]
    v = tangent_to_cocycle(rep, entry.meridian)
    value = torsion_form(rep, v, entry.presentation, entry.meridian, entry.longitude, cert,
                         tol=args.tol)
    _emit({"knot": entry.name, "theta": args.theta, "tangent_index": args.tangent_index,
           "regular_representations": len(reps), "torsion_form": value,
           "orientation_sign": orientation_sign(entry.presentation, entry.meridian),
           "tangent": "d/d theta of the meridian-angle family",
           "representation": rep.to_json()})
    return OK


def cmd_reps(args):
    entry = load_entry(args.knot)
    try:
        reps = solve_representations(entry.presentation, entry.meridian, args.theta,
                                     args.starts, args.seed)
    except (NoSolution, ReducibleOnly) as exc:
        raise CommandFailed(str(exc)) from exc
    text = dump_representations(reps) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_alexander(args):
    entry = load_entry(args.knot)
    if args.rep is None:
        r = abelian_torsion(entry.presentation, entry.meridian)
        _emit({"knot": entry.name, "kind": "abelian",
               "alexander_polynomial": [str(c) for c in
                                        alexander_polynomial(entry.presentation, entry.meridian)],
               "torsion": r.to_json()})
        return OK
    try:
        data = json.loads(Path(args.rep).read_text())
        if isinstance(data, list):
            data = data[args.index]
        rep = Representation.from_json(data, entry.presentation)
    except (OSError, json.JSONDecodeError, IndexError, KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad representation file: {exc}") from exc
    r = twisted_alexander(entry.presentation, rep, entry.meridian)
    _emit({"knot": entry.name, "kind": "adjoint twisted", "residual": rep.residual,
           "torsion": r.to_json()})
    return OK


def cmd_mutate(args):
    if not (args.classify or args.build):
        raise MalformedInput("mutate needs --classify or --build")
    try:
        pair = MutationPair.load(args.pair)
        d, recorded = pair.source.decomposition, pair.move.name
        name = pair.name
    except (KeyError, json.JSONDecodeError):
        entry = load_entry(args.pair)
        if entry.decomposition is None:
            raise MalformedInput(f"{entry.name} has no tangle decomposition")
        d, recorded, name = entry.decomposition, None, entry.name
    except FileNotFoundError as exc:
        raise MalformedInput(str(exc)) from exc
    if args.classify:
        rows = []
        for m in MutationMove.rotations():
            s = sign_part(d, m)
            rows.append({"move": m.name, "classification": classify_mutation(d, m),
                         "sign0": s.tau0, "sign_mu": s.mu, "sign1": s.tau1})
        _emit({"name": name, "signs": d.signs, "recorded_move": recorded,
               "positive_move": positive_move(d).name, "moves": rows})
    if args.build:
        m = MutationMove(args.move or recorded or positive_move(d).name)
        try:
            kind = classify_mutation(d, m)
        except NotAMutation as exc:
            raise MalformedInput(str(exc)) from exc
        p = mutant_presentation(d, m)
        _emit({"name": f"{name}^{m.name}", "move": m.name, "classification": kind,
               **p.to_json()}, args.out)
    return OK


def cmd_verify(args):
    try:
        pair = MutationPair.load(args.pair)
    except (KeyError, json.JSONDecodeError, FileNotFoundError) as exc:
        raise MalformedInput(f"bad pair document: {exc}") from exc
    try:
        report = verify_main_theorem(pair, args.samples, args.seed)
    except InsufficientSamples as exc:
        raise CommandFailed(str(exc)) from exc
    text = report.dumps()
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        out.with_suffix(".csv").write_text(report.to_csv())
    else:
        sys.stdout.write(text)
    verdict = {True: "PASS", False: "FAIL", None: "REPORT ONLY"}[report.passed]
    sys.stderr.write(f"{report.pair}: {verdict}\n")
    return OK if report.passed else NUMERICAL


def cmd_certificate(args):
    entry = load_entry(args.knot)
    if args.file:
        try:
            data = json.loads(Path(args.file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"bad certificate file: {exc}") from exc
    else:
        data = entry.certificate
    if data is None:
        raise MalformedInput(f"{entry.name} carries no peripheral certificate")
    cert = PeripheralCertificate.from_json(data)
    cert.validate(entry.presentation, entry.meridian, entry.longitude)
    out = {"knot": entry.name, "factors": len(cert.factors), "free_group_identity": True}
    if args.theta is not None:
        reps = solve_representations(entry.presentation, entry.meridian, args.theta,
                                     args.starts, args.seed, irreducible_only=False)
        out["chain_map_residuals"] = [
            cert.check_chain_map(entry.presentation, entry.meridian, entry.longitude, r.images)
            for r in reps]
    _emit(out)
    return OK


def cmd_dump(args):
    entry = load_entry(args.knot)
    if args.theta is None:
        C = untwisted_real_complex(entry.presentation)
    else:
        reps = solve_representations(entry.presentation, entry.meridian, args.theta,
                                     args.starts, args.seed)
        C = twisted_complex(entry.presentation, CoefficientSystem.adjoint(reps[args.index]))
    sys.stdout.write(C.dump())
    return OK


# ---------------------------------------------------------------------------


def _angle(text):
    theta = float(text)
    if not 0 < theta < np.pi:
        raise argparse.ArgumentTypeError("theta must lie strictly between 0 and pi")
    return theta


def build_parser():
    ap = argparse.ArgumentParser(prog="torsio", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def solver_opts(p, theta_required=True):
        p.add_argument("--theta", type=_angle, required=theta_required, default=None)
        p.add_argument("--starts", type=int, default=20)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("torsion", help="torsion form at a regular representation")
    p.add_argument("knot")
    solver_opts(p)
    p.add_argument("--tangent-index", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("reps", help="solve for SU(2) representations")
    p.add_argument("knot")
    solver_opts(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reps)

    p = sub.add_parser("alexander", help="abelian or adjoint twisted Alexander invariant")
    p.add_argument("knot")
    p.add_argument("--rep", help="representation JSON (object or list)")
    p.add_argument("--index", type=int, default=0)
    p.set_defaults(func=cmd_alexander)

    p = sub.add_parser("mutate", help="classify moves or build a mutant presentation")
    p.add_argument("pair", help="pair document or knot with a tangle decomposition")
    p.add_argument("--classify", action="store_true")
    p.add_argument("--build", action="store_true")
    p.add_argument("--move", choices=["Rx", "Ry", "Rz"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("verify", help="compare torsion forms across a mutant pair")
    p.add_argument("pair")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="report path; a .csv sidecar is written next to it")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certificate", help="validate a peripheral certificate")
    p.add_argument("knot")
    p.add_argument("--file", help="certificate JSON (default: the one in the knot file)")
    solver_opts(p, theta_required=False)
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("dump", help="plain-text listing of a cochain or chain complex")
    p.add_argument("knot")
    solver_opts(p, theta_required=False)
    p.add_argument("--index", type=int, default=0)
    p.set_defaults(func=cmd_dump)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return MALFORMED if exc.code else OK
    try:
        return args.func(args)
    except (MalformedInput, BadCertificate) as exc:
        sys.stderr.write(f"malformed input: {exc}\n")
        return MALFORMED
    except (CommandFailed, ArithmeticError, ValueError, RuntimeError,
            np.linalg.LinAlgError, chainlib.IllConditioned) as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
