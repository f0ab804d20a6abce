"""Command-line interface.

Exit codes: 0 success, 1 a check failed (or a pipeline stage failed),
2 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import serialize
from .errors import (InvalidLaw, InvalidPoint, ModulusMismatch, RStandardError, SentenceSyntaxError,
                     UnboundVariable)
from .zp import looks_prime

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    prime: int | None = None
    precision: int | None = None
    cutoff: int | None = None
    budget: int = 4
    inputs: list = field(default_factory=list)
    output: str | None = None

    def check(self):
        if self.prime is not None and not looks_prime(self.prime):
            raise InputError(f"{self.prime} is not prime")
        if self.precision is not None and self.precision < 1:
            raise InputError("--precision must be >= 1")
        if self.cutoff is not None and self.cutoff < 2:
            raise InputError("--cutoff must be >= 2")
        if self.budget < 1:
            raise InputError("--budget must be >= 1")


# ---------------------------------------------------------------------------
# helpers


class Session:
    def __init__(self, args):
        self.args = args
        self.config = RunConfig(args.command, None, args.precision, args.cutoff, args.budget,
                                [v for k, v in vars(args).items() if k in ("law", "points", "certificate",
                                                                           "sentence", "witness") and v],
                                args.output)
        self.config.check()

    def law(self):
        try:
            law = serialize.load_law(self.args.law, self.args.precision, self.args.cutoff)
        except (InvalidLaw, ValueError) as exc:
            raise InputError(str(exc)) from exc
        self.config.prime = law.prime
        return law

    def points(self, law, path=None):
        data = serialize.load_json(path or self.args.points)
        try:
            return serialize.points_from_json(law, data)
        except ModulusMismatch as exc:
            raise InputError(str(exc)) from exc
        except (InvalidPoint, ValueError) as exc:
            raise InputError(f"{path or self.args.points}: {exc}") from exc

    def emit(self, payload, summary: str):
        text = serialize.dumps(payload)
        if self.args.output:
            Path(self.args.output).write_text(text)
        if self.args.json:
            sys.stdout.write(text)
        else:
            print(summary)


def _require_zp(law):
    if not law.over_zp:
        raise InputError("this command needs a law over Zp (no parameter variables)")


# ---------------------------------------------------------------------------
# commands


def cmd_validate(s: Session) -> int:
    from .fgl import validate_law
    law = s.law()
    rep = validate_law(law)
    lines = [f"{law.name}: {'valid' if rep.passed else 'INVALID'} (p={law.prime}, k={law.precision}, "
             f"D={law.descriptor.degree_cutoff}, N={law.level})"]
    for c in rep.failures():
        lines.append(f"  {c.name} fails in component {c.component}: witness {c.witness}")
    s.emit(rep.to_dict(), "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_mul(s: Session) -> int:
    from .fgl import gmul
    law = s.law()
    pts = s.points(law)
    acc = law.identity()
    for P in pts:
        acc = gmul(law, acc, P)
    s.emit({"product": serialize.point_to_json(acc)}, acc.format())
    return EXIT_OK


def cmd_inv(s: Session) -> int:
    from .fgl import ginv
    law = s.law()
    out = [ginv(law, P) for P in s.points(law)]
    s.emit({"inverses": [serialize.point_to_json(P) for P in out]}, "\n".join(P.format() for P in out))
    return EXIT_OK


def cmd_bracket(s: Session) -> int:
    from .lazard import lazard_bracket
    law = s.law()
    _require_zp(law)
    pts = s.points(law)
    if len(pts) < 2:
        raise InputError("bracket needs two points")
    res = lazard_bracket(law, pts[0], pts[1])
    s.emit({"bracket": serialize.point_to_json(res.point), "stabilization_index": res.index},
           f"{res.point.format()}  (stabilized at n = {res.index})")
    return EXIT_OK


def cmd_lattice(s: Session) -> int:
    from .lazard import lie_lattice_of
    law = s.law()
    _require_zp(law)
    L, _ = lie_lattice_of(law)
    lines = [f"rank {L.rank}, precision {L.precision}, powerful: {L.is_powerful()}"]
    for i, j, l, c in L.to_dict()["brackets"]:
        lines.append(f"  [e{i}, e{j}] has e{l}-coefficient {c}")
    s.emit(L.to_dict(), "\n".join(lines))
    return EXIT_OK


def cmd_represent(s: Session) -> int:
    from .lazard import build_rep, lie_lattice_of, uniform_embedding
    law = s.law()
    _require_zp(law)
    L, basis = lie_lattice_of(law)
    supplied = None
    if s.args.matrices:
        data = serialize.load_json(s.args.matrices)
        if data.get("prime", law.prime) != law.prime:
            raise InputError("matrices file uses a different prime")
        supplied = data.get("matrices")
        if not isinstance(supplied, list):
            raise InputError("matrices file must contain a 'matrices' list")
    rep = build_rep(L, s.args.strategy, supplied)
    _, cert = uniform_embedding(law, rep, basis, pairs=s.args.pairs, seed=s.args.seed)
    payload = {"lattice": L.to_dict(), "representation": rep.to_dict(), "certificate": cert.to_dict()}
    s.emit(payload, (f"strategy {rep.strategy}, l = {rep.degree}; induced degree n = {cert.degree} "
                     f"<= {cert.degree_bound}; certificate {'valid' if cert.valid else 'INVALID'}"))
    return EXIT_OK if cert.valid else EXIT_FAIL


def cmd_discriminate(s: Session) -> int:
    from .discriminate import discriminate_pipeline
    law = s.law()
    pts = s.points(law)
    cert = discriminate_pipeline(law, pts, budget=s.args.budget, strategy=s.args.strategy, seed=s.args.seed)
    a = ", ".join(str(x.residue) for x in cert.evaluation_point) or "none"
    ev = cert.search
    summary = (f"certificate {'valid' if cert.valid else 'INVALID'}: a = ({a})"
               + (f", v(r(a)) = {ev.valuation} < {ev.guarantee}" if ev else "")
               + f", degree n = {cert.degree}, {len(pts)} points with distinct images: "
               + str(cert.checks["pairwise_distinct"]))
    s.emit(cert.to_dict(), summary)
    return EXIT_OK if cert.valid else EXIT_FAIL


def cmd_verify(s: Session) -> int:
    from .discriminate import verify_certificate
    data = serialize.load_json(s.args.certificate)
    try:
        rep = verify_certificate(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"certificate is missing data: {exc}") from exc
    lines = [f"{'ok  ' if ok else 'FAIL'} {name}" for name, ok in rep.checks]
    s.emit(rep.to_dict(), "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_check(s: Session) -> int:
    from .discriminate import DiscriminationCertificate
    from .sentences import check_transfer, parse_sentence
    law = s.law()
    data = serialize.load_json(s.args.certificate)
    try:
        cert = DiscriminationCertificate.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{s.args.certificate}: not a certificate ({exc})") from exc
    if cert.law.prime != law.prime:
        raise InputError(f"certificate is over p = {cert.law.prime}, law over p = {law.prime}")
    if serialize.law_to_json(cert.law)["components"] != serialize.law_to_json(law)["components"]:
        raise InputError("the law file does not match the certificate's domain law")
    try:
        text = Path(s.args.sentence).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {s.args.sentence}: {exc.strerror}") from exc
    sentence = parse_sentence(text.strip())
    wdata = serialize.load_json(s.args.witness)
    if wdata.get("prime", law.prime) != law.prime:
        raise InputError("witness file uses a different prime")
    try:
        assignment = {v: serialize.point_from_json(law, P) for v, P in wdata.get("assignment", {}).items()}
        constants = [serialize.point_from_json(law, P) for P in wdata.get("constants", [])]
    except (InvalidPoint, ValueError) as exc:
        raise InputError(f"{s.args.witness}: {exc}") from exc
    try:
        rep = check_transfer(sentence, assignment, cert, constants)
    except UnboundVariable as exc:
        raise InputError(str(exc)) from exc
    lines = [rep.sentence, f"verdict: {rep.verdict}"]
    for a in rep.atoms:
        lines.append(f"  {a.text}: G {a.in_group} [{a.group_marking}], image {a.in_image} [{a.image_marking}]")
    s.emit(rep.to_dict(), "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_selftest(s: Session) -> int:
    from .selftest import run_all
    quiet = s.args.json
    results = run_all(None if quiet else print)
    payload = {"criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
                            for r in results]}
    if s.args.output:
        Path(s.args.output).write_text(serialize.dumps(payload))
    if quiet:
        sys.stdout.write(serialize.dumps(payload))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {
    "validate": (cmd_validate, "check the group-law axioms", ["law"]),
    "mul": (cmd_mul, "multiply the points of a points file", ["law", "points"]),
    "inv": (cmd_inv, "invert each point of a points file", ["law", "points"]),
    "bracket": (cmd_bracket, "Lazard bracket of the first two points", ["law", "points"]),
    "lattice": (cmd_lattice, "structure constants of the Lazard lattice", ["law"]),
    "represent": (cmd_represent, "faithful representation and linear embedding", ["law"]),
    "discriminate": (cmd_discriminate, "separate points by a linear group, emit a certificate",
                     ["law", "points"]),
    "verify": (cmd_verify, "re-check a discrimination certificate", ["certificate"]),
    "check": (cmd_check, "transfer an existential sentence through a certificate",
              ["law", "certificate", "sentence", "witness"]),
    "selftest": (cmd_selftest, "run the acceptance suite", []),
}


def _common(suppress: bool) -> argparse.ArgumentParser:
    # flags are accepted before or after the command; the subcommand copy
    # must not overwrite values given earlier with its defaults
    def dflt(v):
        return argparse.SUPPRESS if suppress else v

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=dflt(None), help="override the precision k")
    common.add_argument("--cutoff", type=int, default=dflt(None), help="override the degree cutoff D")
    common.add_argument("--budget", type=int, default=dflt(4), help="search budget B for evaluation points")
    common.add_argument("-o", "--output", default=dflt(None), help="also write the JSON report here")
    common.add_argument("--json", action="store_true", default=dflt(False),
                        help="print the JSON report instead of a summary")
    common.add_argument("--seed", type=int, default=dflt(0), help="seed for sampled checks")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(False)
    sub_common = _common(True)
    parser = argparse.ArgumentParser(prog="rstandard", parents=[common],
                                     description="Linearity and discrimination for standard groups over Zp[[t]].")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text, positionals) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, parents=[sub_common])
        for pos in positionals:
            p.add_argument(pos, help="law JSON file or builtin:<name>" if pos == "law" else f"{pos} file")
        if name in ("represent", "discriminate"):
            p.add_argument("--strategy", default="auto",
                           choices=["auto", "abelian", "adjoint", "nilpotent", "supplied"])
        if name == "represent":
            p.add_argument("--matrices", help="JSON file with supplied matrices")
            p.add_argument("--pairs", type=int, default=100, help="random pairs for the multiplicativity check")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        session = Session(args)
        return COMMANDS[args.command][0](session)
    except (InputError, serialize.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SentenceSyntaxError as exc:
        print(f"error: sentence syntax: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RStandardError as exc:
        where = f" [stage: {exc.stage}]" if exc.stage else ""
        print(f"failed{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
