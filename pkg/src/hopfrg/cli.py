"""``hopfrg`` command line."""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import algebra
from .algebra import H, K
from .characters import (
    CharFileError,
    CharSpec,
    LinMap,
    birkhoff,
    conv_inverse,
    convolve,
    parse_characters,
    parse_inline,
    render_character,
)
from .forests import ForestSyntaxError, enumerate_forests, enumerate_k_forests, enumerate_k_trees, enumerate_trees, parse_forest
from .laurent import LaurentSyntaxError, PoleAtZero, UnknownParameter, declare_parameters
from .renorm import BETA_METHODS, Infeasible, b_alpha, beta, construct_local_minus, flow, locality_check, r_tilde, rg_flow
from .report import Report
from .verify import SUITES, run_suites

ENV_MAX_DEGREE = "HOPFRG_MAX_DEGREE"


class UsageError(Exception):
    """Bad input detected after argument parsing; exit code 2."""


def _default_degree() -> int:
    raw = os.environ.get(ENV_MAX_DEGREE)
    if raw is None:
        return 4
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{ENV_MAX_DEGREE} must be an integer, got {raw!r}") from None
    if value < 0:
        raise UsageError(f"{ENV_MAX_DEGREE} must be >= 0")
    return value


def _nonneg(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = _nonneg(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


# --- output ----------------------------------------------------------------------------

class Out:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []

    def text(self, line: str) -> None:
        self.lines.append(line)

    def value(self, label: str, value) -> None:
        if self.fmt == "tsv":
            self.lines.append(f"{label}\t{value}")
        else:
            self.lines.append(str(value))

    def character(self, name: str, f: LinMap, degree: int) -> None:
        if self.fmt == "tsv":
            trees = enumerate_k_trees(degree) if f.tag == K else enumerate_trees(degree)
            for t in trees:
                self.lines.append(f"{name}\t{t}\t{f(t)}")
        else:
            if self.lines:
                self.lines.append("")
            self.lines.append(render_character(name, f, degree))

    def report(self, rep: Report) -> None:
        if self.fmt == "tsv":
            for fail in rep.failures:
                self.lines.append(f"{rep.suite}\tFAIL\t{fail.identity}\t{fail.forest}\t{fail.left}\t{fail.right}")
            for note in rep.notes:
                self.lines.append(f"{rep.suite}\tNOTE\t{note}")
            self.lines.append(f"{rep.suite}\tchecks\t{rep.checks}")
            self.lines.append(f"{rep.suite}\tfailures\t{len(rep.failures)}")
        else:
            self.lines.append(rep.render())


# --- character lookup -------------------------------------------------------------------

def _load_specs(args) -> dict[str, CharSpec]:
    specs: dict[str, CharSpec] = {}
    for path in args.chars or []:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        for name, spec in parse_characters(text, source=path).items():
            if name in specs:
                raise UsageError(f"character {name!r} defined more than once")
            specs[name] = spec
    for text in args.defs or []:
        spec = parse_inline(text)
        if spec.name in specs:
            raise UsageError(f"character {spec.name!r} defined more than once")
        specs[spec.name] = spec
    return specs


def _spec(specs: dict[str, CharSpec], name: str, tag: str) -> CharSpec:
    if name not in specs:
        known = ", ".join(sorted(specs)) or "none"
        raise UsageError(f"unknown character {name!r} (defined: {known})")
    spec = specs[name]
    if spec.tag != tag:
        raise UsageError(f"character {name!r} lives on {spec.tag}, expected {tag}")
    return spec


def _char(specs, name, tag=H):
    return _spec(specs, name, tag).character()


def _inf(specs, name, tag):
    return _spec(specs, name, tag).infinitesimal()


# --- subcommands --------------------------------------------------------------------------

def cmd_coprod(args, out: Out) -> int:
    out.value(args.forest, algebra.delta_H(parse_forest(args.forest)))
    return 0


def cmd_kcoprod(args, out: Out) -> int:
    out.value(args.forest, algebra.delta_K(parse_forest(args.forest)))
    return 0


def cmd_coact(args, out: Out) -> int:
    out.value(args.forest, algebra.coaction(parse_forest(args.forest)))
    return 0


def cmd_antipode(args, out: Out) -> int:
    f = parse_forest(args.forest)
    out.value(args.forest, algebra.antipode(f, args.algebra, recursion=args.recursion))
    return 0


def cmd_enumerate(args, out: Out) -> int:
    if args.trees:
        items = enumerate_k_trees(args.max_degree) if args.algebra == K else enumerate_trees(args.max_degree)
    else:
        items = enumerate_k_forests(args.max_degree) if args.algebra == K else enumerate_forests(args.max_degree)
    for f in items:
        out.value(str(algebra.degree(args.algebra, f)), f)
    return 0


def cmd_convolve(args, out: Out) -> int:
    specs = _load_specs(args)
    tag = args.algebra
    f, g = _char(specs, args.first, tag), _char(specs, args.second, tag)
    out.character(f"{args.first}_{args.second}", convolve(f, g), args.max_degree)
    return 0


def cmd_inverse(args, out: Out) -> int:
    specs = _load_specs(args)
    f = _char(specs, args.phi, args.algebra)
    out.character(f"{args.phi}_inv", conv_inverse(f), args.max_degree)
    return 0


def cmd_birkhoff(args, out: Out) -> int:
    specs = _load_specs(args)
    minus, plus = birkhoff(_char(specs, args.phi, args.algebra))
    out.character(f"{args.phi}_minus", minus, args.max_degree)
    out.character(f"{args.phi}_plus", plus, args.max_degree)
    return 0


def cmd_baction(args, out: Out) -> int:
    specs = _load_specs(args)
    alpha = _inf(specs, args.alpha, K)
    out.value(args.forest, b_alpha(alpha, parse_forest(args.forest)))
    return 0


def cmd_rtilde(args, out: Out) -> int:
    specs = _load_specs(args)
    gamma = r_tilde(_char(specs, args.phi), _inf(specs, args.alpha, K))
    out.character(f"rtilde_{args.phi}", gamma, args.max_degree)
    return 0


def cmd_flow(args, out: Out) -> int:
    specs = _load_specs(args)
    phi_t = flow(_char(specs, args.phi), _inf(specs, args.alpha, K), args.t_symbol)
    out.character(f"{args.phi}_{args.t_symbol}", phi_t, args.max_degree)
    return 0


def cmd_rg(args, out: Out) -> int:
    specs = _load_specs(args)
    F = rg_flow(_char(specs, args.phi), _inf(specs, args.alpha, K), args.max_degree, args.t_symbol)
    out.character(f"F_{args.phi}", F, args.max_degree)
    return 0


def cmd_beta(args, out: Out) -> int:
    specs = _load_specs(args)
    phi, alpha = _char(specs, args.phi), _inf(specs, args.alpha, K)
    b = beta(phi, alpha, args.max_degree, args.method, args.t_symbol)
    out.character(f"beta_{args.phi}", b, args.max_degree)
    return 0


def cmd_locality(args, out: Out) -> int:
    specs = _load_specs(args)
    rep = locality_check(_char(specs, args.phi), _inf(specs, args.alpha, K), args.max_degree, args.t_symbol)
    out.report(rep)
    return 0 if rep.ok else 1


def cmd_construct_local(args, out: Out) -> int:
    specs = _load_specs(args)
    alpha, chi = _inf(specs, args.alpha, K), _inf(specs, args.chi, H)
    try:
        phi = construct_local_minus(alpha, chi, args.max_degree)
    except Infeasible as exc:
        out.text(f"INFEASIBLE\t{exc.degree}\t{exc.forest}\t{exc.residual}")
        return 1
    out.character(f"local_{args.chi}", phi, args.max_degree)
    rep = locality_check(phi, alpha, args.max_degree, args.t_symbol)
    if not rep.ok:
        out.text("")
        out.report(rep)
        return 1
    return 0


def cmd_verify(args, out: Out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    started = time.perf_counter()
    reports = run_suites(names, args.max_degree, args.seed, args.jobs, args.t_symbol, args.s_symbol)
    failures = 0
    for rep in reports:
        if out.lines and out.fmt == "text":
            out.text("")
        out.report(rep)
        failures += len(rep.failures)
    if len(reports) > 1:
        out.text("")
        out.value("total", f"total failures: {failures}")
    print(f"elapsed: {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0 if failures == 0 else 1


# --- parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=_nonneg, default=None,
                        help=f"degree bound (default: ${ENV_MAX_DEGREE} or 4)")
    common.add_argument("--seed", type=int, default=0, help="seed for random test data")
    common.add_argument("--output", choices=("text", "tsv"), default="text")
    common.add_argument("--chars", action="append", metavar="FILE", help="character definition file")
    common.add_argument("--def", dest="defs", action="append", metavar="SPEC",
                        help="inline character 'NAME [on H|K]: forest=value; ...'")
    common.add_argument("--t-symbol", default="t", help="name of the flow parameter")
    common.add_argument("--s-symbol", default="s", help="name of the second flow parameter")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for verify")

    parser = argparse.ArgumentParser(prog="hopfrg", description="Rooted-tree Hopf algebras and renormalization flows.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_text, *positionals, algebra_flag=False):
        p = sub.add_parser(name, parents=[common], help=help_text)
        for pos, pos_help in positionals:
            p.add_argument(pos, help=pos_help)
        if algebra_flag:
            p.add_argument("--algebra", choices=(H, K), default=H)
        p.set_defaults(func=fn)
        return p

    forest = ("forest", "forest literal, e.g. '[[]] []'")
    phi = ("phi", "name of a character on H")
    alpha = ("alpha", "name of an infinitesimal character on K")

    add("coprod", cmd_coprod, "coproduct of H", forest)
    add("kcoprod", cmd_kcoprod, "coproduct of K", forest)
    p = add("antipode", cmd_antipode, "antipode of H or K", forest, algebra_flag=True)
    p.add_argument("--recursion", choices=("left", "right"), default="left")
    add("coact", cmd_coact, "coaction H -> K (x) H", forest)
    add("convolve", cmd_convolve, "convolution of two characters",
        ("first", "character name"), ("second", "character name"), algebra_flag=True)
    add("inverse", cmd_inverse, "convolution inverse", phi, algebra_flag=True)
    add("birkhoff", cmd_birkhoff, "Birkhoff decomposition (minimal subtraction)", phi, algebra_flag=True)
    add("baction", cmd_baction, "B_alpha of a forest", alpha, forest)
    add("rtilde", cmd_rtilde, "R~_alpha(phi)", phi, alpha)
    add("flow", cmd_flow, "flow phi_t = exp(t z alpha) * phi", phi, alpha)
    add("rg", cmd_rg, "renormalization group F_t", phi, alpha)
    p = add("beta", cmd_beta, "beta function", phi, alpha)
    p.add_argument("--method", choices=BETA_METHODS, default="generator")
    add("locality", cmd_locality, "check that the flow counterterm is t-independent", phi, alpha)
    add("construct-local", cmd_construct_local, "solve z R~(phi) = chi for polar phi",
        alpha, ("chi", "name of a constant infinitesimal character on H"))
    p = add("verify", cmd_verify, "run invariant suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p = add("enumerate", cmd_enumerate, "list basis forests", algebra_flag=True)
    p.add_argument("--trees", action="store_true", help="trees only")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Out(args.output)
    try:
        if args.max_degree is None:
            args.max_degree = _default_degree()
        if args.t_symbol == args.s_symbol:
            raise UsageError("--t-symbol and --s-symbol must differ")
        declare_parameters(args.t_symbol, args.s_symbol)
        code = args.func(args, out)
    except (UsageError, CharFileError, ForestSyntaxError, LaurentSyntaxError, UnknownParameter) as exc:
        print(f"hopfrg: error: {exc}", file=sys.stderr)
        return 2
    except PoleAtZero as exc:
        out.text(f"FAIL\tpole at z=0\t{exc.context}\t{exc.value}\tregular")
        code = 1
    except ValueError as exc:
        print(f"hopfrg: error: {exc}", file=sys.stderr)
        return 2
    if out.lines:
        print("\n".join(out.lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
