"""Command-line interface.

Subcommands expose every computation plus the one-shot verification
harness:

    ring          evaluate a ring expression in x over a chosen quotient
    special       the named elements f, f_k, f'_k, g for (N, k)
    structure-set free rank + torsion of the structure-set model
    kernel        brute-force kernel of the coordinate-class map
    suspend       suspension of an element (with candidate sets)
    torsion-basis the inductive torsion basis with its choice log
    invariants    expansion of a torsion element over the basis
    transfer      restriction of an element to a subgroup
    verify        re-derive every statement over a sweep (JSONL report)

JSON outputs carry a top-level "schema": "rho-lattice/1".  ``verify``
streams one check per line so long sweeps can be tailed, and its exit
code is 0 exactly when every check passes.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import SCHEMA, ring
from .elements import Catalog
from .exceptions import NotInvertible
from .surgery import (
    LensParams,
    element_from_json,
    kernel_rho_bar,
    structure_set,
    transfer,
    zero_element,
)
from .suspension import (
    elem_mu4m2,
    elem_nu,
    elem_omega,
    elem_sigma,
    elem_tau,
    suspend,
    torsion_basis,
    torsion_coordinates,
)
from .verify import SUITES, run_suites


# ---------------------------------------------------------------------------
# expression parser:  +, -, *, /, ^, parentheses, x, and named constants


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Parser:
    """Recursive-descent parser over a fixed (N, k) ring context."""

    def __init__(self, text: str, modulus: ring.Modulus, k: int):
        self.text = text
        self.pos = 0
        self.m = modulus
        self.k = k

    # -- lexing helpers

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _take(self, ch: str) -> bool:
        if self._peek() == ch:
            self.pos += 1
            return True
        return False

    def _expect(self, ch: str) -> None:
        if not self._take(ch):
            raise ParseError(f"expected {ch!r}", self.pos)

    def _integer(self) -> int:
        self._skip_ws()
        start = self.pos
        if self._peek() == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise ParseError("expected an integer", start)
        return int(self.text[start:self.pos])

    def _ident(self) -> str:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        return self.text[start:self.pos]

    # -- grammar

    def parse(self) -> ring.Element:
        value = self._expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ParseError("trailing input", self.pos)
        return value

    def _expr(self) -> ring.Element:
        value = self._term()
        while True:
            if self._take("+"):
                value = value + self._term()
            elif self._take("-"):
                value = value - self._term()
            else:
                return value

    def _term(self) -> ring.Element:
        value = self._unary()
        while True:
            if self._take("*"):
                value = value * self._unary()
            elif self._take("/"):
                value = value * ring.inverse(self._unary())
            else:
                return value

    def _unary(self) -> ring.Element:
        if self._take("-"):
            return -self._unary()
        return self._power()

    def _power(self) -> ring.Element:
        base = self._atom()
        if self._take("^"):
            if self._take("("):
                n = self._integer()
                self._expect(")")
            else:
                n = self._integer()
            return base**n
        return base

    def _atom(self) -> ring.Element:
        ch = self._peek()
        if ch == "(":
            self._take("(")
            value = self._expr()
            self._expect(")")
            return value
        if ch.isdigit():
            return ring.const(self.m, self._integer())
        start = self.pos
        name = self._ident()
        if not name:
            raise ParseError("expected a value", self.pos)
        if name in ("x", "chi"):
            return ring.x_power(self.m, 1)
        N = self.m.N
        if name == "f":
            return Catalog.get(N, 1).f
        if name == "g":
            return Catalog.get(N, 1).g
        if name in ("f_k", "fk"):
            self._expect("(")
            kk = self._integer()
            self._expect(")")
            return Catalog.get(N, kk).f_k
        if name in ("fp_k", "f_prime_k", "fpk"):
            self._expect("(")
            kk = self._integer()
            self._expect(")")
            return Catalog.get(N, kk).f_prime_k
        raise ParseError(f"unknown name {name!r}", start)


def parse_expression(text: str, modulus: ring.Modulus, k: int = 1) -> ring.Element:
    return _Parser(text, modulus, k).parse()


# ---------------------------------------------------------------------------
# output helpers


def _emit(obj: dict, fmt: str) -> None:
    obj = {"schema": SCHEMA, **obj}
    if fmt == "json":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        for key, value in obj.items():
            print(f"{key}\t{json.dumps(value, sort_keys=True)}")


def _element_arg(args, params: LensParams):
    """Build the input element from --element or --element-json."""
    if args.element_json:
        if args.element_json == "-":
            data = json.load(sys.stdin)
        else:
            with open(args.element_json) as fh:
                data = json.load(fh)
        return element_from_json(data)
    name = args.element
    builders = {
        "zero": zero_element,
        "sigma": elem_sigma,
        "omega": elem_omega,
        "tau": elem_tau,
        "mu": elem_mu4m2,
        "nu": elem_nu,
    }
    if name not in builders:
        raise SystemExit(f"unknown element name {name!r}")
    return builders[name](params)


# ---------------------------------------------------------------------------
# subcommands


def cmd_ring(args) -> int:
    kind = ring.truncated(args.N) if args.ideal == "truncated" else ring.group_ring(args.N)
    try:
        value = parse_expression(args.expr, kind, k=args.k)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except NotInvertible as exc:
        print(f"not invertible: {exc}", file=sys.stderr)
        return 3
    if args.format == "tsv":
        for e, c in enumerate(value.coeffs):
            print(f"x^{e}\t{c.numerator}/{c.denominator}")
        return 0
    _emit({"element": value.to_json()}, "json")
    return 0


def cmd_special(args) -> int:
    cat = Catalog.get(args.N, args.k)
    _emit(
        {
            "N": args.N,
            "k": args.k,
            "f": cat.f.to_json(),
            "f_k": cat.f_k.to_json(),
            "f_prime_k": cat.f_prime_k.to_json(),
            "g": cat.g.to_json(),
        },
        args.format,
    )
    return 0


def cmd_structure_set(args) -> int:
    params = LensParams(args.N, args.d, args.k)
    desc = structure_set(params, method=args.method)
    _emit(desc.to_json(include_members=args.members), args.format)
    return 0


def cmd_kernel(args) -> int:
    params = LensParams(args.N, args.d, args.k)
    kr = kernel_rho_bar(params)
    _emit(
        {
            "params": params.to_json(),
            "torsion": kr.torsion.to_json(),
            "method": kr.method,
            "members": [list(mm) for mm in kr.members],
        },
        args.format,
    )
    return 0


def cmd_suspend(args) -> int:
    params = LensParams(args.N, args.d, args.k)
    x = _element_arg(args, params)
    result = suspend(x)
    _emit(result.to_json(), args.format)
    return 0


def cmd_torsion_basis(args) -> int:
    params = LensParams(args.N, args.d, args.k)
    basis = torsion_basis(params)
    _emit(basis.to_json(), args.format)
    return 0


def cmd_invariants(args) -> int:
    params = LensParams(args.N, args.d, args.k)
    x = _element_arg(args, params)
    basis = torsion_basis(params)
    coeffs = torsion_coordinates(x, basis)
    _emit(
        {
            "params": params.to_json(),
            "orders": list(basis.orders) + [2] * params.c,
            "coordinates": list(coeffs),
        },
        args.format,
    )
    return 0


def cmd_transfer(args) -> int:
    params = LensParams(args.N, args.d, args.k)
    x = _element_arg(args, params)
    _emit({"element": transfer(x, args.to_n).to_json()}, args.format)
    return 0


def cmd_verify(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    started = time.time()
    report = run_suites(
        suites,
        max_n=args.max_n,
        max_d=args.max_d,
        seed=args.seed,
        workers=args.workers,
    )
    for check in report["checks"]:
        line = {"schema": SCHEMA, **check}
        if args.format == "tsv":
            print(
                f"{check['statement']}\t{json.dumps(check['params'], sort_keys=True)}"
                f"\t{check['status']}"
            )
        else:
            print(json.dumps(line, sort_keys=True))
    summary = {"schema": SCHEMA, "summary": report["summary"], "seed": report["seed"]}
    if args.format == "tsv":
        print(f"summary\t{json.dumps(report['summary'], sort_keys=True)}")
    else:
        print(json.dumps(summary, sort_keys=True))
    elapsed = time.time() - started
    failed = report["summary"]["failed"]
    print(
        f"{report['summary']['passed']}/{report['summary']['total']} checks passed "
        f"in {elapsed:.1f}s",
        file=sys.stderr,
    )
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rho-lattice",
        description="Exact structure-set computations for fake lens spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, d_required=True):
        p.add_argument("--N", type=int, required=True, help="order of the cyclic group")
        if d_required:
            p.add_argument("--d", type=int, required=True, help="dimension index (L^(2d-1))")
        p.add_argument("--k", type=int, default=1, help="action twist, coprime to N")
        p.add_argument("--format", choices=("json", "tsv"), default="json")

    p = sub.add_parser("ring", help="evaluate an expression in the quotient ring")
    p.add_argument("expr", help="expression in x (and f, g, f_k(k), fp_k(k))")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--ideal", choices=("truncated", "group"), default="truncated")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_ring)

    p = sub.add_parser("special", help="the named elements for (N, k)")
    common(p, d_required=False)
    p.set_defaults(func=cmd_special)

    p = sub.add_parser("structure-set", help="free rank and torsion presentation")
    common(p)
    p.add_argument("--method", choices=("auto", "brute", "closed"), default="auto")
    p.add_argument("--members", action="store_true", help="include kernel members")
    p.set_defaults(func=cmd_structure_set)

    p = sub.add_parser("kernel", help="brute-force kernel of the class map")
    common(p)
    p.set_defaults(func=cmd_kernel)

    for name, fn, extra in (
        ("suspend", cmd_suspend, None),
        ("invariants", cmd_invariants, None),
        ("transfer", cmd_transfer, "to_n"),
    ):
        p = sub.add_parser(name)
        common(p)
        p.add_argument(
            "--element",
            default="zero",
            help="named element: zero|sigma|omega|tau|mu|nu",
        )
        p.add_argument(
            "--element-json",
            default=None,
            help="path to an element JSON ('-' for stdin); overrides --element",
        )
        if extra == "to_n":
            p.add_argument("--to-n", type=int, required=True, dest="to_n")
        p.set_defaults(func=fn)

    p = sub.add_parser("torsion-basis", help="inductive torsion basis with choice log")
    common(p)
    p.set_defaults(func=cmd_torsion_basis)

    p = sub.add_parser("verify", help="re-derive every statement over a sweep")
    p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    p.add_argument("--max-N", type=int, default=None, dest="max_n")
    p.add_argument("--max-d", type=int, default=None, dest="max_d")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker processes (default: all cores)",
    )
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", 1) is None:
        import os

        args.workers = os.cpu_count() or 1
    try:
        return args.func(args)
    except NotInvertible as exc:
        print(f"not invertible: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
