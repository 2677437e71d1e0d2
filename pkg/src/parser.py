"""Expression language for exponential polynomials, scalars and polynomials.

The grammar lives in GRAMMAR below (lowest to highest precedence: sums,
products, unary minus, right-associative powers, atoms). There is no division
and no implicit multiplication. ``exp`` arguments must be affine in z,
``sqrt`` arguments must be constants, and exponents must fold to nonnegative
integers. Whitespace is insignificant; input is ASCII. An imaginary literal
is a number with an ``i`` suffix (``3.5i``), which is what render() emits so
that renderings parse back.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass, field

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from src.errors import (
    ExpDiffError,
    ExprSyntaxError,
    NonConstantError,
    ParseError,
    UnsupportedFormError,
)
from src.expsum import DEFAULT_TOLERANCES, ExpSum, PolyC, Tolerances

GRAMMAR = r"""
    ?expression: term
        | expression "+" term       -> add
        | expression "-" term       -> sub

    ?term: unary
        | term "*" unary            -> mul

    ?unary: power
        | "-" unary                 -> neg

    ?power: atom
        | atom "^" unary            -> pow

    ?atom: NUMBER                   -> number
        | IMAG                      -> imag
        | NAME                      -> name
        | NAME "(" expression ")"   -> call
        | "(" expression ")"        -> paren

    IMAG.2: /(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?i(?![A-Za-z0-9_])/
    NUMBER: /(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/

    %import common.WS
    %ignore WS
"""

MAX_DEPTH = 100

CONSTANTS: dict[str, tuple[str, complex]] = {
    "i": ("imaginary-unit", 1j),
    "pi": ("pi", complex(math.pi)),
    "e": ("e-const", complex(math.e)),
}


# ----------------------------------------------------------------------
# AST
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ExprAst:
    """Parsed expression node.

    kind is one of: number, imaginary-unit, pi, e-const, variable-z, neg, add,
    sub, mul, pow, exp-call, sqrt-call, paren. depth counts the parentheses,
    calls, negations and powers above the deepest leaf.
    """

    kind: str
    position: int
    children: tuple[ExprAst, ...] = ()
    value: complex = 0j
    depth: int = field(default=0, compare=False)


def _nested(kind: str, position: int, *children: ExprAst) -> ExprAst:
    depth = 1 + max(child.depth for child in children)
    if depth > MAX_DEPTH:
        raise ExprSyntaxError("expression nested too deeply", position)
    return ExprAst(kind, position, children, depth=depth)


def _chained(kind: str, op: Token, lhs: ExprAst, rhs: ExprAst) -> ExprAst:
    return ExprAst(kind, op.start_pos, (lhs, rhs), depth=max(lhs.depth, rhs.depth))


@v_args(inline=True)
class _AstBuilder(Transformer):
    """Builds ExprAst nodes as the LALR parser reduces, so long inputs never recurse."""

    def number(self, tok: Token) -> ExprAst:
        return ExprAst("number", tok.start_pos, value=complex(float(tok)))

    def imag(self, tok: Token) -> ExprAst:
        return ExprAst("number", tok.start_pos, value=complex(0, float(tok[:-1])))

    def name(self, tok: Token) -> ExprAst:
        name = str(tok)
        if name == "z":
            return ExprAst("variable-z", tok.start_pos)
        if name in CONSTANTS:
            kind, value = CONSTANTS[name]
            return ExprAst(kind, tok.start_pos, value=value)
        if name in FUNCTIONS:
            raise ExprSyntaxError(f"expected '(' after {name!r}", tok.end_pos)
        raise ExprSyntaxError(f"unknown identifier {name!r}", tok.start_pos)

    def call(self, tok: Token, _open: Token, arg: ExprAst, _close: Token) -> ExprAst:
        name = str(tok)
        if name not in FUNCTIONS:
            raise ExprSyntaxError(f"unknown identifier {name!r}", tok.start_pos)
        return _nested(f"{name}-call", tok.start_pos, arg)

    def paren(self, open_: Token, inner: ExprAst, _close: Token) -> ExprAst:
        return _nested("paren", open_.start_pos, inner)

    def neg(self, op: Token, operand: ExprAst) -> ExprAst:
        return _nested("neg", op.start_pos, operand)

    def pow(self, base: ExprAst, op: Token, exponent: ExprAst) -> ExprAst:
        return _nested("pow", op.start_pos, base, exponent)

    def add(self, lhs: ExprAst, op: Token, rhs: ExprAst) -> ExprAst:
        return _chained("add", op, lhs, rhs)

    def sub(self, lhs: ExprAst, op: Token, rhs: ExprAst) -> ExprAst:
        return _chained("sub", op, lhs, rhs)

    def mul(self, lhs: ExprAst, op: Token, rhs: ExprAst) -> ExprAst:
        return _chained("mul", op, lhs, rhs)


_PARSER = Lark(
    GRAMMAR,
    start="expression",
    parser="lalr",
    lexer="basic",
    keep_all_tokens=True,
    transformer=_AstBuilder(),
)


def _check_characters(text: str) -> None:
    for idx, ch in enumerate(text):
        if not ch.isascii():
            raise ExprSyntaxError(
                f"non-ASCII character {ch!r}", len(text[:idx].encode("utf-8")), text
            )
        if ch == "/":
            raise ExprSyntaxError("division is not supported; use a decimal literal", idx, text)


def _syntax_error(exc: UnexpectedInput, text: str) -> ExprSyntaxError:
    if isinstance(exc, UnexpectedCharacters):
        ch = text[exc.pos_in_stream]
        return ExprSyntaxError(f"unexpected character {ch!r}", exc.pos_in_stream, text)
    if isinstance(exc, UnexpectedToken) and exc.token.type != "$END":
        hint = " (implicit multiplication?)" if "STAR" in exc.expected else ""
        return ExprSyntaxError(f"unexpected {str(exc.token)!r}{hint}", exc.token.start_pos, text)
    message = "unexpected end of input" if text.strip() else "empty expression"
    return ExprSyntaxError(message, len(text), text)


def parse_ast(text: str) -> ExprAst:
    """Parse ``text`` into an ExprAst without folding.

    Raises:
        ExprSyntaxError: malformed input, with the byte offset.
    """
    _check_characters(text)
    try:
        return _PARSER.parse(text)
    except UnexpectedInput as exc:
        raise _syntax_error(exc, text) from None
    except VisitError as exc:
        if isinstance(exc.orig_exc, ParseError):
            raise ExprSyntaxError(exc.orig_exc.reason, exc.orig_exc.position, text) from None
        raise
    except ParseError as exc:
        raise ExprSyntaxError(exc.reason, exc.position, text) from None


# ----------------------------------------------------------------------
# Folding
# ----------------------------------------------------------------------


def _fold_exp(arg: ExpSum, node: ExprAst, text: str, tol: Tolerances) -> ExpSum:
    poly = arg.as_poly()
    if poly is None or poly.degree > 1:
        raise UnsupportedFormError(
            "exp argument must be affine in z (c*z + d)", node.position, text
        )
    d = poly.coeffs[0] if poly.coeffs else 0j
    c = poly.coeffs[1] if poly.degree == 1 else 0j
    try:
        factor = cmath.exp(d)
    except OverflowError as exc:
        raise UnsupportedFormError("exp constant overflows", node.position, text) from exc
    return ExpSum.exponential(factor, c, tol=tol)


def _fold_sqrt(arg: ExpSum, node: ExprAst, text: str, tol: Tolerances) -> ExpSum:
    value = arg.as_constant()
    if value is None:
        raise UnsupportedFormError("sqrt argument must be a constant", node.position, text)
    return ExpSum.constant(cmath.sqrt(value), tol)


FUNCTIONS: dict[str, Callable[[ExpSum, ExprAst, str, Tolerances], ExpSum]] = {
    "exp": _fold_exp,
    "sqrt": _fold_sqrt,
}


def _exponent(node: ExprAst, text: str, tol: Tolerances) -> int:
    value = fold(node, text, tol).as_constant()
    if value is None:
        raise UnsupportedFormError("exponent must be a constant", node.position, text)
    k = round(value.real)
    if abs(value.imag) > 1e-12 or abs(value.real - k) > 1e-9 or k < 0:
        raise UnsupportedFormError(
            f"exponent must be a nonnegative integer, got {value.real:g}", node.position, text
        )
    return k


_BINARY: dict[str, Callable[[ExpSum, ExpSum], ExpSum]] = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def fold(node: ExprAst, text: str = "", tol: Tolerances = DEFAULT_TOLERANCES) -> ExpSum:
    """Evaluate an ExprAst into a canonical ExpSum."""
    kind = node.kind
    if kind in ("number", "imaginary-unit", "pi", "e-const"):
        return ExpSum.constant(node.value, tol)
    if kind == "variable-z":
        return ExpSum.from_poly(PolyC.z(), tol)
    if kind == "paren":
        return fold(node.children[0], text, tol)
    if kind == "neg":
        return -fold(node.children[0], text, tol)
    if kind in _BINARY:
        # Left-associative chains are walked iteratively so long sums
        # cannot exhaust the interpreter stack.
        spine: list[ExprAst] = []
        while node.kind in _BINARY:
            spine.append(node)
            node = node.children[0]
        result = fold(node, text, tol)
        for op in reversed(spine):
            result = _BINARY[op.kind](result, fold(op.children[1], text, tol))
        return result
    if kind == "pow":
        base = fold(node.children[0], text, tol)
        return base ** _exponent(node.children[1], text, tol)
    if kind.endswith("-call"):
        handler = FUNCTIONS[kind.removesuffix("-call")]
        return handler(fold(node.children[0], text, tol), node, text, tol)
    raise ExprSyntaxError(f"unknown node kind {kind!r}", node.position, text)


# ----------------------------------------------------------------------
# Public entry points
# ----------------------------------------------------------------------


def parse_expsum(text: str, tol: Tolerances = DEFAULT_TOLERANCES) -> ExpSum:
    """Parse an exponential polynomial.

    Raises:
        ExprSyntaxError: malformed input, with the byte offset.
        UnsupportedFormError: non-affine exp, non-constant sqrt, bad exponent.
    """
    ast = parse_ast(text)
    try:
        return fold(ast, text, tol)
    except ParseError:
        raise
    except ExpDiffError as exc:
        # Overflowing literals, degree blow-up and the like.
        raise UnsupportedFormError(exc.message, ast.position, text) from exc


def parse_complex(text: str) -> complex:
    """Parse a constant expression such as ``3*pi*i`` or ``sqrt(2)``."""
    value = parse_expsum(text).as_constant()
    if value is None:
        raise NonConstantError("expression is not a constant", 0, text)
    return value


def parse_poly(text: str, tol: Tolerances = DEFAULT_TOLERANCES) -> PolyC:
    """Parse a polynomial in z (no exponentials)."""
    poly = parse_expsum(text, tol).as_poly()
    if poly is None:
        raise UnsupportedFormError("expected a polynomial in z", 0, text)
    return poly


# ----------------------------------------------------------------------
# Rendering
# ----------------------------------------------------------------------


def _render_real(x: float) -> str:
    if x == 0:
        return "0"
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def render_complex(c: complex) -> str:
    """``(<re>{+|-}<im>i)`` with zero parts elided."""
    c = complex(c)
    re_part, im_part = c.real, c.imag
    if im_part == 0:
        body = _render_real(re_part)
    elif re_part == 0:
        body = f"{_render_real(im_part)}i"
    else:
        sign = "-" if im_part < 0 else "+"
        body = f"{_render_real(re_part)}{sign}{_render_real(abs(im_part))}i"
    return f"({body})"


def render(a: ExpSum) -> str:
    """Canonical text form; parse_expsum(render(a)) reproduces a.

    Terms follow canonical order, each coefficient polynomial is expanded
    into monomials: ``(c) * z^k * exp((λ)*z)``, with ``z^0`` and
    ``exp((0)*z)`` elided.
    """
    parts: list[str] = []
    for term in a.terms:
        for k, c in enumerate(term.coeff.coeffs):
            if c == 0:
                continue
            factors = [render_complex(c)]
            if k == 1:
                factors.append("z")
            elif k > 1:
                factors.append(f"z^{k}")
            if term.freq != 0:
                factors.append(f"exp({render_complex(term.freq)}*z)")
            parts.append(" * ".join(factors))
    return " + ".join(parts) if parts else "0"
