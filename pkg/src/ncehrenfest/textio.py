"""Plain-text grammar for operator expressions, plus plain/LaTeX rendering.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' ['-'] INT)?
    primary := NUMBER | CONST | atom | 'd[' INT '](' expr ')'
             | '(' expr ')' | '[' expr ',' expr ']' | '{' expr ',' expr '}'
    atom    := 'x[' INT ']' | 'p[' INT ']' | 'alpha[' INT ']' | 'A[' INT ']'
             | 'beta' | 'Phi'
    CONST   := hbar | c | e | m | Theta | eta | B | E1 | E2 | E3 | i

Division is only allowed by a scalar monomial.  ``[a, b]`` and ``{a, b}``
are evaluated immediately in the supplied algebra context.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .context import AlgebraContext
from .expr import FIELD, Atom, ExprError, OperatorExpr, a_field, alpha, beta, p, phi_field, x
from .scalar import SYMBOLS, I, Scalar, ScalarError, sym

__all__ = ["ParseError", "parse_expr", "render"]


class ParseError(ValueError):
    """Syntax or name error; ``column`` is the 0-based offset of the offending token."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} at column {column}")
        self.column = column


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")
_ATOM_INDEXED = {"x": x, "p": p, "alpha": alpha, "A": a_field}
_CONSTS = set(SYMBOLS)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("id", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: AlgebraContext):
        self.tokens = _tokenize(text)
        self.k = 0
        self.ctx = ctx

    # ---- helpers ----
    @property
    def tok(self):
        return self.tokens[self.k]

    def advance(self):
        t = self.tokens[self.k]
        self.k += 1
        return t

    def expect(self, value: str):
        kind, val, col = self.tok
        if val != value or kind == "eof":
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", col)
        return self.advance()

    def integer(self) -> int:
        kind, val, col = self.tok
        if kind != "num" or "." in val:
            raise ParseError(f"expected an integer, found {val or 'end of input'!r}", col)
        self.advance()
        return int(val)

    # ---- grammar ----
    def parse(self) -> OperatorExpr:
        e = self.expr()
        kind, val, col = self.tok
        if kind != "eof":
            raise ParseError(f"unexpected {val!r}", col)
        return e

    def expr(self) -> OperatorExpr:
        e = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.advance()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> OperatorExpr:
        e = self.unary()
        while self.tok[0] == "op" and self.tok[1] in ("*", "/"):
            op, col = self.advance()[1:]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if not rhs.is_scalar() or not rhs.scalar_value().is_monomial():
                    raise ParseError("can only divide by a scalar monomial", col)
                e = e / rhs.scalar_value()
        return e

    def unary(self) -> OperatorExpr:
        if self.tok[0] == "op" and self.tok[1] in ("-", "+"):
            op = self.advance()[1]
            inner = self.unary()
            return -inner if op == "-" else inner
        return self.power()

    def power(self) -> OperatorExpr:
        base = self.primary()
        if self.tok[0] == "op" and self.tok[1] == "^":
            col = self.advance()[2]
            neg = False
            if self.tok[1] == "-":
                self.advance()
                neg = True
            n = self.integer()
            n = -n if neg else n
            if base.is_scalar():
                try:
                    return OperatorExpr.scalar(base.scalar_value() ** n)
                except (ScalarError, ZeroDivisionError) as exc:
                    raise ParseError(str(exc), col) from None
            if n < 0:
                raise ParseError("negative powers of operators are undefined", col)
            out = OperatorExpr.scalar(1)
            for _ in range(n):
                out = out * base
            return out
        return base

    def primary(self) -> OperatorExpr:
        kind, val, col = self.tok
        if kind == "num":
            self.advance()
            return OperatorExpr.scalar(Fraction(val))
        if kind == "id":
            return self.identifier()
        if kind == "op" and val == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "op" and val in ("[", "{"):
            from .operator_ir import anticommutator, commutator
            self.advance()
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]" if val == "[" else "}")
            return commutator(a, b, self.ctx) if val == "[" else anticommutator(a, b, self.ctx)
        raise ParseError(f"unexpected {val or 'end of input'!r}", col)

    def index(self) -> int:
        self.expect("[")
        col = self.tok[2]
        i = self.integer()
        self.expect("]")
        if i not in (1, 2, 3):
            raise ParseError(f"axis index must be 1, 2 or 3, got {i}", col)
        return i

    def identifier(self) -> OperatorExpr:
        kind, name, col = self.advance()
        if name == "d" and self.tok[1] == "[":
            j = self.index()
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return self.partial(inner, j, col)
        if name in _ATOM_INDEXED:
            return OperatorExpr.atom(_ATOM_INDEXED[name](self.index()))
        if name == "beta":
            return OperatorExpr.atom(beta())
        if name == "Phi":
            return OperatorExpr.atom(phi_field())
        if name == "i":
            return OperatorExpr.scalar(I)
        if name in _CONSTS:
            return OperatorExpr.scalar(sym(name))
        raise ParseError(f"unknown symbol {name!r}", col)

    def partial(self, inner: OperatorExpr, j: int, col: int) -> OperatorExpr:
        terms = list(inner.terms())
        if len(terms) == 1 and terms[0].coeff == Scalar.const(1) \
                and len(terms[0].factors) == 1 and terms[0].factors[0].kind == FIELD:
            return OperatorExpr.atom(terms[0].factors[0].differentiated(j))
        from .operator_ir import differentiate
        try:
            return differentiate(inner, j, self.ctx, expand=False)
        except ExprError as exc:
            raise ParseError(str(exc), col) from None


def parse_expr(text: str, ctx: AlgebraContext | None = None,
               canonical: bool = False) -> OperatorExpr:
    """Parse ``text``; factor order is kept as written unless ``canonical``."""
    ctx = AlgebraContext() if ctx is None else ctx
    e = _Parser(text, ctx).parse()
    if canonical:
        from .operator_ir import canonicalize
        e = canonicalize(e, ctx)
    return e


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _term_parts(coeff: Scalar, factors: tuple[Atom, ...], latex: bool, alone: bool):
    fac = [a.latex() if latex else a.plain() for a in factors]
    joiner = " " if latex else "*"
    if coeff.is_monomial():
        (sign, body), = coeff.monomial_strings(latex)
        pieces = ([] if body == "1" and fac else [body]) + fac
        return sign, joiner.join(pieces)
    text = coeff.to_latex() if latex else coeff.to_plain()
    if fac or not alone:
        text = (r"\left(" + text + r"\right)") if latex else f"({text})"
    return "+", joiner.join([text] + fac)


def render(e: OperatorExpr, format: str = "plain") -> str:
    """Deterministic text for ``e``; the plain format parses back to ``e``."""
    if format not in ("plain", "latex"):
        raise ValueError(f"unknown format {format!r}")
    latex = format == "latex"
    terms = list(e.terms())
    if not terms:
        return "0"
    out = ""
    for k, (coeff, factors) in enumerate(terms):
        sign, body = _term_parts(coeff, factors, latex, alone=len(terms) == 1)
        if k == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out
