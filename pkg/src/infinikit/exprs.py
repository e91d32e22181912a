"""Expression text boundary: tokens, trees, printing, and lowering.

One grammar serves three targets.  The same tree lowers to an LCNumber
(`lc` mode, symbol `eps`), a RateSeq (`seq` mode, symbols `n`, `ln(n)`,
`(-1)^n`, catalogue functions), or a dense rational coefficient vector
(`poly` mode, symbol `x`).  Rationals are written `p/q` and decimals
are read as exact decimal fractions, so no value is rounded at the text
boundary.  Power exponents are rational literals, with the single
carve-out `(-1)^n` for the alternating-sign atom.

Precedence: `^` binds tightest, then unary minus, then `*` `/`, then
`+` `-`; binary operators associate left.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Union

from . import levi_civita as lc
from . import hyperseq as hs
from .errors import ExprSyntaxError, ModeMismatchError, SamplerDomainError
from ._rat import Rat, as_rat, rat_str

__all__ = [
    "Expr",
    "Lit",
    "Sym",
    "Parity",
    "Call",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "parse",
    "print_expr",
    "eval_expr",
    "parse_prefix",
]

FUNCTIONS = ("abs", "cube", "exp", "identity", "ln", "log", "sqrt", "square")


class Lit(NamedTuple):
    value: object
    text: str


class Sym(NamedTuple):
    name: str


class Parity(NamedTuple):
    pass


class Call(NamedTuple):
    fn: str
    arg: "Expr"


class Neg(NamedTuple):
    arg: "Expr"


class Add(NamedTuple):
    left: "Expr"
    right: "Expr"


class Sub(NamedTuple):
    left: "Expr"
    right: "Expr"


class Mul(NamedTuple):
    left: "Expr"
    right: "Expr"


class Div(NamedTuple):
    left: "Expr"
    right: "Expr"


class Pow(NamedTuple):
    base: "Expr"
    exponent: object


Expr = Union[Lit, Sym, Parity, Call, Neg, Add, Sub, Mul, Div, Pow]


# ---------------------------------------------------------------------------
# tokens

class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


_PUNCT = set("+-*/^()")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    length = len(text)
    while i < length:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            while j < length and text[j].isdigit():
                j += 1
            if j < length and text[j] == "." and j + 1 < length and text[j + 1].isdigit():
                j += 1
                while j < length and text[j].isdigit():
                    j += 1
                tokens.append(_Token("decimal", text[i:j], line, start_col))
            else:
                tokens.append(_Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < length and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, line, start_col))
            i += 1
            col += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: tuple[str, ...]) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(tok, expected)
        return self.advance()

    def fail(self, tok: _Token, expected: tuple[str, ...]):
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(
            f"unexpected {what}", tok.line, tok.column, expected
        )

    # expr := term (('+'|'-') term)*
    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    # term := factor (('*'|'/') factor)*
    def term(self) -> Expr:
        node = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    # factor := '-' factor | power
    def factor(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    # power := primary ('^' exponent)*
    def power(self) -> Expr:
        node = self.primary()
        while self.peek().kind == "^":
            self.advance()
            tok = self.peek()
            if tok.kind == "name" and tok.text == "n":
                if node == Neg(Lit(1, "1")):
                    self.advance()
                    node = Parity()
                    continue
                self.fail(tok, ("rational literal",))
            node = Pow(node, self.exponent())
        return node

    # a bare exponent is a signed integer; p/q needs parentheses, so a
    # slash after n^2 stays a division and precedence survives
    def exponent(self):
        tok = self.peek()
        if tok.kind == "(":
            self.advance()
            value = self.signed_rational(allow_fraction=True)
            self.expect(")", (")",))
            return value
        return self.signed_rational(allow_fraction=False)

    def signed_rational(self, allow_fraction: bool):
        sign = 1
        if self.peek().kind == "-":
            self.advance()
            sign = -1
        tok = self.expect("int", ("rational literal",))
        num = int(tok.text)
        if allow_fraction and self.peek().kind == "/":
            self.advance()
            den_tok = self.expect("int", ("integer",))
            den = int(den_tok.text)
            if den == 0:
                raise ExprSyntaxError(
                    "zero denominator in exponent", den_tok.line, den_tok.column
                )
            return as_rat(Fraction(sign * num, den))
        return as_rat(sign * num)

    _PRIMARY_EXPECTED = (
        "rational literal", "eps", "n", "x", "function name", "(", "-",
    )

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return Lit(as_rat(int(tok.text)), str(int(tok.text)))
        if tok.kind == "decimal":
            self.advance()
            return Lit(as_rat(Fraction(tok.text)), _canonical_decimal(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text in ("eps", "n", "x"):
                return Sym(tok.text)
            if tok.text in FUNCTIONS:
                self.expect("(", ("(",))
                arg = self.expr()
                self.expect(")", (")",))
                return Call(tok.text, arg)
            raise ExprSyntaxError(
                f"unknown name {tok.text!r}", tok.line, tok.column,
                ("eps", "n", "x") + FUNCTIONS,
            )
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")", (")",))
            return node
        self.fail(tok, self._PRIMARY_EXPECTED)


def _canonical_decimal(text: str) -> str:
    whole, _, frac = text.partition(".")
    whole = whole.lstrip("0") or "0"
    frac = frac.rstrip("0")
    return f"{whole}.{frac}" if frac else whole


def parse(text: str) -> Expr:
    """Parse one expression; trailing input is an error."""
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    tok = parser.peek()
    if tok.kind != "end":
        parser.fail(tok, ("end of input",))
    return node


# ---------------------------------------------------------------------------
# canonical printing

# precedence: additive 1, multiplicative 2, unary minus 3, power 4, atoms 5
def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def print_expr(e: Expr) -> str:
    """Canonical text; re-parsing it rebuilds a structurally equal tree."""
    return _render(e, 0)


def _render(e: Expr, context: int) -> str:
    if isinstance(e, Lit):
        return e.text
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Parity):
        return "(-1)^n"
    if isinstance(e, Call):
        return f"{e.fn}({_render(e.arg, 0)})"
    if isinstance(e, Neg):
        return _wrap(f"-{_render(e.arg, 3)}", 3, context)
    if isinstance(e, Add):
        return _wrap(f"{_render(e.left, 1)} + {_render(e.right, 2)}", 1, context)
    if isinstance(e, Sub):
        return _wrap(f"{_render(e.left, 1)} - {_render(e.right, 2)}", 1, context)
    if isinstance(e, Mul):
        return _wrap(f"{_render(e.left, 2)}*{_render(e.right, 3)}", 2, context)
    if isinstance(e, Div):
        return _wrap(f"{_render(e.left, 2)}/{_render(e.right, 3)}", 2, context)
    if isinstance(e, Pow):
        return _wrap(f"{_render(e.base, 5)}^{_exp_text(e.exponent)}", 4, context)
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(text: str, prec: int, context: int) -> str:
    return f"({text})" if prec < context else text


def _exp_text(value) -> str:
    r = as_rat(value)
    if r.denominator == 1:
        return str(r.numerator)
    return f"({rat_str(r)})"


# ---------------------------------------------------------------------------
# lowering

def eval_expr(e: Expr, mode: str):
    """Lower a tree to the value domain named by mode: lc, seq, or poly."""
    if mode == "lc":
        return _eval_lc(e)
    if mode == "seq":
        return _eval_seq(e)
    if mode == "poly":
        return _Poly(_eval_poly(e))
    raise SamplerDomainError(f"unknown mode {mode!r}")


def _eval_lc(e: Expr) -> lc.LCNumber:
    if isinstance(e, Lit):
        return lc.from_rational(e.value)
    if isinstance(e, Sym):
        if e.name == "eps":
            return lc.EPS
        raise ModeMismatchError(f"symbol {e.name!r} is not available in lc mode")
    if isinstance(e, Parity):
        raise ModeMismatchError("'(-1)^n' is not available in lc mode")
    if isinstance(e, Call):
        raise ModeMismatchError(f"function {e.fn!r} is not available in lc mode")
    if isinstance(e, Neg):
        return lc.neg(_eval_lc(e.arg))
    if isinstance(e, Add):
        return lc.add(_eval_lc(e.left), _eval_lc(e.right))
    if isinstance(e, Sub):
        return lc.sub(_eval_lc(e.left), _eval_lc(e.right))
    if isinstance(e, Mul):
        return lc.mul(_eval_lc(e.left), _eval_lc(e.right))
    if isinstance(e, Div):
        return lc.mul(_eval_lc(e.left), lc.inv(_eval_lc(e.right)))
    if isinstance(e, Pow):
        base = _eval_lc(e.base)
        r = as_rat(e.exponent)
        if r.denominator == 1:
            return lc.power(base, int(r))
        try:
            return lc.monomial_power(base, r)
        except ValueError as exc:
            raise SamplerDomainError(str(exc)) from exc
    raise TypeError(f"not an expression node: {e!r}")


def _eval_seq(e: Expr) -> hs.RateSeq:
    if isinstance(e, Lit):
        return hs.constant_seq(e.value)
    if isinstance(e, Sym):
        if e.name == "n":
            return hs.make_rate(1, 1)
        raise ModeMismatchError(f"symbol {e.name!r} is not available in seq mode")
    if isinstance(e, Parity):
        return hs.make_rate(1, 0, 0, parity=True)
    if isinstance(e, Call):
        if e.fn == "ln" and e.arg == Sym("n"):
            return hs.make_rate(1, 0, 1)
        return hs.extend(e.fn, _eval_seq(e.arg))
    if isinstance(e, Neg):
        return hs.negate(_eval_seq(e.arg))
    if isinstance(e, Add):
        return hs.termwise_add(_eval_seq(e.left), _eval_seq(e.right))
    if isinstance(e, Sub):
        return hs.termwise_sub(_eval_seq(e.left), _eval_seq(e.right))
    if isinstance(e, Mul):
        return hs.termwise_mul(_eval_seq(e.left), _eval_seq(e.right))
    if isinstance(e, Div):
        return hs.termwise_mul(_eval_seq(e.left), hs.reciprocal(_eval_seq(e.right)))
    if isinstance(e, Pow):
        return _seq_pow(_eval_seq(e.base), as_rat(e.exponent))
    raise TypeError(f"not an expression node: {e!r}")


def _seq_pow(a: hs.RateSeq, r: Rat) -> hs.RateSeq:
    if r.denominator == 1:
        k = int(r)
        if k == 0:
            return hs.constant_seq(1)
        if k < 0:
            return hs.reciprocal(_seq_pow(a, as_rat(-k)))
        result = a
        for _ in range(k - 1):
            result = hs.termwise_mul(result, a)
        return result
    if len(a.monomials) != 1 or not a.exact:
        raise SamplerDomainError("fractional powers require a single exact rate class")
    m = a.monomials[0]
    if m.parity or (as_rat(m.q) * r).denominator != 1:
        raise SamplerDomainError("fractional power does not stay inside the rate grammar")
    from ._rat import rat_pow

    try:
        coeff = rat_pow(as_rat(m.c), r)
    except ValueError as exc:
        raise SamplerDomainError(str(exc)) from exc
    return hs.make_rate(coeff, m.p * r, int(as_rat(m.q) * r))


class _Poly(tuple):
    """Dense rational coefficients, index = degree; passes as a sequence."""

    def __str__(self):
        return " + ".join(
            f"{rat_str(c)}*x^{i}" for i, c in enumerate(self) if c != 0
        ) or "0"


def _eval_poly(e: Expr) -> tuple:
    if isinstance(e, Lit):
        return (e.value,)
    if isinstance(e, Sym):
        if e.name == "x":
            return (as_rat(0), as_rat(1))
        raise ModeMismatchError(f"symbol {e.name!r} is not available in poly mode")
    if isinstance(e, Parity):
        raise ModeMismatchError("'(-1)^n' is not available in poly mode")
    if isinstance(e, Call):
        raise ModeMismatchError(f"function {e.fn!r} is not available in poly mode")
    if isinstance(e, Neg):
        return tuple(-c for c in _eval_poly(e.arg))
    if isinstance(e, Add):
        return _poly_add(_eval_poly(e.left), _eval_poly(e.right))
    if isinstance(e, Sub):
        return _poly_add(
            _eval_poly(e.left), tuple(-c for c in _eval_poly(e.right))
        )
    if isinstance(e, Mul):
        return _poly_mul(_eval_poly(e.left), _eval_poly(e.right))
    if isinstance(e, Div):
        divisor = _eval_poly(e.right)
        if len(_poly_trim(divisor)) > 1:
            raise SamplerDomainError("polynomial division only by nonzero constants")
        scalar = divisor[0] if divisor else as_rat(0)
        if scalar == 0:
            raise SamplerDomainError("polynomial division by zero")
        return tuple(as_rat(c) / as_rat(scalar) for c in _eval_poly(e.left))
    if isinstance(e, Pow):
        r = as_rat(e.exponent)
        if r.denominator != 1 or r < 0:
            raise SamplerDomainError("polynomial powers must be nonnegative integers")
        result = (as_rat(1),)
        base = _eval_poly(e.base)
        for _ in range(int(r)):
            result = _poly_mul(result, base)
        return result
    raise TypeError(f"not an expression node: {e!r}")


def _poly_add(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = as_rat(out[i]) + as_rat(c)
    return _poly_trim(tuple(out))


def _poly_mul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [as_rat(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += as_rat(ca) * as_rat(cb)
    return _poly_trim(tuple(out))


def _poly_trim(a: tuple) -> tuple:
    end = len(a)
    while end > 1 and a[end - 1] == 0:
        end -= 1
    return a[:end]


# ---------------------------------------------------------------------------
# prefix override files: {1:0.5, 2:0.25}

def parse_prefix(text: str) -> list[tuple[int, object]]:
    """Read `{index:value, ...}`; p/q values stay exact, decimals float."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ExprSyntaxError("prefix literal must be wrapped in {}", 1, 1)
    inner = body[1:-1].strip()
    if not inner:
        return []
    entries = []
    for piece in inner.split(","):
        key, sep, value = piece.partition(":")
        if not sep:
            raise ExprSyntaxError(f"missing ':' in prefix entry {piece!r}", 1, 1)
        try:
            index = int(key.strip())
        except ValueError as exc:
            raise ExprSyntaxError(
                f"bad index in prefix entry {piece!r}", 1, 1
            ) from exc
        entries.append((index, _prefix_value(value.strip(), piece)))
    return entries


def _prefix_value(text: str, piece: str):
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return as_rat(Fraction(int(num), int(den)))
        except (ValueError, ZeroDivisionError) as exc:
            raise ExprSyntaxError(
                f"bad rational in prefix entry {piece!r}", 1, 1
            ) from exc
    try:
        if "." in text or "e" in text or "E" in text:
            return float(text)
        return int(text)
    except ValueError as exc:
        raise ExprSyntaxError(f"bad value in prefix entry {piece!r}", 1, 1) from exc
