"""Term expressions: grammar, parser, printer, and evaluator.

An expression describes the general term ``a_n`` of a series as a function of
the index variable ``n``.  The concrete syntax is a stable public contract:

.. code-block:: text

    expression := addsub
    addsub     := muldiv (('+' | '-') muldiv)*          left associative
    muldiv     := unary (('*' | '/') unary)*            left associative
    unary      := '-' unary | power
    power      := postfix ('^' unary)?                  right associative
    postfix    := atom '!'*
    atom       := NUMBER | 'n' | 'pi' | 'e'
                | FUNC '(' expression ')'
                | '(' expression ')'
    FUNC       := 'ln' | 'log2' | 'exp' | 'sqrt' | 'factorial'
    NUMBER     := DIGITS ('.' DIGITS)?

Binding tightness, loosest to tightest: addition/subtraction, then
multiplication/division, then unary minus, then ``^``, then postfix ``!``.
So ``2^3^2`` is ``2^(3^2) = 512``, ``1+2*3`` is ``7``, ``-2^2`` is ``-(2^2)``,
and ``n!^2`` is ``(n!)^2``.  There is no implicit multiplication: ``2n`` is a
syntax error.  Decimal literals are exact rationals (``0.5`` is one half, not
a binary float).  Unknown identifiers are rejected at parse time.

Parse failures raise :class:`ParseError` carrying the character offset and the
expected token class, so callers can render caret diagnostics.

Printing produces canonical text that re-parses to a structurally identical
tree.  (Programmatic trees can contain constants the grammar cannot spell,
such as ``1/3`` as a single constant; these render parenthesized as fractions
and re-parse as division nodes instead.  Parser-produced trees never contain
them.)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from kummertest import numeric
from kummertest.numeric import NumericValue, exact

__all__ = [
    "Expr",
    "Constant",
    "Var",
    "NamedConst",
    "Neg",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Factorial",
    "Call",
    "ParseError",
    "EvalMode",
    "parse",
    "to_text",
    "evaluate",
    "is_exactly_evaluable",
    "FUNCTIONS",
]

FUNCTIONS = ("ln", "log2", "exp", "sqrt", "factorial")
NAMED_CONSTANTS = ("pi", "e")


class ParseError(ValueError):
    """Syntax error with a character offset into the source text.

    Attributes:
        offset: 0-based position of the offending character.
        expected: short description of what would have been accepted.
    """

    def __init__(self, message: str, offset: int, expected: str | None = None):
        self.offset = offset
        self.expected = expected
        detail = message
        if expected:
            detail = "%s (expected %s)" % (message, expected)
        super().__init__("%s at offset %d" % (detail, offset))
        self.message = detail


# -- abstract syntax -------------------------------------------------------------


class Expr:
    """Base class for expression nodes. Nodes are frozen and compare structurally."""

    __slots__ = ()


@dataclass(frozen=True)
class Constant(Expr):
    value: NumericValue


@dataclass(frozen=True)
class Var(Expr):
    """The series index ``n``."""


@dataclass(frozen=True)
class NamedConst(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Factorial(Expr):
    operand: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr


# -- tokenizer -------------------------------------------------------------------

_OPS = "+-*/^!()"


class _Tok:
    __slots__ = ("kind", "text", "offset", "value")

    def __init__(self, kind, text, offset, value=None):
        self.kind = kind
        self.text = text
        self.offset = offset
        self.value = value


def _tokenize(text: str) -> list[_Tok]:
    out = []
    i = 0
    size = len(text)
    while i < size:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            out.append(_Tok(ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < size and text[i].isdigit():
                i += 1
            if i < size and text[i] == ".":
                if i + 1 >= size or not text[i + 1].isdigit():
                    raise ParseError("dangling decimal point", i, "digit after '.'")
                i += 1
                while i < size and text[i].isdigit():
                    i += 1
                whole, frac = text[start:i].split(".", 1)
                scale = 10 ** len(frac)
                value = exact(int(whole) * scale + int(frac), scale)
            else:
                value = exact(int(text[start:i]))
            out.append(_Tok("number", text[start:i], start, value))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < size and (text[i].isalnum() or text[i] == "_"):
                i += 1
            out.append(_Tok("ident", text[start:i], start))
            continue
        raise ParseError("unexpected character %r" % ch, i, "operand or operator")
    out.append(_Tok("end", "", size))
    return out


# -- parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError("unexpected %s" % (tok.text and repr(tok.text) or "end of input"),
                             tok.offset, expected)
        return self.advance()

    def parse(self) -> Expr:
        node = self.addsub()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError("unexpected trailing input %r" % tok.text,
                             tok.offset, "end of expression")
        return node

    def addsub(self) -> Expr:
        node = self.muldiv()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.muldiv()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def muldiv(self) -> Expr:
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.postfix()
        if self.peek().kind == "^":
            self.advance()
            exponent = self.unary()
            node = Pow(node, exponent)
        return node

    def postfix(self) -> Expr:
        node = self.atom()
        while self.peek().kind == "!":
            self.advance()
            node = Factorial(node)
        return node

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Constant(tok.value)
        if tok.kind == "(":
            self.advance()
            node = self.addsub()
            self.expect(")", "')'")
            return node
        if tok.kind == "ident":
            self.advance()
            name = tok.text
            if name == "n":
                return Var()
            if name in NAMED_CONSTANTS:
                return NamedConst(name)
            if name in FUNCTIONS:
                self.expect("(", "'(' after function name %r" % name)
                arg = self.addsub()
                self.expect(")", "')'")
                return Call(name, arg)
            raise ParseError("unknown identifier %r" % name, tok.offset,
                             "'n', 'pi', 'e', or a function name")
        raise ParseError("unexpected %s" % (tok.text and repr(tok.text) or "end of input"),
                         tok.offset, "number, identifier, or '('")


def parse(text: str) -> Expr:
    """Parse source text into an expression tree. Raises :class:`ParseError`."""
    return _Parser(text).parse()


# -- printer ---------------------------------------------------------------------

_LEVEL_ADD = 1
_LEVEL_MUL = 2
_LEVEL_UNARY = 3
_LEVEL_POW = 4
_LEVEL_POSTFIX = 5
_LEVEL_ATOM = 6


def _format_constant(value: NumericValue) -> tuple[str, int]:
    """Render a constant; returns (text, precedence level of the rendering)."""
    if not value.is_exact:
        # Approx constants only occur in programmatic trees.
        text = numeric.format_value(value, 17)
        return text, (_LEVEL_UNARY if text.startswith("-") else _LEVEL_ATOM)
    q = value.q
    num = int(q.numerator)
    den = int(q.denominator)
    sign = "-" if num < 0 else ""
    num = abs(num)
    if den == 1:
        return sign + str(num), (_LEVEL_UNARY if sign else _LEVEL_ATOM)
    twos = fives = 0
    d = den
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        # Denominator divides a power of ten: render as an exact decimal.
        k = max(twos, fives)
        scaled = num * 10**k // den
        digits = str(scaled).rjust(k + 1, "0")
        text = sign + digits[:-k] + "." + digits[-k:]
        return text, (_LEVEL_UNARY if sign else _LEVEL_ATOM)
    # Not spellable as a literal; renders as a fraction (re-parses as division).
    return "%s%d/%d" % (sign, num, den), _LEVEL_MUL


def _render(node: Expr, min_level: int) -> str:
    text, level = _raw(node)
    if level < min_level:
        return "(" + text + ")"
    return text


def _raw(node: Expr) -> tuple[str, int]:
    if isinstance(node, Constant):
        return _format_constant(node.value)
    if isinstance(node, Var):
        return "n", _LEVEL_ATOM
    if isinstance(node, NamedConst):
        return node.name, _LEVEL_ATOM
    if isinstance(node, Add):
        return "%s+%s" % (_render(node.left, _LEVEL_ADD),
                          _render(node.right, _LEVEL_MUL)), _LEVEL_ADD
    if isinstance(node, Sub):
        return "%s-%s" % (_render(node.left, _LEVEL_ADD),
                          _render(node.right, _LEVEL_MUL)), _LEVEL_ADD
    if isinstance(node, Mul):
        return "%s*%s" % (_render(node.left, _LEVEL_MUL),
                          _render(node.right, _LEVEL_UNARY)), _LEVEL_MUL
    if isinstance(node, Div):
        return "%s/%s" % (_render(node.left, _LEVEL_MUL),
                          _render(node.right, _LEVEL_UNARY)), _LEVEL_MUL
    if isinstance(node, Neg):
        return "-%s" % _render(node.operand, _LEVEL_UNARY), _LEVEL_UNARY
    if isinstance(node, Pow):
        return "%s^%s" % (_render(node.base, _LEVEL_POSTFIX),
                          _render(node.exponent, _LEVEL_UNARY)), _LEVEL_POW
    if isinstance(node, Factorial):
        return "%s!" % _render(node.operand, _LEVEL_POSTFIX), _LEVEL_POSTFIX
    if isinstance(node, Call):
        return "%s(%s)" % (node.func, _render(node.arg, _LEVEL_ADD)), _LEVEL_ATOM
    raise TypeError("not an expression node: %r" % (node,))


def to_text(expr: Expr) -> str:
    """Canonical text for a tree; re-parsing it reproduces the same structure."""
    return _raw(expr)[0]


# -- evaluator -------------------------------------------------------------------


class EvalMode(enum.Enum):
    """Evaluation strategy for :func:`evaluate`."""

    EXACT_PREFERRED = "exact-preferred"
    FORCE_APPROX = "force-approx"


def evaluate(expr: Expr, n: int, mode: EvalMode = EvalMode.EXACT_PREFERRED) -> NumericValue:
    """Evaluate the expression at index ``n``.

    In ``EXACT_PREFERRED`` mode the result is Exact whenever every step is
    rational (integer powers, factorials, field operations); irrational steps
    switch the affected subtree to Approx.  In ``FORCE_APPROX`` mode every
    value is carried on the Approx track; integer-valued exponents and
    factorial arguments are still resolved exactly so that their domain checks
    stay decidable.

    Raises :class:`~kummertest.numeric.DomainError` on domain violations
    (``ln`` of a nonpositive value, division by zero, factorial of a
    non-integer) and :class:`~kummertest.numeric.ResourceError` when exact
    arithmetic blows the bit budget.
    """
    force = mode is EvalMode.FORCE_APPROX

    def walk(node: Expr) -> NumericValue:
        if isinstance(node, Constant):
            return node.value.to_approx() if force else node.value
        if isinstance(node, Var):
            v = exact(n)
            return v.to_approx() if force else v
        if isinstance(node, NamedConst):
            return numeric.const_pi() if node.name == "pi" else numeric.const_e()
        if isinstance(node, Neg):
            return -walk(node.operand)
        if isinstance(node, Add):
            return walk(node.left) + walk(node.right)
        if isinstance(node, Sub):
            return walk(node.left) - walk(node.right)
        if isinstance(node, Mul):
            return walk(node.left) * walk(node.right)
        if isinstance(node, Div):
            return walk(node.left) / walk(node.right)
        if isinstance(node, Pow):
            base = walk(node.base)
            # Resolve the exponent exactly when possible, so integer powers
            # stay integer powers on the Approx track too.
            try:
                ev = evaluate(node.exponent, n, EvalMode.EXACT_PREFERRED)
            except numeric.DomainError:
                ev = walk(node.exponent)
            if ev.is_exact and ev.q.denominator == 1:
                return numeric.powi(base, int(ev.q))
            return numeric.power(base, ev if not force else ev.to_approx())
        if isinstance(node, Factorial):
            arg = evaluate(node.operand, n, EvalMode.EXACT_PREFERRED)
            out = numeric.factorial(arg)
            return out.to_approx() if force else out
        if isinstance(node, Call):
            if node.func == "factorial":
                arg = evaluate(node.arg, n, EvalMode.EXACT_PREFERRED)
                out = numeric.factorial(arg)
                return out.to_approx() if force else out
            arg = walk(node.arg)
            if node.func == "ln":
                return numeric.ln(arg)
            if node.func == "log2":
                return numeric.ln(arg) / numeric.ln(exact(2))
            if node.func == "exp":
                return numeric.exp(arg)
            if node.func == "sqrt":
                return numeric.sqrt(arg)
            raise ValueError("unknown function %r" % node.func)
        raise TypeError("not an expression node: %r" % (node,))

    return walk(expr)


# -- static exactness classifier ---------------------------------------------------


def _integer_valued(node: Expr) -> bool:
    """Conservatively: does this subtree take integer values for every n >= 1?"""
    if isinstance(node, Constant):
        return node.value.is_integer()
    if isinstance(node, Var):
        return True
    if isinstance(node, Neg):
        return _integer_valued(node.operand)
    if isinstance(node, (Add, Sub, Mul)):
        return _integer_valued(node.left) and _integer_valued(node.right)
    if isinstance(node, Factorial):
        return _integer_valued(node.operand)
    if isinstance(node, Pow):
        # Nonnegative exponent guarantees an integer result.
        if not _integer_valued(node.base):
            return False
        exp = node.exponent
        if isinstance(exp, Constant):
            return exp.value.is_integer() and exp.value.q >= 0
        return isinstance(exp, (Var, Factorial)) and _integer_valued(exp)
    return False


def is_exactly_evaluable(expr: Expr) -> bool:
    """Does evaluation stay on the Exact track for every index?

    True exactly for the decidable fragment: field operations over integer
    constants, decimal literals, ``n``, factorials of integer-valued subtrees,
    and powers with integer-valued exponents.  Named constants, ``ln``,
    ``log2``, ``exp``, ``sqrt``, and fractional powers make it false.
    """
    if isinstance(expr, Constant):
        return expr.value.is_exact
    if isinstance(expr, Var):
        return True
    if isinstance(expr, NamedConst):
        return False
    if isinstance(expr, Neg):
        return is_exactly_evaluable(expr.operand)
    if isinstance(expr, (Add, Sub, Mul, Div)):
        return is_exactly_evaluable(expr.left) and is_exactly_evaluable(expr.right)
    if isinstance(expr, Pow):
        return is_exactly_evaluable(expr.base) and _integer_valued(expr.exponent)
    if isinstance(expr, Factorial):
        return _integer_valued(expr.operand)
    if isinstance(expr, Call):
        # factorial is the one function that stays exact
        return expr.func == "factorial" and _integer_valued(expr.arg)
    raise TypeError("not an expression node: %r" % (expr,))
