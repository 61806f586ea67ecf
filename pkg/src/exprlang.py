"""A small expression language for metric components, Lee forms, surfaces and maps.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative, integer exponent
    atom    := number | 'i' | 'pi' | identifier | func '(' expr ')' | '(' expr ')'

``i`` is the imaginary unit. Functions: sin, cos, exp, log, sqrt, conj, re, im, abs.
Expressions are immutable trees; they evaluate on plain complex numbers (``evaluate``) or on
second-order jets (``eval_jet``). Domain guards are comparisons joined by ``and``
(``parse_guard``).
"""

import cmath
import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from src.autodiff import SINGULAR_EPS, Jet2, elementary
from src.errors import DomainError, ExpressionSyntaxError, UnboundVariable

Number = Union[int, float, complex]
Value = Union[complex, Jet2]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "conj", "re", "im", "abs")
CONSTANTS = {"i": 1j, "pi": complex(math.pi)}

PREC_SUM, PREC_PRODUCT, PREC_UNARY, PREC_POWER, PREC_ATOM = 1, 2, 3, 4, 5


# ----------------------------------------------------------------------------
# Nodes
# ----------------------------------------------------------------------------

class Expression:
    """Base class of expression nodes."""

    prec = PREC_ATOM

    def evaluate(self, env: Mapping[str, Number]) -> complex:
        raise NotImplementedError

    def jet(self, env: Mapping[str, Jet2]) -> Value:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def variables(self) -> FrozenSet[str]:
        raise NotImplementedError

    def derivative(self, name: str) -> "Expression":
        raise NotImplementedError

    def substitute(self, mapping: Mapping[str, "Expression"]) -> "Expression":
        raise NotImplementedError

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Const(Expression):
    value: complex

    def evaluate(self, env):
        return complex(self.value)

    def jet(self, env):
        return complex(self.value)

    def render(self) -> str:
        v = complex(self.value)
        if v == 1j:
            return "i"
        if v.imag == 0.0:
            text = repr(float(v.real))
            return f"({text})" if v.real < 0 or text.startswith("-") else text
        return f"({repr(v.real)} + {repr(v.imag)}*i)"

    def variables(self):
        return frozenset()

    def derivative(self, name):
        return ZERO

    def substitute(self, mapping):
        return self


@dataclass(frozen=True)
class Var(Expression):
    name: str

    def evaluate(self, env):
        if self.name not in env:
            raise UnboundVariable(self.name)
        return complex(env[self.name])

    def jet(self, env):
        if self.name not in env:
            raise UnboundVariable(self.name)
        return env[self.name]

    def render(self) -> str:
        return self.name

    def variables(self):
        return frozenset((self.name,))

    def derivative(self, name):
        return ONE if name == self.name else ZERO

    def substitute(self, mapping):
        return mapping.get(self.name, self)


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression
    prec = PREC_UNARY

    def evaluate(self, env):
        return -self.operand.evaluate(env)

    def jet(self, env):
        return -self.operand.jet(env)

    def render(self) -> str:
        inner = self.operand.render()
        if self.operand.prec < PREC_UNARY:
            inner = f"({inner})"
        return f"-{inner}"

    def variables(self):
        return self.operand.variables()

    def derivative(self, name):
        return neg(self.operand.derivative(name))

    def substitute(self, mapping):
        return Neg(self.operand.substitute(mapping))


def _checked_division(a: Value, b: Value) -> Value:
    if not isinstance(b, Jet2) and abs(b) < SINGULAR_EPS:
        raise DomainError(f"Division by a value of modulus {abs(b):.3e}")
    return a / b


_BINARY: Dict[str, Callable[[Value, Value], Value]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _checked_division,
}


@dataclass(frozen=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression

    @property
    def prec(self) -> int:
        return PREC_SUM if self.op in "+-" else PREC_PRODUCT

    def evaluate(self, env):
        return complex(_BINARY[self.op](self.left.evaluate(env), self.right.evaluate(env)))

    def jet(self, env):
        return _BINARY[self.op](self.left.jet(env), self.right.jet(env))

    def render(self) -> str:
        left, right = self.left.render(), self.right.render()
        if self.left.prec < self.prec:
            left = f"({left})"
        if self.right.prec <= self.prec:
            right = f"({right})"
        return f"{left} {self.op} {right}"

    def variables(self):
        return self.left.variables() | self.right.variables()

    def derivative(self, name):
        a, b = self.left, self.right
        da, db = a.derivative(name), b.derivative(name)
        if self.op == "+":
            return add(da, db)
        if self.op == "-":
            return sub(da, db)
        if self.op == "*":
            return add(mul(da, b), mul(a, db))
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))

    def substitute(self, mapping):
        return BinOp(self.op, self.left.substitute(mapping), self.right.substitute(mapping))


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: int
    prec = PREC_POWER

    def evaluate(self, env):
        b = self.base.evaluate(env)
        if self.exponent < 0 and abs(b) < SINGULAR_EPS:
            raise DomainError(f"Negative power of a value of modulus {abs(b):.3e}")
        return b ** self.exponent

    def jet(self, env):
        b = self.base.jet(env)
        if isinstance(b, Jet2):
            return b ** self.exponent
        if self.exponent < 0 and abs(b) < SINGULAR_EPS:
            raise DomainError(f"Negative power of a value of modulus {abs(b):.3e}")
        return b ** self.exponent

    def render(self) -> str:
        base = self.base.render()
        if self.base.prec <= PREC_POWER:
            base = f"({base})"
        exponent = str(self.exponent) if self.exponent >= 0 else f"({self.exponent})"
        return f"{base}^{exponent}"

    def variables(self):
        return self.base.variables()

    def derivative(self, name):
        n = self.exponent
        if n == 0:
            return ZERO
        return mul(mul(Const(complex(n)), power(self.base, n - 1)), self.base.derivative(name))

    def substitute(self, mapping):
        return Pow(self.base.substitute(mapping), self.exponent)


def _scalar_function(name: str, v: complex) -> complex:
    if name in ("log", "sqrt") and abs(v) < SINGULAR_EPS:
        raise DomainError(f"{name} at the branch point 0")
    if name == "sin":
        return elementary("sin", cmath.sin, v)
    if name == "cos":
        return elementary("cos", cmath.cos, v)
    if name == "exp":
        return elementary("exp", cmath.exp, v)
    if name == "log":
        return cmath.log(v)
    if name == "sqrt":
        return cmath.sqrt(v)
    if name == "conj":
        return v.conjugate()
    if name == "re":
        return complex(v.real)
    if name == "im":
        return complex(v.imag)
    return complex(abs(v))


def _jet_function(name: str, v: Jet2) -> Jet2:
    if name == "conj":
        return v.conjugate()
    if name == "re":
        return v.real()
    if name == "im":
        return v.imag()
    return getattr(v, name)()


@dataclass(frozen=True)
class Call(Expression):
    func: str
    arg: Expression

    def evaluate(self, env):
        return _scalar_function(self.func, self.arg.evaluate(env))

    def jet(self, env):
        a = self.arg.jet(env)
        if isinstance(a, Jet2):
            return _jet_function(self.func, a)
        return _scalar_function(self.func, complex(a))

    def render(self) -> str:
        return f"{self.func}({self.arg.render()})"

    def variables(self):
        return self.arg.variables()

    def derivative(self, name):
        a = self.arg
        da = a.derivative(name)
        if is_zero(da):
            return ZERO
        f = self.func
        if f == "sin":
            return mul(call("cos", a), da)
        if f == "cos":
            return neg(mul(call("sin", a), da))
        if f == "exp":
            return mul(self, da)
        if f == "log":
            return div(da, a)
        if f == "sqrt":
            return div(da, mul(Const(2.0), self))
        if f in ("conj", "re", "im"):
            return call(f, da)
        # d|a| = re(conj(a)·da)/|a|
        return div(call("re", mul(call("conj", a), da)), self)

    def substitute(self, mapping):
        return Call(self.func, self.arg.substitute(mapping))


ZERO = Const(0j)
ONE = Const(1 + 0j)


# ----------------------------------------------------------------------------
# Builders with light constant folding (no general simplification)
# ----------------------------------------------------------------------------

def const(value: Number) -> Const:
    return Const(complex(value))


def is_zero(e: Expression) -> bool:
    return isinstance(e, Const) and e.value == 0


def is_one(e: Expression) -> bool:
    return isinstance(e, Const) and e.value == 1


def as_expression(e: Union[Expression, Number, str]) -> Expression:
    if isinstance(e, Expression):
        return e
    if isinstance(e, str):
        return parse(e)
    return const(e)


def add(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if is_zero(a):
        return b
    if is_zero(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return BinOp("+", a, b)


def sub(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if is_zero(b):
        return a
    if is_zero(a):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def mul(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if is_zero(a) or is_zero(b):
        return ZERO
    if is_one(a):
        return b
    if is_one(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def div(a, b) -> Expression:
    a, b = as_expression(a), as_expression(b)
    if is_zero(b):
        raise DomainError("Symbolic division by zero")
    if is_zero(a):
        return ZERO
    if is_one(b):
        return a
    return BinOp("/", a, b)


def neg(a) -> Expression:
    a = as_expression(a)
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def power(a, n: int) -> Expression:
    a = as_expression(a)
    if n == 0:
        return ONE
    if n == 1:
        return a
    if is_zero(a) and n > 0:
        return ZERO
    return Pow(a, int(n))


def call(func: str, a) -> Expression:
    if func not in FUNCTIONS:
        raise ValueError(f"Unknown function '{func}'")
    a = as_expression(a)
    if func == "conj" and isinstance(a, Call) and a.func == "conj":
        return a.arg
    if isinstance(a, Const) and func in ("conj", "re", "im") :
        return Const(_scalar_function(func, a.value))
    return Call(func, a)


def total(terms: Sequence[Expression]) -> Expression:
    result: Expression = ZERO
    for term in terms:
        result = add(result, term)
    return result


# ----------------------------------------------------------------------------
# Tokenizer and parser
# ----------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<cmp><=|>=|!=|==|≠|<|>)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | op | cmp | end
    text: str
    offset: int  # byte offset in the UTF-8 source


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {source[pos]!r}", _byte_offset(source, pos))
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, match.group(), _byte_offset(source, pos)))
        pos = match.end()
    tokens.append(Token("end", "", _byte_offset(source, len(source))))
    return tokens


def _byte_offset(source: str, index: int) -> int:
    return len(source[:index].encode("utf-8"))


_OPERAND_START = ("number", "identifier", "function call", "'('", "'-'")


def _is_literal(node: Expression) -> bool:
    """Numbers and i combined by +, - and * only."""
    if isinstance(node, Const):
        return True
    if isinstance(node, Neg):
        return _is_literal(node.operand)
    if isinstance(node, BinOp):
        return node.op in "+-*" and _is_literal(node.left) and _is_literal(node.right)
    return False


class _Parser:
    def __init__(self, source: str) -> None:
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def fail(self, message: str, expected: Sequence[str]) -> None:
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise ExpressionSyntaxError(f"{message}, found {found}", token.offset, expected)

    def expect_end(self, extra: Sequence[str] = ()) -> None:
        if self.current.kind != "end":
            self.fail("Unexpected token", ("end of input", "'+'", "'-'", "'*'", "'/'", "'^'") + tuple(extra))

    def is_op(self, text: str) -> bool:
        return self.current.kind == "op" and self.current.text == text

    def parse_expr(self) -> Expression:
        node = self.parse_term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expression:
        node = self.parse_unary()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expression:
        if self.is_op("-"):
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expression:
        base = self.parse_atom()
        if self.is_op("^"):
            token = self.advance()
            exponent = self.parse_unary()
            return Pow(base, self._integer_exponent(exponent, token))
        return base

    def _integer_exponent(self, exponent: Expression, token: Token) -> int:
        if exponent.variables():
            raise ExpressionSyntaxError("Exponent must be an integer constant", token.offset, ("integer",))
        value = exponent.evaluate({})
        if value.imag != 0.0 or value.real != math.floor(value.real) or abs(value.real) > 1e6:
            raise ExpressionSyntaxError("Exponent must be an integer constant", token.offset, ("integer",))
        return int(value.real)

    def parse_atom(self) -> Expression:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Const(complex(float(token.text)))
        if token.kind == "ident":
            self.advance()
            if token.text in FUNCTIONS:
                if not self.is_op("("):
                    self.fail(f"Function '{token.text}' needs an argument", ("'('",))
                self.advance()
                arg = self.parse_expr()
                if not self.is_op(")"):
                    self.fail("Unclosed call", ("')'",))
                self.advance()
                return Call(token.text, arg)
            if token.text in CONSTANTS:
                return Const(CONSTANTS[token.text])
            return Var(token.text)
        if self.is_op("("):
            self.advance()
            node = self.parse_expr()
            if not self.is_op(")"):
                self.fail("Unclosed parenthesis", ("')'",))
            self.advance()
            # Const.render writes "(-1.5)" and "(2.0 + -3.0*i)"
            return Const(node.evaluate({})) if _is_literal(node) else node
        self.fail("Expected an operand", _OPERAND_START)


def parse(source: str) -> Expression:
    """Parses an expression.

    A parenthesized group of numbers and ``i`` joined by +, - and * reads as one constant, so
    ``parse(render(e)) == e`` also for trees holding negative or complex constants.

    Raises:
        ExpressionSyntaxError: with the byte offset of the offending token and the set of
        expected tokens.
    """
    parser = _Parser(source)
    node = parser.parse_expr()
    parser.expect_end()
    return node


def render(e: Expression) -> str:
    return e.render()


def evaluate(e: Expression, env: Mapping[str, Number]) -> complex:
    return e.evaluate(env)


def eval_jet(e: Expression, env: Mapping[str, Jet2], n: Optional[int] = None) -> Jet2:
    """Evaluates an expression over second-order jets.

    All jets of ``env`` must share the same base dimension; ``n`` is only needed when ``env``
    is empty.
    """
    result = e.jet(env)
    if isinstance(result, Jet2):
        return result
    if n is None:
        if not env:
            raise ValueError("Base dimension unknown: pass n for expressions without bound jets")
        n = next(iter(env.values())).n
    return Jet2.constant(result, n)


def differentiate(e: Expression, name: str) -> Expression:
    """Symbolic partial derivative with respect to the real variable ``name``."""
    return e.derivative(name)


# ----------------------------------------------------------------------------
# Domain guards
# ----------------------------------------------------------------------------

_COMPARE = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "!=": lambda a, b: abs(a - b) > 1e-12,
    "≠": lambda a, b: abs(a - b) > 1e-12,
    "==": lambda a, b: abs(a - b) <= 1e-12,
}


@dataclass(frozen=True)
class Comparison:
    left: Expression
    op: str
    right: Expression

    def holds(self, env: Mapping[str, Number]) -> bool:
        return _COMPARE[self.op](self.left.evaluate(env).real, self.right.evaluate(env).real)

    def render(self) -> str:
        return f"{self.left.render()} {self.op} {self.right.render()}"


@dataclass(frozen=True)
class Guard:
    """Conjunction of comparisons; the empty guard always holds."""

    clauses: Tuple[Comparison, ...] = ()

    def holds(self, env: Mapping[str, Number]) -> bool:
        return all(clause.holds(env) for clause in self.clauses)

    def failing(self, env: Mapping[str, Number]) -> Optional[Comparison]:
        for clause in self.clauses:
            if not clause.holds(env):
                return clause
        return None

    def variables(self) -> FrozenSet[str]:
        names: FrozenSet[str] = frozenset()
        for clause in self.clauses:
            names = names | clause.left.variables() | clause.right.variables()
        return names

    def conjoin(self, other: "Guard") -> "Guard":
        return Guard(self.clauses + tuple(c for c in other.clauses if c not in self.clauses))

    def render(self) -> str:
        return " and ".join(clause.render() for clause in self.clauses)


TRUE = Guard()


def parse_guard(source: Optional[str]) -> Guard:
    """Parses ``expr op expr [and expr op expr ...]``; None or blank means no restriction."""
    if source is None or not str(source).strip():
        return TRUE
    clauses = []
    offset = 0
    for part in re.split(r"\band\b", str(source)):
        parser = _Parser(part)
        try:
            left = parser.parse_expr()
            if parser.current.kind != "cmp":
                parser.fail("Expected a comparison", tuple(f"'{op}'" for op in _COMPARE))
            op = parser.advance().text
            right = parser.parse_expr()
            parser.expect_end(("'and'",))
        except ExpressionSyntaxError as e:
            raise ExpressionSyntaxError(e.msg, e.offset + offset, e.expected) from None
        clauses.append(Comparison(left, op, right))
        offset += len(part.encode("utf-8")) + len("and")
    return Guard(tuple(clauses))
