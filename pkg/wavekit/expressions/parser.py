import re
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Set, Union

from ..errors import ArityError, ExpressionSyntaxError, UnknownIdentifierError

FUNCTIONS = ('sqrt', 'abs', 'exp', 'ln', 'sin', 'cos')
VARIABLE = 'u'


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Parameter:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' or one of FUNCTIONS
    operand: 'Node'


@dataclass(frozen=True)
class Binary:
    op: str  # '+', '-', '*', '/', '^'
    left: 'Node'
    right: 'Node'


@dataclass(frozen=True)
class Group:
    inner: 'Node'


Node = Union[Constant, Variable, Parameter, Unary, Binary, Group]


@dataclass(frozen=True)
class Expression:
    """Parsed expression in the variable u; `source` keeps the text it came from"""
    ast: Node
    source: str

    def parameter_names(self) -> Set[str]:
        return _collect_parameters(self.ast)

    def unparse(self) -> str:
        return unparse(self.ast)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'number', 'name', 'op', 'end'
    text: str
    offset: int


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def tokenize(source: str) -> List[_Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == '':
            break
        match = _TOKEN_RE.match(source, pos)
        if match is None or match.end() == pos:
            bad = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExpressionSyntaxError(f"Unexpected character {source[bad]!r}", bad)
        kind = match.lastgroup
        tokens.append(_Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(_Token('end', '', len(source)))
    return tokens


class _Parser:
    """Recursive descent over the grammar

        expr   := term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := power
        power  := atom ('^' power)?
        atom   := number | 'u' | name | func '(' expr ')' | '(' expr ')' | '-' atom
    """

    def __init__(self, source: str, params: Mapping[str, float]):
        self.source = source
        self.params = params
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def _advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _expect(self, text: str) -> _Token:
        token = self.current
        if token.text != text:
            found = token.text or 'end of input'
            raise ExpressionSyntaxError(f"Expected {text!r} but found {found!r}", token.offset)
        return self._advance()

    def parse(self) -> Node:
        node = self._expr()
        if self.current.kind != 'end':
            raise ExpressionSyntaxError(f"Unexpected token {self.current.text!r}", self.current.offset)
        return node

    def _expr(self) -> Node:
        node = self._term()
        while self.current.text in ('+', '-'):
            op = self._advance().text
            node = Binary(op, node, self._term())
        return node

    def _term(self) -> Node:
        node = self._factor()
        while self.current.text in ('*', '/'):
            op = self._advance().text
            node = Binary(op, node, self._factor())
        return node

    def _factor(self) -> Node:
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        if self.current.text == '^':
            self._advance()
            return Binary('^', base, self._power())
        return base

    def _atom(self) -> Node:
        token = self.current
        if token.kind == 'number':
            self._advance()
            return Constant(float(token.text))
        if token.text == '-':
            self._advance()
            return Unary('neg', self._atom())
        if token.text == '(':
            self._advance()
            inner = self._expr()
            self._expect(')')
            return Group(inner)
        if token.kind == 'name':
            self._advance()
            if token.text in FUNCTIONS:
                return self._call(token)
            if self.current.text == '(':
                raise UnknownIdentifierError(f"Unknown function {token.text!r}", token.offset)
            if token.text == VARIABLE:
                return Variable()
            if token.text not in self.params:
                raise UnknownIdentifierError(f"Unknown identifier {token.text!r}", token.offset)
            return Parameter(token.text)
        found = token.text or 'end of input'
        raise ExpressionSyntaxError(f"Unexpected {found!r}", token.offset)

    def _call(self, name: _Token) -> Node:
        if self.current.text != '(':
            raise ArityError(f"Function {name.text!r} takes exactly one argument in parentheses", name.offset)
        self._advance()
        if self.current.text == ')':
            raise ArityError(f"Function {name.text!r} called without an argument", self.current.offset)
        argument = self._expr()
        if self.current.text == ',':
            raise ArityError(f"Function {name.text!r} takes exactly one argument", self.current.offset)
        self._expect(')')
        return Unary(name.text, argument)


def parse(source: str, params: Optional[Mapping[str, float]] = None) -> Expression:
    if source is None or not source.strip():
        raise ExpressionSyntaxError("Empty expression", 0)
    ast = _Parser(source, params or {}).parse()
    return Expression(ast=ast, source=source)


_PRECEDENCE = {'+': 1, '-': 1, '*': 2, '/': 2, '^': 3}


def _wrap(node: Node, needs_parens: bool) -> str:
    text = unparse(node)
    return f"({text})" if needs_parens else text


def unparse(node: Node) -> str:
    """Render an AST back to grammar text; parsed trees come back structurally identical"""
    if isinstance(node, Constant):
        return repr(float(node.value))
    if isinstance(node, Variable):
        return VARIABLE
    if isinstance(node, Parameter):
        return node.name
    if isinstance(node, Group):
        return f"({unparse(node.inner)})"
    if isinstance(node, Unary):
        if node.op == 'neg':
            return '-' + _wrap(node.operand, isinstance(node.operand, Binary))
        return f"{node.op}({unparse(node.operand)})"
    if isinstance(node, Binary):
        prec = _PRECEDENCE[node.op]
        left_parens = isinstance(node.left, Binary) and (
            _PRECEDENCE[node.left.op] < prec or (node.op == '^'))
        right_parens = isinstance(node.right, Binary) and (
            _PRECEDENCE[node.right.op] < prec or (_PRECEDENCE[node.right.op] == prec and node.op != '^'))
        return f"{_wrap(node.left, left_parens)} {node.op} {_wrap(node.right, right_parens)}"
    raise TypeError(f"Not an expression node: {node!r}")


def substitute(node: Node, replacement: Node) -> Node:
    """Replace every occurrence of the variable u with `replacement`"""
    if isinstance(node, Variable):
        return replacement
    if isinstance(node, (Constant, Parameter)):
        return node
    if isinstance(node, Group):
        return Group(substitute(node.inner, replacement))
    if isinstance(node, Unary):
        return Unary(node.op, substitute(node.operand, replacement))
    if isinstance(node, Binary):
        return Binary(node.op, substitute(node.left, replacement), substitute(node.right, replacement))
    raise TypeError(f"Not an expression node: {node!r}")


def _collect_parameters(node: Node) -> Set[str]:
    if isinstance(node, Parameter):
        return {node.name}
    if isinstance(node, Group):
        return _collect_parameters(node.inner)
    if isinstance(node, Unary):
        return _collect_parameters(node.operand)
    if isinstance(node, Binary):
        return _collect_parameters(node.left) | _collect_parameters(node.right)
    return set()


def negated(expr: Expression) -> Expression:
    ast = Unary('neg', Group(expr.ast))
    return Expression(ast=ast, source=unparse(ast))


def product(left: Expression, right: Expression) -> Expression:
    ast = Binary('*', Group(left.ast), Group(right.ast))
    return Expression(ast=ast, source=unparse(ast))


def reflected(expr: Expression, alpha: float, beta: float) -> Expression:
    """Expression in u for expr(alpha + beta - u)"""
    mirror = Group(Binary('-', Constant(float(alpha + beta)), Variable()))
    ast = substitute(expr.ast, mirror)
    return Expression(ast=ast, source=unparse(ast))


def constant_params(params: Optional[Mapping[str, float]]) -> Dict[str, float]:
    return {name: float(value) for name, value in (params or {}).items()}
