from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Sequence

from common.errors import (
    ExprError,
    ExprSyntaxError,
    UnknownFunctionError,
    UnknownIdentifierError,
)

from .ast import FUNCTIONS, BinOp, Call, ExprAst, Neg, Node, Num, Var

IDENTIFIER = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[a-zA-Z][a-zA-Z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)

# (left binding power, right binding power)
_INFIX = {
    "+": (10, 11),
    "-": (10, 11),
    "*": (20, 21),
    "/": (20, 21),
    "^": (40, 39),
}
_PREFIX_BP = 30


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(source):
        if source[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(source, pos)
        if match is None or match.end() == pos:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos)
        kind = match.lastgroup or "op"
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(Token("eof", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, variables: Sequence[str]) -> None:
        self.tokens = tokenize(source)
        self.variables = set(variables)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.advance()
        if token.text != text or token.kind != "op":
            found = "end of input" if token.kind == "eof" else repr(token.text)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", token.offset)
        return token

    def expression(self, rbp: int = 0) -> Node:
        left = self.prefix(self.advance())
        while True:
            token = self.peek()
            if token.kind != "op" or token.text not in _INFIX:
                return left
            lbp, next_rbp = _INFIX[token.text]
            if lbp <= rbp:
                return left
            self.advance()
            right = self.expression(next_rbp)
            left = BinOp(token.text, left, right, token.offset)

    def prefix(self, token: Token) -> Node:
        if token.kind == "number":
            return Num(float(token.text), token.offset)
        if token.kind == "ident":
            return self.identifier(token)
        if token.kind == "op":
            if token.text == "-":
                return Neg(self.expression(_PREFIX_BP), token.offset)
            if token.text == "+":
                return self.expression(_PREFIX_BP)
            if token.text == "(":
                inner = self.expression(0)
                self.expect(")")
                return inner
        if token.kind == "eof":
            raise ExprSyntaxError("unexpected end of input", token.offset)
        raise ExprSyntaxError(f"unexpected token {token.text!r}", token.offset)

    def identifier(self, token: Token) -> Node:
        following = self.peek()
        if following.kind == "op" and following.text == "(":
            if token.text not in FUNCTIONS:
                raise UnknownFunctionError(token.text, token.offset)
            self.advance()
            arg = self.expression(0)
            self.expect(")")
            return Call(token.text, arg, token.offset)
        if token.text in self.variables:
            return Var(token.text, token.offset)
        if token.text in FUNCTIONS:
            raise ExprSyntaxError(f"function {token.text!r} needs an argument", token.offset)
        raise UnknownIdentifierError(token.text, token.offset)


def _check_variables(variables: Sequence[str]) -> tuple[str, ...]:
    seen: set[str] = set()
    for name in variables:
        if not IDENTIFIER.fullmatch(name):
            raise ExprError(f"invalid variable name {name!r}")
        if name in FUNCTIONS:
            raise ExprError(f"variable name {name!r} shadows a function")
        if name in seen:
            raise ExprError(f"duplicate variable name {name!r}")
        seen.add(name)
    return tuple(variables)


def parse(source: str, variables: Optional[Sequence[str]] = None) -> ExprAst:
    names = _check_variables(list(variables or ()))
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    parser = _Parser(source, names)
    root = parser.expression(0)
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise ExprSyntaxError(f"unexpected token {trailing.text!r}", trailing.offset)
    return ExprAst(root=root, variables=names, source=source)
