"""Model file reader and writer.

Grammar (``#`` starts a comment, whitespace is insignificant)::

    model      ::= header? factor+ constraint*
    header     ::= 'model' STRING
    factor     ::= 'factor' NAME '{' NAME (',' NAME)* '}'
    constraint ::= 'constraint' expr
    expr       ::= or ('=>' expr)?
    or         ::= and ('||' and)*
    and        ::= not ('&&' not)*
    not        ::= '!' not | '(' expr ')' | NAME ('=' | '!=') NAME

Names may be numerals. Constraint lines are combined by conjunction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from clatool.constraints import (
    PRECEDENCE,
    And,
    Atom,
    ConstraintExpr,
    ConstTrue,
    Implies,
    Not,
    Or,
    Polarity,
)
from clatool.errors import InputError, ModelSyntaxError
from clatool.model import Factor, SutModel

KEYWORDS = frozenset({"model", "factor", "constraint"})

_TOKEN_RE = re.compile(
    r"""
    (?P<comment>\#[^\n]*)
  | (?P<newline>\n)
  | (?P<space>[ \t\r]+)
  | (?P<string>"[^"\n]*")
  | (?P<implies>=>)
  | (?P<neq>!=)
  | (?P<eq>=)
  | (?P<and>&&)
  | (?P<or>\|\|)
  | (?P<not>!)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<lbrace>\{)
  | (?P<rbrace>\})
  | (?P<comma>,)
  | (?P<name>[A-Za-z0-9_.\-]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind not in ("comment", "space"):
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _ModelParser:
    def __init__(self, tokens: list[Token], name: str):
        self.tokens = tokens
        self.pos = 0
        self.name = name
        self.factors: list[Factor] = []
        self.constraints: list[ConstraintExpr] = []

    def next(self) -> Token:
        return self.tokens[self.pos]

    def consume(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "eof":
            self.pos += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ModelSyntaxError:
        token = token or self.next()
        return ModelSyntaxError(message, token.line, token.column)

    def expect(self, kind: str, what: str) -> Token:
        token = self.next()
        if token.kind != kind:
            found = token.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}")
        return self.consume()

    def is_keyword(self, word: str) -> bool:
        token = self.next()
        return token.kind == "name" and token.text == word

    def parse(self) -> SutModel:
        if self.is_keyword("model"):
            self.consume()
            self.name = self.expect("string", "quoted model name").text[1:-1]
        while self.is_keyword("factor"):
            self._factor()
        if not self.factors:
            raise self.error("expected at least one factor declaration")
        while self.is_keyword("constraint"):
            self.consume()
            self.constraints.append(self._expr())
        if self.next().kind != "eof":
            if self.is_keyword("factor"):
                raise self.error("factor declarations must precede constraints")
            raise self.error(f"unexpected {self.next().text!r}")
        return SutModel(self.name, tuple(self.factors), tuple(self.constraints))

    def _factor(self) -> None:
        start = self.consume()
        name = self._name("factor name")
        if any(factor.name == name.text for factor in self.factors):
            raise self.error(f"duplicate factor name '{name.text}'", name)
        self.expect("lbrace", "'{'")
        values = [self._name("value name")]
        while self.next().kind == "comma":
            self.consume()
            values.append(self._name("value name"))
        self.expect("rbrace", "'}'")
        texts = [value.text for value in values]
        for index, value in enumerate(values):
            if value.text in texts[:index]:
                raise self.error(f"duplicate value '{value.text}' in factor '{name.text}'", value)
        if len(values) < 2:
            raise self.error(f"factor '{name.text}' needs at least 2 values", start)
        self.factors.append(Factor(name.text, tuple(texts)))

    def _name(self, what: str) -> Token:
        token = self.next()
        if token.kind != "name" or token.text in KEYWORDS:
            found = token.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}")
        return self.consume()

    def _expr(self) -> ConstraintExpr:
        lhs = self._or()
        if self.next().kind == "implies":
            self.consume()
            return Implies(lhs, self._expr())
        return lhs

    def _or(self) -> ConstraintExpr:
        children = [self._and()]
        while self.next().kind == "or":
            self.consume()
            children.append(self._and())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def _and(self) -> ConstraintExpr:
        children = [self._not()]
        while self.next().kind == "and":
            self.consume()
            children.append(self._not())
        return children[0] if len(children) == 1 else And(tuple(children))

    def _not(self) -> ConstraintExpr:
        token = self.next()
        if token.kind == "not":
            self.consume()
            return Not(self._not())
        if token.kind == "lparen":
            self.consume()
            inner = self._expr()
            self.expect("rparen", "')'")
            return inner
        return self._atom()

    def _atom(self) -> Atom:
        factor_token = self._name("factor name, '!' or '('")
        op = self.next()
        if op.kind not in ("eq", "neq"):
            raise self.error(f"expected '=' or '!=' after '{factor_token.text}'")
        self.consume()
        value_token = self._name("value name")
        atom_text = f"{factor_token.text} {op.text} {value_token.text}"
        index = next(
            (i for i, factor in enumerate(self.factors) if factor.name == factor_token.text), None
        )
        if index is None:
            raise self.error(f"unknown factor '{factor_token.text}' in atom {atom_text}", factor_token)
        values = self.factors[index].values
        if value_token.text not in values:
            raise self.error(
                f"unknown value '{value_token.text}' for factor '{factor_token.text}' in atom {atom_text}",
                value_token,
            )
        polarity = Polarity.EQUALS if op.kind == "eq" else Polarity.NOT_EQUALS
        return Atom(index, values.index(value_token.text), polarity)


def parse_model(text: str, name: str = "model") -> SutModel:
    """Parse model text; ``name`` is used when the text has no header."""
    return _ModelParser(tokenize(text), name).parse()


def load_model(path: Path) -> SutModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read model file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"Model file {path} is not valid UTF-8 (byte {e.start})") from e
    return parse_model(text, name=path.stem)


def format_expr(expr: ConstraintExpr, model: SutModel) -> str:
    """Constraint text with the fewest parentheses that parse back to the same tree."""
    if isinstance(expr, Atom):
        factor = model.factors[expr.factor]
        return f"{factor.name} {expr.polarity.value} {factor.values[expr.value]}"
    if isinstance(expr, Not):
        return "!" + _wrap(expr.child, model, PRECEDENCE[Not] - 1)
    if isinstance(expr, And):
        return " && ".join(_wrap(child, model, PRECEDENCE[And]) for child in expr.children)
    if isinstance(expr, Or):
        return " || ".join(_wrap(child, model, PRECEDENCE[Or]) for child in expr.children)
    if isinstance(expr, Implies):
        lhs = _wrap(expr.lhs, model, PRECEDENCE[Implies])
        rhs = _wrap(expr.rhs, model, PRECEDENCE[Implies] - 1)
        return f"{lhs} => {rhs}"
    if isinstance(expr, ConstTrue):
        raise InputError("ConstTrue has no textual form")
    raise TypeError(f"Unknown constraint node {expr!r}")


def _wrap(expr: ConstraintExpr, model: SutModel, floor: int) -> str:
    text = format_expr(expr, model)
    return f"({text})" if PRECEDENCE[type(expr)] <= floor else text


def serialize_model(model: SutModel) -> str:
    lines = [f'model "{model.name}"']
    for factor in model.factors:
        lines.append(f"factor {factor.name} {{ {', '.join(factor.values)} }}")
    for expr in model.constraints:
        lines.append(f"constraint {format_expr(expr, model)}")
    return "\n".join(lines) + "\n"
