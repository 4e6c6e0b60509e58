"""Recursive-descent parser for the ASCII MSO syntax.

Atoms: ``E(x,y)``, ``x = y``, ``x in X``, ``true``, ``false``.
Connectives: ``!``, ``&``, ``|``, ``->``, ``<->`` with precedence
``! > & > | > -> > <->``.  Quantifiers ``ex x.`` / ``all x.``
(first-order) and ``EX X.`` / ``ALL X.`` (second-order) scope maximally
to the right; parentheses override.  Lowercase-initial names are
first-order variables, uppercase-initial names are set variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from msolimits.errors import InputError
from msolimits import mso
from msolimits.mso import Formula

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op><->|->|[()!&|=.,]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "name" | "op" | "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            if line[pos] == "#":
                break
            m = _TOKEN_RE.match(line, pos)
            if m is None or m.start() != pos:
                raise InputError(f"line {lineno}, column {pos + 1}: unexpected character {line[pos]!r}")
            kind = "name" if m.group("name") else "op"
            tokens.append(_Token(kind, m.group().strip(), lineno, m.start() + 1))
            pos = m.end()
    tokens.append(_Token("eof", "", len(text.splitlines()) or 1, len(text) + 1))
    return tokens


def _is_fo_name(name: str) -> bool:
    return name[0].islower()


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: _Token, message: str) -> "InputError":
        return InputError(f"line {tok.line}, column {tok.col}: {message}")

    def expect_op(self, op: str) -> None:
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            raise self.fail(tok, f"expected {op!r}, found {tok.text or 'end of input'!r}")

    def parse(self) -> Formula:
        f = self.formula()
        tok = self.peek()
        if tok.kind != "eof":
            raise self.fail(tok, f"trailing input starting at {tok.text!r}")
        return f

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.implication()
        if self.peek().text == "<->":
            self.next()
            return mso.iff(left, self.iff())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek().text == "->":
            self.next()
            return mso.implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek().text == "|":
            self.next()
            f = mso.Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek().text == "&":
            self.next()
            f = mso.And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "!":
            self.next()
            return mso.Not(self.unary())
        if tok.text == "(":
            self.next()
            f = self.formula()
            self.expect_op(")")
            return f
        if tok.kind == "name":
            if tok.text in ("ex", "all", "EX", "ALL"):
                return self.quantifier()
            if tok.text == "true":
                self.next()
                return mso.TrueConst()
            if tok.text == "false":
                self.next()
                return mso.FalseConst()
            return self.atom()
        raise self.fail(tok, f"expected a formula, found {tok.text or 'end of input'!r}")

    def quantifier(self) -> Formula:
        q = self.next()
        var = self.next()
        if var.kind != "name":
            raise self.fail(var, f"expected a variable after {q.text!r}")
        second_order = q.text in ("EX", "ALL")
        if second_order and _is_fo_name(var.text):
            raise self.fail(var, f"{q.text} binds a set variable; {var.text!r} is first-order (lowercase-initial)")
        if not second_order and not _is_fo_name(var.text):
            raise self.fail(var, f"{q.text} binds a first-order variable; {var.text!r} is a set variable (uppercase-initial)")
        self.expect_op(".")
        body = self.formula()  # maximal right scope
        node = {
            "ex": mso.ExistsFO,
            "all": mso.ForallFO,
            "EX": mso.ExistsSO,
            "ALL": mso.ForallSO,
        }[q.text]
        return node(var.text, body)

    def atom(self) -> Formula:
        tok = self.next()
        if tok.text == "E" and self.peek().text == "(":
            self.next()
            x = self.fo_var("edge atom")
            self.expect_op(",")
            y = self.fo_var("edge atom")
            self.expect_op(")")
            return mso.Edge(x, y)
        if not _is_fo_name(tok.text):
            raise self.fail(tok, f"set variable {tok.text!r} cannot start an atom (did you mean 'x in {tok.text}'?)")
        after = self.next()
        if after.text == "=":
            return mso.Equal(tok.text, self.fo_var("equality atom"))
        if after.text == "in":
            var = self.next()
            if var.kind != "name" or _is_fo_name(var.text):
                raise self.fail(var, "membership atom needs a set variable (uppercase-initial) after 'in'")
            return mso.Membership(tok.text, var.text)
        raise self.fail(after, f"expected '=' or 'in' after {tok.text!r}, found {after.text or 'end of input'!r}")

    def fo_var(self, where: str) -> str:
        tok = self.next()
        if tok.kind != "name" or tok.text in ("ex", "all", "in", "true", "false"):
            raise self.fail(tok, f"expected a first-order variable in {where}")
        if not _is_fo_name(tok.text):
            raise self.fail(tok, f"set variable {tok.text!r} in first-order position in {where}")
        return tok.text


def parse(text: str) -> Formula:
    """Parse concrete syntax into a Formula AST."""
    return _Parser(_tokenize(text)).parse()


def free_variable_report(f: Formula) -> dict[str, list[str]]:
    fo, so = mso.free_variables(f)
    return {"first_order": sorted(fo), "set": sorted(so)}
