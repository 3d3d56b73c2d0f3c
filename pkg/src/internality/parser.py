"""Reader for system files.

    vars x y
    x' = x + x*y
    y' = y + x*y

Expressions use + - * / ^ (integer exponents), parentheses, integer or decimal
literals and the declared variable names. Lines starting with # are comments;
an optional line "mode NAME" records a dispatch hint.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .algebra import RationalFunction
from .vectorfield import VectorField

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__("line %d, column %d: %s" % (line, col, message) if line else message)
        self.message = message
        self.line = line
        self.col = col


@dataclass
class SystemFile:
    vars: List[str]
    equations: List[RationalFunction]
    mode: Optional[str] = None

    def field(self) -> VectorField:
        return VectorField(self.equations, self.vars)


class _Expr:
    def __init__(self, text: str, names: List[str], line: int, offset: int):
        self.names = names
        self.line = line
        self.toks: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                break
            col = m.start(m.lastindex) + offset + 1
            if m.group(1):
                self.toks.append(("num", m.group(1), col))
            elif m.group(2):
                self.toks.append(("name", m.group(2), col))
            else:
                self.toks.append(("op", m.group(3), col))
            pos = m.end()
        self.end_col = offset + len(text) + 1
        self.i = 0

    def _err(self, msg, col=None):
        raise ParseError(msg, self.line, col if col is not None else self._col())

    def _col(self):
        return self.toks[self.i][2] if self.i < len(self.toks) else self.end_col

    def _peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end_col)

    def _take(self):
        t = self._peek()
        self.i += 1
        return t

    def parse(self) -> RationalFunction:
        if not self.toks:
            self._err("empty expression")
        r = self.expr()
        if self.i < len(self.toks):
            self._err("unexpected %r" % self.toks[self.i][1])
        return r

    def expr(self):
        r = self.term()
        while self._peek()[1] in ("+", "-"):
            op = self._take()[1]
            t = self.term()
            r = r + t if op == "+" else r - t
        return r

    def term(self):
        r = self.unary()
        while self._peek()[1] in ("*", "/"):
            op = self._take()[1]
            col = self._col()
            t = self.unary()
            if op == "*":
                r = r * t
            else:
                if not t:
                    self._err("division by zero", col)
                r = r / t
        return r

    def unary(self):
        if self._peek()[1] in ("-", "+"):
            op = self._take()[1]
            r = self.unary()
            return -r if op == "-" else r
        return self.power()

    def power(self):
        base = self.atom()
        if self._peek()[1] == "^":
            self._take()
            sign = 1
            if self._peek()[1] in ("-", "+"):
                sign = -1 if self._take()[1] == "-" else 1
            kind, val, col = self._take()
            if kind != "num" or "." in val:
                self._err("exponent must be an integer", col)
            n = sign * int(val)
            if n < 0 and not base:
                self._err("zero raised to a negative power", col)
            return base ** n
        return base

    def atom(self):
        kind, val, col = self._take()
        k = len(self.names)
        if kind == "num":
            return RationalFunction.const(k, Fraction(val))
        if kind == "name":
            if val not in self.names:
                self._err("undeclared variable %r" % val, col)
            return RationalFunction.var(k, self.names.index(val))
        if val == "(":
            r = self.expr()
            if self._peek()[1] != ")":
                self._err("expected ')'")
            self._take()
            return r
        self._err("unexpected %s" % ("end of expression" if val is None else repr(val)), col)


def parse_expression(text: str, names: List[str], line: int = 1, offset: int = 0) -> RationalFunction:
    return _Expr(text, names, line, offset).parse()


def parse_system_file(text: str) -> SystemFile:
    names: Optional[List[str]] = None
    eqs = {}
    mode = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("vars ") or stripped == "vars":
            if names is not None:
                raise ParseError("duplicate vars line", ln, indent + 1)
            names = stripped.split()[1:]
            if not names:
                raise ParseError("no variables declared", ln, indent + 1)
            for n in names:
                if not _NAME.match(n):
                    raise ParseError("bad variable name %r" % n, ln, line.index(n) + 1)
            if len(set(names)) != len(names):
                raise ParseError("variable declared twice", ln, indent + 1)
            continue
        if stripped.startswith("mode "):
            mode = stripped.split(None, 1)[1].strip()
            continue
        if names is None:
            raise ParseError("equation before the vars line", ln, indent + 1)
        m = re.match(r"\s*([A-Za-z_][A-Za-z_0-9]*)\s*'\s*=", line)
        if not m:
            raise ParseError("expected \"name' = expression\"", ln, indent + 1)
        v = m.group(1)
        if v not in names:
            raise ParseError("undeclared variable %r" % v, ln, m.start(1) + 1)
        if v in eqs:
            raise ParseError("second equation for %r" % v, ln, m.start(1) + 1)
        eqs[v] = parse_expression(line[m.end():], names, ln, m.end())
    if names is None:
        raise ParseError("missing vars line", 1, 1)
    missing = [n for n in names if n not in eqs]
    if missing:
        raise ParseError("no equation for %s" % ", ".join(missing))
    return SystemFile(names, [eqs[n] for n in names], mode)


def parse_system(text: str) -> VectorField:
    return parse_system_file(text).field()


def format_system(X: VectorField) -> dict:
    return {"vars": list(X.names),
            "equations": ["%s' = %s" % (n, f.to_str(X.names)) for n, f in zip(X.names, X.f)]}


def system_text(X: VectorField) -> str:
    d = format_system(X)
    return "vars %s\n%s\n" % (" ".join(d["vars"]), "\n".join(d["equations"]))
