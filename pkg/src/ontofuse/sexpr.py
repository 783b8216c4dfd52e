"""Small s-expression reader with source positions.

Atoms are bare tokens (no quoting); lists are parenthesized.  Every node
carries a span so downstream validation can point back at the input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

ATOM_FORBIDDEN = frozenset("()#; \t\r\n")


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class SAtom:
    value: str
    span: Span


@dataclass(frozen=True)
class SList:
    items: tuple
    span: Span


def tokenize(text: str, file: str = "<string>") -> list:
    """Tokens are '(' , ')' and atoms, each paired with a span.
    Semicolons start comments running to end of line."""
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append((ch, Span(file, line, col, line, col + 1)))
            col += 1
            i += 1
        else:
            j = i
            while j < n and text[j] not in ATOM_FORBIDDEN:
                j += 1
            atom = text[i:j]
            tokens.append((atom, Span(file, line, col, line, col + (j - i))))
            col += j - i
            i = j
    return tokens


def parse(text: str, file: str = "<string>"):
    """Parse exactly one s-expression; trailing garbage is an error."""
    forms, rest = _parse_many(tokenize(text, file), 0, file)
    if not forms:
        raise ParseError("empty input, expected an s-expression", Span(file, 1, 1, 1, 1))
    if len(forms) > 1 or rest != -1:
        raise ParseError("trailing input after s-expression", _span_of(forms[-1]))
    return forms[0]


def parse_all(text: str, file: str = "<string>") -> tuple:
    """Parse a sequence of s-expressions."""
    forms, _ = _parse_many(tokenize(text, file), 0, file)
    return tuple(forms)


def _span_of(node) -> Span:
    return node.span


def _parse_many(tokens, i: int, file: str):
    forms = []
    while i < len(tokens):
        tok, span = tokens[i]
        if tok == ")":
            raise ParseError("unbalanced ')'", span)
        node, i = _parse_one(tokens, i, file)
        forms.append(node)
    return forms, -1


def _parse_one(tokens, i: int, file: str):
    tok, span = tokens[i]
    if tok == "(":
        items = []
        j = i + 1
        while True:
            if j >= len(tokens):
                raise ParseError("unbalanced '(': missing ')'", span)
            t, s = tokens[j]
            if t == ")":
                full = Span(span.file, span.line, span.col, s.end_line, s.end_col)
                return SList(tuple(items), full), j + 1
            node, j = _parse_one(tokens, j, file)
            items.append(node)
    if tok == ")":
        raise ParseError("unbalanced ')'", span)
    return SAtom(tok, span), i + 1
