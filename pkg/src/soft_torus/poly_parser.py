"""Parser for *-polynomial text.

Grammar (whitespace ignored)::

    poly   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ["'"] | '(' poly ')' ["'"] | coeff
    atom   := 'u' | 'v' | 'u_' ['-'] digits | '1'
    coeff  := real | '(' real ('+'|'-') real 'i' ')'

A postfix apostrophe is the adjoint; '*' is always multiplication. The letter
u is read as u_0.
"""

import re

from soft_torus.config import MAX_NESTING
from soft_torus.errors import PolySyntaxError
from soft_torus.ncpoly import NCPoly

_REAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
REAL_RE = re.compile(_REAL)
COMPLEX_RE = re.compile(rf"\(\s*([+-]?{_REAL})\s*([+-])\s*({_REAL})\s*i\s*\)")
INDEX_RE = re.compile(r"_(-?\d+)")


def parse(text: str) -> NCPoly:
    """Parse polynomial text into an NCPoly.

    Only identical words are merged; nothing else is simplified.

    Raises:
        PolySyntaxError: With the offending position.
        IndexOverflow: If an index exceeds the cap.
    """
    if not isinstance(text, str):
        raise PolySyntaxError("polynomial text must be a string", 0)
    return _Parser(text).parse()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.depth = 0

    def parse(self) -> NCPoly:
        result = self._poly()
        if self._peek() is not None:
            self._fail(f"unexpected character {self._peek()!r}")
        return result

    # --- Helpers ---

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str | None:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def _fail(self, message: str):
        raise PolySyntaxError(message, self.pos)

    def _expect(self, char: str) -> None:
        if self._peek() != char:
            self._fail(f"expected {char!r}")
        self.pos += 1

    def _maybe_adjoint(self, p: NCPoly) -> NCPoly:
        if self._peek() == "'":
            self.pos += 1
            return p.adjoint()
        return p

    # --- Grammar rules ---

    def _poly(self) -> NCPoly:
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        result = sign * self._term()
        while self._peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            term = self._term()
            result = result + term if op == "+" else result - term
        return result

    def _term(self) -> NCPoly:
        result = self._factor()
        while self._peek() == "*":
            self.pos += 1
            result = result * self._factor()
        return result

    def _factor(self) -> NCPoly:
        char = self._peek()
        if char is None:
            self._fail("unexpected end of input, expected a factor")
        if char == "(":
            match = COMPLEX_RE.match(self.text, self.pos)
            if match:
                self.pos = match.end()
                real, sign, imag = match.groups()
                value = complex(float(real), float(imag) * (-1 if sign == "-" else 1))
                return NCPoly.scalar(value)
            if self.depth >= MAX_NESTING:
                self._fail(f"parentheses nested deeper than {MAX_NESTING}")
            self.pos += 1
            self.depth += 1
            inner = self._poly()
            self._expect(")")
            self.depth -= 1
            return self._maybe_adjoint(inner)
        if char in ("u", "v"):
            return self._maybe_adjoint(self._atom(char))
        match = REAL_RE.match(self.text, self.pos)
        if match:
            self.pos = match.end()
            return self._maybe_adjoint(NCPoly.scalar(float(match.group())))
        self._fail(f"expected a factor, found {char!r}")

    def _atom(self, symbol: str) -> NCPoly:
        self.pos += 1
        index = 0
        if symbol == "u":
            match = INDEX_RE.match(self.text, self.pos)
            if match:
                self.pos = match.end()
                index = int(match.group(1))
            elif self.pos < len(self.text) and self.text[self.pos] == "_":
                self._fail("expected an index after 'u_'")
        if self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self._fail(f"unknown identifier starting with {symbol!r}")
        return NCPoly.generator(symbol, index)
