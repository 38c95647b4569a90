"""Text grammar for factors, pointed irregular types and irregular classes.

    factor :=  term ("+" term)* with ordinary "-", "*", "/", "^", parentheses
    term   :=  [coef "*"] "x" ["^" "(" rat ")" | "^" int]  |  coef
    coef   :=  rational | "i" | "E(" int ")" and products/sums/powers thereof
    type   :=  "[(" mult "," factor ")" ("," "(" mult "," factor ")")* "]"
    class  :=  [mult ["*"]] "<" factor ">" ("+" [mult ["*"]] "<" factor ">")*

Whitespace is insignificant.  Parsing evaluates the expression exactly in the
ring of Puiseux polynomials over Q^ab; a nonzero constant term or a
non-positive exponent is rejected (NonPositiveExponent), so round-trips are
exact: render(parse(t)) parses back to an equal value.
"""

from __future__ import annotations

from fractions import Fraction

from .cyclo import CycNum, render_scalar
from .errors import NonPositiveExponent, ParseError
from .factor import ExpFactor, IrregularClass, PointedIrregularType

# A generalized factor during evaluation: exponent (possibly 0/negative) -> CycNum.
_GenTerms = dict


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str | None = None) -> str:
        ch = self.peek()
        if expected is not None and ch != expected:
            raise ParseError(f"expected {expected!r}, found {ch or 'end of input'!r}", self.pos)
        self.pos += 1
        return ch

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise ParseError("expected an integer", start)
        return int(self.text[start:self.pos])

    def rational(self) -> Fraction:
        num = self.integer()
        if self.peek() == "/":
            self.take()
            den = self.integer()
            if den == 0:
                raise ParseError("zero denominator", self.pos)
            return Fraction(num, den)
        return Fraction(num)

    def done(self):
        self.skip_ws()
        if self.pos < len(self.text):
            raise ParseError(f"unexpected {self.text[self.pos]!r}", self.pos)


def _gen_add(a: _GenTerms, b: _GenTerms) -> _GenTerms:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, CycNum(0)) + c
    return {e: c for e, c in out.items() if not c.is_zero}


def _gen_mul(a: _GenTerms, b: _GenTerms) -> _GenTerms:
    out: _GenTerms = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            prod = c1 * c2
            out[e] = out.get(e, CycNum(0)) + prod
    return {e: c for e, c in out.items() if not c.is_zero}


def _gen_scalar(terms: _GenTerms, sc: _Scanner, pos: int) -> CycNum:
    if not terms:
        return CycNum(0)
    if set(terms) != {Fraction(0)}:
        raise ParseError("a polynomial in x is not allowed here", pos)
    return terms[Fraction(0)]


class _Parser:
    """Recursive descent over +, -, *, /, ^ with the usual precedences."""

    def __init__(self, sc: _Scanner):
        self.sc = sc

    def expression(self) -> _GenTerms:
        sign = 1
        ch = self.sc.peek()
        if ch and ch in "+-":
            self.sc.take()
            sign = -1 if ch == "-" else 1
        acc = self.product()
        if sign < 0:
            acc = _gen_mul({Fraction(0): CycNum(-1)}, acc)
        while self.sc.peek() and self.sc.peek() in "+-":
            op = self.sc.take()
            rhs = self.product()
            if op == "-":
                rhs = _gen_mul({Fraction(0): CycNum(-1)}, rhs)
            acc = _gen_add(acc, rhs)
        return acc

    def product(self) -> _GenTerms:
        acc = self.power()
        while self.sc.peek() and self.sc.peek() in "*/":
            op = self.sc.take()
            pos = self.sc.pos
            rhs = self.power()
            if op == "*":
                acc = _gen_mul(acc, rhs)
            else:
                divisor = _gen_scalar(rhs, self.sc, pos)
                if divisor.is_zero:
                    raise ParseError("division by zero", pos)
                acc = _gen_mul(acc, {Fraction(0): divisor.inverse()})
        return acc

    def power(self) -> _GenTerms:
        base = self.atom()
        if self.sc.peek() != "^":
            return base
        self.sc.take()
        pos = self.sc.pos
        if self.sc.peek() == "(":
            self.sc.take("(")
            expo = self.sc.rational()
            self.sc.take(")")
        else:
            expo = Fraction(self.sc.integer())
        if expo.denominator == 1:
            k = int(expo)
            if k >= 0:
                out = {Fraction(0): CycNum(1)}
                for _ in range(k):
                    out = _gen_mul(out, base)
                return out
            scalar = _gen_scalar(base, self.sc, pos)
            if scalar.is_zero:
                raise ParseError("division by zero", pos)
            return {Fraction(0): scalar ** k}
        # Fractional exponent: only legal directly on x, handled in atom();
        # anything else (e.g. (x+1)^(1/2)) is out of the grammar.
        raise ParseError("fractional powers are only allowed on x", pos)

    def atom(self) -> _GenTerms:
        ch = self.sc.peek()
        pos = self.sc.pos
        if ch == "(":
            self.sc.take("(")
            inner = self.expression()
            self.sc.take(")")
            return inner
        if ch == "x":
            self.sc.take()
            if self.sc.peek() == "^":
                self.sc.take()
                if self.sc.peek() == "(":
                    self.sc.take("(")
                    expo = self.sc.rational()
                    self.sc.take(")")
                else:
                    expo = Fraction(self.sc.integer())
                return {expo: CycNum(1)}
            return {Fraction(1): CycNum(1)}
        if ch == "i":
            self.sc.take()
            return {Fraction(0): CycNum.zeta(4)}
        if ch == "E":
            self.sc.take()
            self.sc.take("(")
            n = self.sc.integer()
            self.sc.take(")")
            if n < 1:
                raise ParseError("E(n) needs n >= 1", pos)
            return {Fraction(0): CycNum.zeta(n)}
        if ch.isdigit():
            return {Fraction(0): CycNum(self.sc.rational())}
        if ch and ch in "+-":
            self.sc.take()
            inner = self.atom()
            return inner if ch == "+" else _gen_mul({Fraction(0): CycNum(-1)}, inner)
        raise ParseError(f"unexpected {ch or 'end of input'!r}", pos)


def _finish_factor(terms: _GenTerms) -> ExpFactor:
    nonzero = {e: c for e, c in terms.items() if not c.is_zero}
    for e in nonzero:
        if e <= 0:
            raise NonPositiveExponent(f"term of exponent {e} is not allowed in a factor")
    return ExpFactor(nonzero.items())


def parse_factor(text: str) -> ExpFactor:
    sc = _Scanner(text)
    parser = _Parser(sc)
    terms = parser.expression()
    sc.done()
    return _finish_factor(terms)


def parse_scalar(text: str) -> CycNum:
    sc = _Scanner(text)
    parser = _Parser(sc)
    terms = parser.expression()
    sc.done()
    return _gen_scalar(terms, sc, 0)


def parse_type(text: str) -> PointedIrregularType:
    sc = _Scanner(text)
    sc.take("[")
    entries = []
    while True:
        sc.take("(")
        mult = sc.integer()
        sc.take(",")
        parser = _Parser(sc)
        depth_terms = parser.expression()
        entries.append((mult, _finish_factor(depth_terms)))
        sc.take(")")
        if sc.peek() == ",":
            sc.take()
            continue
        break
    sc.take("]")
    sc.done()
    return PointedIrregularType(entries)


def parse_class(text: str) -> IrregularClass:
    sc = _Scanner(text)
    orbits = []
    while True:
        mult = 1
        if sc.peek().isdigit():
            mult = sc.integer()
            if sc.peek() == "*":
                sc.take()
        sc.take("<")
        parser = _Parser(sc)
        terms = parser.expression()
        orbits.append((mult, _finish_factor(terms)))
        sc.take(">")
        if sc.peek() == "+":
            sc.take()
            continue
        break
    sc.done()
    return IrregularClass(orbits)


def parse_input(text: str):
    """Dispatch on the leading character: type, class or bare factor."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        return parse_type(text)
    if stripped.startswith("<") or (stripped and stripped[0].isdigit() and "<" in stripped):
        return parse_class(text)
    return parse_factor(text)


# -- rendering ---------------------------------------------------------------


def _render_exponent(e: Fraction) -> str:
    if e == 1:
        return "x"
    return f"x^({e})"


def render_factor(q: ExpFactor) -> str:
    if q.is_zero:
        return "0"
    one = CycNum(1)
    parts = []
    for e, c in q.terms:
        if c == one:
            parts.append(_render_exponent(e))
        elif c == -one:
            parts.append("-" + _render_exponent(e))
        else:
            parts.append(f"{render_scalar(c, product_context=True)}*{_render_exponent(e)}")
    text = parts[0]
    for p in parts[1:]:
        text += p if p.startswith("-") else "+" + p
    return text


def render_type(Q: PointedIrregularType) -> str:
    inner = ", ".join(f"({n}, {render_factor(q)})" for n, q in Q.entries)
    return f"[{inner}]"


def render_class(theta: IrregularClass) -> str:
    parts = []
    for n, q in theta.orbits:
        prefix = "" if n == 1 else f"{n}*"
        parts.append(f"{prefix}<{render_factor(q)}>")
    return " + ".join(parts)
