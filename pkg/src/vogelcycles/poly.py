"""Exact sparse multivariate polynomials over the rationals.

Monomials are plain exponent tuples (one slot per ring variable), scalars
are ``fractions.Fraction`` (always reduced, denominator positive), and a
polynomial is a map from monomial to non-zero scalar.  Everything is
immutable after construction and safe to share.

Canonical text form: terms in descending graded-reverse-lex order, the
coefficient written first (``3*x^2*y - 1/2*y + 4``).  Parsing accepts
rationals (``p/q``), variable names, ``+ - * ^`` and parentheses; implicit
multiplication is rejected.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

from .errors import ContextMismatch, ParseError

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class VariableContext:
    """An ordered tuple of distinct variable names fixing the ambient ring."""

    __slots__ = ("names", "index")

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")
        for n in names:
            if not _NAME_RE.fullmatch(n):
                raise ValueError(f"invalid variable name: {n!r}")
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, VariableContext) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VariableContext({', '.join(self.names)})"

    def extended(self, new_names, prepend=False) -> "VariableContext":
        """Fresh context with extra variables appended (or prepended)."""
        if prepend:
            return VariableContext(tuple(new_names) + self.names)
        return VariableContext(self.names + tuple(new_names))

    def fresh_name(self, base: str) -> str:
        if base not in self.index:
            return base
        i = 0
        while f"{base}{i}" in self.index:
            i += 1
        return f"{base}{i}"


# ---------------------------------------------------------------------------
# monomial helpers (exponent tuples)

def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_quotient(m, divisor):
    """Elementwise m / divisor; the divisor must divide m."""
    return tuple(a - b for a, b in zip(m, divisor))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_degree(a):
    return sum(a)


def _grevlex_key(m):
    return (sum(m), tuple(-e for e in reversed(m)))


class MonomialOrder:
    """A global monomial order given by a key function on exponent tuples.

    ``kind`` is one of ``lex``, ``grevlex`` or ``elim`` (block elimination:
    the block variables are compared first, by grevlex, so that any monomial
    touching the block beats every block-free monomial).
    """

    __slots__ = ("kind", "block", "cache_key")

    def __init__(self, kind: str, block=frozenset()):
        self.kind = kind
        self.block = frozenset(block)
        self.cache_key = (kind, tuple(sorted(self.block)))

    def key(self, m):
        if self.kind == "grevlex":
            return _grevlex_key(m)
        if self.kind == "lex":
            return m
        first = tuple(e for i, e in enumerate(m) if i in self.block)
        rest = tuple(e for i, e in enumerate(m) if i not in self.block)
        return (_grevlex_key(first), _grevlex_key(rest))

    def __repr__(self):
        if self.kind == "elim":
            return f"MonomialOrder(elim, block={sorted(self.block)})"
        return f"MonomialOrder({self.kind})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(indices) -> MonomialOrder:
    return MonomialOrder("elim", frozenset(indices))


def block_order(split: int) -> MonomialOrder:
    """Block elimination order whose leading block is the first ``split`` variables."""
    return MonomialOrder("elim", frozenset(range(split)))


class Polynomial:
    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VariableContext, terms: dict):
        self.ctx = ctx
        self.terms = {m: c for m, c in terms.items() if c}
        self._hash = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {})

    @classmethod
    def constant(cls, ctx, value):
        return cls(ctx, {(0,) * ctx.nvars: Fraction(value)})

    @classmethod
    def variable(cls, ctx, name):
        if name not in ctx.index:
            raise KeyError(f"unknown variable {name!r}")
        expo = [0] * ctx.nvars
        expo[ctx.index[name]] = 1
        return cls(ctx, {tuple(expo): Fraction(1)})

    # -- basic predicates ---------------------------------------------------
    @property
    def is_zero(self):
        return not self.terms

    @property
    def is_constant(self):
        return all(mono_degree(m) == 0 for m in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if self.is_zero:
            return -1
        return max(mono_degree(m) for m in self.terms)

    def degree_in(self, idx: int) -> int:
        if self.is_zero:
            return -1
        return max(m[idx] for m in self.terms)

    def variables_used(self):
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(i)
        return used

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if self.ctx != other.ctx:
            raise ContextMismatch(
                f"polynomials over different rings: {self.ctx} vs {other.ctx}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ctx, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, Fraction(0)) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ctx, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Polynomial.zero(self.ctx)
            return Polynomial(self.ctx, {m: v * c for m, v in self.terms.items()})
        self._check(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = out.get(m, Fraction(0)) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Polynomial(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction)):
                return self == Polynomial.constant(self.ctx, other)
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.names, frozenset(self.terms.items())))
        return self._hash

    # -- leading data ---------------------------------------------------------
    def leading_term(self, order: MonomialOrder = GREVLEX):
        """Maximal (monomial, coefficient) pair under ``order``; error on zero."""
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=order.key)
        return m, self.terms[m]

    def sorted_terms(self, order: MonomialOrder = GREVLEX, reverse=True):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=reverse)

    # -- normalization ----------------------------------------------------------
    def primitive(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = 0
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator * (den // c.denominator)))
        scale = Fraction(den, num)
        _, lc = self.leading_term(order)
        if lc < 0:
            scale = -scale
        return self * scale

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        _, lc = self.leading_term(order)
        return self * (1 / lc)

    # -- structural helpers -------------------------------------------------------
    def substitute(self, name: str, replacement: "Polynomial") -> "Polynomial":
        """Substitute ``replacement`` for the variable ``name``."""
        self._check(replacement)
        idx = self.ctx.index[name]
        maxdeg = self.degree_in(idx) if not self.is_zero else 0
        powers = [Polynomial.constant(self.ctx, 1)]
        for _ in range(max(maxdeg, 0)):
            powers.append(powers[-1] * replacement)
        out = Polynomial.zero(self.ctx)
        for m, c in self.terms.items():
            e = m[idx]
            rest = list(m)
            rest[idx] = 0
            base = Polynomial(self.ctx, {tuple(rest): c})
            out = out + base * powers[e]
        return out

    def translate(self, point) -> "Polynomial":
        """Shift coordinates so that ``point`` moves to the origin (x -> x + p)."""
        out = self
        for i, val in enumerate(point):
            val = Fraction(val)
            if val:
                name = self.ctx.names[i]
                repl = Polynomial.variable(self.ctx, name) + Polynomial.constant(self.ctx, val)
                out = out.substitute(name, repl)
        return out

    def embed(self, new_ctx: VariableContext, mapping=None) -> "Polynomial":
        """Reinterpret in a larger ring; ``mapping[i]`` is the new slot of old var ``i``."""
        if mapping is None:
            mapping = [new_ctx.index[n] for n in self.ctx.names]
        out = {}
        for m, c in self.terms.items():
            expo = [0] * new_ctx.nvars
            for i, e in enumerate(m):
                if e:
                    expo[mapping[i]] = e
            out[tuple(expo)] = c
        return Polynomial(new_ctx, out)

    def contract(self, new_ctx: VariableContext) -> "Polynomial":
        """Move to a smaller ring; variables outside ``new_ctx`` must not occur."""
        mapping = {}
        for i, n in enumerate(self.ctx.names):
            mapping[i] = new_ctx.index.get(n)
        out = {}
        for m, c in self.terms.items():
            expo = [0] * new_ctx.nvars
            for i, e in enumerate(m):
                if not e:
                    continue
                if mapping[i] is None:
                    raise ValueError(f"variable {self.ctx.names[i]} does not exist in target ring")
                expo[mapping[i]] = e
            out[tuple(expo)] = c
        return Polynomial(new_ctx, out)

    def eval_at(self, point) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for i, e in enumerate(m):
                if e:
                    v *= Fraction(point[i]) ** e
            total += v
        return total

    def coefficient_of(self, name: str, power: int) -> "Polynomial":
        """Coefficient of ``name**power`` as a polynomial in the other variables."""
        idx = self.ctx.index[name]
        out = {}
        for m, c in self.terms.items():
            if m[idx] == power:
                rest = list(m)
                rest[idx] = 0
                out[tuple(rest)] = c
        return Polynomial(self.ctx, out)

    # -- printing -------------------------------------------------------------
    def _format_monomial(self, m) -> str:
        parts = []
        for name, e in zip(self.ctx.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def __str__(self):
        if self.is_zero:
            return "0"
        chunks = []
        for m, c in self.sorted_terms():
            mono = self._format_monomial(m)
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            chunks.append(("-" if c < 0 else "+", body))
        sign, body = chunks[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in chunks[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"<poly {self}>"


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()/]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == m.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup is None and not m.group().strip():
            pos = m.end()
            continue
        kind = m.lastgroup
        if kind is not None:
            tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: VariableContext):
        self.text = text
        self.ctx = ctx
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val, at = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", at)

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, val, at = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected token {val!r}", at)
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> Polynomial:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return -self.term()
        p = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.next()
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, val, at = self.next()
            if kind != "int":
                raise ParseError("exponent must be a non-negative integer", at)
            return base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val, at = self.next()
        if kind == "int":
            num = int(val)
            kind2, val2, _ = self.peek()
            if kind2 == "op" and val2 == "/":
                self.next()
                kind3, val3, at3 = self.next()
                if kind3 != "int":
                    raise ParseError("denominator must be an integer", at3)
                den = int(val3)
                if den == 0:
                    raise ParseError("zero denominator", at3)
                return Polynomial.constant(self.ctx, Fraction(num, den))
            return Polynomial.constant(self.ctx, num)
        if kind == "name":
            if val not in self.ctx.index:
                raise ParseError(f"unknown variable {val!r}", at)
            return Polynomial.variable(self.ctx, val)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", at)


def parse_polynomial(text: str, ctx: VariableContext) -> Polynomial:
    """Parse the canonical polynomial grammar over ``ctx``."""
    return _Parser(text, ctx).parse()
