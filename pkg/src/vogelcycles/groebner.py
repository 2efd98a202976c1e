"""Buchberger engine: normal forms, reduced Groebner bases, elimination.

Deterministic throughout: sugar-based pair selection with canonical
tie-breaks, both Buchberger criteria, and primitive/positive-leading
normalization after every reduction.  The reduced basis for a fixed order
is unique, which makes it usable as a canonical ideal key.
"""

from __future__ import annotations

from .errors import ContextMismatch
from .poly import (GREVLEX, MonomialOrder, Polynomial, VariableContext,
                   elimination_order, mono_degree, mono_divides, mono_lcm,
                   mono_mul, mono_quotient)


def normal_form(p: Polynomial, basis, order: MonomialOrder = GREVLEX) -> Polynomial:
    """Remainder of full division of ``p`` by ``basis`` (tails reduced too)."""
    if p.is_zero or not basis:
        return p
    key = order.key
    divisors = [(g.leading_term(order)[0], g.leading_term(order)[1], g.terms) for g in basis]
    work = dict(p.terms)
    remainder = {}
    while work:
        m = max(work, key=key)
        c = work[m]
        hit = None
        for lm, lc, terms in divisors:
            if mono_divides(lm, m):
                hit = (lm, lc, terms)
                break
        if hit is None:
            del work[m]
            remainder[m] = c
            continue
        lm, lc, terms = hit
        shift = mono_quotient(m, lm)
        factor = c / lc
        for tm, tc in terms.items():
            mm = mono_mul(tm, shift)
            v = work.get(mm, 0) - factor * tc
            if v:
                work[mm] = v
            else:
                work.pop(mm, None)
    return Polynomial(p.ctx, remainder)


def _spoly(f: Polynomial, g: Polynomial, order: MonomialOrder) -> Polynomial:
    fm, fc = f.leading_term(order)
    gm, gc = g.leading_term(order)
    l = mono_lcm(fm, gm)
    a = Polynomial(f.ctx, {mono_quotient(l, fm): 1 / fc})
    b = Polynomial(g.ctx, {mono_quotient(l, gm): 1 / gc})
    return a * f - b * g


def buchberger(gens, order: MonomialOrder = GREVLEX):
    """Reduced Groebner basis of ``gens`` as a sorted tuple (empty for <0>)."""
    G = []
    for g in gens:
        if not g.is_zero:
            G.append(g.primitive(order))
    if not G:
        return ()
    ctx = G[0].ctx
    one = Polynomial.constant(ctx, 1)
    for g in G:
        if g.is_constant:
            return (one,)

    lts = [g.leading_term(order)[0] for g in G]
    sugars = [g.total_degree() for g in G]
    pairs = {}

    def add_pairs(t):
        for i in range(t):
            l = mono_lcm(lts[i], lts[t])
            sug = max(sugars[i] + mono_degree(mono_quotient(l, lts[i])),
                      sugars[t] + mono_degree(mono_quotient(l, lts[t])))
            pairs[(i, t)] = (sug, mono_degree(l), order.key(l), l)

    for t in range(len(G)):
        add_pairs(t)

    while pairs:
        (i, j) = min(pairs, key=lambda ij: (pairs[ij][0], pairs[ij][1], pairs[ij][2], ij[1], ij[0]))
        sug, _, _, l = pairs.pop((i, j))
        # first criterion: coprime leading monomials
        if l == mono_mul(lts[i], lts[j]):
            continue
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j):
                continue
            if mono_divides(lts[k], l):
                a = (min(i, k), max(i, k))
                b = (min(j, k), max(j, k))
                if a not in pairs and b not in pairs:
                    skip = True
                    break
        if skip:
            continue
        r = normal_form(_spoly(G[i], G[j], order), G, order)
        if r.is_zero:
            continue
        if r.is_constant:
            return (one,)
        r = r.primitive(order)
        G.append(r)
        lts.append(r.leading_term(order)[0])
        sugars.append(max(sug, r.total_degree()))
        add_pairs(len(G) - 1)

    # minimalize: keep only elements with minimal leading monomials
    idx = sorted(range(len(G)), key=lambda i: order.key(lts[i]))
    kept = []
    kept_lts = []
    for i in idx:
        if any(mono_divides(lm, lts[i]) for lm in kept_lts):
            continue
        kept.append(G[i])
        kept_lts.append(lts[i])
    # tail-reduce each element against the others
    reduced = []
    for i, g in enumerate(kept):
        others = kept[:i] + kept[i + 1:]
        r = normal_form(g, others, order) if others else g
        reduced.append(r.primitive(order))
    reduced.sort(key=lambda g: order.key(g.leading_term(order)[0]), reverse=True)
    return tuple(reduced)


class Ideal:
    """A polynomial ideal with cached reduced Groebner bases per order.

    Equality and the canonical key go through the reduced grevlex basis,
    which is unique, so two presentations of the same ideal compare equal.
    """

    __slots__ = ("ctx", "gens", "_gb")

    def __init__(self, ctx: VariableContext, gens):
        self.ctx = ctx
        cleaned = []
        for g in gens:
            if g.ctx != ctx:
                raise ContextMismatch("generator over a different ring")
            if not g.is_zero:
                cleaned.append(g)
        self.gens = tuple(cleaned)
        self._gb = {}

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, ())

    @classmethod
    def unit(cls, ctx):
        return cls(ctx, (Polynomial.constant(ctx, 1),))

    def groebner(self, order: MonomialOrder = GREVLEX):
        cached = self._gb.get(order.cache_key)
        if cached is None:
            cached = buchberger(self.gens, order)
            self._gb[order.cache_key] = cached
        return cached

    @property
    def is_zero_ideal(self) -> bool:
        return not self.gens

    @property
    def is_unit(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb[0].is_constant

    def normal_form(self, p: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
        return normal_form(p, list(self.groebner(order)), order)

    def contains(self, p: Polynomial) -> bool:
        return self.normal_form(p).is_zero

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.gens)

    def plus(self, polys) -> "Ideal":
        return Ideal(self.ctx, self.gens + tuple(p for p in polys if not p.is_zero))

    def plus_ideal(self, other: "Ideal") -> "Ideal":
        return self.plus(other.gens)

    def canonical_key(self):
        return tuple(str(g) for g in self.groebner())

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        return self.groebner() == other.groebner()

    def __hash__(self):
        return hash((self.ctx.names, self.groebner()))

    def __repr__(self):
        inner = ", ".join(str(g) for g in self.gens) or "0"
        return f"<ideal ({inner})>"

    def embed(self, new_ctx: VariableContext, mapping=None) -> "Ideal":
        return Ideal(new_ctx, tuple(g.embed(new_ctx, mapping) for g in self.gens))

    def contract(self, new_ctx: VariableContext) -> "Ideal":
        return Ideal(new_ctx, tuple(g.contract(new_ctx) for g in self.gens))


def eliminate(I: Ideal, keep_names) -> Ideal:
    """Intersection of ``I`` with the subring in the kept variables."""
    keep = set(keep_names)
    block = frozenset(i for i, n in enumerate(I.ctx.names) if n not in keep)
    if not block:
        return Ideal(I.ctx, I.groebner())
    gb = I.groebner(elimination_order(block))
    kept = [g for g in gb if all(i not in block for i in g.variables_used())]
    return Ideal(I.ctx, tuple(kept))
