"""Formal integer combinations of prime components and their operations.

A cycle is kept in minimal presentation: distinct components, non-zero
multiplicities, canonically sorted.  The only intersection product
implemented is against a hypersurface V(f), computed componentwise as the
cycle of the scheme (prime + <f>); that is the only product the tower
algorithms need.
"""

from __future__ import annotations

import random

from .decompose import PrimeComponent, dimension, local_length, minimal_primes
from .errors import ImproperIntersection
from .groebner import Ideal
from .ideal_ops import intersect_many
from .poly import Polynomial, VariableContext


class Cycle:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: VariableContext, terms=()):
        self.ctx = ctx
        merged = {}
        for mult, comp in terms:
            if mult:
                key = comp.key()
                if key in merged:
                    merged[key] = (merged[key][0] + mult, comp)
                else:
                    merged[key] = (mult, comp)
        cleaned = [(m, c) for m, c in merged.values() if m]
        cleaned.sort(key=lambda t: t[1].key())
        self.terms = tuple(cleaned)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, ())

    @classmethod
    def of_component(cls, comp: PrimeComponent, mult=1):
        return cls(comp.prime.ctx, ((mult, comp),))

    # -- algebra -------------------------------------------------------------
    def __add__(self, other):
        return Cycle(self.ctx, self.terms + other.terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Cycle(self.ctx, tuple((-m, c) for m, c in self.terms))

    def __mul__(self, k: int):
        return Cycle(self.ctx, tuple((m * k, c) for m, c in self.terms))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cycle):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx.names, self.terms))

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self):
        return not self.terms

    def __repr__(self):
        if self.is_zero:
            return "<cycle 0>"
        bits = " + ".join(f"{m}[{'; '.join(c.prime.canonical_key()) or '0'}]"
                          for m, c in self.terms)
        return f"<cycle {bits}>"

    def components(self):
        return [c for _, c in self.terms]

    def multiplicity_of(self, comp: PrimeComponent) -> int:
        for m, c in self.terms:
            if c == comp:
                return m
        return 0

    def dims(self):
        return sorted({c.dim for _, c in self.terms})

    # -- the gap operation and splitting --------------------------------------
    def not_in(self, W: Ideal) -> "Cycle":
        """Drop components contained in V(W): keep [p] iff some gen of W is outside p."""
        kept = []
        for m, c in self.terms:
            if not all(c.prime.contains(g) for g in W.gens):
                kept.append((m, c))
        return Cycle(self.ctx, tuple(kept))

    def split_by_variety(self, Z: Ideal):
        """(inside, outside): components contained in V(Z) versus the rest."""
        inside, outside = [], []
        for m, c in self.terms:
            if all(c.prime.contains(g) for g in Z.gens):
                inside.append((m, c))
            else:
                outside.append((m, c))
        return Cycle(self.ctx, tuple(inside)), Cycle(self.ctx, tuple(outside))

    def intersect_hypersurface(self, f: Polynomial, rng=None) -> "Cycle":
        """Componentwise proper intersection with V(f)."""
        if rng is None:
            rng = random.Random(0)
        total = Cycle.zero(self.ctx)
        for m, c in self.terms:
            if c.prime.contains(f):
                raise ImproperIntersection(
                    f"hypersurface {f} vanishes on a whole component", c)
            total = total + cycle_of_scheme(c.prime.plus([f]), rng) * m
        return total

    # -- predicates and views --------------------------------------------------
    def is_pure(self, i: int) -> bool:
        return all(c.dim == i for _, c in self.terms)

    def support(self) -> Ideal:
        """Intersection of the component primes; <1> for the empty cycle."""
        if self.is_zero:
            return Ideal.unit(self.ctx)
        return intersect_many([c.prime for _, c in self.terms], self.ctx)

    def through_point(self, point) -> "Cycle":
        return Cycle(self.ctx, tuple((m, c) for m, c in self.terms
                                     if c.contains_point(point)))

    def coefficient_at_point(self, point) -> int:
        """Multiplicity of the rational point itself (0-dimensional component)."""
        total = 0
        for m, c in self.terms:
            if c.dim == 0 and c.contains_point(point):
                from .decompose import rational_point
                if rational_point(c.prime) == tuple(point):
                    total += m
        return total

    def meeting(self, W: Ideal) -> "Cycle":
        """Components whose support meets V(W) (over the algebraic closure)."""
        kept = [(m, c) for m, c in self.terms
                if not c.prime.plus(W.gens).is_unit]
        return Cycle(self.ctx, tuple(kept))

    def same_sign(self) -> bool:
        return (all(m > 0 for m, _ in self.terms)
                or all(m < 0 for m, _ in self.terms))


def cycle_of_scheme(I: Ideal, rng=None) -> Cycle:
    """Sum of local_length(I, p) * [p] over the minimal primes p of I."""
    if rng is None:
        rng = random.Random(0)
    comps = minimal_primes(I)
    terms = []
    for c in comps:
        others = [q for q in comps if q is not c]
        terms.append((local_length(I, c, others, rng), c))
    return Cycle(I.ctx, tuple(terms))


def purity_check(C: Cycle, i: int) -> bool:
    return C.is_pure(i)


def support(C: Cycle) -> Ideal:
    return C.support()
