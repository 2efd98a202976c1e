"""Polynomial factorization over Q, delegated to sympy.

Only this helper touches sympy; the rest of the library works with the
native sparse representation.  Factors come back content-free, primitive
with positive leading coefficient, in a canonical order.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy

from .poly import GREVLEX, Polynomial, VariableContext


@lru_cache(maxsize=None)
def _symbols(names):
    return tuple(sympy.Symbol(n) for n in names)


def _to_sympy(p: Polynomial):
    syms = _symbols(p.ctx.names)
    rep = {m: sympy.Rational(c.numerator, c.denominator) for m, c in p.terms.items()}
    return sympy.Poly.from_dict(rep, *syms, domain="QQ")


def _from_sympy(spoly, ctx: VariableContext) -> Polynomial:
    terms = {}
    for mono, coeff in spoly.as_dict().items():
        r = sympy.Rational(coeff)
        terms[tuple(int(e) for e in mono)] = Fraction(int(r.p), int(r.q))
    return Polynomial(ctx, terms)


def factor_polynomial(p: Polynomial):
    """Irreducible factorization: list of (factor, multiplicity), content dropped.

    Factors are primitive with positive leading coefficient and sorted
    canonically, so the result is deterministic.
    """
    if p.is_zero or p.is_constant:
        return []
    _, raw = _to_sympy(p).factor_list()
    out = []
    for f, e in raw:
        q = _from_sympy(f, p.ctx).primitive(GREVLEX)
        out.append((q, int(e)))
    out.sort(key=lambda fe: (fe[0].total_degree(), str(fe[0])))
    return out


def is_irreducible(p: Polynomial) -> bool:
    fac = factor_polynomial(p)
    return len(fac) == 1 and fac[0][1] == 1
