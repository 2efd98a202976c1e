"""Ideal-level constructions: intersection, quotient, saturation (gap
sheaves), radical membership, and variety equality.

The gap sheaf of a scheme with respect to a closed set is realized
globally as ideal saturation: ``I : J^inf`` removes exactly the primary
components supported inside V(J).
"""

from __future__ import annotations

from .groebner import Ideal, eliminate
from .poly import Polynomial, VariableContext, mono_divides, mono_quotient, mono_mul


def _extend_with_fresh(ctx: VariableContext, base="t"):
    name = ctx.fresh_name(base)
    new_ctx = ctx.extended([name])
    return new_ctx, name


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """Ideal intersection via the t-trick: eliminate t from t*I + (1-t)*J."""
    if I.is_zero_ideal or J.is_unit:
        return Ideal(I.ctx, I.gens)
    if J.is_zero_ideal or I.is_unit:
        return Ideal(J.ctx, J.gens)
    ctx = I.ctx
    ext, tname = _extend_with_fresh(ctx)
    t = Polynomial.variable(ext, tname)
    one_minus_t = Polynomial.constant(ext, 1) - t
    gens = [t * g.embed(ext) for g in I.gens]
    gens += [one_minus_t * g.embed(ext) for g in J.gens]
    elim = eliminate(Ideal(ext, gens), ctx.names)
    return elim.contract(ctx)


def intersect_many(ideals, ctx: VariableContext) -> Ideal:
    out = Ideal.unit(ctx)
    for J in ideals:
        out = intersect(out, J)
    return out


def _divide_exact(p: Polynomial, g: Polynomial) -> Polynomial:
    """Exact quotient p/g (p must be a multiple of g)."""
    if p.is_zero:
        return p
    gm, gc = g.leading_term()
    work = dict(p.terms)
    out = {}
    while work:
        m = max(work, key=lambda mm: (sum(mm), tuple(-e for e in reversed(mm))))
        c = work[m]
        if not mono_divides(gm, m):
            raise ValueError("inexact division")
        q = mono_quotient(m, gm)
        factor = c / gc
        out[q] = factor
        for tm, tc in g.terms.items():
            mm = mono_mul(tm, q)
            v = work.get(mm, 0) - factor * tc
            if v:
                work[mm] = v
            else:
                work.pop(mm, None)
    return Polynomial(p.ctx, out)


def _quotient_single(I: Ideal, g: Polynomial) -> Ideal:
    if g.is_zero:
        return Ideal.unit(I.ctx)
    if g.is_constant:
        return Ideal(I.ctx, I.gens)
    common = intersect(I, Ideal(I.ctx, (g,)))
    return Ideal(I.ctx, tuple(_divide_exact(p, g) for p in common.groebner()))


def quotient(I: Ideal, J: Ideal) -> Ideal:
    """Ideal quotient I : J."""
    if J.is_zero_ideal:
        return Ideal.unit(I.ctx)
    out = None
    for g in J.gens:
        q = _quotient_single(I, g)
        out = q if out is None else intersect(out, q)
    return out


def _saturate_single(I: Ideal, g: Polynomial) -> Ideal:
    if g.is_zero:
        return Ideal.unit(I.ctx)
    if g.is_constant or I.is_unit:
        return Ideal(I.ctx, I.gens)
    ctx = I.ctx
    ext, tname = _extend_with_fresh(ctx)
    t = Polynomial.variable(ext, tname)
    gens = [p.embed(ext) for p in I.gens]
    gens.append(Polynomial.constant(ext, 1) - t * g.embed(ext))
    elim = eliminate(Ideal(ext, gens), ctx.names)
    return elim.contract(ctx)


def saturate(I: Ideal, J: Ideal) -> Ideal:
    """Stable quotient I : J^inf, computed per generator and intersected."""
    if J.is_zero_ideal:
        return Ideal.unit(I.ctx)
    out = None
    for g in J.gens:
        s = _saturate_single(I, g)
        out = s if out is None else intersect(out, s)
    return out


def gap_sheaf(I: Ideal, W: Ideal) -> Ideal:
    """Remove from V(I) every primary component contained in V(W)."""
    return saturate(I, W)


def radical_member(p: Polynomial, I: Ideal) -> bool:
    """Rabinowitsch trick: p lies in the radical iff 1 in I + <1 - t*p>."""
    if p.is_zero:
        return True
    if I.is_unit:
        return True
    ctx = I.ctx
    ext, tname = _extend_with_fresh(ctx)
    t = Polynomial.variable(ext, tname)
    gens = [g.embed(ext) for g in I.gens]
    gens.append(Polynomial.constant(ext, 1) - t * p.embed(ext))
    return Ideal(ext, gens).is_unit


def same_variety(I: Ideal, J: Ideal) -> bool:
    """True iff the radicals agree (generator-wise radical membership)."""
    return (all(radical_member(g, J) for g in I.gens)
            and all(radical_member(g, I) for g in J.gens))
