"""Dimension, minimal primes, and local multiplicities.

This is the bridge from ideals to cycles.  Strategy, at desk scale:

* dimension: maximal independent variable set modulo the leading-term
  ideal (grevlex);
* minimal primes: recursive splitting on factorable generators, then leaf
  certification -- zero-dimensional leaves via univariate minimal
  polynomials (radicalization + splitting) and a primitive element;
  positive-dimensional leaves by substituting away variables that occur
  linearly with a constant coefficient, accepting only a zero or principal
  irreducible image.  Anything beyond raises DecompositionIncomplete
  rather than guessing.
* local multiplicity: m-adic stabilization at rational points (dimension
  of the quotient truncated at increasing orders, stopping at two equal
  consecutive values); degree-divided vector space dimension at
  non-rational isolated points; random affine slicing with a second-slice
  consistency check in positive dimension.

Components are reported over Q; an absolutely reducible component such as
V(u^2+v^2) stays one Q-component.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .errors import (DecompositionIncomplete, NotZeroDimensional, SliceFailure,
                     VogelError)
from .factor import factor_polynomial
from .groebner import Ideal, normal_form
from .ideal_ops import saturate
from .poly import GREVLEX, Polynomial, VariableContext, mono_divides

SLICE_COEFF_BOUND = 1000
_QUOTIENT_CAP = 200_000


class PrimeComponent:
    """A certified prime ideal together with the dimension of its variety."""

    __slots__ = ("prime", "dim", "_key")

    def __init__(self, prime: Ideal, dim: int):
        self.prime = prime
        self.dim = dim
        self._key = None

    def key(self):
        if self._key is None:
            self._key = (-self.dim, self.prime.canonical_key())
        return self._key

    def __eq__(self, other):
        return isinstance(other, PrimeComponent) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"<component dim={self.dim} {self.prime!r}>"

    def contains_point(self, point) -> bool:
        return all(g.eval_at(point) == 0 for g in self.prime.gens)


def whole_space(ctx: VariableContext) -> PrimeComponent:
    return PrimeComponent(Ideal.zero(ctx), ctx.nvars)


# ---------------------------------------------------------------------------
# dimension and quotient dimension

def dimension(I: Ideal):
    """Krull dimension of V(I); None when the ideal is the whole ring."""
    gb = I.groebner(GREVLEX)
    if len(gb) == 1 and gb[0].is_constant:
        return None
    n = I.ctx.nvars
    lms = [g.leading_term(GREVLEX)[0] for g in gb]
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in lms]
    for size in range(n, -1, -1):
        for S in itertools.combinations(range(n), size):
            Sset = set(S)
            if all(not sup <= Sset for sup in supports):
                return size
    return 0


def standard_monomials(I: Ideal):
    """Monomial basis of ring/I for a zero-dimensional ideal."""
    gb = I.groebner(GREVLEX)
    if len(gb) == 1 and gb[0].is_constant:
        return []
    n = I.ctx.nvars
    lms = [g.leading_term(GREVLEX)[0] for g in gb]
    bounds = [None] * n
    for m in lms:
        sup = [i for i, e in enumerate(m) if e]
        if len(sup) == 1:
            i = sup[0]
            if bounds[i] is None or m[i] < bounds[i]:
                bounds[i] = m[i]
    if any(b is None for b in bounds):
        raise NotZeroDimensional(f"ideal is not zero-dimensional: {I!r}")
    total = 1
    for b in bounds:
        total *= b
        if total > _QUOTIENT_CAP:
            raise NotZeroDimensional("quotient too large")
    out = []
    for mono in itertools.product(*[range(b) for b in bounds]):
        if not any(mono_divides(lm, mono) for lm in lms):
            out.append(mono)
    return out


def quotient_dimension(I: Ideal) -> int:
    """Q-vector-space dimension of ring/I (requires a zero-dimensional ideal)."""
    return len(standard_monomials(I))


# ---------------------------------------------------------------------------
# truncated local dimension at a rational point (m-adic oracle)

def _monomials_below(n, deg):
    """All exponent tuples of total degree < deg, in a fixed order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, slots - 1)

    rec([], deg - 1, n)
    return out


def _sparse_rank(rows):
    pivots = {}
    rank = 0
    for row in rows:
        r = dict(row)
        while r:
            col = max(r)
            if col in pivots:
                factor = r.pop(col)
                for c, v in pivots[col].items():
                    if c == col:
                        continue
                    nv = r.get(c, 0) - factor * v
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
            else:
                lead = r[col]
                pivots[col] = {c: v / lead for c, v in r.items()}
                rank += 1
                break
    return rank


def truncated_local_dim(gens, point, order_n: int) -> int:
    """dim_Q of ring/(I + m_p^N): linear algebra on monomials of degree < N."""
    if not gens:
        ctx_n = len(point)
        return len(_monomials_below(ctx_n, order_n))
    ctx = gens[0].ctx
    n = ctx.nvars
    shifted = [g.translate(point) for g in gens]
    monos = _monomials_below(n, order_n)
    col = {m: i for i, m in enumerate(monos)}
    rows = []
    for g in shifted:
        if g.is_zero:
            continue
        gmin = min(sum(m) for m in g.terms)
        for mu in monos:
            if sum(mu) + gmin > order_n - 1:
                continue
            row = {}
            for tm, tc in g.terms.items():
                mm = tuple(a + b for a, b in zip(tm, mu))
                if sum(mm) <= order_n - 1:
                    row[col[mm]] = row.get(col[mm], 0) + tc
            row = {c: v for c, v in row.items() if v}
            if row:
                rows.append(row)
    return len(monos) - _sparse_rank(rows)


def local_length_at_rational_point(I: Ideal, point, max_order=60) -> int:
    """Length of the local ring of V(I) at an isolated rational point.

    Stabilization of N -> dim ring/(I + m_p^N) is certified by two equal
    consecutive values (Nakayama: once the filtration stalls it is done).
    """
    gens = list(I.gens)
    prev = None
    for N in range(1, max_order):
        cur = truncated_local_dim(gens, point, N)
        if prev is not None and cur == prev:
            return cur
        prev = cur
    raise VogelError(f"local length did not stabilize at {point}; "
                     "the point is probably not isolated in V(I)")


def rational_point(prime: Ideal):
    """Coordinates if the prime is the maximal ideal of a rational point."""
    ctx = prime.ctx
    gb = prime.groebner(GREVLEX)
    if len(gb) != ctx.nvars:
        return None
    coords = [None] * ctx.nvars
    for g in gb:
        lm, lc = g.leading_term(GREVLEX)
        if sum(lm) != 1:
            return None
        i = next(k for k, e in enumerate(lm) if e)
        rest = Polynomial(ctx, {m: c for m, c in g.terms.items() if m != lm})
        if not rest.is_constant:
            return None
        coords[i] = -rest.constant_value() / lc
    if any(c is None for c in coords):
        return None
    return tuple(coords)


# ---------------------------------------------------------------------------
# minimal primes

def _find_factorable(gb):
    for g in gb:
        fac = factor_polynomial(g)
        if len(fac) > 1 or (fac and fac[0][1] > 1):
            return g, fac
    return None


def _in_span(vectors, target):
    """Solve sum_k a_k * vectors[k] = target; returns the a-list or None."""
    n = len(vectors)
    cols = sorted({c for v in vectors for c in v} | set(target))
    m = [[vectors[k].get(c, Fraction(0)) for k in range(n)] +
         [target.get(c, Fraction(0))] for c in cols]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        lead = m[r][c]
        m[r] = [v / lead for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][n]:
            return None  # inconsistent: target not in the span
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        sol[c] = m[i][n]
    return sol


def _minpoly_of(element: Polynomial, I: Ideal):
    """Minimal polynomial of ``element`` in ring/I as Fraction coefficients.

    Returns [c_0, ..., c_d] with sum c_s * element^s = 0 and c_d = 1.
    """
    vectors = []
    power = Polynomial.constant(I.ctx, 1)
    while True:
        vec = dict(I.normal_form(power).terms)
        sol = _in_span(vectors, vec)
        if sol is not None:
            return [-a for a in sol] + [Fraction(1)]
        vectors.append(vec)
        power = I.normal_form(power * element)


def _coeffs_to_poly_in(element: Polynomial, coeffs) -> Polynomial:
    out = Polynomial.zero(element.ctx)
    power = Polynomial.constant(element.ctx, 1)
    for c in coeffs:
        if c:
            out = out + power * c
        power = power * element
    return out


def _factor_univariate_coeffs(coeffs):
    """Factor a univariate polynomial given by Fraction coefficients."""
    ctx1 = VariableContext(("s",))
    p = Polynomial(ctx1, {(i,): c for i, c in enumerate(coeffs) if c})
    fac = factor_polynomial(p)
    out = []
    for f, e in fac:
        cs = [Fraction(0)] * (f.degree_in(0) + 1)
        for m, c in f.terms.items():
            cs[m[0]] = c
        out.append((cs, e))
    return out


def _zero_dim_primes(I: Ideal, depth=0):
    """Minimal primes of a zero-dimensional ideal (certified maximal leaves)."""
    if depth > 30:
        raise DecompositionIncomplete("zero-dimensional splitting too deep", I)
    gb = I.groebner(GREVLEX)
    if len(gb) == 1 and gb[0].is_constant:
        return []
    I = Ideal(I.ctx, gb)
    basis = standard_monomials(I)
    D = len(basis)
    if D == 1:
        return [I]
    # univariate minimal polynomials: radicalize and split
    for name in I.ctx.names:
        xv = Polynomial.variable(I.ctx, name)
        coeffs = _minpoly_of(xv, I)
        fac = _factor_univariate_coeffs(coeffs)
        if len(fac) > 1:
            out = []
            for cs, _ in fac:
                out.extend(_zero_dim_primes(I.plus([_coeffs_to_poly_in(xv, cs)]), depth + 1))
            return out
        if fac and fac[0][1] > 1:
            return _zero_dim_primes(I.plus([_coeffs_to_poly_in(xv, fac[0][0])]), depth + 1)
        if fac and len(fac[0][0]) - 1 == D:
            return [I]  # ring/I = Q[x]/(irreducible): a field
    # radical now; separate the points with a primitive element
    for k in range(1, 64):
        lam = Polynomial.zero(I.ctx)
        for i, name in enumerate(I.ctx.names):
            lam = lam + Polynomial.variable(I.ctx, name) * (k ** i)
        coeffs = _minpoly_of(lam, I)
        fac = _factor_univariate_coeffs(coeffs)
        if len(fac) > 1:
            out = []
            for cs, _ in fac:
                out.extend(_zero_dim_primes(I.plus([_coeffs_to_poly_in(lam, cs)]), depth + 1))
            return out
        if fac and fac[0][1] == 1 and len(fac[0][0]) - 1 == D:
            return [I]
    raise DecompositionIncomplete("no primitive element separated the points", I)


def _substitution_collapse(I: Ideal):
    """Substitute away variables occurring linearly with constant coefficient.

    Returns the list of remaining generators; the quotient ring map is an
    isomorphism, so primality is preserved in both directions.
    """
    gens = [g for g in I.groebner(GREVLEX)]
    changed = True
    while changed:
        changed = False
        for g in gens:
            if g.is_zero:
                continue
            for idx in sorted(g.variables_used()):
                name = I.ctx.names[idx]
                if g.degree_in(idx) != 1:
                    continue
                coeff = g.coefficient_of(name, 1)
                if not coeff.is_constant:
                    continue
                c = coeff.constant_value()
                rest = g - Polynomial.variable(I.ctx, name) * c
                if idx in rest.variables_used():
                    continue
                replacement = rest * (Fraction(-1) / c)
                gens = [h.substitute(name, replacement) for h in gens if h is not g]
                changed = True
                break
            if changed:
                break
    return [g for g in gens if not g.is_zero]


def _certify_positive_dim(I: Ideal, depth):
    """Certify a positive-dimensional leaf prime, or split further."""
    remaining = _substitution_collapse(I)
    if not remaining:
        return [I]
    J = Ideal(I.ctx, remaining)
    gbJ = J.groebner(GREVLEX)
    if len(gbJ) == 1:
        g = gbJ[0]
        if g.is_constant:
            return []
        fac = factor_polynomial(g)
        if len(fac) == 1 and fac[0][1] == 1:
            return [I]
        out = []
        for q, _ in fac:
            out.extend(_minimal_prime_ideals(I.plus([q]), depth + 1))
        return out
    # substituted generators may have become factorable; try one more split
    found = _find_factorable(gbJ)
    if found is not None:
        g, fac = found
        out = []
        for q, _ in fac:
            out.extend(_minimal_prime_ideals(I.plus([q]), depth + 1))
        return out
    raise DecompositionIncomplete(
        "cannot certify primality of a positive-dimensional leaf", I)


def _minimal_prime_ideals(I: Ideal, depth=0):
    if depth > 40:
        raise DecompositionIncomplete("splitting recursion too deep", I)
    gb = I.groebner(GREVLEX)
    if not gb:
        return [Ideal.zero(I.ctx)]
    if len(gb) == 1 and gb[0].is_constant:
        return []
    I = Ideal(I.ctx, gb)
    found = _find_factorable(gb)
    if found is not None:
        _, fac = found
        out = []
        for q, _ in fac:
            out.extend(_minimal_prime_ideals(I.plus([q]), depth + 1))
        return out
    d = dimension(I)
    if d == 0:
        return _zero_dim_primes(I)
    return _certify_positive_dim(I, depth)


def minimal_primes(I: Ideal):
    """The minimal primes of I, canonically sorted PrimeComponents."""
    raw = _minimal_prime_ideals(I)
    seen = {}
    for P in raw:
        seen.setdefault(P.canonical_key(), P)
    primes = list(seen.values())
    keep = []
    for P in primes:
        redundant = False
        for Q in primes:
            if Q is P:
                continue
            if P.contains_ideal(Q) and P.canonical_key() != Q.canonical_key():
                # V(P) is inside V(Q): P is not minimal over I
                redundant = True
                break
        if not redundant:
            keep.append(P)
    comps = [PrimeComponent(P, dimension(P) if not P.is_zero_ideal else I.ctx.nvars)
             for P in keep]
    comps.sort(key=lambda c: c.key())
    return comps


# ---------------------------------------------------------------------------
# local length (multiplicity of a component in the cycle of a scheme)

def _strip_other_components(I: Ideal, others) -> Ideal:
    out = I
    for q in others:
        out = saturate(out, q.prime if isinstance(q, PrimeComponent) else q)
    return out


def _random_affine_forms(ctx: VariableContext, count, rng):
    forms = []
    for _ in range(count):
        p = Polynomial.constant(ctx, rng.randint(-SLICE_COEFF_BOUND, SLICE_COEFF_BOUND))
        for name in ctx.names:
            p = p + Polynomial.variable(ctx, name) * rng.randint(-SLICE_COEFF_BOUND, SLICE_COEFF_BOUND)
        forms.append(p)
    return forms


def _slice_ratio(Istar: Ideal, prime: Ideal, e, rng):
    forms = _random_affine_forms(Istar.ctx, e, rng)
    try:
        top = quotient_dimension(Istar.plus(forms))
        bot = quotient_dimension(prime.plus(forms))
    except NotZeroDimensional:
        return None
    if bot <= 0 or top <= 0 or top % bot:
        return None
    return top // bot


def local_length(I: Ideal, comp: PrimeComponent, others=None, rng=None) -> int:
    """Multiplicity of [V(comp)] in the cycle of the scheme V(I)."""
    if rng is None:
        rng = random.Random(0)
    if comp.prime.is_zero_ideal:
        return 1
    if I == comp.prime:
        return 1
    if others is None:
        others = [c for c in minimal_primes(I) if c != comp]
    if comp.dim == 0:
        pt = rational_point(comp.prime)
        if pt is not None:
            return local_length_at_rational_point(I, pt)
        Istar = _strip_other_components(I, others)
        top = quotient_dimension(Istar)
        deg = quotient_dimension(comp.prime)
        if top % deg:
            raise VogelError("length of non-rational point is not integral")
        return top // deg
    Istar = _strip_other_components(I, others)
    results = []
    for _ in range(4):
        r = _slice_ratio(Istar, comp.prime, comp.dim, rng)
        if r is None:
            continue
        results.append(r)
        if len(results) == 2:
            if results[0] == results[1]:
                return results[0]
            results = [results[1]]
    raise SliceFailure(f"random slices kept disagreeing for {comp!r}")
