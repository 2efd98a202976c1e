"""Gap schemes, the downward tower of inductive gap cycles and their
dimension-drop pieces, correct-dimension checks, and generic linear
reorganization with a-posteriori certificates.

Index bookkeeping: a tuple (f_0, ..., f_k) on a component of dimension d
produces levels d-(k+1) <= i <= d.  The working entries are normalized to
length d (keep the last d entries when too long, prepend copies of f_0
when too short); levels are always reported in the absolute i-convention,
and the "not contained in V(f)" splits always use the original tuple, so
truncation only changes which stray points land in the lowest level.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cycles import Cycle, cycle_of_scheme
from .decompose import PrimeComponent, dimension, minimal_primes, whole_space
from .errors import (CorrectDimensionViolated, ImproperIntersection,
                     ProblemSpecError, ReorganizationBudgetExhausted)
from .groebner import Ideal
from .ideal_ops import intersect_many, same_variety, saturate
from .poly import Polynomial, VariableContext

REORG_COEFF_BOUND = 1000


class PolyTuple:
    """An ordered tuple of polynomials; the order is significant everywhere."""

    __slots__ = ("ctx", "entries")

    def __init__(self, ctx: VariableContext, entries):
        entries = tuple(entries)
        for e in entries:
            if e.ctx != ctx:
                raise ProblemSpecError("tuple entry over a different ring")
        if not entries:
            raise ProblemSpecError("empty tuple")
        self.ctx = ctx
        self.entries = entries

    @property
    def k(self) -> int:
        return len(self.entries) - 1

    def ideal(self) -> Ideal:
        return Ideal(self.ctx, self.entries)

    def __repr__(self):
        return f"<tuple ({', '.join(str(e) for e in self.entries)})>"

    def __eq__(self, other):
        return (isinstance(other, PolyTuple) and self.ctx == other.ctx
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.ctx.names, self.entries))


def default_cycle_m(ctx: VariableContext) -> Cycle:
    return Cycle.of_component(whole_space(ctx))


def validate_cycle_m(M: Cycle):
    if M.is_zero:
        raise ProblemSpecError("the weight cycle must be non-zero")
    if not M.same_sign():
        raise ProblemSpecError("all weights of the cycle must have the same sign")


def normalize_tuple(entries, d: int):
    """Truncate to the last d entries, or prepend copies of the first entry."""
    entries = tuple(entries)
    k1 = len(entries)
    if k1 > d:
        return entries[k1 - d:]
    if k1 < d:
        return (entries[0],) * (d - k1) + entries
    return entries


def gap_scheme(f: PolyTuple, i: int, flavor: str,
               component: PrimeComponent | None = None) -> Ideal:
    """Gap scheme at level i: 'plain' (remove V(f)), 'modified' (remove the
    next hypersurface) or 'inductive' (the downward scheme recursion)."""
    ctx = f.ctx
    comp = component if component is not None else whole_space(ctx)
    P = comp.prime
    d = comp.dim
    k = f.k
    lo = d - (k + 1)
    if i < lo or i > d:
        return Ideal.unit(ctx)
    if flavor == "plain":
        s = i + k + 1 - d
        return saturate(P.plus(f.entries[s:]), f.ideal())
    if flavor == "modified":
        s = i + k + 1 - d
        if s == 0:
            return Ideal.unit(ctx)
        return saturate(P.plus(f.entries[s:]), Ideal(ctx, (f.entries[s - 1],)))
    if flavor == "inductive":
        sch = saturate(P, Ideal(ctx, (f.entries[k],)))
        for j in range(d - 1, i - 1, -1):
            s = j + k + 1 - d
            if s == 0:
                sch = Ideal.unit(ctx)
                break
            sch = saturate(sch.plus([f.entries[s]]), Ideal(ctx, (f.entries[s - 1],)))
        return sch
    raise ValueError(f"unknown gap flavor {flavor!r}")


def _pure_or_empty(I: Ideal, i: int) -> bool:
    if I.is_unit:
        return True
    if i < 0:
        return False
    return all(c.dim == i for c in minimal_primes(I))


class ComponentTower:
    """Tower data for a single component of the weight cycle."""

    __slots__ = ("component", "mult", "dim", "pi_hat", "delta", "pi_scheme",
                 "pi_tilde_scheme", "f_vanishes", "entry_index")

    def __init__(self, component, mult, dim):
        self.component = component
        self.mult = mult
        self.dim = dim
        self.pi_hat = {}
        self.delta = {}
        self.pi_scheme = {}
        self.pi_tilde_scheme = {}
        self.f_vanishes = False
        self.entry_index = {}


class VogelTower:
    """Full tower output: per-component levels plus the weighted aggregate."""

    __slots__ = ("f", "M", "components", "seed", "mode", "reorganization")

    def __init__(self, f, M, components, seed, mode, reorganization=None):
        self.f = f
        self.M = M
        self.components = components
        self.seed = seed
        self.mode = mode
        self.reorganization = reorganization

    def level_range(self):
        lo = min(min(ct.pi_hat) for ct in self.components)
        hi = max(ct.dim for ct in self.components)
        return range(lo, hi + 1)

    def aggregate_pi_hat(self, i: int) -> Cycle:
        out = Cycle.zero(self.f.ctx)
        for ct in self.components:
            if i in ct.pi_hat:
                out = out + ct.pi_hat[i] * ct.mult
        return out

    def aggregate_delta(self, i: int) -> Cycle:
        out = Cycle.zero(self.f.ctx)
        for ct in self.components:
            if i in ct.delta:
                out = out + ct.delta[i] * ct.mult
        return out


def _component_tower(f: PolyTuple, comp: PrimeComponent, mult, rng,
                     validate=True) -> ComponentTower:
    ctx = f.ctx
    P = comp.prime
    d = comp.dim
    ct = ComponentTower(comp, mult, d)
    full = f.ideal()

    if all(P.contains(g) for g in f.entries):
        # identically-zero tuple on this component: the whole component is
        # the top-dimensional piece and the inductive cycles vanish
        ct.f_vanishes = True
        for i in range(0, d + 1):
            ct.pi_hat[i] = Cycle.zero(ctx)
            ct.delta[i] = Cycle.zero(ctx)
        ct.delta[d] = Cycle.of_component(comp)
        return ct

    entries = normalize_tuple(f.entries, d)
    k = f.k
    ct.pi_hat[d] = Cycle.of_component(comp).not_in(Ideal(ctx, (entries[-1],)))
    ct.delta[d] = Cycle.zero(ctx)
    for i in range(d - 1, -1, -1):
        ct.entry_index[i] = max(i + k + 1 - d, 0)
        T = ct.pi_hat[i + 1].intersect_hypersurface(entries[i], rng)
        inside, outside = T.split_by_variety(full)
        ct.delta[i] = inside
        ct.pi_hat[i] = outside

    if validate:
        lo = d - (k + 1)
        for i in range(lo, d + 1):
            sch = gap_scheme(f, i, "plain", comp)
            ct.pi_scheme[i] = sch
            ct.pi_tilde_scheme[i] = gap_scheme(f, i, "modified", comp)
            if not _pure_or_empty(sch, i):
                raise CorrectDimensionViolated(
                    f"gap scheme at level {i} is not purely {i}-dimensional",
                    level=i, ideal=sch)
        for i, delta in ct.delta.items():
            if not delta.is_pure(i):
                raise CorrectDimensionViolated(
                    f"dimension-drop cycle at level {i} is not purely {i}-dimensional",
                    level=i, ideal=delta.support())
    return ct


def vogel_tower(f: PolyTuple, M: Cycle | None = None, mode: str = "strict",
                seed: int = 0, max_retries: int = 32) -> VogelTower:
    """The downward inductive tower, per component of M, validated.

    In strict mode a correct-dimension violation (or an improper
    intersection along the way) aborts; in auto-reorganize mode the tuple
    is replaced by certified generic linear reorganizations until the
    tower passes or the retry budget runs out.
    """
    if M is None:
        M = default_cycle_m(f.ctx)
    validate_cycle_m(M)
    rng = random.Random(seed)
    attempts = 0
    current = f
    reorganization = None
    while True:
        try:
            comps = [_component_tower(current, c, m, rng) for m, c in M.terms]
            return VogelTower(current, M, comps, seed, mode, reorganization)
        except (CorrectDimensionViolated, ImproperIntersection):
            if mode != "auto-reorganize":
                raise
            if attempts >= max_retries:
                raise ReorganizationBudgetExhausted(
                    f"no reorganization passed after {attempts} attempts")
            attempts += 1
            current, reorganization = reorganize(f, M, seed=rng.randrange(1 << 30),
                                                 max_retries=max_retries)


def vogel_sets(f: PolyTuple, M: Cycle | None = None) -> dict:
    """Support ideals of the dimension-indexed pieces of V(f) inside |M|."""
    if M is None:
        M = default_cycle_m(f.ctx)
    validate_cycle_m(M)
    ctx = f.ctx
    k = f.k
    per_component = []
    union_by_level = {}
    for mult, comp in M.terms:
        P = comp.prime
        d = comp.dim
        vanishes = all(P.contains(g) for g in f.entries)
        levels = {}
        for i in range(d - (k + 1), d + 1):
            if i == d:
                levels[i] = Ideal(ctx, P.gens) if vanishes else Ideal.unit(ctx)
                continue
            s = i + k + 1 - d
            if s < 0:
                continue
            sch = gap_scheme(f, i + 1, "plain", comp)
            if sch.is_unit:
                levels[i] = Ideal.unit(ctx)
                continue
            contained = [c.prime for c in minimal_primes(sch.plus([f.entries[s]]))
                         if all(c.prime.contains(g) for g in f.entries)]
            levels[i] = intersect_many(contained, ctx) if contained else Ideal.unit(ctx)
        per_component.append({"component": comp, "mult": mult, "levels": levels})
        for i, ideal in levels.items():
            if i in union_by_level:
                union_by_level[i] = intersect_many([union_by_level[i], ideal], ctx)
            else:
                union_by_level[i] = ideal
    return {"per_component": per_component, "levels": union_by_level}


def vogel_set_union(sets_report, ctx: VariableContext) -> Ideal:
    return intersect_many(sets_report["levels"].values(), ctx)


def m_intersect_vf(f: PolyTuple, M: Cycle) -> Ideal:
    """Ideal cutting out |M| meet V(f)."""
    parts = [c.prime.plus(f.entries) for _, c in M.terms]
    return intersect_many(parts, f.ctx)


def check_dimensionality(f: PolyTuple, M: Cycle | None = None) -> dict:
    """Pure report: purity of the gap sets, agreement of the three gap
    flavors, purity of the dimension pieces, and the implications between
    those statements."""
    if M is None:
        M = default_cycle_m(f.ctx)
    validate_cycle_m(M)
    k = f.k
    per_component = []
    sets_report = vogel_sets(f, M)
    for (mult, comp), vs in zip(M.terms, sets_report["per_component"]):
        d = comp.dim
        lo = d - (k + 1)
        levels = []
        flag_pure = True
        flag_modified = True
        flag_inductive = True
        flag_vogel = True
        for i in range(lo, d + 1):
            plain = gap_scheme(f, i, "plain", comp)
            modified = gap_scheme(f, i, "modified", comp)
            inductive = gap_scheme(f, i, "inductive", comp)
            pure = _pure_or_empty(plain, i)
            eq_mod = same_variety(plain, modified)
            eq_ind = same_variety(plain, inductive)
            d_ideal = vs["levels"].get(i, Ideal.unit(f.ctx))
            d_pure = _pure_or_empty(d_ideal, i)
            levels.append({"i": i, "pure": pure, "eq_modified": eq_mod,
                           "eq_inductive": eq_ind, "vogel_pure": d_pure,
                           "plain": plain, "modified": modified,
                           "inductive": inductive, "vogel_set": d_ideal})
            flag_pure &= pure
            flag_modified &= eq_mod
            flag_inductive &= eq_ind
            flag_vogel &= d_pure
        per_component.append({"component": comp, "mult": mult, "levels": levels,
                              "flags": {"i": flag_pure, "ii": flag_modified,
                                        "iii": flag_inductive, "iv": flag_vogel}})
    flags = {key: all(pc["flags"][key] for pc in per_component)
             for key in ("i", "ii", "iii", "iv")}
    implications_ok = ((flags["i"] == flags["ii"] == flags["iii"])
                       and (not flags["i"] or flags["iv"]))
    return {"per_component": per_component, "flags": flags,
            "implications_ok": implications_ok}


def _det(matrix) -> Fraction:
    n = len(matrix)
    m = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if m[i][c]), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                factor = m[i][c] * inv
                m[i] = [a - factor * b for a, b in zip(m[i], m[c])]
    return det


def reorganize(f: PolyTuple, M: Cycle | None = None, seed: int = 0,
               max_retries: int = 32):
    """Generic linear reorganization, built entrywise by downward induction.

    Each new entry is a random integer combination of the original entries;
    a draw is accepted only if it vanishes on no component of the current
    gap cycle (checked on every component of M).  The final tuple must make
    the three gap flavors agree as schemes; the whole certificate is
    re-drawn until that holds or the budget runs out.
    """
    if M is None:
        M = default_cycle_m(f.ctx)
    validate_cycle_m(M)
    ctx = f.ctx
    k = f.k
    rng = random.Random(seed)
    full = f.ideal()
    comp_data = [(mult, comp) for mult, comp in M.terms
                 if not all(comp.prime.contains(g) for g in f.entries)]
    last_failure = None
    for _ in range(max_retries):
        rows = []
        new_entries = [None] * (k + 1)
        ok = True
        for pos in range(k, -1, -1):
            accepted = False
            for _ in range(max_retries):
                coeffs = [rng.randint(-REORG_COEFF_BOUND, REORG_COEFF_BOUND)
                          for _ in range(k + 1)]
                cand = Polynomial.zero(ctx)
                for a, g in zip(coeffs, f.entries):
                    cand = cand + g * a
                good = True
                for _, comp in comp_data:
                    tail = [e for e in new_entries[pos + 1:]]
                    scheme = saturate(comp.prime.plus(tail), full)
                    if scheme.is_unit:
                        continue
                    for c in minimal_primes(scheme):
                        if c.prime.contains(cand):
                            good = False
                            break
                    if not good:
                        break
                if good:
                    new_entries[pos] = cand
                    rows.append(coeffs)
                    accepted = True
                    break
            if not accepted:
                ok = False
                last_failure = {"stage": f"entry {pos}", "reason": "no draw avoided the gap components"}
                break
        if not ok:
            continue
        if _det(rows) == 0:
            last_failure = {"stage": "matrix", "reason": "singular reorganization matrix"}
            continue
        cand_tuple = PolyTuple(ctx, new_entries)
        report = check_dimensionality(cand_tuple, M)
        schemes_agree = True
        for pc in report["per_component"]:
            for lv in pc["levels"]:
                if not (lv["plain"] == lv["modified"] == lv["inductive"]):
                    schemes_agree = False
                    break
            if not schemes_agree:
                break
        if all(report["flags"].values()) and schemes_agree:
            info = {"seed": seed, "coefficients": rows}
            return cand_tuple, info
        last_failure = {"stage": "certificate", "flags": report["flags"],
                        "schemes_agree": schemes_agree}
    raise ReorganizationBudgetExhausted(
        f"reorganization failed after {max_retries} attempts",
        certificate=last_failure)
