"""Perturbation machinery: restriction identities, gap ratios, the
add-a-power-of-g formulas, reverse estimation, and the cylinder identity.

All identities here are statements about germs at a chosen rational base
point p, so cycle comparisons filter to components passing through p and
0-cycles are compared by their coefficient at p.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cycles import Cycle
from .decompose import (PrimeComponent, local_length_at_rational_point,
                        minimal_primes)
from .errors import ImproperIntersection, ProblemSpecError, VogelError
from .groebner import Ideal
from .poly import Polynomial, VariableContext
from .vogel import (PolyTuple, VogelTower, default_cycle_m, gap_scheme,
                    normalize_tuple, vogel_tower)


def local_intersection_number(C: Cycle, f: Polynomial, point):
    """Weighted local length of (component + <f>) at the point; None when
    f vanishes on some component (the infinite case)."""
    total = 0
    for m, c in C.terms:
        if c.dim != 1:
            raise ProblemSpecError("local intersection numbers need a pure curve cycle")
        if c.prime.contains(f):
            return None
        total += m * local_length_at_rational_point(c.prime.plus([f]), point)
    return total


def _origin(ctx: VariableContext):
    return (Fraction(0),) * ctx.nvars


def gap_ratios(f: PolyTuple, g: Polynomial, M: Cycle | None = None,
               point=None, tower: VogelTower | None = None) -> dict:
    """Per-component ratios of contact orders along the curve level of the
    tower: (curve . V(first entry))_p / (curve . V(g))_p, zero for curves
    inside V(g), zero when p is off the curve level entirely."""
    if M is None:
        M = default_cycle_m(f.ctx)
    if point is None:
        point = _origin(f.ctx)
    point = tuple(Fraction(v) for v in point)
    if g.eval_at(point) != 0:
        raise ProblemSpecError("the base point must lie on V(g)")
    if tower is None:
        tower = vogel_tower(f, M, mode="strict")
    ratios = []
    for ct in tower.components:
        if 1 not in ct.pi_hat:
            continue
        d = ct.dim
        first_entry = normalize_tuple(f.entries, d)[0]
        for _, eta in ct.pi_hat[1].through_point(point).terms:
            if eta.prime.contains(g):
                ratios.append({"component": eta, "ratio": Fraction(0),
                               "contained_in_vg": True})
                continue
            if eta.prime.contains(first_entry):
                raise VogelError("first tuple entry vanishes on a curve component; "
                                 "the contact order is infinite")
            num = local_length_at_rational_point(eta.prime.plus([first_entry]), point)
            den = local_length_at_rational_point(eta.prime.plus([g]), point)
            ratios.append({"component": eta, "ratio": Fraction(num, den),
                           "numerator": num, "denominator": den,
                           "contained_in_vg": False})
    max_ratio = max((r["ratio"] for r in ratios), default=Fraction(0))
    return {"point": point, "ratios": ratios, "max_ratio": max_ratio,
            "curve_count_through_p": len(ratios)}


class LivInstance:
    """Input bundle for the perturbation checks: tuple, auxiliary function,
    non-zero scalar a, exponent j >= 1, weight cycle, rational base point."""

    __slots__ = ("f", "g", "a", "j", "M", "point")

    def __init__(self, f: PolyTuple, g: Polynomial, a, j: int,
                 M: Cycle | None = None, point=None):
        self.f = f
        self.g = g
        self.a = Fraction(a)
        if self.a == 0:
            raise ProblemSpecError("the scalar a must be non-zero")
        if j < 1:
            raise ProblemSpecError("the exponent j must be at least 1")
        self.j = int(j)
        self.M = M if M is not None else default_cycle_m(f.ctx)
        self.point = tuple(Fraction(v) for v in (point if point is not None
                                                 else _origin(f.ctx)))

    def perturbed_tuple(self) -> PolyTuple:
        entries = self.f.entries
        head = entries[1:]
        tail = entries[0] + self.g ** self.j * self.a
        return PolyTuple(self.f.ctx, head + (tail,))


def _germ_primes(I: Ideal, point):
    out = []
    for c in minimal_primes(I):
        if c.contains_point(point):
            out.append(c)
    return sorted(out, key=lambda c: c.key())


def _local_dim_at(I: Ideal, point):
    primes = _germ_primes(I, point)
    if not primes:
        return None
    return max(c.dim for c in primes)


def restriction_check(f: PolyTuple, g: Polynomial, M: Cycle | None = None,
                      point=None, tower: VogelTower | None = None,
                      rng=None) -> dict:
    """Replace the first entry by a fresh function g and compare the towers.

    Part one: when the curve-level gap set is a curve at p, properness of
    V(g) against it is equivalent to V(f_1..f_n, g) and V(f, g) agreeing as
    germs at p.  Part two: under the germ equality plus properness against
    the positive-dimensional pieces, the tower of (f_1, ..., f_n, g) is the
    tower of f sliced by V(g), level by level.
    """
    if M is None:
        M = default_cycle_m(f.ctx)
    if point is None:
        point = _origin(f.ctx)
    point = tuple(Fraction(v) for v in point)
    if rng is None:
        rng = random.Random(0)
    if tower is None:
        tower = vogel_tower(f, M, mode="strict")
    ctx = f.ctx
    h = PolyTuple(ctx, f.entries[1:] + (g,))

    report = {"point": point}
    # part one data
    germ_h, germ_fg = [], []
    proper_all = True
    pi1_pure = True
    for mult, comp in M.terms:
        P = comp.prime
        pi1 = gap_scheme(f, 1, "plain", comp)
        comps1 = [] if pi1.is_unit else minimal_primes(pi1)
        through = [c for c in comps1 if c.contains_point(point)]
        if any(c.dim != 1 for c in through):
            pi1_pure = False
        for c in through:
            if c.prime.contains(g):
                proper_all = False
        germ_h.extend(_germ_primes(P.plus(h.entries), point))
        germ_fg.extend(_germ_primes(P.plus(f.entries + (g,)), point))
    germ_equal = ([c.key() for c in sorted(germ_h, key=lambda c: c.key())]
                  == [c.key() for c in sorted(germ_fg, key=lambda c: c.key())])
    report["pi1_pure_at_p"] = pi1_pure
    report["proper_intersection_at_p"] = proper_all
    report["germ_sets_equal"] = germ_equal
    report["part_one_consistent"] = (not pi1_pure) or (proper_all == germ_equal)

    # part two hypotheses
    hypotheses_ok = germ_equal
    for i in tower.level_range():
        if i < 1:
            continue
        for _, c in tower.aggregate_delta(i).through_point(point).terms:
            if c.prime.contains(g):
                hypotheses_ok = False
    report["hypotheses_ok"] = hypotheses_ok
    if not hypotheses_ok:
        report["identities"] = None
        return report

    tower_h = vogel_tower(h, M, mode="strict")
    n = f.k
    identities = {}
    ok = True
    for i in range(1, n + 1):
        lhs = tower_h.aggregate_pi_hat(i).through_point(point)
        rhs = tower.aggregate_pi_hat(i + 1).intersect_hypersurface(g, rng).through_point(point)
        identities[f"pi_hat_{i}"] = (lhs == rhs)
        ok &= lhs == rhs
        lhs_d = tower_h.aggregate_delta(i).through_point(point)
        rhs_d = tower.aggregate_delta(i + 1).intersect_hypersurface(g, rng).through_point(point)
        identities[f"delta_{i}"] = (lhs_d == rhs_d)
        ok &= lhs_d == rhs_d
    lhs0 = tower_h.aggregate_delta(0).coefficient_at_point(point)
    rhs0 = (tower.aggregate_pi_hat(1).intersect_hypersurface(g, rng).coefficient_at_point(point)
            + tower.aggregate_delta(1).intersect_hypersurface(g, rng).coefficient_at_point(point))
    identities["delta_0"] = (lhs0 == rhs0)
    ok &= lhs0 == rhs0
    report["identities"] = identities
    report["identities_hold"] = ok
    return report


def liv_check(inst: LivInstance, rng=None) -> dict:
    """Verify the perturbation formulas: replacing the first entry by
    (first entry + a g^j) shifts the point count by j times the slice of the
    next level, and slices every higher level by V(g) scaled by j."""
    if rng is None:
        rng = random.Random(0)
    f, g, a, j, M, point = inst.f, inst.g, inst.a, inst.j, inst.M, inst.point
    ctx = f.ctx
    n = f.k
    report = {"a": str(a), "j": j, "point": [str(c) for c in point]}

    tower_f = vogel_tower(f, M, mode="strict")
    ratios = gap_ratios(f, g, M, point, tower=tower_f)
    report["max_gap_ratio"] = str(ratios["max_ratio"])
    report["j_clears_ratio_strictly"] = Fraction(j) > ratios["max_ratio"]
    report["j_meets_ratio"] = Fraction(j) >= ratios["max_ratio"]
    report["a_sensitive"] = Fraction(j) == ratios["max_ratio"]
    delta0_coeffs = []
    for ct in tower_f.components:
        c0 = ct.delta.get(0, Cycle.zero(ctx)).coefficient_at_point(point)
        delta0_coeffs.append(c0)
    bound = 1 + max(delta0_coeffs, default=0)
    report["sufficient_exponent"] = bound
    report["j_meets_sufficient_bound"] = j >= bound

    # preconditions: V(g) proper against every positive-dimensional level
    precondition_ok = True
    for i in tower_f.level_range():
        if i < 1:
            continue
        for _, c in tower_f.aggregate_delta(i).terms:
            if c.prime.contains(g):
                precondition_ok = False
    report["preconditions_ok"] = precondition_ok
    if not precondition_ok:
        report["identities"] = None
        return report

    h = inst.perturbed_tuple()
    try:
        tower_h = vogel_tower(h, M, mode="strict")
    except VogelError as exc:
        report["perturbed_tower_error"] = exc.payload()
        report["identities"] = None
        return report

    # i) germ equality of zero sets
    sets_equal = True
    for mult, comp in M.terms:
        P = comp.prime
        gh = _germ_primes(P.plus(h.entries), point)
        gfg = _germ_primes(P.plus(f.entries + (g,)), point)
        if [c.key() for c in gh] != [c.key() for c in gfg]:
            sets_equal = False
    report["sets_equal_at_p"] = sets_equal

    # ii) dimension drop at p
    dims_f = [_local_dim_at(comp.prime.plus(f.entries), point) for _, comp in M.terms]
    dims_h = [_local_dim_at(comp.prime.plus(h.entries), point) for _, comp in M.terms]
    dim_f = max((d for d in dims_f if d is not None), default=None)
    dim_h = max((d for d in dims_h if d is not None), default=None)
    if dim_f is None or dim_f == 0:
        report["dimension_drop"] = None
    else:
        report["dimension_drop"] = (dim_h == dim_f - 1)

    # iii) the perturbed tower exists (strict tower above) with correct dims
    report["perturbed_tower_defined"] = True

    # iv) the cycle formulas, as germs at p
    slice1 = tower_f.aggregate_delta(1).intersect_hypersurface(g, rng)
    lhs0 = tower_h.aggregate_delta(0).coefficient_at_point(point)
    rhs0 = (tower_f.aggregate_delta(0).coefficient_at_point(point)
            + j * slice1.coefficient_at_point(point))
    identities = {"delta_0": lhs0 == rhs0}
    details = {"delta_0": {"lhs": lhs0, "rhs": rhs0}}
    for i in range(1, n):
        lhs = tower_h.aggregate_delta(i).through_point(point)
        rhs = (tower_f.aggregate_delta(i + 1).intersect_hypersurface(g, rng)
               .through_point(point)) * j
        identities[f"delta_{i}"] = (lhs == rhs)
    report["identities"] = identities
    report["identity_details"] = details
    report["identities_hold"] = all(identities.values())
    report["all_hold"] = (sets_equal and report["identities_hold"]
                          and report.get("dimension_drop") in (None, True))
    return report


def liv_reverse_estimate(f: PolyTuple, g: Polynomial, M: Cycle | None,
                         point, a, j_values, rng=None) -> dict:
    """Tabulate the point count of the perturbed tuple for increasing j and
    certify from which j the formulas must hold.

    Two stopping rules: the direct bound (j strictly larger than the point
    count minus j times the next-level slice) and the occurrence rule (a
    successive difference equal to the slice number more than c times,
    where c counts curve components through p; each exceptional scalar can
    fake the difference at most once per component)."""
    if rng is None:
        rng = random.Random(0)
    if M is None:
        M = default_cycle_m(f.ctx)
    if point is None:
        point = _origin(f.ctx)
    point = tuple(Fraction(v) for v in point)
    a = Fraction(a)
    tower_f = vogel_tower(f, M, mode="strict")
    slice1 = tower_f.aggregate_delta(1).intersect_hypersurface(g, rng)
    step_unit = slice1.coefficient_at_point(point)
    c_count = len(tower_f.aggregate_pi_hat(1).through_point(point).terms)

    rows = []
    prev = None
    j_values = sorted(j_values)
    for j in j_values:
        inst = LivInstance(f, g, a, j, M, point)
        h = inst.perturbed_tuple()
        tower_h = vogel_tower(h, M, mode="strict")
        val = tower_h.aggregate_delta(0).coefficient_at_point(point)
        row = {"j": j, "delta0_h_at_p": val}
        if prev is not None:
            jstep = j - prev["j"]
            row["diff"] = val - prev["delta0_h_at_p"]
            row["flag"] = (row["diff"] == jstep * step_unit)
        bound_ok = j > val - j * step_unit
        row["bound_certified"] = bound_ok
        rows.append(row)
        prev = row

    bound_j = next((r["j"] for r in rows if r["bound_certified"]), None)
    occurrences = 0
    occurrence_j = None
    for r in rows:
        if r.get("flag"):
            occurrences += 1
            if occurrences > c_count and occurrence_j is None:
                occurrence_j = r["j"]
    certified = [j for j in (bound_j, occurrence_j) if j is not None]
    return {"rows": rows, "slice_number": step_unit, "curve_count": c_count,
            "bound_certified_from": bound_j,
            "occurrence_certified_from": occurrence_j,
            "certified_from": min(certified) if certified else None}


def cylinder_check(f: PolyTuple, M: Cycle | None = None, a=1, j: int = 1,
                   point=None, rng=None) -> dict:
    """Cross with a line, perturb by a power of the new coordinate, and
    verify that every inductive level of the product tower is the product
    level sliced by the perturbed hypersurface."""
    if rng is None:
        rng = random.Random(0)
    if M is None:
        M = default_cycle_m(f.ctx)
    if point is None:
        point = _origin(f.ctx)
    a = Fraction(a)
    if a == 0:
        raise ProblemSpecError("the scalar a must be non-zero")
    if j < 1:
        raise ProblemSpecError("the exponent j must be at least 1")
    ctx = f.ctx
    tname = ctx.fresh_name("t")
    ext = ctx.extended([tname], prepend=True)
    mapping = [i + 1 for i in range(ctx.nvars)]
    t = Polynomial.variable(ext, tname)
    n = f.k
    lifted = [g.embed(ext, mapping) for g in f.entries]
    perturbed = lifted[0] + t ** j * a
    h = PolyTuple(ext, (t ** j,) + tuple(lifted[1:]) + (perturbed,))

    ext_terms = []
    for mult, comp in M.terms:
        ext_terms.append((mult, PrimeComponent(comp.prime.embed(ext, mapping),
                                               comp.dim + 1)))
    M_ext = Cycle(ext, tuple(ext_terms))
    ext_point = (Fraction(0),) + tuple(Fraction(v) for v in point)

    tower_f = vogel_tower(f, M, mode="strict")
    tower_h = vogel_tower(h, M_ext, mode="strict")

    levels = {}
    ok = True
    for i in range(0, n + 2):
        lhs = tower_h.aggregate_pi_hat(i)
        pif = tower_f.aggregate_pi_hat(i) if i <= n + 1 else Cycle.zero(ctx)
        lifted_cycle = Cycle(ext, tuple(
            (m, PrimeComponent(c.prime.embed(ext, mapping), c.dim + 1))
            for m, c in pif.terms))
        rhs = (lifted_cycle.intersect_hypersurface(perturbed, rng)
               if not lifted_cycle.is_zero else Cycle.zero(ext))
        equal_global = (lhs == rhs)
        equal_germ = (lhs.through_point(ext_point) == rhs.through_point(ext_point))
        levels[i] = {"equal": equal_global, "equal_at_p": equal_germ}
        ok &= equal_global
    return {"levels": levels, "all_equal": ok,
            "perturbed_tower_defined": True,
            "new_variable": tname}
