"""Blow-up along an ordered tuple, chartwise exceptional divisor cycles,
and the push-forward comparison against the tower.

The projective factor is handled on affine charts {w_j != 0}; chart j
carries coordinates w_i/w_j for i != j.  A component found in chart j is
counted once, namely in the first chart where it is visible (it must be
contained in {w_i = 0} for every earlier chart i).  Push-forward degrees
are measured by random-rational-fiber lengths with a two-probe agreement
certificate.
"""

from __future__ import annotations

import random

from .cycles import Cycle, cycle_of_scheme
from .decompose import (PrimeComponent, dimension, minimal_primes,
                        quotient_dimension, whole_space)
from .errors import (FiberDegreeDisagreement, NotZeroDimensional,
                     ProblemSpecError, VogelError)
from .groebner import Ideal, eliminate
from .ideal_ops import intersect_many
from .decompose import SLICE_COEFF_BOUND
from .poly import Polynomial, VariableContext
from .vogel import (PolyTuple, default_cycle_m, reorganize, validate_cycle_m,
                    vogel_tower)


class BlowupChart:
    """One affine chart of the blow-up over a fixed component."""

    __slots__ = ("index", "ctx", "chart_vars", "total", "total_cycle",
                 "exceptional", "skipped")

    def __init__(self, index, ctx, chart_vars, total, total_cycle,
                 exceptional, skipped=False):
        self.index = index
        self.ctx = ctx
        self.chart_vars = chart_vars  # name of w_i/w_j for every i != j
        self.total = total
        self.total_cycle = total_cycle
        self.exceptional = exceptional
        self.skipped = skipped


def _chart_prefix(ctx: VariableContext, k: int) -> str:
    for prefix in ("w", "W", "ww", "cw"):
        if all(f"{prefix}{i}" not in ctx.index for i in range(k + 1)):
            return prefix
    raise ProblemSpecError("could not find fresh chart variable names")


def blowup_charts(f: PolyTuple, component: PrimeComponent | None = None,
                  rng=None):
    """All k+1 affine charts of the blow-up of the component along f."""
    if rng is None:
        rng = random.Random(0)
    ctx = f.ctx
    comp = component if component is not None else whole_space(ctx)
    P = comp.prime
    if all(P.contains(g) for g in f.entries):
        raise ProblemSpecError("the tuple vanishes identically on the component")
    k = f.k
    prefix = _chart_prefix(ctx, k)
    from .ideal_ops import saturate
    charts = []
    for j in range(k + 1):
        names = {i: f"{prefix}{i}" for i in range(k + 1) if i != j}
        ext = ctx.extended([names[i] for i in sorted(names)])
        mapping = list(range(ctx.nvars))
        gens = [g.embed(ext, mapping) for g in P.gens]
        fj = f.entries[j].embed(ext, mapping)
        for i in sorted(names):
            wi = Polynomial.variable(ext, names[i])
            gens.append(f.entries[i].embed(ext, mapping) - wi * fj)
        total = saturate(Ideal(ext, gens), Ideal(ext, (fj,)))
        if total.is_unit:
            charts.append(BlowupChart(j, ext, names, total, Cycle.zero(ext),
                                      Cycle.zero(ext)))
            continue
        total_cycle = cycle_of_scheme(total, rng)
        try:
            exceptional = total_cycle.intersect_hypersurface(fj, rng)
            skipped = False
        except VogelError:
            exceptional = None
            skipped = True
        charts.append(BlowupChart(j, ext, names, total, total_cycle,
                                  exceptional, skipped))
    return charts


def proper_flag_check(charts, m: int, which: str = "exceptional") -> bool:
    """True when cutting by the coordinate flag {w_{m+1} = ... = w_k = 0}
    drops the dimension of the chosen cycle by exactly k-m wherever the
    intersection is non-empty."""
    k = max(c.index for c in charts)
    for chart in charts:
        if chart.index > m:
            continue  # the flag misses this chart entirely
        cyc = chart.exceptional if which == "exceptional" else chart.total_cycle
        if cyc is None or cyc.is_zero:
            continue
        flag_gens = [Polynomial.variable(chart.ctx, chart.chart_vars[i])
                     for i in range(m + 1, k + 1)]
        for _, comp in cyc.terms:
            cut = comp.prime.plus(flag_gens)
            d = dimension(cut)
            if d is None:
                continue
            if d != comp.dim - (k - m):
                return False
    return True


def _push_degree(prime_ext: Ideal, image: Ideal, base_ctx, ext_ctx, rng):
    e = dimension(image)
    if e is None:
        raise VogelError("push-forward image is empty")
    mapping = [ext_ctx.index[n] for n in base_ctx.names]
    attempts = []
    for _ in range(4):
        forms = []
        for _ in range(e):
            p = Polynomial.constant(base_ctx, rng.randint(-SLICE_COEFF_BOUND, SLICE_COEFF_BOUND))
            for name in base_ctx.names:
                p = p + Polynomial.variable(base_ctx, name) * rng.randint(
                    -SLICE_COEFF_BOUND, SLICE_COEFF_BOUND)
            forms.append(p)
        try:
            bot = quotient_dimension(image.plus(forms))
            top = quotient_dimension(prime_ext.plus(
                [p.embed(ext_ctx, mapping) for p in forms]))
        except NotZeroDimensional:
            continue
        if bot <= 0 or top <= 0 or top % bot:
            continue
        attempts.append(top // bot)
        if len(attempts) == 2:
            if attempts[0] == attempts[1]:
                return attempts[0]
            attempts = [attempts[1]]
    raise FiberDegreeDisagreement(
        "two independent fiber probes kept disagreeing")


def push_forward_component(prime_ext: Ideal, base_ctx: VariableContext, rng):
    """Proper push-forward of one prime component: (degree, image component)
    or None when the fibers are positive-dimensional."""
    image = eliminate(prime_ext, base_ctx.names).contract(base_ctx)
    d_up = dimension(prime_ext)
    d_down = dimension(image)
    if d_down is None or d_down < d_up:
        return None
    deg = _push_degree(prime_ext, image, base_ctx, prime_ext.ctx, rng)
    return deg, PrimeComponent(image, d_down)


def _owned(comp: PrimeComponent, chart: BlowupChart) -> bool:
    for i in range(chart.index):
        wi = Polynomial.variable(chart.ctx, chart.chart_vars[i])
        if not comp.prime.contains(wi):
            return False
    return True


def _cut_snapshots(chart: BlowupChart, cycle: Cycle, k: int, f_embedded,
                   rng):
    """Cut a chart cycle by the flag hyperplanes one at a time.

    Returns (snapshots, trouble) where snapshots[m] is the cycle over the
    flag {w_{m+1} = ... = w_k = 0} and trouble[m] flags an improper step
    whose offending component meets the zero set of the tuple."""
    snapshots = {k: cycle}
    trouble = {}
    acc = cycle
    for l in range(k, 0, -1):
        if acc.is_zero:
            snapshots[l - 1] = acc
            continue
        if l == chart.index:
            acc = Cycle.zero(chart.ctx)
            snapshots[l - 1] = acc
            continue
        wl = Polynomial.variable(chart.ctx, chart.chart_vars[l])
        proper_part = []
        for m, c in acc.terms:
            if c.prime.contains(wl):
                if not c.prime.plus(f_embedded).is_unit:
                    trouble[l - 1] = c
            else:
                proper_part.append((m, c))
        acc = Cycle(chart.ctx, tuple(proper_part)).intersect_hypersurface(wl, rng)
        snapshots[l - 1] = acc
    return snapshots, trouble


def segre_vogel_check(f: PolyTuple, M: Cycle | None = None, seed: int = 0,
                      auto_reorganize: bool = False,
                      max_retries: int = 32) -> dict:
    """Compare flag-cut, pushed-forward blow-up and exceptional cycles with
    the tower, level by level.

    Requires every component of M to have the same dimension.  When the
    exceptional cycle meets some coordinate flag improperly the affected
    levels are reported as hypothesis failures; with auto_reorganize the
    tuple is redrawn (seeded) until the flags behave."""
    if M is None:
        M = default_cycle_m(f.ctx)
    validate_cycle_m(M)
    dims = {c.dim for _, c in M.terms}
    if len(dims) != 1:
        raise ProblemSpecError("all components of the weight cycle must share a dimension")
    d = dims.pop()
    ctx = f.ctx
    k = f.k
    rng = random.Random(seed)
    current = f
    reorganization = None
    attempts = 0
    while True:
        all_charts = {}
        for mult, comp in M.terms:
            all_charts[comp.key()] = (mult, comp, blowup_charts(current, comp, rng))
        flags_ok = all(
            proper_flag_check(charts, m)
            for m in range(0, k + 1)
            for _, _, charts in all_charts.values())
        if flags_ok or not auto_reorganize:
            break
        attempts += 1
        if attempts > max_retries:
            from .errors import ReorganizationBudgetExhausted
            raise ReorganizationBudgetExhausted(
                "no reorganization made the flag intersections proper")
        current, reorganization = reorganize(f, M, seed=rng.randrange(1 << 30),
                                             max_retries=max_retries)

    tower = vogel_tower(current, M, mode="strict", seed=seed)
    f_window = Ideal(ctx, list(current.entries))

    # cut every chart cycle by the flag hyperplanes once, snapshot per flag
    chart_cuts = []
    for mult, comp, charts in all_charts.values():
        for chart in charts:
            f_emb = [g.embed(chart.ctx) for g in current.entries]
            if chart.exceptional is None:
                chart_cuts.append((mult, chart, None, {}, None, {}, f_emb))
                continue
            esnap, etrouble = _cut_snapshots(chart, chart.exceptional, k,
                                             f_emb, rng)
            bsnap, btrouble = _cut_snapshots(chart, chart.total_cycle, k,
                                             f_emb, rng)
            chart_cuts.append((mult, chart, esnap, etrouble, bsnap, btrouble,
                               f_emb))

    levels = {}
    overall = True
    for i in range(d - (k + 1), d):
        m = i + k + 1 - d
        pushed_delta = Cycle.zero(ctx)
        pushed_pi = Cycle.zero(ctx)
        hypothesis_ok = True
        improper_bl_near_vf = False
        for mult, chart, esnap, etrouble, bsnap, btrouble, f_emb in chart_cuts:
            if esnap is None:
                hypothesis_ok = False
                continue
            if any(mm >= m for mm in etrouble):
                hypothesis_ok = False
            if any(mm >= m for mm in btrouble):
                improper_bl_near_vf = True
            for cyc, target in ((esnap.get(m), "delta"), (bsnap.get(m), "pi")):
                if cyc is None:
                    continue
                for mult2, c in cyc.terms:
                    if not _owned(c, chart):
                        continue
                    if c.prime.plus(f_emb).is_unit:
                        continue  # away from the zero set: outside the window
                    pushed = push_forward_component(c.prime, ctx, rng)
                    if pushed is None:
                        continue
                    deg, image = pushed
                    contrib = Cycle.of_component(image, mult * mult2 * deg)
                    if target == "delta":
                        pushed_delta = pushed_delta + contrib
                    else:
                        pushed_pi = pushed_pi + contrib
        tower_delta = tower.aggregate_delta(i).meeting(f_window)
        tower_pi = tower.aggregate_pi_hat(i + 1).meeting(f_window)
        entry = {"i": i, "flag_m": m, "hypothesis_ok": hypothesis_ok,
                 "blowup_proper_near_zero_set": not improper_bl_near_vf}
        if hypothesis_ok:
            entry["delta_matches"] = (pushed_delta == tower_delta)
            entry["pi_hat_matches"] = (pushed_pi == tower_pi)
            entry["pushed_delta"] = pushed_delta
            entry["pushed_pi_hat"] = pushed_pi
            entry["tower_delta"] = tower_delta
            entry["tower_pi_hat"] = tower_pi
            overall &= entry["delta_matches"] and entry["pi_hat_matches"]
        else:
            overall = False
        levels[i] = entry
    return {"levels": levels, "all_match": overall, "seed": seed,
            "reorganization": reorganization,
            "tuple": [str(g) for g in current.entries]}
