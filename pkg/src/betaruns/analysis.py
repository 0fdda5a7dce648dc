"""Mass assignments on construction cylinders, counting reports, cover
exponents, and Monte Carlo checks of the zero-run growth laws.

Every pass/fail decision here is exact: masses are rationals, counts are
integers, and every logarithm enters only as a certified rational
enclosure.  Floats appear solely in rendered output.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import enclosures
from .field import BetaContext, SpecError
from .expansion import RunLengthState
from .cylinders import census, follower_step
from .constructions import EpPointStream, EpSchedule


class MassAssignment:
    """The uniform-split measure on construction cylinders.

    The level-k cylinder carries mass 1/b_k; between consecutive levels the
    mass drops by a factor of the marker count per completed marker word and
    saturates at the next level's mass past the zero tail.  Sibling masses
    sum exactly to the parent mass at every depth, by construction.
    """

    def __init__(self, schedule: EpSchedule):
        self.schedule = schedule

    def level_mass(self, k: int) -> Fraction:
        if not 1 <= k <= self.schedule.levels:
            raise ValueError(f"level {k} outside 1..{self.schedule.levels}")
        return Fraction(1, self.schedule.b(k))

    def mass_at(self, n: int) -> Fraction:
        sched = self.schedule
        ns = sched.n
        if n < ns[0]:
            raise ValueError(f"mass is defined from depth {ns[0]} on")
        if n == ns[-1]:
            return self.level_mass(sched.levels)
        if n > ns[-1]:
            raise ValueError(f"depth {n} is beyond the schedule (last level at {ns[-1]})")
        k = bisect_right(ns, n)  # ns[k-1] <= n < ns[k]
        step = sched.d[k - 1]
        blocks_done = (n - ns[k - 1]) // step
        if blocks_done >= sched.tau[k]:
            return self.level_mass(k + 1)
        return self.level_mass(k) / (sched.a(k) ** blocks_done)

    def sibling_sum(self, k: int) -> Fraction:
        """Exact sum of the level-k masses over all siblings of one cylinder."""
        return self.level_mass(k) * self.schedule.g(k)


def assign_mass(schedule: EpSchedule) -> MassAssignment:
    return MassAssignment(schedule)


def cover_exponent(
    schedule: EpSchedule, k: int, *, width: Fraction = Fraction(1, 10 ** 6)
) -> tuple[Fraction, Fraction]:
    """Enclosure of log(b_k) / (n_k * log(beta)): the box-counting exponent of
    the level-k cover by b_k cylinders of exact length beta**-n_k."""
    b = schedule.b(k)
    if b == 1:
        return Fraction(0), Fraction(0)
    nk = schedule.n[k - 1]
    bits = 64
    while True:
        beta_iv = schedule.ctx.refine_to_width(Fraction(1, 2 ** (bits + 8)))
        lo, hi = enclosures.log_ratio_enclosure(b, nk, beta_iv, bits)
        if hi - lo <= width:
            return lo, hi
        bits *= 2


@dataclass(frozen=True)
class CountReport:
    k: int
    a: int
    g: int
    b: int
    p_k: Fraction
    bound_floor: int
    bound_ok: bool
    beta_bar: tuple[Fraction, Fraction]  # largest base whose d_k-th power a_k still beats
    cover: tuple[Fraction, Fraction]

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "a": str(self.a),
            "g": str(self.g),
            "b": str(self.b),
            "p_k": str(self.p_k),
            "bound_floor": str(self.bound_floor),
            "bound_ok": self.bound_ok,
            "beta_bar": [str(self.beta_bar[0]), str(self.beta_bar[1])],
            "cover": [str(self.cover[0]), str(self.cover[1])],
        }


def verify_counts(
    schedule: EpSchedule,
    k_max: int | None = None,
    *,
    enum_budget: int = 2_000_000,
    cover_width: Fraction = Fraction(1, 10 ** 6),
) -> list[CountReport]:
    """Exact marker/block/level counts per level, the pigeonhole lower bound
    on the marker count, and the cover exponent with its certified enclosure."""
    sched = schedule
    k_max = sched.levels if k_max is None else min(k_max, sched.levels)
    p = sched.p
    reports = []
    for k in range(1, k_max + 1):
        a = sched.a(k)
        g = sched.g(k)
        b = sched.b(k)
        if k >= 2:
            assert g == sched.a(k - 1) ** sched.tau[k - 1]
            assert b == sched.b(k - 1) * g
        j = k // 2
        odd_sum = sum(sched.n[2 * i - 2] for i in range(1, j + 1))  # n_1 + n_3 + ...
        if k % 2 == 0:
            d_sum = sum(sched.d[i - 1] for i in range(1, 2 * j))
            p_k = sched.n[k - 1] - Fraction(odd_sum, p) - d_sum
        else:
            d_sum = sum(sched.d[i - 1] for i in range(1, 2 * j + 1))
            p_k = Fraction(p - 1, p) * sched.n[k - 1] - Fraction(odd_sum, p) - d_sum
        m = sched.d[k - 1] - sched.h
        count_m = census(sched.ctx, m, budget=enum_budget).count
        bound_floor = count_m // (m + 1)
        reports.append(
            CountReport(
                k=k,
                a=a,
                g=g,
                b=b,
                p_k=p_k,
                bound_floor=bound_floor,
                bound_ok=a >= bound_floor,
                beta_bar=enclosures.nth_root_enclosure(a, sched.d[k - 1]),
                cover=cover_exponent(sched, k, width=cover_width),
            )
        )
    return reports


@dataclass(frozen=True)
class ProfilePoint:
    n: int
    mass: Fraction
    ratio: tuple[Fraction, Fraction]  # enclosure of log(mass) / log(cylinder length)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "mass": str(self.mass),
            "ratio": [str(self.ratio[0]), str(self.ratio[1])],
        }


def local_dimension_profile(
    stream: EpPointStream,
    mass: MassAssignment,
    points: Sequence[int],
    *,
    materialize_limit: int = 10 ** 7,
    width: Fraction = Fraction(1, 2 ** 20),
) -> list[ProfilePoint]:
    """log(mass)/log(length) of the cylinders around the stream's point at the
    requested depths, as certified enclosures.  Depths must be materializable."""
    pts = sorted(set(int(n) for n in points))
    if not pts:
        return []
    if pts[0] < 1:
        raise ValueError("depths are positive")
    if pts[-1] > materialize_limit:
        raise ValueError(f"depth {pts[-1]} is beyond the materialization limit")
    ctx = mass.schedule.ctx
    followers = {}
    R = ctx.one
    pos = 0
    it = stream.digits(pts[-1])
    target_i = 0
    for d in it:
        R = follower_step(R, d)
        if R is None:
            raise RuntimeError("stream emitted an inadmissible digit")
        pos += 1
        if pos == pts[target_i]:
            followers[pos] = R
            target_i += 1
            if target_i == len(pts):
                break
    if target_i < len(pts):
        raise ValueError("stream ended before the deepest requested point")

    out = []
    for n in pts:
        mu = mass.mass_at(n)
        if mu == 1:
            out.append(ProfilePoint(n=n, mass=mu, ratio=(Fraction(0), Fraction(0))))
            continue
        if mu.numerator != 1:
            raise AssertionError("construction masses are unit fractions")
        denom = mu.denominator
        R = followers[n]
        bits = 64
        while True:
            beta_iv = ctx.refine_to_width(Fraction(1, 2 ** (bits + 8)))
            if R == ctx.one:
                lo, hi = enclosures.log_ratio_enclosure(denom, n, beta_iv, bits)
            else:
                r_lo, r_hi = R.enclosure()
                while r_hi - r_lo > Fraction(1, 2 ** (bits // 2)):
                    ctx.refine()
                    r_lo, r_hi = R.enclosure()
                lo, hi = enclosures.profile_ratio_enclosure(denom, n, beta_iv, (r_lo, r_hi), bits)
            if hi - lo <= width:
                out.append(ProfilePoint(n=n, mass=mu, ratio=(lo, hi)))
                break
            bits *= 2
    return out


# ---------------------------------------------------------------------------
# Monte Carlo runs of the zero-run growth laws.

@dataclass(frozen=True)
class MCReport:
    beta: str
    n: int
    samples: int
    seed: int
    mode: str
    r_values: tuple[int, ...]
    log_bounds: tuple[Fraction, Fraction] | None  # enclosure of log_beta(n); None when n == 1
    restarts: tuple[int, ...]
    redraws: int

    def ratio_bounds(self, r: int) -> tuple[Fraction, Fraction] | None:
        if self.log_bounds is None:
            return None
        lo, hi = self.log_bounds
        return Fraction(r) / hi, Fraction(r) / lo

    @property
    def mean_bounds(self) -> tuple[Fraction, Fraction] | None:
        if self.log_bounds is None:
            return None
        total = sum(self.r_values)
        lo, hi = self.log_bounds
        s = len(self.r_values)
        return Fraction(total, s) / hi, Fraction(total, s) / lo

    @property
    def min_bounds(self):
        return self.ratio_bounds(min(self.r_values))

    @property
    def max_bounds(self):
        return self.ratio_bounds(max(self.r_values))

    def mean_in_band(self, band: tuple[Fraction, Fraction]) -> bool:
        mb = self.mean_bounds
        if mb is None:
            return False
        return band[0] <= mb[0] and mb[1] <= band[1]

    def csv_rows(self) -> list[list[str]]:
        rows = [["sample", "r", "ratio_lo", "ratio_hi", "restarts"]]
        for i, r in enumerate(self.r_values):
            rb = self.ratio_bounds(r)
            lo_s, hi_s = ("undefined", "undefined") if rb is None else (str(rb[0]), str(rb[1]))
            restarts = str(self.restarts[i]) if self.restarts else "0"
            rows.append([str(i), str(r), lo_s, hi_s, restarts])
        return rows

    def to_json_dict(self) -> dict:
        def pair(p):
            return None if p is None else [str(p[0]), str(p[1])]

        return {
            "beta": self.beta,
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "mode": self.mode,
            "r": [str(r) for r in self.r_values],
            "log_beta_n": pair(self.log_bounds),
            "ratio_mean": pair(self.mean_bounds),
            "ratio_min": pair(self.min_bounds),
            "ratio_max": pair(self.max_bounds),
            "restarts": list(self.restarts),
            "redraws": self.redraws,
        }


def _direct_bits_run(seed: int, index: int, n: int) -> int:
    rng = np.random.default_rng([seed, index])
    bits = rng.integers(0, 2, size=n, dtype=np.uint8)
    ones = np.flatnonzero(bits)
    if ones.size == 0:
        return n
    gaps = np.diff(np.concatenate(([-1], ones, [n])))
    return int(gaps.max()) - 1


class _Uncertifiable(Exception):
    pass


def _beta_dyadic(ctx: BetaContext, prec: int) -> tuple[int, int]:
    lo, hi = ctx.refine_to_width(Fraction(1, 1 << prec))
    blo = (lo.numerator << prec) // lo.denominator
    bhi = -((-hi.numerator << prec) // hi.denominator)
    return blo, bhi


def _certified_digit_run(ctx: BetaContext, x_num: int, x_bits: int, n: int) -> tuple[int, int]:
    """(max zero run of the first n digits, restarts used) for x = x_num/2**x_bits.

    Interval iteration at fixed precision: the orbit is enclosed in a dyadic
    interval whose width grows by one base-factor per digit, so the starting
    precision leaves ~2**-64 of slack at digit n; an ambiguous integer part
    restarts the whole sample at doubled precision.
    """
    restarts = 0
    prec = x_bits
    while True:
        blo, bhi = _beta_dyadic(ctx, prec)
        one = 1 << prec
        lo = hi = x_num << (prec - x_bits)
        state = RunLengthState()
        ok = True
        for _ in range(n):
            plo = (lo * blo) >> prec
            phi = -((-(hi * bhi)) >> prec)
            clo = -((-plo) >> prec)
            chi = -((-phi) >> prec)
            if clo != chi:
                ok = False
                break
            digit = clo - 1
            state.update(digit)
            off = (clo - 1) << prec
            lo = max(plo - off, 0)
            hi = min(phi - off, one)
        if ok:
            return state.r, restarts
        restarts += 1
        prec *= 2
        if restarts > 8:
            raise _Uncertifiable("integer part stayed ambiguous after 8 restarts")


def _exact_mode_run(ctx: BetaContext, seed: int, index: int, n: int, prec0: int):
    rng = random.Random(f"betaruns-mc:{seed}:{index}")
    redraws = 0
    while True:
        x_num = rng.getrandbits(prec0)
        if x_num == 0:
            redraws += 1
            continue
        try:
            r, restarts = _certified_digit_run(ctx, x_num, prec0, n)
            return r, restarts, redraws
        except _Uncertifiable:
            redraws += 1
            if redraws > 4:
                raise


def mc_law(
    ctx: BetaContext,
    n: int,
    samples: int,
    seed: int,
    mode: str,
    *,
    log_bits: int = 64,
) -> MCReport:
    """Sampled r_n / log_beta(n) ratios for uniformly drawn points.

    "direct-bits" draws fair coin digits directly and is valid only for base
    2, where the digits of a uniform point are exactly that.  "exact" samples
    a dyadic rational at enough precision to certify n digits and iterates a
    dyadic interval enclosure of the orbit.
    """
    if n < 1:
        raise SpecError("need at least one digit")
    if samples < 1:
        raise SpecError("need at least one sample")
    if mode == "direct-bits":
        if not (ctx.degree == 1 and ctx.enclosure()[0] == 2):
            raise SpecError("direct-bits mode is only valid for base 2")
        r_values = tuple(_direct_bits_run(seed, i, n) for i in range(samples))
        restarts = tuple(0 for _ in range(samples))
        redraws = 0
    elif mode == "exact":
        lo2, hi2 = enclosures.log2_enclosure(ctx.refine_to_width(Fraction(1, 2 ** 32)))
        prec0 = int(math.ceil(n * hi2)) + 64
        rs = []
        starts = []
        redraws = 0
        for i in range(samples):
            r, restart, redrawn = _exact_mode_run(ctx, seed, i, n, prec0)
            rs.append(r)
            starts.append(restart)
            redraws += redrawn
        r_values = tuple(rs)
        restarts = tuple(starts)
    else:
        raise SpecError(f"unknown mode {mode!r}")

    if n == 1:
        log_bounds = None
    else:
        beta_iv = ctx.refine_to_width(Fraction(1, 2 ** (log_bits + 8)))
        log_bounds = enclosures.log_base_enclosure(n, beta_iv, log_bits)
    return MCReport(
        beta=ctx.describe(),
        n=n,
        samples=samples,
        seed=seed,
        mode=mode,
        r_values=r_values,
        log_bounds=log_bounds,
        restarts=restarts,
        redraws=redraws,
    )
