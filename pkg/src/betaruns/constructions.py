"""Schedules and digit-stream generators for the two point constructions.

The "ep" construction concatenates blocks of full words that start with
digit 1, separated by long zero tails, along a sparse index sequence; a
seeded generator samples one point of the resulting Cantor-type set.
The "u" construction starts from an arbitrary admissible prefix, pads
with zeros, then alternates a sparse block (one 1, then zeros) with a
dense block (repeated full spacers).  Both emit lazily and carry a block
plan, so run lengths at checkpoints can be computed symbolically without
materializing digits; block lengths in the "u" plan grow far beyond
anything materializable.

Index growth is doubly exponential in general, so schedule extension is
guarded by bit-size budgets rather than level counts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import enclosures
from .field import (
    BetaContext,
    BudgetExceededError,
    SpecError,
    certified_compare,
)
from .expansion import RunLengthState, shared_expansion
from .cylinders import (
    InadmissibleWordError,
    enumerate_words,
    follower_value,
    shortest_full_spacer,
)


class InfeasibleScheduleError(RuntimeError):
    """No index sequence satisfies the schedule conditions within the search bound."""


# ---------------------------------------------------------------------------
# Rate functions (the growth targets schedules are searched against).
#
# Comparisons against rationals are exact wherever algebra allows (sqrt,
# rational powers, logs to the base beta, tables); the remaining family
# (n / ln n) has no exact ties, so enclosure refinement always terminates.

class Rate:
    """Monotone increasing rate function with certified comparisons."""

    def describe(self) -> str:
        raise NotImplementedError

    def is_defined(self, n: int) -> bool:
        return n >= 1

    def compare(self, n: int, c: Fraction) -> int:
        """Sign of rate(n) - c, exact."""
        raise NotImplementedError

    def least_at_or_above(self, c: Fraction) -> int | None:
        """Exact inverse: least n >= 1 with rate(n) >= c, where cheap.

        Index sequences grow doubly exponentially under polynomial rates, so
        a generic search over candidates would walk bit-many steps; families
        with an algebraic inverse must provide it."""
        return None

    def _enclosure_raw(self, n: int, bits: int) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    def enclosure(self, n: int, bits: int = 64) -> tuple[Fraction, Fraction]:
        """Rational enclosure of rate(n); nested as bits grows (cached intersection)."""
        cache = getattr(self, "_enclosure_cache", None)
        if cache is None:
            cache = {}
            self._enclosure_cache = cache
        lo, hi = self._enclosure_raw(n, bits)
        old = cache.get(n)
        if old is not None:
            lo, hi = max(lo, old[0]), min(hi, old[1])
        cache[n] = (lo, hi)
        return lo, hi


class SqrtRate(Rate):
    def describe(self) -> str:
        return "sqrt"

    def compare(self, n: int, c: Fraction) -> int:
        if c < 0:
            return 1
        diff = n - c * c
        return (diff > 0) - (diff < 0)

    def least_at_or_above(self, c: Fraction) -> int:
        if c <= 1:
            return 1
        sq = c * c
        return -((-sq.numerator) // sq.denominator)

    def _enclosure_raw(self, n, bits):
        return enclosures.sqrt_enclosure(n, bits)


class PowerRate(Rate):
    def __init__(self, alpha: Fraction):
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise SpecError("power exponent must lie in (0, 1)")
        self.alpha = alpha

    def describe(self) -> str:
        return f"power:{self.alpha}"

    def compare(self, n: int, c: Fraction) -> int:
        if c <= 0:
            return 1 if n >= 1 else 0
        p, q = self.alpha.numerator, self.alpha.denominator
        lhs = n ** p * c.denominator ** q
        rhs = c.numerator ** q
        return (lhs > rhs) - (lhs < rhs)

    def least_at_or_above(self, c: Fraction) -> int:
        if c <= 1:
            return 1
        p, q = self.alpha.numerator, self.alpha.denominator
        guess = enclosures.int_nth_root(c.numerator ** q // c.denominator ** q, p)
        while self.compare(guess, c) < 0:
            guess += 1
        while guess > 1 and self.compare(guess - 1, c) >= 0:
            guess -= 1
        return guess

    def _enclosure_raw(self, n, bits):
        return enclosures.nth_root_dyadic(n, self.alpha.numerator, self.alpha.denominator, bits)


class LogBaseRate(Rate):
    """log base beta; ties against rationals reduce to exact power comparisons."""

    _EXPONENT_CAP = 5_000  # beta**a grows linearly in bits with a

    def __init__(self, ctx: BetaContext):
        self.ctx = ctx
        self._pow_cache: dict[int, object] = {}

    def describe(self) -> str:
        return "logbeta"

    def _beta_power(self, a: int):
        cached = self._pow_cache.get(a)
        if cached is None:
            cached = self.ctx.beta ** a
            self._pow_cache[a] = cached
        return cached

    def compare(self, n: int, c: Fraction) -> int:
        a, b = c.numerator, c.denominator
        if a < 0:
            return 1  # log >= 0 > c for n >= 1
        if a > self._EXPONENT_CAP or b * n.bit_length() > 10_000_000:
            raise BudgetExceededError("log comparison exponent too large")
        lhs = self.ctx.lift(n ** b)
        return certified_compare(lhs, self._beta_power(a))

    def _enclosure_raw(self, n, bits):
        beta_iv = self.ctx.refine_to_width(Fraction(1, 2 ** (bits + 8)))
        return enclosures.log_base_enclosure(n, beta_iv, bits)


class LinearOverLogRate(Rate):
    """n / ln n, defined for n >= 2; never rational at integer arguments."""

    def describe(self) -> str:
        return "linear-over-log"

    def is_defined(self, n: int) -> bool:
        return n >= 2

    def compare(self, n: int, c: Fraction) -> int:
        if c <= 0:
            return 1
        bits = 64
        while bits <= 1 << 16:
            llo, lhi = enclosures.log_enclosure(n, bits)
            if n - c * lhi > 0:
                return 1
            if n - c * llo < 0:
                return -1
            bits *= 2
        raise ArithmeticError("n/ln n comparison did not resolve")

    def _enclosure_raw(self, n, bits):
        llo, lhi = enclosures.log_enclosure(n, bits + 8)
        return Fraction(n) / lhi, Fraction(n) / llo


class LinearRate(Rate):
    def describe(self) -> str:
        return "linear"

    def compare(self, n: int, c: Fraction) -> int:
        diff = n - c
        return (diff > 0) - (diff < 0)

    def _enclosure_raw(self, n, bits):
        return Fraction(n), Fraction(n)


class TableRate(Rate):
    def __init__(self, table: dict[int, Fraction]):
        if not table:
            raise SpecError("empty rate table")
        items = sorted((int(k), Fraction(v)) for k, v in table.items())
        for (k1, v1), (k2, v2) in zip(items, items[1:]):
            if v2 < v1:
                raise SpecError(f"rate table not monotone at {k2}")
        self.table = dict(items)

    def describe(self) -> str:
        return "table:" + ",".join(f"{k}={v}" for k, v in self.table.items())

    def is_defined(self, n: int) -> bool:
        return n in self.table

    def compare(self, n: int, c: Fraction) -> int:
        v = self.table[n]
        diff = v - c
        return (diff > 0) - (diff < 0)

    def _enclosure_raw(self, n, bits):
        v = self.table[n]
        return v, v


def parse_rate(text: str, ctx: BetaContext) -> Rate:
    text = text.strip()
    if text == "sqrt":
        return SqrtRate()
    if text.startswith("power:"):
        return PowerRate(Fraction(text[len("power:"):]))
    if text in ("logbeta", "log-base-beta", "log_base_beta"):
        return LogBaseRate(ctx)
    if text in ("linear-over-log", "linear_over_log"):
        return LinearOverLogRate()
    if text == "linear":
        return LinearRate()
    if text.startswith("table:"):
        entries = {}
        for item in text[len("table:"):].split(","):
            if not item:
                continue
            k, _, v = item.partition("=")
            entries[int(k)] = Fraction(v)
        return TableRate(entries)
    raise SpecError(f"unknown rate function {text!r}")


def _least_with_rate_at_least(
    rate: Rate, c: Fraction, start: int, *, max_bits: int, search_bound: int
) -> int:
    """Least n >= start with rate(n) >= c; exploits monotonicity."""
    inverse = rate.least_at_or_above(c)
    if inverse is not None:
        n = max(start, inverse)
        if n.bit_length() > max_bits:
            raise BudgetExceededError("schedule index exceeds the bit-size budget")
        return n
    if rate.is_defined(start) and rate.compare(start, c) >= 0:
        return start
    if isinstance(rate, TableRate):
        for n in sorted(rate.table):
            if n >= start and rate.compare(n, c) >= 0:
                return n
        raise InfeasibleScheduleError(f"rate table never reaches {c}")
    hi = start + 1
    steps = 0
    while not (rate.is_defined(hi) and rate.compare(hi, c) >= 0):
        hi *= 2
        if hi.bit_length() > max_bits:
            raise BudgetExceededError("schedule index exceeds the bit-size budget")
        steps += 1
        if steps > search_bound:
            raise InfeasibleScheduleError("rate never reaches the target")
    lo = max(start, hi // 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if rate.is_defined(mid) and rate.compare(mid, c) >= 0:
            hi = mid
        else:
            lo = mid + 1
    return lo


# ---------------------------------------------------------------------------
# Block plans and symbolic run lengths.

@dataclass(frozen=True)
class ZeroBlock:
    length: int


@dataclass(frozen=True)
class WordBlock:
    digits: tuple[int, ...]


@dataclass(frozen=True)
class RepeatBlock:
    unit: tuple[int, ...]
    count: int


Block = ZeroBlock | WordBlock | RepeatBlock


@dataclass(frozen=True)
class BlockStats:
    length: int
    all_zero: bool
    lead: int  # zeros at the start
    tail: int  # zeros at the end
    max_run: int  # longest zero run anywhere inside


_word_stats_cache: dict[tuple[int, ...], BlockStats] = {}


def _word_stats(digits: tuple[int, ...]) -> BlockStats:
    cached = _word_stats_cache.get(digits)
    if cached is not None:
        return cached
    n = len(digits)
    best = run = 0
    lead = -1
    for d in digits:
        if d == 0:
            run += 1
            if run > best:
                best = run
        else:
            if lead < 0:
                lead = run  # zeros before the first nonzero digit
            run = 0
    if lead < 0:
        stats = BlockStats(length=n, all_zero=True, lead=n, tail=n, max_run=n)
    else:
        stats = BlockStats(length=n, all_zero=False, lead=lead, tail=run, max_run=best)
    _word_stats_cache[digits] = stats
    return stats


def block_stats(block: Block) -> BlockStats:
    if isinstance(block, ZeroBlock):
        n = block.length
        return BlockStats(length=n, all_zero=True, lead=n, tail=n, max_run=n)
    if isinstance(block, WordBlock):
        return _word_stats(block.digits)
    u = _word_stats(block.unit)
    total = u.length * block.count
    if u.all_zero:
        return BlockStats(length=total, all_zero=True, lead=total, tail=total, max_run=total)
    max_run = u.max_run if block.count == 1 else max(u.max_run, u.tail + u.lead)
    return BlockStats(length=total, all_zero=False, lead=u.lead, tail=u.tail, max_run=max_run)


def block_length(block: Block) -> int:
    if isinstance(block, ZeroBlock):
        return block.length
    if isinstance(block, WordBlock):
        return len(block.digits)
    return len(block.unit) * block.count


def block_digits(block: Block) -> Iterator[int]:
    if isinstance(block, ZeroBlock):
        for _ in range(block.length):
            yield 0
    elif isinstance(block, WordBlock):
        yield from block.digits
    else:
        for _ in range(block.count):
            yield from block.unit


def plan_digits(plan: Iterable[Block], limit: int | None = None) -> Iterator[int]:
    emitted = 0
    for block in plan:
        for d in block_digits(block):
            if limit is not None and emitted >= limit:
                return
            yield d
            emitted += 1


def symbolic_runlengths(
    plan: Iterable[Block],
    checkpoints: Sequence[int],
    *,
    block_budget: int = 10 ** 7,
) -> dict[int, int]:
    """Maximal zero run of the plan's digit stream at each checkpoint, computed
    from block statistics alone.  Checkpoints must fall on block boundaries."""
    targets = sorted(set(int(c) for c in checkpoints))
    if targets and targets[0] <= 0:
        raise ValueError("checkpoints must be positive")
    out: dict[int, int] = {}
    pos = 0
    trailing = 0
    best = 0
    ti = 0
    seen = 0
    for block in plan:
        if ti >= len(targets):
            break
        st = block_stats(block)
        if st.length == 0:
            continue
        if st.all_zero:
            trailing += st.length
            if trailing > best:
                best = trailing
        else:
            best = max(best, trailing + st.lead, st.max_run)
            trailing = st.tail
        pos += st.length
        seen += 1
        if seen > block_budget:
            raise BudgetExceededError(f"symbolic walk exceeded {block_budget} blocks")
        while ti < len(targets) and targets[ti] == pos:
            out[targets[ti]] = best
            ti += 1
        if ti < len(targets) and targets[ti] < pos:
            raise ValueError(f"checkpoint {targets[ti]} is not on a block boundary")
    if ti < len(targets):
        raise ValueError(f"plan ended at {pos} before checkpoint {targets[ti]}")
    return out


def _materialized_runlengths(
    digits: Iterator[int], checkpoints: Sequence[int]
) -> dict[int, int]:
    targets = sorted(set(checkpoints))
    out: dict[int, int] = {}
    state = RunLengthState()
    ti = 0
    for d in digits:
        state.update(d)
        if state.consumed == targets[ti]:
            out[targets[ti]] = state.r
            ti += 1
            if ti == len(targets):
                break
    if ti < len(targets):
        raise ValueError("digit stream ended before the last checkpoint")
    return out


# ---------------------------------------------------------------------------
# The "ep" schedule and stream.

@dataclass
class EpSchedule:
    """Index sequence and block sizes for the Cantor-type construction.

    n[k-1] is the k-th checkpoint; d[k-1] = floor(ln n_k) is the marker-word
    length at level k; tau[k-1] (k >= 2, tau[0] is None) is how many marker
    words of length d[k-2] the level-k block holds before its zero tail.
    Marker words are the full words of their length that start with digit 1.
    """

    ctx: BetaContext
    p: int
    rate: Rate
    h: int
    n: list[int]
    d: list[int]
    tau: list[int | None]
    enum_budget: int = 2_000_000
    _m_cache: dict[int, tuple[tuple[int, ...], ...]] = field(default_factory=dict, repr=False)

    @property
    def levels(self) -> int:
        return len(self.n)

    def m_words(self, length: int) -> tuple[tuple[int, ...], ...]:
        """All full words of the given length starting with digit 1, lex ordered."""
        cached = self._m_cache.get(length)
        if cached is None:
            cached = full_start_words(self.ctx, length, h=self.h, budget=self.enum_budget)
            self._m_cache[length] = cached
        return cached

    def a(self, k: int) -> int:
        return len(self.m_words(self.d[k - 1]))

    def g(self, k: int) -> int:
        if k == 1:
            return 1
        return self.a(k - 1) ** self.tau[k - 1]

    def b(self, k: int) -> int:
        out = 1
        for i in range(1, k + 1):
            out *= self.g(i)
        return out

    def tail(self, k: int) -> int:
        if k < 2:
            raise ValueError("zero tails exist from level 2 on")
        return self.n[k - 1] - self.n[k - 2] - self.d[k - 2] * self.tau[k - 1]

    def validate(self) -> None:
        def need(cond: bool, what: str) -> None:
            if not cond:
                raise SpecError(f"schedule invariant violated: {what}")

        rate = self.rate
        need(self.n[0] >= enclosures.ceil_exp_int(self.h + 1), "first index too small")
        for k in range(1, self.levels + 1):
            nk = self.n[k - 1]
            need(self.d[k - 1] == enclosures.floor_ln_int(nk), f"block length at level {k}")
            need(self.d[k - 1] > self.h, f"block shorter than the spacer at level {k}")
            need(rate.compare(nk, Fraction(nk)) <= 0, f"rate exceeds the index at level {k}")
            if k >= 2:
                need(rate.compare(nk, Fraction(k * self.n[k - 2])) >= 0, f"rate lag at level {k}")
                need(rate.compare(nk, Fraction(nk, k)) <= 0, f"index/rate gap at level {k}")
                need(self.tau[k - 1] >= 1, f"empty marker block at level {k}")
                need(self.tail(k) >= 0, f"negative zero tail at level {k}")

    def counts_arrays(self):
        """a/g/b per level, None where the enumeration budget stops us."""
        a_arr, g_arr, b_arr = [], [], []
        running: int | None = 1
        for k in range(1, self.levels + 1):
            try:
                a_arr.append(self.a(k))
            except BudgetExceededError:
                a_arr.append(None)
            try:
                gk = self.g(k)
            except BudgetExceededError:
                gk = None
            g_arr.append(gk)
            running = running * gk if (running is not None and gk is not None) else None
            b_arr.append(running)
        return a_arr, g_arr, b_arr

    def to_json_dict(self) -> dict:
        a_arr, g_arr, b_arr = self.counts_arrays()
        as_str = lambda v: None if v is None else str(v)
        return {
            "kind": "ep",
            "beta": self.ctx.describe(),
            "phi": self.rate.describe(),
            "p": self.p,
            "h": self.h,
            "levels": self.levels,
            "n": [str(v) for v in self.n],
            "d": [str(v) for v in self.d],
            "tau": [as_str(v) for v in self.tau],
            "a": [as_str(v) for v in a_arr],
            "g": [as_str(v) for v in g_arr],
            "b": [as_str(v) for v in b_arr],
        }

    @staticmethod
    def from_json_dict(data: dict, ctx: BetaContext) -> "EpSchedule":
        if data.get("kind") != "ep":
            raise SpecError("not an ep schedule file")
        rate = parse_rate(data["phi"], ctx)
        sched = EpSchedule(
            ctx=ctx,
            p=int(data["p"]),
            rate=rate,
            h=int(data["h"]),
            n=[int(v) for v in data["n"]],
            d=[int(v) for v in data["d"]],
            tau=[None if v is None else int(v) for v in data["tau"]],
        )
        sched.validate()
        return sched


def full_start_words(
    ctx: BetaContext, length: int, *, h: int | None = None, budget: int = 2_000_000
) -> tuple[tuple[int, ...], ...]:
    """All full words of the given length that start with digit 1, lex ordered.

    Nonempty whenever length exceeds the shortest full spacer: the spacer
    padded with zeros stays full.
    """
    if h is None:
        h = shortest_full_spacer(ctx)
    if length <= h - 1:
        raise SpecError(f"need length > {h - 1} for a guaranteed nonempty marker set")
    one = ctx.one
    return tuple(
        w for w, R in enumerate_words(ctx, length, budget=budget, prefix=(1,)) if R == one
    )


def build_ep_schedule(
    ctx: BetaContext,
    p: int,
    rate: Rate,
    levels: int,
    *,
    search_bound: int = 1_000_000,
    enum_budget: int = 2_000_000,
    max_bits: int = 1_000_000,
) -> EpSchedule:
    """Greedy minimal index sequence: the first index is the least n at or
    above ceil(e**(h+1)) with rate(n) <= n; each later index is the least n
    with rate(n) >= k * n_(k-1), rate(n) <= n, n >= k * rate(n), and at
    least one marker word per block."""
    if p < 2:
        raise SpecError("p must be at least 2")
    if levels < 1:
        raise SpecError("need at least one level")
    h = shortest_full_spacer(ctx)
    start = enclosures.ceil_exp_int(h + 1)
    n1 = None
    scans = 0
    cand = start
    while n1 is None:
        if scans > search_bound:
            raise InfeasibleScheduleError("no feasible first index within the search bound")
        if rate.is_defined(cand) and rate.compare(cand, Fraction(cand)) <= 0:
            n1 = cand
        else:
            if isinstance(rate, TableRate) and cand > max(rate.table):
                raise InfeasibleScheduleError("rate table exhausted before a feasible first index")
            cand += 1
            scans += 1
    ns = [n1]
    ds = [enclosures.floor_ln_int(n1)]
    taus: list[int | None] = [None]
    frac_p = Fraction(p - 1, p)
    for k in range(2, levels + 1):
        target = Fraction(k * ns[-1])
        cand = _least_with_rate_at_least(
            rate, target, ns[-1] + 1, max_bits=max_bits, search_bound=search_bound
        )
        scans = 0
        while True:
            if scans > search_bound:
                raise InfeasibleScheduleError(f"no feasible index at level {k} within the search bound")
            if cand.bit_length() > max_bits:
                raise BudgetExceededError("schedule index exceeds the bit-size budget")
            ok = (
                rate.is_defined(cand)
                and rate.compare(cand, target) >= 0
                and rate.compare(cand, Fraction(cand)) <= 0
                and rate.compare(cand, Fraction(cand, k)) <= 0
            )
            if ok:
                dk = enclosures.floor_ln_int(cand)
                prev_d = ds[-1]
                if k % 2 == 0:
                    t = (cand - ns[-1]) // prev_d
                else:
                    t = math.floor((frac_p * cand - ns[-1]) / prev_d)
                tail = cand - ns[-1] - prev_d * t
                if t >= 1 and tail >= 0 and dk > h:
                    ns.append(cand)
                    ds.append(dk)
                    taus.append(t)
                    break
            if isinstance(rate, TableRate):
                bigger = [m for m in rate.table if m > cand]
                if not bigger:
                    raise InfeasibleScheduleError("rate table exhausted")
                cand = min(bigger)
            else:
                cand += 1
            scans += 1
    sched = EpSchedule(
        ctx=ctx, p=p, rate=rate, h=h, n=ns, d=ds, tau=taus, enum_budget=enum_budget
    )
    sched.validate()
    return sched


class EpPointStream:
    """One seeded point of the Cantor-type set; deterministic per seed.

    The plan (and therefore the digit stream) is regenerated identically on
    every traversal, so independent walks see the same point.
    """

    def __init__(self, schedule: EpSchedule, seed: int):
        self.schedule = schedule
        self.seed = seed

    def plan(self, max_level: int | None = None) -> Iterator[Block]:
        sched = self.schedule
        levels = sched.levels if max_level is None else min(max_level, sched.levels)
        rng = random.Random(self.seed)
        yield WordBlock((1,))
        if sched.n[0] > 1:
            yield ZeroBlock(sched.n[0] - 1)
        for k in range(2, levels + 1):
            words = sched.m_words(sched.d[k - 2])
            for _ in range(sched.tau[k - 1]):
                yield WordBlock(words[rng.randrange(len(words))])
            tail = sched.tail(k)
            if tail:
                yield ZeroBlock(tail)

    def digits(self, limit: int | None = None) -> Iterator[int]:
        return plan_digits(self.plan(), limit)

    def checkpoints(self) -> list[int]:
        return list(self.schedule.n)


def ep_stream(schedule: EpSchedule, seed: int) -> EpPointStream:
    return EpPointStream(schedule, seed)


# ---------------------------------------------------------------------------
# Checkpoint reports (shared by both constructions).

@dataclass(frozen=True)
class CheckpointRow:
    k: int
    n: int
    r: int
    relation: str  # how r must relate to the bound
    bound: Fraction
    passed: bool
    ratio: tuple[Fraction, Fraction] | None  # enclosure of r / rate(n)
    materialized_match: bool | None  # None when n is beyond materialization


@dataclass(frozen=True)
class CheckpointReport:
    kind: str
    beta: str
    rows: tuple[CheckpointRow, ...]
    ratios: tuple[tuple[int, int, int, tuple[Fraction, Fraction] | None], ...] = ()
    # (k, n_k, r, enclosure of r / rate(n_k)) for every reachable level

    @property
    def all_pass(self) -> bool:
        return all(row.passed for row in self.rows)

    def csv_rows(self) -> list[list[str]]:
        out = [["k", "n", "r", "bound", "pass"]]
        for row in self.rows:
            bound = row.bound
            bound_s = str(bound) if bound.denominator == 1 else f"{bound.numerator}/{bound.denominator}"
            out.append([str(row.k), str(row.n), str(row.r), bound_s, str(row.passed).lower()])
        return out

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "beta": self.beta,
            "all_pass": self.all_pass,
            "rows": [
                {
                    "k": row.k,
                    "n": str(row.n),
                    "r": str(row.r),
                    "relation": row.relation,
                    "bound": str(row.bound),
                    "pass": row.passed,
                    "ratio": None
                    if row.ratio is None
                    else [str(row.ratio[0]), str(row.ratio[1])],
                    "materialized_match": row.materialized_match,
                }
                for row in self.rows
            ],
            "ratios": [
                {
                    "k": k,
                    "n": str(n),
                    "r": str(r),
                    "ratio": None if ratio is None else [str(ratio[0]), str(ratio[1])],
                }
                for k, n, r, ratio in self.ratios
            ],
        }


def _ratio_enclosure(rate: Rate, n: int, r: int, bits: int = 64):
    try:
        lo, hi = rate.enclosure(n, bits)
    except (BudgetExceededError, OverflowError):
        return None
    if lo <= 0:
        return None
    return (Fraction(r) / hi, Fraction(r) / lo)


def verify_ep_checkpoints(
    stream: EpPointStream,
    j_max: int | None = None,
    *,
    materialize_limit: int = 10 ** 7,
    block_budget: int = 10 ** 7,
) -> CheckpointReport:
    """Check checkpoint pair j = 1..j_max: the even-index run length stays
    below twice the previous index, the odd-index one above n/p.  Ratios
    r / rate(n) are reported for every reachable level, the first included;
    j_max = 0 yields an empty report.  Symbolic and materialized run lengths
    must agree wherever both are available."""
    sched = stream.schedule
    if j_max is None:
        j_max = (sched.levels + 1) // 2
    ks = []
    for j in range(1, j_max + 1):
        for k in (2 * j, 2 * j + 1):
            if k <= sched.levels:
                ks.append(k)
    if not ks and j_max < 1:
        return CheckpointReport(kind="ep", beta=sched.ctx.describe(), rows=())
    top = max(ks) if ks else min(1, sched.levels)
    cps = [sched.n[k - 1] for k in range(1, top + 1)]
    sym = symbolic_runlengths(stream.plan(), cps, block_budget=block_budget)
    reachable = [c for c in cps if c <= materialize_limit]
    mat = _materialized_runlengths(stream.digits(), reachable) if reachable else {}
    for n, r in sym.items():
        if n in mat and mat[n] != r:
            raise RuntimeError(f"symbolic run length {r} != materialized {mat[n]} at n={n}")
    rows = []
    for k in ks:
        nk = sched.n[k - 1]
        r = sym[nk]
        if k % 2 == 1:
            bound = Fraction(nk, sched.p)
            relation = ">"
            passed = r > bound
        else:
            bound = Fraction(2 * sched.n[k - 2])
            relation = "<"
            passed = r < bound
        rows.append(
            CheckpointRow(
                k=k,
                n=nk,
                r=r,
                relation=relation,
                bound=bound,
                passed=passed,
                ratio=_ratio_enclosure(sched.rate, nk, r),
                materialized_match=(mat.get(nk) == r) if nk in mat else None,
            )
        )
    ratios = tuple(
        (k, sched.n[k - 1], sym[sched.n[k - 1]], _ratio_enclosure(sched.rate, sched.n[k - 1], sym[sched.n[k - 1]]))
        for k in range(1, top + 1)
    )
    return CheckpointReport(kind="ep", beta=sched.ctx.describe(), rows=tuple(rows), ratios=ratios)


# ---------------------------------------------------------------------------
# The "u" schedule and stream.

@dataclass
class USchedule:
    """Index sequence for the dense-prefix construction.

    Gaps must exceed max(2h, i + G_i) where G_i is the running maximum of
    tail-zero runs in the expansion of 1, and the rate must have caught up
    with (i-1) * n_(i-1) while staying at most n_i / i.  Indices grow at
    least factorially, so the list extends lazily under a bit-size budget.
    """

    ctx: BetaContext
    rate: Rate
    h: int
    prefix: tuple[int, ...]
    n: list[int] = field(default_factory=list)
    search_bound: int = 1_000_000
    max_bits: int = 1_000_000
    gamma_cap: int = 1_000_000

    def gamma(self, i: int) -> int:
        if i > self.gamma_cap:
            raise BudgetExceededError("tail-run lookups capped; index too deep")
        return shared_expansion(self.ctx).max_tail_run(i)

    def ensure(self, upto: int) -> None:
        while len(self.n) < upto:
            i = len(self.n) + 1
            prev = self.n[-1] if self.n else 0
            gap = max(2 * self.h, i + self.gamma(i))
            base = prev + gap + 1
            target = Fraction((i - 1) * prev)
            cand = _least_with_rate_at_least(
                self.rate, target, base, max_bits=self.max_bits, search_bound=self.search_bound
            )
            scans = 0
            while True:
                if scans > self.search_bound:
                    raise InfeasibleScheduleError(f"no feasible index at position {i}")
                if cand.bit_length() > self.max_bits:
                    raise BudgetExceededError("schedule index exceeds the bit-size budget")
                ok = (
                    self.rate.is_defined(cand)
                    and self.rate.compare(cand, target) >= 0
                    and self.rate.compare(cand, Fraction(cand, i)) <= 0
                )
                if ok:
                    self.n.append(cand)
                    break
                if isinstance(self.rate, TableRate):
                    bigger = [m for m in self.rate.table if m > cand]
                    if not bigger:
                        raise InfeasibleScheduleError("rate table exhausted")
                    cand = min(bigger)
                else:
                    cand += 1
                scans += 1

    def index(self, i: int) -> int:
        self.ensure(i)
        return self.n[i - 1]

    def omega_blocks(self, k: int) -> list[dict]:
        """Descriptors of the 2k alternating blocks appended after the zero pad."""
        self.ensure(3 * k)
        out = []
        for i in range(1, 2 * k + 1):
            delta = self.n[k + i - 1] - self.n[k + i - 2]
            if i % 2 == 1:
                out.append({"i": i, "parity": "odd", "length": delta})
            else:
                reps = delta // self.h
                out.append(
                    {
                        "i": i,
                        "parity": "even",
                        "length": delta,
                        "repetitions": reps,
                        "trailing_zeros": delta - reps * self.h,
                    }
                )
        return out

    def to_json_dict(self, stages: int = 1) -> dict:
        k = len(self.prefix)
        self.ensure(3 * k)
        omegas = self.omega_blocks(k)
        return {
            "kind": "u",
            "beta": self.ctx.describe(),
            "phi": self.rate.describe(),
            "h": self.h,
            "prefix": list(self.prefix),
            "stages": stages,
            "n": [str(v) for v in self.n],
            "omega": [
                {key: (str(val) if isinstance(val, int) and key != "i" else val) for key, val in om.items()}
                for om in omegas
            ],
            "omega_even_interpretation": "floor-repetitions",
        }


def build_u_schedule(
    ctx: BetaContext,
    prefix: Sequence[int],
    rate: Rate,
    *,
    search_bound: int = 1_000_000,
    max_bits: int = 1_000_000,
) -> USchedule:
    prefix = tuple(int(d) for d in prefix)
    if not prefix:
        raise SpecError("prefix must be nonempty")
    if follower_value(ctx, prefix) is None:
        raise InadmissibleWordError("prefix is not admissible")
    h = shortest_full_spacer(ctx)
    sched = USchedule(
        ctx=ctx,
        rate=rate,
        h=h,
        prefix=prefix,
        search_bound=search_bound,
        max_bits=max_bits,
    )
    sched.ensure(3 * len(prefix))
    return sched


class UPointStream:
    """Digit stream of one point of the dense-prefix construction.

    Stage 1 emits the prefix, a zero pad to the prefix-indexed checkpoint,
    then the 2k alternating blocks, ending at index n_(3k).  Each further
    stage restarts the recipe with the emitted word as the new prefix, so the
    point sits inside construction cylinders of unboundedly many orders;
    stage extension beyond the first typically exhausts the bit-size budget.
    """

    def __init__(self, schedule: USchedule, stages: int = 1):
        if stages < 1:
            raise SpecError("need at least one stage")
        self.schedule = schedule
        self.stages = stages

    def stage_prefix_lengths(self) -> list[int]:
        sched = self.schedule
        lengths = [len(sched.prefix)]
        for _ in range(1, self.stages):
            k = lengths[-1]
            sched.ensure(3 * k)
            lengths.append(sched.n[3 * k - 1])
        return lengths

    def plan(self) -> Iterator[Block]:
        sched = self.schedule
        h = sched.h
        spacer = (1,) + (0,) * (h - 1)
        yield WordBlock(sched.prefix)
        k = len(sched.prefix)
        for _ in range(self.stages):
            sched.ensure(3 * k)
            n = sched.n
            pad = n[k - 1] - k
            if pad:
                yield ZeroBlock(pad)
            for i in range(1, 2 * k + 1):
                delta = n[k + i - 1] - n[k + i - 2]
                if i % 2 == 1:
                    yield WordBlock((1,))
                    if delta > 1:
                        yield ZeroBlock(delta - 1)
                else:
                    reps = delta // h
                    rem = delta - reps * h
                    yield RepeatBlock(spacer, reps)
                    if rem:
                        yield ZeroBlock(rem)
            k = n[3 * k - 1]

    def digits(self, limit: int | None = None) -> Iterator[int]:
        return plan_digits(self.plan(), limit)


def u_stream(schedule: USchedule, stages: int = 1) -> UPointStream:
    return UPointStream(schedule, stages)


def verify_u_checkpoints(
    stream: UPointStream,
    stages: int | None = None,
    *,
    materialize_limit: int = 10 ** 7,
    block_budget: int = 10 ** 7,
) -> CheckpointReport:
    """Check the two run-length bounds at the end of each stage: a long run
    by the second-to-last index, and no run past the stated maximum at the
    final index."""
    sched = stream.schedule
    stages = stream.stages if stages is None else min(stages, stream.stages)
    rows = []
    klist = stream.stage_prefix_lengths()[:stages]
    cps = []
    for k in klist:
        sched.ensure(3 * k)
        cps.extend([sched.n[3 * k - 2], sched.n[3 * k - 1]])
    sym = symbolic_runlengths(stream.plan(), cps, block_budget=block_budget)
    reachable = [c for c in cps if c <= materialize_limit]
    mat = _materialized_runlengths(stream.digits(), reachable) if reachable else {}

    def match_of(n: int, r: int):
        if n not in mat:
            return None
        if mat[n] != r:
            raise RuntimeError(f"symbolic run length {r} != materialized {mat[n]} at n={n}")
        return True

    for k in klist:
        n_last = sched.n[3 * k - 1]
        n_prev = sched.n[3 * k - 2]
        n_prev2 = sched.n[3 * k - 3]
        r_prev = sym[n_prev]
        r_last = sym[n_last]
        lower = Fraction(n_prev - n_prev2)
        rows.append(
            CheckpointRow(
                k=k,
                n=n_prev,
                r=r_prev,
                relation=">=",
                bound=lower,
                passed=r_prev >= lower,
                ratio=_ratio_enclosure(sched.rate, n_prev, r_prev),
                materialized_match=match_of(n_prev, r_prev),
            )
        )
        upper = Fraction(max(k + sched.gamma(k), 2 * sched.h, n_prev - n_prev2))
        rows.append(
            CheckpointRow(
                k=k,
                n=n_last,
                r=r_last,
                relation="<=",
                bound=upper,
                passed=r_last <= upper,
                ratio=_ratio_enclosure(sched.rate, n_last, r_last),
                materialized_match=match_of(n_last, r_last),
            )
        )
    return CheckpointReport(kind="u", beta=sched.ctx.describe(), rows=tuple(rows))
