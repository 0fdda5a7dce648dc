"""Digit streams of the beta-expansion, the expansion of 1, and zero-run
statistics.

The transformation used throughout maps (0, 1] into itself:
T(x) = beta*x - ceil(beta*x) + 1, with digits ceil(beta*T^(n-1) x) - 1.
Every orbit value is kept as an exact field element; there is no floating
shortcut here.  The expansion of 0 is the all-zero stream by convention.

DigitStream and RunLengthState are single-owner mutable cursors; everything
else is immutable.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .field import (
    BetaContext,
    BudgetExceededError,
    ExactReal,
    certified_ceil,
)


class DigitWord:
    """A finite word over the context's digit alphabet."""

    __slots__ = ("ctx", "digits")

    def __init__(self, ctx: BetaContext, digits: Iterable[int]):
        ds = tuple(int(d) for d in digits)
        top = ctx.alphabet_top
        for d in ds:
            if not 0 <= d <= top:
                raise ValueError(f"digit {d} outside alphabet 0..{top}")
        self.ctx = ctx
        self.digits = ds

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    def __eq__(self, other):
        return (
            isinstance(other, DigitWord)
            and other.ctx is self.ctx
            and other.digits == self.digits
        )

    def __hash__(self):
        return hash((id(self.ctx), self.digits))

    def __add__(self, other: "DigitWord") -> "DigitWord":
        if other.ctx is not self.ctx:
            raise ValueError("cannot concatenate words from different contexts")
        return DigitWord(self.ctx, self.digits + other.digits)

    def serialize(self) -> str:
        return ",".join(str(d) for d in self.digits)

    @staticmethod
    def parse(ctx: BetaContext, text: str) -> "DigitWord":
        text = text.strip()
        if not text:
            return DigitWord(ctx, ())
        return DigitWord(ctx, (int(part) for part in text.split(",")))

    def __repr__(self):
        return f"DigitWord({self.serialize() or 'empty'})"


def beta_transform(x: ExactReal) -> ExactReal:
    """One step of the orbit map; requires 0 < x <= 1 exactly."""
    ctx = x.ctx
    if not (x.compare(0) > 0 and x.compare(1) <= 0):
        raise ValueError("orbit map is only defined on (0, 1]")
    bx = ctx.beta * x
    return bx - certified_ceil(bx) + 1


class DigitStream:
    """Lazy digit cursor for one point; not safe to share between consumers."""

    def __init__(self, x: ExactReal):
        ctx = x.ctx
        if x.compare(0) < 0 or x.compare(1) > 0:
            raise ValueError("expansions are defined on [0, 1]")
        self.ctx = ctx
        self.position = 0
        self._is_zero = x.is_zero
        self.orbit = x  # current T^n x; stays 0 for the zero stream

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        if self._is_zero:
            self.position += 1
            return 0
        bx = self.ctx.beta * self.orbit
        digit = certified_ceil(bx) - 1
        nxt = bx - digit
        if not (nxt.compare(0) > 0 and nxt.compare(1) <= 0):
            raise ArithmeticError("orbit left (0, 1]; broken minimality contract?")
        self.orbit = nxt
        self.position += 1
        return digit

    def take(self, n: int) -> list[int]:
        return [next(self) for _ in range(n)]


def digit_stream(x: ExactReal) -> DigitStream:
    return DigitStream(x)


def evaluate(ctx: BetaContext, digits: Sequence[int]) -> ExactReal:
    """Exact partial sum sum_i digits[i] * beta**-(i+1)."""
    acc = ctx.zero
    inv = ctx.beta_inv
    for d in reversed(list(digits)):
        acc = (acc + d) * inv
    return acc


class ExpansionOfOne:
    """Cached digits of the expansion of 1, with tail-zero runs and their
    running maxima.

    Tail-run queries read ahead until the next nonzero digit; the read-ahead
    is capped (default 10**6 digits past the query point) because the next
    nonzero digit, though guaranteed to exist, may be far away.
    """

    def __init__(self, ctx: BetaContext, read_ahead_cap: int = 10 ** 6):
        self.ctx = ctx
        self.read_ahead_cap = read_ahead_cap
        self._digits: list[int] = []
        self._stream = DigitStream(ctx.one)
        self._tail_runs: dict[int, int] = {}
        self._max_tail: list[int] = []  # _max_tail[i] = max tail run over 1..i+1

    def ensure(self, n: int) -> None:
        while len(self._digits) < n:
            self._digits.append(next(self._stream))

    def digit(self, i: int) -> int:
        """1-based digit of the expansion of 1."""
        if i < 1:
            raise ValueError("digit positions are 1-based")
        self.ensure(i)
        return self._digits[i - 1]

    def prefix(self, n: int) -> tuple[int, ...]:
        self.ensure(n)
        return tuple(self._digits[:n])

    def tail_zero_run(self, n: int) -> int:
        """Number of consecutive zero digits immediately after position n."""
        if n < 1:
            raise ValueError("positions are 1-based")
        cached = self._tail_runs.get(n)
        if cached is not None:
            return cached
        k = 0
        while True:
            if k > self.read_ahead_cap:
                raise BudgetExceededError(
                    f"no nonzero digit within {self.read_ahead_cap} positions after {n}"
                )
            if self.digit(n + k + 1) != 0:
                break
            k += 1
        self._tail_runs[n] = k
        return k

    def max_tail_run(self, n: int) -> int:
        """Largest tail-zero run over positions 1..n; nondecreasing in n."""
        if n < 1:
            raise ValueError("positions are 1-based")
        while len(self._max_tail) < n:
            i = len(self._max_tail) + 1
            t = self.tail_zero_run(i)
            prev = self._max_tail[-1] if self._max_tail else 0
            self._max_tail.append(max(prev, t))
        return self._max_tail[n - 1]


def expansion_of_one(ctx: BetaContext, n: int, read_ahead_cap: int = 10 ** 6) -> ExpansionOfOne:
    """Expansion-of-1 cache preloaded with the first n digits."""
    if n < 1:
        raise ValueError("need at least one digit")
    exp = shared_expansion(ctx)
    exp.read_ahead_cap = max(exp.read_ahead_cap, read_ahead_cap)
    exp.ensure(n)
    return exp


def shared_expansion(ctx: BetaContext) -> ExpansionOfOne:
    """Per-context cached ExpansionOfOne (the digits never change)."""
    cached = getattr(ctx, "_expansion_of_one", None)
    if cached is None:
        cached = ExpansionOfOne(ctx)
        ctx._expansion_of_one = cached
    return cached


class RunLengthState:
    """Streaming maximal-zero-run tracker; O(1) per digit."""

    __slots__ = ("consumed", "trailing", "best")

    def __init__(self):
        self.consumed = 0
        self.trailing = 0
        self.best = 0

    def update(self, digit: int) -> None:
        self.consumed += 1
        if digit == 0:
            self.trailing += 1
            if self.trailing > self.best:
                self.best = self.trailing
        else:
            self.trailing = 0

    def feed_zeros(self, count: int) -> None:
        if count <= 0:
            return
        self.consumed += count
        self.trailing += count
        if self.trailing > self.best:
            self.best = self.trailing

    @property
    def r(self) -> int:
        return self.best

    def copy(self) -> "RunLengthState":
        s = RunLengthState()
        s.consumed, s.trailing, s.best = self.consumed, self.trailing, self.best
        return s


def run_length(digits: Iterable[int], n: int | None = None) -> int:
    """Maximal length of a zero run among the first n digits (all, if n is None)."""
    state = RunLengthState()
    for d in digits:
        state.update(d)
        if n is not None and state.consumed >= n:
            break
    if n is not None and state.consumed < n:
        raise ValueError(f"digit source ended at {state.consumed} < n = {n}")
    return state.r
