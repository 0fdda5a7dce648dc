"""Admissible words, cylinder geometry, and the full-word calculus.

Two independent admissibility oracles live here:

* the lexicographic criterion (Parry): every shifted suffix must stay
  <= the matching prefix of the expansion of 1, the shift at offset 0
  included;
* the follower recursion R(w . a) = min(1, beta*R(w) - a) with
  R(empty) = 1, where the word is admissible exactly when every step
  stays strictly positive.  R(w) is the exact right endpoint of the
  image of the cylinder under the n-fold orbit map, so the cylinder of
  w has length beta**-n * R(w) and is full exactly when R(w) = 1.

The two must agree everywhere; the test suite checks that exhaustively.
Enumeration walks the digit tree depth-first in lexicographic order,
pruning on the follower value, and is budgeted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .field import BetaContext, BudgetExceededError, ExactReal
from .expansion import DigitWord, ExpansionOfOne, evaluate, shared_expansion


class InadmissibleWordError(ValueError):
    """The word is not the digit prefix of any point's expansion."""


class ParryChecker:
    """Streaming lexicographic admissibility check against the expansion of 1.

    Keeps the set of shift offsets whose suffix still matches the expansion
    of 1 exactly; a pushed digit that exceeds the next reference digit at any
    live offset kills admissibility.  The flag is sticky.
    """

    __slots__ = ("eps", "length", "live", "admissible")

    def __init__(self, ctx: BetaContext, eps: ExpansionOfOne | None = None):
        self.eps = eps if eps is not None else shared_expansion(ctx)
        self.length = 0
        self.live: list[int] = []
        self.admissible = True

    def push(self, digit: int) -> bool:
        if not self.admissible:
            self.length += 1
            return False
        eps = self.eps
        keep: list[int] = []
        for start in self.live:
            ref = eps.digit(self.length - start + 1)
            if digit > ref:
                self.admissible = False
                self.length += 1
                return False
            if digit == ref:
                keep.append(start)
        first = eps.digit(1)
        if digit > first:
            self.admissible = False
        elif digit == first:
            keep.append(self.length)
        self.live = keep
        self.length += 1
        return self.admissible

    def copy(self) -> "ParryChecker":
        c = ParryChecker.__new__(ParryChecker)
        c.eps = self.eps
        c.length = self.length
        c.live = list(self.live)
        c.admissible = self.admissible
        return c


def admissible_parry(ctx: BetaContext, digits: Sequence[int]) -> bool:
    """Lexicographic admissibility of a finite word (all shifts, offset 0 included)."""
    checker = ParryChecker(ctx)
    for d in digits:
        if not checker.push(d):
            return False
    return True


def follower_step(R: ExactReal, digit: int) -> ExactReal | None:
    """One follower update; None when the digit is not playable from R."""
    ctx = R.ctx
    nxt = ctx.beta * R - digit
    if nxt.compare(0) <= 0:
        return None
    if nxt.compare(1) >= 0:
        return ctx.one
    return nxt


def follower_value(ctx: BetaContext, digits: Sequence[int]) -> ExactReal | None:
    """R(w), or None when the word is inadmissible."""
    R = ctx.one
    for d in digits:
        R = follower_step(R, d)
        if R is None:
            return None
    return R


@dataclass(frozen=True)
class Cylinder:
    """Exact geometry of the set of points whose expansion starts with a word.

    The interval is left-open right-closed with the stated left endpoint;
    its length is beta**-n * follower and never exceeds beta**-n.
    """

    word: DigitWord
    left: ExactReal
    follower: ExactReal
    length: ExactReal
    full: bool


def cylinder(ctx: BetaContext, digits: Sequence[int]) -> Cylinder:
    word = digits if isinstance(digits, DigitWord) else DigitWord(ctx, digits)
    R = follower_value(ctx, word.digits)
    if R is None:
        raise InadmissibleWordError(f"word {word.serialize()} is not admissible")
    left = evaluate(ctx, word.digits)
    length = (ctx.beta_inv ** len(word)) * R
    return Cylinder(word=word, left=left, follower=R, length=length, full=(R == ctx.one))


def is_full(ctx: BetaContext, digits: Sequence[int]) -> bool:
    """Whether the word's cylinder has the maximal length beta**-n."""
    R = follower_value(ctx, digits)
    if R is None:
        raise InadmissibleWordError("word is not admissible")
    return R == ctx.one


def enumerate_words(
    ctx: BetaContext,
    n: int,
    *,
    budget: int = 2_000_000,
    prefix: Sequence[int] = (),
) -> Iterator[tuple[tuple[int, ...], ExactReal]]:
    """All admissible words of length n extending the prefix, lexicographically,
    each with its follower value.  Budget counts words visited at any depth."""
    if n < 0:
        raise ValueError("length must be nonnegative")
    prefix = tuple(prefix)
    R0 = follower_value(ctx, prefix)
    if R0 is None:
        raise InadmissibleWordError("enumeration prefix is not admissible")
    if len(prefix) > n:
        raise ValueError("prefix longer than the requested length")
    visited = 0
    top = ctx.alphabet_top
    stack: list[tuple[tuple[int, ...], ExactReal]] = [(prefix, R0)]
    while stack:
        word, R = stack.pop()
        if len(word) == n:
            yield word, R
            continue
        scaled = ctx.beta * R
        children = []
        for a in range(top + 1):
            nxt = scaled - a
            if nxt.compare(0) <= 0:
                break
            if nxt.compare(1) >= 0:
                nxt = ctx.one
            children.append((word + (a,), nxt))
        visited += len(children)
        if visited > budget:
            raise BudgetExceededError(f"enumeration budget of {budget} words exceeded")
        stack.extend(reversed(children))


@dataclass(frozen=True)
class CensusRecord:
    n: int
    count: int
    full_count: int
    lower_bound_ok: bool
    upper_bound_ok: bool
    pigeonhole_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.lower_bound_ok and self.upper_bound_ok and self.pigeonhole_ok


def census(ctx: BetaContext, n: int, *, budget: int = 2_000_000) -> CensusRecord:
    """Count admissible words of length n, check the growth bounds
    beta**n <= count <= beta**(n+1)/(beta-1), and check that every window of
    n+1 lexicographically consecutive cylinders contains a full one."""
    count = 0
    full_count = 0
    longest_nonfull = 0
    current_nonfull = 0
    one = ctx.one
    for _, R in enumerate_words(ctx, n, budget=budget):
        count += 1
        if R == one:
            full_count += 1
            current_nonfull = 0
        else:
            current_nonfull += 1
            longest_nonfull = max(longest_nonfull, current_nonfull)
    beta_pow = ctx.beta ** n
    lower_ok = beta_pow.compare(count) <= 0
    upper_ok = ((ctx.beta - 1) * count).compare(ctx.beta ** (n + 1)) <= 0
    pigeonhole_ok = longest_nonfull <= n
    return CensusRecord(
        n=n,
        count=count,
        full_count=full_count,
        lower_bound_ok=lower_ok,
        upper_bound_ok=upper_ok,
        pigeonhole_ok=pigeonhole_ok,
    )


def shortest_full_spacer(ctx: BetaContext, cap: int = 100_000) -> int:
    """Smallest k >= 2 such that a 1, then k-2 zeros, then a 1 is admissible.

    Equivalently the length of the shortest full word of the form
    (1, 0, ..., 0); such blocks concatenate freely with anything admissible.
    """
    R = follower_value(ctx, (1,))
    if R is None:
        raise InadmissibleWordError("digit 1 is not admissible; base out of scope")
    for k in range(2, cap + 1):
        if follower_step(R, 1) is not None:
            return k
        R = follower_step(R, 0)
        if R is None:  # cannot happen: zeros are always playable
            raise AssertionError("zero digit rejected")
    raise BudgetExceededError(f"no admissible 1,0^(k-2),1 found for k <= {cap}")
