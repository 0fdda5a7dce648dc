"""Exact arithmetic in the number field generated by a base beta > 1.

Elements are rational coefficient vectors against the power basis
1, beta, ..., beta^(d-1), reduced modulo the base's minimal polynomial
after every product.  Equality is a coefficient check; strict order is
decided by narrowing an isolating interval for beta until the sign of
the difference is certain.

The zero-iff-zero-coefficients contract holds only when the supplied
polynomial really is minimal for its root.  The registry polynomials
are irreducible; user-supplied polynomials are checked for
square-freeness but not factored, so a reducible "minimal" polynomial
voids the equality contract (documented, not detected).

All values are immutable.  A context's isolating interval only ever
narrows, so concurrent readers stay consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class SpecError(ValueError):
    """Invalid base specification or malformed parameter."""


class ContextMismatchError(ValueError):
    """Operands belong to different base contexts."""


class BudgetExceededError(RuntimeError):
    """An enumeration or search ran past its configured budget."""


_MAX_REFINEMENTS = 200_000  # safety net for comparisons under a broken minimality contract


# ---------------------------------------------------------------------------
# Dense polynomials over Fraction, coefficient index = power.

def _poly_trim(cs: list[Fraction]) -> list[Fraction]:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _poly_eval(cs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _poly_deriv(cs: Sequence[Fraction]) -> list[Fraction]:
    return [i * c for i, c in enumerate(cs)][1:]


def _poly_divmod(num: Sequence[Fraction], den: Sequence[Fraction]):
    num = list(num)
    q = [Fraction(0)] * max(0, len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        coeff = num[k + len(den) - 1] / lead
        q[k] = coeff
        for i, c in enumerate(den):
            num[k + i] -= coeff * c
    return q, _poly_trim(num)


def _poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _sturm_chain(cs: Sequence[Fraction]) -> list[list[Fraction]]:
    chain = [_poly_trim(list(cs)), _poly_trim(_poly_deriv(cs))]
    while chain[-1]:
        _, r = _poly_divmod(chain[-2], chain[-1])
        chain.append([-c for c in r])
    chain.pop()
    return chain


def _sign_variations(values: Iterable[Fraction]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _roots_in_open_interval(cs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> int:
    # Requires cs(lo) != 0 and cs(hi) != 0; then (lo, hi] count equals open count.
    chain = _sturm_chain(cs)
    at_lo = _sign_variations(_poly_eval(p, lo) for p in chain)
    at_hi = _sign_variations(_poly_eval(p, hi) for p in chain)
    return at_lo - at_hi


# ---------------------------------------------------------------------------
# Base specifications.

#: Named bases: display-order (high power first) integer coefficients plus an
#: isolating interval with both endpoints above 1.
REGISTRY: dict[str, tuple[tuple[int, ...], tuple[Fraction, Fraction]]] = {
    "golden": ((1, -1, -1), (Fraction(3, 2), Fraction(2))),
    "tribonacci": ((1, -1, -1, -1), (Fraction(3, 2), Fraction(2))),
    "plastic": ((1, 0, -1, -1), (Fraction(5, 4), Fraction(3, 2))),
}


@dataclass(frozen=True)
class BetaSpec:
    kind: str  # "rational" | "algebraic"
    numerator: int = 0
    denominator: int = 1
    coefficients: tuple[int, ...] = ()  # high power first
    interval: tuple[Fraction, Fraction] | None = None
    name: str | None = None

    @staticmethod
    def rational(numerator: int, denominator: int = 1) -> "BetaSpec":
        if denominator == 0:
            raise SpecError("zero denominator in rational base")
        if denominator < 0:
            numerator, denominator = -numerator, -denominator
        g = math.gcd(numerator, denominator)
        if g:
            numerator //= g
            denominator //= g
        return BetaSpec(kind="rational", numerator=numerator, denominator=denominator)

    @staticmethod
    def algebraic(coefficients: Sequence[int], lo, hi, name: str | None = None) -> "BetaSpec":
        return BetaSpec(
            kind="algebraic",
            coefficients=tuple(int(c) for c in coefficients),
            interval=(Fraction(lo), Fraction(hi)),
            name=name,
        )

    @staticmethod
    def named(name: str) -> "BetaSpec":
        try:
            coeffs, (lo, hi) = REGISTRY[name]
        except KeyError:
            raise SpecError(f"unknown base name {name!r}") from None
        return BetaSpec.algebraic(coeffs, lo, hi, name=name)

    def describe(self) -> str:
        if self.name:
            return self.name
        if self.kind == "rational":
            if self.denominator == 1:
                return str(self.numerator)
            return f"{self.numerator}/{self.denominator}"
        lo, hi = self.interval
        coeffs = ",".join(str(c) for c in self.coefficients)
        return f"poly:{coeffs}@{lo},{hi}"


def parse_beta(text: str) -> BetaSpec:
    """Parse a base given as a registry name, "p/q", an integer, or
    "poly:c_d,...,c_0@lo,hi" with the coefficients highest power first."""
    text = text.strip()
    if text in REGISTRY:
        return BetaSpec.named(text)
    if text.startswith("poly:"):
        body = text[len("poly:"):]
        if "@" not in body:
            raise SpecError("algebraic base needs an isolating interval: poly:coeffs@lo,hi")
        coeff_part, interval_part = body.split("@", 1)
        try:
            coeffs = [int(c) for c in coeff_part.split(",")]
            lo_s, hi_s = interval_part.split(",")
            lo, hi = Fraction(lo_s), Fraction(hi_s)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"malformed algebraic base {text!r}: {exc}") from None
        return BetaSpec.algebraic(coeffs, lo, hi)
    try:
        if "/" in text:
            p_s, q_s = text.split("/")
            return BetaSpec.rational(int(p_s), int(q_s))
        return BetaSpec.rational(int(text))
    except ValueError:
        raise SpecError(f"cannot parse base {text!r}") from None


# ---------------------------------------------------------------------------
# Context and elements.

class BetaContext:
    """The base beta, its minimal polynomial, and a refinable isolating interval."""

    def __init__(self, spec: BetaSpec):
        self.spec = spec
        if spec.kind == "rational":
            if spec.denominator <= 0:
                raise SpecError("zero or negative denominator")
            value = Fraction(spec.numerator, spec.denominator)
            if value <= 1:
                raise SpecError(f"base must exceed 1, got {value}")
            # minimal polynomial q*x - p, stored low power first
            self._minpoly = (Fraction(-spec.numerator), Fraction(spec.denominator))
            self._lo = self._hi = value
        elif spec.kind == "algebraic":
            coeffs = list(spec.coefficients)
            if not coeffs or coeffs[0] == 0:
                raise SpecError("leading coefficient must be nonzero")
            low_first = [Fraction(c) for c in reversed(coeffs)]
            if low_first[0] == 0:
                raise SpecError("zero constant term: 0 would be a root, so the polynomial is not minimal")
            if len(_poly_gcd(low_first, _poly_deriv(low_first))) > 1:
                raise SpecError("polynomial is not square-free")
            lo, hi = spec.interval
            if not lo > 1:
                raise SpecError("isolating interval must lie above 1")
            if not lo < hi:
                raise SpecError("empty isolating interval")
            if _poly_eval(low_first, lo) == 0 or _poly_eval(low_first, hi) == 0:
                raise SpecError("isolating interval endpoint is a root; shrink the interval")
            count = _roots_in_open_interval(low_first, lo, hi)
            if count == 0:
                raise SpecError("no root in the isolating interval")
            if count > 1:
                raise SpecError(f"{count} roots in the isolating interval; need exactly one")
            if len(low_first) == 2:
                # degree one: the root is rational, pin the interval to it
                root = -low_first[0] / low_first[1]
                self._lo = self._hi = root
            else:
                self._lo, self._hi = lo, hi
            self._minpoly = tuple(low_first)
        else:
            raise SpecError(f"unknown base kind {spec.kind!r}")

        self.degree = len(self._minpoly) - 1
        self._sign_at_lo = None
        if self._lo != self._hi:
            self._sign_at_lo = _poly_eval(self._minpoly, self._lo) > 0

        # reduction rows: x^(d+j) mod minpoly for j = 0..d-2, low power first
        d = self.degree
        lead = self._minpoly[-1]
        base_row = [-c / lead for c in self._minpoly[:-1]]
        rows = [tuple(base_row)]
        for _ in range(d - 2):
            prev = rows[-1]
            shifted = [Fraction(0)] + list(prev[:-1])
            top = prev[-1]
            rows.append(tuple(s + top * b for s, b in zip(shifted, base_row)))
        self._reduction_rows = rows

        self.zero = self.element([0])
        self.one = self.element([1])
        self.beta = self.element([0, 1] if d >= 2 else [self._lo])
        self.alphabet_top = self._certified_alphabet_top()
        self._beta_inv: ExactReal | None = None

    # -- construction -----------------------------------------------------

    def element(self, coefficients: Sequence) -> "ExactReal":
        cs = [Fraction(c) for c in coefficients]
        if len(cs) > self.degree:
            raise SpecError("coefficient vector longer than the field degree")
        cs += [Fraction(0)] * (self.degree - len(cs))
        return ExactReal(self, tuple(cs))

    def lift(self, value) -> "ExactReal":
        if isinstance(value, ExactReal):
            if value.ctx is not self:
                raise ContextMismatchError("value from a different base context")
            return value
        return self.element([Fraction(value)])

    @property
    def beta_inv(self) -> "ExactReal":
        if self._beta_inv is None:
            # c0 + c1 b + ... + cd b^d = 0  =>  1/b = -(c1 + c2 b + ...)/c0
            cs = self._minpoly
            inv = [-c / cs[0] for c in cs[1:]]
            self._beta_inv = self.element(inv[: self.degree])
        return self._beta_inv

    def describe(self) -> str:
        return self.spec.describe()

    # -- isolating interval ------------------------------------------------

    def enclosure(self) -> tuple[Fraction, Fraction]:
        return self._lo, self._hi

    def refine(self) -> bool:
        """One bisection step; returns False when the interval is a point."""
        if self._lo == self._hi:
            return False
        mid = (self._lo + self._hi) / 2
        s = _poly_eval(self._minpoly, mid)
        if s == 0:
            self._lo = self._hi = mid
            return False
        if (s > 0) == self._sign_at_lo:
            self._lo = mid
        else:
            self._hi = mid
        return True

    def refine_to_width(self, width: Fraction) -> tuple[Fraction, Fraction]:
        while self._hi - self._lo > width:
            if not self.refine():
                break
        return self._lo, self._hi

    def _certified_alphabet_top(self) -> int:
        if self._lo == self._hi:
            return math.ceil(self._lo) - 1
        return certified_ceil(self.beta) - 1

    def __repr__(self) -> str:
        return f"BetaContext({self.describe()})"


class ExactReal:
    """Immutable element of the field generated by the context's base."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: BetaContext, coeffs: tuple[Fraction, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("value has an irrational component")
        return self.coeffs[0]

    def _coerce(self, other):
        if isinstance(other, ExactReal):
            if other.ctx is not self.ctx:
                raise ContextMismatchError("operands from different base contexts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.lift(other)
        return None

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactReal(self.ctx, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return ExactReal(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactReal(self.ctx, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self.ctx.degree
        if d == 1:
            return ExactReal(self.ctx, (self.coeffs[0] * o.coeffs[0],))
        conv = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                if b != 0:
                    conv[i + j] += a * b
        out = conv[:d]
        rows = self.ctx._reduction_rows
        for k in range(d, 2 * d - 1):
            c = conv[k]
            if c != 0:
                row = rows[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        return ExactReal(self.ctx, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        # division by a rational only; field inverses beyond 1/beta are not needed
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return ExactReal(self.ctx, tuple(c / q for c in self.coeffs))
        return NotImplemented

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative powers are not supported")
        result = self.ctx.one
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- comparisons ---------------------------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None

    def enclosure(self) -> tuple[Fraction, Fraction]:
        """Interval containing the value, at the context's current precision."""
        lo, hi = self.ctx.enclosure()
        cs = self.coeffs
        vlo = vhi = cs[-1]
        for c in reversed(cs[:-1]):
            products = (vlo * lo, vlo * hi, vhi * lo, vhi * hi)
            vlo, vhi = min(products) + c, max(products) + c
        return vlo, vhi

    def compare(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare ExactReal with {type(other).__name__}")
        diff = self - o
        if diff.is_zero:
            return 0
        if diff.is_rational:
            return 1 if diff.coeffs[0] > 0 else -1
        for _ in range(_MAX_REFINEMENTS):
            lo, hi = diff.enclosure()
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            self.ctx.refine()
        raise ArithmeticError(
            "comparison did not resolve; the supplied polynomial is probably not minimal"
        )

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*b")
            else:
                terms.append(f"{c}*b^{i}")
        body = " + ".join(terms) if terms else "0"
        return f"<{body} | {self.ctx.describe()}>"


# ---------------------------------------------------------------------------
# Module-level operations.

def make_beta(spec) -> BetaContext:
    """Build a context from a BetaSpec or a spec string."""
    if isinstance(spec, str):
        spec = parse_beta(spec)
    return BetaContext(spec)


def certified_compare(a: ExactReal, b) -> int:
    """-1, 0, or +1; equality decided symbolically, strict order by refinement."""
    return a.compare(b)


def certified_ceil(a: ExactReal) -> int:
    """Exact smallest integer >= a."""
    if a.is_rational:
        return math.ceil(a.as_fraction())
    for _ in range(_MAX_REFINEMENTS):
        lo, hi = a.enclosure()
        clo, chi = math.ceil(lo), math.ceil(hi)
        if clo == chi:
            return clo
        a.ctx.refine()
    raise ArithmeticError("ceiling did not resolve; polynomial is probably not minimal")


def certified_floor(a: ExactReal) -> int:
    """Exact largest integer <= a."""
    if a.is_rational:
        return math.floor(a.as_fraction())
    for _ in range(_MAX_REFINEMENTS):
        lo, hi = a.enclosure()
        flo, fhi = math.floor(lo), math.floor(hi)
        if flo == fhi:
            return flo
        a.ctx.refine()
    raise ArithmeticError("floor did not resolve; polynomial is probably not minimal")


def approximate(a: ExactReal, bits: int) -> Fraction:
    """Rational q with |a - q| <= 2**-bits, certified."""
    if bits < 0:
        raise SpecError("precision must be nonnegative")
    if a.is_rational:
        return a.as_fraction()
    target = Fraction(1, 2 ** (bits + 2))
    while True:
        lo, hi = a.enclosure()
        if hi - lo <= target:
            return (lo + hi) / 2
        a.ctx.refine()
