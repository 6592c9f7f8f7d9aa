"""Exact rational-function field in the positions x_1..x_N, the coupling
lam, and two spectral variables x, y.

Polynomials are the packed-int dicts from the kernel layer; a
RationalFunction is a canonical pair (num, den) over Z with

  * gcd(num, den) = 1, integer contents included,
  * den's leading coefficient (graded lex) positive,
  * zero represented as (0, 1).

Structural equality of canonical pairs is then mathematical equality, which
is what the rest of the package leans on.  Addition and multiplication use
the Henrici reductions, so the expensive gcds run on the smallest possible
inputs; gcds of denominator pairs are memoized on the field because the
same binomial products recur constantly.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import monomials
from ._kernel import (
    poly_add,
    poly_diff,
    poly_divexact,
    poly_eval,
    poly_lead,
    poly_mul,
    poly_neg,
    poly_scale,
)
from .errors import ContextMismatchError, PoleError
from .gcdtools import poly_content, poly_gcd

_MASK = monomials._MASK

_GCD_MEMO_CAP = 100_000


def _fingerprint(p):
    return tuple(sorted(p.items()))


def _poly_pow(p, k, shifts):
    # coprime inputs stay coprime under powers, so no gcd is needed here
    out = {0: 1}
    base = p
    while k:
        if k & 1:
            out = poly_mul(out, base, shifts)
        k >>= 1
        if k:
            base = poly_mul(base, base, shifts)
    return out


class ScalarField:
    """Coefficient field for one fixed number of sites N."""

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("need at least one site")
        self.N = N
        self.names = tuple(f"x{i}" for i in range(1, N + 1)) + ("lam", "x", "y")
        self.nvars = N + 3
        self.shifts = monomials.make_shifts(self.nvars)
        self.slot_lambda = N
        self.slot_x = N + 1
        self.slot_y = N + 2
        self._one_p = {0: 1}
        self.one = RationalFunction(self, {0: 1}, self._one_p)
        self.zero = RationalFunction(self, {}, self._one_p)
        # binomials u - v over the position-like slots; these knock out the
        # denominators the model builders actually produce
        pos = list(range(N)) + [self.slot_x, self.slot_y]
        cands = []
        for ia in range(len(pos)):
            for ib in range(ia + 1, len(pos)):
                sa, sb = pos[ia], pos[ib]
                cands.append({1 << self.shifts[sa]: 1, 1 << self.shifts[sb]: -1})
        self.candidates = tuple(cands)
        self._omega_cache = {}
        self._theta_cache = {}
        self._gcd_memo = {}

    def __repr__(self):
        return f"ScalarField(N={self.N})"

    # -- polynomial-level helpers --------------------------------------

    def gcd(self, a, b):
        return poly_gcd(a, b, self.shifts, self.candidates)

    def _gcd_dens(self, d1, d2):
        """Memoized gcd for canonical (positive-lead) denominators."""
        if d1 == d2:
            return d1
        k1 = _fingerprint(d1)
        k2 = _fingerprint(d2)
        key = (k1, k2) if k1 <= k2 else (k2, k1)
        memo = self._gcd_memo
        g = memo.get(key)
        if g is None:
            g = poly_gcd(d1, d2, self.shifts, self.candidates)
            if len(memo) >= _GCD_MEMO_CAP:
                memo.clear()
            memo[key] = g
        return g

    # -- constructors ---------------------------------------------------

    def _make(self, num, den):
        if not num:
            return self.zero
        if len(den) == 1 and den.get(0) == 1:
            den = self._one_p
        return RationalFunction(self, num, den)

    def from_poly(self, p):
        return self._make(dict(p), self._one_p)

    def const(self, c):
        if isinstance(c, RationalFunction):
            if c.field is not self:
                raise ContextMismatchError("constant from a different field")
            return c
        c = Fraction(c)
        if not c:
            return self.zero
        num = {0: c.numerator}
        den = self._one_p if c.denominator == 1 else {0: c.denominator}
        return RationalFunction(self, num, den)

    def frac(self, num, den):
        """Canonicalize an arbitrary num/den pair of polynomials."""
        if not den:
            raise PoleError("zero denominator")
        if not num:
            return self.zero
        g = self.gcd(num, den)
        if g != self._one_p:
            num = poly_divexact(num, g, self.shifts)
            den = poly_divexact(den, g, self.shifts)
        _, lc = poly_lead(den, self.shifts)
        if lc < 0:
            num = poly_neg(num)
            den = poly_neg(den)
        return self._make(num, den)

    def monomial(self, exps, coeff=1):
        """exps: mapping slot -> exponent."""
        if not coeff:
            return self.zero
        key = 0
        for slot, e in exps.items():
            if not 0 <= e <= monomials.MAX_EXP:
                raise OverflowError("exponent out of range")
            key |= e << self.shifts[slot]
        return self._make({key: coeff}, self._one_p)

    def x(self, i: int):
        """Position variable x_i, 1-based."""
        if not 1 <= i <= self.N:
            raise ValueError(f"site index {i} out of range 1..{self.N}")
        return self.monomial({i - 1: 1})

    @property
    def lam(self):
        return self.monomial({self.slot_lambda: 1})

    @property
    def aux_x(self):
        return self.monomial({self.slot_x: 1})

    @property
    def aux_y(self):
        return self.monomial({self.slot_y: 1})

    def omega(self, i: int, j: int):
        """1/(x_i - x_j) for distinct 1-based sites."""
        if i == j:
            raise ValueError("omega needs distinct sites")
        key = (i, j)
        rf = self._omega_cache.get(key)
        if rf is None:
            den = {1 << self.shifts[i - 1]: 1, 1 << self.shifts[j - 1]: -1}
            rf = self.frac({0: 1}, den)
            self._omega_cache[key] = rf
        return rf

    def theta(self, i: int, j: int):
        """x_i/(x_i - x_j) for distinct 1-based sites."""
        if i == j:
            raise ValueError("theta needs distinct sites")
        key = (i, j)
        rf = self._theta_cache.get(key)
        if rf is None:
            num = {1 << self.shifts[i - 1]: 1}
            den = {1 << self.shifts[i - 1]: 1, 1 << self.shifts[j - 1]: -1}
            rf = self.frac(num, den)
            self._theta_cache[key] = rf
        return rf

    def transposition(self, i: int, j: int):
        """0-based sigma tuple swapping 1-based sites i and j."""
        sigma = list(range(self.N))
        sigma[i - 1], sigma[j - 1] = sigma[j - 1], sigma[i - 1]
        return tuple(sigma)


class RationalFunction:
    __slots__ = ("field", "num", "den", "_h")

    def __init__(self, field, num, den):
        self.field = field
        self.num = num
        self.den = den
        self._h = None

    # -- predicates -------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    @property
    def is_poly(self):
        return len(self.den) == 1 and self.den.get(0) == 1

    def as_poly(self):
        if not self.is_poly:
            raise ValueError("not a polynomial")
        return self.num

    def constant_value(self):
        """Fraction value if the function is constant, else None."""
        if self.num and (len(self.num) != 1 or 0 not in self.num):
            return None
        if len(self.den) != 1 or 0 not in self.den:
            return None
        return Fraction(self.num.get(0, 0), self.den[0])

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return (
                self.field is other.field
                and self.num == other.num
                and self.den == other.den
            )
        if isinstance(other, (int, Fraction)):
            return self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((_fingerprint(self.num), _fingerprint(self.den)))
            self._h = h
        return h

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.field is not self.field:
                raise ContextMismatchError("operands from different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        f = self.field
        if not self.num:
            return o
        if not o.num:
            return self
        n1, d1 = self.num, self.den
        n2, d2 = o.num, o.den
        sh = f.shifts
        if d1 == d2:
            t = poly_add(n1, n2)
            if not t:
                return f.zero
            if len(d1) == 1 and d1.get(0) == 1:
                return f._make(t, d1)
            g2 = f.gcd(t, d1)
            if g2 == f._one_p:
                return f._make(t, d1)
            return f._make(
                poly_divexact(t, g2, sh), poly_divexact(d1, g2, sh)
            )
        g = f._gcd_dens(d1, d2)
        if g == f._one_p:
            num = poly_add(poly_mul(n1, d2, sh), poly_mul(n2, d1, sh))
            if not num:
                return f.zero
            return f._make(num, poly_mul(d1, d2, sh))
        q1 = poly_divexact(d1, g, sh)
        q2 = poly_divexact(d2, g, sh)
        t = poly_add(poly_mul(n1, q2, sh), poly_mul(n2, q1, sh))
        if not t:
            return f.zero
        g2 = f.gcd(t, g)
        if g2 != f._one_p:
            t = poly_divexact(t, g2, sh)
            g = poly_divexact(g, g2, sh)
        return f._make(t, poly_mul(poly_mul(g, q1, sh), q2, sh))

    __radd__ = __add__

    def __neg__(self):
        if not self.num:
            return self
        return RationalFunction(self.field, poly_neg(self.num), self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.__add__(-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__add__(-self)

    def _scale_int(self, c: int):
        f = self.field
        if not c or not self.num:
            return f.zero
        if c == 1:
            return self
        cd = poly_content(self.den)
        g = math.gcd(c, cd)
        num = poly_scale(self.num, c // g)
        den = self.den if g == 1 else {k: v // g for k, v in self.den.items()}
        return f._make(num, den)

    def __mul__(self, other):
        if isinstance(other, int):
            return self._scale_int(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        f = self.field
        if not self.num or not o.num:
            return f.zero
        sh = f.shifts
        n1, d1 = self.num, self.den
        n2, d2 = o.num, o.den
        one = f._one_p
        if d2 == one:
            g1 = one
        else:
            g1 = f.gcd(n1, d2)
        if d1 == one:
            g2 = one
        else:
            g2 = f.gcd(n2, d1)
        if g1 != one:
            n1 = poly_divexact(n1, g1, sh)
            d2 = poly_divexact(d2, g1, sh)
        if g2 != one:
            n2 = poly_divexact(n2, g2, sh)
            d1 = poly_divexact(d1, g2, sh)
        return f._make(poly_mul(n1, n2, sh), poly_mul(d1, d2, sh))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.num:
            raise PoleError("division by zero")
        num, den = o.den, o.num
        _, lc = poly_lead(den, self.field.shifts)
        if lc < 0:
            num = poly_neg(num)
            den = poly_neg(den)
        return self.__mul__(RationalFunction(self.field, num, den))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, k: int):
        f = self.field
        if k == 0:
            return f.one
        if k < 0:
            if not self.num:
                raise PoleError("zero to a negative power")
            inv = f.one.__truediv__(self)
            return inv.__pow__(-k)
        if not self.num:
            return f.zero
        num = _poly_pow(self.num, k, f.shifts)
        den = _poly_pow(self.den, k, f.shifts)
        return f._make(num, den)

    # -- calculus and substitution ------------------------------------------

    def diff(self, slot: int):
        """Partial derivative with respect to the variable in `slot`."""
        f = self.field
        if not self.num:
            return f.zero
        sh = f.shifts
        nd = poly_diff(self.num, slot, sh)
        dd = poly_diff(self.den, slot, sh)
        if not dd:
            if not nd:
                return f.zero
            return f.frac(nd, self.den)
        g = f.gcd(self.den, dd)
        q = poly_divexact(self.den, g, sh)
        dq = poly_divexact(dd, g, sh)
        t = poly_add(poly_mul(nd, q, sh), poly_neg(poly_mul(self.num, dq, sh)))
        if not t:
            return f.zero
        return f.frac(t, poly_mul(self.den, q, sh))

    def d_dx(self, i: int):
        """Derivative in the 1-based position x_i."""
        return self.diff(i - 1)

    def substitute(self, slot: int, value):
        """Replace the variable in `slot` by an int, Fraction or function."""
        f = self.field
        r = value if isinstance(value, RationalFunction) else f.const(value)
        if r.field is not f:
            raise ContextMismatchError("substitution value from another field")
        sh = f.shifts[slot]

        def horner(p):
            parts = {}
            for k, c in p.items():
                e = (k >> sh) & _MASK
                parts.setdefault(e, {})[k - (e << sh)] = c
            acc = f.zero
            for e in range(max(parts), -1, -1):
                acc = acc * r
                part = parts.get(e)
                if part:
                    acc = acc + f._make(part, f._one_p)
            return acc

        np = horner(self.num)
        dp = horner(self.den)
        if not dp.num:
            raise PoleError("substitution lands on a pole")
        return np / dp

    def substitute_lambda(self, value):
        return self.substitute(self.field.slot_lambda, value)

    def permute(self, sigma):
        """Apply x_i -> x_{sigma[i]} (sigma 0-based, a bijection on sites)."""
        f = self.field
        if not self.num:
            return self

        def remap(p):
            out = {}
            for k, c in p.items():
                exps = monomials.unpack(k, f.shifts)
                new = list(exps)
                for i in range(f.N):
                    new[sigma[i]] = exps[i]
                out[monomials.pack(new, f.shifts)] = c
            return out

        num = remap(self.num)
        den = remap(self.den)
        _, lc = poly_lead(den, f.shifts)
        if lc < 0:
            num = poly_neg(num)
            den = poly_neg(den)
        return f._make(num, den)

    def evaluate(self, assign):
        """Exact value at a point given as {'x1': ..., 'lam': ..., ...}.

        Every variable that actually occurs must be assigned.  Raises
        PoleError if the denominator vanishes there.
        """
        f = self.field
        values = [None] * f.nvars
        for name, val in assign.items():
            try:
                slot = f.names.index(name)
            except ValueError:
                raise ValueError(f"unknown variable {name!r}") from None
            values[slot] = Fraction(val)
        for p in (self.num, self.den):
            for k in p:
                for slot, sh in enumerate(f.shifts):
                    if (k >> sh) & _MASK and values[slot] is None:
                        raise ValueError(f"no value for {f.names[slot]}")
        clean = [v if v is not None else 0 for v in values]
        dv = poly_eval(self.den, clean, f.shifts)
        if not dv:
            raise PoleError("evaluation point lies on a pole")
        nv = poly_eval(self.num, clean, f.shifts)
        return Fraction(nv) / Fraction(dv)

    # -- formatting -------------------------------------------------------

    def to_str(self):
        f = self.field
        num_s = poly_str(self.num, f)
        if self.is_poly:
            return num_s
        if len(self.den) == 1 and 0 in self.den:
            return f"({num_s})/{self.den[0]}"
        return f"({num_s})/({poly_str(self.den, f)})"

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return self.to_str()


def poly_str(p, field):
    """Deterministic human-readable form, graded-lex descending."""
    if not p:
        return "0"
    items = sorted(
        p.items(),
        key=lambda kv: monomials.grlex_key(kv[0], field.shifts),
        reverse=True,
    )
    out = []
    for k, c in items:
        factors = []
        for slot, sh in enumerate(field.shifts):
            e = (k >> sh) & _MASK
            if e:
                nm = field.names[slot]
                factors.append(nm if e == 1 else f"{nm}^{e}")
        mono = "*".join(factors)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(out)
