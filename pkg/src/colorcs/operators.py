"""Symbolic operators: rational coefficients times color words times
partial derivatives, kept in a canonical merged form.

A term is coeff(x, lam) * W * D^p where W is a full-support color word (one
unit per site, flat key) and p a tuple of derivative orders per site.
Multiplication normalizes with the graded word product and the Leibniz
rule; equal canonical forms mean equal operators, because full-support
words act linearly independently on the color basis and monomials times
derivatives are independent on polynomial amplitudes.

The running term budget is a context variable so a verification run can
bound intermediate growth without threading a parameter everywhere.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from contextvars import ContextVar
from fractions import Fraction
from itertools import product

from .color import (
    GradingContext,
    full_word_act,
    full_word_mul,
    full_word_parity,
    identity_key,
    permutation_terms,
    word_from_units,
)
from .errors import CapExceededError, ContextMismatchError, MixedParityError
from .scalar import RationalFunction, ScalarField

_TERM_BUDGET: ContextVar = ContextVar("colorcs_term_budget", default=None)


@contextmanager
def term_budget(limit):
    """Bound the term count of operator products inside the block."""
    token = _TERM_BUDGET.set(limit)
    try:
        yield
    finally:
        _TERM_BUDGET.reset(token)


class AlgebraContext:
    """Sites, color grading and coefficient field bundled together."""

    def __init__(self, n: int, m: int, N: int):
        self.grading = GradingContext(n, m, N)
        self.field = ScalarField(N)
        self.N = N
        self.zero_deriv = (0,) * N
        self._identity_terms = None

    def __repr__(self):
        g = self.grading
        return f"AlgebraContext(n={g.n}, m={g.m}, N={self.N})"

    def zero(self):
        return OperatorSum(self, {})

    def identity(self):
        return self.scalar(self.field.one)

    def _diag_keys(self):
        if self._identity_terms is None:
            g = self.grading
            self._identity_terms = tuple(
                identity_key(g, fill) for fill in g.basis_states()
            )
        return self._identity_terms

    def scalar(self, value):
        """Multiplication operator by a coefficient function."""
        f = self.field.const(value) if not isinstance(value, RationalFunction) \
            else value
        if f.field is not self.field:
            raise ContextMismatchError("coefficient from another field")
        if not f:
            return self.zero()
        terms = {}
        for key in self._diag_keys():
            terms[(key, self.zero_deriv)] = f
        return OperatorSum(self, terms)

    def coord(self, i: int):
        """Multiplication by x_i."""
        return self.scalar(self.field.x(i))

    def deriv(self, i: int, order: int = 1):
        """d^order/dx_i^order as an operator."""
        if not 1 <= i <= self.N:
            raise ValueError(f"site {i} out of range 1..{self.N}")
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        p = list(self.zero_deriv)
        p[i - 1] = order
        p = tuple(p)
        terms = {}
        for key in self._diag_keys():
            terms[(key, p)] = self.field.one
        return OperatorSum(self, terms)

    def from_units(self, units, coeff=1, deriv=None):
        """Operator from a product of units, leftmost factor first."""
        f = coeff if isinstance(coeff, RationalFunction) else \
            self.field.const(coeff)
        p = self.zero_deriv if deriv is None else tuple(deriv)
        if len(p) != self.N or any(k < 0 for k in p):
            raise ValueError("bad derivative tuple")
        if not f:
            return self.zero()
        sign, word = word_from_units(self.grading, units)
        if not sign:
            return self.zero()
        if sign < 0:
            f = -f
        terms = {}
        for key in word.expand_full():
            terms[(key, p)] = f
        return OperatorSum(self, terms)

    def unit(self, i: int, a: int, b: int, coeff=1, deriv=None):
        """The color unit e(i, a, b) as an operator."""
        return self.from_units([(i, a, b)], coeff=coeff, deriv=deriv)

    def swap(self, i: int, j: int):
        """Graded permutation of sites i and j."""
        acc = self.zero()
        for c, units in permutation_terms(self.grading, i, j):
            acc = acc + self.from_units(units, coeff=c)
        return acc


def _diff_multi(rf, deriv):
    for slot, k in enumerate(deriv):
        for _ in range(k):
            rf = rf.diff(slot)
            if not rf:
                return rf
    return rf


class OperatorSum:
    __slots__ = ("ctx", "terms", "_par")

    def __init__(self, ctx, terms):
        self.ctx = ctx
        self.terms = terms
        self._par = None

    # -- bookkeeping -------------------------------------------------------

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def parity(self):
        """0 or 1 when all words agree; raises on a genuine mixture."""
        if self._par is not None:
            return self._par
        g = self.ctx.grading
        seen = None
        for word, _ in self.terms:
            p = full_word_parity(g, word)
            if seen is None:
                seen = p
            elif seen != p:
                raise MixedParityError("operator mixes even and odd words")
        self._par = 0 if seen is None else seen
        return self._par

    def max_deriv_degree(self):
        return max((sum(p) for _, p in self.terms), default=-1)

    def _check(self, other):
        if not isinstance(other, OperatorSum):
            raise TypeError("expected an OperatorSum")
        if other.ctx is not self.ctx:
            raise ContextMismatchError("operators from different contexts")

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        self._check(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for key, g in other.terms.items():
            f = out.get(key)
            if f is None:
                out[key] = g
            else:
                s = f + g
                if s:
                    out[key] = s
                else:
                    del out[key]
        return OperatorSum(self.ctx, out)

    def __neg__(self):
        return OperatorSum(self.ctx, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other):
        self._check(other)
        return self.__add__(-other)

    def scale(self, value):
        """Left multiplication by a coefficient (commutes past nothing)."""
        if isinstance(value, int):
            if value == 1:
                return self
            if value == 0:
                return self.ctx.zero()
            out = {}
            for k, f in self.terms.items():
                out[k] = f._scale_int(value)
            return OperatorSum(self.ctx, out)
        f = value if isinstance(value, RationalFunction) else \
            self.ctx.field.const(value)
        if not f:
            return self.ctx.zero()
        out = {}
        for k, g in self.terms.items():
            out[k] = f * g
        return OperatorSum(self.ctx, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1, 1) / Fraction(other))
        if isinstance(other, RationalFunction):
            return self.scale(other.field.one / other)
        return NotImplemented

    # -- multiplication ------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            # constants commute with derivatives
            return self.scale(other)
        if isinstance(other, RationalFunction):
            c = other.constant_value()
            if c is not None:
                return self.scale(c)
            return self.mul(self.ctx.scalar(other))
        if isinstance(other, OperatorSum):
            return self.mul(other)
        return NotImplemented

    def mul(self, other, min_deriv=None):
        """Product, optionally dropping result terms below a total
        derivative degree (sound for leading-order comparisons)."""
        self._check(other)
        ctx = self.ctx
        if not self.terms or not other.terms:
            return ctx.zero()
        grading = ctx.grading
        budget = _TERM_BUDGET.get()
        acc = {}
        dcache = {}
        for (w1, p), f in self.terms.items():
            p_total = sum(p)
            nz = [i for i in range(ctx.N) if p[i]]
            for (w2, q), g in other.terms.items():
                hit = full_word_mul(grading, w1, w2)
                if hit is None:
                    continue
                sign, w = hit
                if not p_total:
                    r = q
                    if min_deriv is not None and sum(r) < min_deriv:
                        continue
                    val = f * g
                    if sign < 0:
                        val = -val
                    _acc_add(acc, (w, r), val, budget)
                    continue
                gid = id(g)
                for ts in product(*(range(p[i] + 1) for i in nz)):
                    t = [0] * ctx.N
                    for i, ti in zip(nz, ts):
                        t[i] = ti
                    t = tuple(t)
                    dg = _dcache_get(dcache, g, gid, t)
                    if not dg:
                        continue
                    r = tuple(p[i] - t[i] + q[i] for i in range(ctx.N))
                    if min_deriv is not None and sum(r) < min_deriv:
                        continue
                    comb = 1
                    for i in nz:
                        comb *= math.comb(p[i], t[i])
                    val = f * dg
                    c = comb if sign > 0 else -comb
                    if c != 1:
                        val = val._scale_int(c)
                    _acc_add(acc, (w, r), val, budget)
        return OperatorSum(ctx, acc)

    def bracket(self, other):
        """Graded commutator [self, other}: anticommutator when both odd."""
        self._check(other)
        pa = self.parity()
        pb = other.parity()
        ab = self.mul(other)
        ba = other.mul(self)
        if pa and pb:
            return ab + ba
        return ab - ba

    # -- actions and views -----------------------------------------------------

    def apply_to(self, state):
        """Apply to {color tuple: amplitude}; returns the same shape."""
        ctx = self.ctx
        grading = ctx.grading
        out = {}
        dcache = {}
        for (w, p), f in self.terms.items():
            for st, amp in state.items():
                if not amp:
                    continue
                key = (id(amp), p)
                damp = dcache.get(key)
                if damp is None:
                    damp = _diff_multi(amp, p)
                    dcache[key] = damp
                if not damp:
                    continue
                hit = full_word_act(grading, w, st)
                if hit is None:
                    continue
                sgn, new_st = hit
                val = f * damp
                if sgn < 0:
                    val = -val
                prev = out.get(new_st)
                tot = val if prev is None else prev + val
                if tot:
                    out[new_st] = tot
                elif prev is not None:
                    del out[new_st]
        return out

    def leading_by_deriv(self):
        """(degree, top part): terms of maximal total derivative order."""
        d = self.max_deriv_degree()
        if d < 0:
            return -1, self
        top = {k: f for k, f in self.terms.items() if sum(k[1]) == d}
        return d, OperatorSum(self.ctx, top)

    def filtered(self, min_deriv=0):
        keep = {k: f for k, f in self.terms.items() if sum(k[1]) >= min_deriv}
        return OperatorSum(self.ctx, keep)

    def substitute_lambda(self, value):
        return self.substitute_parameter("lam", value)

    def substitute_parameter(self, which, value):
        """Freeze one parameter: which is "lam", "x" or "y"."""
        field = self.ctx.field
        slots = {"lam": field.slot_lambda, "x": field.slot_x, "y": field.slot_y}
        try:
            slot = slots[which]
        except KeyError:
            raise ValueError("unknown parameter %r" % (which,)) from None
        out = {}
        for k, f in self.terms.items():
            g = f.substitute(slot, value)
            if g:
                out[k] = g
        return OperatorSum(self.ctx, out)

    def swap_sites(self, i: int, j: int):
        """Relabel sites i and j in words, derivatives and coefficients."""
        ctx = self.ctx
        sigma = ctx.field.transposition(i, j)
        grading = ctx.grading
        out = {}
        for (w, p), f in self.terms.items():
            units = [
                (sigma[s] + 1, w[2 * s], w[2 * s + 1]) for s in range(ctx.N)
            ]
            sign, word = word_from_units(grading, units)
            flat = []
            for site, a, b in word.units:
                flat.append(a)
                flat.append(b)
            q = [0] * ctx.N
            for s in range(ctx.N):
                q[sigma[s]] = p[s]
            g = f.permute(sigma)
            if sign < 0:
                g = -g
            key = (tuple(flat), tuple(q))
            prev = out.get(key)
            tot = g if prev is None else prev + g
            if tot:
                out[key] = tot
            elif prev is not None:
                del out[key]
        return OperatorSum(ctx, out)

    # -- formatting ---------------------------------------------------------

    def to_str(self, max_terms=None):
        if not self.terms:
            return "0"
        keys = sorted(
            self.terms,
            key=lambda k: (-sum(k[1]), k[1], k[0]),
        )
        lines = []
        for key in keys[: max_terms or len(keys)]:
            word, p = key
            f = self.terms[key]
            bits = [f"({f})"]
            wbits = []
            for s in range(self.ctx.N):
                a, b = word[2 * s], word[2 * s + 1]
                wbits.append(f"e({s + 1},{a},{b})")
            bits.append("".join(wbits))
            dbits = []
            for s, k in enumerate(p):
                if k:
                    dbits.append(f"D{s + 1}" if k == 1 else f"D{s + 1}^{k}")
            if dbits:
                bits.append(" ".join(dbits))
            lines.append(" * ".join(bits))
        if max_terms and len(keys) > max_terms:
            lines.append(f"... (+{len(keys) - max_terms} more terms)")
        return "\n".join(lines)

    def __repr__(self):
        return f"OperatorSum<{len(self.terms)} terms>"


def _acc_add(acc, key, val, budget):
    prev = acc.get(key)
    if prev is None:
        if val:
            acc[key] = val
            if budget is not None and len(acc) > budget:
                raise CapExceededError(
                    f"operator grew past {budget} terms"
                )
    else:
        tot = prev + val
        if tot:
            acc[key] = tot
        else:
            del acc[key]


def _dcache_get(dcache, g, gid, t):
    key = (gid, t)
    got = dcache.get(key)
    if got is not None:
        return got
    if not any(t):
        dcache[key] = g
        return g
    for i, ti in enumerate(t):
        if ti:
            parent = list(t)
            parent[i] -= 1
            prev = _dcache_get(dcache, g, gid, tuple(parent))
            got = prev.diff(i) if prev else prev
            break
    dcache[key] = got
    return got
