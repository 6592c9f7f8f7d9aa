"""Graded color units, words, and their action on the color basis.

Colors are 1-based labels 1..n+m; the first n are even, the rest odd.  A
unit e(i, a, b) replaces color b by color a at site i.  Units at distinct
sites supercommute with the sign read off their parities, and a same-site
pair contracts with a plain delta and no sign.  A word is the normal form
of a product of units: at most one unit per site, sites ascending, with the
overall sign and possible vanishing tracked during normalization.

Acting on a basis state, a unit picks up the Koszul sign counting odd
colors strictly left of its site; a word acts with its rightmost (highest
site) unit first.  Words kept sparse are convenient to build with, but they
are linearly dependent as operators (summing e(i, c, c) over c gives the
identity), so canonical operator bookkeeping uses full-support words: one
unit at every site, encoded as a flat tuple (a1, b1, ..., aN, bN).
"""

from __future__ import annotations

from itertools import product


class GradingContext:
    """Fixed choice of gl(n|m) color space and site count N."""

    def __init__(self, n: int, m: int, N: int):
        if n < 0 or m < 0 or n + m < 1:
            raise ValueError("need a nonempty color set")
        if N < 1:
            raise ValueError("need at least one site")
        self.n = n
        self.m = m
        self.N = N
        self.dim = n + m
        self.colors = tuple(range(1, n + m + 1))
        self._par = (None,) + (0,) * n + (1,) * m

    def parity(self, a: int) -> int:
        if not 1 <= a <= self.dim:
            raise ValueError(f"color {a} out of range 1..{self.dim}")
        return self._par[a]

    def unit_parity(self, a: int, b: int) -> int:
        return (self._par[a] + self._par[b]) & 1

    def basis_states(self):
        """All color basis states, lexicographic."""
        return product(self.colors, repeat=self.N)

    def state_parity(self, state) -> int:
        return sum(self._par[c] for c in state) & 1

    def __repr__(self):
        return f"GradingContext(n={self.n}, m={self.m}, N={self.N})"


class ColorWord:
    """Normalized product of units, at most one per site, sites ascending."""

    __slots__ = ("ctx", "units")

    def __init__(self, ctx, units):
        self.ctx = ctx
        self.units = units

    def __eq__(self, other):
        return (
            isinstance(other, ColorWord)
            and self.ctx is other.ctx
            and self.units == other.units
        )

    def __hash__(self):
        return hash(self.units)

    def __repr__(self):
        body = " ".join(f"e({i},{a},{b})" for i, a, b in self.units)
        return f"ColorWord<{body or '1'}>"

    @property
    def parity(self) -> int:
        ctx = self.ctx
        return sum(ctx.unit_parity(a, b) for _, a, b in self.units) & 1

    def act_basis(self, state):
        """(sign, new_state) for this word applied to a basis state.

        Returns None when a delta kills the term.  Rightmost unit acts
        first; the Koszul sign counts odd colors strictly left of the site.
        """
        ctx = self.ctx
        par = ctx._par
        st = list(state)
        sign = 1
        for i, a, b in reversed(self.units):
            if st[i - 1] != b:
                return None
            if (par[a] + par[b]) & 1:
                acc = 0
                for k in range(i - 1):
                    acc += par[st[k]]
                if acc & 1:
                    sign = -sign
            st[i - 1] = a
        return sign, tuple(st)

    def expand_full(self):
        """Full-support word keys summing to this word.

        Absent sites are filled with diagonal units in all colors; these
        are even, so every expanded key carries coefficient +1.
        """
        ctx = self.ctx
        have = {i: (a, b) for i, a, b in self.units}
        missing = [i for i in range(1, ctx.N + 1) if i not in have]
        keys = []
        for fill in product(ctx.colors, repeat=len(missing)):
            it = iter(fill)
            flat = []
            for i in range(1, ctx.N + 1):
                if i in have:
                    a, b = have[i]
                else:
                    c = next(it)
                    a = b = c
                flat.append(a)
                flat.append(b)
            keys.append(tuple(flat))
        return keys


def word_from_units(ctx, units):
    """Normalize a product of units, leftmost factor first.

    Returns (sign, word); sign 0 with word None when the product vanishes.
    """
    par = ctx._par
    slots = []
    sign = 1
    dim = ctx.dim
    for i, a, b in units:
        if not 1 <= i <= ctx.N:
            raise ValueError(f"site {i} out of range 1..{ctx.N}")
        if not (1 <= a <= dim and 1 <= b <= dim):
            raise ValueError(f"color out of range 1..{dim}")
        p_new = (par[a] + par[b]) & 1
        pos = len(slots)
        while pos > 0 and slots[pos - 1][0] > i:
            prev = slots[pos - 1]
            if p_new and (par[prev[1]] + par[prev[2]]) & 1:
                sign = -sign
            pos -= 1
        if pos > 0 and slots[pos - 1][0] == i:
            site, wa, wb = slots[pos - 1]
            if wb != a:
                return 0, None
            slots[pos - 1] = (i, wa, b)
        else:
            slots.insert(pos, (i, a, b))
    return sign, ColorWord(ctx, tuple(slots))


def identity_word(ctx):
    return ColorWord(ctx, ())


def permutation_terms(ctx, i, j):
    """(coeff, units) pairs summing to the graded site swap between i and j.

    On basis states the sum acts as |..ci..cj..> -> (-1)^{p(ci)p(cj)}
    |..cj..ci..|, the graded permutation.
    """
    if i == j:
        raise ValueError("swap needs distinct sites")
    out = []
    for a in ctx.colors:
        for b in ctx.colors:
            coeff = -1 if ctx.parity(b) else 1
            out.append((coeff, ((i, a, b), (j, b, a))))
    return out


# -- full-support word kernel ------------------------------------------------


def full_word_mul(ctx, w1, w2):
    """(sign, key) for the product of two full-support words, or None.

    The sign moves each unit of w2 left past the units of w1 at higher
    sites; same-site contraction itself is sign-free.
    """
    par = ctx._par
    exp = 0
    pref = 0
    out = []
    for idx in range(ctx.N):
        a1 = w1[2 * idx]
        b1 = w1[2 * idx + 1]
        a2 = w2[2 * idx]
        if b1 != a2:
            return None
        u = (par[a1] + par[b1]) & 1
        if u:
            exp += pref
        pref += (par[a2] + par[w2[2 * idx + 1]]) & 1
        out.append(a1)
        out.append(w2[2 * idx + 1])
    if exp & 1:
        return -1, tuple(out)
    return 1, tuple(out)


def full_word_act(ctx, key, state):
    """(sign, new_state) for a full-support word on a basis state, or None."""
    par = ctx._par
    st = list(state)
    sign = 1
    for i in range(ctx.N - 1, -1, -1):
        a = key[2 * i]
        b = key[2 * i + 1]
        if st[i] != b:
            return None
        if (par[a] + par[b]) & 1:
            acc = 0
            for k in range(i):
                acc += par[st[k]]
            if acc & 1:
                sign = -sign
        st[i] = a
    return sign, tuple(st)


def full_word_parity(ctx, key) -> int:
    par = ctx._par
    acc = 0
    for i in range(ctx.N):
        acc += par[key[2 * i]] + par[key[2 * i + 1]]
    return acc & 1


def identity_key(ctx, fill):
    """Full-support diagonal key for a given color fill tuple."""
    flat = []
    for c in fill:
        flat.append(c)
        flat.append(c)
    return tuple(flat)
