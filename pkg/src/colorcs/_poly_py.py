"""Sparse integer polynomial kernels, pure-Python backend.

A polynomial is ``dict[int, int]``: packed exponent key (see ``monomials``)
mapping to a nonzero integer coefficient.  The zero polynomial is the empty
dict.  Functions never mutate their inputs and never store zero coefficients.

This module and the compiled twin ``_poly_cy`` export the same names with the
same semantics; ``_kernel`` picks one at import time.  Keep the two in sync.
"""

from __future__ import annotations

from .monomials import _MASK, MAX_EXP

BACKEND = "pure"


def poly_add(a, b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def poly_sub(a, b):
    if not b:
        return dict(a)
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) - c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def poly_neg(a):
    return {k: -c for k, c in a.items()}


def poly_scale(a, c: int):
    if not c:
        return {}
    if c == 1:
        return dict(a)
    return {k: v * c for k, v in a.items()}


def poly_max_degree(a, shifts) -> int:
    """Largest total degree among the terms; -1 for the zero polynomial."""
    best = -1
    for k in a:
        td = 0
        for sh in shifts:
            td += (k >> sh) & _MASK
        if td > best:
            best = td
    return best


def poly_mul(a, b, shifts):
    if not a or not b:
        return {}
    # packed addition overflows a field only past per-variable degree MAX_EXP;
    # total degree bounds every field, so this check rules it out
    if poly_max_degree(a, shifts) + poly_max_degree(b, shifts) > MAX_EXP:
        raise OverflowError("monomial degree cap exceeded in poly_mul")
    if len(a) > len(b):
        a, b = b, a
    out = {}
    items_b = list(b.items())
    for ka, ca in a.items():
        for kb, cb in items_b:
            k = ka + kb
            s = out.get(k, 0) + ca * cb
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def poly_mul_monomial(a, key: int, c: int):
    """a * c*x^key.  key is a packed monomial, c an int."""
    if not c or not a:
        return {}
    if key == 0:
        return poly_scale(a, c)
    return {k + key: v * c for k, v in a.items()}


def poly_diff(a, slot: int, shifts):
    sh = shifts[slot]
    step = 1 << sh
    out = {}
    for k, c in a.items():
        e = (k >> sh) & _MASK
        if e:
            out[k - step] = c * e
    return out


def _lead(a, shifts):
    """(key, coeff) of the graded-lex leading term.  a must be nonzero."""
    best_k = -1
    best_td = -1
    for k in a:
        td = 0
        for sh in shifts:
            td += (k >> sh) & _MASK
        if td > best_td or (td == best_td and k > best_k):
            best_td = td
            best_k = k
    return best_k, a[best_k]


def poly_lead(a, shifts):
    return _lead(a, shifts)


def poly_divexact(a, b, shifts):
    """Exact quotient a/b over Z, or None when b does not divide a exactly."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    if len(b) == 1:
        (kb, cb), = b.items()
        out = {}
        for k, c in a.items():
            q, r = divmod(c, cb)
            if r:
                return None
            if kb:
                for sh in shifts:
                    if ((kb >> sh) & _MASK) > ((k >> sh) & _MASK):
                        return None
                k -= kb
            out[k] = q
        return out
    kb, cb = _lead(b, shifts)
    rem = dict(a)
    quo = {}
    items_b = list(b.items())
    while rem:
        kr, cr = _lead(rem, shifts)
        for sh in shifts:
            if ((kb >> sh) & _MASK) > ((kr >> sh) & _MASK):
                return None
        qc, r = divmod(cr, cb)
        if r:
            return None
        km = kr - kb
        quo[km] = qc
        for k2, c2 in items_b:
            kk = k2 + km
            s = rem.get(kk, 0) - qc * c2
            if s:
                rem[kk] = s
            else:
                rem.pop(kk, None)
    return quo


def poly_eval(a, values, shifts):
    """Exact evaluation; values is a sequence indexed by slot (Fractions ok)."""
    total = 0
    for k, c in a.items():
        term = c
        for slot, sh in enumerate(shifts):
            e = (k >> sh) & _MASK
            if e:
                term *= values[slot] ** e
        total += term
    return total


def poly_eval_var(a, slot: int, value: int, shifts):
    """Substitute an integer for one variable; returns a poly in the rest."""
    sh = shifts[slot]
    clear = ~(_MASK << sh)
    out = {}
    for k, c in a.items():
        e = (k >> sh) & _MASK
        if e:
            c = c * value ** e
            k &= clear
        s = out.get(k, 0) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out
