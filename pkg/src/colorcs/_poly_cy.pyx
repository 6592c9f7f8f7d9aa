# cython: language_level=3, boundscheck=False, wraparound=False
"""Sparse integer polynomial kernels, compiled backend.

Same dict-in dict-out contract as ``_poly_py``: packed exponent key to
nonzero integer coefficient, inputs never mutated, zeros never stored.
Coefficients stay arbitrary-precision Python ints; the speedup comes from
C-level dict iteration and, when every packed key fits in 64 bits, C
integer key arithmetic in the hot loops.  Keep in sync with ``_poly_py``.
"""

from cpython.dict cimport PyDict_GetItem, PyDict_Next
from cpython.mem cimport PyMem_Free, PyMem_Malloc
from cpython.object cimport PyObject
from libc.stdint cimport int64_t

from .monomials import _MASK, MAX_EXP, WIDTH

BACKEND = "compiled"

cdef long _CWIDTH = WIDTH
cdef int64_t _CMASK = _MASK
cdef long long _CMAXEXP = MAX_EXP

# fast paths pack the whole key into an int64; 6 slots of 10 bits is the
# widest layout that cannot overflow under legal degree caps


cdef inline bint _fits(Py_ssize_t nv):
    return nv * _CWIDTH <= 62


cdef inline void _load_shifts(shifts, long *out, Py_ssize_t nv):
    cdef Py_ssize_t i
    for i in range(nv):
        out[i] = shifts[i]


def poly_add(dict a, dict b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    cdef dict out = dict(a)
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    cdef PyObject *cur
    cdef object k, s
    while PyDict_Next(b, &pos, &kp, &vp):
        k = <object>kp
        cur = PyDict_GetItem(out, k)
        if cur is NULL:
            out[k] = <object>vp
        else:
            s = <object>cur + <object>vp
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def poly_sub(dict a, dict b):
    if not b:
        return dict(a)
    cdef dict out = dict(a)
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    cdef PyObject *cur
    cdef object k, s
    while PyDict_Next(b, &pos, &kp, &vp):
        k = <object>kp
        cur = PyDict_GetItem(out, k)
        if cur is NULL:
            out[k] = -(<object>vp)
        else:
            s = <object>cur - <object>vp
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def poly_neg(dict a):
    cdef dict out = {}
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    while PyDict_Next(a, &pos, &kp, &vp):
        out[<object>kp] = -(<object>vp)
    return out


def poly_scale(dict a, c):
    if not c:
        return {}
    if c == 1:
        return dict(a)
    cdef dict out = {}
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    while PyDict_Next(a, &pos, &kp, &vp):
        out[<object>kp] = (<object>vp) * c
    return out


def poly_max_degree(dict a, shifts):
    """Largest total degree among the terms; -1 for the zero polynomial."""
    cdef Py_ssize_t nv = len(shifts)
    cdef long cshifts[8]
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    cdef int64_t k64, td
    cdef int64_t best = -1
    cdef Py_ssize_t i
    if _fits(nv):
        _load_shifts(shifts, cshifts, nv)
        while PyDict_Next(a, &pos, &kp, &vp):
            k64 = <object>kp
            td = 0
            for i in range(nv):
                td += (k64 >> cshifts[i]) & _CMASK
            if td > best:
                best = td
        return best
    # wide keys: plain object arithmetic
    best_obj = -1
    for k in a:
        td_obj = 0
        for sh in shifts:
            td_obj += (k >> sh) & _MASK
        if td_obj > best_obj:
            best_obj = td_obj
    return best_obj


cdef dict _mul_fast(dict a, dict b):
    # every key fits int64 and fieldwise sums stay under the cap, so key
    # addition is plain C addition with no carries between fields
    cdef Py_ssize_t lb = len(b)
    cdef int64_t *bk = <int64_t *>PyMem_Malloc(lb * sizeof(int64_t))
    cdef PyObject **bc = <PyObject **>PyMem_Malloc(lb * sizeof(PyObject *))
    if bk == NULL or bc == NULL:
        PyMem_Free(bk)
        PyMem_Free(bc)
        raise MemoryError()
    cdef dict out = {}
    cdef Py_ssize_t pos = 0, i = 0, j
    cdef PyObject *kp
    cdef PyObject *vp
    cdef PyObject *cur
    cdef int64_t ka
    cdef object ca, prod, s, kobj
    try:
        while PyDict_Next(b, &pos, &kp, &vp):
            bk[i] = <object>kp
            bc[i] = vp
            i += 1
        pos = 0
        while PyDict_Next(a, &pos, &kp, &vp):
            ka = <object>kp
            ca = <object>vp
            for j in range(lb):
                prod = ca * <object>bc[j]
                kobj = ka + bk[j]
                cur = PyDict_GetItem(out, kobj)
                if cur is NULL:
                    out[kobj] = prod
                else:
                    s = <object>cur + prod
                    if s:
                        out[kobj] = s
                    else:
                        del out[kobj]
    finally:
        PyMem_Free(bk)
        PyMem_Free(bc)
    return out


cdef dict _mul_obj(dict a, dict b):
    cdef dict out = {}
    cdef Py_ssize_t posa = 0, posb
    cdef PyObject *kap
    cdef PyObject *vap
    cdef PyObject *kbp
    cdef PyObject *vbp
    cdef PyObject *cur
    cdef object k, s, prod
    while PyDict_Next(a, &posa, &kap, &vap):
        posb = 0
        while PyDict_Next(b, &posb, &kbp, &vbp):
            k = <object>kap + <object>kbp
            prod = (<object>vap) * <object>vbp
            cur = PyDict_GetItem(out, k)
            if cur is NULL:
                out[k] = prod
            else:
                s = <object>cur + prod
                if s:
                    out[k] = s
                else:
                    del out[k]
    return out


def poly_mul(dict a, dict b, shifts):
    if not a or not b:
        return {}
    # packed addition overflows a field only past per-variable degree MAX_EXP;
    # total degree bounds every field, so this check rules it out
    if poly_max_degree(a, shifts) + poly_max_degree(b, shifts) > _CMAXEXP:
        raise OverflowError("monomial degree cap exceeded in poly_mul")
    if len(a) > len(b):
        a, b = b, a
    if _fits(len(shifts)):
        return _mul_fast(a, b)
    return _mul_obj(a, b)


def poly_mul_monomial(dict a, key, c):
    """a * c*x^key.  key is a packed monomial, c an int."""
    if not c or not a:
        return {}
    if key == 0:
        return poly_scale(a, c)
    cdef dict out = {}
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    while PyDict_Next(a, &pos, &kp, &vp):
        out[<object>kp + key] = (<object>vp) * c
    return out


def poly_diff(dict a, Py_ssize_t slot, shifts):
    cdef long sh = shifts[slot]
    # Python-int shift: sh can exceed the width of any C integer type
    cdef object step = (<object>1) << sh
    cdef dict out = {}
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    cdef object k, e
    while PyDict_Next(a, &pos, &kp, &vp):
        k = <object>kp
        e = (k >> sh) & _MASK
        if e:
            out[k - step] = (<object>vp) * e
    return out


def poly_lead(dict a, shifts):
    """(key, coeff) of the graded-lex leading term.  a must be nonzero."""
    cdef Py_ssize_t nv = len(shifts)
    cdef long cshifts[8]
    cdef Py_ssize_t pos = 0, i
    cdef PyObject *kp
    cdef PyObject *vp
    cdef int64_t k64, td
    cdef int64_t best_k = -1, best_td = -1
    if _fits(nv):
        _load_shifts(shifts, cshifts, nv)
        while PyDict_Next(a, &pos, &kp, &vp):
            k64 = <object>kp
            td = 0
            for i in range(nv):
                td += (k64 >> cshifts[i]) & _CMASK
            if td > best_td or (td == best_td and k64 > best_k):
                best_td = td
                best_k = k64
        kobj = best_k
        return kobj, a[kobj]
    best_obj = -1
    btd_obj = -1
    for k in a:
        td_obj = 0
        for sh in shifts:
            td_obj += (k >> sh) & _MASK
        if td_obj > btd_obj or (td_obj == btd_obj and k > best_obj):
            btd_obj = td_obj
            best_obj = k
    return best_obj, a[best_obj]


def poly_divexact(dict a, dict b, shifts):
    """Exact quotient a/b over Z, or None when b does not divide a exactly."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    cdef dict out, rem, quo
    cdef object kb, cb, k, c, q, r, kr, cr, km, qc, kk, s, c2, k2
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
                k = k - kb
            out[k] = q
        return out
    kb, cb = poly_lead(b, shifts)
    rem = dict(a)
    quo = {}
    items_b = list(b.items())
    while rem:
        kr, cr = poly_lead(rem, shifts)
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


def poly_eval(dict a, values, shifts):
    """Exact evaluation; values is a sequence indexed by slot (Fractions ok)."""
    total = 0
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    cdef Py_ssize_t slot
    cdef object k, term, e
    while PyDict_Next(a, &pos, &kp, &vp):
        k = <object>kp
        term = <object>vp
        for slot, sh in enumerate(shifts):
            e = (k >> sh) & _MASK
            if e:
                term = term * values[slot] ** e
        total = total + term
    return total


def poly_eval_var(dict a, Py_ssize_t slot, value, shifts):
    """Substitute an integer for one variable; returns a poly in the rest."""
    cdef long sh = shifts[slot]
    cdef object clear = ~(_MASK << sh)
    cdef dict out = {}
    cdef Py_ssize_t pos = 0
    cdef PyObject *kp
    cdef PyObject *vp
    cdef PyObject *cur
    cdef object k, c, e, s
    while PyDict_Next(a, &pos, &kp, &vp):
        k = <object>kp
        c = <object>vp
        e = (k >> sh) & _MASK
        if e:
            c = c * value ** e
            k = k & clear
        cur = PyDict_GetItem(out, k)
        if cur is NULL:
            s = c
        else:
            s = <object>cur + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out
