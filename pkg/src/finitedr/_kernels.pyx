# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled build of ``_kernels_py``: same functions, same raw dictionary formats."""

KERNEL_NAME = "cython"


def pr_add(dict a, dict b):
    cdef dict out = dict(a)
    for e, c in b.items():
        s = out.get(e)
        if s is None:
            out[e] = c
        else:
            s = s + c
            if s:
                out[e] = s
            else:
                del out[e]
    return out


cdef tuple _add_exp(tuple ea, tuple eb):
    cdef Py_ssize_t i, n = len(ea)
    cdef list out = [0] * n
    for i in range(n):
        out[i] = <long>ea[i] + <long>eb[i]
    return tuple(out)


def pr_mul(dict a, dict b):
    cdef dict out = {}
    cdef tuple ea, eb, e
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _add_exp(ea, eb)
            c = ca * cb
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                out[e] = s + c
    return {e: c for e, c in out.items() if c}


def merge_factors(tuple fa, tuple fb):
    """Product of two monomials given as sorted ``(alpha, d, exp)`` tuples."""
    if not fa:
        return fb
    if not fb:
        return fa
    cdef list out = []
    cdef Py_ssize_t i = 0, j = 0, na = len(fa), nb = len(fb)
    cdef tuple xa, xb
    cdef long aa, da, ab, db
    while i < na and j < nb:
        xa = <tuple>fa[i]
        xb = <tuple>fb[j]
        aa = xa[0]
        da = xa[1]
        ab = xb[0]
        db = xb[1]
        if aa == ab and da == db:
            out.append((aa, da, <long>xa[2] + <long>xb[2]))
            i += 1
            j += 1
        elif aa < ab or (aa == ab and da < db):
            out.append(xa)
            i += 1
        else:
            out.append(xb)
            j += 1
    if i < na:
        out.extend(fa[i:])
    if j < nb:
        out.extend(fb[j:])
    return tuple(out)


def dp_mul(dict a, dict b, long dmax, long emax):
    """Truncated product of two differential polynomials (raw form)."""
    cdef dict acc = {}
    cdef dict cur, prod, out
    cdef long e, d, ea, da, eb, db
    cdef tuple ka, kb, key
    for ka, ca in a.items():
        ea = ka[0]
        da = ka[1]
        for kb, cb in b.items():
            eb = kb[0]
            e = ea + eb
            if e > emax:
                continue
            db = kb[1]
            d = da + db
            if d > dmax:
                continue
            key = (e, d, merge_factors(ka[2], kb[2]))
            prod = pr_mul(ca, cb)
            cur = acc.get(key)
            if cur is None:
                acc[key] = prod
            else:
                for pe, pc in prod.items():
                    s = cur.get(pe)
                    cur[pe] = pc if s is None else s + pc
    out = {}
    for key, coeff in acc.items():
        coeff = {pe: pc for pe, pc in (<dict>coeff).items() if pc}
        if coeff:
            out[key] = coeff
    return out


def dp_add_scaled(dict acc, dict b, scale):
    """In place: ``acc += scale * b`` where ``scale`` is a parameter dict."""
    cdef dict cur
    for key, cb in b.items():
        prod = pr_mul(cb, scale) if scale is not None else cb
        cur = acc.get(key)
        if cur is None:
            if prod:
                acc[key] = dict(prod)
            continue
        for pe, pc in prod.items():
            s = cur.get(pe)
            if s is None:
                cur[pe] = pc
            else:
                s = s + pc
                if s:
                    cur[pe] = s
                else:
                    del cur[pe]
        if not cur:
            del acc[key]
    return acc
