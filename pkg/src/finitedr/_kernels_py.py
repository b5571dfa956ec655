"""Pure-Python inner loops for sparse polynomial arithmetic.

``_kernels.pyx`` is a line-for-line Cython build of this module; ``finitedr.kernels``
picks whichever is importable.  Both operate on raw dictionaries:

* parameter polynomials: ``{exponent tuple: rational}``
* differential polynomials: ``{(eps, udeg, factors): parameter dict}`` where
  ``factors`` is a sorted tuple of ``(alpha, d, exp)`` triples.

Results never contain zero coefficients.
"""

KERNEL_NAME = "python"


def pr_add(a, b):
    out = dict(a)
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


def pr_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple([x + y for x, y in zip(ea, eb)])
            c = ca * cb
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                out[e] = s + c
    return {e: c for e, c in out.items() if c}


def merge_factors(fa, fb):
    """Product of two monomials given as sorted ``(alpha, d, exp)`` tuples."""
    if not fa:
        return fb
    if not fb:
        return fa
    out = []
    i = j = 0
    na, nb = len(fa), len(fb)
    while i < na and j < nb:
        xa = fa[i]
        xb = fb[j]
        if xa[0] == xb[0] and xa[1] == xb[1]:
            out.append((xa[0], xa[1], xa[2] + xb[2]))
            i += 1
            j += 1
        elif (xa[0], xa[1]) < (xb[0], xb[1]):
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


def dp_mul(a, b, dmax, emax):
    """Truncated product of two differential polynomials (raw form)."""
    acc = {}
    for (ea, da, fa), ca in a.items():
        for (eb, db, fb), cb in b.items():
            e = ea + eb
            if e > emax:
                continue
            d = da + db
            if d > dmax:
                continue
            key = (e, d, merge_factors(fa, fb))
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
        coeff = {pe: pc for pe, pc in coeff.items() if pc}
        if coeff:
            out[key] = coeff
    return out


def dp_add_scaled(acc, b, scale):
    """In place: ``acc += scale * b`` where ``scale`` is a parameter dict."""
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
