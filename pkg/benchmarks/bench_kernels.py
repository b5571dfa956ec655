"""Compare the compiled and pure-Python kernels.

Run ``python3 benchmarks/bench_kernels.py``; each kernel is timed on a batch of
truncated products and on one full assembly (kernels are swapped in place).
"""
import argparse
import random
import time

from finitedr import hierarchy, kernels
from finitedr.diffpoly import DiffPoly, TruncationContext
from finitedr.fcohft import FamilySpec
from finitedr.params import ParamRational


def random_poly(ctx, rng, nterms=25):
    p = DiffPoly.zero(ctx)
    for _ in range(nterms):
        m = DiffPoly.const(ctx, ParamRational.const(ctx.N, rng.randint(-5, 5)) + ParamRational.xi(ctx.N))
        for _ in range(rng.randint(1, 3)):
            m = m * DiffPoly.var(ctx, rng.randint(1, ctx.N), rng.randint(0, 3))
        if rng.random() < 0.5:
            m = m * DiffPoly.eps(ctx, 2)
        p = p + m
    return p


def _swap(impl):
    names = ("pr_add", "pr_mul", "merge_factors", "dp_mul", "dp_add_scaled")
    saved = {n: getattr(kernels, n) for n in names}
    for n in names:
        setattr(kernels, n, getattr(impl, n))
    return saved


def _restore(saved):
    for n, f in saved.items():
        setattr(kernels, n, f)


def bench_products(impl, polys, ctx, repeat):
    raw = [p._raw for p in polys]
    t0 = time.perf_counter()
    for _ in range(repeat):
        for a, b in zip(raw, raw[1:]):
            impl.dp_mul(a, b, ctx.Dmax, ctx.Emax)
    return time.perf_counter() - t0


def bench_assembly(impl):
    saved = _swap(impl)
    try:
        spec = FamilySpec.rank2()
        ctx = TruncationContext(2, 6, 4)
        t0 = time.perf_counter()
        hierarchy.assemble_P(1, 2, 0, spec, ctx)
        return time.perf_counter() - t0
    finally:
        _restore(saved)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    ctx = TruncationContext(2, 8, 4)
    polys = [random_poly(ctx, rng) for _ in range(20)]
    impls = kernels.implementations()
    results = {}
    for name, impl in impls.items():
        results[name] = (bench_products(impl, polys, ctx, args.repeat), bench_assembly(impl))
    print(f"{'kernel':<8} {'products (s)':>13} {'assembly (s)':>13}")
    for name, (tp, ta) in results.items():
        print(f"{name:<8} {tp:13.3f} {ta:13.3f}")
    if "cython" in results:
        base = results["python"]
        fast = results["cython"]
        print(f"speedup  {base[0] / fast[0]:12.2f}x {base[1] / fast[1]:12.2f}x")
    return results


if __name__ == "__main__":
    main()
