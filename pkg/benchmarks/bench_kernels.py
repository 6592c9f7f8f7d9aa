"""Compare the pure and compiled kernel backends on realistic workloads.

Polynomial shapes mirror what the operator layer actually produces: sparse
dicts over 5 or 6 packed slots (positions, coupling, two spectral
parameters), a few dozen to a few hundred terms, small coefficients going
in and large exact integers coming out of chained products.

Run:  python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import statistics
import time

from colorcs import monomials
from colorcs._kernel import available_backends


def rand_poly(rng, nvars, nterms, maxexp):
    shifts = monomials.make_shifts(nvars)
    out = {}
    while len(out) < nterms:
        key = monomials.pack(
            tuple(rng.randint(0, maxexp) for _ in range(nvars)), shifts)
        out[key] = rng.randint(-50, 50) or 7
    return out


def workloads():
    rng = random.Random(20257)
    for nvars, label in ((5, "two sites"), (6, "three sites")):
        shifts = monomials.make_shifts(nvars)
        small = [rand_poly(rng, nvars, 12, 3) for _ in range(40)]
        big = [rand_poly(rng, nvars, 120, 4) for _ in range(6)]
        yield (f"mul 12x12 terms, {label}", "poly_mul",
               [(a, b, shifts) for a, b in zip(small[::2], small[1::2])])
        yield (f"mul 120x120 terms, {label}", "poly_mul",
               [(a, b, shifts) for a, b in zip(big[::2], big[1::2])])
        yield (f"add 120+120 terms, {label}", "poly_add",
               [(a, b) for a, b in zip(big[::2], big[1::2])])
        yield (f"diff 120 terms, {label}", "poly_diff",
               [(p, 0, shifts) for p in big])
        yield (f"eval_var 120 terms, {label}", "poly_eval_var",
               [(p, 1, 3, shifts) for p in big])


def quotient_workload():
    """Exact division of a product by one factor, the gcd inner loop."""
    rng = random.Random(777)
    shifts = monomials.make_shifts(5)
    pairs = []
    for _ in range(10):
        a = rand_poly(rng, 5, 25, 3)
        b = rand_poly(rng, 5, 8, 2)
        pairs.append((a, b, shifts))
    return pairs


def time_call(fn, calls, repeat):
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in calls:
            fn(*args)
        best.append(time.perf_counter() - t0)
    return min(best), statistics.median(best)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = available_backends()
    if len(backends) < 2:
        print("compiled backend not built; timing the pure backend only")

    print(f"{'workload':<34} " + " ".join(f"{n:>12}" for n, _ in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    rows = []
    for label, fname, calls in workloads():
        times = [time_call(getattr(mod, fname), calls, args.repeat)[0]
                 for _, mod in backends]
        rows.append((label, times))
    # precompute the products once so divexact sees identical inputs
    div_inputs = []
    ref = backends[0][1]
    for a, b, shifts in quotient_workload():
        div_inputs.append((ref.poly_mul(a, b, shifts), b, shifts))
    times = [time_call(getattr(mod, "poly_divexact"), div_inputs,
                       args.repeat)[0] for _, mod in backends]
    rows.append(("divexact product/factor", times))

    for label, times in rows:
        cells = " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) > 1 and times[1] > 0:
            cells += f"   {times[0] / times[1]:>6.2f}x"
        print(f"{label:<34} {cells}")

    if len(backends) > 1:
        geo = 1.0
        count = 0
        for _, times in rows:
            if times[1] > 0:
                geo *= times[0] / times[1]
                count += 1
        print(f"\ngeometric mean speedup: {geo ** (1 / count):.2f}x "
              f"over {count} workloads")


if __name__ == "__main__":
    main()
