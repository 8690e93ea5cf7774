#!/usr/bin/env python3
"""The order-p invariant on two-cell complexes, at both working primes.

First the well-definedness checks in the admissible degree range
(p^2 < r < p^2 + p): the top action kills v1^r mod p^p, the coboundary
table holds mod p, and the exact linear system forces integral c_ij with
p-integral c.  Then the invariant's value v1^(p-1) g0 on the pinch class.
"""

from bpcalc import Context
from bpcalc.opcalc import betap_pipeline, ext1_invariant

for p in (5, 7):
    ctx = Context(prime=p)
    print(f"== p = {p} ==")
    r = p * p + 1
    report = ext1_invariant(ctx, r)
    print(f"well-definedness at r = {r}:", "PASS" if report.passed else "FAIL")
    for record in report.records:
        if "constant" in record.id:
            print("  ", record.computed)

    report = betap_pipeline(ctx)
    for record in report.records:
        mark = "ok  " if record.status else "FAIL"
        print(f"  [{mark}] {record.id}: {record.computed}")
    print()
