#!/usr/bin/env python3
"""Chase the tertiary-operation value down the composite chain at p = 7.

The chain runs through three cyclic-module stages: the first-stage value
[-v2^(p-1); 0] g1, the secondary value [2 v1^p v2^(p-3); 2 v1 v2^(p-3)] g0
mod p, and the final coset representative -2 v2^(p-3) l mod (p, v1), with
the indeterminacy pinned by exhaustive monomial enumeration.
"""

from bpcalc import Context
from bpcalc.opcalc import check_complex, d_matrices, d1_misprint, gamma1_pipeline

ctx = Context(prime=7)
p, q = ctx.prime, ctx.q

print("== the complex and its composites ==")
d0, d1, d2 = d_matrices(ctx)
report = check_complex(ctx, [d0, d1, d2])
for record in report.records:
    print(("  ok  " if record.status else "  FAIL") + "  " + record.anchor)

bad = check_complex(ctx, [d0, d1_misprint(ctx), d2])
print("misprinted d1 variant fails as documented:", not bad.passed)
for record in bad.failures():
    print("   witness:", record.witness)

print()
print("== the chain, stage by stage ==")
report = gamma1_pipeline(ctx)
for record in report.records:
    mark = "ok  " if record.status else "FAIL"
    print(f"  [{mark}] {record.id}")
    if record.computed:
        print(f"         value: {record.computed}" + (
            f"   mod {record.modulus}" if record.modulus else ""))
print()
print("overall:", "PASS" if report.passed else "FAIL")
