#!/usr/bin/env python3
"""Calculus of fractions on finite categories, and abelian localization.

Localizes every category in the regression library at its marked class,
compares hom-set counts against the independent zig-zag oracle, runs the
idempotent-monad checks, then localizes finite abelian groups against the
literal module-of-fractions construction and the arithmetic square.
"""

from bpcalc import abloc, catfrac

print("== categories of fractions ==")
for name, C, S in catfrac.library():
    L, Q, _ = catfrac.localize(C, S)
    counts = []
    agree = True
    for x in C.objects:
        for y in C.objects:
            hom = L.hom(x, y)
            oracle = catfrac.zigzag_oracle(C, S, x, y)
            agree &= len(hom) == len(oracle)
            if hom:
                counts.append(f"hom({x},{y})={len(hom)}")
    print(f"  {name}: oracle {'agrees' if agree else 'DISAGREES'}; "
          + ", ".join(counts[:4]) + (" ..." if len(counts) > 4 else ""))

print()
print("== idempotent monads ==")
for name, C, M in catfrac.library_monads():
    S, D = catfrac.derive_S_D(C, M)
    report = catfrac.verify_universal_props(C, M)
    print(f"  {name}: axioms+universal properties "
          f"{'PASS' if report.passed else 'FAIL'}; "
          f"S has {len(S)} maps, D = {sorted(D)}")
for name, C, M in catfrac.mutant_monads():
    report = catfrac.check_monad(C, M)
    failed_at = ", ".join(r.id for r in report.failures())
    print(f"  {name}: rejected at {failed_at}")

print()
print("== abelian localization ==")
z12 = abloc.parse_group("Z/12")
for spec in ("2", "3", "2,3"):
    inverted = abloc.InvertedSet(frozenset(int(t) for t in spec.split(",")))
    direct = abloc.localize(z12, inverted)
    oracle = abloc.fraction_oracle(z12.torsion, inverted)
    print(f"  Z/12 inverting {{{spec}}}: {direct}  (oracle: {oracle})")

print()
print("== the arithmetic square for Z/12 at {2} | odd ==")
report = abloc.arithmetic_square(z12, {2})
for record in report.records:
    mark = "ok  " if record.status else "FAIL"
    print(f"  [{mark}] {record.id}: {record.computed}")
