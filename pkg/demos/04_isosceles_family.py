"""The reduced spatial isosceles three-body family over the mass ratio.

For every mass ratio alpha > 0 the twist coefficients follow closed
rational formulas; the frequency ratio is 2 exactly at alpha = 3 (the only
value where the equilibrium is not weakly non-resonant), where the
plane-symmetry route takes over.  At alpha = 0 all twist coefficients
vanish and the procedure is honestly inconclusive.
"""

from fractions import Fraction as F

from bgnf.models import isosceles

print(f"{'alpha':>8} {'field':>16} {'resonance':>12} {'Omega_2':>18} "
      f"{'verdict':>14}")
for a in (F(1, 2), F(1), F(2), F(20, 23), F(3), F(4)):
    m = isosceles(a, 1, order=4)
    ana = m.analysis()
    verdict = (f"{ana.verdict.theorem}({ana.verdict.clause})"
               if ana.verdict.satisfied else "inconclusive")
    omega = ana.omega_nu
    expected = F(279) * a * (4 + a) / (256 * (12 + 31 * a))
    assert m.poly.field.coerce(expected) == omega
    print(f"{str(a):>8} {m.poly.field.format_tag():>16} "
          f"{m.res.label():>12} {str(expected):>18} {verdict:>14}")

print()
m = isosceles(3, 1, order=4)
nf = m.normal_form(4)
print("alpha = 3 quartic kernel form (exact):")
for e, c in sorted(nf.table.items()):
    print(f"  a{e} = {c!r}")
print()
print("twist product:", m.analysis().product)
print("eccentricity at (alpha, varpi) = (3, 1):",
      m.energy_maps["eccentricity"]())

print()
zero = isosceles(0, 1, order=4).analysis()
print("alpha = 0 control: Omega coefficients =",
      (zero.omega_nu1, zero.omega_nu2, zero.omega_nu))
print("verdict:", zero.verdict.describe())
