"""Compare coherent and stroboscopically measured sensitivity to the coupling.

Run with ``python3 demos/zeno_vs_coherent.py``.
"""

import math

from zeno_sense import bloch, qfi
from zeno_sense.bloch import PrecessionFrequency
from zeno_sense.specfun import phi, xi

om = PrecessionFrequency.from_theta(0.9 * math.pi / 2)
print(f"probe: wx = {om.wx:.4f}, wz = {om.wz:.4f}")

az = bloch.anti_zeno_tau(om)
print(f"fastest measurement-induced decay at tau = {az:.4f}, t_c = {bloch.characteristic_time(om, az):.4f}")

print("\n  tau      t_c        t_max      peak QFI")
for tau in (0.001, 0.01, 0.1, az, 0.6):
    print(f"  {tau:<7.4f}  {bloch.characteristic_time(om, tau):<9.4g}  "
          f"{qfi.t_max(om, 1.0, tau):<9.4g}  {qfi.qfi_projected_max(om, 1.0, tau):.4g}")
print(f"  Zeno plateau 4 phi / wx^2 = {4 * phi(1.0) / om.wx**2:.4g}, xi(1) = {xi(1.0):.4f}")

tb = qfi.projective_wins_time_bound(om, 1.0)
print(f"\nthe measured protocol gives more QFI for total times t < {tb:.3f}")
for t in (0.5 * tb, tb, 2 * tb):
    print(f"  t = {t:8.3f}  coherent QFI = {float(qfi.qfi_coherent(om, 1.0, t)):.4g}  "
          f"projected/coherent = {qfi.qfi_ratio_max(om, 1.0, t):.3f}")
