"""Map small NMR spin systems onto the two-level probe and check against exact dynamics.

Run with ``python3 demos/spin_pairs.py``.
"""

import numpy as np

from zeno_sense import oracle, spins

# a heteronuclear pair slightly off the Hartmann-Hahn condition
pair = spins.TwoSpinSpec(b=1.0, delta=0.4)
mu0 = 0.8
H = spins.two_spin_hamiltonian(pair)
rho0 = spins.two_spin_initial_state(mu0)
obs = spins.two_spin_block_observable()
print("two spins: closed form vs 4x4 evolution")
for t in (0.0, 1.0, 2.5, 5.0):
    exact = np.trace(oracle.propagate_unitary(H, rho0, t) @ obs).real
    print(f"  t = {t:3.1f}  {spins.two_spin_muz(pair, mu0, t):+.12f}  {exact:+.12f}")
print(f"  projective advantage after t = {spins.two_spin_projective_bound(pair):.4f}")

for b2 in (1.0, -1.0):
    spec = spins.ThreeSpinSpec(b1=1.0, b2=b2, d=0.3, delta=0.5)
    om = spins.three_spin_effective_omega(spec)
    print(f"three spins, b2 = {b2:+.0f}: wx = {om.wx:+.4f}, wz = {om.wz:+.4f}")

rng = np.random.default_rng(1)
b = np.triu(rng.uniform(0.5, 1.5, (4, 4)), 1)
ring = spins.ManySpinSpec(np.zeros(4), b + b.T)
b_eff = spins.many_spin_effective_coupling(ring, 0)
print(f"four spins: b_eff = {b_eff:.4f}")
for t in (0.005, 0.01, 0.02):
    exp = spins.many_spin_short_time_iz(ring, 0, t)
    print(f"  t = {t}: self {exp.self_coefficient:.8f}, transfers {np.round(exp.transfer[1:], 8)}")
