"""Closed form versus oracle: the self-check suite behind ``zeno-sense validate``.

Every check resolves the functions it tests through their modules at call
time (``qfi.d_alpha_d_wx`` rather than a captured reference), so a patched
or regressed implementation is what gets checked.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np
from scipy import optimize

from . import bloch, figures, oracle, qfi, specfun, spins
from .bloch import PrecessionFrequency, TWO_PI

__all__ = ["CheckResult", "CHECKS", "run_checks"]

THETA = figures.FIGURE_THETA


@dataclass
class CheckResult:
    name: str
    tolerance: float
    deviation: float
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<32} deviation={self.deviation:.3e}  tolerance={self.tolerance:.1e}"


CHECKS = {}


def _check(name, tolerance):
    def register(fn):
        def run(rng):
            deviation, details = fn(rng)
            deviation = float(deviation)
            passed = bool(np.isfinite(deviation) and deviation <= tolerance)
            return CheckResult(name, tolerance, deviation, passed, details)

        CHECKS[name] = run
        return fn

    return register


def _rel(a, b):
    return abs(a - b) / abs(b)


def _random_ball(rng, n, radius):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * (radius * rng.random(n) ** (1.0 / 3.0))[:, None]


@_check("bloch_eigen_equivalence", 1e-9)
def _bloch_eigen(rng):
    n = 10_000
    mus = _random_ball(rng, n, 0.999)
    dmus = rng.normal(size=(n, 3))
    devs = np.empty(n)
    for k in range(n):
        drho = 0.5 * sum(d * oracle.PAULI[a] for d, a in zip(dmus[k], "xyz"))
        ref = oracle.qfi_eigen(oracle.qubit_density(mus[k]), drho)
        devs[k] = _rel(qfi.qfi_from_polarization(mus[k], dmus[k]), ref)
    stats = {"samples": n, "max": float(devs.max()), "mean": float(devs.mean()), "median": float(np.median(devs))}
    return devs.max(), stats


@_check("d_alpha_d_wx_finite_difference", 1e-7)
def _d_alpha(rng):
    worst = 0.0
    for _ in range(50):
        om = PrecessionFrequency.from_theta(rng.uniform(0.05, 1.5), rng.uniform(1.0, 10.0))
        tau = rng.uniform(0.01, 2.0)
        h = 1e-6 * abs(om.wx)
        fd = (bloch.alpha(om.with_wx(om.wx + h), tau) - bloch.alpha(om.with_wx(om.wx - h), tau)) / (2 * h)
        worst = max(worst, abs(qfi.d_alpha_d_wx(om, tau) - fd) / max(abs(fd), 1e-3))
    return worst, {"samples": 50}


@_check("coherent_closed_form", 1e-5)
def _coherent(rng):
    worst = 0.0
    for _ in range(100):
        om = PrecessionFrequency.from_theta(rng.uniform(0.0, 0.49 * math.pi))
        t = rng.uniform(0.0, 50.0)
        worst = max(worst, _rel(float(qfi.qfi_coherent(om, 1.0, t)), oracle.oracle_qfi_coherent(om, 1.0, t)))
    return worst, {"samples": 100}


@_check("coherent_long_time", 0.05)
def _coherent_long(rng):
    om = PrecessionFrequency.from_theta(THETA)
    t = 100.0 * om.wz / om.wx**2
    return _rel(float(qfi.qfi_coherent_longtime(om, 1.0, t)), float(qfi.qfi_coherent(om, 1.0, t))), {"t": t}


@_check("projected_closed_form", 1e-4)
def _projected(rng):
    om = PrecessionFrequency.from_theta(THETA)
    worst = 0.0
    for _ in range(50):
        tau = rng.uniform(0.01, 0.99)
        t = int(rng.integers(1, 60)) * tau
        ref = oracle.oracle_qfi_projected(om, 1.0, tau, t)
        for formula in ("stroboscopic_approx", "appendixB_full"):
            worst = max(worst, _rel(float(qfi.qfi_projected(om, 1.0, tau, t, formula=formula)), ref))
    return worst, {"samples": 50}


@_check("xi_endpoints", 0.0)
def _xi(rng):
    x1, x0 = specfun.xi(1.0), specfun.xi(0.0)
    ok = 0.79 <= x1 <= 0.80 and x0 == 1.0
    return 0.0 if ok else math.inf, {"xi(1)": x1, "xi(0)": x0}


@_check("zeno_plateau", 0.02)
def _zeno(rng):
    om = PrecessionFrequency.from_theta(THETA)
    tau = 1e-3 * TWO_PI / om.w
    worst, ratio = 0.0, 0.0
    for mu0 in (0.2, 0.6, 1.0):
        peak = qfi.qfi_projected_max(om, mu0, tau)
        worst = max(worst, _rel(peak, 4.0 * specfun.phi(mu0) / om.wx**2))
        doubled = qfi.qfi_projected_max(PrecessionFrequency(om.wx, 2.0 * om.wz), mu0, tau)
        ratio = max(ratio, _rel(doubled, peak))
    # the offset-doubling tolerance is half the plateau one
    return max(worst, 2.0 * ratio), {"plateau_rel": worst, "doubling_rel": ratio}


@_check("anti_zeno_window", 0.0)
def _anti_zeno(rng):
    tau = bloch.anti_zeno_tau(PrecessionFrequency.from_theta(THETA))
    return (0.0 if 0.36 <= tau <= 0.39 else math.inf), {"tau": tau}


@_check("anti_zeno_tan_condition", 1e-3)
def _anti_zeno_tan(rng):
    om = PrecessionFrequency(1.0, 100.0)
    x = om.w * bloch.anti_zeno_tau(om, grid=20001)
    root = optimize.brentq(lambda y: y - math.tan(y / 2.0), 2.0, 3.0)
    return abs(x - root), {"w_tau": x, "root": root}


@_check("peak_identity", 1e-3)
def _peak(rng):
    om = PrecessionFrequency.from_theta(THETA)
    ident = 0.0
    worst = 0.0
    for tau in (0.1, 0.3, 0.5):
        tm = qfi.t_max(om, 1.0, tau)
        ident = max(ident, _rel(tm, specfun.xi(1.0) * bloch.characteristic_time(om, tau)))
        res = optimize.minimize_scalar(
            lambda t: -float(qfi.qfi_projected(om, 1.0, tau, t)), bounds=(0.1 * tm, 3.0 * tm),
            method="bounded", options={"xatol": 1e-10 * tm},
        )
        worst = max(worst, _rel(res.x, tm), _rel(-res.fun, qfi.qfi_projected_max(om, 1.0, tau)))
    if ident > 1e-10:
        worst = math.inf
    return worst, {"identity_rel": ident, "maximizer_rel": worst}


@_check("crossover_consistency", 1e-6)
def _crossover(rng):
    worst = 0.0
    for _ in range(20):
        om = PrecessionFrequency.from_theta(rng.uniform(0.1, 1.5))
        mu0 = rng.uniform(0.05, 1.0)
        tb = qfi.projective_wins_time_bound(om, mu0)
        worst = max(worst, abs(qfi.qfi_ratio_max(om, mu0, tb) - 1.0))
    return worst, {"samples": 20}


@_check("boundary_fit", 0.10)
def _boundary(rng):
    thetas = figures.Axis(0.01, 1.56, 156).values()
    ts = figures.Axis(0.1, 100.0, 200, log=True).values()
    fit = figures.fig5_boundary_fit(thetas, ts, figures.fig5_grid(thetas, ts))
    return fit.residual, {"c": fit.constant, "points": len(fit.t), "t_min": fit.t_min}


@_check("two_spin_mapping", 1e-10)
def _two_spin(rng):
    obs = spins.two_spin_block_observable()
    worst = 0.0
    mu0 = 0.8
    rho0 = spins.two_spin_initial_state(mu0)
    for b in np.linspace(-2.0, 2.0, 10) + 0.05:
        for delta in np.linspace(-3.0, 3.0, 10):
            spec = spins.TwoSpinSpec(b, delta)
            H = spins.two_spin_hamiltonian(spec)
            for t in np.linspace(0.0, 10.0, 10):
                val = np.trace(oracle.propagate_unitary(H, rho0, t) @ obs).real
                worst = max(worst, abs(val - spins.two_spin_muz(spec, mu0, t)))
    return worst, {"points": 1000}


def _block_populations(H, psi0, t):
    e, v = np.linalg.eigh(H)
    return np.abs((v * np.exp(-1j * e * t)) @ v.conj().T @ psi0) ** 2


@_check("three_spin_reduction", 1e-10)
def _three_spin(rng):
    worst, frozen = 0.0, 0.0
    psi0 = np.array([0.0, 1.0, 0.0])
    for _ in range(10):
        b = rng.uniform(0.3, 2.0)
        spec = spins.ThreeSpinSpec(b, b, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
        om = spins.three_spin_effective_omega(spec)
        Hb = spins.three_spin_block_hamiltonian(spec)
        for t in np.linspace(0.0, 20.0, 41):
            p = _block_populations(Hb, psi0, t)
            worst = max(worst, abs((p[1] - p[0]) - bloch.alpha(om, t)))
            frozen = max(frozen, p[2])
    # the decoupled population must also stay put to 1e-12
    return worst if frozen <= 1e-12 else math.inf, {"antisymmetric_population": frozen}


@_check("block_structure", 1e-14)
def _blocks(rng):
    worst = 0.0
    for H, n in (
        (spins.two_spin_hamiltonian(spins.TwoSpinSpec(0.7, 0.3)), 2),
        (spins.three_spin_hamiltonian(spins.ThreeSpinSpec(0.7, -0.4, 0.5, 0.3, 0.2)), 3),
    ):
        mz = sum(ops[2] for ops in oracle.spin_operators(n))
        worst = max(worst, np.abs(H @ mz - mz @ H).max())
    return worst, {}


def _trotter_data(rng):
    b = np.triu(rng.uniform(0.5, 2.0, (4, 4)), 1)
    spec = spins.ManySpinSpec(rng.uniform(-1.0, 1.0, 4), b + b.T)
    H = spins.many_spin_hamiltonian(spec)
    rho0 = spins.many_spin_initial_state(spec, 0, 1.0)
    iz = oracle.spin_operators(4)[0][2]
    bmax = spec.couplings.max()
    ts = np.geomspace(0.005, 0.04, 7) / bmax
    exact = np.array([2.0 * np.trace(oracle.propagate_unitary(H, rho0, t) @ iz).real for t in ts])
    approx = np.array([spins.many_spin_short_time_iz(spec, 0, t).self_coefficient for t in ts])
    t_ref = 0.02 / bmax
    ex_ref = 2.0 * np.trace(oracle.propagate_unitary(H, rho0, t_ref) @ iz).real
    ap_ref = spins.many_spin_short_time_iz(spec, 0, t_ref).self_coefficient
    return ts, np.abs(exact - approx), abs(ex_ref - ap_ref) / abs(1.0 - ex_ref)


@_check("trotter_exponent", 0.0)
def _trotter_exp(rng):
    ts, resid, _ = _trotter_data(rng)
    slope = np.polyfit(np.log(ts), np.log(resid), 1)[0]
    return max(0.0, 2.7 - slope), {"exponent": float(slope)}


@_check("trotter_relative_error", 0.01)
def _trotter_rel(rng):
    _, _, rel = _trotter_data(rng)
    return rel, {}


@_check("sign_irrelevance", 1e-12)
def _signs(rng):
    worst = 0.0
    for _ in range(20):
        b, d = rng.uniform(0.2, 2.0), rng.uniform(-2.0, 2.0)
        pairs = [
            (spins.two_spin_projective_bound(spins.TwoSpinSpec(b, d)),
             spins.two_spin_projective_bound(spins.TwoSpinSpec(-b, d))),
            (spins.three_spin_projective_bound(spins.ThreeSpinSpec(b, b, 0.3, d)),
             spins.three_spin_projective_bound(spins.ThreeSpinSpec(-b, -b, 0.3, d))),
            (float(qfi.qfi_coherent(PrecessionFrequency(b, d), 1.0, 3.0)),
             float(qfi.qfi_coherent(PrecessionFrequency(-b, d), 1.0, 3.0))),
            (qfi.qfi_projected_max(PrecessionFrequency(b, d), 1.0, 0.2),
             qfi.qfi_projected_max(PrecessionFrequency(-b, d), 1.0, 0.2)),
        ]
        worst = max(worst, max(_rel(x, y) for x, y in pairs))
    return worst, {}


def run_checks(names=None, seed=0):
    """Run the named checks (all by default) with a seeded generator each."""
    out = []
    for name in names or CHECKS:
        start = time.perf_counter()
        res = CHECKS[name](np.random.default_rng(seed))
        res.details["seconds"] = round(time.perf_counter() - start, 3)
        out.append(res)
    return out
