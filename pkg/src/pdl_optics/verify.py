"""Cross-checks between the closed forms, quadrature and the split-step solver.

Each check returns a :class:`CheckResult` with the measured figure and the
tolerance it was held to. ``run_suite`` fans the checks out over threads and
returns them in a fixed order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .analytic import (
    bures_angle_at,
    energy_variance,
    evolve_closed_form,
    fidelity,
    mean_energy,
    orthogonality_distances,
)
from .core import GaussianSpec, gaussian_state, make_grid
from .metrology import PARAMETERS, sensitivity, switch_time
from .numeric import PotentialModel, effective_gamma, observables, split_step
from .sweep import Axis, sweep_bounds

REFERENCE_CASES = (
    GaussianSpec(1.0, 0.0, 0.0),
    GaussianSpec(1.0, 1.0, 0.5),
    GaussianSpec(1.0, -0.5, 1.2),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<24} measured={self.measured:.3e}  tol={self.tolerance:.1e}  {self.detail}"


def _result(name, measured, tol, detail="", ok=None):
    passed = bool(measured < tol) if ok is None else bool(ok)
    return CheckResult(name, passed, float(measured), float(tol), detail)


def _grid():
    return make_grid(4096, 40.0)


def l2_vs_closed_form(spec: GaussianSpec, dz: float, z_end: float, grid=None) -> float:
    grid = grid or _grid()
    steps = int(round(z_end / dz))
    traj = split_step(gaussian_state(spec, grid), PotentialModel.inverted_parabola(spec.gamma), dz, steps, stride=steps)
    return traj.final.l2_distance(evolve_closed_form(spec, steps * dz).sample(grid))


def check_analytic_numeric(dz=1e-3, cases=REFERENCE_CASES, z_values=(0.5, 1.0)):
    worst = max(l2_vs_closed_form(s, dz, z) for s in cases for z in z_values)
    return _result("analytic_vs_numeric", worst, 1e-6, f"dz={dz:g}, L2 error, {len(cases)} cases")


def check_convergence(dz=1e-3):
    spec = REFERENCE_CASES[0]
    coarse = l2_vs_closed_form(spec, 2 * dz, 0.5)
    fine = l2_vs_closed_form(spec, dz, 0.5)
    ratio = coarse / fine
    ok = 3.5 <= ratio <= 4.5 and fine < 1e-6
    detail = f"error ratio {ratio:.3f}, L2 at dz={dz:g} {fine:.2e}"
    return _result("convergence_order", abs(ratio - 4.0), 0.5, detail, ok)


def quadrature_overlap(spec: GaussianSpec, z: float, half_width: float = 40.0) -> complex:
    psi0 = evolve_closed_form(spec, 0.0)
    psiz = evolve_closed_form(spec, z)

    def part(fn):
        return quad(lambda x: fn(np.conj(psi0(x)) * psiz(x)), -half_width, half_width,
                    limit=400, epsabs=1e-13, epsrel=1e-12)[0]

    return complex(part(np.real), part(np.imag))


def check_vacuum_fidelity(dz=1e-3, z_values=(0.25, 0.5, 1.0, 2.0)):
    spec = REFERENCE_CASES[0]
    grid = _grid()
    launch = gaussian_state(spec, grid)
    steps = int(round(max(z_values) / dz))
    stride = int(round(min(z_values) / dz))
    traj = split_step(launch, PotentialModel.inverted_parabola(1.0), dz, steps, stride=stride)
    by_z = {round(r.z, 9): r for r in traj.records}
    worst = 0.0
    for z in z_values:
        law = math.cosh(z) ** -0.5
        closed = abs(fidelity(spec, z))
        quadr = abs(quadrature_overlap(spec, z))
        numer = abs(by_z[round(z, 9)].overlap)
        worst = max(worst, abs(closed - quadr), abs(closed - numer), abs(quadr - numer), abs(closed - law))
    return _result("vacuum_fidelity", worst, 1e-6, "closed form / quadrature / split-step")


def random_specs(rng, count):
    gammas = rng.uniform(0.3, 3.0, count)
    x0s = rng.uniform(-3.0, 3.0, count)
    p0s = rng.uniform(-3.0, 3.0, count)
    return [GaussianSpec(*v) for v in zip(gammas, x0s, p0s)]


def check_mt_inequality(seed=0, count=200):
    rng = np.random.default_rng(seed)
    specs = random_specs(rng, count)
    zs = rng.uniform(0.0, 3.0, count)
    zs = np.where(zs == 0, 3.0, zs)
    excess = max(bures_angle_at(s, z) - energy_variance(s) * z for s, z in zip(specs, zs))
    return _result("mt_inequality", excess, 1e-9, f"max(L - dH z) over {count} seeded cases")


def tightness_constant(spec: GaussianSpec, us=None) -> float:
    """Smallest ``C`` with ``|L/(dH z) - 1| <= C u^2`` on the sampled reduced distances ``u = gamma z``."""
    us = np.geomspace(1e-3, 0.1, 50) if us is None else np.asarray(us, dtype=float)
    zs = us / spec.gamma
    rel = np.abs(bures_angle_at(spec, zs) / (energy_variance(spec) * zs) - 1.0)
    return float(np.max(rel / us**2))


def check_local_tightness(seed=0, count=200):
    specs = list(REFERENCE_CASES) + random_specs(np.random.default_rng(seed), count)
    c = max(tightness_constant(s) for s in specs)
    detail = f"C in |L/(dH z) - 1| <= C (gamma z)^2, gamma z <= 0.1, {len(specs)} specs"
    return _result("local_tightness", c, 5.0, detail)


def check_moments(seed=0, dz=1e-4, quick=False):
    rng = np.random.default_rng(seed)
    grid = _grid()
    worst_static = 0.0
    worst_drift = 0.0
    worst_norm = 0.0
    per_gamma = 1 if quick else 5
    for gamma in (0.5, 1.0, 2.0):
        for _ in range(per_gamma):
            x0, p0 = rng.uniform(-1.0, 1.0, 2)
            spec = GaussianSpec(gamma, x0, p0)
            model = PotentialModel.inverted_parabola(gamma)
            launch = gaussian_state(spec, grid)
            r0 = observables(launch, launch, model)
            mh, dh = mean_energy(spec), energy_variance(spec)
            worst_static = max(worst_static, abs(r0.mean_h - mh) / max(abs(mh), dh), abs(r0.delta_h - dh) / dh)
            if quick:
                continue
            steps = int(round(1.0 / dz))
            r1 = split_step(launch, model, dz, steps, stride=steps).records[-1]
            scale = max(abs(r0.mean_h), r0.delta_h)
            worst_drift = max(
                worst_drift, abs(r1.mean_h - r0.mean_h) / scale, abs(r1.delta_h - r0.delta_h) / r0.delta_h
            )
    spec = REFERENCE_CASES[1]
    traj = split_step(gaussian_state(spec, grid), PotentialModel.inverted_parabola(1.0), 1e-3, 1000, stride=1000)
    worst_norm = abs(traj.records[-1].norm - 1.0)
    ok = worst_static < 1e-8 and worst_drift < 1e-6 and worst_norm < 1e-10
    detail = (
        f"static {worst_static:.1e} (1e-8), drift {worst_drift:.1e} (1e-6), "
        f"norm/1000 steps {worst_norm:.1e} (1e-10)"
    )
    return _result("moments_conservation", max(worst_static, worst_drift, worst_norm), 1e-6, detail, ok)


def check_asymptotics():
    worst = 0.0
    for spec in (GaussianSpec(1.0, 0.0, 50.0), GaussianSpec(1.0, 50.0, 0.0)):
        z_mt, z_ml = orthogonality_distances(spec)
        approx = math.pi / (math.sqrt(2.0) * 50.0)
        worst = max(worst, abs(z_mt / approx - 1.0), abs(z_ml - math.pi / 2500.0) / (math.pi / 2500.0))
    return _result("asymptotic_regimes", worst, 1e-3, "relative gap to leading-order forms")


def check_sensitivities(seed=0, count=100):
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < count:
        g = rng.uniform(0.3, 3.0)
        x0 = rng.choice([-1, 1]) * rng.uniform(0.2, 3.0)
        p0 = rng.choice([-1, 1]) * rng.uniform(0.2, 3.0)
        spec = GaussianSpec(g, x0, p0)
        if abs(mean_energy(spec)) < 0.1 * energy_variance(spec):
            continue
        for bound in ("MT", "ML"):
            for parameter in PARAMETERS:
                worst = max(worst, sensitivity(spec, parameter, bound).relative_error)
        done += 1
    return _result("sensitivity_gradients", worst, 1e-5, f"analytic vs central FD, {count} points")


def check_lab_arithmetic():
    t = switch_time(1.8e-3, 1.52)
    return _result("switch_time", abs(t / 9e-12 - 1.0), 0.02, f"T = {t * 1e12:.3f} ps for n=1.52, Z=1.8 mm")


def check_sweep_properties(jobs=1):
    table = sweep_bounds(Axis("z", 0.04, 2.0, 50), Axis("a_squared", 0.01, 4.0, 50), theta=0.0, gamma=1.0, jobs=jobs)
    dominance = np.all(table.values["z_ml"][:, 0] > table.values["z_mt"][:, 0])
    rise = float(np.max(np.diff(table.values["z_mt"], axis=1)))
    ok = bool(dominance) and rise <= 0
    return _result("sweep_properties", max(rise, 0.0), 1e-300, f"ML above MT at |a|^2=0.01: {bool(dominance)}", ok)


def nonlocal_variance_gap(z_end=0.3, dz=1e-3, ratio=20.0):
    grid = _grid()
    spec = REFERENCE_CASES[0]
    launch = gaussian_state(spec, grid)
    w = math.sqrt(spec.position_variance)
    sigma = ratio * w
    eta = math.sqrt(2.0 * math.pi) * (sigma**2 + w**2) ** 1.5
    model = PotentialModel.nonlocal_defocusing(eta, sigma)
    fit = effective_gamma(model.potential(grid, launch.samples), grid.x, 0.0, 2.0 * w)
    steps = int(round(z_end / dz))
    stride = max(1, steps // 10)
    nl = split_step(launch, model, dz, steps, stride=stride)
    lin = split_step(launch, PotentialModel.inverted_parabola(fit.gamma, fit.centre), dz, steps, stride=stride)
    return max(abs(a.variance / b.variance - 1.0) for a, b in zip(nl.records, lin.records))


def check_nonlocal():
    gap = nonlocal_variance_gap()
    return _result("nonlocal_consistency", gap, 1e-2, "variance, nonlocal vs fitted linear, z <= 0.3")


def run_suite(dz=1e-3, seed=0, quick=False, jobs=1):
    tasks = [
        lambda: check_analytic_numeric(dz, REFERENCE_CASES[:1] if quick else REFERENCE_CASES),
        lambda: check_convergence(dz),
        lambda: check_mt_inequality(seed),
        lambda: check_local_tightness(seed),
        lambda: check_asymptotics(),
        lambda: check_sensitivities(seed, 20 if quick else 100),
        lambda: check_lab_arithmetic(),
        lambda: check_sweep_properties(),
        lambda: check_moments(seed, quick=quick),
    ]
    if not quick:
        tasks += [lambda: check_vacuum_fidelity(dz), check_nonlocal]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        return list(pool.map(lambda t: t(), tasks))
