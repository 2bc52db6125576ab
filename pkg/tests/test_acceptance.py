"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The simulation criteria share one scenario: a unit-mass-scale bump on a
4-unit interval with 512 cells, dt = 1e-4, t_end = 1, sensitivity envelope
a = 1, k = 2, and chi0 set to half the lambda-free smallness threshold
evaluated at the estimated signal floor eta.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from chemolab import (
    ChiParams,
    Field,
    FieldInit,
    GridSpec,
    HelmholtzOperator,
    SimConfig,
    SweepConfig,
    EtaInputs,
    build_grid,
    estimate_c0,
    eta_closed_form,
    helmholtz_solve,
    init_state,
    lambda_sweep,
    laplacian_apply,
    lyapunov_probe,
    norm_lp,
    run,
    run_property_suite,
    threshold_chi0_pe,
)
from chemolab.cli import main
from chemolab.io import SUMMARY_HEADER, SWEEP_HEADER, read_csv_strict

LAMBDA_LADDER = (1e-1, 1e-2, 1e-3, 1e-4)
COMPARISON_TIMES = (0.5, 1.0)


def _report(capsys, name, ok, detail=""):
    with capsys.disabled():
        print(f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'}"
              + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def scenario():
    """Estimated kernel constant, signal floor, and the below-threshold
    configuration built from them."""
    grid = build_grid(1, 4.0, 512)
    est = estimate_c0(grid, t_star=1.0, probes=3)
    chi_shape = ChiParams(chi0=1.0, a=1.0, k=2.0)  # chi0 placeholder
    proto = SimConfig(
        grid=GridSpec(1, (4.0,), (512,)),
        chi=chi_shape,
        lam=0.0,
        dt=1e-4,
        t_end=1.0,
        init_u=FieldInit(kind="gaussian", base=0.1, amplitude=5.0, sigma=0.2, center=(2.0,)),
        init_v=FieldInit(kind="constant", value=1.0),
        diag_every=100,
    )
    st0 = init_state(proto)
    mass = float(st0.u.values.sum()) * grid.cell_volume
    eta = eta_closed_form(
        EtaInputs(c0=est.kernel_min, mass=mass, vmin=float(st0.v.values.min()))
    )
    chi0 = 0.5 * threshold_chi0_pe(1, chi_shape, eta)
    base = replace(proto, chi=ChiParams(chi0=chi0, a=1.0, k=2.0), eta=eta)
    return {"base": base, "eta": eta, "c0": est, "mass": mass}


@pytest.fixture(scope="module")
def bump_run(scenario):
    return run(replace(scenario["base"], lam=0.01))


@pytest.fixture(scope="module")
def sweep_result(scenario):
    sw = SweepConfig(
        base=scenario["base"], lambdas=LAMBDA_LADDER, times=COMPARISON_TIMES
    )
    t0 = time.perf_counter()
    result = lambda_sweep(sw, keep_runs=True)
    return result, time.perf_counter() - t0


def test_theory_property_suite(capsys):
    results = run_property_suite()  # acceptance counts are the defaults
    failed = [r for r in results if not r.passed]
    detail = "; ".join(f"{r.name}({r.checked})" for r in results)
    _report(capsys, "theory_property_suite", not failed,
            detail if not failed else f"failed: {[r.name for r in failed]}")


def test_discretization_convergence(capsys):
    lap_errs, helm_errs = [], []
    for nx in (128, 256, 512):
        g = build_grid(1, 1.0, nx)
        x = g.cell_centers()
        exact = np.cos(np.pi * x)
        lap = laplacian_apply(g, Field(g, exact))
        lap_errs.append(float(np.abs(lap.values + np.pi**2 * exact).max()))
        rhs = Field(g, (1.0 + np.pi**2) * exact)
        w = helmholtz_solve(HelmholtzOperator(g, 1.0), rhs, 1e-10)
        helm_errs.append(norm_lp(Field(g, w.values - exact), 2.0))
    ratios = [lap_errs[i] / lap_errs[i + 1] for i in range(2)]
    ratios += [helm_errs[i] / helm_errs[i + 1] for i in range(2)]
    ok = all(3.5 <= r <= 4.5 for r in ratios)
    _report(capsys, "discretization_convergence", ok,
            "h-halving ratios " + ", ".join(f"{r:.3f}" for r in ratios))


def test_conservation_and_steady_state(capsys, scenario, bump_run):
    m0 = bump_run.records[0].mass
    drift = max(abs(r.mass - m0) / m0 for r in bump_run.records)
    ok = drift <= 1e-9 and bump_run.blowup is None

    worst_dev = 0.0
    for lam in (0.0, 1e-3, 1e-1, 1.0):
        cfg = replace(
            scenario["base"],
            lam=lam,
            init_u=FieldInit(kind="constant", value=1.0),
            init_v=FieldInit(kind="constant", value=1.0),
        )
        res = run(cfg)
        dev = max(
            float(np.abs(res.final.u.values - 1.0).max()),
            float(np.abs(res.final.v.values - 1.0).max()),
        )
        worst_dev = max(worst_dev, dev)
    ok = ok and worst_dev <= 1e-12
    _report(capsys, "conservation_and_steady_state", ok,
            f"mass drift {drift:.2e} <= 1e-9, constant-data deviation "
            f"{worst_dev:.2e} <= 1e-12")


def test_lower_bound_min_v(capsys, scenario, bump_run):
    eta = scenario["eta"]
    dt = scenario["base"].dt
    later = [r for r in bump_run.records if r.t >= 10 * dt]
    worst = min(r.min_v for r in later)
    ok = eta > 0 and worst >= 0.95 * eta
    _report(capsys, "lower_bound_min_v", ok,
            f"min_v {worst:.4f} >= 0.95*eta = {0.95 * eta:.4f}")


def test_fast_signal_diffusion_limit(capsys, sweep_result):
    result, elapsed = sweep_result
    decreasing = bool(np.all(np.diff(result.e_u) < 0) and np.all(np.diff(result.e_v) < 0))
    decay_u = result.e_u[-1] / result.e_u[0]
    decay_v = result.e_v[-1] / result.e_v[0]
    ok = (
        decreasing
        and decay_u <= 0.05
        and decay_v <= 0.05
        and elapsed <= 120.0
    )
    _report(capsys, "fast_signal_diffusion_limit", ok,
            f"E_u decay {decay_u:.2e}, E_v decay {decay_v:.2e} <= 0.05, "
            f"strictly decreasing: {decreasing}, runtime {elapsed:.1f}s <= 120s")


def test_uniform_in_lambda_boundedness(capsys, sweep_result):
    result, _ = sweep_result
    sups = [
        max(r.linf_u + r.w1q_v for r in result.runs[lam].records)
        for lam in result.lambdas
    ]
    ratio = max(sups) / min(sups)
    ok = ratio <= 2.0
    _report(capsys, "uniform_in_lambda_boundedness", ok,
            f"sup ratio across ladder {ratio:.4f} <= 2")


def test_lyapunov_boundedness(capsys, scenario):
    # admissible parameters need chi0 below k(a+eta)^k / (p-ish): use a run
    # of the same bump with a smaller sensitivity amplitude
    base = replace(
        scenario["base"],
        chi=ChiParams(chi0=0.7, a=1.0, k=2.0),
        lam=0.01,
    )
    rep = lyapunov_probe(base, p=2.0, eps=0.25)
    ok = math.isfinite(rep.sup) and rep.slope <= 3.0 * rep.slope_stderr
    _report(capsys, "lyapunov_boundedness", ok,
            f"sup {rep.sup:.4f} finite, trailing slope {rep.slope:.3e} <= "
            f"3*stderr = {3.0 * rep.slope_stderr:.3e}")


def test_sweep_determinism(capsys, scenario, tmp_path):
    base = scenario["base"]
    cfg_text = f"""
[grid]
dim = 1
lx = {base.grid.extents[0]!r}
nx = {base.grid.cells[0]}

[chi]
chi0 = {base.chi.chi0!r}
a = {base.chi.a!r}
k = {base.chi.k!r}

[time]
dt = {base.dt!r}
t_end = {base.t_end!r}

[init]
preset = gaussian-bump
u_base = 0.1
u_amplitude = 5.0
u_sigma = 0.2
u_center = 2.0

[output]
every = 100
eta = {base.eta!r}

[sweep]
lambdas = 0.1 0.01 0.001 0.0001
times = 0.5 1.0
"""
    cfg_path = tmp_path / "acceptance_sweep.cfg"
    cfg_path.write_text(cfg_text)
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    rc1 = main(["sweep", "--config", str(cfg_path), "--out", str(out1)])
    rc2 = main(["sweep", "--config", str(cfg_path), "--out", str(out2)])
    identical_sweep = (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
    s1 = [r[:3] for r in read_csv_strict(out1 / "summary.csv", SUMMARY_HEADER)]
    s2 = [r[:3] for r in read_csv_strict(out2 / "summary.csv", SUMMARY_HEADER)]
    ok = rc1 == 0 and rc2 == 0 and identical_sweep and s1 == s2
    _report(capsys, "sweep_determinism", ok,
            "sweep.csv bit-identical, summary identical up to wall clock")
