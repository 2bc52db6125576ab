"""Experiment harness: the relaxation sweep that measures convergence of the
lambda > 0 solutions to the quasi-stationary (lambda = 0) solution, the
heat-kernel lower-bound estimation, and the boundedness / Lyapunov probes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError
from .mesh import Field, Grid, HelmholtzOperator, helmholtz_solve, norm_lp
from .theory import ChiParams, ConditionParams, condition_ass_pp, r_value, threshold_chi0_pe
from .dynamics import RunResult, SimConfig, run

SWEEP_NORMS = ("linf", "l2")


@dataclass(frozen=True)
class SweepConfig:
    base: SimConfig  # lam field ignored; each run overrides it
    lambdas: tuple[float, ...]
    times: tuple[float, ...]
    norms: tuple[str, ...] = SWEEP_NORMS

    def __post_init__(self):
        if not self.lambdas:
            raise ConfigurationError("sweep.lambdas: must be nonempty")
        if any(l <= 0 for l in self.lambdas):
            raise ConfigurationError("sweep.lambdas: must all be positive")
        if any(b >= a for a, b in zip(self.lambdas, self.lambdas[1:])):
            raise ConfigurationError("sweep.lambdas: must be strictly decreasing")
        if not self.times:
            raise ConfigurationError("sweep.times: must be nonempty")
        if any(not (0 < t <= self.base.t_end) for t in self.times):
            raise ConfigurationError(
                f"sweep.times: must lie in (0, t_end={self.base.t_end}]"
            )
        for nm in self.norms:
            if nm not in SWEEP_NORMS:
                raise ConfigurationError(f"sweep.norms: unknown norm {nm!r}")


@dataclass
class SweepResult:
    lambdas: tuple[float, ...]
    times: tuple[float, ...]
    norms: tuple[str, ...]
    # errors[lam][(field, norm)] is an array over comparison times
    errors: dict[float, dict[tuple[str, str], np.ndarray]]
    e_u: np.ndarray  # summary E_u(lam): max over times and selected norms
    e_v: np.ndarray
    ratios_u: np.ndarray  # E(lam_{i+1}) / E(lam_i)
    ratios_v: np.ndarray
    verdict: str  # "decreasing" | "not monotone" | "n/a"
    runtimes: np.ndarray
    reference: RunResult | None = None
    runs: dict[float, RunResult] = field(default_factory=dict)


def _field_error(a: Field, b: Field, norm: str) -> float:
    diff = Field(a.grid, a.values - b.values)
    return norm_lp(diff, math.inf if norm == "linf" else 2.0)


def lambda_sweep(sw: SweepConfig, keep_runs: bool = False) -> SweepResult:
    """Run the lambda = 0 reference once, then every lambda > 0 on the same
    grid / dt / initial data, and measure u- and v-errors at the comparison
    times. Aborts if any run raises or trips the blow-up ceiling."""
    base = replace(sw.base, snapshot_times=sw.times)
    chi = base.chi
    eta = base.eta
    thr = threshold_chi0_pe(base.grid.dim, chi, eta)
    if not chi.chi0 < thr:
        raise ConfigurationError(
            f"sweep precondition: chi0 = {chi.chi0} is not below the "
            f"lambda-free threshold {thr}"
        )

    def run_one(lam: float) -> tuple[RunResult, float]:
        t0 = time.perf_counter()
        try:
            result = run(replace(base, lam=lam))
        except Exception as exc:
            raise ConfigurationError(f"sweep aborted at lambda={lam}: {exc}") from exc
        elapsed = time.perf_counter() - t0
        if result.blowup is not None:
            raise ConfigurationError(
                f"sweep aborted: blow-up flag at lambda={lam} "
                f"(t={result.blowup.time})"
            )
        return result, elapsed

    ref, _ = run_one(0.0)
    ref_by_time = {round(s.t, 12): s for s in ref.snapshots}

    errors: dict[float, dict[tuple[str, str], np.ndarray]] = {}
    runtimes = []
    runs = {}
    for lam in sw.lambdas:
        result, elapsed = run_one(lam)
        runtimes.append(elapsed)
        per = {}
        for fieldname in ("u", "v"):
            for nm in SWEEP_NORMS:
                per[(fieldname, nm)] = np.array(
                    [
                        _field_error(
                            getattr(s, fieldname),
                            getattr(ref_by_time[round(s.t, 12)], fieldname),
                            nm,
                        )
                        for s in result.snapshots
                    ]
                )
        errors[lam] = per
        if keep_runs:
            runs[lam] = result

    e_u = np.array(
        [max(errors[lam][("u", nm)].max() for nm in sw.norms) for lam in sw.lambdas]
    )
    e_v = np.array(
        [max(errors[lam][("v", nm)].max() for nm in sw.norms) for lam in sw.lambdas]
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios_u = e_u[1:] / e_u[:-1]
        ratios_v = e_v[1:] / e_v[:-1]
    if len(sw.lambdas) < 2:
        verdict = "n/a"
    elif np.all(np.diff(e_u) < 0) and np.all(np.diff(e_v) < 0):
        verdict = "decreasing"
    else:
        verdict = "not monotone"
    return SweepResult(
        lambdas=sw.lambdas,
        times=sw.times,
        norms=sw.norms,
        errors=errors,
        e_u=e_u,
        e_v=e_v,
        ratios_u=ratios_u,
        ratios_v=ratios_v,
        verdict=verdict,
        runtimes=np.array(runtimes),
        reference=ref if keep_runs else None,
        runs=runs,
    )


# ---------------------------------------------------------------------------
# Heat-kernel lower bound c0
# ---------------------------------------------------------------------------


@dataclass
class C0Estimate:
    grid: Grid
    t_star: float
    probe_cells: tuple[int, ...]  # flat row-major cell indices
    per_probe_min: tuple[float, ...]  # min_x w(x, t*) * |Omega| per probe
    c0: float  # min over probes, normalized to the flat-kernel scale

    @property
    def kernel_min(self) -> float:
        """Raw kernel lower bound min_x w(x, t*) per unit source mass (c0
        without the |Omega| normalization); this is the constant that enters
        the signal lower bound eta."""
        return self.c0 / self.grid.measure


def _probe_fractions(dim: int):
    """Deterministic probe positions as domain fractions: center, corners,
    edge midpoints, then dyadic fill."""
    if dim == 1:
        first = [(0.5,), (0.0,), (1.0,)]
        fill = [(0.25,), (0.75,), (0.125,), (0.375,), (0.625,), (0.875,)]
        k = 16
        while True:
            for i in range(1, k, 2):
                fill.append((i / k,))
            k *= 2
            if k > 256:
                break
        return first + fill
    first = [
        (0.5, 0.5),
        (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0),
        (0.5, 0.0), (0.5, 1.0), (0.0, 0.5), (1.0, 0.5),
    ]
    fill = []
    for k in (4, 8, 16):
        for j in range(1, k, 2):
            for i in range(1, k, 2):
                fill.append((i / k, j / k))
    return first + fill


def _fraction_to_cell(grid: Grid, frac) -> int:
    """Flat row-major index of the cell whose center is nearest the fraction."""
    idx = []
    for f, n in zip(frac, grid.cells):
        i = min(int(f * n), n - 1)
        idx.append(i)
    if grid.dim == 1:
        return idx[0]
    ix, iy = idx
    return iy * grid.cells[0] + ix


def estimate_c0(g: Grid, t_star: float = 1.0, probes: int = 5, n_steps: int = 200) -> C0Estimate:
    """Probe the decaying-diffusion kernel from unit-mass point sources.

    For each probe cell, w evolves under w_t = Lap w - w to t_star; the decay
    is handled exactly by the integrating factor e^{-t} and the heat part by
    implicit Euler steps (positivity preserving; discrete mass decays by
    exactly e^{-t_star}). Recorded value per probe: min_x w(x, t*) * |Omega|,
    the flat-kernel-normalized lower bound; c0 is the min over probes.
    """
    if not t_star > 0:
        raise ConfigurationError(f"t_star must be > 0, got {t_star}")
    if probes < 1:
        raise ConfigurationError(f"probes must be >= 1, got {probes}")
    fractions = _probe_fractions(g.dim)
    cells = []
    for frac in fractions:
        c = _fraction_to_cell(g, frac)
        if c not in cells:
            cells.append(c)
        if len(cells) == probes:
            break
    if len(cells) < probes:
        raise ConfigurationError(
            f"probes={probes} exceeds the {len(cells)} distinct probe cells "
            f"available on this grid"
        )

    dt = t_star / n_steps
    op = HelmholtzOperator(g, 1.0 / dt)
    decay = math.exp(-t_star)
    minima = []
    for cell in cells:
        w = np.zeros(g.n_cells)
        w[cell] = 1.0 / g.cell_volume  # unit mass
        w = w.reshape(g.shape)
        for _ in range(n_steps):
            w = helmholtz_solve(op, Field(g, w / dt), 1e-12).values
        w = w * decay
        wmin = float(w.min())
        if wmin <= 0.0:
            raise RuntimeError(
                "internal error: implicit diffusion produced a nonpositive minimum"
            )
        minima.append(wmin * g.measure)
    return C0Estimate(
        grid=g,
        t_star=t_star,
        probe_cells=tuple(cells),
        per_probe_min=tuple(minima),
        c0=min(minima),
    )


# ---------------------------------------------------------------------------
# Boundedness and Lyapunov probes
# ---------------------------------------------------------------------------


@dataclass
class BoundednessReport:
    lambdas: tuple[float, ...]
    suprema: tuple[float, ...]  # sup_t (|u|_inf + W^{1,q} of v) per lambda
    ratio: float | None  # max/min across lambdas; None if any run blew up
    blowups: dict[float, float]  # lambda -> blow-up time


def boundedness_probe(base: SimConfig, lambdas) -> BoundednessReport:
    """Record sup_t(|u|_inf + W^{1,q}(v)) per lambda; a max/min ratio near 1
    evidences the uniform-in-lambda bound below the threshold."""
    thr = threshold_chi0_pe(base.grid.dim, base.chi, base.eta)
    if not base.chi.chi0 < thr:
        raise ConfigurationError(
            f"boundedness probe precondition: chi0 = {base.chi.chi0} is not "
            f"below the lambda-free threshold {thr}"
        )
    sups = []
    blowups = {}
    for lam in lambdas:
        result = run(replace(base, lam=lam))
        if result.blowup is not None:
            blowups[lam] = result.blowup.time
            sups.append(math.inf)
            continue
        sups.append(max(r.linf_u + r.w1q_v for r in result.records))
    ratio = None if blowups else max(sups) / min(sups)
    return BoundednessReport(
        lambdas=tuple(lambdas), suprema=tuple(sups), ratio=ratio, blowups=blowups
    )


@dataclass
class LyapunovReport:
    p: float
    eps: float
    lam: float
    r: float
    times: np.ndarray
    values: np.ndarray
    sup: float
    slope: float  # trailing-half linear fit
    slope_stderr: float


def lyapunov_probe(base: SimConfig, p: float, eps: float) -> LyapunovReport:
    """Monitor the weighted functional along a run with admissible (p, eps).

    Precondition: the smallness condition holds for (p, eps, lambda) at the
    configured eta, and lambda > 0.
    """
    if not base.lam > 0:
        raise ConfigurationError("lyapunov probe requires lambda > 0")
    cond = ConditionParams(p=p, eps=eps, lam=base.lam, n=base.grid.dim)
    if not condition_ass_pp(cond, base.chi, base.eta):
        raise ConfigurationError(
            "lyapunov probe precondition: the smallness condition "
            f"((1-lam+2*lam*eps)+ p + sqrt(p f_p)) chi0 / (2(1-eps)) "
            f"<= k (a+eta)^k fails for p={p}, eps={eps}, lambda={base.lam}, "
            f"chi0={base.chi.chi0}, eta={base.eta}"
        )
    r = r_value(cond, base.chi)
    cfg = replace(base, lyapunov_p=p, lyapunov_eps=eps)
    result = run(cfg)
    times = np.array([rec.t for rec in result.records])
    values = np.array([rec.lyapunov for rec in result.records])
    half = times >= times[-1] / 2.0
    slope, stderr = _slope_with_stderr(times[half], values[half])
    return LyapunovReport(
        p=p,
        eps=eps,
        lam=base.lam,
        r=r,
        times=times,
        values=values,
        sup=float(values.max()),
        slope=slope,
        slope_stderr=stderr,
    )


def _slope_with_stderr(t: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Ordinary least-squares slope and its standard error."""
    n = len(t)
    if n < 3:
        return 0.0, 0.0
    tbar = t.mean()
    ybar = y.mean()
    sxx = float(np.sum((t - tbar) ** 2))
    slope = float(np.sum((t - tbar) * (y - ybar)) / sxx)
    resid = y - (ybar + slope * (t - tbar))
    var = float(np.sum(resid**2)) / (n - 2)
    return slope, math.sqrt(var / sxx)
