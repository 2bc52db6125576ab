"""Time integration of the coupled density/signal system by first-order IMEX
Euler, for any relaxation constant lambda >= 0 with a single code path.

Each step updates the signal first,

    ((lam/dt + 1) I - Lap) v_new = (lam/dt) v_old + u_old,

which at lam = 0 IS the quasi-stationary elliptic solve, then the density,

    ((1/dt) I - Lap) u_new = (1/dt) u_old - div(u_old chi(v_new) grad v_new),

with implicit diffusion and explicit chemotaxis. Both updates are conservative,
so the discrete mass of u is preserved to solver accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, PositivityError, StepError
from .mesh import (
    Field,
    Grid,
    HelmholtzOperator,
    build_grid,
    chemotaxis_divergence,
    helmholtz_solve,
    w1q_norm,
)
from .theory import (
    ChiParams,
    ConditionParams,
    count_weight_clamps,
    lyapunov_functional,
    r_value,
)

NEGATIVITY_TOL = 1e-9  # relative to max |u|; centered fluxes may undershoot


@dataclass(frozen=True)
class GridSpec:
    dim: int
    extents: tuple[float, ...]
    cells: tuple[int, ...]

    def build(self) -> Grid:
        return build_grid(self.dim, self.extents, self.cells)


@dataclass(frozen=True)
class FieldInit:
    """One field's initial profile: a constant or an isotropic bump on a base."""

    kind: str  # "constant" | "gaussian"
    value: float = 0.0  # constant level
    base: float = 0.0
    amplitude: float = 0.0
    sigma: float = 0.1
    center: tuple[float, ...] = (0.5,)

    def sample(self, grid: Grid) -> np.ndarray:
        if self.kind == "constant":
            return np.full(grid.shape, float(self.value))
        if self.kind == "gaussian":
            if len(self.center) != grid.dim:
                raise ConfigurationError(
                    f"init center {self.center} does not match grid dim {grid.dim}"
                )
            if not self.sigma > 0:
                raise ConfigurationError(f"init.sigma: must be > 0, got {self.sigma}")
            if grid.dim == 1:
                x = grid.cell_centers()
                r2 = (x - self.center[0]) ** 2
            else:
                X, Y = grid.cell_centers()
                r2 = (X - self.center[0]) ** 2 + (Y - self.center[1]) ** 2
            return self.base + self.amplitude * np.exp(-r2 / (2.0 * self.sigma**2))
        raise ConfigurationError(f"unknown init kind {self.kind!r}")


@dataclass(frozen=True)
class SimConfig:
    grid: GridSpec
    chi: ChiParams
    lam: float
    dt: float
    t_end: float
    init_u: FieldInit
    init_v: FieldInit
    solver_tol: float = 1e-10
    flux: str = "centered"  # or "upwind"
    diag_every: int = 100
    snapshot_times: tuple[float, ...] = ()
    q: float | None = None  # W^{1,q} diagnostic; default dim + 1
    lyapunov_p: float = 2.0
    lyapunov_eps: float = 0.25
    eta: float = 0.0  # lower-bound reference used in diagnostics and weights
    blowup_factor: float = 1e6

    def __post_init__(self):
        if not self.lam >= 0:
            raise ConfigurationError(f"time.lambda: must be >= 0, got {self.lam}")
        if not self.dt > 0:
            raise ConfigurationError(f"time.dt: must be > 0, got {self.dt}")
        if not self.t_end >= self.dt:
            raise ConfigurationError(
                f"time.t_end: must be >= dt, got t_end={self.t_end}, dt={self.dt}"
            )
        if self.flux not in ("centered", "upwind"):
            raise ConfigurationError(
                f"time.flux: must be 'centered' or 'upwind', got {self.flux!r}"
            )
        if not self.solver_tol > 0:
            raise ConfigurationError(
                f"time.solver_tol: must be > 0, got {self.solver_tol}"
            )
        if self.diag_every < 1:
            raise ConfigurationError(
                f"output.every: must be >= 1, got {self.diag_every}"
            )
        if not self.lyapunov_p > 1:
            raise ConfigurationError(
                f"output.lyapunov_p: must be > 1, got {self.lyapunov_p}"
            )
        if not (0 <= self.lyapunov_eps < 0.5):
            raise ConfigurationError(
                f"output.lyapunov_eps: must be in [0, 1/2), got {self.lyapunov_eps}"
            )
        if not self.eta >= 0:
            raise ConfigurationError(f"output.eta: must be >= 0, got {self.eta}")
        if not self.blowup_factor > 1:
            raise ConfigurationError(
                f"time.blowup_factor: must be > 1, got {self.blowup_factor}"
            )
        for t in self.snapshot_times:
            if not (0 <= t <= self.t_end):
                raise ConfigurationError(
                    f"output.snapshot_times: {t} outside [0, t_end]"
                )

    @property
    def q_effective(self) -> float:
        return float(self.grid.dim + 1) if self.q is None else self.q

    @property
    def weight_r(self) -> float:
        cond = ConditionParams(
            p=self.lyapunov_p, eps=self.lyapunov_eps, lam=self.lam, n=self.grid.dim
        )
        return r_value(cond, self.chi)


@dataclass(frozen=True)
class SimState:
    u: Field
    v: Field
    t: float


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    min_v: float
    max_u: float
    linf_u: float
    w1q_v: float
    lyapunov: float
    clamped_cells: int
    negative_cells: int


@dataclass(frozen=True)
class BlowUp:
    time: float
    max_u: float
    ceiling: float


@dataclass
class RunResult:
    final: SimState
    records: list[DiagnosticsRecord] = field(default_factory=list)
    snapshots: list[SimState] = field(default_factory=list)
    blowup: BlowUp | None = None


def init_state(cfg: SimConfig) -> SimState:
    """Sample the initial data at cell centers and enforce the admissibility
    dichotomy: u >= 0 and not identically 0; v > 0 when a = 0, else v >= 0 and
    not identically 0."""
    grid = cfg.grid.build()
    u = cfg.init_u.sample(grid)
    v = cfg.init_v.sample(grid)
    if u.min() < 0:
        raise ConfigurationError("init: u must be nonnegative")
    if u.max() == 0:
        raise ConfigurationError("init: u must not be identically zero")
    if cfg.chi.a == 0:
        if v.min() <= 0:
            raise ConfigurationError("init: v must be strictly positive when a = 0")
    else:
        if v.min() < 0:
            raise ConfigurationError("init: v must be nonnegative")
        if v.max() == 0:
            raise ConfigurationError("init: v must not be identically zero")
    return SimState(Field(grid, u), Field(grid, v), 0.0)


class Stepper:
    """IMEX update with the two Helmholtz operators factored once per run."""

    def __init__(self, cfg: SimConfig, grid: Grid):
        self.cfg = cfg
        self.grid = grid
        self.op_v = HelmholtzOperator(grid, cfg.lam / cfg.dt + 1.0)
        self.op_u = HelmholtzOperator(grid, 1.0 / cfg.dt)
        self.upwind = cfg.flux == "upwind"

    def advance(self, state: SimState) -> SimState:
        cfg = self.cfg
        dt = cfg.dt
        u_old, v_old = state.u, state.v
        rhs_v = Field(self.grid, (cfg.lam / dt) * v_old.values + u_old.values)
        v_new = helmholtz_solve(self.op_v, rhs_v, cfg.solver_tol)
        drift = chemotaxis_divergence(self.grid, u_old, v_new, cfg.chi, self.upwind)
        rhs_u = Field(self.grid, u_old.values / dt - drift.values)
        u_new = helmholtz_solve(self.op_u, rhs_u, cfg.solver_tol)

        scale = max(float(np.abs(u_new.values).max()), float(np.abs(u_old.values).max()))
        umin = float(u_new.values.min())
        if umin < -NEGATIVITY_TOL * scale:
            cell = int(np.argmin(u_new.values))
            raise PositivityError(
                f"u fell to {umin:.3e} (tolerance {-NEGATIVITY_TOL * scale:.3e}) "
                f"in cell {cell}",
                cell=cell,
                value=umin,
                time=state.t + dt,
            )
        return SimState(u_new, v_new, state.t + dt)


def step(state: SimState, cfg: SimConfig) -> SimState:
    """Single IMEX step (operators rebuilt per call; use run() for full runs)."""
    return Stepper(cfg, state.u.grid).advance(state)


def diagnostics(state: SimState, cfg: SimConfig, r: float | None = None) -> DiagnosticsRecord:
    if r is None:
        r = cfg.weight_r
    grid = state.u.grid
    uv = state.u.values
    return DiagnosticsRecord(
        t=state.t,
        mass=float(uv.sum()) * grid.cell_volume,
        min_v=float(state.v.values.min()),
        max_u=float(uv.max()),
        linf_u=float(np.abs(uv).max()),
        w1q_v=w1q_norm(grid, state.v, cfg.q_effective),
        lyapunov=lyapunov_functional(
            state.u, state.v, cfg.lyapunov_p, r, cfg.chi, cfg.eta
        ),
        clamped_cells=count_weight_clamps(state.v, cfg.eta),
        negative_cells=int(np.count_nonzero(uv < 0.0)),
    )


def _snapshot_steps(cfg: SimConfig, n_steps: int) -> dict[int, float]:
    """Map snapshot times to step indices; times must sit on the step grid."""
    out = {}
    for t in cfg.snapshot_times:
        k = int(round(t / cfg.dt))
        if abs(k * cfg.dt - t) > 1e-9 * max(t, cfg.dt) or k > n_steps:
            raise ConfigurationError(
                f"output.snapshot_times: {t} is not a multiple of dt within t_end"
            )
        out[k] = t
    return out


def run(cfg: SimConfig) -> RunResult:
    """Integrate from t = 0 to t_end, recording diagnostics at the configured
    cadence and snapshots at the configured times.

    Halts early with a blow-up flag once max u exceeds blowup_factor times its
    initial value; step failures are re-raised with the failure time attached.
    """
    state = init_state(cfg)
    stepper = Stepper(cfg, state.u.grid)
    r = cfg.weight_r
    n_steps = int(round(cfg.t_end / cfg.dt))
    if abs(n_steps * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end:
        raise ConfigurationError(
            f"time.t_end: {cfg.t_end} is not an integer number of steps of dt={cfg.dt}"
        )
    snap_at = _snapshot_steps(cfg, n_steps)
    ceiling = cfg.blowup_factor * float(np.abs(state.u.values).max())

    result = RunResult(final=state)
    result.records.append(diagnostics(state, cfg, r))
    if 0 in snap_at:
        result.snapshots.append(state)

    for k in range(1, n_steps + 1):
        try:
            state = stepper.advance(state)
        except PositivityError:
            raise
        except Exception as exc:  # solver failures carry the time of failure
            raise StepError(time=state.t + cfg.dt, cause=exc) from exc
        # pin t = k*dt exactly (no accumulated summation error in outputs)
        state = SimState(state.u, state.v, k * cfg.dt)
        max_u = float(np.abs(state.u.values).max())
        if max_u > ceiling:
            result.records.append(diagnostics(state, cfg, r))
            result.final = state
            result.blowup = BlowUp(time=state.t, max_u=max_u, ceiling=ceiling)
            return result
        if k in snap_at:
            result.snapshots.append(state)
        if k % cfg.diag_every == 0 or k == n_steps:
            result.records.append(diagnostics(state, cfg, r))
    result.final = state
    return result


def stability_dt(cfg: SimConfig, state: SimState) -> float:
    """Advective step-size suggestion dt <= h / (2 max_faces |chi(v) dv|),
    capped at t_end (diffusion is implicit; only the explicit chemotaxis term
    constrains dt)."""
    grid = state.u.grid
    v = state.v.values
    spacings = grid.spacing if grid.dim == 1 else (grid.spacing[1], grid.spacing[0])
    best = math.inf
    for axis, h in enumerate(spacings):
        a = np.moveaxis(v, axis, 0)
        dv = (a[1:] - a[:-1]) / h
        v_face = 0.5 * (a[1:] + a[:-1])
        top_speed = float(np.abs(cfg.chi.evaluate(v_face) * dv).max())
        if top_speed > 0:
            best = min(best, h / (2.0 * top_speed))
    return min(best, cfg.t_end)
