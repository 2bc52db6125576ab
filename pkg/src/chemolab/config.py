"""Run configuration: a flat, typed key-value format with sections.

Sections are [grid], [chi], [time], [init], [output], and (for sweeps)
[sweep]. Unknown sections or keys are errors naming the offender; silent
typos in PDE parameters are the worst failure mode. Every default is
materialized at resolve time so the manifest echo reproduces the exact
configuration.
"""

from __future__ import annotations

import configparser

from .dynamics import FieldInit, GridSpec, SimConfig
from .errors import ConfigurationError
from .experiments import SweepConfig
from .theory import ChiParams

_FLOAT_LIST = "float_list"

# section -> key -> (type, default); REQUIRED means no default
REQUIRED = object()

SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "grid": {
        "dim": ("int", 1),
        "lx": ("float", REQUIRED),
        "ly": ("float", None),
        "nx": ("int", REQUIRED),
        "ny": ("int", None),
    },
    "chi": {
        "chi0": ("float", REQUIRED),
        "a": ("float", REQUIRED),
        "k": ("float", REQUIRED),
    },
    "time": {
        "dt": ("float", REQUIRED),
        "t_end": ("float", REQUIRED),
        "lambda": ("float", 0.0),
        "solver_tol": ("float", 1e-10),
        "flux": ("str", "centered"),
        "blowup_factor": ("float", 1e6),
    },
    "init": {
        "preset": ("str", REQUIRED),  # constant | gaussian-bump
        "u_value": ("float", 1.0),
        "u_base": ("float", 0.0),
        "u_amplitude": ("float", 1.0),
        "u_sigma": ("float", 0.1),
        "u_center": (_FLOAT_LIST, None),
        "v_kind": ("str", "constant"),  # constant | gaussian
        "v_value": ("float", 1.0),
        "v_base": ("float", 0.0),
        "v_amplitude": ("float", 1.0),
        "v_sigma": ("float", 0.1),
        "v_center": (_FLOAT_LIST, None),
    },
    "output": {
        "every": ("int", 100),
        "snapshot_times": (_FLOAT_LIST, ()),
        "q": ("float", None),
        "lyapunov_p": ("float", 2.0),
        "lyapunov_eps": ("float", 0.25),
        "eta": ("float", 0.0),
    },
    "sweep": {
        "lambdas": (_FLOAT_LIST, REQUIRED),
        "times": (_FLOAT_LIST, REQUIRED),
        "norms": ("str_list", ("linf", "l2")),
    },
}


def parse_config_text(text: str) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}")
    return {section: dict(parser.items(section)) for section in parser.sections()}


def load_config_file(path) -> dict[str, dict[str, str]]:
    try:
        with open(path) as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}")


def _convert(section: str, key: str, typ: str, raw: str):
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "str":
            return raw.strip()
        if typ == _FLOAT_LIST:
            return tuple(float(x) for x in raw.split())
        if typ == "str_list":
            return tuple(x.strip() for x in raw.split())
    except ValueError as exc:
        raise ConfigurationError(f"{section}.{key}: {exc}")
    raise AssertionError(typ)


def _resolve_section(raw: dict[str, dict[str, str]], section: str) -> dict:
    known = SCHEMA[section]
    given = raw.get(section, {})
    for key in given:
        if key not in known:
            raise ConfigurationError(f"unknown key {section}.{key}")
    out = {}
    for key, (typ, default) in known.items():
        if key in given:
            out[key] = _convert(section, key, typ, given[key])
        elif default is REQUIRED:
            raise ConfigurationError(f"missing required key {section}.{key}")
        else:
            out[key] = default
    return out


def resolve_sim_config(raw: dict[str, dict[str, str]], allow_sweep=False) -> SimConfig:
    for section in raw:
        if section not in SCHEMA or (section == "sweep" and not allow_sweep):
            raise ConfigurationError(f"unknown section [{section}]")
    g = _resolve_section(raw, "grid")
    c = _resolve_section(raw, "chi")
    t = _resolve_section(raw, "time")
    ini = _resolve_section(raw, "init")
    out = _resolve_section(raw, "output")

    if g["dim"] == 1:
        grid = GridSpec(1, (g["lx"],), (g["nx"],))
    elif g["dim"] == 2:
        if g["ly"] is None or g["ny"] is None:
            raise ConfigurationError("grid.ly and grid.ny are required when dim = 2")
        grid = GridSpec(2, (g["lx"], g["ly"]), (g["nx"], g["ny"]))
    else:
        raise ConfigurationError(f"grid.dim: must be 1 or 2, got {g['dim']}")

    chi = ChiParams(chi0=c["chi0"], a=c["a"], k=c["k"])

    default_center = tuple(L / 2.0 for L in grid.extents)
    preset = ini["preset"]
    if preset == "constant":
        init_u = FieldInit(kind="constant", value=ini["u_value"])
    elif preset == "gaussian-bump":
        init_u = FieldInit(
            kind="gaussian",
            base=ini["u_base"],
            amplitude=ini["u_amplitude"],
            sigma=ini["u_sigma"],
            center=ini["u_center"] or default_center,
        )
    else:
        raise ConfigurationError(
            f"init.preset: must be 'constant' or 'gaussian-bump', got {preset!r}"
        )
    v_kind = ini["v_kind"]
    if v_kind == "constant":
        init_v = FieldInit(kind="constant", value=ini["v_value"])
    elif v_kind == "gaussian":
        init_v = FieldInit(
            kind="gaussian",
            base=ini["v_base"],
            amplitude=ini["v_amplitude"],
            sigma=ini["v_sigma"],
            center=ini["v_center"] or default_center,
        )
    else:
        raise ConfigurationError(
            f"init.v_kind: must be 'constant' or 'gaussian', got {v_kind!r}"
        )

    q = out["q"] if out["q"] is not None else float(grid.dim + 1)
    return SimConfig(
        grid=grid,
        chi=chi,
        lam=t["lambda"],
        dt=t["dt"],
        t_end=t["t_end"],
        init_u=_normalized(init_u),
        init_v=_normalized(init_v),
        solver_tol=t["solver_tol"],
        flux=t["flux"],
        diag_every=out["every"],
        snapshot_times=out["snapshot_times"],
        q=q,
        lyapunov_p=out["lyapunov_p"],
        lyapunov_eps=out["lyapunov_eps"],
        eta=out["eta"],
        blowup_factor=t["blowup_factor"],
    )


def _normalized(init: FieldInit) -> FieldInit:
    """Zero the fields the kind does not use, so echo round-trips compare
    equal regardless of which defaults were touched."""
    if init.kind == "constant":
        return FieldInit(kind="constant", value=init.value)
    return FieldInit(
        kind="gaussian",
        base=init.base,
        amplitude=init.amplitude,
        sigma=init.sigma,
        center=init.center,
    )


def resolve_sweep_config(raw: dict[str, dict[str, str]]) -> SweepConfig:
    if "sweep" not in raw:
        raise ConfigurationError("missing section [sweep]")
    base = resolve_sim_config(raw, allow_sweep=True)
    sw = _resolve_section(raw, "sweep")
    for nm in sw["norms"]:
        if nm not in ("linf", "l2"):
            raise ConfigurationError(f"sweep.norms: unknown norm {nm!r}")
    return SweepConfig(
        base=base, lambdas=sw["lambdas"], times=sw["times"], norms=sw["norms"]
    )


# ---------------------------------------------------------------------------
# Echo: resolved configuration back to section/key strings for the manifest.
# ---------------------------------------------------------------------------


def _fmt_value(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, tuple):
        return " ".join(_fmt_value(v) for v in x)
    return str(x)


def echo_sim_config(cfg: SimConfig) -> dict[str, dict[str, str]]:
    g: dict[str, str] = {"dim": str(cfg.grid.dim), "lx": repr(cfg.grid.extents[0])}
    if cfg.grid.dim == 2:
        g["ly"] = repr(cfg.grid.extents[1])
    g["nx"] = str(cfg.grid.cells[0])
    if cfg.grid.dim == 2:
        g["ny"] = str(cfg.grid.cells[1])
    chi = {"chi0": repr(cfg.chi.chi0), "a": repr(cfg.chi.a), "k": repr(cfg.chi.k)}
    time_sec = {
        "dt": repr(cfg.dt),
        "t_end": repr(cfg.t_end),
        "lambda": repr(cfg.lam),
        "solver_tol": repr(cfg.solver_tol),
        "flux": cfg.flux,
        "blowup_factor": repr(cfg.blowup_factor),
    }
    init: dict[str, str] = {}
    if cfg.init_u.kind == "constant":
        init["preset"] = "constant"
        init["u_value"] = repr(cfg.init_u.value)
    else:
        init["preset"] = "gaussian-bump"
        init["u_base"] = repr(cfg.init_u.base)
        init["u_amplitude"] = repr(cfg.init_u.amplitude)
        init["u_sigma"] = repr(cfg.init_u.sigma)
        init["u_center"] = _fmt_value(cfg.init_u.center)
    init["v_kind"] = cfg.init_v.kind
    if cfg.init_v.kind == "constant":
        init["v_value"] = repr(cfg.init_v.value)
    else:
        init["v_base"] = repr(cfg.init_v.base)
        init["v_amplitude"] = repr(cfg.init_v.amplitude)
        init["v_sigma"] = repr(cfg.init_v.sigma)
        init["v_center"] = _fmt_value(cfg.init_v.center)
    out = {
        "every": str(cfg.diag_every),
        "q": repr(cfg.q_effective),
        "lyapunov_p": repr(cfg.lyapunov_p),
        "lyapunov_eps": repr(cfg.lyapunov_eps),
        "eta": repr(cfg.eta),
    }
    if cfg.snapshot_times:
        out["snapshot_times"] = _fmt_value(cfg.snapshot_times)
    return {"grid": g, "chi": chi, "time": time_sec, "init": init, "output": out}


def echo_sweep_config(sw: SweepConfig) -> dict[str, dict[str, str]]:
    echo = echo_sim_config(sw.base)
    echo["sweep"] = {
        "lambdas": _fmt_value(sw.lambdas),
        "times": _fmt_value(sw.times),
        "norms": " ".join(sw.norms),
    }
    return echo
