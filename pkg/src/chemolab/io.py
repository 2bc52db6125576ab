"""File formats: field snapshots, the three CSV schemas, and the manifest.

All numbers are written as decimal text with 17 significant digits; CSV
headers are exact and checked strictly on read.
"""

from __future__ import annotations

import csv
import io as _io
import os

import numpy as np

from .errors import ConfigurationError
from .mesh import Field, Grid, build_grid
from .dynamics import DiagnosticsRecord, SimState

DIAGNOSTICS_HEADER = ["t", "mass", "min_v", "max_u", "w1q_v", "lyapunov"]
SWEEP_HEADER = ["lambda", "t", "err_u_linf", "err_u_l2", "err_v_linf", "err_v_l2"]
SUMMARY_HEADER = ["lambda", "E_u", "E_v", "runtime_seconds"]


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# Snapshots: header lines, then one value per line per field section.
# ---------------------------------------------------------------------------


def write_snapshot(path, state: SimState) -> None:
    grid = state.u.grid
    lines = [f"t {fmt(state.t)}", f"dim {grid.dim}"]
    lines.append("cells " + " ".join(str(n) for n in grid.cells))
    lines.append("spacing " + " ".join(fmt(h) for h in grid.spacing))
    for name in ("u", "v"):
        lines.append(f"field {name}")
        values = getattr(state, name).values.ravel(order="C")
        lines.extend(fmt(x) for x in values)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_snapshot(path) -> tuple[float, Grid, dict[str, np.ndarray]]:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    try:
        t = float(lines[0].split()[1])
        dim = int(lines[1].split()[1])
        cells = tuple(int(x) for x in lines[2].split()[1:])
        spacing = tuple(float(x) for x in lines[3].split()[1:])
    except (IndexError, ValueError) as exc:
        raise ConfigurationError(f"malformed snapshot header in {path}: {exc}")
    extents = tuple(h * n for h, n in zip(spacing, cells))
    grid = build_grid(dim, extents, cells)
    fields: dict[str, np.ndarray] = {}
    i = 4
    while i < len(lines):
        if not lines[i].startswith("field "):
            raise ConfigurationError(
                f"snapshot {path}: expected 'field <name>' at line {i + 1}"
            )
        name = lines[i].split()[1]
        n = grid.n_cells
        chunk = lines[i + 1 : i + 1 + n]
        if len(chunk) < n:
            raise ConfigurationError(
                f"snapshot {path}: field {name} has {len(chunk)} values, "
                f"expected {n}"
            )
        fields[name] = np.array([float(x) for x in chunk]).reshape(grid.shape)
        i += 1 + n
    return t, grid, fields


def snapshot_state(path) -> SimState:
    t, grid, fields = read_snapshot(path)
    return SimState(Field(grid, fields["u"]), Field(grid, fields["v"]), t)


# ---------------------------------------------------------------------------
# CSV writers and the strict reader.
# ---------------------------------------------------------------------------


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([x if isinstance(x, str) else fmt(x) for x in row])


def write_diagnostics_csv(path, records: list[DiagnosticsRecord]) -> None:
    _write_csv(
        path,
        DIAGNOSTICS_HEADER,
        ([r.t, r.mass, r.min_v, r.max_u, r.w1q_v, r.lyapunov] for r in records),
    )


def write_sweep_csv(path, sweep) -> None:
    rows = []
    for lam in sweep.lambdas:
        per = sweep.errors[lam]
        for j, t in enumerate(sweep.times):
            rows.append(
                [
                    lam,
                    t,
                    per[("u", "linf")][j],
                    per[("u", "l2")][j],
                    per[("v", "linf")][j],
                    per[("v", "l2")][j],
                ]
            )
    _write_csv(path, SWEEP_HEADER, rows)


def write_summary_csv(path, sweep) -> None:
    _write_csv(
        path,
        SUMMARY_HEADER,
        (
            [lam, sweep.e_u[i], sweep.e_v[i], sweep.runtimes[i]]
            for i, lam in enumerate(sweep.lambdas)
        ),
    )


def read_csv_strict(path, expected_header: list[str]) -> list[list[float]]:
    """Parse a CSV produced here; raises naming the column diff on mismatch."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigurationError(f"{path}: empty CSV")
        if header != expected_header:
            missing = [c for c in expected_header if c not in header]
            extra = [c for c in header if c not in expected_header]
            raise ConfigurationError(
                f"{path}: header mismatch (missing columns {missing}, "
                f"unexpected columns {extra})"
            )
        rows = []
        for row in reader:
            if len(row) != len(expected_header):
                raise ConfigurationError(
                    f"{path}: row with {len(row)} fields, expected "
                    f"{len(expected_header)}"
                )
            rows.append([float(x) for x in row])
    return rows


# ---------------------------------------------------------------------------
# Manifest: key: value lines, nested by two-space indentation; list items as
# "- value" lines.
# ---------------------------------------------------------------------------


def write_manifest(path, data: dict) -> None:
    buf = _io.StringIO()
    _emit(buf, data, 0)
    with open(path, "w", newline="\n") as fh:
        fh.write(buf.getvalue())


def _emit(buf, node, depth):
    pad = "  " * depth
    for key, value in node.items():
        if isinstance(value, dict):
            buf.write(f"{pad}{key}:\n")
            _emit(buf, value, depth + 1)
        elif isinstance(value, (list, tuple)):
            buf.write(f"{pad}{key}:\n")
            for item in value:
                buf.write(f"{pad}  - {item}\n")
        else:
            buf.write(f"{pad}{key}: {value}\n")


def parse_manifest(path) -> dict:
    """Inverse of write_manifest; leaves come back as strings (or lists of
    strings). A nested key whose first child line is a '- item' becomes a
    list."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    root: dict = {}
    # stack entries: (indent depth, container, parent, key of container in parent)
    stack: list[tuple[int, dict | list, dict | None, str | None]] = [
        (-1, root, None, None)
    ]
    for ln in lines:
        depth = (len(ln) - len(ln.lstrip(" "))) // 2
        body = ln.strip()
        while stack[-1][0] >= depth:
            stack.pop()
        _, container, parent, key_in_parent = stack[-1]
        if body.startswith("- "):
            if isinstance(container, dict):
                if container or parent is None:
                    raise ConfigurationError(f"manifest: stray list item {body!r}")
                container = []
                parent[key_in_parent] = container
                stack[-1] = (stack[-1][0], container, parent, key_in_parent)
            container.append(body[2:])
        elif body.endswith(":"):
            if not isinstance(container, dict):
                raise ConfigurationError(f"manifest: nested key {body!r} in a list")
            key = body[:-1]
            child: dict = {}
            container[key] = child
            stack.append((depth, child, container, key))
        else:
            key, sep, value = body.partition(": ")
            if not sep:
                raise ConfigurationError(f"manifest: malformed line {body!r}")
            if not isinstance(container, dict):
                raise ConfigurationError(f"manifest: key {key!r} inside a list")
            container[key] = value
    return root


def ensure_out_dir(path) -> None:
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write_probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise ConfigurationError(f"output directory {path!r} is not writable: {exc}")
