"""Field and report serialization: CSV, flat binary, JSON, gnuplot columns.

All writers are deterministic (sorted JSON keys, fixed float formatting) so
reruns with the same config and seed produce byte-identical outputs; wall
clock metadata lives in its own file.
"""

import json
import time

import numpy as np

__all__ = [
    "write_field_csv",
    "read_field_csv",
    "write_field_binary",
    "read_field_binary",
    "write_table_csv",
    "write_gnuplot_data",
    "write_json",
    "write_jsonl",
    "write_metadata",
    "geometry_report_table",
]

_FLOAT_FMT = "%.17g"


def _node_header(grid):
    idx = [f"i{k + 1}" for k in range(grid.dim)]
    xyz = [f"x{k + 1}" for k in range(grid.dim)]
    return idx + xyz


def write_field_csv(grid, field, path, name="value"):
    """One row per node: index tuple, coordinates, value; row-major order."""
    field = grid.check_scalar(field, name)
    header = ",".join(_node_header(grid) + [name])
    indices = grid.node_indices()
    coords = grid.node_coordinates()
    values = field.ravel()
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row_idx, row_xyz, v in zip(indices, coords, values):
            cells = [str(int(i)) for i in row_idx]
            cells += [_FLOAT_FMT % c for c in row_xyz]
            cells.append(_FLOAT_FMT % v)
            fh.write(",".join(cells) + "\n")


def read_field_csv(grid, path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    if data.shape[0] != grid.n_nodes:
        raise ValueError(f"{path} holds {data.shape[0]} rows, expected {grid.n_nodes}")
    return data[:, -1].reshape(grid.shape)


def write_field_binary(grid, field, path):
    """Row-major little-endian float64 dump of a scalar field."""
    field = grid.check_scalar(field)
    with open(path, "wb") as fh:
        fh.write(np.ascontiguousarray(field, dtype="<f8").tobytes())


def read_field_binary(grid, path):
    with open(path, "rb") as fh:
        raw = fh.read()
    values = np.frombuffer(raw, dtype="<f8")
    if values.size != grid.n_nodes:
        raise ValueError(f"{path} holds {values.size} values, expected {grid.n_nodes}")
    return values.reshape(grid.shape).copy()


def write_table_csv(columns, path):
    """Write named 1-D columns of equal length as CSV."""
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    with open(path, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*arrays):
            cells = [
                str(int(v)) if np.issubdtype(np.asarray(v).dtype, np.integer) else _FLOAT_FMT % v
                for v in row
            ]
            fh.write(",".join(cells) + "\n")


def write_gnuplot_data(columns, path):
    """Whitespace-separated columns with a comment header naming them."""
    names = list(columns)
    arrays = [np.asarray(columns[n]).ravel() for n in names]
    with open(path, "w") as fh:
        fh.write("# " + " ".join(names) + "\n")
        for row in zip(*arrays):
            fh.write(" ".join(_FLOAT_FMT % v for v in row) + "\n")


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_jsonl(entries, path):
    with open(path, "w") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def write_metadata(path, **extra):
    """Timestamped run metadata, isolated so main outputs stay reproducible."""
    payload = {"timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"), **extra}
    write_json(payload, path)


def geometry_report_table(report):
    """Columns for the per-node geometry CSV/gnuplot outputs."""
    grid = report.graph.grid
    columns = {}
    indices = grid.node_indices()
    coords = grid.node_coordinates()
    for k in range(grid.dim):
        columns[f"i{k + 1}"] = indices[:, k]
    for k in range(grid.dim):
        columns[f"x{k + 1}"] = coords[:, k]
    columns["u"] = report.graph.u.ravel()
    columns["margin"] = report.margin.ravel()
    columns["rho"] = report.rho.ravel()
    columns["cosh_theta"] = report.cosh_theta.ravel()
    columns["mean_curvature"] = report.mean_curvature.ravel()
    columns["laplacian_tau"] = report.laplacian_tau.ravel()
    columns["obstruction_norm"] = report.obstruction_norm.ravel()
    return columns
