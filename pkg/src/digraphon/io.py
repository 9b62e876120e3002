"""Text file formats for digraphons, digraphs, latents, labels and chain output.

All writers are deterministic: floats use ``repr`` so that reading a file
and writing it again reproduces it byte for byte.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import NORM_TOL, RENORM_TOL, SWAP, InvalidDigraphon, StepDigraphon, Violation
from .dirm import DirmHyperParams


class FormatError(ValueError):
    """Malformed input file."""


def _num(x) -> str:
    x = float(x)
    return repr(x)


def _vec(v) -> str:
    return "[" + ", ".join(_num(x) for x in v) + "]"


# -- digraphon spec ------------------------------------------------------------

def digraphon_to_json(d: StepDigraphon, extra: dict | None = None) -> str:
    lines = ["{"]
    if extra:
        for key, value in extra.items():
            lines.append(f'  "{key}": {json.dumps(value)},')
    lines.append(f'  "cuts": {_vec(d.cuts)},')
    lines.append('  "weights": [')
    rows = []
    for r in range(d.k):
        rows.append("    [" + ", ".join(_vec(d.weights[r, s]) for s in range(d.k)) + "]")
    lines.append(",\n".join(rows))
    lines.append("  ],")
    lines.append(f'  "selfloop": [{", ".join(str(int(x)) for x in d.selfloop)}]')
    lines.append("}")
    return "\n".join(lines) + "\n"


def digraphon_from_dict(data: dict) -> StepDigraphon:
    """Build a digraphon from parsed JSON, filling an omitted lower triangle.

    Rows may be full length with ``null`` below the diagonal, or ragged
    (row r listing cells r..k-1). Cells off by less than 1e-9 from unit
    mass are renormalized; anything else is rejected.
    """
    try:
        cuts = [float(c) for c in data.get("cuts", [])]
        raw = data["weights"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"digraphon spec needs 'cuts' and 'weights': {exc}") from None
    k = len(cuts) + 1
    if len(raw) != k:
        raise FormatError(f"expected {k} weight rows, got {len(raw)}")
    w = np.full((k, k, 4), np.nan)
    for r, row in enumerate(raw):
        if len(row) == k:
            cells = list(enumerate(row))
        elif len(row) == k - r:
            cells = [(r + t, c) for t, c in enumerate(row)]
        else:
            raise FormatError(f"weight row {r} has {len(row)} cells")
        for s, cell in cells:
            if cell is None:
                continue
            if len(cell) != 4:
                raise FormatError(f"cell {r},{s} must have 4 entries")
            w[r, s] = [float(x) for x in cell]
    for r in range(k):
        for s in range(k):
            if np.isnan(w[r, s]).any():
                if np.isnan(w[s, r]).any():
                    raise FormatError(f"cell {r},{s} missing in both triangles")
                w[r, s] = w[s, r][SWAP]
    total = w.sum(axis=2)
    dev = np.abs(total - 1.0)
    bad = dev >= RENORM_TOL
    if bad.any():
        raise InvalidDigraphon([Violation((int(r), int(s)), "sum != 1", f"sum={float(total[r, s])!r}")
                                for r, s in zip(*np.nonzero(bad))])
    fix = dev > NORM_TOL
    if fix.any():
        w[fix] = w[fix] / total[fix][:, None]
    loops = data.get("selfloop")
    d = StepDigraphon(cuts, w, None if loops is None else loops)
    return d.check()


def write_digraphon(path, d: StepDigraphon, extra: dict | None = None) -> None:
    Path(path).write_text(digraphon_to_json(d, extra))


def read_digraphon(path) -> StepDigraphon:
    return digraphon_from_dict(_read_json(path))


def _read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None


# -- digraphs -------------------------------------------------------------------

def digraph_to_text(adj, edge_list: bool = False) -> str:
    a = np.asarray(adj, dtype=np.uint8)
    n = len(a)
    if edge_list:
        ii, jj = np.nonzero(a)
        body = "".join(f"{i} {j}\n" for i, j in zip(ii, jj))
        return f"digraph {n}\n" + body
    rows = "".join(" ".join("1" if x else "0" for x in row) + "\n" for row in a)
    return f"{n}\n" + rows


def digraph_from_text(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty digraph file")
    head = lines[0].split()
    try:
        if head[0] == "digraph":
            n = int(head[1])
            adj = np.zeros((n, n), dtype=np.uint8)
            for ln in lines[1:]:
                i, j = (int(x) for x in ln.split())
                if not (0 <= i < n and 0 <= j < n):
                    raise FormatError(f"edge {i} {j} out of range")
                adj[i, j] = 1
            return adj
        n = int(head[0])
        if len(head) != 1 or len(lines) != n + 1:
            raise FormatError(f"expected {n} matrix rows")
        adj = np.array([[int(x) for x in ln.split()] for ln in lines[1:]], dtype=np.int64).reshape(n, n)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"malformed digraph file: {exc}") from None
    if not np.isin(adj, (0, 1)).all():
        raise FormatError("matrix entries must be 0 or 1")
    return adj.astype(np.uint8)


def write_digraph(path, adj, edge_list: bool = False) -> None:
    Path(path).write_text(digraph_to_text(adj, edge_list))


def read_digraph(path) -> np.ndarray:
    return digraph_from_text(Path(path).read_text())


# -- vectors --------------------------------------------------------------------

def write_latents(path, u) -> None:
    Path(path).write_text("".join(_num(x) + "\n" for x in u))


def read_latents(path) -> np.ndarray:
    try:
        return np.array([float(ln) for ln in Path(path).read_text().split()], dtype=float)
    except ValueError as exc:
        raise FormatError(f"malformed latent file: {exc}") from None


def write_labels(path, z) -> None:
    Path(path).write_text("".join(f"{int(x)}\n" for x in z))


def read_labels(path) -> np.ndarray:
    try:
        return np.array([int(ln) for ln in Path(path).read_text().split()], dtype=np.int64)
    except ValueError as exc:
        raise FormatError(f"malformed label file: {exc}") from None


# -- hyperparameters --------------------------------------------------------------

def write_hyperparams(path, h: DirmHyperParams) -> None:
    Path(path).write_text(json.dumps(h.to_dict(), indent=2) + "\n")


def read_hyperparams(path) -> DirmHyperParams:
    try:
        return DirmHyperParams.from_dict(_read_json(path))
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad hyperparameter file: {exc}") from None


# -- chain output -------------------------------------------------------------------

TRACE_HEADER = "# iteration\tclusters\tlog_joint\tz\n"


def trace_to_text(trace) -> str:
    out = [TRACE_HEADER]
    for rec in trace:
        z = ",".join(str(int(x)) for x in rec.z)
        out.append(f"{rec.iteration}\t{rec.n_clusters}\t{_num(rec.log_joint)}\t{z}\n")
    return "".join(out)


def trace_from_text(text: str) -> list:
    from .inference import TraceRecord

    records = []
    for ln in text.splitlines():
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split("\t")
        if len(parts) != 4:
            raise FormatError(f"bad trace line: {ln[:40]!r}")
        z = np.array([int(x) for x in parts[3].split(",")] if parts[3] else [], dtype=np.int64)
        records.append(TraceRecord(int(parts[0]), int(parts[1]), float(parts[2]), z))
    return records


def write_trace(path, trace) -> None:
    Path(path).write_text(trace_to_text(trace))


def read_trace(path) -> list:
    return trace_from_text(Path(path).read_text())


def write_final_state(path, model: str, z, d: StepDigraphon) -> None:
    """Final labels plus MAP weights; the file is also a valid digraphon spec."""
    extra = {"model": model, "z": [int(x) for x in z]}
    write_digraphon(path, d, extra)


def read_final_state(path):
    data = _read_json(path)
    return data.get("model"), np.array(data["z"], dtype=np.int64), digraphon_from_dict(data)
